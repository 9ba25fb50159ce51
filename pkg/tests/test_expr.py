"""Expression language: parser, printer, evaluator, completion."""

from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from posyn.constraints import NodeLayout
from posyn.errors import EvalError, ExprSyntaxError
from posyn.expr import (
    BinaryOp,
    BoolLit,
    EvalContext,
    FuncCall,
    Member,
    MethodCall,
    Name,
    NumberLit,
    StringLit,
    UnaryOp,
    complete,
    evaluate,
    feature_reads,
    layout_reads,
    parse,
    set_value_calls,
    source_of,
    to_source,
)
from posyn.model import NavRoot

from reference_eval import RefError, random_ast, ref_eval
from test_model import aircraft_metamodel


def make_context(**layout_overrides) -> EvalContext:
    from posyn.model import Model

    model = Model("m1", aircraft_metamodel())
    hangar = model.instantiate("Hangar")
    plane = model.instantiate("Motorized", container=(hangar, "airplanes"))
    model.write_slot(plane, "seats", 150)
    model.write_slot(plane, "maxAltitude", 13100)
    model.write_slot(plane, "length", 63.0)
    model.write_slot(plane, "height", 19.0)
    defaults = dict(element_id=plane, x=300.0, y=114.45, width=5.98, height=4.25)
    defaults.update(layout_overrides)
    layout = NodeLayout(**defaults)
    return EvalContext(layout=layout, model=NavRoot(model, plane))


class TestParser:
    def test_precedence_mul_over_add(self):
        assert parse("1 + 2 * 3") == BinaryOp(
            "+", NumberLit(1.0), BinaryOp("*", NumberLit(2.0), NumberLit(3.0))
        )

    def test_left_associativity(self):
        assert parse("10 - 4 - 3") == BinaryOp(
            "-", BinaryOp("-", NumberLit(10.0), NumberLit(4.0)), NumberLit(3.0)
        )

    def test_parens_override(self):
        assert parse("(1 + 2) * 3") == BinaryOp(
            "*", BinaryOp("+", NumberLit(1.0), NumberLit(2.0)), NumberLit(3.0)
        )

    def test_not_binds_looser_than_comparison(self):
        assert parse("not 1 = 2") == UnaryOp(
            "not", BinaryOp("=", NumberLit(1.0), NumberLit(2.0))
        )

    def test_and_binds_tighter_than_or(self):
        tree = parse("true or false and true")
        assert isinstance(tree, BinaryOp) and tree.op == "or"
        assert isinstance(tree.right, BinaryOp) and tree.right.op == "and"

    def test_unary_minus_binds_tighter_than_mul(self):
        assert parse("-2 * 3") == BinaryOp(
            "*", UnaryOp("-", NumberLit(2.0)), NumberLit(3.0)
        )

    def test_member_chain(self):
        assert parse("this.vertexSize.x") == Member(
            Member(Name("this"), "vertexSize"), "x"
        )

    def test_method_chain(self):
        tree = parse("this.model.getChildren('seats').getValue()")
        assert tree == MethodCall(
            MethodCall(
                Member(Name("this"), "model"), "getChildren", (StringLit("seats"),)
            ),
            "getValue",
            (),
        )

    def test_function_call(self):
        assert parse("min(1, 2)") == FuncCall("min", (NumberLit(1.0), NumberLit(2.0)))

    def test_string_escapes(self):
        assert parse(r"'it\'s\n'") == StringLit("it's\n")

    def test_double_quoted_string(self):
        assert parse('"abc"') == StringLit("abc")

    def test_float_literal(self):
        assert parse("3.25") == NumberLit(3.25)

    def test_source_attached_verbatim(self):
        text = "2 * this.model.getChildren('seats').getValue()"
        assert source_of(parse(text)) == text

    def test_double_operator_position(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("width = = 3")
        assert exc.value.position == 8
        assert exc.value.code == "SyntaxError"

    def test_chained_comparison_rejected(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("1 < 2 < 3")
        assert exc.value.position == 6

    def test_empty_input_rejected(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("   ")
        assert exc.value.position == 3

    def test_unterminated_string(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("'abc")
        assert exc.value.position == 0

    def test_unknown_character(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("1 # 2")
        assert exc.value.position == 2

    def test_trailing_garbage(self):
        with pytest.raises(ExprSyntaxError) as exc:
            parse("1 2")
        assert exc.value.position == 2

    def test_missing_close_paren(self):
        with pytest.raises(ExprSyntaxError):
            parse("(1 + 2")


class TestPrinter:
    @pytest.mark.parametrize(
        "text",
        [
            "1 + 2 * 3",
            "(1 + 2) * 3",
            "10 - 4 - 3",
            "10 - (4 - 3)",
            "-2 * 3",
            "-(2 * 3)",
            "not 1 = 2",
            "(not true) = false",
            "1 < 2 and 2 < 3 or not false",
            "this.model.getChildren('seats').getValue() * 2",
            "min(max(1, 2), abs(-3))",
            "'a\\'b' != 'c'",
            "(1 = 2) = true",
        ],
    )
    def test_roundtrip_structure(self, text):
        tree = parse(text)
        assert parse(to_source(tree)) == tree

    def test_integral_floats_print_bare(self):
        assert to_source(NumberLit(2.0)) == "2"
        assert to_source(NumberLit(2.5)) == "2.5"

    def test_redundant_parens_not_kept(self):
        assert to_source(parse("((1)) + (2 * 3)")) == "1 + 2 * 3"


class TestEvaluator:
    def test_chained_model_read(self):
        ctx = make_context()
        value = evaluate(parse("2 * this.model.getChildren('seats').getValue()"), ctx)
        assert value == 300.0

    def test_layout_reads(self):
        ctx = make_context(x=310.0)
        assert evaluate(parse("this.x"), ctx) == 310.0
        assert evaluate(parse("this.vertexSize.x"), ctx) == 310.0
        assert evaluate(parse("this.width"), ctx) == pytest.approx(5.98)

    def test_round_half_away_from_zero(self):
        ctx = make_context()
        assert evaluate(parse("round(150.5)"), ctx) == 151.0
        assert evaluate(parse("round(-150.5)"), ctx) == -151.0
        assert evaluate(parse("round(0.5)"), ctx) == 1.0
        assert evaluate(parse("round(2.5)"), ctx) == 3.0

    def test_division_by_zero(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("1 / 0"), make_context())
        assert exc.value.code == "DivideByZero"

    def test_log2_domain(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("log2(0)"), make_context())
        assert exc.value.code == "NumericDomain"

    def test_sqrt_domain(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("sqrt(0 - 4)"), make_context())
        assert exc.value.code == "NumericDomain"

    def test_arity_checked(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("min(1)"), make_context())
        assert exc.value.code == "Arity"

    def test_unknown_function(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("cbrt(8)"), make_context())
        assert exc.value.code == "UnknownFunction"

    def test_unknown_name(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("seats + 1"), make_context())
        assert exc.value.code == "NameResolution"

    def test_arithmetic_rejects_strings(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("'a' + 1"), make_context())
        assert exc.value.code == "TypeMismatch"

    def test_comparison_requires_same_kind(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("1 = 'one'"), make_context())
        assert exc.value.code == "TypeMismatch"

    def test_bool_and_number_do_not_compare(self):
        with pytest.raises(EvalError):
            evaluate(parse("true = 1"), make_context())

    def test_boolean_short_circuit(self):
        ctx = make_context()
        # the right side would divide by zero if evaluated
        assert evaluate(parse("false and 1 / 0 = 1"), ctx) is False
        assert evaluate(parse("true or 1 / 0 = 1"), ctx) is True

    def test_and_rejects_numbers(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("1 and 2"), make_context())
        assert exc.value.code == "TypeMismatch"

    def test_string_equality(self):
        ctx = make_context()
        assert evaluate(parse("'a' = 'a'"), ctx) is True
        assert evaluate(parse("'a' != 'b'"), ctx) is True

    def test_getvalue_of_string_slot(self):
        from posyn.model import Model

        model = Model("m1", aircraft_metamodel())
        hangar = model.instantiate("Hangar")
        model.write_slot(hangar, "name", "ROMAFIU1234")
        ctx = EvalContext(
            layout=NodeLayout(element_id=hangar), model=NavRoot(model, hangar)
        )
        value = evaluate(parse("this.model.getChildren('name').getValue()"), ctx)
        assert value == "ROMAFIU1234"

    def test_getvalue_on_reference_rejected(self):
        from posyn.model import Model

        model = Model("m1", aircraft_metamodel())
        hangar = model.instantiate("Hangar")
        ctx = EvalContext(
            layout=NodeLayout(element_id=hangar), model=NavRoot(model, hangar)
        )
        with pytest.raises(EvalError) as exc:
            evaluate(parse("this.model.getChildren('airplanes').getValue()"), ctx)
        assert exc.value.code == "TypeMismatch"

    def test_unknown_feature_in_getchildren(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("this.model.getChildren('wings').getValue()"), make_context())
        assert exc.value.code == "UnknownFeature"

    def test_setvalue_rejected_by_default(self):
        ctx = make_context()
        with pytest.raises(EvalError) as exc:
            evaluate(parse("this.model.getChildren('seats').setValue(155)"), ctx)
        assert exc.value.code == "SetValueNotAllowed"

    def test_setvalue_allowed_at_root_only(self):
        ctx = make_context()
        ctx.allow_set_value = True
        value = evaluate(parse("this.model.getChildren('seats').setValue(155)"), ctx)
        assert value == 155.0
        assert len(ctx.writes) == 1
        assert ctx.model.get_children("seats").get_value() == 155

    def test_nested_setvalue_rejected_even_when_allowed(self):
        ctx = make_context()
        ctx.allow_set_value = True
        text = "1 + this.model.getChildren('seats').setValue(155)"
        with pytest.raises(EvalError) as exc:
            evaluate(parse(text), ctx)
        assert exc.value.code == "SetValueNotAllowed"

    def test_setvalue_converts_integral_float_for_int_slot(self):
        ctx = make_context()
        ctx.allow_set_value = True
        evaluate(parse("this.model.getChildren('seats').setValue(300 / 2)"), ctx)
        assert ctx.model.get_children("seats").get_value() == 150

    def test_last_output_unset(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("this.lastOutput"), make_context())
        assert exc.value.code == "NameResolution"

    def test_last_output_set(self):
        ctx = make_context()
        ctx.last_output = 42.0
        assert evaluate(parse("this.lastOutput + 1"), ctx) == 43.0

    def test_target_unbound(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("this.target.x"), make_context())
        assert exc.value.code == "NameResolution"

    def test_target_bound(self):
        ctx = make_context()
        ctx.target = NodeLayout(element_id="other", x=7.0, y=8.0)
        assert evaluate(parse("this.target.x"), ctx) == 7.0

    def test_overflow_is_domain_error(self):
        with pytest.raises(EvalError) as exc:
            evaluate(parse("pow(10, 400)"), make_context())
        assert exc.value.code == "NumericDomain"


class TestStructuralHelpers:
    def test_feature_reads(self):
        tree = parse("2 * this.model.getChildren('seats').getValue()")
        assert feature_reads(tree) == {"seats"}

    def test_layout_reads_with_alias(self):
        tree = parse("this.vertexSize.x + this.height")
        assert layout_reads(tree) == {"x", "height"}

    def test_set_value_calls_found(self):
        tree = parse("this.model.getChildren('seats').setValue(round(this.x / 2))")
        assert len(set_value_calls(tree)) == 1


class TestCompletion:
    def test_top_level(self):
        got = complete("")
        assert got[:3] == ["this", "true", "false"]
        assert "round" in got and "log2" in got

    def test_after_operator(self):
        assert "this" in complete("1 + ")

    def test_prefix_filter(self):
        assert complete("th") == ["this"]
        assert complete("ro") == ["round"]

    def test_this_members(self):
        got = complete("this.")
        assert got == [
            "x", "y", "width", "height", "rotation",
            "vertexSize", "model", "target", "lastOutput",
        ]

    def test_this_member_prefix(self):
        assert complete("this.ver") == ["vertexSize"]

    def test_vertex_members(self):
        assert complete("this.vertexSize.") == ["x", "y"]

    def test_model_members(self):
        assert complete("this.model.") == ["getChildren"]

    def test_target_members(self):
        assert complete("this.target.") == [
            "x", "y", "width", "height", "rotation", "vertexSize",
        ]

    def test_handle_methods_after_call(self):
        assert complete("this.model.getChildren('seats').") == ["getValue", "setValue"]

    def test_feature_names_inside_quote(self):
        mm = aircraft_metamodel()
        got = complete("this.model.getChildren('", metamodel=mm, class_name="Motorized")
        assert got == ["maxAltitude", "height", "length", "seats", "tankCapacity"]

    def test_feature_prefix_inside_quote(self):
        mm = aircraft_metamodel()
        got = complete("this.model.getChildren('se", metamodel=mm, class_name="Motorized")
        assert got == ["seats"]

    def test_quoted_features_without_quote(self):
        mm = aircraft_metamodel()
        got = complete("this.model.getChildren(", metamodel=mm, class_name="Glider")
        assert got == ["'maxAltitude'", "'height'", "'length'", "'seats'"]

    def test_no_schema_no_features(self):
        assert complete("this.model.getChildren('") == []

    def test_after_complete_operand(self):
        assert complete("this.x ") == []

    def test_unknown_receiver(self):
        assert complete("this.lastOutput.") == []


class TestAgainstReference:
    """The engine evaluator against the independent reference semantics."""

    def test_random_asts_agree(self):
        rng = random.Random(20260814)
        ctx = make_context()
        layout = {
            "x": ctx.layout.x,
            "y": ctx.layout.y,
            "width": ctx.layout.width,
            "height": ctx.layout.height,
            "rotation": ctx.layout.rotation,
        }
        slots = {
            "maxAltitude": 13100,
            "height": 19.0,
            "length": 63.0,
            "seats": 150,
            "tankCapacity": 0.0,
        }
        agreements = 0
        for _ in range(2000):
            tree = random_ast(rng, depth=rng.randint(0, 5), slot_names=list(slots))
            try:
                expected: object = ref_eval(tree, layout, slots)
                expected_error = False
            except RefError:
                expected_error = True
                expected = None
            try:
                got: object = evaluate(tree, ctx)
                got_error = False
            except EvalError:
                got_error = True
                got = None
            assert got_error == expected_error, to_source(tree)
            if not expected_error:
                if isinstance(expected, bool) or isinstance(expected, str):
                    assert got == expected, to_source(tree)
                else:
                    assert isinstance(got, float)
                    scale = max(1.0, abs(expected), abs(got))
                    assert abs(got - expected) <= 1e-12 * scale, to_source(tree)
            agreements += 1
        assert agreements == 2000

    def test_printed_random_asts_reparse(self):
        rng = random.Random(7)
        for _ in range(500):
            tree = random_ast(rng, depth=rng.randint(0, 4), slot_names=["seats"])
            assert parse(to_source(tree)) == tree


@settings(max_examples=200)
@given(st.integers(min_value=-(10**9), max_value=10**9), st.integers(-1000, 1000))
def test_integer_arithmetic_matches_python(a, b):
    ctx = make_context()
    assert evaluate(parse(f"{a} + {b}"), ctx) == float(a + b)
    assert evaluate(parse(f"{a} * {b}"), ctx) == float(a * b)


@settings(max_examples=200)
@given(st.floats(min_value=-1e9, max_value=1e9, allow_nan=False))
def test_round_matches_half_away_from_zero(x):
    from posyn.expr import FuncCall, NumberLit

    got = evaluate(FuncCall("round", (NumberLit(x),)), make_context())
    expected = math.copysign(math.floor(abs(x) + 0.5), x) if x != 0 else 0.0
    assert got == expected
