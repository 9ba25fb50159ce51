"""Independent reference semantics for the expression language.

This is a deliberately separate implementation used as an oracle: it
interprets AST nodes structurally against plain dicts, shares no code with
the engine evaluator, and implements the numeric rules from their
definitions (round is half away from zero via copysign, comparisons are
same-kind only, booleans short-circuit).
"""

from __future__ import annotations

import math
import random

from posyn.expr.ast import (
    BinaryOp,
    BoolLit,
    FuncCall,
    Member,
    MethodCall,
    Name,
    Node,
    NumberLit,
    StringLit,
    UnaryOp,
)

LAYOUT_PROPS = ("x", "y", "width", "height", "rotation")


class RefError(Exception):
    """Any evaluation failure in the reference semantics."""


_THIS = object()
_VERTEX = object()
_MODEL = object()


class _Handle:
    def __init__(self, feature: str):
        self.feature = feature


def ref_eval(node: Node, layout: dict, slots: dict) -> object:
    """Evaluate against a layout dict and a model-slot dict."""
    value = _ref(node, layout, slots)
    if isinstance(value, float) and not math.isfinite(value):
        raise RefError("non-finite result")
    return value


def _number(value: object) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise RefError(f"expected number, got {value!r}")
    return float(value)


def _ref(node: Node, layout: dict, slots: dict) -> object:
    if isinstance(node, NumberLit):
        return float(node.value)
    if isinstance(node, StringLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, Name):
        if node.ident == "this":
            return _THIS
        raise RefError(f"unknown name {node.ident}")
    if isinstance(node, Member):
        obj = _ref(node.obj, layout, slots)
        if obj is _THIS:
            if node.name in LAYOUT_PROPS:
                return float(layout[node.name])
            if node.name == "vertexSize":
                return _VERTEX
            if node.name == "model":
                return _MODEL
            raise RefError(f"this has no {node.name}")
        if obj is _VERTEX:
            if node.name in ("x", "y"):
                return float(layout[node.name])
            raise RefError(f"vertexSize has no {node.name}")
        raise RefError(f"no member {node.name}")
    if isinstance(node, MethodCall):
        obj = _ref(node.obj, layout, slots)
        args = [_ref(a, layout, slots) for a in node.args]
        if obj is _MODEL and node.name == "getChildren":
            if len(args) != 1 or not isinstance(args[0], str):
                raise RefError("bad getChildren call")
            if args[0] not in slots:
                raise RefError(f"unknown feature {args[0]}")
            return _Handle(args[0])
        if isinstance(obj, _Handle) and node.name == "getValue":
            if args:
                raise RefError("getValue takes no arguments")
            value = slots[obj.feature]
            if isinstance(value, bool) or isinstance(value, str):
                return value
            return float(value)
        raise RefError(f"no method {node.name}")
    if isinstance(node, FuncCall):
        args = [_ref(a, layout, slots) for a in node.args]
        return _ref_function(node.name, args)
    if isinstance(node, UnaryOp):
        value = _ref(node.operand, layout, slots)
        if node.op == "-":
            return -_number(value)
        if not isinstance(value, bool):
            raise RefError("not expects a boolean")
        return not value
    if isinstance(node, BinaryOp):
        return _ref_binary(node, layout, slots)
    raise RefError(f"unknown node {node}")


def _ref_function(name: str, args: list[object]) -> float:
    arity = {"round": 1, "floor": 1, "ceil": 1, "abs": 1, "min": 2, "max": 2,
             "log2": 1, "pow": 2, "sqrt": 1}
    if name not in arity:
        raise RefError(f"unknown function {name}")
    if len(args) != arity[name]:
        raise RefError("bad arity")
    nums = [_number(a) for a in args]
    if name == "round":
        x = nums[0]
        if x == 0:
            return 0.0
        return math.copysign(math.floor(abs(x) + 0.5), x)
    if name == "floor":
        return float(math.floor(nums[0]))
    if name == "ceil":
        return float(math.ceil(nums[0]))
    if name == "abs":
        return abs(nums[0])
    if name == "min":
        return min(nums)
    if name == "max":
        return max(nums)
    if name == "log2":
        if nums[0] <= 0:
            raise RefError("log2 domain")
        return math.log2(nums[0])
    if name == "sqrt":
        if nums[0] < 0:
            raise RefError("sqrt domain")
        return math.sqrt(nums[0])
    try:
        result = nums[0] ** nums[1]
    except (ValueError, OverflowError, ZeroDivisionError):
        raise RefError("pow domain") from None
    if isinstance(result, complex) or not math.isfinite(result):
        raise RefError("pow domain")
    return float(result)


def _kind(value: object) -> str:
    if isinstance(value, bool):
        return "bool"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    return "other"


def _ref_binary(node: BinaryOp, layout: dict, slots: dict) -> object:
    op = node.op
    if op in ("and", "or"):
        left = _ref(node.left, layout, slots)
        if not isinstance(left, bool):
            raise RefError("boolean expected")
        if op == "or" and left:
            return True
        if op == "and" and not left:
            return False
        right = _ref(node.right, layout, slots)
        if not isinstance(right, bool):
            raise RefError("boolean expected")
        return right
    left = _ref(node.left, layout, slots)
    right = _ref(node.right, layout, slots)
    if op in ("+", "-", "*", "/"):
        a, b = _number(left), _number(right)
        if op == "+":
            result = a + b
        elif op == "-":
            result = a - b
        elif op == "*":
            result = a * b
        else:
            if b == 0:
                raise RefError("division by zero")
            result = a / b
        if not math.isfinite(result):
            raise RefError("non-finite result")
        return result
    if op in ("=", "!="):
        if _kind(left) != _kind(right) or _kind(left) == "other":
            raise RefError("comparison kinds differ")
        return (left == right) if op == "=" else (left != right)
    a, b = _number(left), _number(right)
    return {"<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b}[op]


# --- random AST generation -----------------------------------------------


def random_ast(rng: random.Random, depth: int, slot_names: list[str]) -> Node:
    """A random expression tree of the given maximum depth.

    Mixes numeric and boolean subtrees across the whole surface of the
    grammar; leaves read literals, layout properties, and model slots.
    """
    return _gen(rng, depth, slot_names, want_bool=rng.random() < 0.25)


def _gen(rng: random.Random, depth: int, slot_names: list[str], want_bool: bool) -> Node:
    if want_bool:
        return _gen_bool(rng, depth, slot_names)
    return _gen_num(rng, depth, slot_names)


def _gen_num(rng: random.Random, depth: int, slot_names: list[str]) -> Node:
    if depth <= 0:
        pick = rng.random()
        if pick < 0.5:
            # literals are nonnegative; negatives appear as unary minus,
            # matching what the parser can produce
            if rng.random() < 0.5:
                lit: Node = NumberLit(float(rng.randint(0, 50)))
            else:
                lit = NumberLit(round(rng.uniform(0, 100), 3))
            return UnaryOp("-", lit) if rng.random() < 0.3 else lit
        if pick < 0.8 or not slot_names:
            prop = rng.choice(["x", "y", "width", "height", "rotation"])
            if prop in ("x", "y") and rng.random() < 0.3:
                return Member(Member(Name("this"), "vertexSize"), prop)
            return Member(Name("this"), prop)
        feature = rng.choice(slot_names)
        return MethodCall(
            MethodCall(Member(Name("this"), "model"), "getChildren", (StringLit(feature),)),
            "getValue",
            (),
        )
    pick = rng.random()
    if pick < 0.45:
        op = rng.choice(["+", "-", "*", "/"])
        return BinaryOp(
            op,
            _gen_num(rng, depth - 1, slot_names),
            _gen_num(rng, depth - 1, slot_names),
        )
    if pick < 0.55:
        return UnaryOp("-", _gen_num(rng, depth - 1, slot_names))
    if pick < 0.9:
        name = rng.choice(["round", "floor", "ceil", "abs", "min", "max", "log2", "pow", "sqrt"])
        arity = 2 if name in ("min", "max", "pow") else 1
        args = tuple(_gen_num(rng, depth - 1, slot_names) for _ in range(arity))
        return FuncCall(name, args)
    return _gen_num(rng, depth - 1, slot_names)


def _gen_bool(rng: random.Random, depth: int, slot_names: list[str]) -> Node:
    if depth <= 0:
        return BoolLit(rng.random() < 0.5)
    pick = rng.random()
    if pick < 0.45:
        op = rng.choice(["=", "!=", "<", "<=", ">", ">="])
        return BinaryOp(
            op,
            _gen_num(rng, depth - 1, slot_names),
            _gen_num(rng, depth - 1, slot_names),
        )
    if pick < 0.75:
        op = rng.choice(["and", "or"])
        return BinaryOp(
            op,
            _gen_bool(rng, depth - 1, slot_names),
            _gen_bool(rng, depth - 1, slot_names),
        )
    if pick < 0.9:
        return UnaryOp("not", _gen_bool(rng, depth - 1, slot_names))
    return BoolLit(rng.random() < 0.5)
