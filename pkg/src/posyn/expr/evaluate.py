"""Sandboxed evaluation of rule expressions.

Numbers are floats throughout; model reads through getValue convert int
slots to float. The only write primitive is setValue, and it is legal only
as the outermost call of an expression whose context explicitly allows it,
so condition and value expressions stay side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from ..errors import EvalError, ModelError
from ..model import NavRoot, SlotHandle
from .ast import (
    FUNCTION_ARITY,
    FUNCTION_NAMES,
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

if TYPE_CHECKING:
    from ..constraints import NodeLayout


class _Unset:
    def __repr__(self) -> str:
        return "<unset>"


UNSET = _Unset()


@dataclass
class EvalContext:
    """Everything an expression can see: the element's layout (``this``),
    its model object (``this.model``), an optional rule target
    (``this.target``), and the previous action's output (``this.lastOutput``).
    """

    layout: NodeLayout
    model: NavRoot | None = None
    target: NodeLayout | None = None
    last_output: object = UNSET
    allow_set_value: bool = False
    # model writes performed by setValue during this evaluation
    writes: list = field(default_factory=list)


class _LayoutView:
    """Read access to a layout's positional properties."""

    def __init__(self, layout: NodeLayout):
        self._layout = layout

    def member(self, name: str) -> object:
        if name in ("x", "y", "width", "height", "rotation"):
            return float(getattr(self._layout, name))
        if name == "vertexSize":
            return _VertexSize(self._layout)
        raise EvalError(f"layout has no property {name!r}", code="NameResolution")


class _VertexSize:
    """The anchor vertex position; ``x``/``y`` alias the layout's x/y."""

    def __init__(self, layout: NodeLayout):
        self._layout = layout

    def member(self, name: str) -> object:
        if name in ("x", "y"):
            return float(getattr(self._layout, name))
        raise EvalError(f"vertexSize has no property {name!r}", code="NameResolution")


class _ThisProxy:
    def __init__(self, ctx: EvalContext):
        self._ctx = ctx

    def member(self, name: str) -> object:
        ctx = self._ctx
        if name in ("x", "y", "width", "height", "rotation"):
            return float(getattr(ctx.layout, name))
        if name == "vertexSize":
            return _VertexSize(ctx.layout)
        if name == "model":
            if ctx.model is None:
                raise EvalError("no model object bound to this", code="NameResolution")
            return ctx.model
        if name == "target":
            if ctx.target is None:
                raise EvalError("no target bound for this rule", code="NameResolution")
            return _LayoutView(ctx.target)
        if name == "lastOutput":
            if ctx.last_output is UNSET:
                raise EvalError(
                    "lastOutput is not set before the first action", code="NameResolution"
                )
            return ctx.last_output
        raise EvalError(f"this has no property {name!r}", code="NameResolution")


def _require_number(value: object, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise EvalError(f"{what} expects a number, got {_kind(value)}", code="TypeMismatch")
    return float(value)


def _kind(value: object) -> str:
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    return type(value).__name__


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise EvalError(f"{what} produced a non-finite number", code="NumericDomain")
    return value


def _apply_function(name: str, args: list[object]) -> float:
    if name not in FUNCTION_NAMES:
        raise EvalError(f"unknown function {name!r}", code="UnknownFunction")
    if len(args) != FUNCTION_ARITY[name]:
        raise EvalError(
            f"{name} takes {FUNCTION_ARITY[name]} argument(s), got {len(args)}",
            code="Arity",
        )
    nums = [_require_number(a, name) for a in args]
    if name == "round":
        x = nums[0]
        # half away from zero, not banker's rounding
        return float(math.floor(x + 0.5)) if x >= 0 else float(math.ceil(x - 0.5))
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
            raise EvalError("log2 of a non-positive number", code="NumericDomain")
        return _finite(math.log2(nums[0]), "log2")
    if name == "sqrt":
        if nums[0] < 0:
            raise EvalError("sqrt of a negative number", code="NumericDomain")
        return _finite(math.sqrt(nums[0]), "sqrt")
    # pow
    try:
        result = math.pow(nums[0], nums[1])
    except (ValueError, OverflowError) as err:
        raise EvalError(f"pow out of domain: {err}", code="NumericDomain") from None
    return _finite(result, "pow")


def evaluate(root: Node, ctx: EvalContext) -> object:
    """Evaluate an expression tree against a context.

    Raises :class:`EvalError` on any typing, naming, or numeric problem;
    the engine converts those into recorded violations.
    """
    return _eval(root, ctx, is_root=True)


def _eval(node: Node, ctx: EvalContext, is_root: bool = False) -> object:
    if isinstance(node, NumberLit):
        return float(node.value)
    if isinstance(node, StringLit):
        return node.value
    if isinstance(node, BoolLit):
        return node.value
    if isinstance(node, Name):
        if node.ident == "this":
            return _ThisProxy(ctx)
        raise EvalError(f"unknown name {node.ident!r}", code="NameResolution")
    if isinstance(node, Member):
        obj = _eval(node.obj, ctx)
        return _member(obj, node.name)
    if isinstance(node, FuncCall):
        args = [_eval(a, ctx) for a in node.args]
        return _apply_function(node.name, args)
    if isinstance(node, MethodCall):
        return _method(node, ctx, is_root)
    if isinstance(node, UnaryOp):
        value = _eval(node.operand, ctx)
        if node.op == "-":
            return -_require_number(value, "unary minus")
        if not isinstance(value, bool):
            raise EvalError(f"not expects a boolean, got {_kind(value)}", code="TypeMismatch")
        return not value
    if isinstance(node, BinaryOp):
        return _binary(node, ctx)
    raise EvalError(f"cannot evaluate node {type(node).__name__}", code="TypeMismatch")


def _member(obj: object, name: str) -> object:
    if isinstance(obj, (_ThisProxy, _LayoutView, _VertexSize)):
        return obj.member(name)
    if isinstance(obj, (NavRoot, SlotHandle)):
        raise EvalError(
            f"{name!r} must be called as a method here", code="TypeMismatch"
        )
    raise EvalError(f"{_kind(obj)} has no property {name!r}", code="TypeMismatch")


def _method(node: MethodCall, ctx: EvalContext, is_root: bool) -> object:
    if node.name == "setValue" and not (is_root and ctx.allow_set_value):
        raise EvalError(
            "setValue is only allowed as the outermost call of an action",
            code="SetValueNotAllowed",
        )
    obj = _eval(node.obj, ctx)
    args = [_eval(a, ctx) for a in node.args]

    if isinstance(obj, NavRoot):
        if node.name != "getChildren":
            raise EvalError(f"model has no method {node.name!r}", code="UnknownMethod")
        if len(args) != 1:
            raise EvalError("getChildren takes 1 argument", code="Arity")
        if not isinstance(args[0], str):
            raise EvalError("getChildren expects a feature name string", code="TypeMismatch")
        try:
            return obj.get_children(args[0])
        except ModelError as err:
            raise EvalError(err.message, code=err.code) from None

    if isinstance(obj, SlotHandle):
        if node.name == "getValue":
            if args:
                raise EvalError("getValue takes no arguments", code="Arity")
            value = obj.get_value()
            if isinstance(value, bool):
                return value
            if isinstance(value, (int, float)):
                return float(value)
            return value
        if node.name == "setValue":
            if len(args) != 1:
                raise EvalError("setValue takes 1 argument", code="Arity")
            try:
                delta = obj.set_value(args[0])
            except ModelError as err:
                raise EvalError(err.message, code=err.code) from None
            ctx.writes.append(delta)
            return args[0]
        raise EvalError(f"slot has no method {node.name!r}", code="UnknownMethod")

    if isinstance(obj, list):
        raise EvalError(
            f"{node.name} is not available on a collection of objects",
            code="TypeMismatch",
        )
    raise EvalError(f"{_kind(obj)} has no method {node.name!r}", code="UnknownMethod")


def _binary(node: BinaryOp, ctx: EvalContext) -> object:
    op = node.op
    if op in ("and", "or"):
        left = _eval(node.left, ctx)
        if not isinstance(left, bool):
            raise EvalError(f"{op} expects booleans, got {_kind(left)}", code="TypeMismatch")
        if op == "or" and left:
            return True
        if op == "and" and not left:
            return False
        right = _eval(node.right, ctx)
        if not isinstance(right, bool):
            raise EvalError(f"{op} expects booleans, got {_kind(right)}", code="TypeMismatch")
        return right

    left = _eval(node.left, ctx)
    right = _eval(node.right, ctx)

    if op in ("+", "-", "*", "/"):
        a = _require_number(left, op)
        b = _require_number(right, op)
        if op == "+":
            return _finite(a + b, op)
        if op == "-":
            return _finite(a - b, op)
        if op == "*":
            return _finite(a * b, op)
        if b == 0:
            raise EvalError("division by zero", code="DivideByZero")
        return _finite(a / b, op)

    # comparisons require operands of the same kind
    if op in ("=", "!="):
        if _kind(left) != _kind(right) or _kind(left) not in ("number", "string", "boolean"):
            raise EvalError(
                f"cannot compare {_kind(left)} with {_kind(right)}", code="TypeMismatch"
            )
        equal = left == right
        return equal if op == "=" else not equal

    a = _require_number(left, op)
    b = _require_number(right, op)
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    return a >= b
