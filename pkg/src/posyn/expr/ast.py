"""AST node types for the rule expression language, plus structural helpers.

Nodes are frozen dataclasses so they can be shared, hashed, and compared by
value. The parser attaches the verbatim source text to the root node (out of
band, see :func:`attach_source`); serialization prefers that text so saved
documents keep the author's spelling.
"""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass(frozen=True)
class Node:
    pass


@dataclass(frozen=True)
class NumberLit(Node):
    value: float


@dataclass(frozen=True)
class StringLit(Node):
    value: str


@dataclass(frozen=True)
class BoolLit(Node):
    value: bool


@dataclass(frozen=True)
class Name(Node):
    ident: str


@dataclass(frozen=True)
class Member(Node):
    obj: Node
    name: str


@dataclass(frozen=True)
class FuncCall(Node):
    name: str
    args: tuple[Node, ...]


@dataclass(frozen=True)
class MethodCall(Node):
    obj: Node
    name: str
    args: tuple[Node, ...]


@dataclass(frozen=True)
class UnaryOp(Node):
    op: str  # "-" or "not"
    operand: Node


@dataclass(frozen=True)
class BinaryOp(Node):
    op: str  # + - * / = != < <= > >= and or
    left: Node
    right: Node


FUNCTION_NAMES = ("round", "floor", "ceil", "abs", "min", "max", "log2", "pow", "sqrt")

FUNCTION_ARITY = {
    "round": 1,
    "floor": 1,
    "ceil": 1,
    "abs": 1,
    "min": 2,
    "max": 2,
    "log2": 1,
    "pow": 2,
    "sqrt": 1,
}


def attach_source(root: Node, text: str) -> Node:
    """Record the verbatim source on a parsed root node."""
    object.__setattr__(root, "_source", text)
    return root


def source_of(root: Node) -> str | None:
    """The verbatim text this root was parsed from, if known."""
    return getattr(root, "_source", None)


def children(node: Node) -> list[Node]:
    out: list[Node] = []
    for f in fields(node):
        value = getattr(node, f.name)
        if isinstance(value, Node):
            out.append(value)
        elif isinstance(value, tuple):
            out.extend(v for v in value if isinstance(v, Node))
    return out


def walk(node: Node):
    """Pre-order traversal of an expression tree."""
    yield node
    for child in children(node):
        yield from walk(child)


def feature_reads(root: Node) -> set[str]:
    """Feature names navigated through getChildren with a literal argument.

    Used for refresh dependency tracking: a rule re-fires when one of these
    features changes on the element's own model object.
    """
    out: set[str] = set()
    for node in walk(root):
        if (
            isinstance(node, MethodCall)
            and node.name == "getChildren"
            and len(node.args) == 1
            and isinstance(node.args[0], StringLit)
        ):
            out.add(node.args[0].value)
    return out


def layout_reads(root: Node) -> set[str]:
    """Layout property names the expression reads off ``this``.

    vertexSize.x / vertexSize.y alias x / y; both spellings report the
    canonical short name.
    """
    out: set[str] = set()
    for node in walk(root):
        if isinstance(node, Member):
            if isinstance(node.obj, Name) and node.obj.ident == "this":
                if node.name in ("x", "y", "width", "height", "rotation"):
                    out.add(node.name)
            elif (
                isinstance(node.obj, Member)
                and isinstance(node.obj.obj, Name)
                and node.obj.obj.ident == "this"
                and node.obj.name == "vertexSize"
                and node.name in ("x", "y")
            ):
                out.add(node.name)
    return out


def set_value_calls(root: Node) -> list[MethodCall]:
    return [
        node
        for node in walk(root)
        if isinstance(node, MethodCall) and node.name == "setValue"
    ]


_PRECEDENCE = {
    "or": 1,
    "and": 2,
    "not": 3,
    "=": 4,
    "!=": 4,
    "<": 4,
    "<=": 4,
    ">": 4,
    ">=": 4,
    "+": 5,
    "-": 5,
    "*": 6,
    "/": 6,
    "unary-": 7,
}
_ATOM = 8


def _prec(node: Node) -> int:
    if isinstance(node, BinaryOp):
        return _PRECEDENCE[node.op]
    if isinstance(node, UnaryOp):
        return _PRECEDENCE["not"] if node.op == "not" else _PRECEDENCE["unary-"]
    return _ATOM


def format_number(value: float) -> str:
    """Numbers with integral value print without a trailing fraction."""
    if value == int(value) and abs(value) < 1e16:
        return str(int(value))
    return repr(float(value))


def _quote(text: str) -> str:
    escaped = (
        text.replace("\\", "\\\\").replace("'", "\\'").replace("\n", "\\n").replace("\t", "\\t")
    )
    return f"'{escaped}'"


def to_source(node: Node) -> str:
    """Render a tree back to source. For parser-produced trees the result
    re-parses to an equal tree; explicit parens are re-derived, not kept."""
    if isinstance(node, NumberLit):
        return format_number(node.value)
    if isinstance(node, StringLit):
        return _quote(node.value)
    if isinstance(node, BoolLit):
        return "true" if node.value else "false"
    if isinstance(node, Name):
        return node.ident
    if isinstance(node, Member):
        return f"{_wrap(node.obj, _ATOM)}.{node.name}"
    if isinstance(node, FuncCall):
        return f"{node.name}({', '.join(to_source(a) for a in node.args)})"
    if isinstance(node, MethodCall):
        args = ", ".join(to_source(a) for a in node.args)
        return f"{_wrap(node.obj, _ATOM)}.{node.name}({args})"
    if isinstance(node, UnaryOp):
        me = _prec(node)
        if node.op == "not":
            return f"not {_wrap(node.operand, me)}"
        return f"-{_wrap(node.operand, me)}"
    if isinstance(node, BinaryOp):
        me = _prec(node)
        # comparison is non-associative, so a comparison child on either
        # side needs parens; other binary ops associate to the left
        left_min = me + 1 if me == _PRECEDENCE["="] else me
        left = _wrap(node.left, left_min)
        right = _wrap(node.right, me + 1)
        return f"{left} {node.op} {right}"
    raise TypeError(f"cannot print node {type(node).__name__}")


def _wrap(node: Node, minimum: int) -> str:
    text = to_source(node)
    if _prec(node) < minimum:
        return f"({text})"
    return text
