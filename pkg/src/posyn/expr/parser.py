"""Recursive-descent parser for the rule expression language.

The grammar is closed: literals, identifiers, member access, method and
function calls, arithmetic, comparison, and boolean connectives. Binding
tightness, loosest first: or, and, not, comparison, additive,
multiplicative, unary minus, postfix. Comparison does not associate, so
chained comparisons are rejected rather than silently misread.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import ExprSyntaxError
from .ast import (
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
    attach_source,
)

_KEYWORDS = ("true", "false", "and", "or", "not")
_TWO_CHAR_OPS = ("<=", ">=", "!=")
_ONE_CHAR_OPS = "=<>+-*/(),."

_OPERAND_EXPECTED = ("number", "string", "identifier", "(", "-", "not", "true", "false")


@dataclass(frozen=True)
class Token:
    kind: str  # "number" | "string" | "ident" | keyword or operator text | "end"
    text: str
    pos: int
    value: object = None


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            i += 1
            continue
        if ch.isdigit():
            start = i
            while i < n and text[i].isdigit():
                i += 1
            if i + 1 < n and text[i] == "." and text[i + 1].isdigit():
                i += 1
                while i < n and text[i].isdigit():
                    i += 1
            lexeme = text[start:i]
            tokens.append(Token("number", lexeme, start, value=float(lexeme)))
            continue
        if ch in "'\"":
            start = i
            quote = ch
            i += 1
            chars: list[str] = []
            while i < n and text[i] != quote:
                c = text[i]
                if c == "\\":
                    if i + 1 >= n:
                        break
                    esc = text[i + 1]
                    chars.append({"n": "\n", "t": "\t"}.get(esc, esc))
                    i += 2
                else:
                    chars.append(c)
                    i += 1
            if i >= n:
                raise ExprSyntaxError(
                    "unterminated string literal", position=start, expected=(quote,)
                )
            i += 1
            tokens.append(Token("string", text[start:i], start, value="".join(chars)))
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (text[i].isalnum() or text[i] == "_"):
                i += 1
            word = text[start:i]
            kind = word if word in _KEYWORDS else "ident"
            tokens.append(Token(kind, word, start))
            continue
        if text[i : i + 2] in _TWO_CHAR_OPS:
            tokens.append(Token(text[i : i + 2], text[i : i + 2], i))
            i += 2
            continue
        if ch in _ONE_CHAR_OPS:
            tokens.append(Token(ch, ch, i))
            i += 1
            continue
        raise ExprSyntaxError(f"unexpected character {ch!r}", position=i, expected=())
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def expect(self, kind: str) -> Token:
        if self.current.kind != kind:
            self.fail(f"expected {kind!r}", expected=(kind,))
        return self.advance()

    def fail(self, message: str, expected: tuple[str, ...]) -> None:
        token = self.current
        shown = token.text or "end of input"
        raise ExprSyntaxError(
            f"{message}, found {shown!r}", position=token.pos, expected=expected
        )

    def parse(self) -> Node:
        node = self.or_expr()
        if self.current.kind != "end":
            self.fail("expected operator or end of input", expected=("end",))
        return node

    def or_expr(self) -> Node:
        node = self.and_expr()
        while self.current.kind == "or":
            self.advance()
            node = BinaryOp("or", node, self.and_expr())
        return node

    def and_expr(self) -> Node:
        node = self.not_expr()
        while self.current.kind == "and":
            self.advance()
            node = BinaryOp("and", node, self.not_expr())
        return node

    def not_expr(self) -> Node:
        if self.current.kind == "not":
            self.advance()
            return UnaryOp("not", self.not_expr())
        return self.comparison()

    def comparison(self) -> Node:
        node = self.additive()
        if self.current.kind in ("=", "!=", "<", "<=", ">", ">="):
            op = self.advance().kind
            node = BinaryOp(op, node, self.additive())
            if self.current.kind in ("=", "!=", "<", "<=", ">", ">="):
                self.fail("comparison does not chain", expected=("end",))
        return node

    def additive(self) -> Node:
        node = self.multiplicative()
        while self.current.kind in ("+", "-"):
            op = self.advance().kind
            node = BinaryOp(op, node, self.multiplicative())
        return node

    def multiplicative(self) -> Node:
        node = self.unary()
        while self.current.kind in ("*", "/"):
            op = self.advance().kind
            node = BinaryOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.current.kind == "-":
            self.advance()
            return UnaryOp("-", self.unary())
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while self.current.kind == ".":
            self.advance()
            name = self.expect("ident").text
            if self.current.kind == "(":
                node = MethodCall(node, name, self.arguments())
            else:
                node = Member(node, name)
        return node

    def arguments(self) -> tuple[Node, ...]:
        self.expect("(")
        args: list[Node] = []
        if self.current.kind != ")":
            args.append(self.or_expr())
            while self.current.kind == ",":
                self.advance()
                args.append(self.or_expr())
        self.expect(")")
        return tuple(args)

    def primary(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            return NumberLit(float(token.value))  # type: ignore[arg-type]
        if token.kind == "string":
            self.advance()
            return StringLit(str(token.value))
        if token.kind in ("true", "false"):
            self.advance()
            return BoolLit(token.kind == "true")
        if token.kind == "ident":
            self.advance()
            if self.current.kind == "(":
                return FuncCall(token.text, self.arguments())
            return Name(token.text)
        if token.kind == "(":
            self.advance()
            node = self.or_expr()
            self.expect(")")
            return node
        self.fail("expected an operand", expected=_OPERAND_EXPECTED)
        raise AssertionError("unreachable")


def parse(text: str) -> Node:
    """Parse an expression; raises :class:`ExprSyntaxError` with a 0-based
    character position on malformed input."""
    return attach_source(_Parser(text).parse(), text)
