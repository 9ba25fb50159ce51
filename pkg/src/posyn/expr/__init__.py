"""The sandboxed rule expression language: parse, evaluate, print, complete."""

from __future__ import annotations

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
    feature_reads,
    format_number,
    layout_reads,
    set_value_calls,
    source_of,
    to_source,
    walk,
)
from .complete import complete
from .evaluate import UNSET, EvalContext, evaluate
from .parser import parse

__all__ = [
    "FUNCTION_ARITY",
    "FUNCTION_NAMES",
    "BinaryOp",
    "BoolLit",
    "FuncCall",
    "Member",
    "MethodCall",
    "Name",
    "Node",
    "NumberLit",
    "StringLit",
    "UnaryOp",
    "UNSET",
    "EvalContext",
    "complete",
    "evaluate",
    "feature_reads",
    "format_number",
    "layout_reads",
    "parse",
    "set_value_calls",
    "source_of",
    "to_source",
    "walk",
]
