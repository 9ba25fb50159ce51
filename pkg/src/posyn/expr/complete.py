"""Context-sensitive completion for partially typed expressions.

Works on the raw text to the left of the cursor, so it tolerates input the
parser would reject. Suggestions come back in a stable order: language
names first, then functions in grammar order, or schema feature names in
declaration order when completing a getChildren argument.
"""

from __future__ import annotations

import re
from typing import TYPE_CHECKING

from .ast import FUNCTION_NAMES

if TYPE_CHECKING:
    from ..model import MetaModel

TOP_LEVEL = ("this", "true", "false", *FUNCTION_NAMES)
THIS_PROPS = (
    "x",
    "y",
    "width",
    "height",
    "rotation",
    "vertexSize",
    "model",
    "target",
    "lastOutput",
)
TARGET_PROPS = ("x", "y", "width", "height", "rotation", "vertexSize")
VERTEX_PROPS = ("x", "y")
MODEL_METHODS = ("getChildren",)
HANDLE_METHODS = ("getValue", "setValue")

_PARTIAL = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")
_TRAILING_WORD = re.compile(r"([A-Za-z_][A-Za-z0-9_]*)\s*$")
_OPEN_QUOTE = re.compile(r"getChildren\(\s*['\"]$")
_OPEN_CALL = re.compile(r"getChildren\(\s*$")


def complete(
    text: str,
    metamodel: MetaModel | None = None,
    class_name: str | None = None,
) -> list[str]:
    """Completion candidates for the cursor at the end of ``text``.

    ``metamodel`` and ``class_name`` identify the model object bound to
    ``this``; without them getChildren arguments cannot be suggested.
    """
    match = _PARTIAL.search(text)
    prefix = match.group(0) if match else ""
    head = text[: len(text) - len(prefix)]
    stripped = head.rstrip()

    candidates = _candidates(stripped, metamodel, class_name)
    if prefix:
        candidates = [c for c in candidates if c.startswith(prefix)]
    return candidates


def _features(metamodel: MetaModel | None, class_name: str | None) -> list[str]:
    if metamodel is None or class_name is None or not metamodel.has_class(class_name):
        return []
    return metamodel.feature_names(class_name)


def _candidates(
    stripped: str, metamodel: MetaModel | None, class_name: str | None
) -> list[str]:
    if _OPEN_QUOTE.search(stripped):
        return _features(metamodel, class_name)
    if _OPEN_CALL.search(stripped):
        return [f"'{name}'" for name in _features(metamodel, class_name)]

    if stripped.endswith("."):
        receiver = stripped[:-1].rstrip()
        if receiver.endswith(")"):
            return list(HANDLE_METHODS)
        word_match = _TRAILING_WORD.search(receiver)
        word = word_match.group(1) if word_match else ""
        if word == "this":
            return list(THIS_PROPS)
        if word == "vertexSize":
            return list(VERTEX_PROPS)
        if word == "model":
            return list(MODEL_METHODS)
        if word == "target":
            return list(TARGET_PROPS)
        return []

    if stripped == "" or stripped[-1] in "+-*/=<>(,":
        return list(TOP_LEVEL)
    if re.search(r"\b(and|or|not)$", stripped):
        return list(TOP_LEVEL)
    return []
