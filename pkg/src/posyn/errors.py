"""Exception hierarchy and the violation record shared across the engine.

Every error carries a stable ``code`` string so that callers (and the
session protocol) can dispatch on it without parsing messages.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class PosynError(Exception):
    """Base class for all engine errors."""

    code = "Error"

    def __init__(self, message: str, code: str | None = None):
        super().__init__(message)
        if code is not None:
            self.code = code

    @property
    def message(self) -> str:
        return self.args[0]


class MetamodelDefinitionError(PosynError):
    """A metamodel definition was rejected; carries every issue found."""

    code = "MetamodelDefinition"

    def __init__(self, issues: list[tuple[str, str]]):
        lines = "; ".join(f"{code}: {msg}" for code, msg in issues)
        super().__init__(f"metamodel definition rejected: {lines}")
        self.issues = issues

    def codes(self) -> set[str]:
        return {code for code, _ in self.issues}


class ModelError(PosynError):
    """A model operation was rejected (bad class, feature, type, cardinality)."""


class ExprError(PosynError):
    """Base class for expression language errors."""


class ExprSyntaxError(ExprError):
    """Parse failure; ``position`` is a 0-based character offset."""

    code = "SyntaxError"

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        super().__init__(message)
        self.position = position
        self.expected = expected


class EvalError(ExprError):
    """Evaluation failure (name resolution, typing, numeric domain)."""


class EngineError(PosynError):
    """Rule-engine level failure (event ordering, cascade overflow)."""


class SerializationError(PosynError):
    """Project document or export failure."""


class ProjectParseError(SerializationError):
    code = "ParseError"


class VersionMismatchError(SerializationError):
    code = "VersionMismatch"


class ValidationFailedError(SerializationError):
    """Project loaded syntactically but failed semantic validation."""

    code = "ValidationFailed"

    def __init__(self, report: list[dict]):
        details = "; ".join(str(row) for row in report[:8])
        super().__init__(f"project validation failed: {details}")
        self.report = report


@dataclass
class Violation:
    """A recorded (non-fatal) rule or event problem.

    The engine reports violations instead of aborting: malformed events,
    expression failures inside rules, and cascade overflows all become
    violation records attached to the event outcome.
    """

    code: str
    message: str
    element_id: str | None = None
    rule_id: str | None = None

    def to_dict(self) -> dict:
        return {
            "code": self.code,
            "message": self.message,
            "elementId": self.element_id,
            "ruleId": self.rule_id,
        }
