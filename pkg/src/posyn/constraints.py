"""Layout state, axis scales, and single-property constraint projection.

A constraint restricts one positional property of one element. Projection
moves that property to the closest satisfying value and touches nothing
else: equality assigns, inequalities clamp only when violated, strict
inequalities land an epsilon inside the boundary. Several constraints on
the same element settle by sequential re-projection to a fixpoint.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import PosynError
from .expr.ast import Node, layout_reads

STRICT_EPSILON = 1e-6
MIN_EXTENT = 1e-6
MAX_ITERATIONS = 32
CONVERGENCE = 1e-9

ANCHORS = ("topLeft", "bottomLeft", "center")
PROPERTIES = ("x", "y", "width", "height", "rotation")
OPERATORS = ("=", "!=", "<", "<=", ">", ">=")

# long-form spellings accepted anywhere a property name appears
PROPERTY_ALIASES = {
    "x": "x",
    "y": "y",
    "width": "width",
    "height": "height",
    "rotation": "rotation",
    "vertexSize.x": "x",
    "vertexSize.y": "y",
}


class ScaleDomainError(PosynError):
    code = "DomainError"


class ConstraintError(PosynError):
    code = "ConstraintBinding"


@dataclass(frozen=True)
class NodeLayout:
    """Positional state of one rendered element.

    Coordinates live in a y-up frame; ``x``/``y`` are the position of the
    anchor vertex, so for the default bottom-left anchor they are the
    element's lower-left corner. Extents stay strictly positive.
    """

    element_id: str
    x: float = 0.0
    y: float = 0.0
    width: float = 40.0
    height: float = 30.0
    rotation: float = 0.0
    anchor: str = "bottomLeft"

    def __post_init__(self):
        if self.anchor not in ANCHORS:
            raise ValueError(f"unknown anchor {self.anchor!r}")
        if not (self.width > 0 and self.height > 0):
            raise ValueError("width and height must be positive")
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        object.__setattr__(self, "width", float(self.width))
        object.__setattr__(self, "height", float(self.height))
        object.__setattr__(self, "rotation", float(self.rotation) % 360.0)

    def with_values(self, **changes: float) -> NodeLayout:
        return replace(self, **changes)

    def extents(self) -> tuple[float, float, float, float]:
        """(left, bottom, right, top) of the unrotated box."""
        if self.anchor == "bottomLeft":
            left, bottom = self.x, self.y
        elif self.anchor == "topLeft":
            left, bottom = self.x, self.y - self.height
        else:  # center
            left, bottom = self.x - self.width / 2, self.y - self.height / 2
        return (left, bottom, left + self.width, bottom + self.height)

    def to_dict(self) -> dict:
        return {
            "elementId": self.element_id,
            "x": self.x,
            "y": self.y,
            "width": self.width,
            "height": self.height,
            "rotation": self.rotation,
            "anchor": self.anchor,
        }

    @classmethod
    def from_dict(cls, data: dict) -> NodeLayout:
        return cls(
            element_id=data["elementId"],
            x=float(data.get("x", 0.0)),
            y=float(data.get("y", 0.0)),
            width=float(data.get("width", 40.0)),
            height=float(data.get("height", 30.0)),
            rotation=float(data.get("rotation", 0.0)),
            anchor=data.get("anchor", "bottomLeft"),
        )


def layout_distance(a: NodeLayout, b: NodeLayout) -> float:
    """Largest per-property difference; drives fixpoint convergence."""
    return max(
        abs(a.x - b.x),
        abs(a.y - b.y),
        abs(a.width - b.width),
        abs(a.height - b.height),
        abs(a.rotation - b.rotation),
    )


def canonical_property(name: str) -> str:
    prop = PROPERTY_ALIASES.get(name)
    if prop is None:
        raise ConstraintError(f"unknown layout property {name!r}", code="UnknownProperty")
    return prop


def check_not_self_referential(property_name: str, rhs: Node) -> None:
    """A constraint's value may not read the property it constrains; that
    would make projection chase its own tail."""
    prop = canonical_property(property_name)
    if prop in layout_reads(rhs):
        raise ConstraintError(
            f"constraint on {property_name!r} reads the same property in its value",
            code="SelfReference",
        )


@dataclass(frozen=True)
class Bound:
    """One numeric restriction on one layout property."""

    property: str  # canonical name
    operator: str
    label: str = ""  # rule id or other provenance for reports

    def __post_init__(self):
        if self.property not in PROPERTIES:
            raise ConstraintError(
                f"unknown layout property {self.property!r}", code="UnknownProperty"
            )
        if self.operator not in OPERATORS:
            raise ConstraintError(
                f"unknown operator {self.operator!r}", code="UnknownOperator"
            )


def project(
    layout: NodeLayout,
    property_name: str,
    operator: str,
    rhs: float,
    motion: float = 0.0,
) -> tuple[NodeLayout, bool]:
    """Move one property to the closest value satisfying ``current op rhs``.

    Returns (new layout, satisfied-on-entry). Equality comparisons are
    exact; strict inequalities settle STRICT_EPSILON inside the boundary.
    ``motion`` is the sign of the gesture movement on the property's axis
    and picks the displacement side for ``!=``.
    """
    prop = canonical_property(property_name)
    if operator not in OPERATORS:
        raise ConstraintError(f"unknown operator {operator!r}", code="UnknownOperator")
    rhs = float(rhs)
    if not math.isfinite(rhs):
        raise ConstraintError("constraint value must be finite", code="NonFiniteBound")
    if prop == "rotation":
        rhs = rhs % 360.0

    current = getattr(layout, prop)
    satisfied = _holds(current, operator, rhs)
    if operator == "=":
        new_value = rhs
    elif satisfied:
        return layout, True
    elif operator in ("<=", ">="):
        new_value = rhs
    elif operator == "<":
        new_value = rhs - STRICT_EPSILON
    elif operator == ">":
        new_value = rhs + STRICT_EPSILON
    else:  # != with current == rhs
        new_value = rhs + STRICT_EPSILON if motion >= 0 else rhs - STRICT_EPSILON

    if prop in ("width", "height"):
        new_value = max(new_value, MIN_EXTENT)
    if satisfied and new_value == current:
        return layout, True
    return layout.with_values(**{prop: new_value}), satisfied


def _holds(current: float, operator: str, rhs: float) -> bool:
    if operator == "=":
        return current == rhs
    if operator == "!=":
        return current != rhs
    if operator == "<":
        return current < rhs
    if operator == "<=":
        return current <= rhs
    if operator == ">":
        return current > rhs
    return current >= rhs


@dataclass
class EnforceResult:
    layout: NodeLayout
    converged: bool
    iterations: int
    # bounds whose check failed on entry during the final pass
    unsatisfied: list[Bound] = field(default_factory=list)


def enforce_all(
    layout: NodeLayout,
    bounds: list[Bound],
    eval_rhs: Callable[[Bound, NodeLayout], float],
    motion: Callable[[str], float] | None = None,
    max_iterations: int = MAX_ITERATIONS,
    tolerance: float = CONVERGENCE,
) -> EnforceResult:
    """Sequentially project every bound until a whole pass moves nothing.

    ``eval_rhs`` re-evaluates a bound's value against the current layout on
    every pass, so constraints whose values read other properties settle
    correctly. A contradictory set never converges; the result then lists
    every bound still violated on entry during the last pass.
    """
    current = layout
    unsatisfied: list[Bound] = []
    for iteration in range(1, max_iterations + 1):
        moved = 0.0
        unsatisfied = []
        for bound in bounds:
            rhs = eval_rhs(bound, current)
            m = motion(bound.property) if motion is not None else 0.0
            projected, ok = project(current, bound.property, bound.operator, rhs, m)
            if not ok:
                unsatisfied.append(bound)
            moved = max(moved, layout_distance(current, projected))
            current = projected
        if moved < tolerance:
            return EnforceResult(current, True, iteration, unsatisfied)
    return EnforceResult(current, False, max_iterations, unsatisfied)


@dataclass(frozen=True)
class Constraint:
    """A positional constraint whose value side is an expression.

    The expression is re-evaluated against the current layout on every
    projection pass, so values may read other properties of the element;
    reading the constrained property itself is rejected at bind time.
    """

    property: str  # accepts aliases such as vertexSize.x
    operator: str
    rhs: Node
    label: str = ""

    def __post_init__(self):
        canonical_property(self.property)
        if self.operator not in OPERATORS:
            raise ConstraintError(
                f"unknown operator {self.operator!r}", code="UnknownOperator"
            )
        check_not_self_referential(self.property, self.rhs)

    def bound(self) -> Bound:
        return Bound(canonical_property(self.property), self.operator, self.label)


def _rhs_value(constraint: Constraint, layout: NodeLayout, ctx) -> float:
    from .expr.evaluate import UNSET, EvalContext, evaluate

    rebased = EvalContext(
        layout=layout,
        model=ctx.model if ctx is not None else None,
        target=ctx.target if ctx is not None else None,
        last_output=ctx.last_output if ctx is not None else UNSET,
    )
    value = evaluate(constraint.rhs, rebased)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConstraintError(
            f"constraint value must be a number, got {value!r}", code="NonNumericRHS"
        )
    return float(value)


def enforce(
    constraint: Constraint,
    layout: NodeLayout,
    ctx,
    motion: float = 0.0,
) -> tuple[NodeLayout, bool]:
    """Evaluate the constraint's value and project the layout onto it."""
    rhs = _rhs_value(constraint, layout, ctx)
    return project(layout, constraint.property, constraint.operator, rhs, motion)


def enforce_all_constraints(
    constraints: list[Constraint],
    layout: NodeLayout,
    ctx,
    motion: Callable[[str], float] | None = None,
) -> EnforceResult:
    """Settle several expression-valued constraints by sequential fixpoint."""
    bounds = [c.bound() for c in constraints]
    by_bound = dict(zip(bounds, constraints))

    def eval_rhs(bound: Bound, current: NodeLayout) -> float:
        return _rhs_value(by_bound[bound], current, ctx)

    return enforce_all(layout, bounds, eval_rhs, motion=motion)


# --- axis scales ---------------------------------------------------------


@dataclass(frozen=True)
class Scale:
    """Maps model-attribute values to visual coordinates and back.

    ``domain`` optionally narrows accepted model values beyond the
    mathematical domain; out-of-domain input raises ScaleDomainError.
    """

    domain: tuple[float | None, float | None] | None = None

    def _check_domain(self, value: float) -> float:
        value = float(value)
        if not math.isfinite(value):
            raise ScaleDomainError("scale input must be finite")
        if self.domain is not None:
            lo, hi = self.domain
            if (lo is not None and value < lo) or (hi is not None and value > hi):
                raise ScaleDomainError(f"value {value} outside scale domain [{lo}, {hi}]")
        return value

    def apply(self, value: float) -> float:
        raise NotImplementedError

    def invert(self, coord: float) -> float:
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class LinearScale(Scale):
    slope: float = 1.0
    offset: float = 0.0

    def __post_init__(self):
        if self.slope == 0:
            raise ScaleDomainError("linear scale needs a nonzero slope")

    def apply(self, value: float) -> float:
        return self.slope * self._check_domain(value) + self.offset

    def invert(self, coord: float) -> float:
        return (float(coord) - self.offset) / self.slope

    def to_dict(self) -> dict:
        out: dict = {"kind": "linear", "slope": self.slope, "offset": self.offset}
        if self.domain is not None:
            out["domain"] = list(self.domain)
        return out


@dataclass(frozen=True)
class PowerScale(Scale):
    exponent: float = 1.0

    def __post_init__(self):
        if self.exponent <= 0:
            raise ScaleDomainError("power scale exponent must be positive")

    def apply(self, value: float) -> float:
        value = self._check_domain(value)
        if value < 0:
            raise ScaleDomainError("power scale input must be non-negative")
        return math.pow(value, self.exponent)

    def invert(self, coord: float) -> float:
        coord = float(coord)
        if coord < 0:
            raise ScaleDomainError("power scale coordinate must be non-negative")
        return math.pow(coord, 1.0 / self.exponent)

    def to_dict(self) -> dict:
        out: dict = {"kind": "power", "exponent": self.exponent}
        if self.domain is not None:
            out["domain"] = list(self.domain)
        return out


@dataclass(frozen=True)
class LogScale(Scale):
    base: float = 2.0

    def __post_init__(self):
        if self.base <= 1:
            raise ScaleDomainError("log scale base must exceed 1")

    def apply(self, value: float) -> float:
        value = self._check_domain(value)
        if value <= 0:
            raise ScaleDomainError("log scale input must be positive")
        if self.base == 2.0:
            return math.log2(value)
        if self.base == 10.0:
            return math.log10(value)
        return math.log(value, self.base)

    def invert(self, coord: float) -> float:
        return math.pow(self.base, float(coord))

    def to_dict(self) -> dict:
        out: dict = {"kind": "logBase", "base": self.base}
        if self.domain is not None:
            out["domain"] = list(self.domain)
        return out


def scale_to_coord(scale: Scale, value: float) -> float:
    return scale.apply(value)


def scale_to_value(scale: Scale, coord: float) -> float:
    return scale.invert(coord)


def scale_from_dict(data: dict) -> Scale:
    kind = data.get("kind")
    domain = tuple(data["domain"]) if data.get("domain") is not None else None
    if kind == "linear":
        return LinearScale(domain=domain, slope=float(data["slope"]), offset=float(data.get("offset", 0.0)))
    if kind == "power":
        return PowerScale(domain=domain, exponent=float(data["exponent"]))
    if kind == "logBase":
        return LogScale(domain=domain, base=float(data["base"]))
    raise ScaleDomainError(f"unknown scale kind {kind!r}")
