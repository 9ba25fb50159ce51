"""Event-driven rule engine.

Maps incoming session events to trigger firings, executes the matching
rule triples of each element's resolved style, and keeps the model and
the layout consistent: constraint actions project the layout, generic
actions write model slots, and every model change fans out through a
depth-limited onRefresh cascade.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .constraints import (
    MIN_EXTENT,
    Constraint,
    ConstraintError,
    NodeLayout,
    canonical_property,
    enforce_all,
    project,
)
from .errors import EvalError, ExprError, ModelError, PosynError, Violation
from .expr.evaluate import UNSET, EvalContext, evaluate
from .model import Model, ModelDelta, NavRoot
from .views import (
    ConstraintAction,
    ExportAction,
    GenericAction,
    StyleResolution,
    Trigger,
    View,
    combine_views,
    format_value,
    interaction_capabilities,
    render_template,
    resolve_target,
)

# onRefresh rounds allowed per external event before the cascade is cut
CASCADE_LIMIT = 16

EVENT_KINDS = (
    "createObject",
    "setAttribute",
    "link",
    "activateView",
    "deactivateView",
    "dragStart",
    "drag",
    "dragEnd",
    "resizeStart",
    "resize",
    "resizeEnd",
    "rotateStart",
    "rotate",
    "rotateEnd",
)

# event kind -> (gesture, phase, trigger)
_GESTURES = {
    "dragStart": ("drag", "start", Trigger.ON_DRAG_START),
    "drag": ("drag", "while", Trigger.WHILE_DRAGGING),
    "dragEnd": ("drag", "end", Trigger.ON_DRAG_END),
    "resizeStart": ("resize", "start", Trigger.ON_RESIZE_START),
    "resize": ("resize", "while", Trigger.WHILE_RESIZING),
    "resizeEnd": ("resize", "end", Trigger.ON_RESIZE_END),
    "rotateStart": ("rotate", "start", Trigger.ON_ROTATION_START),
    "rotate": ("rotate", "while", Trigger.WHILE_ROTATING),
    "rotateEnd": ("rotate", "end", Trigger.ON_ROTATION_END),
}

# layout properties a gesture is allowed to move
_GESTURE_PROPERTIES = {
    "drag": ("x", "y"),
    "resize": ("width", "height"),
    "rotate": ("rotation",),
}

_LAYOUT_PROPERTIES = ("x", "y", "width", "height", "rotation")


@dataclass(frozen=True)
class SessionEvent:
    """One line of a session script; seq numbers are contiguous from 1."""

    seq: int
    kind: str
    element_id: str | None = None
    payload: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in EVENT_KINDS:
            raise PosynError(f"unknown event kind {self.kind!r}", code="UnknownEventKind")

    def to_dict(self) -> dict:
        out: dict = {"seq": self.seq, "kind": self.kind}
        if self.element_id is not None:
            out["elementId"] = self.element_id
        if self.payload:
            out["payload"] = dict(self.payload)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> SessionEvent:
        if not isinstance(data, dict) or "kind" not in data or "seq" not in data:
            raise PosynError("event needs seq and kind fields", code="BadEvent")
        payload = data.get("payload", {})
        if not isinstance(payload, dict):
            raise PosynError("event payload must be an object", code="BadEvent")
        return cls(
            seq=int(data["seq"]),
            kind=str(data["kind"]),
            element_id=data.get("elementId"),
            payload=payload,
        )


@dataclass
class ActionResult:
    """Outcome of one executed action of one rule triple."""

    rule_id: str
    action_kind: str  # constraint | export | generic
    output: object = None
    layout_deltas: list = field(default_factory=list)
    model_deltas: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule_id,
            "action": self.action_kind,
            "output": None if self.output is UNSET else self.output,
            "layoutDeltas": list(self.layout_deltas),
            "modelDeltas": [_model_delta_dict(d) for d in self.model_deltas],
            "violations": [v.to_dict() for v in self.violations],
        }


@dataclass
class FiringRecord:
    """One trigger firing on one element, with every action it executed."""

    trigger: Trigger
    element_id: str
    results: list = field(default_factory=list)
    settlement: dict | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "trigger": self.trigger.value,
            "elementId": self.element_id,
            "results": [r.to_dict() for r in self.results],
        }
        if self.settlement is not None:
            out["settlement"] = self.settlement
        return out


@dataclass
class EventOutcome:
    """Everything one event caused: firings, aggregated deltas, violations."""

    event: SessionEvent
    firings: list = field(default_factory=list)
    layout_deltas: list = field(default_factory=list)
    attribute_deltas: list = field(default_factory=list)
    model_deltas: list = field(default_factory=list)
    violations: list = field(default_factory=list)

    def firing_count(self, trigger: Trigger) -> int:
        return sum(1 for f in self.firings if f.trigger is trigger)

    def all_violations(self) -> list:
        """Event-level violations plus those buried in action results."""
        out = list(self.violations)
        for firing in self.firings:
            for result in firing.results:
                out.extend(result.violations)
        return out

    def to_dict(self) -> dict:
        return {
            "event": self.event.to_dict(),
            "firings": [f.to_dict() for f in self.firings],
            "layoutDeltas": list(self.layout_deltas),
            "attributeDeltas": list(self.attribute_deltas),
            "modelDeltas": [_model_delta_dict(d) for d in self.model_deltas],
            "violations": [v.to_dict() for v in self.violations],
        }


def _model_delta_dict(delta: ModelDelta) -> dict:
    return {
        "objectId": delta.object_id,
        "feature": delta.feature,
        "old": delta.old,
        "new": delta.new,
    }


def map_event_to_triggers(event: SessionEvent) -> list[Trigger]:
    """The Table III row for an event kind (ordering checks aside)."""
    if event.kind in _GESTURES:
        return [_GESTURES[event.kind][2]]
    return [Trigger.ON_REFRESH]


class Engine:
    """One authoritative model+layout state driven by session events.

    Events are applied strictly one at a time; apply_event never raises
    for content problems — they surface as violations in the outcome.
    """

    def __init__(
        self,
        model: Model,
        views: list[View] | None = None,
        layouts: dict[str, NodeLayout] | None = None,
        scales: dict | None = None,
    ):
        self.model = model
        self.views: list[View] = list(views or [])
        self.layouts: dict[str, NodeLayout] = dict(layouts or {})
        self.scales = dict(scales or {})
        # export actions write rendered attributes here, never model slots
        self.attributes: dict[str, dict[str, str]] = {}
        self._gestures: dict[str, str] = {}
        for element_id in self.model.objects:
            self.layouts.setdefault(element_id, NodeLayout(element_id))

    # -- queries ----------------------------------------------------------

    def layout_of(self, element_id: str) -> NodeLayout:
        layout = self.layouts.get(element_id)
        if layout is None:
            layout = NodeLayout(element_id)
            self.layouts[element_id] = layout
        return layout

    def view_named(self, name: str) -> View | None:
        for view in self.views:
            if view.name == name:
                return view
        return None

    def combined(self) -> dict[str, StyleResolution]:
        return combine_views(self.views, self.model)

    def rendered_state(self) -> dict:
        """Presentation snapshot: html, exported attributes, capabilities
        and layout for every visible element."""
        out: dict = {}
        for element_id, resolution in self.combined().items():
            caps = interaction_capabilities(resolution)
            out[element_id] = {
                "html": render_template(resolution.chosen, element_id, self.model),
                "attributes": dict(self.attributes.get(element_id, {})),
                "tier": resolution.tier.value,
                "view": resolution.view_name,
                "rule": resolution.chosen.id,
                "capabilities": caps.to_dict(),
                "layout": self.layout_of(element_id).to_dict(),
            }
        return out

    # -- event application --------------------------------------------------

    def apply_event(self, event: SessionEvent) -> EventOutcome:
        outcome = EventOutcome(event=event)
        layouts_before = dict(self.layouts)
        attrs_before = {k: dict(v) for k, v in self.attributes.items()}

        if event.kind in _GESTURES:
            self._apply_gesture(event, outcome)
        elif event.kind == "createObject":
            self._apply_create(event, outcome)
        elif event.kind == "setAttribute":
            self._apply_set_attribute(event, outcome)
        elif event.kind == "link":
            self._apply_link(event, outcome)
        else:  # activateView / deactivateView
            self._apply_view_toggle(event, outcome)

        self._collect_aggregates(outcome, layouts_before, attrs_before)
        return outcome

    def _violation(self, outcome: EventOutcome, code: str, message: str, element_id=None, rule_id=None):
        outcome.violations.append(
            Violation(code=code, message=message, element_id=element_id, rule_id=rule_id)
        )

    def _require_element(self, event: SessionEvent, outcome: EventOutcome) -> str | None:
        element_id = event.element_id
        if element_id is None:
            self._violation(outcome, "BadEvent", f"{event.kind} needs an elementId")
            return None
        if element_id not in self.model.objects:
            self._violation(outcome, "UnknownElement", f"no element {element_id!r}", element_id)
            return None
        return element_id

    # -- gesture events -----------------------------------------------------

    def _apply_gesture(self, event: SessionEvent, outcome: EventOutcome) -> None:
        element_id = self._require_element(event, outcome)
        if element_id is None:
            return
        gesture, phase, trigger = _GESTURES[event.kind]

        active = self._gestures.get(element_id)
        if phase == "start":
            if active is not None:
                self._violation(
                    outcome,
                    "OrderingViolation",
                    f"{event.kind} on {element_id} during an active {active} gesture",
                    element_id,
                )
                return
            self._gestures[element_id] = gesture
        else:
            if active != gesture:
                self._violation(
                    outcome,
                    "OrderingViolation",
                    f"{event.kind} on {element_id} without {gesture}Start",
                    element_id,
                )
                return
            if phase == "end":
                del self._gestures[element_id]

        motion = self._apply_gesture_payload(event, gesture, element_id, outcome)
        if motion is None:
            return
        record, model_deltas = self._fire(trigger, element_id, motion, self.combined())
        if record is not None:
            outcome.firings.append(record)
        self._refresh_cascade(outcome, model_deltas, set())

    def _apply_gesture_payload(
        self, event: SessionEvent, gesture: str, element_id: str, outcome: EventOutcome
    ) -> dict | None:
        """Write the raw pointer-derived values into the layout; returns the
        per-property movement for the constraint solver's motion hint."""
        layout = self.layout_of(element_id)
        changes: dict[str, float] = {}
        for prop in _GESTURE_PROPERTIES[gesture]:
            if prop not in event.payload:
                continue
            value = event.payload[prop]
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                self._violation(
                    outcome, "BadPayload", f"{prop} must be a finite number", element_id
                )
                return None
            value = float(value)
            if prop in ("width", "height"):
                value = max(value, MIN_EXTENT)
            changes[prop] = value
        motion = {prop: new - getattr(layout, prop) for prop, new in changes.items()}
        if changes:
            self.layouts[element_id] = layout.with_values(**changes)
        return motion

    # -- model events ---------------------------------------------------------

    def _apply_create(self, event: SessionEvent, outcome: EventOutcome) -> None:
        payload = event.payload
        class_name = payload.get("className")
        if not isinstance(class_name, str):
            self._violation(outcome, "BadEvent", "createObject needs payload.className")
            return
        container = None
        if "containerId" in payload or "containerFeature" in payload:
            container = (payload.get("containerId"), payload.get("containerFeature"))
            if not all(isinstance(p, str) for p in container):
                self._violation(outcome, "BadEvent", "container needs id and feature")
                return
        old_children = None
        if container is not None and container[0] in self.model.objects:
            old_children = list(self.model.object(container[0]).slots.get(container[1], []))
        try:
            oid = self.model.instantiate(class_name, container, object_id=event.element_id)
        except ModelError as err:
            self._violation(outcome, err.code, err.message, event.element_id)
            return

        layout_kwargs = {
            key: payload[key]
            for key in ("x", "y", "width", "height", "rotation", "anchor")
            if key in payload
        }
        try:
            self.layouts[oid] = NodeLayout(oid, **layout_kwargs)
        except PosynError as err:
            self.layouts[oid] = NodeLayout(oid)
            self._violation(outcome, err.code, err.message, oid)

        deltas: list[ModelDelta] = []
        if container is not None and old_children is not None:
            new_children = list(self.model.object(container[0]).slots.get(container[1], []))
            deltas.append(
                ModelDelta(
                    object_id=container[0], feature=container[1],
                    old=old_children, new=new_children,
                )
            )
        attributes = payload.get("attributes", {})
        if isinstance(attributes, dict):
            for name, value in attributes.items():
                try:
                    deltas.append(self.model.write_slot(oid, name, value))
                except ModelError as err:
                    self._violation(outcome, err.code, err.message, oid)
        # the new element always refreshes once so its constraints apply
        self._refresh_cascade(outcome, [d for d in deltas if d.changed], {oid})

    def _apply_set_attribute(self, event: SessionEvent, outcome: EventOutcome) -> None:
        element_id = self._require_element(event, outcome)
        if element_id is None:
            return
        name = event.payload.get("name")
        if not isinstance(name, str) or "value" not in event.payload:
            self._violation(outcome, "BadEvent", "setAttribute needs payload.name and payload.value", element_id)
            return
        try:
            delta = self.model.write_slot(element_id, name, event.payload["value"])
        except ModelError as err:
            self._violation(outcome, err.code, err.message, element_id)
            return
        self._refresh_cascade(outcome, [delta] if delta.changed else [], set())

    def _apply_link(self, event: SessionEvent, outcome: EventOutcome) -> None:
        element_id = self._require_element(event, outcome)
        if element_id is None:
            return
        feature = event.payload.get("feature")
        target = event.payload.get("targetId")
        if not isinstance(feature, str) or not isinstance(target, str):
            self._violation(outcome, "BadEvent", "link needs payload.feature and payload.targetId", element_id)
            return
        current = self.model.object(element_id).slots.get(feature, [])
        if not isinstance(current, list):
            self._violation(outcome, "TypeMismatch", f"{feature!r} is not a reference", element_id)
            return
        try:
            delta = self.model.write_slot(element_id, feature, list(current) + [target])
        except ModelError as err:
            self._violation(outcome, err.code, err.message, element_id)
            return
        self._refresh_cascade(outcome, [delta] if delta.changed else [], set())

    # -- view events ---------------------------------------------------------

    def _apply_view_toggle(self, event: SessionEvent, outcome: EventOutcome) -> None:
        name = event.payload.get("view")
        if not isinstance(name, str):
            self._violation(outcome, "BadEvent", f"{event.kind} needs payload.view")
            return
        view = self.view_named(name)
        if view is None:
            self._violation(outcome, "UnknownView", f"no view named {name!r}")
            return
        activate = event.kind == "activateView"
        if view.active == activate:
            return
        # elements the view selects refresh against the new stacking
        selected = {el for el in self.model.objects if view.selects(el, self.model)}
        view.active = activate
        self._refresh_cascade(outcome, [], selected)

    # -- trigger firing -------------------------------------------------------

    def _fire(
        self,
        trigger: Trigger,
        element_id: str,
        motion: dict,
        combined: dict[str, StyleResolution],
    ) -> tuple[FiringRecord | None, list[ModelDelta]]:
        """Run every matching rule triple of the element's chosen rule.

        Returns (record, changed model deltas); hidden elements fire
        nothing. lastOutput threads through the triples in declaration
        order; expression failures become violations on the triple's
        result and never abort the firing.
        """
        resolution = combined.get(element_id)
        if resolution is None:
            return None, []
        rule = resolution.chosen
        record = FiringRecord(trigger=trigger, element_id=element_id)
        model_deltas: list[ModelDelta] = []
        last_output: object = UNSET
        # constraints executed this firing, kept for joint settlement
        executed: list[tuple[Constraint, EvalContext]] = []

        for index, triple in enumerate(rule.rule_triples):
            if trigger not in triple.triggers:
                continue
            rule_id = f"{rule.id}[{index}]"
            ctx = self._context(element_id, triple, last_output)

            if triple.condition is not None:
                try:
                    verdict = evaluate(triple.condition, ctx)
                except (ExprError, EvalError) as err:
                    result = ActionResult(rule_id=rule_id, action_kind=_action_kind(triple.action))
                    result.violations.append(
                        Violation(code=err.code, message=err.message, element_id=element_id, rule_id=rule_id)
                    )
                    record.results.append(result)
                    continue
                if not isinstance(verdict, bool):
                    result = ActionResult(rule_id=rule_id, action_kind=_action_kind(triple.action))
                    result.violations.append(
                        Violation(
                            code="TypeMismatch",
                            message="condition must evaluate to a boolean",
                            element_id=element_id,
                            rule_id=rule_id,
                        )
                    )
                    record.results.append(result)
                    continue
                if not verdict:
                    continue

            result = self._execute(triple.action, ctx, element_id, rule_id, motion, executed)
            record.results.append(result)
            model_deltas.extend(d for d in result.model_deltas if d.changed)
            if not result.violations:
                last_output = result.output

        if len(executed) > 1:
            self._settle(executed, element_id, motion, record)
        return record, model_deltas

    def _context(self, element_id: str, triple, last_output: object) -> EvalContext:
        selector = triple.target_selector
        if selector is None and isinstance(triple.action, ExportAction):
            selector = triple.action.target_selector
        target_layout = None
        if selector is not None:
            target_id = resolve_target(selector, element_id, self.model)
            if target_id is not None:
                target_layout = self.layout_of(target_id)
        return EvalContext(
            layout=self.layout_of(element_id),
            model=NavRoot(self.model, element_id),
            target=target_layout,
            last_output=last_output,
        )

    def _execute(
        self,
        action,
        ctx: EvalContext,
        element_id: str,
        rule_id: str,
        motion: dict,
        executed: list,
    ) -> ActionResult:
        result = ActionResult(rule_id=rule_id, action_kind=_action_kind(action))

        def fail(code: str, message: str):
            result.violations.append(
                Violation(code=code, message=message, element_id=element_id, rule_id=rule_id)
            )

        if isinstance(action, ConstraintAction):
            try:
                value = evaluate(action.value_expr, ctx)
            except (ExprError, EvalError) as err:
                fail(err.code, err.message)
                return result
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                fail("NonNumericRHS", f"constraint value must be a number, got {value!r}")
                return result
            prop = canonical_property(action.property)
            before = self.layout_of(element_id)
            try:
                after, _satisfied = project(
                    before, prop, action.operator, float(value), motion.get(prop, 0.0)
                )
            except ConstraintError as err:
                fail(err.code, err.message)
                return result
            if after is not before:
                self.layouts[element_id] = after
                result.layout_deltas.append(
                    {
                        "elementId": element_id,
                        "property": prop,
                        "old": getattr(before, prop),
                        "new": getattr(after, prop),
                    }
                )
            result.output = float(value)
            executed.append(
                (
                    Constraint(prop, action.operator, action.value_expr, label=rule_id),
                    ctx,
                )
            )
        elif isinstance(action, ExportAction):
            target_id = resolve_target(action.target_selector, element_id, self.model)
            if target_id is None:
                fail("UnresolvedTarget", f"selector {action.target_selector!r} matches nothing")
                return result
            try:
                value = evaluate(action.value_expr, ctx)
            except (ExprError, EvalError) as err:
                fail(err.code, err.message)
                return result
            formatted = format_value(value)
            self.attributes.setdefault(target_id, {})[action.attribute_name] = formatted
            result.layout_deltas.append(
                {"elementId": target_id, "attribute": action.attribute_name, "value": formatted}
            )
            result.output = value
        else:  # GenericAction
            ctx.allow_set_value = True
            try:
                value = evaluate(action.expr, ctx)
            except (ExprError, EvalError, ModelError) as err:
                fail(err.code, err.message)
                result.model_deltas.extend(ctx.writes)
                return result
            result.model_deltas.extend(ctx.writes)
            result.output = value
        return result

    def _settle(self, executed, element_id, motion, record):
        """Joint fixpoint over every constraint this firing executed;
        single constraints are already exact after inline projection."""
        by_label = {c.label: (c, ctx) for c, ctx in executed}
        bounds = [c.bound() for c, _ in executed]

        def eval_rhs(bound, current: NodeLayout) -> float:
            constraint, snap = by_label[bound.label]
            rebased = EvalContext(
                layout=current, model=snap.model, target=snap.target, last_output=snap.last_output
            )
            value = evaluate(constraint.rhs, rebased)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConstraintError(
                    f"constraint value must be a number, got {value!r}", code="NonNumericRHS"
                )
            return float(value)

        before = self.layout_of(element_id)
        try:
            settled = enforce_all(
                before, bounds, eval_rhs, motion=lambda prop: motion.get(prop, 0.0)
            )
        except (ExprError, EvalError, ConstraintError) as err:
            record.settlement = {"converged": False, "error": err.message}
            record.results[-1].violations.append(
                Violation(code=err.code, message=err.message, element_id=element_id)
            )
            return
        self.layouts[element_id] = settled.layout
        record.settlement = {
            "converged": settled.converged,
            "iterations": settled.iterations,
            "unsatisfied": [b.label for b in settled.unsatisfied],
        }
        if not settled.converged or settled.unsatisfied:
            labels = ", ".join(b.label for b in settled.unsatisfied) or "none identified"
            record.results[-1].violations.append(
                Violation(
                    code="ConstraintConflict",
                    message=f"constraints did not settle (unsatisfied: {labels})",
                    element_id=element_id,
                )
            )

    # -- refresh cascade --------------------------------------------------------

    def _refresh_cascade(
        self, outcome: EventOutcome, deltas: list[ModelDelta], forced: set[str]
    ) -> None:
        """Fan model changes out through onRefresh until nothing changes.

        Each round fires every element whose chosen rule reads a slot
        changed in the previous round; generic actions may write further
        slots, feeding the next round. Rounds are capped."""
        pending = list(deltas)
        rounds = 0
        while pending or forced:
            rounds += 1
            if rounds > CASCADE_LIMIT:
                self._violation(
                    outcome,
                    "CascadeLimitExceeded",
                    f"onRefresh cascade exceeded {CASCADE_LIMIT} rounds",
                )
                return
            combined = self.combined()
            targets: list[str] = []
            for element_id in self.model.objects:
                if element_id in forced:
                    targets.append(element_id)
                    continue
                resolution = combined.get(element_id)
                if resolution is None:
                    continue
                reads = resolution.chosen.dependencies()
                if any(
                    d.object_id == element_id and d.feature in reads for d in pending
                ):
                    targets.append(element_id)
            forced = set()
            pending = []
            for element_id in targets:
                record, new_deltas = self._fire(
                    Trigger.ON_REFRESH, element_id, {}, combined
                )
                if record is not None:
                    outcome.firings.append(record)
                    pending.extend(new_deltas)

    # -- aggregation ------------------------------------------------------------

    def _collect_aggregates(self, outcome, layouts_before, attrs_before) -> None:
        for element_id in sorted(set(layouts_before) | set(self.layouts)):
            old = layouts_before.get(element_id)
            new = self.layouts.get(element_id)
            if old is new:
                continue
            for prop in _LAYOUT_PROPERTIES:
                ov = getattr(old, prop) if old is not None else None
                nv = getattr(new, prop) if new is not None else None
                if ov != nv:
                    outcome.layout_deltas.append(
                        {"elementId": element_id, "property": prop, "old": ov, "new": nv}
                    )
        for element_id in sorted(set(attrs_before) | set(self.attributes)):
            old_attrs = attrs_before.get(element_id, {})
            new_attrs = self.attributes.get(element_id, {})
            for name in sorted(set(old_attrs) | set(new_attrs)):
                if old_attrs.get(name) != new_attrs.get(name):
                    outcome.attribute_deltas.append(
                        {
                            "elementId": element_id,
                            "attribute": name,
                            "old": old_attrs.get(name),
                            "new": new_attrs.get(name),
                        }
                    )
        for firing in outcome.firings:
            for result in firing.results:
                outcome.model_deltas.extend(d for d in result.model_deltas if d.changed)


def _action_kind(action) -> str:
    if isinstance(action, ConstraintAction):
        return "constraint"
    if isinstance(action, ExportAction):
        return "export"
    return "generic"
