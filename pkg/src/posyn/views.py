"""Views, view rules, templates, measurability, and layered style priority.

A view binds model elements to rules through selectors (personal by object
id, metaclass with inheritance, or the view's default rule). Active views
stack; for each element the candidate rules form a priority queue ordered
by tier (Personal > Inherited > ViewDefault > GlobalDefault), then nearest
class, then stack rank, then declaration order, and only the head applies.
The global default rule always exists, belongs to no view, and never
changes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .constraints import OPERATORS, canonical_property, check_not_self_referential
from .errors import ModelError, PosynError
from .expr.ast import Node, feature_reads, set_value_calls, source_of, to_source
from .expr.parser import parse
from .model import MetaModel, Model


class ViewDefinitionError(PosynError):
    code = "ViewDefinition"


class Trigger(Enum):
    ON_REFRESH = "onRefresh"
    ON_DRAG_START = "onDragStart"
    WHILE_DRAGGING = "whileDragging"
    ON_DRAG_END = "onDragEnd"
    ON_RESIZE_START = "onResizeStart"
    WHILE_RESIZING = "whileResizing"
    ON_RESIZE_END = "onResizeEnd"
    ON_ROTATION_START = "onRotationStart"
    WHILE_ROTATING = "whileRotating"
    ON_ROTATION_END = "onRotationEnd"

    @classmethod
    def from_name(cls, name: str) -> Trigger:
        for trigger in cls:
            if trigger.value == name:
                return trigger
        raise ViewDefinitionError(f"unknown trigger {name!r}", code="UnknownTrigger")


class UnmappedPolicy(Enum):
    EXCLUDE = "Exclude"
    FREE_FORM = "FreeForm"
    CUSTOM = "Custom"


class Tier(Enum):
    PERSONAL = "Personal"
    INHERITED = "Inherited"
    VIEW_DEFAULT = "ViewDefault"
    GLOBAL_DEFAULT = "GlobalDefault"


_TIER_ORDER = {
    Tier.PERSONAL: 0,
    Tier.INHERITED: 1,
    Tier.VIEW_DEFAULT: 2,
    Tier.GLOBAL_DEFAULT: 3,
}

SELECTOR_KINDS = ("personal", "metaclass", "viewDefault")

RESIZE_HANDLES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")


@dataclass(frozen=True)
class Selector:
    kind: str
    value: str = ""

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ViewDefinitionError(
                f"unknown selector kind {self.kind!r}", code="UnknownSelectorKind"
            )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value}

    @classmethod
    def from_dict(cls, data: dict) -> Selector:
        return cls(kind=data["kind"], value=data.get("value", ""))


@dataclass(frozen=True)
class Measurability:
    """Interaction capabilities of a rendered element."""

    measurable: bool = True
    draggable: bool = True
    resize_handles: frozenset[str] = frozenset(RESIZE_HANDLES)
    rotatable: bool = False

    def __post_init__(self):
        object.__setattr__(self, "resize_handles", frozenset(self.resize_handles))
        for handle in self.resize_handles:
            if handle not in RESIZE_HANDLES:
                raise ViewDefinitionError(
                    f"unknown resize handle {handle!r}", code="UnknownHandle"
                )
        if not self.measurable and (
            self.draggable or self.resize_handles or self.rotatable
        ):
            raise ViewDefinitionError(
                "non-measurable elements cannot be draggable, resizable, or rotatable",
                code="MeasurabilityConflict",
            )

    @classmethod
    def none(cls) -> Measurability:
        return cls(measurable=False, draggable=False, resize_handles=frozenset(), rotatable=False)

    def to_dict(self) -> dict:
        return {
            "measurable": self.measurable,
            "draggable": self.draggable,
            "resizeHandles": sorted(self.resize_handles, key=RESIZE_HANDLES.index),
            "rotatable": self.rotatable,
        }

    @classmethod
    def from_dict(cls, data: dict) -> Measurability:
        return cls(
            measurable=bool(data.get("measurable", True)),
            draggable=bool(data.get("draggable", True)),
            resize_handles=frozenset(data.get("resizeHandles", RESIZE_HANDLES)),
            rotatable=bool(data.get("rotatable", False)),
        )


def _expr_text(node: Node) -> str:
    text = source_of(node)
    return text if text is not None else to_source(node)


@dataclass(frozen=True)
class ExportAction:
    """Writes a computed value into a target element's rendered attributes.

    Presentation-only: the overlay rides with the render state and never
    touches model slots.
    """

    target_selector: str
    attribute_name: str
    value_expr: Node

    def to_dict(self) -> dict:
        return {
            "kind": "export",
            "targetSelector": self.target_selector,
            "attributeName": self.attribute_name,
            "valueExpr": _expr_text(self.value_expr),
        }


@dataclass(frozen=True)
class ConstraintAction:
    property: str
    operator: str
    value_expr: Node

    def __post_init__(self):
        canonical_property(self.property)
        if self.operator not in OPERATORS:
            raise ViewDefinitionError(
                f"unknown constraint operator {self.operator!r}", code="UnknownOperator"
            )

    def to_dict(self) -> dict:
        return {
            "kind": "constraint",
            "property": self.property,
            "operator": self.operator,
            "valueExpr": _expr_text(self.value_expr),
        }


@dataclass(frozen=True)
class GenericAction:
    expr: Node

    def to_dict(self) -> dict:
        return {"kind": "generic", "expr": _expr_text(self.expr)}


Action = ExportAction | ConstraintAction | GenericAction


def action_from_dict(data: dict) -> Action:
    kind = data.get("kind")
    if kind == "export":
        return ExportAction(
            target_selector=data["targetSelector"],
            attribute_name=data["attributeName"],
            value_expr=parse(data["valueExpr"]),
        )
    if kind == "constraint":
        return ConstraintAction(
            property=data["property"],
            operator=data["operator"],
            value_expr=parse(data["valueExpr"]),
        )
    if kind == "generic":
        return GenericAction(expr=parse(data["expr"]))
    raise ViewDefinitionError(f"unknown action kind {kind!r}", code="UnknownActionKind")


@dataclass(frozen=True)
class RuleTriple:
    """Trigger set (a disjunction), optional condition, one action.

    ``target_selector`` optionally binds ``this.target`` for the condition
    and value expressions: "self", "container", "id:<objectId>", or
    "class:<ClassName>" (first instance in model order).
    """

    triggers: tuple[Trigger, ...]
    condition: Node | None
    action: Action
    target_selector: str | None = None

    def __post_init__(self):
        if not self.triggers:
            raise ViewDefinitionError(
                "a rule triple needs at least one trigger", code="EmptyTriggerSet"
            )
        if self.condition is not None and set_value_calls(self.condition):
            raise ViewDefinitionError(
                "setValue is not allowed in conditions", code="SetValueNotAllowed"
            )
        if isinstance(self.action, (ExportAction, ConstraintAction)):
            if set_value_calls(self.action.value_expr):
                raise ViewDefinitionError(
                    "setValue is not allowed in this action's value", code="SetValueNotAllowed"
                )
            if isinstance(self.action, ConstraintAction):
                check_not_self_referential(self.action.property, self.action.value_expr)
        else:
            calls = set_value_calls(self.action.expr)
            if calls and (len(calls) > 1 or calls[0] is not self.action.expr):
                raise ViewDefinitionError(
                    "setValue must be the outermost call of a generic action",
                    code="SetValueNotAllowed",
                )

    def to_dict(self) -> dict:
        out: dict = {
            "triggers": [t.value for t in self.triggers],
            "action": self.action.to_dict(),
        }
        if self.condition is not None:
            out["condition"] = _expr_text(self.condition)
        if self.target_selector is not None:
            out["targetSelector"] = self.target_selector
        return out

    @classmethod
    def from_dict(cls, data: dict) -> RuleTriple:
        condition = data.get("condition")
        return cls(
            triggers=tuple(Trigger.from_name(t) for t in data["triggers"]),
            condition=parse(condition) if condition is not None else None,
            action=action_from_dict(data["action"]),
            target_selector=data.get("targetSelector"),
        )


PLACEHOLDER = re.compile(r"\$##([A-Za-z_][A-Za-z0-9_]*)\$")


@dataclass(frozen=True)
class ViewRule:
    id: str
    selector: Selector
    template: str
    measurability: Measurability = field(default_factory=Measurability)
    rule_triples: tuple[RuleTriple, ...] = ()

    def placeholders(self) -> list[str]:
        return PLACEHOLDER.findall(self.template)

    def dependencies(self) -> set[str]:
        """Model features whose changes require re-evaluating this rule."""
        deps = set(self.placeholders())
        for triple in self.rule_triples:
            if triple.condition is not None:
                deps |= feature_reads(triple.condition)
            if isinstance(triple.action, (ExportAction, ConstraintAction)):
                deps |= feature_reads(triple.action.value_expr)
            else:
                deps |= feature_reads(triple.action.expr)
        return deps

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "selector": self.selector.to_dict(),
            "template": self.template,
            "measurable": self.measurability.to_dict(),
            "ruleTriples": [t.to_dict() for t in self.rule_triples],
        }

    @classmethod
    def from_dict(cls, data: dict, fallback_id: str = "") -> ViewRule:
        return cls(
            id=data.get("id") or fallback_id,
            selector=Selector.from_dict(data["selector"]),
            template=data.get("template", ""),
            measurability=Measurability.from_dict(data.get("measurable", {})),
            rule_triples=tuple(RuleTriple.from_dict(t) for t in data.get("ruleTriples", [])),
        )


@dataclass
class View:
    name: str
    active: bool = True
    stack_rank: int = 0
    default_rule: ViewRule | None = None
    rules: list[ViewRule] = field(default_factory=list)
    unmapped_policy: UnmappedPolicy = UnmappedPolicy.FREE_FORM

    def selects(self, element_id: str, model: Model) -> bool:
        """True when one of the view's rules applies to the element; a
        view default selects everything."""
        if self.default_rule is not None:
            return True
        class_name = model.object(element_id).class_name
        for rule in self.rules:
            sel = rule.selector
            if sel.kind == "personal" and sel.value == element_id:
                return True
            if sel.kind == "metaclass" and model.metamodel.has_class(sel.value):
                if model.metamodel.class_distance(class_name, sel.value) is not None:
                    return True
        return False

    def to_dict(self) -> dict:
        out: dict = {
            "name": self.name,
            "active": self.active,
            "stackRank": self.stack_rank,
            "rules": [r.to_dict() for r in self.rules],
            "unmappedPolicy": self.unmapped_policy.value,
        }
        if self.default_rule is not None:
            out["defaultRule"] = self.default_rule.to_dict()
        return out

    @classmethod
    def from_dict(cls, data: dict) -> View:
        name = data["name"]
        default_rule = data.get("defaultRule")
        return cls(
            name=name,
            active=bool(data.get("active", True)),
            stack_rank=int(data.get("stackRank", 0)),
            default_rule=(
                ViewRule.from_dict(default_rule, fallback_id=f"{name}#default")
                if default_rule is not None
                else None
            ),
            rules=[
                ViewRule.from_dict(r, fallback_id=f"{name}#{i}")
                for i, r in enumerate(data.get("rules", []))
            ],
            unmapped_policy=UnmappedPolicy(data.get("unmappedPolicy", "FreeForm")),
        )


GLOBAL_DEFAULT = ViewRule(
    id="global-default",
    selector=Selector(kind="viewDefault"),
    template='<div class="default-node"></div>',
    measurability=Measurability(),
    rule_triples=(),
)


@dataclass(frozen=True)
class Candidate:
    """One queue entry; the sort key realizes the total tier order."""

    tier: Tier
    class_distance: int
    stack_rank: int
    view_index: int
    rule_index: int
    view_name: str | None
    rule: ViewRule

    def sort_key(self) -> tuple:
        return (
            _TIER_ORDER[self.tier],
            self.class_distance,
            -self.stack_rank,
            self.view_index,
            self.rule_index,
        )


@dataclass
class StyleResolution:
    element_id: str
    chosen: ViewRule
    tier: Tier
    queue: list[Candidate]
    view_name: str | None  # view owning the chosen rule; None for global default


def candidate_queue(element_id: str, views: list[View], model: Model) -> list[Candidate]:
    """All applicable rules for an element, best first. The global default
    is always last."""
    class_name = model.object(element_id).class_name
    mm = model.metamodel
    candidates: list[Candidate] = []
    for view_index, view in enumerate(views):
        if not view.active:
            continue
        for rule_index, rule in enumerate(view.rules):
            sel = rule.selector
            if sel.kind == "personal" and sel.value == element_id:
                candidates.append(
                    Candidate(Tier.PERSONAL, 0, view.stack_rank, view_index, rule_index, view.name, rule)
                )
            elif sel.kind == "metaclass" and mm.has_class(sel.value):
                distance = mm.class_distance(class_name, sel.value)
                if distance is not None:
                    candidates.append(
                        Candidate(Tier.INHERITED, distance, view.stack_rank, view_index, rule_index, view.name, rule)
                    )
        if view.default_rule is not None:
            candidates.append(
                Candidate(Tier.VIEW_DEFAULT, 0, view.stack_rank, view_index, len(view.rules), view.name, view.default_rule)
            )
    candidates.sort(key=Candidate.sort_key)
    candidates.append(
        Candidate(Tier.GLOBAL_DEFAULT, 0, 0, len(views), 0, None, GLOBAL_DEFAULT)
    )
    return candidates


def resolve_style(element_id: str, views: list[View], model: Model) -> StyleResolution:
    """Deterministic four-tier resolution; the global default guarantees a
    result for every element."""
    queue = candidate_queue(element_id, views, model)
    head = queue[0]
    return StyleResolution(
        element_id=element_id,
        chosen=head.rule,
        tier=head.tier,
        queue=queue,
        view_name=head.view_name,
    )


def _policy_owner(views: list[View], resolution: StyleResolution) -> View | None:
    """The view whose unmapped policy governs an element without a
    personal or inherited match."""
    if resolution.tier is Tier.VIEW_DEFAULT:
        for view in views:
            if view.name == resolution.view_name:
                return view
        return None
    active = [v for v in views if v.active]
    if not active:
        return None
    return max(active, key=lambda v: v.stack_rank)


def combine_views(views: list[View], model: Model) -> dict[str, StyleResolution]:
    """Stack the active views over every model object.

    Returns resolutions for visible elements only: an element without a
    personal or inherited rule follows the owning view's unmapped policy
    (Exclude hides it, FreeForm shows the resolved default, Custom shows
    the global-default representation carrying the view default's rule
    triples). With no active views everything falls to the global default.
    """
    out: dict[str, StyleResolution] = {}
    for element_id in model.objects:
        resolution = resolve_style(element_id, views, model)
        if resolution.tier in (Tier.PERSONAL, Tier.INHERITED):
            out[element_id] = resolution
            continue
        owner = _policy_owner(views, resolution)
        if owner is None:
            out[element_id] = resolution
            continue
        policy = owner.unmapped_policy
        if policy is UnmappedPolicy.EXCLUDE:
            continue
        if policy is UnmappedPolicy.CUSTOM:
            triples = (
                owner.default_rule.rule_triples if owner.default_rule is not None else ()
            )
            synthetic = ViewRule(
                id=f"{owner.name}#custom",
                selector=Selector(kind="viewDefault"),
                template=GLOBAL_DEFAULT.template,
                measurability=GLOBAL_DEFAULT.measurability,
                rule_triples=triples,
            )
            out[element_id] = StyleResolution(
                element_id=element_id,
                chosen=synthetic,
                tier=resolution.tier,
                queue=resolution.queue,
                view_name=owner.name,
            )
            continue
        out[element_id] = resolution
    return out


def interaction_capabilities(resolution: StyleResolution) -> Measurability:
    return resolution.chosen.measurability


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if value == int(value) and abs(value) < 1e16:
            return str(int(value))
        return repr(value)
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


def render_template(
    rule: ViewRule,
    element_id: str,
    model: Model,
    warnings: list[str] | None = None,
) -> str:
    """Substitute $##feature$ placeholders with the element's slot values.

    Single pass: values containing placeholder syntax are not re-expanded.
    Unknown features substitute as empty strings and go to the warnings
    channel.
    """
    obj = model.object(element_id)

    def replace(match: re.Match) -> str:
        feature = match.group(1)
        if feature in obj.slots:
            return format_value(obj.slots[feature])
        if warnings is not None:
            warnings.append(
                f"template for {element_id} references unknown feature {feature!r}"
            )
        return ""

    return PLACEHOLDER.sub(replace, rule.template)


def resolve_target(
    selector: str, element_id: str, model: Model
) -> str | None:
    """Resolve a rule/export target selector to an object id, or None."""
    if selector == "self":
        return element_id
    if selector == "container":
        holder = model.container_of(element_id)
        return holder[0] if holder is not None else None
    if selector.startswith("id:"):
        target = selector[3:]
        return target if target in model.objects else None
    if selector.startswith("class:"):
        class_name = selector[6:]
        mm = model.metamodel
        if not mm.has_class(class_name):
            return None
        for oid, obj in model.objects.items():
            if mm.is_subclass(obj.class_name, class_name):
                return oid
        return None
    return None


def validate_views(views: list[View], model: Model) -> list[dict]:
    """Static checks used at project load; returns one report row per issue."""
    issues: list[dict] = []
    mm = model.metamodel

    def add(code: str, message: str, view: str, rule: str | None = None) -> None:
        row = {"code": code, "message": message, "view": view}
        if rule is not None:
            row["rule"] = rule
        issues.append(row)

    active_ranks: dict[int, str] = {}
    names: set[str] = set()
    for view in views:
        if view.name in names:
            add("DuplicateName", f"view {view.name!r} defined twice", view.name)
        names.add(view.name)
        if view.active:
            if view.stack_rank in active_ranks:
                add(
                    "DuplicateRank",
                    f"stack rank {view.stack_rank} used by both "
                    f"{active_ranks[view.stack_rank]!r} and {view.name!r}",
                    view.name,
                )
            else:
                active_ranks[view.stack_rank] = view.name

        personal_seen: dict[str, str] = {}
        metaclass_seen: dict[str, str] = {}
        for rule in view.rules:
            sel = rule.selector
            if sel.kind == "viewDefault":
                add(
                    "BadSelector",
                    "view-default selectors belong in the view's defaultRule",
                    view.name,
                    rule.id,
                )
            elif sel.kind == "personal":
                if sel.value not in model.objects:
                    add(
                        "UnknownObject",
                        f"personal rule selects missing object {sel.value!r}",
                        view.name,
                        rule.id,
                    )
                if sel.value in personal_seen:
                    add(
                        "DuplicateBinding",
                        f"object {sel.value!r} selected twice in one view",
                        view.name,
                        rule.id,
                    )
                personal_seen[sel.value] = rule.id
            elif sel.kind == "metaclass":
                if not mm.has_class(sel.value):
                    add(
                        "UnknownClass",
                        f"metaclass rule selects unknown class {sel.value!r}",
                        view.name,
                        rule.id,
                    )
                elif sel.value in metaclass_seen:
                    add(
                        "DuplicateBinding",
                        f"class {sel.value!r} selected twice in one view",
                        view.name,
                        rule.id,
                    )
                metaclass_seen[sel.value] = rule.id

            # placeholders must resolve through the selected class
            target_class = None
            if sel.kind == "metaclass" and mm.has_class(sel.value):
                target_class = sel.value
            elif sel.kind == "personal" and sel.value in model.objects:
                target_class = model.object(sel.value).class_name
            if target_class is not None:
                known = set(mm.feature_names(target_class))
                for feature in rule.placeholders():
                    if feature not in known:
                        add(
                            "UnknownFeature",
                            f"template references {feature!r}, not a feature of {target_class!r}",
                            view.name,
                            rule.id,
                        )
        if view.default_rule is not None and view.default_rule.selector.kind != "viewDefault":
            add(
                "BadSelector",
                "defaultRule must use a view-default selector",
                view.name,
                view.default_rule.id,
            )
    return issues
