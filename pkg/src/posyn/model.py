"""Metamodeling tiers: class definitions (M2), conforming object graphs (M1),
structural conformance checking, and the navigation API used by expressions.

A :class:`MetaModel` is validated once by :func:`define_metamodel`, which also
computes the flattened (inherited) feature set per class. :class:`Model`
instances are mutated only through :func:`instantiate` and :func:`write_slot`;
both validate eagerly so a model built through the API always conforms.
:func:`check_conformance` re-verifies everything structurally for models
loaded from raw documents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import MetamodelDefinitionError, ModelError

PRIMITIVE_TYPES = ("int", "float", "string", "boolean")

_SLOT_DEFAULTS = {"int": 0, "float": 0.0, "string": "", "boolean": False}


@dataclass
class AttributeSpec:
    """A primitive-valued feature. ``type`` is a primitive name or a declared
    enum name; ``bounds`` optionally restricts numeric values to [lo, hi]."""

    name: str
    type: str
    bounds: tuple[float | None, float | None] | None = None

    def to_dict(self) -> dict:
        out: dict = {"name": self.name, "type": self.type}
        if self.bounds is not None:
            out["bounds"] = list(self.bounds)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> AttributeSpec:
        bounds = data.get("bounds")
        return cls(
            name=data["name"],
            type=data["type"],
            bounds=tuple(bounds) if bounds is not None else None,
        )


@dataclass
class ReferenceSpec:
    """An object-valued feature. ``upper`` is None for unbounded."""

    name: str
    target: str
    containment: bool = False
    lower: int = 0
    upper: int | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "containment": self.containment,
            "lower": self.lower,
            "upper": self.upper,
        }

    @classmethod
    def from_dict(cls, data: dict) -> ReferenceSpec:
        return cls(
            name=data["name"],
            target=data["target"],
            containment=bool(data.get("containment", False)),
            lower=int(data.get("lower", 0)),
            upper=data.get("upper"),
        )


@dataclass
class MetaClass:
    name: str
    abstract: bool = False
    superclasses: list[str] = field(default_factory=list)
    attributes: list[AttributeSpec] = field(default_factory=list)
    references: list[ReferenceSpec] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "abstract": self.abstract,
            "superclasses": list(self.superclasses),
            "attributes": [a.to_dict() for a in self.attributes],
            "references": [r.to_dict() for r in self.references],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MetaClass:
        return cls(
            name=data["name"],
            abstract=bool(data.get("abstract", False)),
            superclasses=list(data.get("superclasses", [])),
            attributes=[AttributeSpec.from_dict(a) for a in data.get("attributes", [])],
            references=[ReferenceSpec.from_dict(r) for r in data.get("references", [])],
        )


@dataclass
class MetaModel:
    """A validated metamodel. Construct through :func:`define_metamodel`;
    the flattened feature tables are filled in during validation."""

    name: str
    classes: list[MetaClass] = field(default_factory=list)
    enums: list[tuple[str, list[str]]] = field(default_factory=list)
    # class name -> features in supers-first declaration order
    _flat_attributes: dict[str, list[AttributeSpec]] = field(
        default_factory=dict, repr=False, compare=False
    )
    _flat_references: dict[str, list[ReferenceSpec]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def metaclass(self, name: str) -> MetaClass:
        for mc in self.classes:
            if mc.name == name:
                return mc
        raise ModelError(f"unknown class {name!r}", code="UnknownClass")

    def has_class(self, name: str) -> bool:
        return any(mc.name == name for mc in self.classes)

    def enum_literals(self, name: str) -> list[str] | None:
        for enum_name, literals in self.enums:
            if enum_name == name:
                return literals
        return None

    def flattened_attributes(self, class_name: str) -> list[AttributeSpec]:
        return self._flat_attributes[class_name]

    def flattened_references(self, class_name: str) -> list[ReferenceSpec]:
        return self._flat_references[class_name]

    def feature_names(self, class_name: str) -> list[str]:
        """All feature names (attributes then references), supers first."""
        return [a.name for a in self._flat_attributes[class_name]] + [
            r.name for r in self._flat_references[class_name]
        ]

    def find_attribute(self, class_name: str, feature: str) -> AttributeSpec | None:
        for a in self._flat_attributes[class_name]:
            if a.name == feature:
                return a
        return None

    def find_reference(self, class_name: str, feature: str) -> ReferenceSpec | None:
        for r in self._flat_references[class_name]:
            if r.name == feature:
                return r
        return None

    def superclass_chain(self, class_name: str) -> list[str]:
        """class_name plus all (transitive) superclasses, nearest first."""
        out: list[str] = []
        queue = [class_name]
        while queue:
            current = queue.pop(0)
            if current in out:
                continue
            out.append(current)
            queue.extend(self.metaclass(current).superclasses)
        return out

    def class_distance(self, class_name: str, ancestor: str) -> int | None:
        """Inheritance steps from class_name up to ancestor; None if unrelated."""
        depth = 0
        frontier = [class_name]
        seen: set[str] = set()
        while frontier:
            if ancestor in frontier:
                return depth
            next_frontier: list[str] = []
            for c in frontier:
                if c in seen:
                    continue
                seen.add(c)
                next_frontier.extend(self.metaclass(c).superclasses)
            frontier = next_frontier
            depth += 1
        return None

    def is_subclass(self, class_name: str, ancestor: str) -> bool:
        return self.class_distance(class_name, ancestor) is not None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "classes": [c.to_dict() for c in self.classes],
            "enums": [{"name": n, "literals": list(ls)} for n, ls in self.enums],
        }

    @classmethod
    def from_dict(cls, data: dict) -> MetaModel:
        return define_metamodel(
            cls(
                name=data["name"],
                classes=[MetaClass.from_dict(c) for c in data.get("classes", [])],
                enums=[(e["name"], list(e["literals"])) for e in data.get("enums", [])],
            )
        )


def define_metamodel(spec: MetaModel) -> MetaModel:
    """Validate a metamodel and compute flattened feature sets per class.

    Raises :class:`MetamodelDefinitionError` carrying every issue found
    (codes: DuplicateName, UnknownSuperclass, InheritanceCycle,
    BadMultiplicity, UnknownType).
    """
    issues: list[tuple[str, str]] = []
    class_names = [c.name for c in spec.classes]
    enum_names = [n for n, _ in spec.enums]

    for name in set(class_names):
        if class_names.count(name) > 1:
            issues.append(("DuplicateName", f"class {name!r} defined more than once"))
    for name in set(enum_names):
        if enum_names.count(name) > 1:
            issues.append(("DuplicateName", f"enum {name!r} defined more than once"))
    for name in set(enum_names) & set(class_names):
        issues.append(("DuplicateName", f"{name!r} names both a class and an enum"))

    for mc in spec.classes:
        for sup in mc.superclasses:
            if sup not in class_names:
                issues.append(
                    ("UnknownSuperclass", f"{mc.name!r} extends unknown class {sup!r}")
                )
        for attr in mc.attributes:
            if attr.type not in PRIMITIVE_TYPES and attr.type not in enum_names:
                issues.append(
                    ("UnknownType", f"{mc.name}.{attr.name} has unknown type {attr.type!r}")
                )
        for ref in mc.references:
            if ref.target not in class_names:
                issues.append(
                    ("UnknownType", f"{mc.name}.{ref.name} targets unknown class {ref.target!r}")
                )
            if ref.lower < 0 or (ref.upper is not None and ref.upper < ref.lower):
                issues.append(
                    ("BadMultiplicity", f"{mc.name}.{ref.name} has bounds {ref.lower}..{ref.upper}")
                )

    # Cycle detection before flattening; flattening assumes a DAG.
    cyclic = _inheritance_cycles(spec)
    for name in cyclic:
        issues.append(("InheritanceCycle", f"class {name!r} participates in an inheritance cycle"))

    if issues:
        raise MetamodelDefinitionError(issues)

    spec._flat_attributes = {}
    spec._flat_references = {}
    for mc in spec.classes:
        attrs: list[AttributeSpec] = []
        refs: list[ReferenceSpec] = []
        seen: set[str] = set()
        for cname in _linearize(spec, mc.name):
            c = spec.metaclass(cname)
            for a in c.attributes:
                if a.name in seen:
                    issues.append(
                        ("DuplicateName", f"feature {a.name!r} collides in flattened {mc.name!r}")
                    )
                seen.add(a.name)
                attrs.append(a)
            for r in c.references:
                if r.name in seen:
                    issues.append(
                        ("DuplicateName", f"feature {r.name!r} collides in flattened {mc.name!r}")
                    )
                seen.add(r.name)
                refs.append(r)
        spec._flat_attributes[mc.name] = attrs
        spec._flat_references[mc.name] = refs

    if issues:
        raise MetamodelDefinitionError(issues)
    return spec


def _inheritance_cycles(spec: MetaModel) -> list[str]:
    known = {c.name for c in spec.classes}
    colors: dict[str, int] = {}  # 0 unseen, 1 in progress, 2 done
    cyclic: list[str] = []

    def visit(name: str) -> bool:
        state = colors.get(name, 0)
        if state == 1:
            return True
        if state == 2:
            return False
        colors[name] = 1
        hit = False
        for sup in spec.metaclass(name).superclasses:
            if sup in known and visit(sup):
                hit = True
        colors[name] = 2
        if hit and name not in cyclic:
            cyclic.append(name)
        return hit

    for c in spec.classes:
        visit(c.name)
    return cyclic


def _linearize(spec: MetaModel, class_name: str) -> list[str]:
    """Supers-first traversal order for feature flattening (deterministic)."""
    order: list[str] = []

    def visit(name: str) -> None:
        if name in order:
            return
        for sup in spec.metaclass(name).superclasses:
            visit(sup)
        order.append(name)

    visit(class_name)
    return order


@dataclass
class ModelObject:
    id: str
    class_name: str
    # feature name -> primitive value, enum literal string, or list of object ids
    slots: dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"className": self.class_name, "slots": dict(self.slots)}


@dataclass
class ModelDelta:
    """One slot mutation; ``changed`` is False for writes of the same value.
    The rule engine uses deltas as onRefresh stimuli and skips no-ops."""

    object_id: str
    feature: str
    old: object
    new: object

    @property
    def changed(self) -> bool:
        return self.old != self.new or type(self.old) is not type(self.new)

    def to_dict(self) -> dict:
        return {
            "objectId": self.object_id,
            "feature": self.feature,
            "old": self.old,
            "new": self.new,
        }


@dataclass
class ConformanceViolation:
    object_id: str
    feature: str  # "-" when not feature-specific
    code: str
    message: str

    def to_dict(self) -> dict:
        return {
            "objectId": self.object_id,
            "feature": self.feature,
            "code": self.code,
            "message": self.message,
        }


@dataclass
class ConformanceReport:
    violations: list[ConformanceViolation] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return not self.violations

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_dict(self) -> dict:
        return {"violations": [v.to_dict() for v in self.violations]}


class Model:
    """A typed object graph conforming to a metamodel.

    Object ids are engine-assigned, monotonic per model ("o1", "o2", ...)
    and stable across save/load. Mutation goes through :meth:`instantiate`
    and :meth:`write_slot` only; both validate eagerly.
    """

    def __init__(self, id: str, metamodel: MetaModel):
        self.id = id
        self.metamodel = metamodel
        self.objects: dict[str, ModelObject] = {}
        self._next_id = 1

    @property
    def metamodel_ref(self) -> str:
        return self.metamodel.name

    def object(self, object_id: str) -> ModelObject:
        obj = self.objects.get(object_id)
        if obj is None:
            raise ModelError(f"unknown object {object_id!r}", code="UnknownObject")
        return obj

    def fresh_id(self) -> str:
        oid = f"o{self._next_id}"
        self._next_id += 1
        return oid

    def sync_id_counter(self) -> None:
        """Recompute the id counter from existing ids (used after raw loads)."""
        top = 0
        for oid in self.objects:
            if oid.startswith("o") and oid[1:].isdigit():
                top = max(top, int(oid[1:]))
        self._next_id = top + 1

    def container_of(self, object_id: str) -> tuple[str, str] | None:
        """(container id, reference name) holding object_id, or None."""
        for oid, obj in self.objects.items():
            for ref in self.metamodel.flattened_references(obj.class_name):
                if ref.containment and object_id in obj.slots.get(ref.name, []):
                    return (oid, ref.name)
        return None

    def instantiate(
        self,
        class_name: str,
        container: tuple[str, str] | None = None,
        object_id: str | None = None,
    ) -> str:
        return instantiate(self, class_name, container, object_id)

    def write_slot(self, object_id: str, feature: str, value: object) -> ModelDelta:
        return write_slot(self, object_id, feature, value)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "metamodelRef": self.metamodel_ref,
            "objects": {oid: obj.to_dict() for oid, obj in self.objects.items()},
        }

    @classmethod
    def from_dict(cls, data: dict, metamodel: MetaModel) -> Model:
        model = cls(id=data["id"], metamodel=metamodel)
        for oid, od in data.get("objects", {}).items():
            model.objects[oid] = ModelObject(
                id=oid, class_name=od["className"], slots=dict(od.get("slots", {}))
            )
        model.sync_id_counter()
        return model


def default_slot_value(mm: MetaModel, attr: AttributeSpec) -> object:
    if attr.type in _SLOT_DEFAULTS:
        return _SLOT_DEFAULTS[attr.type]
    literals = mm.enum_literals(attr.type)
    if not literals:
        raise ModelError(f"enum {attr.type!r} has no literals", code="UnknownType")
    return literals[0]


def instantiate(
    model: Model,
    class_name: str,
    container: tuple[str, str] | None = None,
    object_id: str | None = None,
) -> str:
    """Create an object with default slots, optionally linked under a
    containment reference. Defaults: 0 / 0.0 / "" / False / first enum
    literal; reference slots start empty."""
    mm = model.metamodel
    if object_id is not None and object_id in model.objects:
        raise ModelError(f"object id {object_id!r} already in use", code="DuplicateId")
    if not mm.has_class(class_name):
        raise ModelError(f"unknown class {class_name!r}", code="UnknownClass")
    mc = mm.metaclass(class_name)
    if mc.abstract:
        raise ModelError(f"class {class_name!r} is abstract", code="AbstractClass")

    ref = None
    holder = None
    if container is not None:
        holder_id, ref_name = container
        holder = model.object(holder_id)
        ref = mm.find_reference(holder.class_name, ref_name)
        if ref is None or not ref.containment:
            raise ModelError(
                f"{holder.class_name}.{ref_name} is not a containment reference",
                code="BadContainer",
            )
        if not mm.is_subclass(class_name, ref.target):
            raise ModelError(
                f"{ref_name} holds {ref.target!r}, not {class_name!r}", code="BadContainer"
            )
        current = holder.slots.get(ref.name, [])
        if ref.upper is not None and len(current) + 1 > ref.upper:
            raise ModelError(
                f"{holder.id}.{ref.name} already holds {len(current)} of max {ref.upper}",
                code="MultiplicityOverflow",
            )

    oid = object_id if object_id is not None else model.fresh_id()
    slots: dict[str, object] = {}
    for attr in mm.flattened_attributes(class_name):
        slots[attr.name] = default_slot_value(mm, attr)
    for r in mm.flattened_references(class_name):
        slots[r.name] = []
    model.objects[oid] = ModelObject(id=oid, class_name=class_name, slots=slots)
    if object_id is not None:
        model.sync_id_counter()

    if holder is not None and ref is not None:
        holder.slots.setdefault(ref.name, [])
        holder.slots[ref.name] = list(holder.slots[ref.name]) + [oid]
    return oid


def _check_primitive(attr: AttributeSpec, value: object, mm: MetaModel) -> object:
    """Validate and normalize a primitive value for an attribute slot."""
    t = attr.type
    if t == "int":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ModelError(f"{attr.name} expects int, got {value!r}", code="TypeMismatch")
        if isinstance(value, float):
            if not value.is_integer():
                raise ModelError(f"{attr.name} expects int, got {value!r}", code="TypeMismatch")
            value = int(value)
    elif t == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ModelError(f"{attr.name} expects float, got {value!r}", code="TypeMismatch")
        value = float(value)
        if not math.isfinite(value):
            raise ModelError(f"{attr.name} expects a finite float", code="TypeMismatch")
    elif t == "string":
        if not isinstance(value, str):
            raise ModelError(f"{attr.name} expects string, got {value!r}", code="TypeMismatch")
    elif t == "boolean":
        if not isinstance(value, bool):
            raise ModelError(f"{attr.name} expects boolean, got {value!r}", code="TypeMismatch")
    else:  # enum
        literals = mm.enum_literals(t) or []
        if value not in literals:
            raise ModelError(
                f"{attr.name} expects one of {literals}, got {value!r}",
                code="UnknownEnumLiteral",
            )
    if attr.bounds is not None and isinstance(value, (int, float)):
        lo, hi = attr.bounds
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            raise ModelError(
                f"{attr.name}={value!r} outside bounds [{lo}, {hi}]", code="BoundsViolation"
            )
    return value


def write_slot(model: Model, object_id: str, feature: str, value: object) -> ModelDelta:
    """Update one slot; the only mutation path for slot values.

    Rejected writes leave the model untouched. Reference slots take the
    full target-id list; containment is kept a forest eagerly.
    """
    mm = model.metamodel
    obj = model.object(object_id)

    attr = mm.find_attribute(obj.class_name, feature)
    if attr is not None:
        value = _check_primitive(attr, value, mm)
        old = obj.slots.get(feature)
        obj.slots[feature] = value
        return ModelDelta(object_id=object_id, feature=feature, old=old, new=value)

    ref = mm.find_reference(obj.class_name, feature)
    if ref is None:
        raise ModelError(
            f"{obj.class_name} has no feature {feature!r}", code="UnknownFeature"
        )
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ModelError(
            f"{feature} expects a list of object ids, got {value!r}", code="TypeMismatch"
        )
    for target_id in value:
        target = model.objects.get(target_id)
        if target is None:
            raise ModelError(f"{feature} targets unknown object {target_id!r}", code="DanglingTarget")
        if not mm.is_subclass(target.class_name, ref.target):
            raise ModelError(
                f"{feature} holds {ref.target!r}, not {target.class_name!r}",
                code="TypeMismatch",
            )
    if len(value) < ref.lower or (ref.upper is not None and len(value) > ref.upper):
        raise ModelError(
            f"{feature} holds {len(value)} targets, allowed {ref.lower}..{ref.upper}",
            code="MultiplicityViolation",
        )
    if ref.containment:
        old_list = obj.slots.get(feature, [])
        for target_id in value:
            if target_id in old_list:
                continue
            holder = model.container_of(target_id)
            if holder is not None and holder != (object_id, feature):
                raise ModelError(
                    f"{target_id} is already contained by {holder[0]}.{holder[1]}",
                    code="ContainmentConflict",
                )
            if target_id == object_id or _is_ancestor(model, target_id, object_id):
                raise ModelError(
                    f"containing {target_id} under {object_id} would form a cycle",
                    code="ContainmentConflict",
                )
    old = obj.slots.get(feature)
    obj.slots[feature] = list(value)
    return ModelDelta(object_id=object_id, feature=feature, old=old, new=list(value))


def _is_ancestor(model: Model, candidate: str, of: str) -> bool:
    current: str | None = of
    while current is not None:
        holder = model.container_of(current)
        if holder is None:
            return False
        current = holder[0]
        if current == candidate:
            return True
    return False


class SlotHandle:
    """A (object, attribute) handle; getValue/setValue endpoint for navigation."""

    def __init__(self, model: Model, object_id: str, feature: str):
        self.model = model
        self.object_id = object_id
        self.feature = feature

    def get_value(self) -> object:
        return self.model.object(self.object_id).slots.get(self.feature)

    def set_value(self, value: object) -> ModelDelta:
        return write_slot(self.model, self.object_id, self.feature, value)


class NavRoot:
    """Navigation entry point bound to one object (``this.model`` in rules)."""

    def __init__(self, model: Model, object_id: str):
        self.model = model
        self.object_id = object_id

    @property
    def object(self) -> ModelObject:
        return self.model.object(self.object_id)

    def get_children(self, feature: str) -> SlotHandle | list[str]:
        obj = self.object
        mm = self.model.metamodel
        if mm.find_attribute(obj.class_name, feature) is not None:
            return SlotHandle(self.model, self.object_id, feature)
        if mm.find_reference(obj.class_name, feature) is not None:
            return list(obj.slots.get(feature, []))
        raise ModelError(
            f"{obj.class_name} has no feature {feature!r}", code="UnknownFeature"
        )


def navigate(model: Model, start: str, path: list[tuple]) -> object:
    """Walk a path of ("children", name) / ("value",) steps from an object.

    A children step yields a slot handle for attributes or the target-id
    list for references; a value step extracts the primitive from a handle.
    """
    current: object = NavRoot(model, start)
    for step in path:
        kind = step[0]
        if kind == "children":
            if not isinstance(current, NavRoot):
                if isinstance(current, SlotHandle):
                    raise ModelError(
                        f"cannot navigate past primitive slot {current.feature!r}",
                        code="PathOnPrimitive",
                    )
                raise ModelError(
                    "children step requires a single object", code="PathOnPrimitive"
                )
            current = current.get_children(step[1])
        elif kind == "value":
            if isinstance(current, SlotHandle):
                current = current.get_value()
            elif isinstance(current, list):
                pass  # a reference slot's value is its id list
            else:
                raise ModelError("value step requires a slot", code="PathOnPrimitive")
        else:
            raise ModelError(f"unknown navigation step {kind!r}", code="UnknownFeature")
    return current


def check_conformance(model: Model) -> ConformanceReport:
    """Structural validation of a model against its metamodel. Pure."""
    mm = model.metamodel
    report = ConformanceReport()

    def add(oid: str, feature: str, code: str, message: str) -> None:
        report.violations.append(ConformanceViolation(oid, feature, code, message))

    containers: dict[str, tuple[str, str]] = {}
    for oid, obj in model.objects.items():
        if not mm.has_class(obj.class_name):
            add(oid, "-", "UnknownClass", f"class {obj.class_name!r} not in metamodel")
            continue
        mc = mm.metaclass(obj.class_name)
        if mc.abstract:
            add(oid, "-", "AbstractClass", f"instance of abstract class {obj.class_name!r}")
            continue

        declared = set(mm.feature_names(obj.class_name))
        for feature in obj.slots:
            if feature not in declared:
                add(oid, feature, "UnknownFeature", f"slot {feature!r} not declared")

        for attr in mm.flattened_attributes(obj.class_name):
            if attr.name not in obj.slots:
                add(oid, attr.name, "MissingSlot", "attribute slot missing")
                continue
            try:
                _check_primitive(attr, obj.slots[attr.name], mm)
            except ModelError as err:
                add(oid, attr.name, err.code, err.message)

        for ref in mm.flattened_references(obj.class_name):
            value = obj.slots.get(ref.name, [])
            if not isinstance(value, list):
                add(oid, ref.name, "TypeMismatch", "reference slot must be a list")
                continue
            if len(value) < ref.lower or (ref.upper is not None and len(value) > ref.upper):
                add(
                    oid,
                    ref.name,
                    "MultiplicityViolation",
                    f"{len(value)} targets, allowed {ref.lower}..{ref.upper}",
                )
            for target_id in value:
                target = model.objects.get(target_id)
                if target is None:
                    add(oid, ref.name, "DanglingTarget", f"target {target_id!r} does not exist")
                    continue
                if mm.has_class(target.class_name) and not mm.is_subclass(
                    target.class_name, ref.target
                ):
                    add(
                        oid,
                        ref.name,
                        "TypeMismatch",
                        f"target {target_id} is {target.class_name!r}, expected {ref.target!r}",
                    )
                if ref.containment:
                    if target_id in containers and containers[target_id] != (oid, ref.name):
                        prev = containers[target_id]
                        add(
                            target_id,
                            "-",
                            "ContainmentConflict",
                            f"contained by both {prev[0]}.{prev[1]} and {oid}.{ref.name}",
                        )
                    else:
                        containers[target_id] = (oid, ref.name)

    # Containment cycles over the container edges collected above.
    for oid in model.objects:
        seen: set[str] = set()
        current: str | None = oid
        while current is not None and current in containers:
            parent = containers[current][0]
            if parent == oid:
                add(oid, "-", "ContainmentCycle", "object transitively contains itself")
                break
            if current in seen:
                break
            seen.add(current)
            current = parent
    return report
