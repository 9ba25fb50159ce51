"""The aircraft fixture: a hangar of airplanes on a positional canvas.

Coordinates carry model meaning: x doubles the seat count, y is the
square root of the service ceiling, and both extents are log2 of the
physical dimensions. The module also writes the scripted sessions the
acceptance suite replays.

Run ``python3 -m posyn.fixture [directory]`` to materialize the fixture
files (default ./fixtures).
"""

from __future__ import annotations

import json
import math
import sys
from pathlib import Path

from .constraints import LinearScale, LogScale, NodeLayout, PowerScale
from .expr import parse
from .model import (
    AttributeSpec,
    MetaClass,
    MetaModel,
    Model,
    ReferenceSpec,
    define_metamodel,
)
from .project import ProjectDocument, save_project
from .views import (
    ConstraintAction,
    ExportAction,
    GenericAction,
    Measurability,
    RuleTriple,
    Selector,
    Trigger,
    UnmappedPolicy,
    View,
    ViewRule,
)

HANGAR_ID = "o1"
MOTORIZED_ID = "o2"  # seats=150, the element the drag scripts act on
MOTORIZED_2_ID = "o3"
GLIDER_ID = "o4"

POSITIONAL_VIEW = "aircraft-positional"
LABEL_VIEW = "hangar-labels"


def aircraft_metamodel() -> MetaModel:
    return define_metamodel(
        MetaModel(
            name="aircraft",
            classes=[
                MetaClass(
                    name="Hangar",
                    attributes=[AttributeSpec("name", "string")],
                    references=[
                        ReferenceSpec("airplanes", "Airplane", containment=True)
                    ],
                ),
                MetaClass(
                    name="Airplane",
                    abstract=True,
                    attributes=[
                        AttributeSpec("name", "string"),
                        AttributeSpec("maxAltitude", "int"),
                        AttributeSpec("height", "float"),
                        AttributeSpec("length", "float"),
                        AttributeSpec("seats", "int"),
                    ],
                ),
                MetaClass(
                    name="Motorized",
                    superclasses=["Airplane"],
                    attributes=[AttributeSpec("tankCapacity", "float")],
                ),
                MetaClass(name="Glider", superclasses=["Airplane"]),
            ],
        )
    )


def aircraft_model(metamodel: MetaModel) -> Model:
    model = Model("aircraft-m1", metamodel)
    hangar = model.instantiate("Hangar", object_id=HANGAR_ID)
    model.write_slot(hangar, "name", "ROMAFIU1234")

    def plane(oid, class_name, name, seats, max_altitude, length, height, tank=None):
        pid = model.instantiate(class_name, (hangar, "airplanes"), object_id=oid)
        model.write_slot(pid, "name", name)
        model.write_slot(pid, "seats", seats)
        model.write_slot(pid, "maxAltitude", max_altitude)
        model.write_slot(pid, "length", length)
        model.write_slot(pid, "height", height)
        if tank is not None:
            model.write_slot(pid, "tankCapacity", tank)
        return pid

    plane(MOTORIZED_ID, "Motorized", "A380", 150, 13100, 63.0, 19.0, tank=183000.0)
    plane(MOTORIZED_2_ID, "Motorized", "B747", 180, 12500, 38.0, 12.0, tank=24210.0)
    plane(GLIDER_ID, "Glider", "ASK21", 2, 6000, 8.0, 1.5)
    return model


def aircraft_layouts(model: Model) -> dict[str, NodeLayout]:
    """Positions derived from the model through the axis scales, so the
    project loads with every constraint already satisfied."""
    layouts = {
        HANGAR_ID: NodeLayout(HANGAR_ID, x=0.0, y=0.0, width=500.0, height=200.0)
    }
    for oid in (MOTORIZED_ID, MOTORIZED_2_ID, GLIDER_ID):
        slots = model.object(oid).slots
        layouts[oid] = NodeLayout(
            oid,
            x=2.0 * slots["seats"],
            y=math.sqrt(slots["maxAltitude"]),
            width=math.log2(slots["length"]),
            height=math.log2(slots["height"]),
        )
    return layouts


SNAP_EXPR = "2 * this.model.getChildren('seats').getValue()"
LENGTH_EXPR = "this.model.getChildren('length').getValue()"
INVERSE_EXPR = "this.model.getChildren('seats').setValue(round(this.vertexSize.x / 2))"
LABEL_EXPR = "this.model.getChildren('name').getValue()"


def _airplane_rule(triples: tuple[RuleTriple, ...]) -> ViewRule:
    return ViewRule(
        id=f"{POSITIONAL_VIEW}#0",
        selector=Selector("metaclass", "Airplane"),
        template='<div class="airplane">$##seats$</div>',
        measurability=Measurability(),
        rule_triples=triples,
    )


def positional_triples() -> tuple[RuleTriple, ...]:
    return (
        RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_DRAGGING),
            condition=None,
            action=ConstraintAction("vertexSize.x", "=", parse(SNAP_EXPR)),
        ),
        RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_DRAGGING),
            condition=None,
            action=ConstraintAction("y", ">=", parse("0")),
        ),
        RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_RESIZING),
            condition=None,
            action=ConstraintAction("height", "<=", parse(LENGTH_EXPR)),
        ),
        RuleTriple(
            triggers=(Trigger.ON_DRAG_END,),
            condition=None,
            action=GenericAction(parse(INVERSE_EXPR)),
        ),
        RuleTriple(
            triggers=(Trigger.ON_DRAG_END,),
            condition=None,
            action=ExportAction("container", "lastDocked", parse(LABEL_EXPR)),
        ),
    )


def aircraft_views(triples: tuple[RuleTriple, ...] | None = None) -> list[View]:
    positional = View(
        name=POSITIONAL_VIEW,
        active=True,
        stack_rank=1,
        rules=[_airplane_rule(triples if triples is not None else positional_triples())],
        unmapped_policy=UnmappedPolicy.EXCLUDE,
    )
    labels = View(
        name=LABEL_VIEW,
        active=True,
        stack_rank=0,
        rules=[
            ViewRule(
                id=f"{LABEL_VIEW}#0",
                selector=Selector("metaclass", "Hangar"),
                template='<div class="hangar">$##name$</div>',
                measurability=Measurability(
                    resize_handles=frozenset(["E", "SE", "S"])
                ),
            )
        ],
        unmapped_policy=UnmappedPolicy.FREE_FORM,
    )
    return [positional, labels]


def aircraft_scales() -> dict:
    return {
        "x": LinearScale(slope=2.0, offset=0.0),
        "y": PowerScale(exponent=0.5, domain=(0.0, None)),
        "size": LogScale(base=2.0, domain=(1e-9, None)),
    }


def aircraft_project() -> ProjectDocument:
    metamodel = aircraft_metamodel()
    model = aircraft_model(metamodel)
    return ProjectDocument(
        metamodel=metamodel,
        model=model,
        views=aircraft_views(),
        layouts=aircraft_layouts(model),
        scales=aircraft_scales(),
    )


def constraint_variant_project(which: str) -> ProjectDocument:
    """The fixture with the positional rule reduced to one constraint;
    used to exercise each projection in isolation."""
    variants = {
        "y": RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_DRAGGING),
            condition=None,
            action=ConstraintAction("y", ">=", parse("0")),
        ),
        "x": RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_DRAGGING),
            condition=None,
            action=ConstraintAction("vertexSize.x", ">=", parse(SNAP_EXPR)),
        ),
        "height": RuleTriple(
            triggers=(Trigger.ON_REFRESH, Trigger.WHILE_RESIZING),
            condition=None,
            action=ConstraintAction("height", "<=", parse(LENGTH_EXPR)),
        ),
    }
    metamodel = aircraft_metamodel()
    model = aircraft_model(metamodel)
    return ProjectDocument(
        metamodel=metamodel,
        model=model,
        views=aircraft_views((variants[which],)),
        layouts=aircraft_layouts(model),
        scales=aircraft_scales(),
    )


# --- scripts ----------------------------------------------------------------


def _events(rows: list[tuple]) -> list[dict]:
    out = []
    for seq, (kind, element_id, payload) in enumerate(rows, start=1):
        event: dict = {"seq": seq, "kind": kind}
        if element_id is not None:
            event["elementId"] = element_id
        if payload:
            event["payload"] = payload
        out.append(event)
    return out


def drag_snap_script() -> list[dict]:
    """1 dragStart, 7 drags ending at x=310, 1 dragEnd with no payload:
    the snap constraint must leave the element at x=300 exactly."""
    xs = [301.0, 303.0, 305.0, 307.0, 308.0, 309.0, 310.0]
    rows = [("dragStart", MOTORIZED_ID, {})]
    rows += [("drag", MOTORIZED_ID, {"x": x}) for x in xs]
    rows += [("dragEnd", MOTORIZED_ID, {})]
    return _events(rows)


def round_trip_script() -> list[dict]:
    """Release the drag at x=309: the inverse action writes seats=155 and
    the refresh re-projects x to 310 = 2*155."""
    return _events(
        [
            ("dragStart", MOTORIZED_ID, {}),
            ("dragEnd", MOTORIZED_ID, {"x": 309.0}),
        ]
    )


def violation_scripts() -> dict[str, list[dict]]:
    """One script per single-constraint variant, each driving the layout
    into the infeasible region."""
    return {
        "y": _events(
            [
                ("dragStart", MOTORIZED_ID, {}),
                ("drag", MOTORIZED_ID, {"x": 300.0, "y": -35.25}),
                ("dragEnd", MOTORIZED_ID, {}),
            ]
        ),
        "x": _events(
            [
                ("dragStart", MOTORIZED_ID, {}),
                ("drag", MOTORIZED_ID, {"x": 251.5}),
                ("dragEnd", MOTORIZED_ID, {}),
            ]
        ),
        "height": _events(
            [
                ("resizeStart", MOTORIZED_ID, {}),
                ("resize", MOTORIZED_ID, {"height": 75.5}),
                ("resizeEnd", MOTORIZED_ID, {}),
            ]
        ),
    }


def session_script() -> list[dict]:
    """The canonical mixed session: gestures, attribute edits, view
    toggles, and an object creation."""
    rows = [
        ("dragStart", MOTORIZED_ID, {}),
        ("drag", MOTORIZED_ID, {"x": 304.0}),
        ("drag", MOTORIZED_ID, {"x": 310.0}),
        ("dragEnd", MOTORIZED_ID, {}),
        ("dragStart", MOTORIZED_ID, {}),
        ("dragEnd", MOTORIZED_ID, {"x": 309.0}),
        ("setAttribute", MOTORIZED_ID, {"name": "seats", "value": 160}),
        ("deactivateView", None, {"view": LABEL_VIEW}),
        ("activateView", None, {"view": LABEL_VIEW}),
        (
            "createObject",
            "o5",
            {
                "className": "Glider",
                "containerId": HANGAR_ID,
                "containerFeature": "airplanes",
                "attributes": {"seats": 1, "maxAltitude": 4000, "length": 6.0, "height": 1.2},
                "x": 2.0,
                "y": 63.2455532033676,
            },
        ),
        ("resizeStart", GLIDER_ID, {}),
        ("resize", GLIDER_ID, {"width": 3.0, "height": 1.0}),
        ("resizeEnd", GLIDER_ID, {}),
    ]
    return _events(rows)


def write_script(path: Path, events: list[dict]) -> None:
    path.write_text(
        "".join(json.dumps(e, sort_keys=True) + "\n" for e in events), encoding="utf-8"
    )


def write_fixtures(directory: str | Path = "fixtures") -> list[Path]:
    """Materialize the fixture project, its variants, and all scripts."""
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, text: str) -> None:
        path = root / name
        path.write_text(text, encoding="utf-8")
        written.append(path)

    emit("aircraft.posyn.json", save_project(aircraft_project()))
    for which in ("y", "x", "height"):
        emit(f"aircraft-only-{which}.posyn.json", save_project(constraint_variant_project(which)))

    scripts = {
        "drag-snap.jsonl": drag_snap_script(),
        "round-trip.jsonl": round_trip_script(),
        "session.jsonl": session_script(),
    }
    for which, events in violation_scripts().items():
        scripts[f"violate-{which}.jsonl"] = events
    for name, events in scripts.items():
        emit(name, "".join(json.dumps(e, sort_keys=True) + "\n" for e in events))
    return written


def main(argv: list[str] | None = None) -> int:
    args = argv if argv is not None else sys.argv[1:]
    directory = args[0] if args else "fixtures"
    for path in write_fixtures(directory):
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
