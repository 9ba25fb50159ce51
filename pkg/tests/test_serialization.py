"""Project persistence: canonical saves, validating loads, XMI export."""

from __future__ import annotations

import json
import random
import xml.etree.ElementTree as ET

import pytest

from posyn.constraints import LinearScale, LogScale, NodeLayout, PowerScale
from posyn.errors import (
    ProjectParseError,
    SerializationError,
    ValidationFailedError,
    VersionMismatchError,
)
from posyn.fixture import aircraft_project
from posyn.model import (
    AttributeSpec,
    MetaClass,
    MetaModel,
    Model,
    ReferenceSpec,
    define_metamodel,
)
from posyn.project import ProjectDocument, export_xmi, load_project, save_project
from posyn.views import Selector, View, ViewRule


# --- randomized project generator ---------------------------------------


WORDS = ["alpha", "bravo", "cedar", "delta", "ember", "frost", "gale", "harbor"]

TRIPLE_POOL = [
    {
        "triggers": ["onRefresh", "whileDragging"],
        "action": {"kind": "constraint", "property": "y", "operator": ">=", "valueExpr": "0"},
    },
    {
        "triggers": ["onRefresh"],
        "action": {
            "kind": "constraint",
            "property": "vertexSize.x",
            "operator": "=",
            "valueExpr": "2 * this.model.getChildren('num').getValue()",
        },
    },
    {
        "triggers": ["onDragEnd"],
        "condition": "this.x > 0",
        "action": {
            "kind": "generic",
            "expr": "this.model.getChildren('num').setValue(round(this.vertexSize.x / 2))",
        },
    },
    {
        "triggers": ["onResizeEnd"],
        "action": {
            "kind": "export",
            "targetSelector": "container",
            "attributeName": "label",
            "valueExpr": "this.width * 2",
        },
    },
]


def random_metamodel(rng: random.Random) -> MetaModel:
    classes = [
        MetaClass(
            name="Root",
            attributes=[AttributeSpec("title", "string")],
            references=[ReferenceSpec("items", "Item", containment=True)],
        ),
        MetaClass(
            name="Item",
            attributes=[
                AttributeSpec("num", "int"),
                AttributeSpec("ratio", "float"),
                AttributeSpec("tone", "Tone"),
            ],
            references=[ReferenceSpec("peers", "Item", containment=False)],
        ),
    ]
    for i in range(rng.randint(0, 3)):
        classes.append(
            MetaClass(
                name=f"Item{i}",
                superclasses=["Item"],
                attributes=[
                    AttributeSpec(f"extra{i}", rng.choice(["int", "float", "string", "boolean"]))
                ],
            )
        )
    return define_metamodel(
        MetaModel(name="rand", classes=classes, enums=[("Tone", ["low", "mid", "high"])])
    )


def random_slot_value(rng: random.Random, attr: AttributeSpec):
    if attr.type == "int":
        return rng.randint(-1000, 1000)
    if attr.type == "float":
        return round(rng.uniform(-1e6, 1e6), rng.randint(0, 12))
    if attr.type == "string":
        return rng.choice(WORDS)
    if attr.type == "boolean":
        return rng.random() < 0.5
    return rng.choice(["low", "mid", "high"])


def random_project(rng: random.Random) -> ProjectDocument:
    mm = random_metamodel(rng)
    model = Model("m-rand", mm)
    root = model.instantiate("Root")
    model.write_slot(root, "title", rng.choice(WORDS))
    concrete = [c.name for c in mm.classes if c.name != "Root"]
    items = []
    for _ in range(rng.randint(0, 6)):
        oid = model.instantiate(rng.choice(concrete), (root, "items"))
        for attr in mm.flattened_attributes(model.object(oid).class_name):
            model.write_slot(oid, attr.name, random_slot_value(rng, attr))
        items.append(oid)
    for oid in items:
        if items and rng.random() < 0.4:
            peers = rng.sample(items, k=rng.randint(1, min(2, len(items))))
            model.write_slot(oid, "peers", peers)

    views = []
    ranks = rng.sample(range(0, 20), 3)
    for vi in range(rng.randint(0, 3)):
        name = f"view{vi}"
        rules = []
        used = set()
        for ri in range(rng.randint(0, 2)):
            selector = (
                {"kind": "personal", "value": rng.choice(items)}
                if items and rng.random() < 0.4
                else {"kind": "metaclass", "value": rng.choice(concrete + ["Item", "Root"])}
            )
            key = (selector["kind"], selector["value"])
            if key in used:
                continue
            used.add(key)
            rules.append(
                {
                    "id": f"{name}#{ri}",
                    "selector": selector,
                    "template": rng.choice(
                        ["<div>$##num$</div>", "<span>static</span>", "$##title$"]
                    ),
                    "ruleTriples": rng.sample(TRIPLE_POOL, k=rng.randint(0, 2)),
                }
            )
        view_data = {
            "name": name,
            "active": rng.random() < 0.8,
            "stackRank": ranks[vi],
            "rules": rules,
            "unmappedPolicy": rng.choice(["Exclude", "FreeForm", "Custom"]),
        }
        if rng.random() < 0.5:
            view_data["defaultRule"] = {
                "id": f"{name}#default",
                "selector": {"kind": "viewDefault"},
                "template": "<div/>",
            }
        views.append(View.from_dict(view_data))
    # view templates may reference features not present on every class the
    # rule matches; keep only feature-safe combinations for validity
    safe_views = []
    for view in views:
        data = view.to_dict()
        data["rules"] = [
            r
            for r in data["rules"]
            if "$##" not in r["template"]
            or (r["selector"]["kind"] == "metaclass" and "num" in r["template"]
                and r["selector"]["value"] != "Root")
            or (r["selector"]["kind"] == "metaclass" and "title" in r["template"]
                and r["selector"]["value"] == "Root")
            or r["selector"]["kind"] == "personal" and "num" in r["template"]
        ]
        safe_views.append(View.from_dict(data))

    layouts = {}
    for oid in model.objects:
        layouts[oid] = NodeLayout(
            oid,
            x=round(rng.uniform(-500, 500), 6),
            y=round(rng.uniform(-500, 500), 6),
            width=round(rng.uniform(0.5, 80), 6),
            height=round(rng.uniform(0.5, 80), 6),
            rotation=round(rng.uniform(0, 359), 6),
            anchor=rng.choice(["topLeft", "bottomLeft", "center"]),
        )

    scales = {}
    if rng.random() < 0.7:
        scales["x"] = LinearScale(slope=rng.choice([0.5, 2.0, -3.0]), offset=rng.uniform(-5, 5))
    if rng.random() < 0.5:
        scales["y"] = PowerScale(exponent=rng.choice([0.5, 2.0]), domain=(0.0, None))
    if rng.random() < 0.5:
        scales["size"] = LogScale(base=rng.choice([2.0, 10.0]), domain=(1e-9, None))

    return ProjectDocument(
        metamodel=mm, model=model, views=safe_views, layouts=layouts, scales=scales
    )


class TestRandomizedRoundTrip:
    def test_200_random_projects(self):
        rng = random.Random(4242)
        for case in range(200):
            doc = random_project(rng)
            text = save_project(doc)
            loaded = load_project(text)
            assert loaded.to_dict() == doc.to_dict(), f"case {case} not structurally equal"
            assert save_project(loaded) == text, f"case {case} not byte-stable"

    def test_byte_determinism_across_independent_builds(self):
        a = save_project(random_project(random.Random(7)))
        b = save_project(random_project(random.Random(7)))
        assert a == b

    def test_fixture_golden_round_trip(self):
        doc = aircraft_project()
        text = save_project(doc)
        again = save_project(load_project(text))
        assert text == again
        assert text.endswith("\n")
        # canonical form: compact separators and sorted keys
        assert json.loads(text)["formatVersion"] == 1
        assert '": ' not in text


class TestLoadErrors:
    def test_parse_error(self):
        with pytest.raises(ProjectParseError):
            load_project("{not json")
        with pytest.raises(ProjectParseError):
            load_project('"a bare string"')

    def test_version_mismatch(self):
        data = json.loads(save_project(aircraft_project()))
        data["formatVersion"] = 99
        with pytest.raises(VersionMismatchError):
            load_project(json.dumps(data))
        del data["formatVersion"]
        with pytest.raises(VersionMismatchError):
            load_project(json.dumps(data))

    def test_bad_expression_cites_rule_and_position(self):
        data = json.loads(save_project(aircraft_project()))
        rule = data["views"][0]["rules"][0]
        rule["ruleTriples"][0]["action"]["valueExpr"] = "2 * * seats"
        with pytest.raises(ValidationFailedError) as exc:
            load_project(json.dumps(data))
        entry = next(e for e in exc.value.report if e["code"] == "SyntaxError")
        assert entry["rule"] == rule["id"]
        assert isinstance(entry["position"], int) and entry["position"] >= 0

    def test_nonconforming_model_reported(self):
        data = json.loads(save_project(aircraft_project()))
        data["model"]["objects"]["o2"]["slots"]["seats"] = "many"
        with pytest.raises(ValidationFailedError) as exc:
            load_project(json.dumps(data))
        assert any(e["code"] == "TypeMismatch" for e in exc.value.report)

    def test_dangling_layout_reported(self):
        data = json.loads(save_project(aircraft_project()))
        data["layouts"]["o99"] = {"elementId": "o99", "x": 0, "y": 0, "width": 1, "height": 1}
        with pytest.raises(ValidationFailedError) as exc:
            load_project(json.dumps(data))
        assert any(e["code"] == "DanglingLayout" for e in exc.value.report)

    def test_duplicate_rank_reported(self):
        data = json.loads(save_project(aircraft_project()))
        data["views"][1]["stackRank"] = data["views"][0]["stackRank"]
        with pytest.raises(ValidationFailedError) as exc:
            load_project(json.dumps(data))
        assert any(e["code"] == "DuplicateRank" for e in exc.value.report)

    def test_bad_metamodel_collected(self):
        data = json.loads(save_project(aircraft_project()))
        data["metamodel"]["classes"][2]["superclasses"] = ["Spaceship"]
        with pytest.raises(ValidationFailedError) as exc:
            load_project(json.dumps(data))
        assert any(e["code"] == "UnknownSuperclass" for e in exc.value.report)

    def test_empty_project_loads(self):
        mm = define_metamodel(MetaModel(name="empty", classes=[MetaClass(name="A")]))
        doc = ProjectDocument(metamodel=mm, model=Model("m1", mm))
        loaded = load_project(save_project(doc))
        assert loaded.model.objects == {}
        assert loaded.views == [] and loaded.layouts == {} and loaded.scales == {}


class TestXMI:
    def test_fixture_structure(self):
        doc = aircraft_project()
        text = export_xmi(doc.model, doc.metamodel)
        root = ET.fromstring(text)  # raises on malformed XML
        assert len(root) == 1
        hangar = root[0]
        assert hangar.tag == "Hangar"
        assert hangar.get("{http://www.omg.org/XMI}id") == "o1"
        assert hangar.get("name") == "ROMAFIU1234"
        children = list(hangar)
        assert len(children) == 3
        assert {c.tag for c in children} == {"airplanes"}
        types = [c.get("{http://www.w3.org/2001/XMLSchema-instance}type") for c in children]
        assert types == ["Motorized", "Motorized", "Glider"]
        assert children[0].get("seats") == "150"
        assert children[0].get("length") == "63.0"

    def test_empty_model_document_root_only(self):
        mm = define_metamodel(MetaModel(name="empty", classes=[MetaClass(name="A")]))
        text = export_xmi(Model("m1", mm), mm)
        root = ET.fromstring(text)
        assert len(root) == 0

    def test_cross_reference_idrefs(self):
        rng = random.Random(99)
        mm = random_metamodel(rng)
        model = Model("m1", mm)
        root = model.instantiate("Root")
        a = model.instantiate("Item", (root, "items"))
        b = model.instantiate("Item", (root, "items"))
        model.write_slot(a, "peers", [b])
        text = export_xmi(model, mm)
        doc = ET.fromstring(text)
        items = list(doc[0])
        assert items[0].get("peers") == b
        assert items[1].get("peers") is None

    def test_nonconformant_rejected(self):
        doc = aircraft_project()
        doc.model.object("o2").slots["seats"] = "many"
        with pytest.raises(SerializationError) as exc:
            export_xmi(doc.model, doc.metamodel)
        assert exc.value.code == "NonConformant"

    def test_declaration_and_utf8(self):
        doc = aircraft_project()
        doc.model.write_slot("o1", "name", "ANGAR-É")
        text = export_xmi(doc.model, doc.metamodel)
        assert text.startswith('<?xml version="1.0" encoding="UTF-8"?>')
        assert ET.fromstring(text)[0].get("name") == "ANGAR-É"
