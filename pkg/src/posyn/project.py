"""Project persistence: canonical JSON documents and one-way XMI export.

A project document bundles one metamodel, one conforming model, the view
stack, per-element layouts, and the named axis scales. Saving is
canonical (sorted keys, declaration-order lists, shortest round-trip
floats), so equal states produce identical bytes.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .constraints import NodeLayout, Scale, scale_from_dict
from .errors import (
    ExprSyntaxError,
    MetamodelDefinitionError,
    PosynError,
    ProjectParseError,
    SerializationError,
    ValidationFailedError,
    VersionMismatchError,
)
from .expr import parse
from .model import MetaModel, Model, check_conformance, define_metamodel
from .views import View, validate_views

FORMAT_VERSION = 1

PROJECT_SUFFIX = ".posyn.json"


@dataclass
class ProjectDocument:
    """Everything a session needs, as one serializable unit."""

    metamodel: MetaModel
    model: Model
    views: list[View] = field(default_factory=list)
    layouts: dict[str, NodeLayout] = field(default_factory=dict)
    scales: dict[str, Scale] = field(default_factory=dict)
    format_version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {
            "formatVersion": self.format_version,
            "metamodel": self.metamodel.to_dict(),
            "model": self.model.to_dict(),
            "views": [v.to_dict() for v in self.views],
            "layouts": {eid: lay.to_dict() for eid, lay in self.layouts.items()},
            "scales": {name: s.to_dict() for name, s in self.scales.items()},
        }


def save_project(doc: ProjectDocument) -> str:
    """Canonical JSON text: byte-deterministic for structurally equal
    documents."""
    return (
        json.dumps(doc.to_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)
        + "\n"
    )


def _walk_rule_expressions(view_data: dict, report: list) -> None:
    """Parse-check every expression of a raw view dict, reporting failures
    with the owning rule's id and the error position."""
    view_name = view_data.get("name", "?")
    rules = list(view_data.get("rules", []))
    ids = [r.get("id") or f"{view_name}#{i}" for i, r in enumerate(rules)]
    if view_data.get("defaultRule") is not None:
        rules.append(view_data["defaultRule"])
        ids.append(view_data["defaultRule"].get("id") or f"{view_name}#default")

    for rule_id, rule_data in zip(ids, rules):
        for index, triple in enumerate(rule_data.get("ruleTriples", [])):
            sources = []
            if triple.get("condition") is not None:
                sources.append(("condition", triple["condition"]))
            action = triple.get("action", {})
            for key in ("valueExpr", "expr"):
                if action.get(key) is not None:
                    sources.append((key, action[key]))
            for role, text in sources:
                if not isinstance(text, str):
                    report.append(
                        {
                            "code": "BadExpression",
                            "rule": rule_id,
                            "message": f"{role} of triple {index} must be a string",
                        }
                    )
                    continue
                try:
                    parse(text)
                except ExprSyntaxError as err:
                    report.append(
                        {
                            "code": "SyntaxError",
                            "rule": rule_id,
                            "position": err.position,
                            "message": f"{role} of triple {index}: {err.message}",
                        }
                    )


def load_project(text: str) -> ProjectDocument:
    """Parse and fully validate a project document.

    Raises ProjectParseError for malformed JSON, VersionMismatchError for
    unknown format versions, and ValidationFailedError carrying a report
    of every detected problem otherwise.
    """
    try:
        data = json.loads(text)
    except ValueError as err:
        raise ProjectParseError(f"not valid JSON: {err}") from err
    if not isinstance(data, dict):
        raise ProjectParseError("project document must be a JSON object")

    version = data.get("formatVersion")
    if version != FORMAT_VERSION:
        raise VersionMismatchError(
            f"unsupported formatVersion {version!r}, expected {FORMAT_VERSION}"
        )

    report: list[dict] = []

    try:
        metamodel = define_metamodel(MetaModel.from_dict(data.get("metamodel", {})))
    except MetamodelDefinitionError as err:
        raise ValidationFailedError(
            [{"code": code, "message": msg} for code, msg in err.issues]
        ) from err
    except (KeyError, TypeError, AttributeError) as err:
        raise ProjectParseError(f"malformed metamodel section: {err}") from err

    try:
        model = Model.from_dict(data.get("model", {"id": "m1"}), metamodel)
    except (KeyError, TypeError, AttributeError) as err:
        raise ProjectParseError(f"malformed model section: {err}") from err
    conformance = check_conformance(model)
    for violation in conformance.violations:
        report.append(
            {
                "code": violation.code,
                "message": violation.message,
                "elementId": violation.object_id,
            }
        )

    raw_views = data.get("views", [])
    if not isinstance(raw_views, list):
        raise ProjectParseError("views must be a list")
    for view_data in raw_views:
        _walk_rule_expressions(view_data, report)
    views: list[View] = []
    if not any(entry["code"] in ("SyntaxError", "BadExpression") for entry in report):
        for view_data in raw_views:
            try:
                views.append(View.from_dict(view_data))
            except PosynError as err:
                report.append(
                    {
                        "code": err.code,
                        "message": err.message,
                        "view": view_data.get("name", "?"),
                    }
                )
            except (KeyError, TypeError, AttributeError) as err:
                raise ProjectParseError(f"malformed view section: {err}") from err
        for entry in validate_views(views, model):
            report.append(entry)

    layouts: dict[str, NodeLayout] = {}
    raw_layouts = data.get("layouts", {})
    if not isinstance(raw_layouts, dict):
        raise ProjectParseError("layouts must be an object")
    for element_id, layout_data in raw_layouts.items():
        if element_id not in model.objects:
            report.append(
                {
                    "code": "DanglingLayout",
                    "message": f"layout for unknown element {element_id!r}",
                    "elementId": element_id,
                }
            )
            continue
        try:
            payload = dict(layout_data)
            payload.setdefault("elementId", element_id)
            layouts[element_id] = NodeLayout.from_dict(payload)
        except PosynError as err:
            report.append(
                {"code": err.code, "message": err.message, "elementId": element_id}
            )
        except (KeyError, TypeError, AttributeError) as err:
            raise ProjectParseError(f"malformed layout for {element_id}: {err}") from err

    scales: dict[str, Scale] = {}
    raw_scales = data.get("scales", {})
    if not isinstance(raw_scales, dict):
        raise ProjectParseError("scales must be an object")
    for name, scale_data in raw_scales.items():
        try:
            scales[name] = scale_from_dict(scale_data)
        except PosynError as err:
            report.append({"code": err.code, "message": err.message, "scale": name})
        except (KeyError, TypeError, AttributeError) as err:
            raise ProjectParseError(f"malformed scale {name!r}: {err}") from err

    if report:
        raise ValidationFailedError(report)
    return ProjectDocument(
        metamodel=metamodel, model=model, views=views, layouts=layouts, scales=scales
    )


# --- XMI export -------------------------------------------------------------


_XMI_NS = "http://www.omg.org/XMI"
_XSI_NS = "http://www.w3.org/2001/XMLSchema-instance"


def _xml_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def export_xmi(model: Model, metamodel: MetaModel) -> str:
    """One-way XMI rendering of the model: one element per root object,
    containment nested, primitive slots as attributes, cross-references
    as space-separated idrefs."""
    conformance = check_conformance(model)
    if not conformance.conforms:
        first = conformance.violations[0]
        raise SerializationError(
            f"model does not conform: {first.message}", code="NonConformant"
        )

    root = ET.Element(
        "xmi:XMI",
        {
            "xmi:version": "2.0",
            "xmlns:xmi": _XMI_NS,
            "xmlns:xsi": _XSI_NS,
            "metamodel": metamodel.name,
        },
    )

    def emit(parent: ET.Element, object_id: str, tag: str, typed: bool) -> None:
        obj = model.object(object_id)
        element = ET.SubElement(parent, tag)
        if typed:
            element.set("xsi:type", obj.class_name)
        element.set("xmi:id", object_id)
        for attr in metamodel.flattened_attributes(obj.class_name):
            element.set(attr.name, _xml_value(obj.slots.get(attr.name)))
        for ref in metamodel.flattened_references(obj.class_name):
            targets = obj.slots.get(ref.name, [])
            if ref.containment:
                for child_id in targets:
                    emit(element, child_id, ref.name, typed=True)
            elif targets:
                element.set(ref.name, " ".join(targets))

    for object_id, obj in model.objects.items():
        if model.container_of(object_id) is None:
            emit(root, object_id, obj.class_name, typed=False)

    ET.indent(root)
    return '<?xml version="1.0" encoding="UTF-8"?>\n' + ET.tostring(
        root, encoding="unicode"
    ) + "\n"
