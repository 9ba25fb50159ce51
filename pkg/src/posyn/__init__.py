"""posyn: a positional modeling-editor engine.

Typed object models, layered graphical views, event-triggered rules, and
constraint projection, kept bidirectionally consistent and replayable from
scripted sessions.
"""

from __future__ import annotations

from .constraints import (
    Constraint,
    ConstraintError,
    LinearScale,
    LogScale,
    NodeLayout,
    PowerScale,
    Scale,
    ScaleDomainError,
    enforce_all,
    project,
    scale_from_dict,
)
from .engine import CASCADE_LIMIT, Engine, EventOutcome, SessionEvent
from .errors import (
    EvalError,
    ExprSyntaxError,
    ModelError,
    PosynError,
    ValidationFailedError,
    Violation,
)
from .expr import evaluate, parse, to_source
from .model import MetaModel, Model, define_metamodel
from .project import ProjectDocument, export_xmi, load_project, save_project
from .session import final_document, parse_script, replay
from .views import (
    ConstraintAction,
    ExportAction,
    GenericAction,
    RuleTriple,
    Trigger,
    View,
    ViewRule,
    combine_views,
    render_template,
    resolve_style,
)

__version__ = "0.1.0"

__all__ = [
    "CASCADE_LIMIT",
    "Constraint",
    "ConstraintAction",
    "ConstraintError",
    "Engine",
    "EvalError",
    "EventOutcome",
    "ExportAction",
    "ExprSyntaxError",
    "GenericAction",
    "LinearScale",
    "LogScale",
    "MetaModel",
    "Model",
    "ModelError",
    "NodeLayout",
    "PosynError",
    "PowerScale",
    "ProjectDocument",
    "RuleTriple",
    "Scale",
    "ScaleDomainError",
    "SessionEvent",
    "Trigger",
    "ValidationFailedError",
    "View",
    "ViewRule",
    "Violation",
    "combine_views",
    "define_metamodel",
    "enforce_all",
    "evaluate",
    "export_xmi",
    "final_document",
    "load_project",
    "parse",
    "parse_script",
    "project",
    "render_template",
    "replay",
    "resolve_style",
    "save_project",
    "scale_from_dict",
    "to_source",
    "__version__",
]
