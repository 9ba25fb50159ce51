"""Scripted session replay: the headless harness driving the engine.

A session script is JSONL, one event per line, seq contiguous from 1.
Replay applies every event in order and records a trace line per event
with all firings, action results, deltas, and violations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .engine import Engine, EventOutcome, SessionEvent
from .errors import PosynError
from .project import ProjectDocument


def parse_script(text: str) -> list[SessionEvent]:
    """Parse a JSONL session script, enforcing contiguous seq from 1."""
    events: list[SessionEvent] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            data = json.loads(line)
        except ValueError as err:
            raise PosynError(
                f"script line {line_no}: not valid JSON: {err}", code="BadScript"
            ) from err
        try:
            event = SessionEvent.from_dict(data)
        except (PosynError, ValueError, TypeError) as err:
            raise PosynError(f"script line {line_no}: {err}", code="BadScript") from err
        expected = len(events) + 1
        if event.seq != expected:
            raise PosynError(
                f"script line {line_no}: seq {event.seq}, expected {expected}",
                code="BadScript",
            )
        events.append(event)
    return events


@dataclass
class ReplayResult:
    engine: Engine
    outcomes: list[EventOutcome] = field(default_factory=list)

    @property
    def trace(self) -> list[dict]:
        return [outcome.to_dict() for outcome in self.outcomes]

    @property
    def violation_count(self) -> int:
        return sum(len(outcome.all_violations()) for outcome in self.outcomes)

    def trace_text(self) -> str:
        return "".join(json.dumps(row, sort_keys=True) + "\n" for row in self.trace)


def replay(doc: ProjectDocument, events: list[SessionEvent]) -> ReplayResult:
    """Apply the events in order on a fresh engine over the document."""
    engine = Engine(doc.model, doc.views, doc.layouts, doc.scales)
    result = ReplayResult(engine=engine)
    for event in events:
        result.outcomes.append(engine.apply_event(event))
    return result


def final_document(doc: ProjectDocument, engine: Engine) -> ProjectDocument:
    """The document describing the engine's state after a session."""
    return ProjectDocument(
        metamodel=doc.metamodel,
        model=engine.model,
        views=engine.views,
        layouts=engine.layouts,
        scales=engine.scales,
    )
