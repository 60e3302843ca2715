"""Event-sourced assessment sessions.

A session is an append-only log of observation/undo events, one JSON-lines
file per session, so a crash never loses assessor input. Evidence and
posteriors are always recomputed from the log: an undo event pops the most
recent surviving observation, and replaying any log into a fresh session
reproduces the same reports. Per-session mutation is serialized by a lock;
reads work on a snapshot of the event list.
"""

from __future__ import annotations

import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..compiler import (
    AchievedLevel,
    EvidenceSet,
    ExplicitObservations,
    NoisyOrNetwork,
    ParameterSpec,
    PupilRecord,
    encode,
)
from ..errors import ValidationError
from ..io import RubricDocument
from ..rubric import LevelCoord


@dataclass(frozen=True)
class Event:
    ts: str
    type: str  # "observation" | "undo"
    observation: dict | None = None


@dataclass
class CompiledModel:
    model_id: str
    doc: RubricDocument
    params: ParameterSpec
    network: NoisyOrNetwork


@dataclass
class Session:
    id: str
    model_id: str
    path: Path
    events: list[Event] = field(default_factory=list)
    status: str = "active"
    lock: threading.Lock = field(default_factory=threading.Lock)

    def snapshot(self) -> list[Event]:
        with self.lock:
            return list(self.events)


def observation_delta(model: CompiledModel, obs: dict) -> EvidenceSet:
    """Evidence contributed by a single observation dict."""
    task = obs["task"]
    coord = LevelCoord(int(obs["r"]), int(obs["c"]))
    model.doc.rubric.require_coord(coord)
    if obs["kind"] == "achieved":
        entry = AchievedLevel(coord)
    elif obs["kind"] == "obs":
        entry = ExplicitObservations(((coord, int(obs["value"])),))
    else:
        raise ValidationError(f"unknown observation kind {obs['kind']!r}")
    record = PupilRecord(pupil_id="session", tasks={task: entry})
    return encode(model.doc.rubric, model.network, record)


def surviving_observations(events: list[Event]) -> list[dict]:
    """Observations that remain after undo events pop the stack."""
    stack: list[dict] = []
    for event in events:
        if event.type == "observation":
            stack.append(event.observation or {})
        elif event.type == "undo":
            if not stack:
                raise ValidationError("undo event with no observation to undo")
            stack.pop()
        else:
            raise ValidationError(f"unknown event type {event.type!r}")
    return stack


def evidence_from_events(model: CompiledModel, events: list[Event]) -> EvidenceSet:
    evidence = EvidenceSet.empty()
    for obs in surviving_observations(events):
        evidence = evidence.merged(observation_delta(model, obs))
    return evidence


class SessionStore:
    """In-memory session registry backed by one JSON-lines file each."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def create(self, model_id: str) -> Session:
        session_id = uuid.uuid4().hex
        path = self.directory / f"{session_id}.jsonl"
        path.touch()
        session = Session(id=session_id, model_id=model_id, path=path)
        with self._lock:
            self._sessions[session_id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        with self._lock:
            return self._sessions.get(session_id)

    def append(self, session: Session, event: Event) -> None:
        """Append under the session lock, already held by the caller."""
        line = json.dumps(
            {"ts": event.ts, "type": event.type, "observation": event.observation}
        )
        with open(session.path, "a") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())
        session.events.append(event)

    @staticmethod
    def read_log(path: str | Path) -> list[Event]:
        events = []
        for line in Path(path).read_text().splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            events.append(
                Event(ts=data["ts"], type=data["type"], observation=data.get("observation"))
            )
        return events

    def replay(self, path: str | Path, model_id: str) -> Session:
        """Rebuild a session from an existing event-log file."""
        events = self.read_log(path)
        surviving_observations(events)  # validates the log shape eagerly
        session_id = uuid.uuid4().hex
        new_path = self.directory / f"{session_id}.jsonl"
        new_path.write_text(
            "".join(
                json.dumps({"ts": e.ts, "type": e.type, "observation": e.observation}) + "\n"
                for e in events
            )
        )
        session = Session(id=session_id, model_id=model_id, path=new_path, events=events)
        with self._lock:
            self._sessions[session.id] = session
        return session


def now_iso() -> str:
    return datetime.now(timezone.utc).isoformat()
