"""Pydantic request/response models for the assessment service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, model_validator


class ModelCreateRequest(BaseModel):
    rubric: dict[str, Any]
    params: dict[str, Any]


class ModelCreated(BaseModel):
    model_id: str


class ModelInfo(BaseModel):
    model_id: str
    provenance: str
    rubric: dict[str, Any]
    params: dict[str, Any]
    skills: list[str]
    tasks: list[str]


class SessionCreateRequest(BaseModel):
    model_id: str


class SessionCreated(BaseModel):
    session_id: str
    model_id: str


class ObservationRequest(BaseModel):
    """One recorded behaviour: an achieved level or an explicit 0/1 outcome."""

    task: str
    kind: Literal["achieved", "obs"]
    r: int
    c: int
    value: int | None = None

    @model_validator(mode="after")
    def _check_value(self):
        if self.kind == "obs":
            if self.value not in (0, 1):
                raise ValueError("kind 'obs' requires value 0 or 1")
        elif self.value is not None:
            raise ValueError("kind 'achieved' takes no value")
        return self


class PosteriorReportModel(BaseModel):
    posteriors: dict[str, float]
    evidence_digest: str
    log_likelihood: float


class PosteriorsWithScore(PosteriorReportModel):
    probabilistic_score: float


class TaskSuggestion(BaseModel):
    task: str
    expected_gain_bits: float


class SessionEvent(BaseModel):
    ts: str
    type: Literal["observation", "undo"]
    observation: ObservationRequest | None = None


class SessionLog(BaseModel):
    session_id: str
    model_id: str
    status: Literal["active", "closed"]
    events: list[SessionEvent]


class ConflictDetail(BaseModel):
    """409 payload: which cells clash, or which evidence is impossible."""

    message: str
    conflicts: list[dict[str, Any]] = []
