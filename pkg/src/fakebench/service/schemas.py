"""Request/response models for the HTTP service.

Session and task payloads are what human evaluators see, so they must
never carry ground truth: no ``label`` and no ``fake_regions`` field
exists on any model returned to the UI.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field

RegionPair = tuple[float, float]


class TaskPayload(BaseModel):
    """One blinded listening task."""

    clip_id: str
    caption: str
    duration: float
    audio_url: str
    submitted: bool


class SessionPayload(BaseModel):
    evaluator_id: str
    sets: list[str]
    clips_per_set: int
    tasks: list[TaskPayload]
    completed: int
    total: int


class SubmitRequest(BaseModel):
    clip_id: str
    label: Literal["genuine", "fake"]
    regions: list[RegionPair] = Field(default_factory=list)


class SubmitResponse(BaseModel):
    status: Literal["stored"] = "stored"
    clip_id: str
    replaced: bool
    remaining: int


class HealthPayload(BaseModel):
    status: Literal["ok"] = "ok"
    version: str
    sets: list[str]
    clips: int
    evaluators: int


class ReportPayload(BaseModel):
    evaluators: list[dict]
    average: dict | None
    notes: list[str]
    table: str


class ReferenceIn(BaseModel):
    """Manifest record as accepted over the wire; label may be implied."""

    clip_id: str
    caption: str = ""
    duration: float
    audio_path: str = ""
    label: Literal["genuine", "fake"] | None = None
    fake_regions: list[RegionPair] = Field(default_factory=list)


class PredictionIn(BaseModel):
    clip_id: str
    label: Literal["genuine", "fake"]
    fake_regions: list[RegionPair] = Field(default_factory=list)


class EvaluateRequest(BaseModel):
    references: list[ReferenceIn]
    predictions: list[PredictionIn]
    alpha: float = 0.3
    resolutions: list[float] = Field(default_factory=lambda: [1.0, 0.02])


class EvaluateResponse(BaseModel):
    report: dict
    table: str


class ScoresIn(BaseModel):
    clip_id: str
    frame_rate: float
    scores: list[float]


class DetectRequest(BaseModel):
    scores: list[ScoresIn]
    kernel: int = 5
    threshold: float = 0.5


class DetectResponse(BaseModel):
    predictions: list[PredictionIn]
