"""Human listening-test backend: sessions, submissions and scoring.

Each evaluator gets a blinded sample of clips from every named test set
(default 10 per set), listens, labels each clip genuine or fake, and
marks perceived fake regions. State is an append-only JSON-Lines event
log replayed at startup, so the raw human data stays auditable and a
restart loses nothing. Scoring runs the standard corpus metrics per
evaluator and macro-averages the per-evaluator values.
"""

from __future__ import annotations

import json
import random
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Mapping, Sequence

from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_RESOLUTIONS,
    EvalReport,
    evaluate_corpus,
    format_metric_rows,
)
from .types import (
    ClipLabel,
    ClipPrediction,
    ClipRecord,
    Region,
    ValidationError,
    regions_from_pairs,
    validate_regions,
)

DEFAULT_CLIPS_PER_SET = 10

#: Report caveat: the interface allows replaying clips and viewing the
#: waveform, which may make evaluators stronger than pure listening.
REPLAY_NOTE = "evaluators could replay clips and see waveforms"
MACRO_AVERAGE_NOTE = "averaged metrics are arithmetic means of per-evaluator values"


@dataclass(frozen=True)
class Submission:
    label: ClipLabel
    regions: tuple[Region, ...]
    submitted_at: str


@dataclass
class EvaluatorSession:
    evaluator_id: str
    assigned_clips: tuple[str, ...]
    submissions: dict[str, Submission] = field(default_factory=dict)

    @property
    def missing_clips(self) -> tuple[str, ...]:
        return tuple(c for c in self.assigned_clips if c not in self.submissions)

    @property
    def complete(self) -> bool:
        return not self.missing_clips


def _derive_rng(rng_seed: int, evaluator_id: str) -> random.Random:
    return random.Random(f"{rng_seed}|{evaluator_id}")


def create_session(
    evaluator_id: str,
    manifests: Sequence[tuple[str, Sequence[ClipRecord]]],
    clips_per_set: int = DEFAULT_CLIPS_PER_SET,
    rng_seed: int = 0,
) -> EvaluatorSession:
    """Sample clips_per_set clips from each named set and shuffle the order.

    Deterministic for a given (rng_seed, evaluator_id). The session only
    carries clip ids; ground truth stays server-side.
    """
    if not evaluator_id:
        raise ValidationError("evaluator_id must be non-empty")
    rng = _derive_rng(rng_seed, evaluator_id)
    assigned: list[str] = []
    for set_name, records in manifests:
        if len(records) < clips_per_set:
            raise ValidationError(
                f"set {set_name!r} has {len(records)} clips, needs >= {clips_per_set}"
            )
        assigned.extend(rng.sample([r.clip_id for r in records], clips_per_set))
    rng.shuffle(assigned)
    return EvaluatorSession(evaluator_id=evaluator_id, assigned_clips=tuple(assigned))


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class AnnotationStore:
    """Durable session/submission state over an append-only event log.

    Submissions are serialized through one writer lock; the latest
    submission per clip wins while the log keeps every event for audit.
    """

    def __init__(self, log_path: str | Path):
        self.log_path = Path(log_path)
        self._lock = threading.Lock()
        self._sessions: dict[str, EvaluatorSession] = {}
        self.log_path.parent.mkdir(parents=True, exist_ok=True)
        if self.log_path.exists():
            self._replay()

    def _replay(self) -> None:
        with open(self.log_path, "r", encoding="utf-8") as fp:
            for lineno, line in enumerate(fp, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValidationError(
                        f"{self.log_path}, line {lineno}: corrupt event log ({exc.msg})"
                    ) from exc
                self._apply(event)

    def _apply(self, event: dict) -> None:
        kind = event.get("event")
        if kind == "session":
            session = EvaluatorSession(
                evaluator_id=event["evaluator_id"],
                assigned_clips=tuple(event["assigned"]),
            )
            self._sessions[session.evaluator_id] = session
        elif kind == "submit":
            session = self._sessions[event["evaluator_id"]]
            session.submissions[event["clip_id"]] = Submission(
                label=ClipLabel(event["label"]),
                regions=regions_from_pairs(event["regions"]),
                submitted_at=event["ts"],
            )
        else:
            raise ValidationError(f"unknown event type {kind!r} in {self.log_path}")

    def _append(self, event: dict) -> None:
        with open(self.log_path, "a", encoding="utf-8") as fp:
            fp.write(json.dumps(event) + "\n")
            fp.flush()

    def get_session(self, evaluator_id: str) -> EvaluatorSession | None:
        with self._lock:
            return self._sessions.get(evaluator_id)

    def sessions(self) -> list[EvaluatorSession]:
        with self._lock:
            return list(self._sessions.values())

    def open_session(
        self,
        evaluator_id: str,
        manifests: Sequence[tuple[str, Sequence[ClipRecord]]],
        clips_per_set: int = DEFAULT_CLIPS_PER_SET,
        rng_seed: int = 0,
    ) -> EvaluatorSession:
        """Return the existing session or create, persist and return a new one."""
        with self._lock:
            existing = self._sessions.get(evaluator_id)
            if existing is not None:
                return existing
            session = create_session(evaluator_id, manifests, clips_per_set, rng_seed)
            self._append(
                {
                    "event": "session",
                    "evaluator_id": session.evaluator_id,
                    "assigned": list(session.assigned_clips),
                    "ts": _now(),
                }
            )
            self._sessions[evaluator_id] = session
            return session

    def submit(
        self,
        evaluator_id: str,
        clip_id: str,
        label: ClipLabel,
        regions: Sequence[Region],
        clip_duration: float,
    ) -> bool:
        """Record one annotation; returns True when replacing a prior one."""
        regions = validate_regions(
            tuple(sorted(regions, key=lambda r: r.onset)), clip_duration
        )
        if label is ClipLabel.GENUINE and regions:
            raise ValidationError("a clip judged genuine cannot carry fake regions")
        with self._lock:
            session = self._sessions.get(evaluator_id)
            if session is None:
                raise ValidationError(f"no session for evaluator {evaluator_id!r}")
            if clip_id not in session.assigned_clips:
                raise ValidationError(
                    f"clip {clip_id!r} is not assigned to evaluator {evaluator_id!r}"
                )
            resubmission = clip_id in session.submissions
            ts = _now()
            self._append(
                {
                    "event": "submit",
                    "evaluator_id": evaluator_id,
                    "clip_id": clip_id,
                    "label": label.value,
                    "regions": [r.as_pair() for r in regions],
                    "ts": ts,
                }
            )
            session.submissions[clip_id] = Submission(label, tuple(regions), ts)
            return resubmission

    def audit_log(self) -> list[dict]:
        """Every event ever appended, in order."""
        if not self.log_path.exists():
            return []
        events = []
        with open(self.log_path, "r", encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if line:
                    events.append(json.loads(line))
        return events


@dataclass(frozen=True)
class EvaluatorResult:
    evaluator_id: str
    report: EvalReport
    submitted: int
    assigned: int
    missing: tuple[str, ...]


@dataclass(frozen=True)
class SubjectiveReport:
    evaluators: tuple[EvaluatorResult, ...]
    average: dict | None
    notes: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "evaluators": [
                {
                    "evaluator_id": e.evaluator_id,
                    "submitted": e.submitted,
                    "assigned": e.assigned,
                    "missing": list(e.missing),
                    "report": e.report.to_dict(),
                }
                for e in self.evaluators
            ],
            "average": self.average,
            "notes": list(self.notes),
        }


def average_reports(reports: Sequence[EvalReport]) -> dict | None:
    """Arithmetic mean of each metric over evaluators (macro average)."""
    if not reports:
        return None
    n = len(reports)
    resolutions = [r.resolution for r in reports[0].resolutions]
    avg = {
        "acc_identify": sum(r.acc_identify for r in reports) / n,
        "alpha": reports[0].alpha,
        "resolutions": [],
    }
    for res in resolutions:
        blocks = [r.resolution(res) for r in reports]
        avg["resolutions"].append(
            {
                "resolution": res,
                "precision": sum(b.precision for b in blocks) / n,
                "recall": sum(b.recall for b in blocks) / n,
                "f1": sum(b.f1 for b in blocks) / n,
                "score": sum(b.score for b in blocks) / n,
            }
        )
    return avg


def subjective_table(report: SubjectiveReport) -> str:
    """Text table with one row per evaluator plus the macro-average row."""
    if not report.evaluators:
        return "(empty report)\n"
    resolutions = [r.resolution for r in report.evaluators[0].report.resolutions]
    rows: list[tuple[str, float, list[tuple[float, float]]]] = [
        (
            e.evaluator_id,
            e.report.acc_identify,
            [(b.f1, b.score) for b in e.report.resolutions],
        )
        for e in report.evaluators
    ]
    if report.average is not None:
        rows.append(
            (
                "average",
                report.average["acc_identify"],
                [(b["f1"], b["score"]) for b in report.average["resolutions"]],
            )
        )
    return format_metric_rows(rows, resolutions)


def score_sessions(
    sessions: Sequence[EvaluatorSession],
    references: Mapping[str, ClipRecord],
    alpha: float = DEFAULT_ALPHA,
    resolutions: Sequence[float] = DEFAULT_RESOLUTIONS,
    allow_partial: bool = False,
) -> SubjectiveReport:
    """Score each evaluator against ground truth, then macro-average.

    With allow_partial, unsubmitted clips are dropped from that
    evaluator's corpus and reported as missing; otherwise an incomplete
    session is an error.
    """
    results = []
    for session in sessions:
        missing = session.missing_clips
        if missing and not allow_partial:
            raise ValidationError(
                f"evaluator {session.evaluator_id!r} has not submitted: {', '.join(missing)}"
            )
        scored_ids = [c for c in session.assigned_clips if c in session.submissions]
        if not scored_ids:
            continue
        unknown = [c for c in scored_ids if c not in references]
        if unknown:
            raise ValidationError(
                f"evaluator {session.evaluator_id!r}: no reference for {', '.join(unknown)}"
            )
        refs = [references[c] for c in scored_ids]
        preds = [
            ClipPrediction(
                clip_id=c,
                label=session.submissions[c].label,
                regions=session.submissions[c].regions,
            )
            for c in scored_ids
        ]
        report = evaluate_corpus(refs, preds, resolutions, alpha, extra_notes=(REPLAY_NOTE,))
        results.append(
            EvaluatorResult(
                evaluator_id=session.evaluator_id,
                report=report,
                submitted=len(scored_ids),
                assigned=len(session.assigned_clips),
                missing=missing,
            )
        )
    return SubjectiveReport(
        evaluators=tuple(results),
        average=average_reports([r.report for r in results]),
        notes=(MACRO_AVERAGE_NOTE, REPLAY_NOTE),
    )
