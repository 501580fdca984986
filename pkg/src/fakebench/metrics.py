"""Composite benchmark metric: clip accuracy, segment F1 and weighted score.

The timeline of each clip is partitioned into fixed-length segments of
``resolution`` seconds (the final segment may be shorter). A segment is
active when a fake region overlaps it by any positive amount. Counts are
micro-accumulated across the corpus before one precision/recall/F1 is
computed, separately per resolution. The composite score is

    score = alpha * acc_identify + (1 - alpha) * f1_segment

with alpha weighting clip-level identification accuracy against
localization F1 (default 0.3, favouring localization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .types import ClipLabel, ClipPrediction, ClipRecord, Region, ValidationError, INDEX_EPS

DEFAULT_ALPHA = 0.3
DEFAULT_RESOLUTIONS = (1.0, 0.02)

#: Genuine clips contribute all-inactive reference vectors to the segment
#: tallies (can add FP/TN, never TP/FN). Flagged in every report.
GENUINE_SEGMENTS_NOTE = (
    "segment tallies include genuine clips as all-inactive references"
)


def segment_count(duration: float, resolution: float) -> int:
    """Number of segments covering ``duration`` seconds: ceil(duration/resolution)."""
    if resolution <= 0:
        raise ValidationError(f"resolution must be positive, got {resolution}")
    if duration <= 0:
        raise ValidationError(f"duration must be positive, got {duration}")
    return int(math.ceil(duration / resolution - INDEX_EPS))


def segment_activity(
    regions: Sequence[Region], duration: float, resolution: float
) -> np.ndarray:
    """Boolean activity vector: segment k is active iff some region overlaps
    [k*resolution, (k+1)*resolution) with strictly positive length."""
    n = segment_count(duration, resolution)
    active = np.zeros(n, dtype=bool)
    if not regions:
        return active
    k = np.arange(n, dtype=np.float64)
    left = k * resolution
    right = (k + 1.0) * resolution
    for region in regions:
        active |= (region.onset < right) & (region.offset > left)
    return active


@dataclass
class SegmentCounts:
    """Corpus-level segment tallies at one resolution."""

    resolution: float
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def merge(self, other: "SegmentCounts") -> "SegmentCounts":
        if other.resolution != self.resolution:
            raise ValidationError("cannot merge counts at different resolutions")
        return SegmentCounts(
            resolution=self.resolution,
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "tp": self.tp,
            "fp": self.fp,
            "fn": self.fn,
            "tn": self.tn,
        }


@dataclass
class IdentifyCounts:
    """Clip-level confusion counts; the fake class is positive."""

    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def to_dict(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}


def accumulate_segment_counts(
    ref: np.ndarray, sys: np.ndarray, counts: SegmentCounts, clip_id: str = "?"
) -> SegmentCounts:
    """Add one clip's per-segment confusion to the running tallies."""
    ref = np.asarray(ref, dtype=bool)
    sys = np.asarray(sys, dtype=bool)
    if ref.shape != sys.shape:
        raise ValidationError(
            f"clip {clip_id}: reference has {ref.size} segments but system has {sys.size}"
        )
    return SegmentCounts(
        resolution=counts.resolution,
        tp=counts.tp + int(np.sum(ref & sys)),
        fp=counts.fp + int(np.sum(~ref & sys)),
        fn=counts.fn + int(np.sum(ref & ~sys)),
        tn=counts.tn + int(np.sum(~ref & ~sys)),
    )


def segment_f1(counts: SegmentCounts) -> tuple[float, float, float]:
    """(precision, recall, F1) from segment tallies.

    F1 is the harmonic mean of precision and recall; with zero true
    positives all three are defined as 0.
    """
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    if counts.tp == 0:
        return precision, recall, 0.0
    return precision, recall, 2.0 / (1.0 / precision + 1.0 / recall)


def identify_accuracy(counts: IdentifyCounts) -> float:
    """(tp + tn) / total over clip verdicts."""
    if counts.total == 0:
        raise ValidationError("cannot compute identification accuracy of an empty corpus")
    return (counts.tp + counts.tn) / counts.total


def composite_score(acc: float, f1: float, alpha: float = DEFAULT_ALPHA) -> float:
    """Weighted sum alpha*acc + (1-alpha)*f1; all inputs must lie in [0, 1]."""
    for name, value in (("acc", acc), ("f1", f1), ("alpha", alpha)):
        if not (0.0 <= value <= 1.0):
            raise ValidationError(f"{name} must lie in [0, 1], got {value}")
    return alpha * acc + (1.0 - alpha) * f1


@dataclass(frozen=True)
class ResolutionResult:
    """Segment metrics and composite score at one temporal resolution."""

    resolution: float
    counts: SegmentCounts
    precision: float
    recall: float
    f1: float
    score: float

    def to_dict(self) -> dict:
        return {
            "resolution": self.resolution,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "score": self.score,
            "counts": self.counts.to_dict(),
        }


@dataclass(frozen=True)
class EvalReport:
    """Full evaluation: clip accuracy plus per-resolution segment metrics."""

    acc_identify: float
    alpha: float
    identify: IdentifyCounts
    resolutions: tuple[ResolutionResult, ...]
    notes: tuple[str, ...] = ()

    def resolution(self, resolution: float) -> ResolutionResult:
        for res in self.resolutions:
            if res.resolution == resolution:
                return res
        raise KeyError(f"no results at resolution {resolution}")

    def to_dict(self) -> dict:
        return {
            "acc_identify": self.acc_identify,
            "alpha": self.alpha,
            "identify_counts": self.identify.to_dict(),
            "resolutions": [r.to_dict() for r in self.resolutions],
            "notes": list(self.notes),
        }


def _check_prediction_coverage(
    refs: Sequence[ClipRecord], preds: Sequence[ClipPrediction]
) -> Mapping[str, ClipPrediction]:
    by_id: dict[str, ClipPrediction] = {}
    duplicates = []
    for pred in preds:
        if pred.clip_id in by_id:
            duplicates.append(pred.clip_id)
        by_id[pred.clip_id] = pred
    ref_ids = {r.clip_id for r in refs}
    missing = sorted(ref_ids - by_id.keys())
    unknown = sorted(by_id.keys() - ref_ids)
    problems = []
    if missing:
        problems.append(f"missing predictions for: {', '.join(missing)}")
    if duplicates:
        problems.append(f"duplicate predictions for: {', '.join(sorted(set(duplicates)))}")
    if unknown:
        problems.append(f"predictions for unknown clips: {', '.join(unknown)}")
    if problems:
        raise ValidationError("; ".join(problems))
    return by_id


def evaluate_corpus(
    refs: Sequence[ClipRecord],
    preds: Sequence[ClipPrediction],
    resolutions: Sequence[float] = DEFAULT_RESOLUTIONS,
    alpha: float = DEFAULT_ALPHA,
    extra_notes: Sequence[str] = (),
) -> EvalReport:
    """Score a corpus of predictions against reference records.

    Every reference clip must have exactly one prediction. Segment counts
    are micro-accumulated across clips per resolution.
    """
    if not refs:
        raise ValidationError("cannot evaluate an empty corpus")
    by_id = _check_prediction_coverage(refs, preds)

    identify = IdentifyCounts()
    for ref in refs:
        pred_fake = by_id[ref.clip_id].label is ClipLabel.FAKE
        if ref.is_fake and pred_fake:
            identify.tp += 1
        elif ref.is_fake:
            identify.fn += 1
        elif pred_fake:
            identify.fp += 1
        else:
            identify.tn += 1
    acc = identify_accuracy(identify)

    results = []
    for resolution in resolutions:
        counts = SegmentCounts(resolution=resolution)
        for ref in refs:
            pred = by_id[ref.clip_id]
            ref_vec = segment_activity(ref.fake_regions, ref.duration, resolution)
            sys_vec = segment_activity(pred.regions, ref.duration, resolution)
            counts = accumulate_segment_counts(ref_vec, sys_vec, counts, ref.clip_id)
        precision, recall, f1 = segment_f1(counts)
        results.append(
            ResolutionResult(
                resolution=resolution,
                counts=counts,
                precision=precision,
                recall=recall,
                f1=f1,
                score=composite_score(acc, f1, alpha),
            )
        )

    notes = (GENUINE_SEGMENTS_NOTE, *extra_notes)
    return EvalReport(
        acc_identify=acc,
        alpha=alpha,
        identify=identify,
        resolutions=tuple(results),
        notes=notes,
    )


def _resolution_heading(resolution: float) -> str:
    if resolution >= 1.0:
        return f"{resolution:g}-Second"
    return f"{resolution * 1000:g}-Millisecond"


def format_metric_rows(
    rows: Sequence[tuple[str, float, Sequence[tuple[float, float]]]],
    resolutions: Sequence[float],
) -> str:
    """Aligned text table from plain values.

    Each row is (name, acc_identify, [(f1, score) per resolution]).
    """
    if not rows:
        return "(empty report)\n"
    name_width = max(len("System"), *(len(name) for name, _, _ in rows)) + 2
    header1 = " " * name_width + f"{'Acc_identify':>14}"
    header2 = " " * name_width + " " * 14
    for res in resolutions:
        block = f"{_resolution_heading(res)} Resolution"
        header1 += f" | {block:^21}"
        header2 += f" | {'F1_segment':>10} {'Score':>10}"
    lines = [header1, header2, "-" * len(header2)]
    for name, acc, blocks in rows:
        line = f"{name:<{name_width}}{acc:>14.3f}"
        for f1, score in blocks:
            line += f" | {f1:>10.3f} {score:>10.3f}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def format_report_table(rows: Sequence[tuple[str, EvalReport]]) -> str:
    """Aligned text table: one row per system, F1/Score per resolution."""
    if not rows:
        return "(empty report)\n"
    resolutions = [r.resolution for r in rows[0][1].resolutions]
    simple = [
        (
            name,
            report.acc_identify,
            [(report.resolution(res).f1, report.resolution(res).score) for res in resolutions],
        )
        for name, report in rows
    ]
    return format_metric_rows(simple, resolutions)
