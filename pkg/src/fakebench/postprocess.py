"""Frame-score post-processing chain.

Per-frame genuineness probabilities are median filtered to remove
isolated noisy predictions, thresholded at 0.5 into frame labels
(1 = genuine, 0 = deepfake), turned into fake regions, and reduced to a
clip verdict: a clip is deepfake as soon as any frame is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import median_filter as _nd_median_filter

from .types import (
    ClipLabel,
    FrameScoreSequence,
    Region,
    ValidationError,
    INDEX_EPS,
)

DEFAULT_KERNEL = 5
DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True, eq=False)
class FrameLabelSequence:
    """Per-frame binary labels: 1 = genuine, 0 = deepfake."""

    clip_id: str
    frame_rate: float
    labels: np.ndarray

    def __post_init__(self) -> None:
        if self.frame_rate <= 0:
            raise ValidationError(
                f"clip {self.clip_id}: frame rate must be positive, got {self.frame_rate}"
            )
        arr = np.asarray(self.labels)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError(f"clip {self.clip_id}: labels must be a non-empty 1-D sequence")
        if not np.all((arr == 0) | (arr == 1)):
            raise ValidationError(f"clip {self.clip_id}: labels must be 0 or 1")
        arr = arr.astype(np.int8)
        arr.flags.writeable = False
        object.__setattr__(self, "labels", arr)
        object.__setattr__(self, "frame_rate", float(self.frame_rate))

    def __len__(self) -> int:
        return int(self.labels.size)


def median_filter(scores: FrameScoreSequence, kernel: int = DEFAULT_KERNEL) -> FrameScoreSequence:
    """Sliding-window median with edge replication; kernel must be odd."""
    if kernel < 1 or kernel % 2 == 0:
        raise ValidationError(f"median kernel must be odd and >= 1, got {kernel}")
    if kernel == 1:
        return scores
    # Pad explicitly so every window scipy evaluates is interior; scipy's
    # own boundary handling returns zeros once the kernel exceeds the
    # sequence length.
    half = kernel // 2
    padded = np.pad(scores.scores, half, mode="edge")
    filtered = _nd_median_filter(padded, size=kernel)[half : half + len(scores)]
    return FrameScoreSequence(scores.clip_id, scores.frame_rate, filtered)


def binarize(scores: FrameScoreSequence, threshold: float = DEFAULT_THRESHOLD) -> FrameLabelSequence:
    """Frame label 1 (genuine) iff score >= threshold, else 0 (deepfake)."""
    labels = (scores.scores >= threshold).astype(np.int8)
    return FrameLabelSequence(scores.clip_id, scores.frame_rate, labels)


def frames_to_regions(labels: FrameLabelSequence) -> tuple[Region, ...]:
    """Maximal runs of deepfake frames as half-open regions in seconds."""
    fake = labels.labels == 0
    if not fake.any():
        return ()
    padded = np.concatenate(([False], fake, [False]))
    edges = np.flatnonzero(np.diff(padded.astype(np.int8)))
    starts, ends = edges[0::2], edges[1::2]
    rate = labels.frame_rate
    return tuple(Region(start / rate, end / rate) for start, end in zip(starts, ends))


def rasterize(
    regions: tuple[Region, ...] | list[Region],
    frame_rate: float,
    n_frames: int,
    clip_id: str = "?",
) -> FrameLabelSequence:
    """Inverse of frames_to_regions: mark frames overlapped by any region as 0.

    Boundary indices are snapped within a tiny tolerance so regions whose
    boundaries were produced as frame_index/frame_rate rasterize exactly.
    """
    if n_frames <= 0:
        raise ValidationError(f"clip {clip_id}: frame count must be positive")
    labels = np.ones(n_frames, dtype=np.int8)
    for region in regions:
        start = int(math.floor(region.onset * frame_rate + INDEX_EPS))
        end = int(math.ceil(region.offset * frame_rate - INDEX_EPS))
        start = max(start, 0)
        end = min(end, n_frames)
        if end > start:
            labels[start:end] = 0
    return FrameLabelSequence(clip_id, frame_rate, labels)


def clip_decision(labels: FrameLabelSequence) -> ClipLabel:
    """Deepfake verdict as soon as any frame is labelled deepfake."""
    return ClipLabel.FAKE if bool(np.any(labels.labels == 0)) else ClipLabel.GENUINE


def detect(
    scores: FrameScoreSequence,
    kernel: int = DEFAULT_KERNEL,
    threshold: float = DEFAULT_THRESHOLD,
) -> tuple[ClipLabel, tuple[Region, ...]]:
    """Full chain: median filter, threshold, region extraction, clip verdict.

    The median runs on the probabilities, but the order is immaterial:
    thresholding is monotone, so it commutes with any odd-window median,
    and filtering the 0/1 labels instead would give identical output.
    """
    labels = binarize(median_filter(scores, kernel), threshold)
    return clip_decision(labels), frames_to_regions(labels)
