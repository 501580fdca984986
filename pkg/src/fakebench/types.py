"""Shared domain types for the benchmark toolkit.

All timestamps are absolute seconds within a clip. Regions are half-open
intervals [onset, offset) so that adjacent regions tile without double
counting. Every type is immutable after construction and safe to share
across worker threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

#: Snap tolerance (in frames/segments) for boundary index arithmetic.
#: Absorbs float rounding when boundary seconds were produced as index/rate.
INDEX_EPS = 1e-9


class ValidationError(ValueError):
    """A domain invariant was violated."""


class ManifestError(ValidationError):
    """A manifest or score file could not be parsed or validated."""


class UnsupportedFormatError(ValidationError):
    """Audio file is not mono 16-bit linear PCM."""


def frame_count(duration: float, rate: float) -> int:
    """Number of frames covering ``duration`` seconds at ``rate`` frames/s.

    Defined as ceil(duration * rate), with a small tolerance so a duration
    that is an exact multiple of the frame period does not gain a phantom
    frame through float rounding.
    """
    if rate <= 0:
        raise ValidationError(f"frame rate must be positive, got {rate}")
    return int(math.ceil(duration * rate - INDEX_EPS))


class ClipLabel(Enum):
    GENUINE = "genuine"
    FAKE = "fake"

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.value


@dataclass(frozen=True)
class Region:
    """Half-open time interval [onset, offset) in seconds."""

    onset: float
    offset: float

    def __post_init__(self) -> None:
        if not (self.onset >= 0):
            raise ValidationError(f"region onset must be >= 0, got {self.onset}")
        if not (self.offset > self.onset):
            raise ValidationError(
                f"region offset must exceed onset, got [{self.onset}, {self.offset})"
            )

    @property
    def duration(self) -> float:
        return self.offset - self.onset

    def overlaps(self, other: "Region") -> bool:
        return self.onset < other.offset and other.onset < self.offset

    def as_pair(self) -> list[float]:
        return [self.onset, self.offset]


def validate_regions(regions: Sequence[Region], duration: float | None = None) -> tuple[Region, ...]:
    """Check that regions are sorted, non-overlapping and inside the clip.

    Returns the regions as a tuple. ``duration`` of None skips the bounds
    check (used for detector predictions, whose last region may overshoot
    the clip end by up to one frame).
    """
    regs = tuple(regions)
    for prev, cur in zip(regs, regs[1:]):
        if cur.onset < prev.onset:
            raise ValidationError("regions must be sorted by onset")
        if prev.overlaps(cur):
            raise ValidationError(
                f"regions overlap: [{prev.onset}, {prev.offset}) and [{cur.onset}, {cur.offset})"
            )
    if duration is not None:
        for reg in regs:
            if reg.offset > duration + INDEX_EPS:
                raise ValidationError(
                    f"region [{reg.onset}, {reg.offset}) exceeds clip duration {duration}"
                )
    return regs


@dataclass(frozen=True)
class ClipRecord:
    """One audio clip: identity, caption, ground-truth label and fake regions."""

    clip_id: str
    caption: str
    duration: float
    audio_path: str
    label: ClipLabel
    fake_regions: tuple[Region, ...] = ()

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValidationError(f"clip {self.clip_id}: duration must be positive")
        regs = validate_regions(self.fake_regions, self.duration)
        object.__setattr__(self, "fake_regions", regs)
        expected = ClipLabel.FAKE if regs else ClipLabel.GENUINE
        if self.label is not expected:
            raise ValidationError(
                f"clip {self.clip_id}: label {self.label.value!r} inconsistent with "
                f"{len(regs)} fake region(s)"
            )

    @property
    def is_fake(self) -> bool:
        return self.label is ClipLabel.FAKE


@dataclass(frozen=True)
class ClipPrediction:
    """A detector's verdict for one clip: label plus located fake regions.

    Label and regions are scored independently (clip accuracy vs segment
    F1), so a prediction may legally carry a fake label with no regions.
    """

    clip_id: str
    label: ClipLabel
    regions: tuple[Region, ...] = ()

    def __post_init__(self) -> None:
        regs = validate_regions(tuple(sorted(self.regions, key=lambda r: r.onset)))
        object.__setattr__(self, "regions", regs)


@dataclass(frozen=True, eq=False)
class Waveform:
    """Mono audio signal with amplitudes in [-1, 1]."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        arr = np.asarray(self.samples, dtype=np.float64)
        if arr.ndim != 1:
            raise ValidationError("waveform must be mono (1-D)")
        if self.sample_rate <= 0:
            raise ValidationError(f"sample rate must be positive, got {self.sample_rate}")
        if arr.size and (np.min(arr) < -1.0 or np.max(arr) > 1.0):
            raise ValidationError("waveform amplitudes must lie in [-1, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True, eq=False)
class FrameScoreSequence:
    """Per-frame genuineness probabilities for one clip.

    ``scores[k]`` is the probability that frame k is genuine; frame k covers
    [k/frame_rate, (k+1)/frame_rate) seconds.
    """

    clip_id: str
    frame_rate: float
    scores: np.ndarray

    def __post_init__(self) -> None:
        if self.frame_rate <= 0:
            raise ValidationError(
                f"clip {self.clip_id}: frame rate must be positive, got {self.frame_rate}"
            )
        arr = np.asarray(self.scores, dtype=np.float64)
        if arr.ndim != 1:
            raise ValidationError(f"clip {self.clip_id}: scores must be 1-D")
        if arr.size == 0:
            raise ValidationError(f"clip {self.clip_id}: empty score sequence")
        if np.min(arr) < 0.0 or np.max(arr) > 1.0:
            raise ValidationError(f"clip {self.clip_id}: scores must lie in [0, 1]")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "scores", arr)
        object.__setattr__(self, "frame_rate", float(self.frame_rate))

    def __len__(self) -> int:
        return int(self.scores.size)


def regions_from_pairs(pairs: Iterable[Sequence[float]]) -> tuple[Region, ...]:
    """Build Region tuple from [onset, offset] pairs, validating shape."""
    regions = []
    for pair in pairs:
        if len(pair) != 2:
            raise ValidationError(f"region must be an [onset, offset] pair, got {pair!r}")
        regions.append(Region(float(pair[0]), float(pair[1])))
    return tuple(regions)
