"""Ground -> mask -> regenerate -> replace manipulation pipeline.

For each genuine clip: the grounding client proposes caption-correlated
segments, one eligible segment is chosen at random under the configured
duration limits, the span is zero-masked, the inpainting client
regenerates it (optionally super-resolved), and the regenerated span is
spliced back over the mask. The emitted record is annotated with exactly
the selected region, so outside that region the output audio is
bit-identical to the source whenever crossfade is 0.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .audio import read_waveform, resample_to_length, write_waveform
from .clients import (
    ClientBundle,
    ClientError,
    GroundedSegment,
    sample_index,
)
from .manifest import resolve_audio_path, write_manifest
from .types import ClipLabel, ClipRecord, Region, ValidationError, Waveform


@dataclass(frozen=True)
class PipelineConfig:
    """Duration limits, client selection and randomness for one build."""

    min_len: float = 1.0
    max_len: float | None = 4.0  # None = unlimited
    inpainter_id: str = "default"
    use_super_resolution: bool = True
    rng_seed: int = 0
    crossfade: float = 0.0
    max_retries: int = 2

    def __post_init__(self) -> None:
        if self.min_len < 0:
            raise ValidationError("min_len must be >= 0")
        if self.max_len is not None and self.max_len < self.min_len:
            raise ValidationError("max_len must be >= min_len")
        if self.crossfade < 0:
            raise ValidationError("crossfade must be >= 0")

    def eligible(self, segment: GroundedSegment) -> bool:
        length = segment.region.duration
        if length < self.min_len:
            return False
        return self.max_len is None or length <= self.max_len

    def to_dict(self) -> dict:
        return {
            "min_len": self.min_len,
            "max_len": self.max_len,
            "inpainter_id": self.inpainter_id,
            "use_super_resolution": self.use_super_resolution,
            "rng_seed": self.rng_seed,
            "crossfade": self.crossfade,
            "max_retries": self.max_retries,
        }


#: Dataset configurations: the training distribution keeps manipulations
#: between 1 and 4 seconds; the hard and zero-shot sets lift the limit,
#: and the zero-shot set swaps in a different inpainting model without
#: super-resolution.
PRESETS: dict[str, PipelineConfig] = {
    "train": PipelineConfig(min_len=1.0, max_len=4.0),
    "test-easy": PipelineConfig(min_len=1.0, max_len=4.0),
    "test-hard": PipelineConfig(min_len=0.0, max_len=None),
    "test-zeroshot": PipelineConfig(
        min_len=0.0, max_len=None, inpainter_id="alternate", use_super_resolution=False
    ),
}


class PipelineStageError(Exception):
    """A pipeline stage failed for one clip; retryable at the clip level."""

    def __init__(self, clip_id: str, stage: str, cause: Exception):
        super().__init__(f"clip {clip_id}: {stage} failed: {cause}")
        self.clip_id = clip_id
        self.stage = stage
        self.cause = cause


def select_target_segment(
    segments: Sequence[GroundedSegment],
    config: PipelineConfig,
    rng: random.Random,
) -> GroundedSegment | None:
    """Uniform random choice among duration-eligible segments; None if empty."""
    eligible = [seg for seg in segments if config.eligible(seg)]
    if not eligible:
        return None
    return eligible[rng.randrange(len(eligible))]


def mask_audio(waveform: Waveform, region: Region) -> Waveform:
    """Zero the samples covered by the region, leaving the rest untouched."""
    sr = waveform.sample_rate
    i0 = sample_index(region.onset, sr)
    i1 = sample_index(region.offset, sr)
    if not (0 <= i0 < i1 <= len(waveform)):
        raise ValidationError(
            f"region [{region.onset}, {region.offset}) is outside the {waveform.duration:.3f}s clip"
        )
    samples = np.array(waveform.samples)
    samples[i0:i1] = 0.0
    return Waveform(samples=samples, sample_rate=sr)


def splice(
    original: Waveform,
    regenerated: Waveform,
    region: Region,
    crossfade: float = 0.0,
) -> Waveform:
    """Replace the region of the original with the regenerated span.

    The regenerated waveform must already match the region length in
    samples at the original rate. With crossfade > 0, linear equal-gain
    ramps of that length run just inside each region boundary, so the
    samples at and outside the boundaries stay bit-identical to the
    original.
    """
    sr = original.sample_rate
    if regenerated.sample_rate != sr:
        raise ValidationError(
            f"sample rate mismatch: original {sr} Hz, regenerated {regenerated.sample_rate} Hz"
        )
    i0 = sample_index(region.onset, sr)
    i1 = sample_index(region.offset, sr)
    if not (0 <= i0 < i1 <= len(original)):
        raise ValidationError(f"region [{region.onset}, {region.offset}) is outside the clip")
    n = i1 - i0
    if len(regenerated) != n:
        raise ValidationError(
            f"regenerated span has {len(regenerated)} samples, region needs {n}"
        )
    out = np.array(original.samples)
    regen = np.asarray(regenerated.samples)
    out[i0:i1] = regen
    nf = min(int(round(crossfade * sr)), n // 2)
    if nf > 0:
        ramp = np.arange(nf, dtype=np.float64) / nf  # weight of regenerated signal
        head = np.asarray(original.samples[i0:i0 + nf])
        tail = np.asarray(original.samples[i1 - nf:i1])
        out[i0:i0 + nf] = (1.0 - ramp) * head + ramp * regen[:nf]
        # Mirror of the head ramp: regenerated weight decays to 0 at the
        # last in-region sample so the signal is continuous where the
        # original resumes at the offset boundary.
        out[i1 - nf:i1] = (1.0 - ramp[::-1]) * tail + ramp[::-1] * regen[n - nf:]
    return Waveform(samples=out, sample_rate=sr)


def _clip_rng(seed: int, clip_id: str) -> random.Random:
    # Per-clip stream so worker scheduling cannot change the draws.
    digest = hashlib.sha256(f"{seed}|{clip_id}".encode("utf-8")).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _crop_to_region(full: Waveform, region: Region) -> Waveform:
    sr = full.sample_rate
    i0 = sample_index(region.onset, sr)
    i1 = sample_index(region.offset, sr)
    i0 = max(0, min(i0, len(full)))
    i1 = max(i0 + 1, min(i1, len(full)))
    return Waveform(samples=np.asarray(full.samples[i0:i1]), sample_rate=sr)


def manipulate_clip(
    clip: ClipRecord,
    grounder,
    inpainter,
    super_resolver,
    config: PipelineConfig,
    audio_root: str | Path = ".",
    rng: random.Random | None = None,
    out_audio_path: str | None = None,
) -> tuple[ClipRecord, Waveform] | None:
    """Manipulate one genuine clip; returns None when no segment is eligible.

    Client failures raise PipelineStageError naming the clip and stage.
    """
    if clip.is_fake:
        raise ValidationError(f"clip {clip.clip_id}: pipeline input must be genuine")
    if not clip.caption.strip():
        raise ValidationError(f"clip {clip.clip_id}: caption required for grounding")
    rng = rng or _clip_rng(config.rng_seed, clip.clip_id)
    waveform = read_waveform(resolve_audio_path(clip, audio_root))

    try:
        segments = grounder.ground(clip.clip_id, clip.caption, waveform)
    except ClientError as exc:
        raise PipelineStageError(clip.clip_id, "ground", exc) from exc
    for seg in segments:
        if seg.region.offset > waveform.duration + 1e-6:
            raise PipelineStageError(
                clip.clip_id,
                "ground",
                ClientError(f"segment {seg.region} exceeds clip duration"),
            )

    chosen = select_target_segment(segments, config, rng)
    if chosen is None:
        return None
    region = chosen.region

    masked = mask_audio(waveform, region)
    try:
        regenerated = inpainter.inpaint(clip.clip_id, clip.caption, masked, region)
    except ClientError as exc:
        raise PipelineStageError(clip.clip_id, "inpaint", exc) from exc

    segment = _crop_to_region(regenerated, region)
    if super_resolver is not None:
        try:
            segment = super_resolver.upsample(clip.clip_id, segment)
        except ClientError as exc:
            raise PipelineStageError(clip.clip_id, "super_resolution", exc) from exc

    sr = waveform.sample_rate
    target_len = sample_index(region.offset, sr) - sample_index(region.onset, sr)
    resampled = Waveform(
        samples=np.clip(resample_to_length(np.asarray(segment.samples), target_len), -1.0, 1.0),
        sample_rate=sr,
    )
    fake_wave = splice(waveform, resampled, region, config.crossfade)

    fake_record = ClipRecord(
        clip_id=clip.clip_id,
        caption=clip.caption,
        duration=clip.duration,
        audio_path=out_audio_path or clip.audio_path,
        label=ClipLabel.FAKE,
        fake_regions=(region,),
    )
    return fake_record, fake_wave


@dataclass
class BuildStats:
    produced: int = 0
    filtered: int = 0
    failed: int = 0
    skipped: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "produced": self.produced,
            "filtered": self.filtered,
            "failed": self.failed,
            "skipped": self.skipped,
        }


def build_dataset(
    records: Sequence[ClipRecord],
    config: PipelineConfig,
    clients: ClientBundle,
    out_dir: str | Path,
    jobs: int = 4,
    audio_root: str | Path = ".",
    manifest_name: str = "manifest.jsonl",
) -> tuple[list[ClipRecord], BuildStats]:
    """Manipulate a genuine corpus into an annotated fake corpus.

    One fake clip per surviving genuine clip, written under
    out_dir/audio/. Per-clip failures are retried config.max_retries
    times, then recorded in the skip list without aborting the run.
    """
    fakes_present = [r.clip_id for r in records if r.is_fake]
    if fakes_present:
        raise ValidationError(
            f"input manifest must be all-genuine; fake clips: {', '.join(fakes_present)}"
        )
    out_dir = Path(out_dir)
    audio_dir = out_dir / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)

    stats = BuildStats()

    def process(clip: ClipRecord):
        rel_path = f"audio/{clip.clip_id}.wav"
        last_error: PipelineStageError | None = None
        for _ in range(config.max_retries + 1):
            try:
                result = manipulate_clip(
                    clip,
                    clients.grounder,
                    clients.inpainter,
                    clients.super_resolver if config.use_super_resolution else None,
                    config,
                    audio_root=audio_root,
                    out_audio_path=rel_path,
                )
                break
            except PipelineStageError as exc:
                last_error = exc
        else:
            return ("failed", clip.clip_id, last_error)
        if result is None:
            return ("filtered", clip.clip_id, None)
        record, waveform = result
        write_waveform(waveform, out_dir / rel_path)
        return ("produced", record, None)

    workers = max(1, jobs)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(process, records))

    produced: list[ClipRecord] = []
    for outcome, payload, error in outcomes:
        if outcome == "produced":
            produced.append(payload)
            stats.produced += 1
        elif outcome == "filtered":
            stats.filtered += 1
        else:
            stats.failed += 1
            stats.skipped.append(
                {
                    "clip_id": payload,
                    "stage": error.stage,
                    "error": str(error.cause),
                    "kind": type(error.cause).__name__,
                }
            )

    write_manifest(produced, out_dir / manifest_name)
    return produced, stats
