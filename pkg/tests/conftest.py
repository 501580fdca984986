"""Shared fixtures: synthetic waveforms and on-disk toy corpora."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from fakebench.audio import write_waveform
from fakebench.types import ClipLabel, ClipRecord, Region, Waveform

SAMPLE_RATE = 16000


def make_tone(
    duration: float,
    freq: float = 440.0,
    amp: float = 0.5,
    sample_rate: int = SAMPLE_RATE,
) -> Waveform:
    t = np.arange(int(round(duration * sample_rate))) / sample_rate
    return Waveform(amp * np.sin(2 * np.pi * freq * t), sample_rate)


def make_noisy_tone(
    duration: float,
    freq: float = 440.0,
    seed: int = 0,
    sample_rate: int = SAMPLE_RATE,
) -> Waveform:
    rng = np.random.default_rng(seed)
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    x = 0.4 * np.sin(2 * np.pi * freq * t) + 0.05 * rng.standard_normal(n)
    return Waveform(np.clip(x, -1.0, 1.0), sample_rate)


def write_genuine_corpus(
    root: Path,
    n_clips: int,
    durations: list[float] | None = None,
    sample_rate: int = SAMPLE_RATE,
) -> Path:
    """Write WAVs plus a genuine manifest under root; returns manifest path."""
    audio_dir = root / "audio"
    audio_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for i in range(n_clips):
        duration = durations[i] if durations else 4.0 + 0.5 * (i % 5)
        wave = make_noisy_tone(duration, freq=200.0 + 37.0 * i, seed=i, sample_rate=sample_rate)
        write_waveform(wave, audio_dir / f"clip{i:03d}.wav")
        rows.append(
            {
                "clip_id": f"clip{i:03d}",
                "caption": f"a machine humming steadily, take {i}",
                "duration": len(wave) / sample_rate,
                "audio_path": f"audio/clip{i:03d}.wav",
                "label": "genuine",
                "fake_regions": [],
            }
        )
    manifest = root / "genuine.jsonl"
    with open(manifest, "w", encoding="utf-8") as fp:
        for row in rows:
            fp.write(json.dumps(row) + "\n")
    return manifest


def fake_record(
    clip_id: str,
    duration: float,
    regions: list[tuple[float, float]],
    caption: str = "stub",
    audio_path: str = "none.wav",
) -> ClipRecord:
    return ClipRecord(
        clip_id=clip_id,
        caption=caption,
        duration=duration,
        audio_path=audio_path,
        label=ClipLabel.FAKE if regions else ClipLabel.GENUINE,
        fake_regions=tuple(Region(a, b) for a, b in regions),
    )


@pytest.fixture
def genuine_corpus(tmp_path: Path) -> Path:
    return write_genuine_corpus(tmp_path, n_clips=6)
