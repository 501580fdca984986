"""Mono 16-bit PCM WAV reading and writing.

Integer samples map to amplitudes by dividing by 32768, so the PCM
round-trip is lossless. Anything that is not mono s16le linear PCM is
rejected rather than converted.
"""

from __future__ import annotations

import io
import wave
from pathlib import Path
from typing import BinaryIO

import numpy as np

from .types import UnsupportedFormatError, Waveform

PCM_SCALE = 32768.0


def _read_wave(fp: BinaryIO, name: str) -> Waveform:
    try:
        with wave.open(fp, "rb") as wav:
            if wav.getcomptype() != "NONE":
                raise UnsupportedFormatError(f"{name}: compressed WAV is not supported")
            if wav.getnchannels() != 1:
                raise UnsupportedFormatError(
                    f"{name}: expected mono audio, got {wav.getnchannels()} channels"
                )
            if wav.getsampwidth() != 2:
                raise UnsupportedFormatError(
                    f"{name}: expected 16-bit PCM, got {8 * wav.getsampwidth()}-bit"
                )
            rate = wav.getframerate()
            raw = wav.readframes(wav.getnframes())
    except wave.Error as exc:
        raise UnsupportedFormatError(f"{name}: not a readable WAV file ({exc})") from exc
    samples = np.frombuffer(raw, dtype="<i2").astype(np.float64) / PCM_SCALE
    return Waveform(samples=samples, sample_rate=rate)


def _write_wave(fp: BinaryIO, waveform: Waveform) -> None:
    ints = np.clip(np.rint(waveform.samples * PCM_SCALE), -32768, 32767).astype("<i2")
    with wave.open(fp, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(waveform.sample_rate)
        wav.writeframes(ints.tobytes())


def read_waveform(path: str | Path) -> Waveform:
    """Read a mono 16-bit PCM WAV file."""
    with open(path, "rb") as fp:
        return _read_wave(fp, str(path))


def write_waveform(waveform: Waveform, path: str | Path) -> None:
    """Write a waveform as mono 16-bit PCM WAV."""
    with open(path, "wb") as fp:
        _write_wave(fp, waveform)


def waveform_from_bytes(data: bytes) -> Waveform:
    """Decode WAV bytes (e.g. from an HTTP payload)."""
    return _read_wave(io.BytesIO(data), "<bytes>")


def waveform_to_bytes(waveform: Waveform) -> bytes:
    """Encode a waveform as WAV bytes."""
    buf = io.BytesIO()
    _write_wave(buf, waveform)
    return buf.getvalue()


def resample_to_length(samples: np.ndarray, target_len: int) -> np.ndarray:
    """Linearly resample a sample array to an exact target length."""
    if target_len <= 0:
        raise ValueError("target length must be positive")
    if samples.size == target_len:
        return np.array(samples, dtype=np.float64)
    if samples.size == 0:
        return np.zeros(target_len)
    if samples.size == 1:
        return np.full(target_len, float(samples[0]))
    src_pos = np.linspace(0.0, samples.size - 1.0, target_len)
    return np.interp(src_pos, np.arange(samples.size, dtype=np.float64), samples)
