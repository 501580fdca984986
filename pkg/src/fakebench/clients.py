"""Clients for the external grounding, inpainting and super-resolution services.

The heavy generative models run as separate HTTP services; this module
talks JSON-over-HTTP to them (audio as base64 WAV) and also provides
deterministic in-process mocks so the whole pipeline runs offline.

Wire formats:
  POST /ground   {"caption", "audio"}            -> {"segments": [{"onset", "offset", "confidence"}]}
  POST /inpaint  {"caption", "audio", "region"}  -> {"audio"}
  POST /upsample {"audio"}                       -> {"audio"}

``audio`` carries the full clip; inpaint responses are cropped back to
the masked region by the pipeline.
"""

from __future__ import annotations

import base64
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np
import requests

from .audio import resample_to_length, waveform_from_bytes, waveform_to_bytes
from .types import Region, ValidationError, Waveform

ENDPOINTS_ENV_VAR = "FAKEBENCH_ENDPOINTS"


class ClientError(Exception):
    """A remote service call failed (network, HTTP status, or bad payload)."""


@dataclass(frozen=True)
class GroundedSegment:
    """A caption-correlated region proposed by the grounding service."""

    region: Region
    confidence: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.confidence <= 1.0):
            raise ValidationError(f"confidence must lie in [0, 1], got {self.confidence}")


class GroundingClient(Protocol):
    def ground(self, clip_id: str, caption: str, waveform: Waveform) -> list[GroundedSegment]: ...


class InpaintClient(Protocol):
    def inpaint(self, clip_id: str, caption: str, masked: Waveform, region: Region) -> Waveform: ...


class SuperResClient(Protocol):
    def upsample(self, clip_id: str, waveform: Waveform) -> Waveform: ...


def encode_audio(waveform: Waveform) -> str:
    return base64.b64encode(waveform_to_bytes(waveform)).decode("ascii")


def decode_audio(payload: str) -> Waveform:
    try:
        return waveform_from_bytes(base64.b64decode(payload))
    except (ValueError, ValidationError) as exc:
        raise ClientError(f"service returned undecodable audio: {exc}") from exc


@dataclass(frozen=True)
class Endpoint:
    url: str
    timeout: float = 30.0
    retries: int = 1


def _post_json(endpoint: Endpoint, payload: dict) -> dict:
    last_error: Exception | None = None
    for _ in range(max(1, endpoint.retries)):
        try:
            response = requests.post(endpoint.url, json=payload, timeout=endpoint.timeout)
            response.raise_for_status()
            return response.json()
        except (requests.RequestException, ValueError) as exc:
            last_error = exc
    raise ClientError(f"POST {endpoint.url} failed: {last_error}") from last_error


class HttpGroundingClient:
    def __init__(self, endpoint: Endpoint):
        self.endpoint = endpoint

    def ground(self, clip_id: str, caption: str, waveform: Waveform) -> list[GroundedSegment]:
        payload = {"caption": caption, "audio": encode_audio(waveform)}
        body = _post_json(self.endpoint, payload)
        try:
            return [
                GroundedSegment(
                    region=Region(float(seg["onset"]), float(seg["offset"])),
                    confidence=float(seg.get("confidence", 1.0)),
                )
                for seg in body["segments"]
            ]
        except (KeyError, TypeError, ValueError, ValidationError) as exc:
            raise ClientError(f"bad grounding response for clip {clip_id}: {exc}") from exc


class HttpInpaintClient:
    def __init__(self, endpoint: Endpoint):
        self.endpoint = endpoint

    def inpaint(self, clip_id: str, caption: str, masked: Waveform, region: Region) -> Waveform:
        payload = {
            "caption": caption,
            "audio": encode_audio(masked),
            "region": region.as_pair(),
        }
        body = _post_json(self.endpoint, payload)
        if "audio" not in body:
            raise ClientError(f"inpaint response for clip {clip_id} carries no audio")
        return decode_audio(body["audio"])


class HttpSuperResClient:
    def __init__(self, endpoint: Endpoint):
        self.endpoint = endpoint

    def upsample(self, clip_id: str, waveform: Waveform) -> Waveform:
        body = _post_json(self.endpoint, {"audio": encode_audio(waveform)})
        if "audio" not in body:
            raise ClientError(f"upsample response for clip {clip_id} carries no audio")
        return decode_audio(body["audio"])


def _hash_ints(*parts: str, n: int = 16) -> list[int]:
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    return list(digest[:n])


class MockGroundingClient:
    """Deterministic grounding stand-in.

    Proposes one or two segments at positions derived from a hash of the
    clip id, with durations spread across short (<1 s), mid (1-4 s) and
    long (>4 s) bands so duration filters have something to bite on.
    """

    _BANDS = ((0.3, 0.9), (1.2, 3.8), (4.5, 7.0))

    def ground(self, clip_id: str, caption: str, waveform: Waveform) -> list[GroundedSegment]:
        h = _hash_ints(clip_id)
        duration = waveform.duration
        segments = []
        count = 1 + h[0] % 2
        cursor = 0.0
        for i in range(count):
            lo, hi = self._BANDS[h[1 + 3 * i] % 3]
            seg_len = lo + (hi - lo) * (h[2 + 3 * i] / 255.0)
            seg_len = min(seg_len, max(duration - 0.1, 0.1))
            room = duration - cursor - seg_len
            if room <= 0:
                break
            onset = cursor + room * (h[3 + 3 * i] / 255.0) * 0.5
            onset = round(onset, 3)
            offset = round(min(onset + seg_len, duration), 3)
            if offset <= onset:
                continue
            confidence = 0.5 + (h[7 + i] / 255.0) * 0.5
            segments.append(
                GroundedSegment(region=Region(onset, offset), confidence=confidence)
            )
            cursor = offset + 0.05
        return segments


class MockInpaintClient:
    """Deterministic inpainting stand-in.

    The masked span is filled with the time-reversed audio surrounding it
    (the span itself arrives zeroed, so the true content is unavailable)
    plus low-level noise seeded from (seed, clip_id, region). Returns the
    full clip at the incoming sample rate.
    """

    def __init__(self, seed: int = 0, noise_level: float = 0.02):
        self.seed = seed
        self.noise_level = noise_level

    def inpaint(self, clip_id: str, caption: str, masked: Waveform, region: Region) -> Waveform:
        sr = masked.sample_rate
        i0 = sample_index(region.onset, sr)
        i1 = sample_index(region.offset, sr)
        if not (0 <= i0 < i1 <= len(masked)):
            raise ClientError(f"clip {clip_id}: region {region} outside masked audio")
        n = i1 - i0
        samples = np.array(masked.samples)
        context = np.concatenate([samples[max(0, i0 - n):i0], samples[i1:i1 + n]])
        if context.size:
            fill = np.resize(context[::-1], n)
        else:
            fill = np.zeros(n)
        rng = np.random.default_rng(
            int.from_bytes(
                hashlib.sha256(
                    f"{self.seed}|{clip_id}|{region.onset}|{region.offset}".encode()
                ).digest()[:8],
                "big",
            )
        )
        fill = fill + rng.normal(0.0, self.noise_level, size=n)
        samples[i0:i1] = np.clip(fill, -1.0, 1.0)
        return Waveform(samples=samples, sample_rate=sr)


class MockSuperResClient:
    """Doubles the sample rate by linear interpolation."""

    def __init__(self, factor: int = 2):
        self.factor = factor

    def upsample(self, clip_id: str, waveform: Waveform) -> Waveform:
        target = len(waveform) * self.factor
        samples = resample_to_length(np.asarray(waveform.samples), target)
        return Waveform(samples=samples, sample_rate=waveform.sample_rate * self.factor)


def sample_index(t: float, sample_rate: int) -> int:
    """Seconds to sample index, rounding half away from zero."""
    return int(np.floor(t * sample_rate + 0.5))


@dataclass(frozen=True)
class ClientBundle:
    """The three pipeline clients, resolved for one run."""

    grounder: GroundingClient
    inpainter: InpaintClient
    super_resolver: SuperResClient | None = None


def mock_clients(seed: int = 0, use_super_resolution: bool = True) -> ClientBundle:
    return ClientBundle(
        grounder=MockGroundingClient(),
        inpainter=MockInpaintClient(seed=seed),
        super_resolver=MockSuperResClient() if use_super_resolution else None,
    )


@dataclass(frozen=True)
class EndpointsConfig:
    """Parsed endpoints file: grounding/super-resolution URLs plus one
    inpainting endpoint per inpainter id."""

    grounding: Endpoint
    inpainters: dict[str, Endpoint] = field(default_factory=dict)
    super_resolution: Endpoint | None = None

    @classmethod
    def from_file(cls, path: str | Path) -> "EndpointsConfig":
        try:
            with open(path, "r", encoding="utf-8") as fp:
                raw = json.load(fp)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: invalid endpoints JSON ({exc.msg})") from exc

        def endpoint(obj: dict) -> Endpoint:
            return Endpoint(
                url=str(obj["url"]),
                timeout=float(obj.get("timeout", 30.0)),
                retries=int(obj.get("retries", 1)),
            )

        try:
            inpainters = {
                name: endpoint(obj) for name, obj in raw.get("inpainters", {}).items()
            }
            sr = raw.get("super_resolution")
            return cls(
                grounding=endpoint(raw["grounding"]),
                inpainters=inpainters,
                super_resolution=endpoint(sr) if sr else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"{path}: bad endpoints config ({exc})") from exc

    def build_clients(self, inpainter_id: str, use_super_resolution: bool) -> ClientBundle:
        if inpainter_id not in self.inpainters:
            raise ValidationError(
                f"no inpainting endpoint configured for id {inpainter_id!r}; "
                f"known ids: {sorted(self.inpainters) or 'none'}"
            )
        if use_super_resolution and self.super_resolution is None:
            raise ValidationError("super-resolution requested but no endpoint configured")
        return ClientBundle(
            grounder=HttpGroundingClient(self.grounding),
            inpainter=HttpInpaintClient(self.inpainters[inpainter_id]),
            super_resolver=(
                HttpSuperResClient(self.super_resolution) if use_super_resolution else None
            ),
        )

    def all_endpoints(self) -> list[Endpoint]:
        eps = [self.grounding, *self.inpainters.values()]
        if self.super_resolution:
            eps.append(self.super_resolution)
        return eps


def probe_endpoints(config: EndpointsConfig) -> None:
    """Fail fast if any configured endpoint is unreachable.

    Any HTTP response counts as reachable; only connection-level failures
    raise.
    """
    for ep in config.all_endpoints():
        try:
            requests.get(ep.url, timeout=min(ep.timeout, 5.0))
        except requests.ConnectionError as exc:
            raise ClientError(f"endpoint {ep.url} is unreachable: {exc}") from exc
        except requests.RequestException:
            pass
