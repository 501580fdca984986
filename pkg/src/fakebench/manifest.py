"""JSON-Lines readers/writers for manifests, frame scores and predictions.

One record per line. Parse and validation failures name the offending
line so corpus files can be fixed in place.

Schemas:
  manifest    {"clip_id", "caption", "duration", "audio_path", "label", "fake_regions"}
  scores      {"clip_id", "frame_rate", "scores"}
  predictions {"clip_id", "label", "fake_regions"}

``label`` may be omitted in manifest lines; it is implied by whether
``fake_regions`` is non-empty, and rejected if explicitly inconsistent.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .types import (
    ClipLabel,
    ClipPrediction,
    ClipRecord,
    FrameScoreSequence,
    ManifestError,
    ValidationError,
    regions_from_pairs,
)

_MANIFEST_FIELDS = ("clip_id", "caption", "duration", "audio_path")


def _iter_lines(path: str | Path):
    with open(path, "r", encoding="utf-8") as fp:
        for lineno, line in enumerate(fp, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ManifestError(f"{path}, line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ManifestError(f"{path}, line {lineno}: expected a JSON object")
            yield lineno, obj


def _parse_label(raw: object, lineno: int, path: str | Path) -> ClipLabel:
    try:
        return ClipLabel(raw)
    except ValueError:
        raise ManifestError(
            f"{path}, line {lineno}: label must be 'genuine' or 'fake', got {raw!r}"
        ) from None


def read_manifest(path: str | Path) -> list[ClipRecord]:
    """Read and validate a clip manifest."""
    records: list[ClipRecord] = []
    seen: set[str] = set()
    for lineno, obj in _iter_lines(path):
        missing = [f for f in _MANIFEST_FIELDS if f not in obj]
        if missing:
            raise ManifestError(f"{path}, line {lineno}: missing field(s) {', '.join(missing)}")
        try:
            regions = regions_from_pairs(obj.get("fake_regions", []))
            label = (
                _parse_label(obj["label"], lineno, path)
                if "label" in obj
                else (ClipLabel.FAKE if regions else ClipLabel.GENUINE)
            )
            record = ClipRecord(
                clip_id=str(obj["clip_id"]),
                caption=str(obj["caption"]),
                duration=float(obj["duration"]),
                audio_path=str(obj["audio_path"]),
                label=label,
                fake_regions=regions,
            )
        except ManifestError:
            raise
        except (ValidationError, TypeError, ValueError) as exc:
            raise ManifestError(f"{path}, line {lineno}: {exc}") from exc
        if record.clip_id in seen:
            raise ManifestError(f"{path}, line {lineno}: duplicate clip_id {record.clip_id!r}")
        seen.add(record.clip_id)
        records.append(record)
    return records


def record_to_dict(record: ClipRecord) -> dict:
    return {
        "clip_id": record.clip_id,
        "caption": record.caption,
        "duration": record.duration,
        "audio_path": record.audio_path,
        "label": record.label.value,
        "fake_regions": [r.as_pair() for r in record.fake_regions],
    }


def write_manifest(records: Iterable[ClipRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for record in records:
            fp.write(json.dumps(record_to_dict(record)) + "\n")


def read_frame_scores(path: str | Path) -> list[FrameScoreSequence]:
    """Read a frame-score file (one FrameScoreSequence per line)."""
    sequences: list[FrameScoreSequence] = []
    seen: set[str] = set()
    for lineno, obj in _iter_lines(path):
        missing = [f for f in ("clip_id", "frame_rate", "scores") if f not in obj]
        if missing:
            raise ManifestError(f"{path}, line {lineno}: missing field(s) {', '.join(missing)}")
        try:
            seq = FrameScoreSequence(
                clip_id=str(obj["clip_id"]),
                frame_rate=float(obj["frame_rate"]),
                scores=[float(s) for s in obj["scores"]],
            )
        except (ValidationError, TypeError, ValueError) as exc:
            raise ManifestError(f"{path}, line {lineno}: {exc}") from exc
        if seq.clip_id in seen:
            raise ManifestError(f"{path}, line {lineno}: duplicate clip_id {seq.clip_id!r}")
        seen.add(seq.clip_id)
        sequences.append(seq)
    return sequences


def write_frame_scores(sequences: Iterable[FrameScoreSequence], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for seq in sequences:
            obj = {
                "clip_id": seq.clip_id,
                "frame_rate": seq.frame_rate,
                "scores": [float(s) for s in seq.scores],
            }
            fp.write(json.dumps(obj) + "\n")


def read_predictions(path: str | Path) -> list[ClipPrediction]:
    """Read a prediction file (one ClipPrediction per line)."""
    preds: list[ClipPrediction] = []
    seen: set[str] = set()
    for lineno, obj in _iter_lines(path):
        missing = [f for f in ("clip_id", "label") if f not in obj]
        if missing:
            raise ManifestError(f"{path}, line {lineno}: missing field(s) {', '.join(missing)}")
        try:
            pred = ClipPrediction(
                clip_id=str(obj["clip_id"]),
                label=_parse_label(obj["label"], lineno, path),
                regions=regions_from_pairs(obj.get("fake_regions", [])),
            )
        except ManifestError:
            raise
        except (ValidationError, TypeError, ValueError) as exc:
            raise ManifestError(f"{path}, line {lineno}: {exc}") from exc
        if pred.clip_id in seen:
            raise ManifestError(f"{path}, line {lineno}: duplicate clip_id {pred.clip_id!r}")
        seen.add(pred.clip_id)
        preds.append(pred)
    return preds


def write_predictions(preds: Iterable[ClipPrediction], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        for pred in preds:
            obj = {
                "clip_id": pred.clip_id,
                "label": pred.label.value,
                "fake_regions": [r.as_pair() for r in pred.regions],
            }
            fp.write(json.dumps(obj) + "\n")


def resolve_audio_path(record: ClipRecord, base: str | Path) -> Path:
    """Resolve a record's audio path relative to its manifest directory."""
    p = Path(record.audio_path)
    return p if p.is_absolute() else Path(base) / p


def index_by_clip_id(records: Sequence[ClipRecord]) -> dict[str, ClipRecord]:
    return {r.clip_id: r for r in records}
