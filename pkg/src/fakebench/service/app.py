"""FastAPI application: listening-test sessions plus scoring endpoints.

The service wraps the core package. Human-facing routes (session, audio,
submit) serve blinded payloads backed by the durable annotation store;
admin routes expose the subjective report and stateless wrappers around
corpus evaluation and score post-processing.

All routes are versioned under ``/v1``. A static UI directory, when
configured, is mounted at the web root.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..annotation import (
    DEFAULT_CLIPS_PER_SET,
    AnnotationStore,
    score_sessions,
    subjective_table,
)
from ..manifest import read_manifest, resolve_audio_path
from ..metrics import (
    DEFAULT_ALPHA,
    DEFAULT_RESOLUTIONS,
    evaluate_corpus,
    format_report_table,
)
from ..postprocess import detect
from ..types import (
    ClipLabel,
    ClipPrediction,
    ClipRecord,
    FrameScoreSequence,
    ValidationError,
    regions_from_pairs,
)
from .schemas import (
    DetectRequest,
    DetectResponse,
    EvaluateRequest,
    EvaluateResponse,
    HealthPayload,
    PredictionIn,
    ReportPayload,
    SessionPayload,
    SubmitRequest,
    SubmitResponse,
    TaskPayload,
)

_RANGE_RE = re.compile(r"bytes=(\d*)-(\d*)")


@dataclass
class ServiceConfig:
    """Resolved configuration for one service instance.

    ``sets`` maps set names to manifest paths; relative audio paths in a
    manifest resolve against that manifest's directory.
    """

    sets: tuple[tuple[str, Path], ...]
    data_dir: Path
    clips_per_set: int = DEFAULT_CLIPS_PER_SET
    rng_seed: int = 0
    alpha: float = DEFAULT_ALPHA
    resolutions: tuple[float, ...] = tuple(DEFAULT_RESOLUTIONS)
    static_dir: Path | None = None

    def __post_init__(self) -> None:
        self.sets = tuple((name, Path(p)) for name, p in self.sets)
        self.data_dir = Path(self.data_dir)
        if self.static_dir is not None:
            self.static_dir = Path(self.static_dir)


def _byte_range(header: str, size: int) -> tuple[int, int]:
    """Resolve an HTTP Range header to inclusive byte offsets."""
    m = _RANGE_RE.fullmatch(header.strip())
    if m is None:
        raise HTTPException(status_code=416, detail=f"unsupported Range {header!r}")
    start_s, end_s = m.groups()
    if start_s:
        start = int(start_s)
        end = int(end_s) if end_s else size - 1
    elif end_s:  # suffix form bytes=-N: the final N bytes
        start = max(size - int(end_s), 0)
        end = size - 1
    else:
        raise HTTPException(status_code=416, detail=f"unsupported Range {header!r}")
    if start >= size or end < start:
        raise HTTPException(
            status_code=416,
            detail="range out of bounds",
            headers={"Content-Range": f"bytes */{size}"},
        )
    return start, min(end, size - 1)


def create_app(config: ServiceConfig) -> FastAPI:
    """Build the application, loading manifests and replaying the event log."""
    from .. import __version__

    manifests: list[tuple[str, list[ClipRecord]]] = []
    references: dict[str, ClipRecord] = {}
    audio_paths: dict[str, Path] = {}
    for set_name, manifest_path in config.sets:
        records = read_manifest(manifest_path)
        base = Path(manifest_path).parent
        for rec in records:
            if rec.clip_id in references:
                raise ValidationError(
                    f"clip_id {rec.clip_id!r} appears in more than one set"
                )
            references[rec.clip_id] = rec
            audio_paths[rec.clip_id] = resolve_audio_path(rec, base)
        manifests.append((set_name, records))
    set_names = [name for name, _ in manifests]

    config.data_dir.mkdir(parents=True, exist_ok=True)
    store = AnnotationStore(config.data_dir / "events.jsonl")

    app = FastAPI(title="deepfake-audio benchmark service", version=__version__)
    app.state.config = config
    app.state.store = store
    app.state.references = references

    @app.exception_handler(ValidationError)
    async def _domain_error(_request: Request, exc: ValidationError) -> JSONResponse:
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/v1/health", response_model=HealthPayload)
    def health() -> HealthPayload:
        return HealthPayload(
            version=__version__,
            sets=set_names,
            clips=len(references),
            evaluators=len(store.sessions()),
        )

    @app.get("/v1/session/{evaluator_id}", response_model=SessionPayload)
    def get_session(evaluator_id: str) -> SessionPayload:
        """Return the evaluator's session, creating it on first request.

        Creation is deterministic in (rng_seed, evaluator_id), so
        repeated requests always see the same assignment. Payloads are
        blinded: no ground-truth label or regions.
        """
        session = store.open_session(
            evaluator_id, manifests, config.clips_per_set, config.rng_seed
        )
        tasks = []
        for clip_id in session.assigned_clips:
            rec = references[clip_id]
            tasks.append(
                TaskPayload(
                    clip_id=clip_id,
                    caption=rec.caption,
                    duration=rec.duration,
                    audio_url=f"/v1/clips/{clip_id}/audio",
                    submitted=clip_id in session.submissions,
                )
            )
        return SessionPayload(
            evaluator_id=evaluator_id,
            sets=set_names,
            clips_per_set=config.clips_per_set,
            tasks=tasks,
            completed=len(session.submissions),
            total=len(session.assigned_clips),
        )

    @app.get("/v1/clips/{clip_id}/audio")
    def clip_audio(clip_id: str, request: Request) -> Response:
        path = audio_paths.get(clip_id)
        if path is None:
            raise HTTPException(status_code=404, detail=f"unknown clip {clip_id!r}")
        try:
            data = path.read_bytes()
        except OSError as exc:
            raise HTTPException(
                status_code=404, detail=f"audio for clip {clip_id!r} unavailable: {exc}"
            ) from exc
        headers = {"Accept-Ranges": "bytes"}
        range_header = request.headers.get("range")
        if range_header:
            start, end = _byte_range(range_header, len(data))
            headers["Content-Range"] = f"bytes {start}-{end}/{len(data)}"
            return Response(
                content=data[start : end + 1],
                status_code=206,
                media_type="audio/wav",
                headers=headers,
            )
        return Response(content=data, media_type="audio/wav", headers=headers)

    @app.post("/v1/session/{evaluator_id}/submit", response_model=SubmitResponse)
    def submit(evaluator_id: str, body: SubmitRequest) -> SubmitResponse:
        session = store.get_session(evaluator_id)
        if session is None:
            raise HTTPException(
                status_code=404, detail=f"no session for evaluator {evaluator_id!r}"
            )
        record = references.get(body.clip_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown clip {body.clip_id!r}")
        replaced = store.submit(
            evaluator_id,
            body.clip_id,
            ClipLabel(body.label),
            regions_from_pairs(body.regions),
            clip_duration=record.duration,
        )
        session = store.get_session(evaluator_id)
        assert session is not None
        return SubmitResponse(
            clip_id=body.clip_id,
            replaced=replaced,
            remaining=len(session.missing_clips),
        )

    @app.get("/v1/report", response_model=ReportPayload)
    def report() -> ReportPayload:
        """Subjective scores so far: per evaluator plus the macro average.

        Partial sessions are scored over their submitted clips, with the
        missing ones listed. Empty store yields an empty report.
        """
        sub = score_sessions(
            store.sessions(),
            references,
            alpha=config.alpha,
            resolutions=config.resolutions,
            allow_partial=True,
        )
        payload = sub.to_dict()
        return ReportPayload(table=subjective_table(sub), **payload)

    @app.post("/v1/evaluate", response_model=EvaluateResponse)
    def evaluate(body: EvaluateRequest) -> EvaluateResponse:
        refs = []
        for r in body.references:
            regions = regions_from_pairs(r.fake_regions)
            label = (
                ClipLabel(r.label)
                if r.label is not None
                else (ClipLabel.FAKE if regions else ClipLabel.GENUINE)
            )
            refs.append(
                ClipRecord(
                    clip_id=r.clip_id,
                    caption=r.caption,
                    duration=r.duration,
                    audio_path=r.audio_path,
                    label=label,
                    fake_regions=regions,
                )
            )
        preds = [
            ClipPrediction(
                clip_id=p.clip_id,
                label=ClipLabel(p.label),
                regions=regions_from_pairs(p.fake_regions),
            )
            for p in body.predictions
        ]
        rep = evaluate_corpus(refs, preds, body.resolutions, body.alpha)
        return EvaluateResponse(
            report=rep.to_dict(), table=format_report_table([("system", rep)])
        )

    @app.post("/v1/detect", response_model=DetectResponse)
    def detect_frames(body: DetectRequest) -> DetectResponse:
        preds = []
        for item in body.scores:
            seq = FrameScoreSequence(item.clip_id, item.frame_rate, item.scores)
            label, regions = detect(seq, kernel=body.kernel, threshold=body.threshold)
            preds.append(
                PredictionIn(
                    clip_id=item.clip_id,
                    label=label.value,
                    fake_regions=[(r.onset, r.offset) for r in regions],
                )
            )
        return DetectResponse(predictions=preds)

    if config.static_dir is not None and config.static_dir.is_dir():
        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True), name="ui")

    return app
