"""Command-line entry point: manipulate, detect, evaluate, serve.

Every subcommand that produces files does so under one --out directory
and writes a ``run.json`` provenance record there (resolved config, seed,
tool version) so any output tree is self-describing and reruns with the
same inputs and seed are byte-identical.

Exit codes: 0 success, 1 validation failure, 2 I/O failure, 3 remote
client failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .baseline import DEFAULT_FRAME_RATE, score_corpus
from .clients import (
    ENDPOINTS_ENV_VAR,
    ClientError,
    EndpointsConfig,
    mock_clients,
    probe_endpoints,
)
from .manifest import (
    read_manifest,
    read_predictions,
    write_frame_scores,
    write_predictions,
)
from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_RESOLUTIONS,
    evaluate_corpus,
    format_report_table,
)
from .pipeline import PRESETS, build_dataset
from .postprocess import DEFAULT_KERNEL, DEFAULT_THRESHOLD, detect
from .types import ClipPrediction, ValidationError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_REMOTE = 3


class _Parser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors follow the exit-code contract."""

    def error(self, message: str):  # noqa: D102 - argparse override
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def _write_run(out_dir: Path, subcommand: str, config: dict) -> None:
    record = {
        "tool": "fakebench",
        "version": __version__,
        "subcommand": subcommand,
        "config": config,
    }
    with open(out_dir / "run.json", "w", encoding="utf-8") as fp:
        json.dump(record, fp, indent=2, sort_keys=True)
        fp.write("\n")


def _resolve_clients(args, config):
    if args.mock:
        return mock_clients(
            seed=args.seed, use_super_resolution=config.use_super_resolution
        )
    endpoints_path = args.endpoints or os.environ.get(ENDPOINTS_ENV_VAR)
    if not endpoints_path:
        raise ValidationError(
            "no client endpoints configured: pass --endpoints FILE, set "
            f"{ENDPOINTS_ENV_VAR}, or run with --mock"
        )
    endpoints = EndpointsConfig.from_file(endpoints_path)
    probe_endpoints(endpoints)
    return endpoints.build_clients(config.inpainter_id, config.use_super_resolution)


def cmd_manipulate(args) -> int:
    config = replace(PRESETS[args.preset], rng_seed=args.seed, crossfade=args.crossfade)
    records = read_manifest(args.manifest)
    clients = _resolve_clients(args, config)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    produced, stats = build_dataset(
        records,
        config,
        clients,
        out_dir,
        jobs=args.jobs,
        audio_root=Path(args.manifest).parent,
    )
    _write_run(
        out_dir,
        "manipulate",
        {
            "manifest": str(args.manifest),
            "preset": args.preset,
            "pipeline": config.to_dict(),
            "mock": args.mock,
            "jobs": args.jobs,
            "stats": stats.to_dict(),
        },
    )
    print(
        f"manipulate: {stats.produced} produced, {stats.filtered} filtered, "
        f"{stats.failed} failed -> {out_dir / 'manifest.jsonl'}"
    )
    if stats.failed:
        for entry in stats.skipped:
            print(
                f"  failed {entry['clip_id']} at {entry['stage']}: {entry['error']}",
                file=sys.stderr,
            )
        remote = any(entry["kind"] == "ClientError" for entry in stats.skipped)
        return EXIT_REMOTE if remote else EXIT_VALIDATION
    return EXIT_OK


def cmd_detect(args) -> int:
    if (args.scores is None) == (not args.baseline):
        raise ValidationError("exactly one of --scores FILE or --baseline is required")
    if args.kernel < 1 or args.kernel % 2 == 0:
        raise ValidationError(f"--kernel must be odd and >= 1, got {args.kernel}")
    if not (0.0 <= args.threshold <= 1.0):
        raise ValidationError(f"--threshold must lie in [0, 1], got {args.threshold}")

    records = read_manifest(args.manifest)
    if args.baseline:
        sequences = score_corpus(
            records,
            frame_rate=args.frame_rate,
            audio_root=Path(args.manifest).parent,
        )
    else:
        sequences = score_corpus(records, scores_path=args.scores)

    predictions = []
    for seq in sequences:
        label, regions = detect(seq, kernel=args.kernel, threshold=args.threshold)
        predictions.append(ClipPrediction(seq.clip_id, label, regions))

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_predictions(predictions, out_dir / "predictions.jsonl")
    if args.baseline:
        write_frame_scores(sequences, out_dir / "scores.jsonl")
    _write_run(
        out_dir,
        "detect",
        {
            "manifest": str(args.manifest),
            "scores": str(args.scores) if args.scores else None,
            "baseline": args.baseline,
            "frame_rate": args.frame_rate,
            "kernel": args.kernel,
            "threshold": args.threshold,
        },
    )
    n_fake = sum(1 for p in predictions if p.label.value == "fake")
    print(
        f"detect: {len(predictions)} clips ({n_fake} flagged fake) "
        f"-> {out_dir / 'predictions.jsonl'}"
    )
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if not (0.0 <= args.alpha <= 1.0):
        raise ValidationError(f"--alpha must lie in [0, 1], got {args.alpha}")
    references = read_manifest(args.references)
    predictions = read_predictions(args.predictions)
    report = evaluate_corpus(
        references, predictions, resolutions=DEFAULT_RESOLUTIONS, alpha=args.alpha
    )
    table = format_report_table([(args.name, report)])
    print(table, end="")
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "report.json", "w", encoding="utf-8") as fp:
            json.dump(report.to_dict(), fp, indent=2, sort_keys=True)
            fp.write("\n")
        with open(out_dir / "report.txt", "w", encoding="utf-8") as fp:
            fp.write(table)
        _write_run(
            out_dir,
            "evaluate",
            {
                "references": str(args.references),
                "predictions": str(args.predictions),
                "alpha": args.alpha,
                "name": args.name,
            },
        )
    return EXIT_OK


def _parse_set_arg(raw: str) -> tuple[str, Path]:
    if "=" in raw:
        name, _, path = raw.partition("=")
        if not name or not path:
            raise ValidationError(f"bad set argument {raw!r}, expected NAME=PATH")
        return name, Path(path)
    path = Path(raw)
    return path.stem, path


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    sets = tuple(_parse_set_arg(raw) for raw in args.manifests)
    names = [name for name, _ in sets]
    if len(set(names)) != len(names):
        raise ValidationError(f"duplicate set names: {', '.join(names)}")
    data_dir = Path(args.data_dir)
    config = ServiceConfig(
        sets=sets,
        data_dir=data_dir,
        clips_per_set=args.clips_per_set,
        rng_seed=args.seed,
        static_dir=Path(args.static_dir) if args.static_dir else None,
    )
    app = create_app(config)
    _write_run(
        data_dir,
        "serve",
        {
            "sets": {name: str(path) for name, path in sets},
            "clips_per_set": args.clips_per_set,
            "seed": args.seed,
            "host": args.host,
            "port": args.port,
            "static_dir": args.static_dir,
        },
    )
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="fakebench",
        description="Deepfake general-audio benchmark: build fakes, run detection, score results.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser(
        "manipulate",
        help="turn a genuine corpus into an annotated fake corpus",
        description="Ground, mask, inpaint and splice each genuine clip; writes "
        "audio/, manifest.jsonl and run.json under --out.",
    )
    p.add_argument("manifest", help="genuine input manifest (JSON-Lines)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--preset",
        choices=sorted(PRESETS),
        default="train",
        help="duration limits and model selection (default: train)",
    )
    p.add_argument("--seed", type=int, default=0, help="pipeline RNG seed (default: 0)")
    p.add_argument(
        "--crossfade",
        type=float,
        default=0.0,
        help="splice crossfade in seconds (default: 0, hard splice)",
    )
    p.add_argument("--jobs", type=int, default=4, help="worker threads (default: 4)")
    p.add_argument("--mock", action="store_true", help="use deterministic local mock models")
    p.add_argument(
        "--endpoints",
        help=f"JSON file of model endpoints (default: ${ENDPOINTS_ENV_VAR})",
    )
    p.set_defaults(func=cmd_manipulate)

    p = sub.add_parser(
        "detect",
        help="frame scores -> smoothed predictions",
        description="Median-filter and threshold per-frame scores into clip "
        "verdicts and fake regions; writes predictions.jsonl under --out.",
    )
    p.add_argument("manifest", help="manifest of clips to score (JSON-Lines)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--scores", help="frame-score file from an external detector")
    p.add_argument(
        "--baseline",
        action="store_true",
        help="compute scores with the built-in spectral-flux baseline",
    )
    p.add_argument(
        "--frame-rate",
        type=float,
        default=DEFAULT_FRAME_RATE,
        help="baseline frame rate in frames/s (default: 50)",
    )
    p.add_argument(
        "--kernel",
        type=int,
        default=DEFAULT_KERNEL,
        help="median filter width in frames, odd (default: 5)",
    )
    p.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help="genuine threshold on scores (default: 0.5)",
    )
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser(
        "evaluate",
        help="score predictions against references",
        description="Clip accuracy, segment F1 at 1 s and 20 ms, and the "
        "composite score; prints a table and optionally writes report files.",
    )
    p.add_argument("references", help="reference manifest (JSON-Lines)")
    p.add_argument("predictions", help="prediction file (JSON-Lines)")
    p.add_argument(
        "--alpha",
        type=float,
        default=DEFAULT_ALPHA,
        help="weight of clip accuracy in the composite score (default: 0.3)",
    )
    p.add_argument("--name", default="system", help="row label in the printed table")
    p.add_argument("--out", help="directory for report.json/report.txt/run.json")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser(
        "serve",
        help="run the listening-test service",
        description="Serve blinded evaluator sessions, clip audio and the "
        "subjective report over HTTP until interrupted.",
    )
    p.add_argument(
        "manifests",
        nargs="+",
        metavar="NAME=PATH",
        help="test sets to draw clips from (bare PATH uses the file stem as name)",
    )
    p.add_argument("--host", default="127.0.0.1", help="bind address (default: 127.0.0.1)")
    p.add_argument("--port", type=int, default=8000, help="port (default: 8000)")
    p.add_argument(
        "--data-dir",
        required=True,
        help="directory for the append-only event log and run.json",
    )
    p.add_argument(
        "--clips-per-set",
        type=int,
        default=10,
        help="clips sampled per set per evaluator (default: 10)",
    )
    p.add_argument("--seed", type=int, default=0, help="session sampling seed (default: 0)")
    p.add_argument("--static-dir", help="directory of UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ClientError as exc:
        print(f"fakebench: remote client error: {exc}", file=sys.stderr)
        return EXIT_REMOTE
    except ValidationError as exc:
        print(f"fakebench: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"fakebench: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
