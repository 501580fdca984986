"""Benchmark toolkit for detecting partially-faked general audio.

The package covers the full loop: build region-annotated fake clips from
a genuine corpus (``pipeline``), score clips frame-by-frame
(``baseline`` or external detectors), post-process scores into verdicts
and regions (``postprocess``), and evaluate predictions with
segment-based metrics and a composite score (``metrics``). A small HTTP
service (``service``) runs blinded human listening tests over the same
metrics, and ``cli`` ties everything together for batch use.
"""

__version__ = "0.1.0"

from .audio import read_waveform, write_waveform
from .manifest import (
    read_frame_scores,
    read_manifest,
    read_predictions,
    write_frame_scores,
    write_manifest,
    write_predictions,
)
from .metrics import (
    DEFAULT_ALPHA,
    DEFAULT_RESOLUTIONS,
    EvalReport,
    composite_score,
    evaluate_corpus,
    format_report_table,
    segment_activity,
)
from .postprocess import detect, frames_to_regions, median_filter, rasterize
from .types import (
    ClipLabel,
    ClipPrediction,
    ClipRecord,
    FrameScoreSequence,
    ManifestError,
    Region,
    UnsupportedFormatError,
    ValidationError,
    Waveform,
)

__all__ = [
    "__version__",
    "ClipLabel",
    "ClipPrediction",
    "ClipRecord",
    "DEFAULT_ALPHA",
    "DEFAULT_RESOLUTIONS",
    "EvalReport",
    "FrameScoreSequence",
    "ManifestError",
    "Region",
    "UnsupportedFormatError",
    "ValidationError",
    "Waveform",
    "composite_score",
    "detect",
    "evaluate_corpus",
    "format_report_table",
    "frames_to_regions",
    "median_filter",
    "rasterize",
    "read_frame_scores",
    "read_manifest",
    "read_predictions",
    "read_waveform",
    "segment_activity",
    "write_frame_scores",
    "write_manifest",
    "write_predictions",
    "write_waveform",
]
