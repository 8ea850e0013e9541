"""Error decomposition: localisation vs background false positives, oracle
evaluations, and the blur/contrast correlate measures.

A false positive overlapping any counted ground-truth box (IoU > 0) is a
localisation error; one with zero overlap is a background error. Oracle
evaluations re-score the curve with one class of false positives treated
as ignored detections, isolating that class's contribution to the metric.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import uniform_filter1d

from .dataio import Dataset, Detection
from .errors import EvalError
from .evaluation import (Curve, EvalSummary, FrameMatch, SubsetSpec,
                         apply_subset, count_positives, curve_from_matches,
                         match_dataset, operating_threshold, summarize_matches)
from .geometry import iou

logger = logging.getLogger(__name__)

ORACLE_MODES = ("loc", "bg", "both")
DEFAULT_ANALYSIS_FPPI = 0.1  # operating point for error counting


@dataclass
class FPClass:
    """Classification of one false positive.

    `tag` is a free-form human-entered label ("tree leaves", "cyclist", ...)
    for manual error histograms; the toolkit never assigns one itself.
    """

    category: str   # "localisation" | "background"
    max_iou: float  # against counted annotations; > 0 iff localisation
    tag: str | None = None


@dataclass
class OracleReport:
    """Baseline vs oracle evaluation and the miss-rate gain."""

    baseline: EvalSummary
    mode: str
    oracle: EvalSummary
    delta_mr4: float  # percentage points


def classify_false_positives(matches: dict[str, FrameMatch], ds: Dataset,
                             include_ignore: bool = False) -> dict[str, list[FPClass]]:
    """Classify every false positive in `matches` as localisation/background.

    Counted annotations are the non-ignore ones of `ds` (pass the
    subset-filtered dataset to reproduce the evaluation's view); set
    `include_ignore` to count ignore regions as ground truth as well.
    """
    by_frame = ds.by_frame()
    out: dict[str, list[FPClass]] = {}
    for frame, m in matches.items():
        counted = [a for a in by_frame.get(frame, [])
                   if include_ignore or not a.ignore]
        classes = []
        for det in m.fp:
            max_iou = max((iou(det.box, a.box) for a in counted), default=0.0)
            category = "localisation" if max_iou > 0 else "background"
            classes.append(FPClass(category=category, max_iou=max_iou))
        out[frame] = classes
    return out


def _fp_keep_mask(matches: dict[str, FrameMatch],
                  classes: dict[str, list[FPClass]], mode: str) -> dict[str, list[bool]]:
    removed = {"loc": ("localisation",), "bg": ("background",),
               "both": ("localisation", "background")}[mode]
    return {frame: [c.category not in removed for c in classes[frame]]
            for frame in matches}


def oracle_evaluate(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                    mode: str, variant: str = "O", include_ignore: bool = False,
                    workers: int = 1) -> OracleReport:
    """Evaluate with one class of false positives removed from FP counting.

    The removed class is treated as ignored detections at every threshold;
    true positives and false negatives are untouched. `mode="both"` removes
    every false positive, leaving only missing recall.
    """
    if mode not in ORACLE_MODES:
        raise EvalError(f"oracle mode must be one of {ORACLE_MODES}, got {mode!r}")
    npos = count_positives(ds, spec)
    if npos == 0:
        raise EvalError("empty positive set")
    matches = match_dataset(ds, detections, spec, workers=workers)
    n_frames = len(ds.frames)
    baseline_curve = curve_from_matches(matches, n_frames, npos)
    baseline = summarize_matches(matches, baseline_curve, variant)

    classes = classify_false_positives(matches, apply_subset(ds, spec),
                                       include_ignore=include_ignore)
    keep = _fp_keep_mask(matches, classes, mode)
    oracle_curve = curve_from_matches(matches, n_frames, npos, fp_keep=keep)
    oracle = summarize_matches(matches, oracle_curve, variant, fp_keep=keep)
    report = OracleReport(baseline=baseline, mode=mode, oracle=oracle,
                          delta_mr4=0.0)
    report.delta_mr4 = delta_mr(report)
    return report


def delta_mr(report: OracleReport) -> float:
    """Miss-rate gain of an oracle, in percentage points of MR over the
    extended range."""
    return (report.baseline.mr4 - report.oracle.mr4) * 100.0


def tag_histogram(classes: dict[str, list[FPClass]]) -> dict[str, int]:
    """Counts of the human-entered tags across all classified FPs."""
    counts: dict[str, int] = {}
    for per_frame in classes.values():
        for c in per_frame:
            if c.tag is not None:
                counts[c.tag] = counts.get(c.tag, 0) + 1
    return dict(sorted(counts.items()))


def fp_class_counts(matches: dict[str, FrameMatch],
                    classes: dict[str, list[FPClass]], curve: Curve,
                    fppi: float = DEFAULT_ANALYSIS_FPPI) -> dict[str, int]:
    """Localisation/background FP counts at an FPPI operating point.

    The threshold is the largest score threshold whose FPPI >= the target
    (falling back to the last threshold when the curve never gets there).
    """
    t = operating_threshold(curve, fppi)
    counts = {"localisation": 0, "background": 0}
    for frame, m in matches.items():
        for det, cls in zip(m.fp, classes[frame]):
            if det.score >= t:
                counts[cls.category] += 1
    return counts


# ---------------------------------------------------------------------------
# patch measures

def blur_score(patch) -> float:
    """No-reference perceptual blur estimate in [0, 1]; higher = blurrier.

    Re-blur scheme: low-pass the patch with a 9-tap mean filter along each
    axis, compare how much the neighbour-difference variation survives, and
    take the worse (max) of the two directional estimates. A direction with
    no variation at all is skipped; a fully constant patch scores 1.0 since
    the normalizer vanishes.
    """
    p = np.asarray(patch, dtype=np.float64)
    if p.ndim != 2 or p.shape[0] < 3 or p.shape[1] < 3:
        raise ValueError("blur_score needs a 2-D patch of at least 3x3 pixels")
    estimates = []
    for axis in (0, 1):
        blurred = uniform_filter1d(p, size=9, axis=axis, mode="nearest")
        d_orig = np.abs(np.diff(p, axis=axis))
        d_blur = np.abs(np.diff(blurred, axis=axis))
        keep = np.maximum(0.0, d_orig - d_blur)
        # interior sums: drop row/column 0 of the difference grids
        if axis == 0:
            s_orig = float(d_orig[:, 1:].sum())
            s_keep = float(keep[:, 1:].sum())
        else:
            s_orig = float(d_orig[1:, :].sum())
            s_keep = float(keep[1:, :].sum())
        if s_orig > 0:
            estimates.append((s_orig - s_keep) / s_orig)
    if not estimates:
        return 1.0
    return max(estimates)


def contrast_score(patch, q_low: float = 0.05, q_high: float = 0.95) -> float:
    """Spread between the top and bottom intensity quantiles.

    Expects intensities already normalized to [0, 1]; linear-interpolation
    quantiles, so a perfect 0..1 ramp scores q_high - q_low.
    """
    p = np.asarray(patch, dtype=np.float64)
    if p.size == 0:
        raise ValueError("contrast_score needs a non-empty patch")
    if not (0 <= q_low < q_high <= 1):
        raise ValueError(f"bad quantile levels ({q_low}, {q_high})")
    flat = p.reshape(-1)
    return float(np.quantile(flat, q_high) - np.quantile(flat, q_low))


@dataclass(frozen=True)
class PatchMeasures:
    """Size/blur/contrast measurements for one detection at the operating point."""

    detection: Detection
    outcome: str        # "TP" | "FP"
    height: float
    blur: float
    contrast: float


def export_correlates(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                      image_source, fppi: float = DEFAULT_ANALYSIS_FPPI,
                      workers: int = 1) -> list[PatchMeasures]:
    """One row of measures per TP/FP detection at the FPPI operating point.

    `image_source` maps a frame id to a [0, 1] grayscale array (or None).
    Detections on frames without an image, or whose clipped patch is
    smaller than 3x3 pixels, are skipped with a warning.
    """
    npos = count_positives(ds, spec)
    if npos == 0:
        raise EvalError("empty positive set")
    matches = match_dataset(ds, detections, spec, workers=workers)
    curve = curve_from_matches(matches, len(ds.frames), npos)
    t = operating_threshold(curve, fppi)
    rows: list[PatchMeasures] = []
    for frame in ds.frames:
        m = matches[frame]
        at_point = [(det, "TP") for det, _, _ in m.tp if det.score >= t]
        at_point += [(det, "FP") for det in m.fp if det.score >= t]
        if not at_point:
            continue
        image = image_source(frame)
        if image is None:
            logger.warning("no image for frame %s; %d rows skipped",
                           frame, len(at_point))
            continue
        for det, outcome in at_point:
            patch = _crop(image, det)
            if patch is None:
                logger.warning("detection patch outside image or too small "
                               "on frame %s; row skipped", frame)
                continue
            rows.append(PatchMeasures(
                detection=det, outcome=outcome, height=det.box.h,
                blur=blur_score(patch), contrast=contrast_score(patch)))
    return rows


def _crop(image: np.ndarray, det: Detection) -> np.ndarray | None:
    h, w = image.shape
    x0 = max(int(math.floor(det.box.x)), 0)
    y0 = max(int(math.floor(det.box.y)), 0)
    x1 = min(int(math.ceil(det.box.x2)), w)
    y1 = min(int(math.ceil(det.box.y2)), h)
    if x1 - x0 < 3 or y1 - y0 < 3:
        return None
    return image[y0:y1, x0:x1]


def correlates_to_csv(rows: list[PatchMeasures]) -> str:
    lines = ["video/frame,x,y,w,h,score,outcome,height,blur,contrast"]
    for r in rows:
        b = r.detection.box
        lines.append(f"{r.detection.frame},{b.x!r},{b.y!r},{b.w!r},{b.h!r},"
                     f"{r.detection.score!r},{r.outcome},{r.height!r},"
                     f"{r.blur!r},{r.contrast!r}")
    return "\n".join(lines) + "\n"


def oracle_report_block(report: OracleReport) -> str:
    """Deterministic structured-text block for an oracle report."""
    lines = [
        "pedbench-oracle 1",
        f"mode {report.mode}",
        f"baseline_mr2_pct {report.baseline.mr2 * 100:.2f}",
        f"baseline_mr4_pct {report.baseline.mr4 * 100:.2f}",
        f"oracle_mr2_pct {report.oracle.mr2 * 100:.2f}",
        f"oracle_mr4_pct {report.oracle.mr4 * 100:.2f}",
        f"delta_mr4_pp {report.delta_mr4:.2f}",
        f"oracle_fp_at_fppi1 {report.oracle.fp}",
    ]
    return "\n".join(lines) + "\n"
