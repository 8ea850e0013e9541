"""Matching and metric core: subset filtering, greedy matching with ignore
semantics, FPPI/miss-rate curves and log-average miss rates.

Matching follows the classic per-frame greedy protocol: detections are
processed in descending score order, each grabbing the unmatched non-ignore
annotation of maximal IoU when that IoU clears the threshold; detections
that fail to match are absorbed by ignore regions when their own-area
overlap clears the threshold, and count as false positives otherwise.

Because the greedy pass processes detections by descending score, the
assignment of the top-k detections never depends on lower-scored ones, so
one matching pass per frame yields the outcome at every score threshold.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .dataio import Annotation, Dataset, Detection, group_detections
from .errors import EvalError
from .geometry import (BBox, DEFAULT_ASPECT_RATIO, iou, normalize_aspect,
                       occlusion_fraction, overlap_over_detection)

LAMR_EPS = 1e-10
LAMR_STEP_DECADES = 0.25
MR2_RANGE = (1e-2, 1e0)
MR4_RANGE = (1e-4, 1e0)


@dataclass(frozen=True)
class SubsetSpec:
    """Which annotations count as positives, and how matching is configured.

    Defaults give the standard evaluation slice: pedestrians at least 50 px
    tall, occluded at most 35%, IoU threshold 0.5, detections standardized
    to the usual width/height ratio. `labels=None` counts every label.
    """

    height_range: tuple[float, float] = (50.0, math.inf)
    occlusion_range: tuple[float, float] = (0.0, 0.35)
    iou_threshold: float = 0.5
    aspect_normalize: bool = True
    aspect: float = DEFAULT_ASPECT_RATIO
    labels: frozenset[str] | None = frozenset({"person"})
    # Optional detection height pre-filter for legacy-toolbox parity
    # experiments. Constants unvalidated against reference outputs; off by
    # default and not part of the standard protocol.
    det_height_filter: bool = False
    det_height_expand: float = 1.25

    def __post_init__(self):
        hmin, hmax = self.height_range
        omin, omax = self.occlusion_range
        if hmin < 0 or hmax < hmin:
            raise ValueError(f"bad height range {self.height_range}")
        if not (0 <= omin <= omax <= 1):
            raise ValueError(f"bad occlusion range {self.occlusion_range}")
        if not (0 < self.iou_threshold < 1):
            raise ValueError(f"iou threshold must be in (0,1), got {self.iou_threshold}")

    @classmethod
    def reasonable(cls, **overrides) -> "SubsetSpec":
        return cls(**overrides)

    @classmethod
    def everything(cls, **overrides) -> "SubsetSpec":
        defaults = dict(height_range=(0.0, math.inf), occlusion_range=(0.0, 1.0),
                        labels=None)
        defaults.update(overrides)
        return cls(**defaults)


@dataclass
class FrameMatch:
    """Match assignment for one frame."""

    frame: str
    tp: list[tuple[Detection, Annotation, float]] = field(default_factory=list)
    fp: list[Detection] = field(default_factory=list)
    fn: list[Annotation] = field(default_factory=list)
    ignored: list[Detection] = field(default_factory=list)


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    fppi: float
    miss_rate: float


@dataclass
class Curve:
    """FPPI/miss-rate tradeoff, one point per distinct score threshold.

    Points are ordered by decreasing threshold; FPPI is non-decreasing
    along the list. A leading (FPPI 0, miss 1) anchor is added when no real
    point sits at FPPI 0, so every reference FPPI has a defined miss rate.
    """

    points: list[CurvePoint]
    n_frames: int
    n_positives: int

    def miss_at_fppi(self, ref: float) -> float:
        """Miss rate of the point with the largest FPPI <= ref (ties: the
        latest such point, i.e. the best miss rate at that budget)."""
        fppis = [p.fppi for p in self.points]
        idx = bisect_right(fppis, ref) - 1
        if idx < 0:
            raise EvalError(f"no curve point at or below FPPI {ref}")
        return self.points[idx].miss_rate


@dataclass
class EvalSummary:
    """Log-average miss rates plus operating-point counts for one run."""

    variant: str
    mr2: float
    mr4: float
    n_frames: int
    n_positives: int
    tp: int
    fp: int
    fn: int
    curve: Curve


def in_subset(ann: Annotation, spec: SubsetSpec) -> bool:
    """Does the annotation count as a positive under the subset spec?"""
    if spec.labels is not None and ann.label not in spec.labels:
        return False
    hmin, hmax = spec.height_range
    if not (hmin <= ann.box.h <= hmax):
        return False
    omin, omax = spec.occlusion_range
    return omin <= occlusion_fraction(ann.box, ann.visible) <= omax


def apply_subset(ds: Dataset, spec: SubsetSpec) -> Dataset:
    """Mark out-of-subset annotations as ignore; never deletes or un-ignores."""
    out = []
    for ann in ds.annotations:
        if not ann.ignore and not in_subset(ann, spec):
            ann = replace(ann, ignore=True)
        out.append(ann)
    return Dataset(frames=list(ds.frames), annotations=out, meta=list(ds.meta))


def prepare_detections(detections: list[Detection], spec: SubsetSpec) -> list[Detection]:
    """Standardize detection boxes per the spec (aspect, optional prefilter)."""
    out = detections
    if spec.aspect_normalize:
        out = [replace(d, box=normalize_aspect(d.box, spec.aspect)) for d in out]
    if spec.det_height_filter:
        hmin, hmax = spec.height_range
        lo = hmin / spec.det_height_expand
        hi = hmax * spec.det_height_expand
        out = [d for d in out if lo <= d.box.h <= hi]
    return out


def match_frame(annotations: list[Annotation], detections: list[Detection],
                iou_threshold: float = 0.5) -> FrameMatch:
    """Greedy one-to-one matching of one frame's detections to annotations.

    Detections are taken in descending score order (ties keep input order);
    each matches the unmatched non-ignore annotation of maximal IoU if that
    IoU >= threshold. Failing that, a detection overlapping any ignore
    region by >= threshold of its own area is absorbed; otherwise it is a
    false positive. Equal-IoU candidates resolve to the earliest annotation
    id. Ignore regions absorb any number of detections.
    """
    frame = annotations[0].frame if annotations else (
        detections[0].frame if detections else "")
    gt = sorted((a for a in annotations if not a.ignore), key=lambda a: a.id)
    ignores = [a for a in annotations if a.ignore]
    result = FrameMatch(frame=frame)
    order = sorted(range(len(detections)), key=lambda i: -detections[i].score)

    gt_arr = _box_array([a.box for a in gt])
    ign_arr = _box_array([a.box for a in ignores])
    matched = np.zeros(len(gt), dtype=bool)

    for di in order:
        det = detections[di]
        best = -1
        if len(gt):
            ious = _iou_one_to_many(det.box, gt_arr)
            ious[matched] = -1.0
            cand = int(np.argmax(ious))  # ties resolve to smallest id (sorted)
            if ious[cand] >= iou_threshold:
                best = cand
        if best >= 0:
            matched[best] = True
            result.tp.append((det, gt[best], float(iou(det.box, gt[best].box))))
        elif len(ignores) and _max_overlap_over_det(det.box, ign_arr) >= iou_threshold:
            result.ignored.append(det)
        else:
            result.fp.append(det)

    result.fn = [a for a, m in zip(gt, matched) if not m]
    return result


def _box_array(boxes: list[BBox]) -> np.ndarray:
    # columns: x, y, x2, y2, area (area carried so the vectorized path uses
    # the exact same operands as the scalar geometry.iou)
    if not boxes:
        return np.zeros((0, 5))
    return np.array([[b.x, b.y, b.x2, b.y2, b.area] for b in boxes],
                    dtype=np.float64)


def _iou_one_to_many(box: BBox, arr: np.ndarray) -> np.ndarray:
    # mirrors geometry.iou, including its clamps and identity fast path
    ix = np.minimum(arr[:, 2], box.x2) - np.maximum(arr[:, 0], box.x)
    iy = np.minimum(arr[:, 3], box.y2) - np.maximum(arr[:, 1], box.y)
    inter = np.minimum(np.clip(ix, 0, None) * np.clip(iy, 0, None),
                       np.minimum(box.area, arr[:, 4]))
    union = (box.area + arr[:, 4]) - inter
    out = np.where(inter > 0, np.minimum(inter / union, 1.0), 0.0)
    same = ((arr[:, 0] == box.x) & (arr[:, 1] == box.y)
            & (arr[:, 2] == box.x2) & (arr[:, 3] == box.y2))
    out[same] = 1.0
    return out


def _max_overlap_over_det(box: BBox, arr: np.ndarray) -> float:
    ix = np.minimum(arr[:, 2], box.x2) - np.maximum(arr[:, 0], box.x)
    iy = np.minimum(arr[:, 3], box.y2) - np.maximum(arr[:, 1], box.y)
    inter = np.clip(ix, 0, None) * np.clip(iy, 0, None)
    return float(inter.max() / box.area) if len(inter) else 0.0


def match_dataset(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                  workers: int = 1) -> dict[str, FrameMatch]:
    """Subset-filter, standardize and match every frame of a dataset.

    Results are keyed in dataset frame order and are identical for any
    worker count (frames are independent; the reduction is ordered).
    """
    subsetted = apply_subset(ds, spec)
    dets = prepare_detections(detections, spec)
    grouped = group_detections(dets)
    unknown = set(grouped) - set(ds.frames)
    if unknown:
        raise EvalError(f"detections reference frames not in the dataset: "
                        f"{sorted(unknown)[:5]}")
    anns = subsetted.by_frame()

    def run(frame: str) -> FrameMatch:
        return match_frame(anns[frame], grouped.get(frame, []), spec.iou_threshold)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, ds.frames))
    else:
        results = [run(f) for f in ds.frames]
    return {f: m for f, m in zip(ds.frames, results)}


def count_positives(ds: Dataset, spec: SubsetSpec) -> int:
    """Number of in-subset non-ignore annotations (the miss-rate denominator)."""
    return sum(1 for a in apply_subset(ds, spec).annotations if not a.ignore)


def curve_from_matches(matches: dict[str, FrameMatch], n_frames: int,
                       n_positives: int,
                       fp_keep: dict[str, list[bool]] | None = None) -> Curve:
    """Assemble the threshold/FPPI/miss-rate curve from per-frame matches.

    `fp_keep` optionally masks false positives out of the FPPI count (used
    by the oracle evaluations); masked detections still produce curve
    points at their scores, they just stop counting as errors.
    """
    if n_positives <= 0:
        raise EvalError("empty positive set")
    tp_scores: list[float] = []
    fp_scores: list[float] = []
    all_scores: list[float] = []
    for frame, m in matches.items():
        keep = fp_keep[frame] if fp_keep is not None else [True] * len(m.fp)
        tp_scores.extend(det.score for det, _, _ in m.tp)
        fp_scores.extend(det.score for det, k in zip(m.fp, keep) if k)
        all_scores.extend(d.score for d in
                          [t[0] for t in m.tp] + m.fp + m.ignored)
    thresholds = sorted(set(all_scores), reverse=True)
    tp_sorted = np.sort(np.array(tp_scores))
    fp_sorted = np.sort(np.array(fp_scores))
    points = []
    for s in thresholds:
        tp = len(tp_sorted) - int(np.searchsorted(tp_sorted, s, side="left"))
        fp = len(fp_sorted) - int(np.searchsorted(fp_sorted, s, side="left"))
        points.append(CurvePoint(threshold=s, fppi=fp / n_frames,
                                 miss_rate=(n_positives - tp) / n_positives))
    if not points or points[0].fppi > 0:
        points.insert(0, CurvePoint(threshold=math.inf, fppi=0.0, miss_rate=1.0))
    return Curve(points=points, n_frames=n_frames, n_positives=n_positives)


def compute_curve(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                  workers: int = 1) -> Curve:
    """Match a dataset and build its FPPI/miss-rate curve."""
    npos = count_positives(ds, spec)
    if npos == 0:
        raise EvalError("empty positive set")
    matches = match_dataset(ds, detections, spec, workers=workers)
    return curve_from_matches(matches, len(ds.frames), npos)


def lamr_references(fppi_lo: float, fppi_hi: float,
                    step_decades: float = LAMR_STEP_DECADES) -> list[float]:
    """Log-spaced reference FPPIs, inclusive of both range ends."""
    if not (0 < fppi_lo < fppi_hi):
        raise EvalError(f"bad FPPI range [{fppi_lo}, {fppi_hi}]")
    llo, lhi = math.log10(fppi_lo), math.log10(fppi_hi)
    count = max(1, round((lhi - llo) / step_decades)) + 1
    return [10 ** (llo + k * (lhi - llo) / (count - 1)) for k in range(count)]


def log_average_miss_rate(curve: Curve, fppi_lo: float, fppi_hi: float,
                          step_decades: float = LAMR_STEP_DECADES) -> float:
    """Geometric-style average of curve miss rates at log-spaced FPPIs.

    At each reference the curve is read at the largest FPPI <= reference;
    misses are clamped at 1e-10 before the log so perfect references do
    not collapse the average to -inf.
    """
    refs = lamr_references(fppi_lo, fppi_hi, step_decades)
    logs = [math.log(max(curve.miss_at_fppi(r), LAMR_EPS)) for r in refs]
    return math.exp(sum(logs) / len(logs))


def operating_threshold(curve: Curve, target_fppi: float) -> float:
    """Largest score threshold whose FPPI >= target; the last threshold when
    the curve never reaches the target."""
    for p in curve.points:
        if p.fppi >= target_fppi:
            return p.threshold
    return curve.points[-1].threshold


def summarize_matches(matches: dict[str, FrameMatch], curve: Curve,
                      variant: str = "O",
                      fp_keep: dict[str, list[bool]] | None = None) -> EvalSummary:
    """Summary (MR over both standard ranges, counts at FPPI=1) for a curve
    already assembled from `matches`; `fp_keep` must match the curve's."""
    mr2 = log_average_miss_rate(curve, *MR2_RANGE)
    mr4 = log_average_miss_rate(curve, *MR4_RANGE)
    t = operating_threshold(curve, 1.0)
    tp = fp = 0
    for frame, m in matches.items():
        keep = fp_keep[frame] if fp_keep is not None else [True] * len(m.fp)
        tp += sum(1 for det, _, _ in m.tp if det.score >= t)
        fp += sum(1 for det, k in zip(m.fp, keep) if k and det.score >= t)
    return EvalSummary(variant=variant, mr2=mr2, mr4=mr4, n_frames=curve.n_frames,
                       n_positives=curve.n_positives, tp=tp, fp=fp,
                       fn=curve.n_positives - tp, curve=curve)


def evaluate(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
             variant: str = "O", workers: int = 1) -> EvalSummary:
    """Full evaluation: MR over both standard FPPI ranges plus counts at
    the FPPI=1 operating point."""
    npos = count_positives(ds, spec)
    if npos == 0:
        raise EvalError("empty positive set")
    matches = match_dataset(ds, detections, spec, workers=workers)
    curve = curve_from_matches(matches, len(ds.frames), npos)
    return summarize_matches(matches, curve, variant)


def median_tp_iou(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                  score_min: float = 0.0) -> float:
    """Median IoU over true-positive pairs, detections scoring above
    `score_min`. Even counts take the lower-middle order statistic."""
    dets = [d for d in detections if d.score > score_min]
    matches = match_dataset(ds, dets, spec)
    ious = sorted(v for m in matches.values() for _, _, v in m.tp)
    if not ious:
        raise EvalError("no true positives at this operating point")
    return ious[(len(ious) - 1) // 2]


def mr_vs_iou_sweep(ds: Dataset, detections: list[Detection], spec: SubsetSpec,
                    iou_thresholds: list[float],
                    workers: int = 1) -> list[tuple[float, float]]:
    """MR over the standard range at each IoU threshold, all else fixed."""
    out = []
    for t in iou_thresholds:
        summary = evaluate(ds, detections, replace(spec, iou_threshold=t),
                           workers=workers)
        out.append((t, summary.mr2))
    return out


def fppi_at_recall(curve: Curve, recall: float) -> float:
    """Smallest FPPI on the curve whose miss rate <= 1 - recall."""
    if not (0 < recall < 1):
        raise EvalError(f"recall must be in (0,1), got {recall}")
    target = 1 - recall
    for p in curve.points:
        if p.miss_rate <= target:
            return p.fppi
    max_recall = 1 - min(p.miss_rate for p in curve.points)
    raise EvalError(f"recall {recall} unreachable; detector tops out at "
                    f"recall {max_recall:.4f}")


def curve_to_csv(curve: Curve) -> str:
    """CSV rows `threshold,fppi,missrate`, one per curve point."""
    lines = ["threshold,fppi,missrate"]
    for p in curve.points:
        lines.append(f"{p.threshold!r},{p.fppi!r},{p.miss_rate!r}")
    return "\n".join(lines) + "\n"


def summary_block(summary: EvalSummary) -> str:
    """Deterministic structured-text summary of one evaluation."""
    lines = [
        "pedbench-summary 1",
        f"variant {summary.variant}",
        f"frames {summary.n_frames}",
        f"positives {summary.n_positives}",
        f"mr2 {summary.mr2!r}",
        f"mr4 {summary.mr4!r}",
        f"mr2_pct {summary.mr2 * 100:.2f}",
        f"mr4_pct {summary.mr4 * 100:.2f}",
        f"tp_at_fppi1 {summary.tp}",
        f"fp_at_fppi1 {summary.fp}",
        f"fn_at_fppi1 {summary.fn}",
    ]
    return "\n".join(lines) + "\n"
