"""Annotation-quality procedures: pruned-set construction, detector-guided
re-alignment, consistency diffing and consolidation review flags.

All operations are pure per-frame functions over two datasets (or a
dataset plus detections) sharing one frame universe. Matching between two
box sets is always greedy by descending IoU and one-to-one.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .dataio import Annotation, Dataset, Detection, group_detections
from .errors import PedbenchError
from .geometry import BBox, DEFAULT_ASPECT_RATIO, iou, normalize_aspect

DEFAULT_PRUNE_IOU = 0.5


@dataclass(frozen=True)
class AlignConfig:
    """Knobs for detector-guided annotation alignment."""

    iou_min: float = 0.5
    score_min: float = 0.0
    aspect: float = DEFAULT_ASPECT_RATIO
    one_to_one: bool = True
    by_score: bool = False  # ablation: candidate priority by score, not IoU

    def __post_init__(self):
        if not (0 < self.iou_min < 1):
            raise ValueError(f"iou_min must be in (0,1), got {self.iou_min}")


@dataclass
class DiffReport:
    """Greedy matching of two annotation sets plus an agreement ratio."""

    matched: list[tuple[Annotation, Annotation, float]]
    a_only: list[Annotation]
    b_only: list[Annotation]
    agreement: float


def _check_same_frames(a: Dataset, b: Dataset) -> None:
    if set(a.frames) != set(b.frames):
        raise PedbenchError("datasets cover different frame universes")


def _greedy_pairs(xs: list, ys: list, key, min_value: float,
                  tie_key=None) -> list[tuple[int, int, float]]:
    """One-to-one pairs (i, j, value) greedily by descending value.

    Ties break on `tie_key(i, j)` (default: index order, which callers
    arrange to be deterministic: annotation id order / input order).
    """
    if tie_key is None:
        tie_key = lambda i, j: (i, j)
    scored = []
    for i, x in enumerate(xs):
        for j, y in enumerate(ys):
            v = key(x, y)
            if v >= min_value:
                scored.append((v, i, j))
    scored.sort(key=lambda t: (-t[0],) + tuple(tie_key(t[1], t[2])))
    used_x: set[int] = set()
    used_y: set[int] = set()
    pairs = []
    for v, i, j in scored:
        if i in used_x or j in used_y:
            continue
        used_x.add(i)
        used_y.add(j)
        pairs.append((i, j, v))
    return pairs


def prune(original: Dataset, new: Dataset,
          iou_threshold: float = DEFAULT_PRUNE_IOU) -> Dataset:
    """Build the pruned annotation variant from an original and a new set.

    Non-ignore originals are greedily matched one-to-one to non-ignore new
    annotations at the IoU threshold. Matched originals keep their exact
    geometry and flags; unmatched originals are demoted to ignore regions;
    unmatched new annotations are appended with source "pruned". Nothing is
    deleted, so pruning isolates error removal from alignment changes.
    """
    _check_same_frames(original, new)
    new_by_frame = new.by_frame()
    out: list[Annotation] = []
    appended: list[Annotation] = []
    orig_by_frame = original.by_frame()
    for frame in original.frames:
        orig_real = sorted((a for a in orig_by_frame[frame] if not a.ignore),
                           key=lambda a: a.id)
        new_real = sorted((a for a in new_by_frame.get(frame, []) if not a.ignore),
                          key=lambda a: a.id)
        pairs = _greedy_pairs(orig_real, new_real,
                              key=lambda a, b: iou(a.box, b.box),
                              min_value=iou_threshold)
        matched_orig = {i for i, _, _ in pairs}
        matched_new = {j for _, j, _ in pairs}
        for i, ann in enumerate(orig_real):
            out.append(ann if i in matched_orig else replace(ann, ignore=True))
        out.extend(a for a in orig_by_frame[frame] if a.ignore)
        for j, ann in enumerate(new_real):
            if j not in matched_new:
                appended.append(replace(ann, id=f"pruned.{ann.id}", source="pruned"))
    existing = {a.id for a in out}
    for ann in appended:
        if ann.id in existing:
            raise PedbenchError(f"id collision while appending {ann.id}")
        out.append(ann)
    return Dataset(frames=list(original.frames), annotations=out,
                   meta=list(original.meta))


def align(annotations: Dataset, detections: list[Detection],
          cfg: AlignConfig = AlignConfig()) -> Dataset:
    """Replace annotation boxes with matching high-IoU detection boxes.

    Per frame, candidate detections (score >= cfg.score_min) are paired
    one-to-one with non-ignore annotations, greedily by descending IoU,
    accepting pairs at IoU >= cfg.iou_min. A matched annotation takes the
    aspect-normalized detection box (source becomes "aligned"); its visible
    box travels under the same affine map. Ignore regions and unmatched
    annotations pass through unchanged.
    """
    grouped = group_detections(detections)
    by_frame = annotations.by_frame()
    out: list[Annotation] = []
    for frame in annotations.frames:
        anns = sorted((a for a in by_frame[frame] if not a.ignore),
                      key=lambda a: a.id)
        cands = [d for d in grouped.get(frame, []) if d.score >= cfg.score_min]
        pairs = _align_pairs(anns, cands, cfg)
        replacement = {i: cands[j] for i, j, _ in pairs}
        for i, ann in enumerate(anns):
            if i in replacement:
                out.append(_aligned(ann, replacement[i], cfg))
            else:
                out.append(ann)
        out.extend(a for a in by_frame[frame] if a.ignore)
    return Dataset(frames=list(annotations.frames), annotations=out,
                   meta=list(annotations.meta))


def _align_pairs(anns, cands, cfg: AlignConfig) -> list[tuple[int, int, float]]:
    if not cfg.one_to_one:
        # every annotation takes its best candidate, reuse allowed
        pairs = []
        for i, ann in enumerate(anns):
            best = max(((iou(ann.box, d.box), -j) for j, d in enumerate(cands)),
                       default=(0.0, 0))
            if best[0] >= cfg.iou_min:
                pairs.append((i, -best[1], best[0]))
        return pairs
    if cfg.by_score:
        # ablation: candidates claim annotations in descending score order
        pairs = []
        taken: set[int] = set()
        for j in sorted(range(len(cands)), key=lambda j: -cands[j].score):
            best_i, best_v = -1, 0.0
            for i, ann in enumerate(anns):
                if i in taken:
                    continue
                v = iou(ann.box, cands[j].box)
                if v > best_v:
                    best_i, best_v = i, v
            if best_i >= 0 and best_v >= cfg.iou_min:
                taken.add(best_i)
                pairs.append((best_i, j, best_v))
        return pairs
    return _greedy_pairs(anns, cands, key=lambda a, d: iou(a.box, d.box),
                         min_value=cfg.iou_min)


def _aligned(ann: Annotation, det: Detection, cfg: AlignConfig) -> Annotation:
    new_box = normalize_aspect(det.box, cfg.aspect)
    visible = _map_visible(ann.visible, ann.box, new_box)
    return replace(ann, box=new_box, visible=visible, source="aligned")


def _map_visible(visible: BBox | None, old: BBox, new: BBox) -> BBox | None:
    """Carry a visible sub-box through the affine map old -> new."""
    if visible is None:
        return None
    sx = new.w / old.w
    sy = new.h / old.h
    return BBox(new.x + (visible.x - old.x) * sx,
                new.y + (visible.y - old.y) * sy,
                visible.w * sx, visible.h * sy)


def diff(a: Dataset, b: Dataset, iou_threshold: float = DEFAULT_PRUNE_IOU) -> DiffReport:
    """Consistency diff of two annotation sets over one frame universe.

    Greedy one-to-one matching of non-ignore annotations per frame;
    agreement = 2*matched / (|A| + |B|). diff(a, b) mirrors diff(b, a).
    """
    _check_same_frames(a, b)
    a_by, b_by = a.by_frame(), b.by_frame()
    matched: list[tuple[Annotation, Annotation, float]] = []
    a_only: list[Annotation] = []
    b_only: list[Annotation] = []
    total_a = total_b = 0
    for frame in a.frames:
        xs = sorted((x for x in a_by[frame] if not x.ignore), key=lambda x: x.id)
        ys = sorted((y for y in b_by.get(frame, []) if not y.ignore), key=lambda y: y.id)
        total_a += len(xs)
        total_b += len(ys)
        # tie-break on the unordered id pair so diff(a,b) mirrors diff(b,a)
        pairs = _greedy_pairs(
            xs, ys, key=lambda x, y: iou(x.box, y.box),
            min_value=iou_threshold,
            tie_key=lambda i, j: (min(xs[i].id, ys[j].id),
                                  max(xs[i].id, ys[j].id), xs[i].id))
        got_x = {i for i, _, _ in pairs}
        got_y = {j for _, j, _ in pairs}
        matched.extend((xs[i], ys[j], v) for i, j, v in pairs)
        a_only.extend(x for i, x in enumerate(xs) if i not in got_x)
        b_only.extend(y for j, y in enumerate(ys) if j not in got_y)
    denom = total_a + total_b
    agreement = (2 * len(matched) / denom) if denom else 1.0
    return DiffReport(matched=matched, a_only=a_only, b_only=b_only,
                      agreement=agreement)


@dataclass(frozen=True)
class ReviewItem:
    """An old annotation with no counterpart in the new set, for human review."""

    annotation: Annotation
    max_iou_to_new: float


def consolidate_flags(new: Dataset, old: Dataset,
                      iou_threshold: float = DEFAULT_PRUNE_IOU) -> list[ReviewItem]:
    """Old-only annotations flagged for human review (never auto-added).

    Whether an unmatched old annotation is "correct" is a human judgment;
    this only surfaces the candidates with their best IoU to the new set.
    Ignore regions on either side are out of scope.
    """
    report = diff(old, new, iou_threshold)
    new_by_frame = new.by_frame()
    items = []
    for ann in report.a_only:
        best = max((iou(ann.box, b.box)
                    for b in new_by_frame.get(ann.frame, []) if not b.ignore),
                   default=0.0)
        items.append(ReviewItem(annotation=ann, max_iou_to_new=best))
    return items


def review_items_to_csv(items: list[ReviewItem]) -> str:
    lines = ["video/frame,x,y,w,h,max_iou_to_new"]
    for item in items:
        b = item.annotation.box
        lines.append(f"{item.annotation.frame},{b.x!r},{b.y!r},{b.w!r},{b.h!r},"
                     f"{item.max_iou_to_new!r}")
    return "\n".join(lines) + "\n"
