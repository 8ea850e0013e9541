"""Pixel-space geometry primitives: boxes, overlaps, head-feet lines.

Coordinates are continuous (sub-pixel) floats in image space, x to the
right and y downwards. Nothing in here rounds; rounding is left to file
format boundaries that require integers.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

logger = logging.getLogger(__name__)

# Width/height ratio applied when standardizing pedestrian boxes.
DEFAULT_ASPECT_RATIO = 0.41


@dataclass(frozen=True)
class BBox:
    """Axis-aligned box: top-left corner (x, y), width w, height h."""

    x: float
    y: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("x", "y", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not (self.w > 0 and self.h > 0):
            raise ValueError(f"box sides must be positive, got w={self.w} h={self.h}")
        if not (math.isfinite(self.x) and math.isfinite(self.y)
                and math.isfinite(self.w) and math.isfinite(self.h)):
            raise ValueError("box fields must be finite")

    @property
    def x2(self) -> float:
        return self.x + self.w

    @property
    def y2(self) -> float:
        return self.y + self.h

    @property
    def area(self) -> float:
        return self.w * self.h

    @property
    def center(self) -> tuple[float, float]:
        return (self.x + self.w / 2, self.y + self.h / 2)


@dataclass(frozen=True)
class HeadFeetLine:
    """Annotation axis from the top of the head to the point between the feet."""

    head: tuple[float, float]
    feet: tuple[float, float]

    def __post_init__(self):
        object.__setattr__(self, "head", (float(self.head[0]), float(self.head[1])))
        object.__setattr__(self, "feet", (float(self.feet[0]), float(self.feet[1])))
        if self.head == self.feet:
            raise ValueError("head-feet line must have nonzero length")

    @property
    def length(self) -> float:
        return math.hypot(self.feet[0] - self.head[0], self.feet[1] - self.head[1])

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.head[0] + self.feet[0]) / 2, (self.head[1] + self.feet[1]) / 2)


def _check_aspect(aspect: float) -> None:
    if not (aspect > 0 and math.isfinite(aspect)):
        raise ValueError(f"aspect ratio must be positive and finite, got {aspect}")


def intersection_area(a: BBox, b: BBox) -> float:
    """Area of the overlap region of two boxes (0.0 if disjoint).

    Clamped to the smaller box area: rounding of the edge arithmetic can
    otherwise overshoot it by an ulp, which would push IoU past 1.
    """
    iw = min(a.x2, b.x2) - max(a.x, b.x)
    ih = min(a.y2, b.y2) - max(a.y, b.y)
    if iw <= 0 or ih <= 0:
        return 0.0
    return min(iw * ih, a.area, b.area)


def iou(a: BBox, b: BBox) -> float:
    """Intersection over union of two boxes, in [0, 1].

    Symmetric; 1.0 exactly for identical boxes, 0.0 for disjoint interiors.
    """
    if a == b:
        return 1.0
    inter = intersection_area(a, b)
    if inter == 0.0:
        return 0.0
    union = a.area + b.area - inter
    return min(inter / union, 1.0)


def overlap_over_detection(det: BBox, region: BBox) -> float:
    """Fraction of `det` covered by `region`: area(det ∩ region) / area(det).

    Not symmetric. This is the criterion deciding whether an ignore region
    absorbs a detection.
    """
    return intersection_area(det, region) / det.area


def line_to_bbox(line: HeadFeetLine, aspect: float = DEFAULT_ASPECT_RATIO) -> BBox:
    """Generate a fixed-aspect box from a head-feet line.

    Box height equals the Euclidean length of the line (not its vertical
    extent), width is aspect * height, and the box centre coincides with
    the line midpoint.
    """
    _check_aspect(aspect)
    h = line.length
    w = aspect * h
    cx, cy = line.midpoint
    return BBox(cx - w / 2, cy - h / 2, w, h)


def bbox_to_line(box: BBox) -> HeadFeetLine:
    """Vertical head-feet line through the box centre, head at the top edge."""
    cx = box.x + box.w / 2
    return HeadFeetLine(head=(cx, box.y), feet=(cx, box.y + box.h))


def normalize_aspect(box: BBox, aspect: float = DEFAULT_ASPECT_RATIO) -> BBox:
    """Rescale a box's width to `aspect * height`, keeping centre and height.

    A box already at the target aspect is returned unchanged, which also
    makes the operation exactly idempotent.
    """
    _check_aspect(aspect)
    new_w = aspect * box.h
    if new_w == box.w:
        return box
    cx = box.x + box.w / 2
    return BBox(cx - new_w / 2, box.y, new_w, box.h)


def occlusion_fraction(full: BBox, visible: BBox | None) -> float:
    """Occluded fraction of an annotation: 1 - area(visible)/area(full).

    A missing visible box means unoccluded (0.0). A visible box reaching
    outside the full box is noisy input: it is clipped to the full box
    first and a data-quality warning is logged.
    """
    if visible is None:
        return 0.0
    vis_area = intersection_area(full, visible)
    if vis_area < visible.area:
        logger.warning(
            "visible box %s extends outside full box %s; clipping", visible, full
        )
    return 1.0 - vis_area / full.area


def clip_box(box: BBox, bounds: BBox) -> BBox | None:
    """Clip `box` to `bounds`; None if nothing remains."""
    x1 = max(box.x, bounds.x)
    y1 = max(box.y, bounds.y)
    x2 = min(box.x2, bounds.x2)
    y2 = min(box.y2, bounds.y2)
    if x2 <= x1 or y2 <= y1:
        return None
    return BBox(x1, y1, x2 - x1, y2 - y1)
