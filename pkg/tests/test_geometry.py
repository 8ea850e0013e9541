import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pedbench.geometry import (BBox, HeadFeetLine, bbox_to_line, clip_box, iou,
                               line_to_bbox, normalize_aspect,
                               occlusion_fraction, overlap_over_detection)

# realistic pixel-space boxes
coords = st.floats(min_value=-2000.0, max_value=4000.0, allow_nan=False,
                   allow_infinity=False)
sizes = st.floats(min_value=0.01, max_value=2000.0, allow_nan=False,
                  allow_infinity=False)
boxes = st.builds(BBox, x=coords, y=coords, w=sizes, h=sizes)


class TestBBox:
    def test_rejects_degenerate(self):
        with pytest.raises(ValueError):
            BBox(0, 0, 0, 10)
        with pytest.raises(ValueError):
            BBox(0, 0, 10, -1)
        with pytest.raises(ValueError):
            BBox(math.nan, 0, 10, 10)

    def test_area(self):
        assert BBox(1, 2, 3, 4).area == 12


class TestIou:
    def test_identity(self):
        b = BBox(0, 0, 10, 10)
        assert iou(b, b) == 1.0

    def test_disjoint(self):
        assert iou(BBox(0, 0, 10, 10), BBox(20, 20, 5, 5)) == 0.0

    def test_half_overlap(self):
        # intersection 50, union 150
        assert iou(BBox(0, 0, 10, 10), BBox(5, 0, 10, 10)) == pytest.approx(1 / 3)

    def test_touching_edges_is_zero(self):
        assert iou(BBox(0, 0, 10, 10), BBox(10, 0, 10, 10)) == 0.0

    @given(a=boxes, b=boxes)
    @settings(max_examples=300)
    def test_symmetric_and_bounded(self, a, b):
        v = iou(a, b)
        assert v == iou(b, a)
        assert 0.0 <= v <= 1.0

    @given(a=boxes, b=boxes)
    @settings(max_examples=300)
    def test_area_ratio_bound(self, a, b):
        bound = min(a.area, b.area) / max(a.area, b.area)
        assert iou(a, b) <= bound + 1e-12


class TestOverlapOverDetection:
    def test_contained(self):
        assert overlap_over_detection(BBox(2, 2, 4, 4), BBox(0, 0, 10, 10)) == 1.0

    def test_disjoint(self):
        assert overlap_over_detection(BBox(0, 0, 1, 1), BBox(5, 5, 1, 1)) == 0.0

    def test_half_covered(self):
        assert overlap_over_detection(BBox(0, 0, 10, 10), BBox(0, 0, 5, 10)) == 0.5

    def test_not_symmetric(self):
        det, region = BBox(0, 0, 5, 10), BBox(0, 0, 10, 10)
        assert overlap_over_detection(det, region) == 1.0
        assert overlap_over_detection(region, det) == 0.5


class TestLineToBbox:
    def test_vertical_line(self):
        box = line_to_bbox(HeadFeetLine((50, 10), (50, 110)), 0.41)
        assert box == BBox(29.5, 10.0, 41.0, 100.0)

    def test_tilted_line_uses_euclidean_length(self):
        box = line_to_bbox(HeadFeetLine((0, 0), (60, 80)), 0.41)
        assert box == BBox(9.5, -10.0, 41.0, 100.0)

    def test_zero_length_rejected(self):
        with pytest.raises(ValueError):
            HeadFeetLine((5, 5), (5, 5))

    def test_bbox_to_line_examples(self):
        line = bbox_to_line(BBox(29.5, 10, 41, 100))
        assert line.head == (50.0, 10.0)
        assert line.feet == (50.0, 110.0)
        unit = bbox_to_line(BBox(0, 0, 1, 1))
        assert unit.head == (0.5, 0.0)
        assert unit.feet == (0.5, 1.0)

    def test_roundtrip_vertical_lines(self):
        rng = random.Random(7)
        for _ in range(200):
            x = rng.uniform(0, 640)
            y = rng.uniform(0, 480)
            h = rng.uniform(5, 300)
            line = HeadFeetLine((x, y), (x, y + h))
            back = bbox_to_line(line_to_bbox(line, 0.41))
            assert back.head[0] == pytest.approx(x, abs=1e-9)
            assert back.head[1] == pytest.approx(y, abs=1e-9)
            assert back.feet[1] == pytest.approx(y + h, abs=1e-9)

    def test_roundtrip_all_boxes_via_own_aspect(self):
        rng = random.Random(8)
        for _ in range(200):
            b = BBox(rng.uniform(-100, 2000), rng.uniform(-100, 2000),
                     rng.uniform(0.1, 500), rng.uniform(0.1, 500))
            back = line_to_bbox(bbox_to_line(b), aspect=b.w / b.h)
            for got, want in [(back.x, b.x), (back.y, b.y), (back.w, b.w),
                              (back.h, b.h)]:
                assert got == pytest.approx(want, abs=1e-9)


class TestNormalizeAspect:
    def test_fixed_point_bitwise(self):
        h = 123.456
        b = BBox(10.0, 20.0, 0.41 * h, h)
        assert normalize_aspect(b, 0.41) is b

    def test_centre_preserving_rescale(self):
        assert normalize_aspect(BBox(0, 0, 100, 100), 0.41) == BBox(29.5, 0, 41, 100)

    def test_idempotent_bitwise(self):
        rng = random.Random(9)
        for _ in range(500):
            b = BBox(rng.uniform(0, 2000), rng.uniform(0, 2000),
                     rng.uniform(1, 800), rng.uniform(1, 800))
            once = normalize_aspect(b, 0.41)
            assert normalize_aspect(once, 0.41) == once

    @given(b=boxes)
    @settings(max_examples=300)
    def test_height_exact_centre_at_float_rounding(self, b):
        nb = normalize_aspect(b, 0.41)
        assert nb.h == b.h
        assert nb.y == b.y
        cx_before = b.x + b.w / 2
        cx_after = nb.x + nb.w / 2
        assert cx_after == pytest.approx(cx_before, abs=1e-9)


class TestOcclusionFraction:
    def test_absent_visible(self):
        assert occlusion_fraction(BBox(0, 0, 10, 10), None) == 0.0

    def test_fully_visible(self):
        b = BBox(0, 0, 10, 10)
        assert occlusion_fraction(b, b) == 0.0

    def test_half_visible(self):
        assert occlusion_fraction(BBox(0, 0, 10, 10), BBox(0, 0, 10, 5)) == 0.5

    def test_clips_outside_visible(self, caplog):
        # visible hangs out of the box: clipped portion counts
        with caplog.at_level("WARNING"):
            v = occlusion_fraction(BBox(0, 0, 10, 10), BBox(5, 0, 10, 10))
        assert v == 0.5
        assert any("clipping" in r.message for r in caplog.records)

    def test_monotone_in_visible_area(self):
        full = BBox(0, 0, 10, 10)
        fractions = [occlusion_fraction(full, BBox(0, 0, 10, k))
                     for k in (2, 4, 6, 8, 10)]
        assert fractions == sorted(fractions, reverse=True)


def test_clip_box():
    assert clip_box(BBox(-5, -5, 10, 10), BBox(0, 0, 100, 100)) == BBox(0, 0, 5, 5)
    assert clip_box(BBox(200, 200, 5, 5), BBox(0, 0, 100, 100)) is None
