import json
import math
from pathlib import Path

import pytest

from pedbench.cli import main
from pedbench.dataio import (SceneParams, generate_synthetic_scene,
                             write_annotations, write_detections)
from pedbench.evaluation import Curve, CurvePoint
from pedbench.plotting import emit_plot, render_svg


@pytest.fixture
def scene_files(tmp_path):
    scene = generate_synthetic_scene(
        21, SceneParams(n_frames=10, gt_per_frame=2, bg_fp_per_frame=1,
                        loc_fp_per_frame=1, miss_per_frame=1, tp_jitter=0.04))
    ann = tmp_path / "annotations.txt"
    det = tmp_path / "detections.txt"
    write_annotations(scene.dataset, ann)
    write_detections(scene.detections, det)
    return scene, ann, det


@pytest.fixture
def perfect_files(tmp_path):
    scene = generate_synthetic_scene(
        1, SceneParams(n_frames=10, gt_per_frame=1, tp_score_range=(1.0, 1.0)))
    ann = tmp_path / "p_annotations.txt"
    det = tmp_path / "p_detections.txt"
    write_annotations(scene.dataset, ann)
    write_detections(scene.detections, det)
    return scene, ann, det


def run(args) -> int:
    return main([str(a) for a in args])


class TestEvalCommand:
    def test_perfect_detector_reports_zero(self, perfect_files, tmp_path, capsys):
        _, ann, det = perfect_files
        out = tmp_path / "out"
        assert run(["eval", "--annotations", ann, "--detections", det,
                    "--out", out]) == 0
        stdout = capsys.readouterr().out
        assert "MR-2(O) 0.0" in stdout
        assert (out / "curve.csv").exists()
        assert (out / "summary.txt").exists()
        assert (out / "curve.svg").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "eval"
        assert set(manifest["inputs"]) == {"annotations", "detections"}
        for entry in manifest["inputs"].values():
            assert len(entry["sha256"]) == 64

    def test_missing_input_fails_before_writing(self, tmp_path, capsys):
        out = tmp_path / "never"
        rc = run(["eval", "--annotations", tmp_path / "nope.txt",
                  "--detections", tmp_path / "also_nope.txt", "--out", out])
        assert rc == 1
        assert not out.exists()
        err = capsys.readouterr().err
        assert err.startswith("config: ")

    def test_rerun_byte_identical(self, scene_files, tmp_path):
        _, ann, det = scene_files
        outs = []
        for name, workers in (("o1", "1"), ("o2", "4")):
            out = tmp_path / name
            assert run(["eval", "--annotations", ann, "--detections", det,
                        "--out", out, "--workers", workers]) == 0
            outs.append({p.name: p.read_bytes()
                         for p in sorted(out.iterdir()) if p.name != "manifest.json"})
        assert outs[0] == outs[1]

    def test_variant_tag_in_summary(self, scene_files, tmp_path):
        _, ann, det = scene_files
        out = tmp_path / "outn"
        assert run(["eval", "--annotations", ann, "--detections", det,
                    "--out", out, "--variant", "N"]) == 0
        assert "variant N" in (out / "summary.txt").read_text()


class TestOracleCommand:
    def test_both_mode_reports_zero_fp(self, scene_files, tmp_path, capsys):
        _, ann, det = scene_files
        out = tmp_path / "oracle"
        assert run(["oracle", "--annotations", ann, "--detections", det,
                    "--out", out, "--mode", "both"]) == 0
        assert "oracle FP@1 0" in capsys.readouterr().out
        text = (out / "oracle.txt").read_text()
        assert "oracle_fp_at_fppi1 0" in text
        oracle_csv = (out / "oracle_curve.csv").read_text().strip().split("\n")
        for row in oracle_csv[1:]:
            assert float(row.split(",")[1]) == 0.0

    def test_rerun_byte_identical(self, scene_files, tmp_path):
        _, ann, det = scene_files
        blobs = []
        for name in ("ora", "orb"):
            out = tmp_path / name
            assert run(["oracle", "--annotations", ann, "--detections", det,
                        "--out", out, "--mode", "loc"]) == 0
            blobs.append({p.name: p.read_bytes()
                          for p in sorted(out.iterdir()) if p.name != "manifest.json"})
        assert blobs[0] == blobs[1]


class TestSweepCommand:
    def test_writes_rows(self, scene_files, tmp_path):
        _, ann, det = scene_files
        out = tmp_path / "sweep"
        assert run(["sweep", "--annotations", ann, "--detections", det,
                    "--out", out, "--iou-list", "0.5,0.7"]) == 0
        lines = (out / "sweep.csv").read_text().strip().split("\n")
        assert lines[0] == "iou,mr2"
        assert len(lines) == 3
        mrs = [float(l.split(",")[1]) for l in lines[1:]]
        assert mrs[0] <= mrs[1]


class TestSanitizerCommands:
    def test_prune_roundtrip(self, scene_files, tmp_path):
        _, ann, det = scene_files
        out = tmp_path / "pruned"
        assert run(["prune", "--annotations", ann, "--new", ann,
                    "--out", out]) == 0
        assert (out / "pruned.txt").exists()

    def test_align_and_diff(self, scene_files, tmp_path):
        _, ann, det = scene_files
        out = tmp_path / "aligned"
        assert run(["align", "--annotations", ann, "--detections", det,
                    "--out", out]) == 0
        aligned = out / "aligned.txt"
        assert aligned.exists()
        out2 = tmp_path / "diffed"
        assert run(["diff", "--annotations", ann, "--other", aligned,
                    "--out", out2]) == 0
        assert (out2 / "diff.txt").exists()
        assert (out2 / "review_items.csv").exists()


class TestInterpCommand:
    def test_prints_offset_table(self, capsys):
        assert run(["interp", "--amplitudes", "0,4"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert "amplitude_px" in lines[0]
        zero = lines[1].split()
        assert float(zero[1]) == 1.0
        four = lines[2].split()
        assert float(four[1]) == pytest.approx(96 / 104, abs=1e-9)

    def test_writes_csv(self, tmp_path):
        out = tmp_path / "interp"
        assert run(["interp", "--amplitudes", "2,8", "--out", out]) == 0
        lines = (out / "interp.csv").read_text().strip().split("\n")
        assert lines[0] == "amplitude,mid_phase_iou,closed_form_iou"
        assert len(lines) == 3


class TestSynthCommand:
    def test_outputs_usable_by_eval(self, tmp_path, capsys):
        out = tmp_path / "scene"
        assert run(["synth", "--seed", "5", "--frames", "6",
                    "--gt-per-frame", "2", "--bg-fp-per-frame", "1",
                    "--out", out]) == 0
        out2 = tmp_path / "eval"
        assert run(["eval", "--annotations", out / "annotations.txt",
                    "--detections", out / "detections.txt", "--out", out2]) == 0
        roles = (out / "roles.csv").read_text().strip().split("\n")
        assert roles[0] == "index,role"


class TestPlotting:
    def test_constant_curve_single_horizontal_polyline(self, tmp_path):
        curve = Curve(points=[CurvePoint(math.inf, 0.0, 0.4),
                              CurvePoint(1.0, 0.5, 0.4),
                              CurvePoint(0.5, 2.0, 0.4)],
                      n_frames=10, n_positives=10)
        path = tmp_path / "plot.svg"
        emit_plot([curve], ["flat"], path)
        text = path.read_text()
        assert text.count("<polyline") == 1
        points = text.split('points="')[1].split('"')[0].split()
        ys = {p.split(",")[1] for p in points}
        assert len(ys) == 1  # horizontal line

    def test_two_curves_two_legend_entries(self):
        c1 = Curve(points=[CurvePoint(math.inf, 0.0, 0.4),
                           CurvePoint(0.5, 1.0, 0.2)], n_frames=10,
                   n_positives=10)
        c2 = Curve(points=[CurvePoint(math.inf, 0.0, 0.9),
                           CurvePoint(0.5, 1.0, 0.6)], n_frames=10,
                   n_positives=10)
        svg = render_svg([c1, c2], ["one", "two"], (1e-4, 1e0))
        assert svg.count("<polyline") == 2
        assert "one " in svg and "two " in svg
        assert svg.count("%)</text>") == 2  # MR-2 (MR-4) legend per curve

    def test_empty_curve_list_rejected(self, tmp_path):
        from pedbench.errors import PedbenchError
        with pytest.raises(PedbenchError):
            emit_plot([], [], tmp_path / "x.svg")

    def test_deterministic_output(self, tmp_path):
        curve = Curve(points=[CurvePoint(math.inf, 0.0, 1.0),
                              CurvePoint(0.5, 1.0, 0.3)], n_frames=10,
                      n_positives=10)
        p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
        emit_plot([curve], ["det"], p1)
        emit_plot([curve], ["det"], p2)
        assert p1.read_bytes() == p2.read_bytes()
