"""Command-line entry point.

Every batch command validates its inputs up front, writes deterministic
artifacts (CSV, structured-text summaries, SVG plots) into --out, and
records a manifest with the config and content digests of all inputs.
Errors exit nonzero with a single machine-parsable line on stderr:
`<category>: <detail>`.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import (classify_false_positives, correlates_to_csv,
                       export_correlates, fp_class_counts, oracle_evaluate,
                       oracle_report_block)
from .dataio import (SceneParams, generate_synthetic_scene,
                     oscillation_offset_demo, read_annotations, read_detections,
                     write_annotations, write_detections)
from .errors import ConfigError, PedbenchError
from .evaluation import (SubsetSpec, apply_subset, count_positives,
                         curve_from_matches, curve_to_csv, evaluate,
                         match_dataset, mr_vs_iou_sweep, summary_block)
from .images import FrameImageSource
from .plotting import emit_plot
from .sanitize import (AlignConfig, align, consolidate_flags, diff, prune,
                       review_items_to_csv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PedbenchError as exc:
        print(f"{exc.category}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"io: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pedbench",
        description="Pedestrian-detection evaluation and annotation tooling")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p, detections=True):
        p.add_argument("--annotations", required=True, help="annotation file/dir")
        p.add_argument("--format", default="canonical",
                       choices=["canonical", "caltech-text"])
        if detections:
            p.add_argument("--detections", required=True, help="detection file")
        p.add_argument("--out", required=True, help="output directory")

    def subset_flags(p):
        p.add_argument("--subset", default="reasonable",
                       choices=["reasonable", "all", "custom"])
        p.add_argument("--height-min", type=float, default=50.0)
        p.add_argument("--height-max", type=float, default=math.inf)
        p.add_argument("--occ-min", type=float, default=0.0)
        p.add_argument("--occ-max", type=float, default=0.35)
        p.add_argument("--iou", type=float, default=0.5)
        p.add_argument("--no-aspect-normalize", action="store_true")
        p.add_argument("--det-height-filter", action="store_true",
                       help="legacy-toolbox parity prefilter (unvalidated)")
        p.add_argument("--variant", default="O", choices=["O", "N"],
                       help="annotation-variant tag for reports")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("eval", help="evaluate detections against annotations")
    common_io(p)
    subset_flags(p)
    p.add_argument("--fppi-range", default=None,
                   help="extra custom LAMR range 'lo,hi'")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="oracle evaluation with one FP class removed")
    common_io(p)
    subset_flags(p)
    p.add_argument("--mode", required=True, choices=["loc", "bg", "both"])
    p.add_argument("--count-ignore-overlap", action="store_true",
                   help="count ignore regions as ground truth when classifying FPs")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="MR versus IoU threshold sweep")
    common_io(p)
    subset_flags(p)
    p.add_argument("--iou-list", default="0.5,0.6,0.7,0.8,0.9")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("prune", help="build the pruned annotation variant")
    p.add_argument("--annotations", required=True, help="original annotations")
    p.add_argument("--new", required=True, help="new annotations")
    p.add_argument("--format", default="canonical",
                   choices=["canonical", "caltech-text"])
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("align", help="detector-guided annotation alignment")
    common_io(p)
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--score-min", type=float, default=0.0)
    p.add_argument("--aspect", type=float, default=0.41)
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("diff", help="consistency diff of two annotation sets")
    p.add_argument("--annotations", required=True, help="set A")
    p.add_argument("--other", required=True, help="set B")
    p.add_argument("--format", default="canonical",
                   choices=["canonical", "caltech-text"])
    p.add_argument("--iou", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("correlates", help="size/blur/contrast per detection")
    common_io(p)
    subset_flags(p)
    p.add_argument("--images", required=True, help="image root directory")
    p.add_argument("--fppi", type=float, default=0.1)
    p.set_defaults(func=cmd_correlates)

    p = sub.add_parser("interp", help="keyframe interpolation offset demo")
    p.add_argument("--amplitudes", default="0,2,4,8",
                   help="comma-separated oscillation amplitudes in pixels")
    p.add_argument("--stride", type=int, default=30, help="keyframe stride")
    p.add_argument("--height", type=float, default=100.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_interp)

    p = sub.add_parser("synth", help="write a synthetic test scene")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--frames", type=int, default=10)
    p.add_argument("--gt-per-frame", type=int, default=2)
    p.add_argument("--bg-fp-per-frame", type=int, default=0)
    p.add_argument("--loc-fp-per-frame", type=int, default=0)
    p.add_argument("--miss-per-frame", type=int, default=0)
    p.add_argument("--jitter", type=float, default=0.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("serve", help="run the review/annotation service")
    p.add_argument("--annotations", required=True, help="canonical store file")
    p.add_argument("--images", default=None, help="image root directory")
    p.add_argument("--original", default=None,
                   help="original annotations for the diff overlay")
    p.add_argument("--ui-dir", default=None, help="built UI assets directory")
    p.add_argument("--port", type=int, default=8099)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)

    return parser


# ---------------------------------------------------------------------------
# helpers

def _require_paths(*paths) -> None:
    missing = [str(p) for p in paths if p and not Path(p).exists()]
    if missing:
        raise ConfigError(f"missing input paths: {', '.join(missing)}")


def _subset_from_args(args) -> SubsetSpec:
    kwargs = dict(iou_threshold=args.iou,
                  aspect_normalize=not args.no_aspect_normalize,
                  det_height_filter=args.det_height_filter)
    if args.subset == "reasonable":
        return SubsetSpec.reasonable(**kwargs)
    if args.subset == "all":
        return SubsetSpec.everything(**kwargs)
    return SubsetSpec(height_range=(args.height_min, args.height_max),
                      occlusion_range=(args.occ_min, args.occ_max), **kwargs)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    path = Path(path)
    if path.is_dir():
        for child in sorted(path.rglob("*")):
            if child.is_file():
                digest.update(child.name.encode())
                digest.update(child.read_bytes())
    else:
        digest.update(path.read_bytes())
    return digest.hexdigest()


def _write_manifest(out_dir: Path, command: str, args, inputs: dict,
                    outputs: list[str]) -> None:
    config = {k: v for k, v in sorted(vars(args).items())
              if k != "func" and not callable(v)}
    config = {k: (str(v) if isinstance(v, float) and math.isinf(v) else v)
              for k, v in config.items()}
    manifest = {
        "tool": "pedbench",
        "version": __version__,
        "command": command,
        "config": config,
        "inputs": {name: {"path": str(p), "sha256": _sha256(p)}
                   for name, p in inputs.items() if p},
        "outputs": sorted(outputs),
    }
    with open(out_dir / "manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _prepare_out(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_eval_inputs(args):
    _require_paths(args.annotations, args.detections)
    ds = read_annotations(args.annotations, format=args.format)
    dets = read_detections(args.detections)
    return ds, dets


# ---------------------------------------------------------------------------
# commands

def cmd_eval(args) -> int:
    ds, dets = _load_eval_inputs(args)
    out = _prepare_out(args)
    spec = _subset_from_args(args)
    summary = evaluate(ds, dets, spec, variant=args.variant, workers=args.workers)
    (out / "curve.csv").write_text(curve_to_csv(summary.curve), encoding="utf-8")
    text = summary_block(summary)
    if args.fppi_range:
        lo, hi = (float(v) for v in args.fppi_range.split(","))
        from .evaluation import log_average_miss_rate
        custom = log_average_miss_rate(summary.curve, lo, hi)
        text += f"mr_custom[{lo!r},{hi!r}] {custom!r}\n"
    (out / "summary.txt").write_text(text, encoding="utf-8")
    emit_plot([summary.curve], [f"eval-{args.variant}"], out / "curve.svg")
    _write_manifest(out, "eval", args,
                    {"annotations": args.annotations, "detections": args.detections},
                    ["curve.csv", "summary.txt", "curve.svg"])
    print(f"MR-2({args.variant}) {summary.mr2 * 100:.1f}  "
          f"MR-4({args.variant}) {summary.mr4 * 100:.1f}")
    return 0


def cmd_oracle(args) -> int:
    ds, dets = _load_eval_inputs(args)
    out = _prepare_out(args)
    spec = _subset_from_args(args)
    report = oracle_evaluate(ds, dets, spec, mode=args.mode, variant=args.variant,
                             include_ignore=args.count_ignore_overlap,
                             workers=args.workers)
    (out / "baseline_curve.csv").write_text(curve_to_csv(report.baseline.curve),
                                            encoding="utf-8")
    (out / "oracle_curve.csv").write_text(curve_to_csv(report.oracle.curve),
                                          encoding="utf-8")
    matches = match_dataset(ds, dets, spec, workers=args.workers)
    classes = classify_false_positives(matches, apply_subset(ds, spec),
                                       include_ignore=args.count_ignore_overlap)
    counts = fp_class_counts(matches, classes, report.baseline.curve)
    text = oracle_report_block(report)
    text += (f"fp_localisation_at_0.1fppi {counts['localisation']}\n"
             f"fp_background_at_0.1fppi {counts['background']}\n")
    (out / "oracle.txt").write_text(text, encoding="utf-8")
    emit_plot([report.baseline.curve, report.oracle.curve],
              ["baseline", f"oracle-{args.mode}"], out / "oracle.svg")
    _write_manifest(out, "oracle", args,
                    {"annotations": args.annotations, "detections": args.detections},
                    ["baseline_curve.csv", "oracle_curve.csv", "oracle.txt",
                     "oracle.svg"])
    print(f"oracle {args.mode}: baseline MR-4 {report.baseline.mr4 * 100:.1f} -> "
          f"{report.oracle.mr4 * 100:.1f} (delta {report.delta_mr4:.1f}pp, "
          f"oracle FP@1 {report.oracle.fp})")
    return 0


def cmd_sweep(args) -> int:
    ds, dets = _load_eval_inputs(args)
    out = _prepare_out(args)
    spec = _subset_from_args(args)
    thresholds = [float(v) for v in args.iou_list.split(",")]
    rows = mr_vs_iou_sweep(ds, dets, spec, thresholds, workers=args.workers)
    lines = ["iou,mr2"] + [f"{t!r},{mr!r}" for t, mr in rows]
    (out / "sweep.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(out, "sweep", args,
                    {"annotations": args.annotations, "detections": args.detections},
                    ["sweep.csv"])
    for t, mr in rows:
        print(f"iou {t:.2f}  MR-2 {mr * 100:.1f}")
    return 0


def cmd_prune(args) -> int:
    _require_paths(args.annotations, args.new)
    original = read_annotations(args.annotations, format=args.format)
    new = read_annotations(args.new, format=args.format)
    out = _prepare_out(args)
    pruned = prune(original, new, iou_threshold=args.iou)
    write_annotations(pruned, out / "pruned.txt")
    _write_manifest(out, "prune", args,
                    {"annotations": args.annotations, "new": args.new},
                    ["pruned.txt"])
    n_ignored = sum(1 for a in pruned.annotations if a.ignore) \
        - sum(1 for a in original.annotations if a.ignore)
    n_added = len(pruned.annotations) - len(original.annotations)
    print(f"pruned: {n_ignored} originals demoted to ignore, {n_added} added")
    return 0


def cmd_align(args) -> int:
    ds, dets = _load_eval_inputs(args)
    out = _prepare_out(args)
    cfg = AlignConfig(iou_min=args.iou, score_min=args.score_min,
                      aspect=args.aspect)
    aligned = align(ds, dets, cfg)
    write_annotations(aligned, out / "aligned.txt")
    _write_manifest(out, "align", args,
                    {"annotations": args.annotations, "detections": args.detections},
                    ["aligned.txt"])
    moved = sum(1 for a, b in zip(sorted(ds.annotations, key=lambda x: x.id),
                                  sorted(aligned.annotations, key=lambda x: x.id))
                if a.box != b.box)
    print(f"aligned: {moved} of {len(ds.annotations)} boxes replaced")
    return 0


def cmd_diff(args) -> int:
    _require_paths(args.annotations, args.other)
    a = read_annotations(args.annotations, format=args.format)
    b = read_annotations(args.other, format=args.format)
    out = _prepare_out(args)
    report = diff(a, b, iou_threshold=args.iou)
    items = consolidate_flags(new=b, old=a, iou_threshold=args.iou)
    (out / "review_items.csv").write_text(review_items_to_csv(items),
                                          encoding="utf-8")
    lines = ["pedbench-diff 1",
             f"matched {len(report.matched)}",
             f"a_only {len(report.a_only)}",
             f"b_only {len(report.b_only)}",
             f"agreement {report.agreement!r}"]
    (out / "diff.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    _write_manifest(out, "diff", args,
                    {"annotations": args.annotations, "other": args.other},
                    ["diff.txt", "review_items.csv"])
    print(f"diff: {len(report.matched)} matched, {len(report.a_only)} a-only, "
          f"{len(report.b_only)} b-only, agreement {report.agreement:.4f}")
    return 0


def cmd_correlates(args) -> int:
    ds, dets = _load_eval_inputs(args)
    _require_paths(args.images)
    out = _prepare_out(args)
    spec = _subset_from_args(args)
    rows = export_correlates(ds, dets, spec, FrameImageSource(args.images),
                             fppi=args.fppi, workers=args.workers)
    (out / "correlates.csv").write_text(correlates_to_csv(rows), encoding="utf-8")
    _write_manifest(out, "correlates", args,
                    {"annotations": args.annotations,
                     "detections": args.detections, "images": args.images},
                    ["correlates.csv"])
    print(f"correlates: {len(rows)} rows")
    return 0


def cmd_interp(args) -> int:
    amplitudes = [float(v) for v in args.amplitudes.split(",")]
    rows = oscillation_offset_demo(amplitudes, stride=args.stride,
                                   height=args.height)
    print("amplitude_px  mid_phase_iou  closed_form_iou")
    for r in rows:
        print(f"{r['amplitude']:>12.2f}  {r['mid_phase_iou']:.9f}  "
              f"{r['closed_form_iou']:.9f}")
    if args.out:
        out = _prepare_out(args)
        lines = ["amplitude,mid_phase_iou,closed_form_iou"]
        lines += [f"{r['amplitude']!r},{r['mid_phase_iou']!r},"
                  f"{r['closed_form_iou']!r}" for r in rows]
        (out / "interp.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        _write_manifest(out, "interp", args, {}, ["interp.csv"])
    return 0


def cmd_synth(args) -> int:
    params = SceneParams(n_frames=args.frames, gt_per_frame=args.gt_per_frame,
                         bg_fp_per_frame=args.bg_fp_per_frame,
                         loc_fp_per_frame=args.loc_fp_per_frame,
                         miss_per_frame=args.miss_per_frame,
                         tp_jitter=args.jitter)
    scene = generate_synthetic_scene(args.seed, params)
    out = _prepare_out(args)
    write_annotations(scene.dataset, out / "annotations.txt")
    write_detections(scene.detections, out / "detections.txt")
    roles = ["index,role"] + [f"{i},{r}" for i, r in enumerate(scene.roles)]
    (out / "roles.csv").write_text("\n".join(roles) + "\n", encoding="utf-8")
    _write_manifest(out, "synth", args, {},
                    ["annotations.txt", "detections.txt", "roles.csv"])
    print(f"synth: {len(scene.dataset.frames)} frames, "
          f"{len(scene.dataset.annotations)} annotations, "
          f"{len(scene.detections)} detections")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .server import AnnotationStore, create_app

    _require_paths(args.annotations, args.images, args.original, args.ui_dir)
    store = AnnotationStore(args.annotations)
    original = read_annotations(args.original) if args.original else None
    app = create_app(store, image_dir=args.images, original=original,
                     ui_dir=args.ui_dir)
    try:
        uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    except OSError as exc:
        raise PedbenchError(f"cannot bind {args.host}:{args.port}: {exc}") from exc
    return 0


if __name__ == "__main__":
    sys.exit(main())
