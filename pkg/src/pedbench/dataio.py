"""Annotation and detection file I/O, keyframe interpolation, synthetic scenes.

Frame identifiers are strings of the form ``<video>/<frame>``. The canonical
text formats are line based:

    M <free-form note>
    F <video>/<frame>
    A <video>/<frame> <id> <label> <x> <y> <w> <h> [V <vx> <vy> <vw> <vh>] <ignore:0|1> <source>
    D <video>/<frame> <x> <y> <w> <h> <score>

``F`` records declare the frame universe (empty frames included), ``M``
records carry provenance notes. Numbers are written as shortest-roundtrip
decimals, so write -> read -> write is byte identical.

A compatibility reader handles the legacy per-frame 12-field text export
(label x y w h occluded vx vy vw vh ignore angle, one file per frame), and
legacy detection CSVs (``frame,x,y,w,h,score`` with a 1-based frame index,
one file per video).
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ParseError, PedbenchError
from .geometry import BBox, DEFAULT_ASPECT_RATIO

logger = logging.getLogger(__name__)

LABELS = ("person", "people", "person?", "other")
SOURCES = ("original", "new", "pruned", "aligned", "human-baseline")


@dataclass(frozen=True)
class Annotation:
    """One ground-truth record on one frame."""

    id: str
    frame: str
    label: str
    box: BBox
    visible: BBox | None = None
    ignore: bool = False
    source: str = "original"


@dataclass(frozen=True)
class Detection:
    """One scored candidate box on one frame. Higher score = more confident."""

    frame: str
    box: BBox
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise ValueError(f"detection score must be finite, got {self.score}")


@dataclass
class Dataset:
    """A frame universe plus its annotations.

    `frames` keeps insertion order and includes empty frames; the frame
    count is the FPPI denominator downstream.
    """

    frames: list[str]
    annotations: list[Annotation]
    meta: list[str] = field(default_factory=list)

    def validate(self) -> None:
        if not self.frames:
            raise PedbenchError("dataset must contain at least one frame")
        frame_set = set(self.frames)
        if len(frame_set) != len(self.frames):
            raise PedbenchError("duplicate frame identifiers in dataset")
        seen_ids = set()
        for ann in self.annotations:
            if ann.frame not in frame_set:
                raise PedbenchError(
                    f"annotation {ann.id} references unknown frame {ann.frame}"
                )
            if ann.id in seen_ids:
                raise PedbenchError(f"duplicate annotation id {ann.id}")
            seen_ids.add(ann.id)

    def by_frame(self) -> dict[str, list[Annotation]]:
        index: dict[str, list[Annotation]] = {f: [] for f in self.frames}
        for ann in self.annotations:
            index[ann.frame].append(ann)
        return index


@dataclass(frozen=True)
class Keyframe:
    """Sparse per-track annotation used by the interpolation protocol."""

    frame_index: int
    box: BBox
    visible: BBox | None = None
    ignore: bool = False


def _fmt(value: float) -> str:
    """Shortest decimal that round-trips through float()."""
    return repr(float(value))


def group_detections(detections: list[Detection]) -> dict[str, list[Detection]]:
    """Group detections by frame id, preserving input order within a frame."""
    grouped: dict[str, list[Detection]] = {}
    for det in detections:
        grouped.setdefault(det.frame, []).append(det)
    return grouped


# ---------------------------------------------------------------------------
# canonical format

def _parse_annotation_fields(fields: list[str], path, lineno: int) -> Annotation:
    if len(fields) not in (10, 15):
        raise ParseError(path, lineno,
                         f"annotation record needs 10 or 15 fields, got {len(fields)}")
    frame, ann_id, label = fields[1], fields[2], fields[3]
    try:
        box = BBox(*[float(v) for v in fields[4:8]])
    except ValueError as exc:
        raise ParseError(path, lineno, f"bad box: {exc}") from exc
    visible = None
    rest = fields[8:]
    if len(fields) == 15:
        if rest[0] != "V":
            raise ParseError(path, lineno, "expected 'V' marker before visible box")
        try:
            visible = BBox(*[float(v) for v in rest[1:5]])
        except ValueError as exc:
            raise ParseError(path, lineno, f"bad visible box: {exc}") from exc
        rest = rest[5:]
    if rest[0] not in ("0", "1"):
        raise ParseError(path, lineno, f"ignore flag must be 0 or 1, got {rest[0]!r}")
    ignore = rest[0] == "1"
    source = rest[1]
    if label not in LABELS:
        logger.warning("%s:%d: unknown label %r kept as 'other'", path, lineno, label)
        label = "other"
    if visible is not None:
        visible = _clip_visible(visible, box, f"{path}:{lineno}")
    return Annotation(id=ann_id, frame=frame, label=label, box=box,
                      visible=visible, ignore=ignore, source=source)


def _clip_visible(visible: BBox, box: BBox, where: str) -> BBox | None:
    """Clip a visible sub-box into its full box; warn when input was noisy."""
    x1 = max(visible.x, box.x)
    y1 = max(visible.y, box.y)
    x2 = min(visible.x2, box.x2)
    y2 = min(visible.y2, box.y2)
    if x2 <= x1 or y2 <= y1:
        logger.warning("%s: visible box lies outside its annotation; dropped", where)
        return None
    clipped = BBox(x1, y1, x2 - x1, y2 - y1)
    if clipped != visible:
        logger.warning("%s: visible box clipped to its annotation", where)
    return clipped


def read_annotations(path, format: str = "canonical",
                     frames: list[str] | None = None) -> Dataset:
    """Read an annotation file (or directory, for the legacy format).

    `frames` optionally supplies/extends the frame universe, which the
    legacy format cannot always carry on its own.
    """
    if format == "canonical":
        ds = _read_canonical(Path(path))
    elif format == "caltech-text":
        ds = _read_caltech_text(Path(path))
    else:
        raise PedbenchError(f"unknown annotation format {format!r}")
    if frames:
        known = set(ds.frames)
        ds.frames.extend(f for f in frames if f not in known)
    ds.validate()
    return ds


def _read_canonical(path: Path) -> Dataset:
    frames: list[str] = []
    seen_frames: set[str] = set()
    annotations: list[Annotation] = []
    meta: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line.strip():
                continue
            fields = line.split()
            kind = fields[0]
            if kind == "M":
                meta.append(line[2:])
            elif kind == "F":
                if len(fields) != 2:
                    raise ParseError(path, lineno, "frame record needs exactly one id")
                if fields[1] in seen_frames:
                    raise ParseError(path, lineno, f"duplicate frame {fields[1]}")
                frames.append(fields[1])
                seen_frames.add(fields[1])
            elif kind == "A":
                ann = _parse_annotation_fields(fields, path, lineno)
                if ann.frame not in seen_frames:
                    frames.append(ann.frame)
                    seen_frames.add(ann.frame)
                annotations.append(ann)
            else:
                raise ParseError(path, lineno, f"unknown record type {kind!r}")
    return Dataset(frames=frames, annotations=annotations, meta=meta)


def write_annotations(ds: Dataset, path, format: str = "canonical") -> None:
    """Write a dataset; ordering is deterministic (frame order, then id)."""
    ds.validate()
    if format == "canonical":
        _write_canonical(ds, Path(path))
    elif format == "caltech-text":
        _write_caltech_text(ds, Path(path))
    else:
        raise PedbenchError(f"unknown annotation format {format!r}")


def annotation_to_line(ann: Annotation) -> str:
    """Serialize one annotation as a canonical `A` record."""
    parts = ["A", ann.frame, ann.id, ann.label,
             _fmt(ann.box.x), _fmt(ann.box.y), _fmt(ann.box.w), _fmt(ann.box.h)]
    if ann.visible is not None:
        v = ann.visible
        parts += ["V", _fmt(v.x), _fmt(v.y), _fmt(v.w), _fmt(v.h)]
    parts += ["1" if ann.ignore else "0", ann.source]
    return " ".join(parts)


def parse_annotation_line(line: str, where="<string>", lineno: int = 0) -> Annotation:
    """Parse one canonical `A` record."""
    fields = line.split()
    if not fields or fields[0] != "A":
        raise ParseError(where, lineno, "expected an 'A' record")
    return _parse_annotation_fields(fields, where, lineno)


def _write_canonical(ds: Dataset, path: Path) -> None:
    frame_order = {f: i for i, f in enumerate(ds.frames)}
    anns = sorted(ds.annotations, key=lambda a: (frame_order[a.frame], a.id))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for note in ds.meta:
            fh.write(f"M {note}\n")
        for frame in ds.frames:
            fh.write(f"F {frame}\n")
        for ann in anns:
            fh.write(annotation_to_line(ann) + "\n")


# ---------------------------------------------------------------------------
# legacy caltech-style text formats

def _split_frame_id(frame: str) -> tuple[str, str]:
    video, _, idx = frame.rpartition("/")
    return (video or "v0", idx)


def _read_caltech_text(path: Path) -> Dataset:
    """Read a directory of per-frame 12-field files (or one such file)."""
    if path.is_dir():
        files = sorted(p for p in path.rglob("*.txt") if p.is_file())
        if not files:
            raise PedbenchError(f"no .txt annotation files under {path}")
    else:
        files = [path]
    frames: list[str] = []
    annotations: list[Annotation] = []
    for file in files:
        if path.is_dir():
            rel = file.relative_to(path)
            video = "/".join(rel.parts[:-1]) or "v0"
        else:
            video = file.parent.name or "v0"
        frame = f"{video}/{file.stem}"
        frames.append(frame)
        annotations.extend(_read_caltech_frame_file(file, frame))
    return Dataset(frames=frames, annotations=annotations, meta=[])


def _read_caltech_frame_file(file: Path, frame: str) -> list[Annotation]:
    out: list[Annotation] = []
    with open(file, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            fields = line.split()
            if len(fields) != 12:
                raise ParseError(file, lineno,
                                 f"expected 12 fields, got {len(fields)}")
            label = fields[0]
            try:
                x, y, w, h = (float(v) for v in fields[1:5])
                occluded = int(float(fields[5]))
                vx, vy, vw, vh = (float(v) for v in fields[6:10])
                ignore = int(float(fields[10]))
                float(fields[11])  # angle: parsed, preserved nowhere (unused)
            except ValueError as exc:
                raise ParseError(file, lineno, f"bad number: {exc}") from exc
            try:
                box = BBox(x, y, w, h)
            except ValueError as exc:
                raise ParseError(file, lineno, f"bad box: {exc}") from exc
            visible = None
            if vw > 0 and vh > 0:
                if not occluded:
                    logger.warning("%s:%d: visible box present but occluded flag is 0",
                                   file, lineno)
                visible = _clip_visible(BBox(vx, vy, vw, vh), box, f"{file}:{lineno}")
            elif occluded:
                logger.warning("%s:%d: occluded flag set but visible box empty",
                               file, lineno)
            if label not in LABELS:
                logger.warning("%s:%d: unknown label %r kept as 'other'",
                               file, lineno, label)
                label = "other"
            out.append(Annotation(
                id=f"{frame}:{lineno}", frame=frame, label=label, box=box,
                visible=visible, ignore=bool(ignore), source="original"))
    return out


def _write_caltech_text(ds: Dataset, root: Path) -> None:
    root.mkdir(parents=True, exist_ok=True)
    by_frame = ds.by_frame()
    for frame in ds.frames:
        video, idx = _split_frame_id(frame)
        directory = root / video
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / f"{idx}.txt", "w", encoding="utf-8", newline="\n") as fh:
            for ann in sorted(by_frame[frame], key=lambda a: a.id):
                v = ann.visible
                occluded = 1 if v is not None else 0
                vals = [ann.label,
                        _fmt(ann.box.x), _fmt(ann.box.y), _fmt(ann.box.w), _fmt(ann.box.h),
                        str(occluded)]
                vals += [_fmt(v.x), _fmt(v.y), _fmt(v.w), _fmt(v.h)] if v is not None \
                    else ["0", "0", "0", "0"]
                vals += ["1" if ann.ignore else "0", "0"]
                fh.write(" ".join(vals) + "\n")


# ---------------------------------------------------------------------------
# detections

def read_detections(path, format: str = "auto") -> list[Detection]:
    """Read detections from canonical `D` records or a legacy CSV file.

    `auto` sniffs the first non-empty line. CSV frame indices (1-based by
    convention) are mapped to `<file-stem>/<index>` frame ids.
    """
    path = Path(path)
    if format == "auto":
        format = _sniff_detection_format(path)
    if format == "canonical":
        return _read_detections_canonical(path)
    if format == "caltech-csv":
        return _read_detections_csv(path)
    raise PedbenchError(f"unknown detection format {format!r}")


def _sniff_detection_format(path: Path) -> str:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                return "canonical" if line.lstrip().startswith("D ") else "caltech-csv"
    return "canonical"


def _read_detections_canonical(path: Path) -> list[Detection]:
    out: list[Detection] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split()
            if fields[0] != "D" or len(fields) != 7:
                raise ParseError(path, lineno, "detection record is 'D <frame> <x> <y> <w> <h> <score>'")
            try:
                box = BBox(*[float(v) for v in fields[2:6]])
                score = float(fields[6])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
            try:
                out.append(Detection(frame=fields[1], box=box, score=score))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return out


def _read_detections_csv(path: Path) -> list[Detection]:
    video = path.stem
    out: list[Detection] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            fields = line.split(",")
            if len(fields) != 6:
                raise ParseError(path, lineno, f"expected 6 CSV fields, got {len(fields)}")
            try:
                frame_idx = int(float(fields[0]))
                box = BBox(*[float(v) for v in fields[1:5]])
                score = float(fields[5])
            except ValueError as exc:
                raise ParseError(path, lineno, f"bad number: {exc}") from exc
            try:
                out.append(Detection(frame=f"{video}/{frame_idx}", box=box, score=score))
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from exc
    return out


def write_detections(detections: list[Detection], path) -> None:
    """Write canonical `D` records sorted by (frame, descending score)."""
    ordered = sorted(detections, key=lambda d: (d.frame, -d.score))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for det in ordered:
            b = det.box
            fh.write(f"D {det.frame} {_fmt(b.x)} {_fmt(b.y)} {_fmt(b.w)} {_fmt(b.h)} "
                     f"{_fmt(det.score)}\n")


# ---------------------------------------------------------------------------
# keyframe interpolation

def _lerp(a: float, b: float, t: float) -> float:
    return a + (b - a) * t


def interpolate_box(track: list[Keyframe], frame: float) -> BBox:
    """Box of a keyframe track at a (possibly fractional) frame position.

    Exact at keyframes; linear in x, y, w, h between them; held constant
    beyond the first/last keyframe (no extrapolation).
    """
    if not track:
        raise PedbenchError("cannot interpolate an empty track")
    if frame <= track[0].frame_index:
        return track[0].box
    if frame >= track[-1].frame_index:
        return track[-1].box
    for left, right in zip(track, track[1:]):
        if left.frame_index <= frame <= right.frame_index:
            if frame == left.frame_index:
                return left.box
            if frame == right.frame_index:
                return right.box
            t = (frame - left.frame_index) / (right.frame_index - left.frame_index)
            a, b = left.box, right.box
            return BBox(_lerp(a.x, b.x, t), _lerp(a.y, b.y, t),
                        _lerp(a.w, b.w, t), _lerp(a.h, b.h, t))
    raise AssertionError("unreachable: keyframes are strictly increasing")


def interpolate_keyframes(track: list[Keyframe], frame_range: range,
                          video: str = "v0", label: str = "person",
                          track_id: str = "t0") -> list[Annotation]:
    """Densify a sparse keyframe track into one annotation per frame.

    The visible box is interpolated only between two keyframes that both
    carry one; the ignore flag holds from the left bracketing keyframe.
    """
    if not track:
        raise PedbenchError("cannot interpolate an empty track")
    for a, b in zip(track, track[1:]):
        if b.frame_index <= a.frame_index:
            raise PedbenchError("keyframes must be strictly increasing in frame index")
    out: list[Annotation] = []
    for f in frame_range:
        box = interpolate_box(track, f)
        visible = _interp_visible(track, f)
        ignore = _left_keyframe(track, f).ignore
        out.append(Annotation(id=f"{track_id}.{f}", frame=f"{video}/{f}",
                              label=label, box=box, visible=visible, ignore=ignore))
    return out


def _left_keyframe(track: list[Keyframe], frame: float) -> Keyframe:
    left = track[0]
    for kf in track:
        if kf.frame_index <= frame:
            left = kf
        else:
            break
    return left


def _interp_visible(track: list[Keyframe], frame: int) -> BBox | None:
    if frame <= track[0].frame_index:
        return track[0].visible
    if frame >= track[-1].frame_index:
        return track[-1].visible
    for left, right in zip(track, track[1:]):
        if left.frame_index <= frame <= right.frame_index:
            if frame == left.frame_index:
                return left.visible
            if frame == right.frame_index:
                return right.visible
            if left.visible is None or right.visible is None:
                return None
            t = (frame - left.frame_index) / (right.frame_index - left.frame_index)
            a, b = left.visible, right.visible
            return BBox(_lerp(a.x, b.x, t), _lerp(a.y, b.y, t),
                        _lerp(a.w, b.w, t), _lerp(a.h, b.h, t))
    return None


# ---------------------------------------------------------------------------
# synthetic scenes

@dataclass(frozen=True)
class SceneParams:
    """Knobs for synthetic scene generation.

    Ground truth lives in the left band of the frame, ignore regions in a
    middle band and background false positives in the right band, so box
    roles assigned at generation time are guaranteed by construction:
    background FPs have zero overlap with every annotation.
    """

    n_frames: int = 10
    gt_per_frame: int = 1
    miss_per_frame: int = 0       # trailing GT left with no detection
    loc_fp_per_frame: int = 0     # extra detections on already-detected GT
    bg_fp_per_frame: int = 0
    ignore_per_frame: int = 0
    absorbed_per_frame: int = 0   # detections dropped inside ignore regions
    frame_w: float = 640.0
    frame_h: float = 480.0
    height_range: tuple[float, float] = (80.0, 200.0)
    aspect: float = DEFAULT_ASPECT_RATIO
    tp_jitter: float = 0.0        # relative translation jitter of TP boxes
    tp_score_range: tuple[float, float] = (0.5, 1.0)
    fp_score_range: tuple[float, float] = (0.5, 1.0)

    def check(self) -> None:
        if self.n_frames < 1:
            raise PedbenchError("need at least one frame")
        if self.miss_per_frame > self.gt_per_frame:
            raise PedbenchError("cannot miss more GT than exist")
        detected = self.gt_per_frame - self.miss_per_frame
        if self.loc_fp_per_frame > detected:
            raise PedbenchError("localisation FPs need a detected GT each")
        if self.absorbed_per_frame > 0 and self.ignore_per_frame == 0:
            raise PedbenchError("absorbed detections need an ignore region")
        if not (0 <= self.tp_jitter <= 0.1):
            raise PedbenchError("tp_jitter must be within [0, 0.1]")


@dataclass
class SyntheticScene:
    """Scene with generation-time ground truth about every detection's role."""

    dataset: Dataset
    detections: list[Detection]
    roles: list[str]  # aligned with detections: tp | fp-loc | fp-bg | absorbed


def generate_synthetic_scene(seed: int, params: SceneParams) -> SyntheticScene:
    """Deterministic scene with a known TP/FP/FN structure.

    Pure function of (seed, params): the same inputs always produce the
    same datasets and detections.
    """
    params.check()
    rng = random.Random(seed)
    frames: list[str] = []
    annotations: list[Annotation] = []
    detections: list[Detection] = []
    roles: list[str] = []
    gt_band = (0.0, 0.40 * params.frame_w)
    ign_band = (0.44 * params.frame_w, 0.56 * params.frame_w)
    bg_band = (0.60 * params.frame_w, params.frame_w)

    for f in range(params.n_frames):
        frame = f"v0/{f}"
        frames.append(frame)
        gts = _place_boxes(rng, params, params.gt_per_frame, gt_band)
        detected = params.gt_per_frame - params.miss_per_frame
        for i, box in enumerate(gts):
            annotations.append(Annotation(
                id=f"g{f}.{i}", frame=frame, label="person", box=box))
        ignores = _place_boxes(rng, params, params.ignore_per_frame, ign_band)
        for i, box in enumerate(ignores):
            annotations.append(Annotation(
                id=f"i{f}.{i}", frame=frame, label="people", box=box, ignore=True))

        for i, box in enumerate(gts[:detected]):
            det_box = _jitter(rng, box, params.tp_jitter)
            detections.append(Detection(frame=frame, box=det_box,
                                        score=rng.uniform(*params.tp_score_range)))
            roles.append("tp")
            if i < params.loc_fp_per_frame:
                # second detection on the same person: shifted enough to lose
                # the greedy match, overlapping enough to classify as loc
                dup = BBox(box.x + 0.4 * box.w, box.y, box.w, box.h)
                detections.append(Detection(frame=frame, box=dup,
                                            score=rng.uniform(*params.fp_score_range)))
                roles.append("fp-loc")
        for box in _place_boxes(rng, params, params.bg_fp_per_frame, bg_band):
            detections.append(Detection(frame=frame, box=box,
                                        score=rng.uniform(*params.fp_score_range)))
            roles.append("fp-bg")
        for i in range(params.absorbed_per_frame):
            region = ignores[i % len(ignores)]
            inner = BBox(region.x + region.w * 0.25, region.y + region.h * 0.25,
                         region.w * 0.5, region.h * 0.5)
            detections.append(Detection(frame=frame, box=inner,
                                        score=rng.uniform(*params.fp_score_range)))
            roles.append("absorbed")

    ds = Dataset(frames=frames, annotations=annotations,
                 meta=[f"synthetic seed={seed}"])
    ds.validate()
    return SyntheticScene(dataset=ds, detections=detections, roles=roles)


def _place_boxes(rng: random.Random, params: SceneParams, count: int,
                 band: tuple[float, float]) -> list[BBox]:
    """Non-overlapping boxes inside a horizontal band, one per column slot."""
    if count == 0:
        return []
    boxes = []
    slot_w = (band[1] - band[0]) / count
    for i in range(count):
        h = rng.uniform(*params.height_range)
        h = min(h, params.frame_h - 1)
        w = params.aspect * h
        x0 = band[0] + i * slot_w
        x = x0 + rng.uniform(0, max(slot_w - w, 0) * 0.45)
        y = rng.uniform(0, max(params.frame_h - h, 0))
        boxes.append(BBox(x, y, w, h))
    return boxes


def _jitter(rng: random.Random, box: BBox, amount: float) -> BBox:
    if amount == 0.0:
        return box
    dx = rng.uniform(-amount, amount) * box.w
    dy = rng.uniform(-amount, amount) * box.h
    return BBox(box.x + dx, box.y + dy, box.w, box.h)


# ---------------------------------------------------------------------------
# interpolation offset demonstration

def oscillation_offset_demo(amplitudes: list[float], stride: int = 30,
                            height: float = 100.0,
                            aspect: float = DEFAULT_ASPECT_RATIO) -> list[dict]:
    """Quantify the offset the keyframe protocol bakes into a bobbing walk.

    A pedestrian walks with a vertical oscillation of the given amplitude
    and period equal to the keyframe stride, so every keyframe samples the
    oscillation at zero phase and the interpolated track is flat. At the
    quarter-period instant the true box sits a full amplitude away; the
    returned rows compare the interpolated box against the truth there and
    against the closed-form IoU of two equal boxes offset vertically.
    """
    from .geometry import iou  # local import: geometry does not import dataio

    rows = []
    w = aspect * height
    for amp in amplitudes:
        track = [Keyframe(frame_index=k * stride,
                          box=BBox(50.0, 200.0 + amp * math.sin(2 * math.pi * k), w, height))
                 for k in range(3)]
        t_mid = stride / 4
        interp = interpolate_box(track, t_mid)
        truth = BBox(50.0, 200.0 + amp * math.sin(2 * math.pi * t_mid / stride), w, height)
        offset_iou = iou(interp, truth)
        closed_form = (height - amp) / (height + amp) if amp < height else 0.0
        rows.append({"amplitude": amp, "mid_phase_iou": offset_iou,
                     "closed_form_iou": closed_form})
    return rows
