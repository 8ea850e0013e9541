"""Local HTTP service for the review/annotation UI.

The store is server-authoritative: geometry requests (line to box) are
answered by the geometry module, and annotation writes go through
optimistic concurrency with per-frame revision counters. Every accepted
write is appended to a journal file next to the store, and replaying the
journal over the base file reproduces the current state.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse

from . import geometry, sanitize
from .dataio import (Annotation, Dataset, annotation_to_line,
                     parse_annotation_line, read_annotations)
from .errors import PedbenchError
from .images import FrameImageSource

SCHEMA_VERSION = 1


class AnnotationStore:
    """Journaled, revision-counted annotation store for one dataset file."""

    def __init__(self, path):
        self.path = Path(path)
        self.journal_path = self.path.with_name(self.path.name + ".journal")
        self._lock = threading.Lock()
        ds = read_annotations(self.path, format="canonical")
        self.frames: list[str] = list(ds.frames)
        self.meta = list(ds.meta)
        self._records: dict[str, list[Annotation]] = ds.by_frame()
        self._revisions: dict[str, int] = {f: 0 for f in self.frames}
        self._replay_journal()

    def _replay_journal(self) -> None:
        if not self.journal_path.exists():
            return
        with open(self.journal_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                entry = json.loads(line)
                frame = entry["frame"]
                self._records[frame] = _parse_records(entry["records"], frame)
                self._revisions[frame] = entry["revision"]

    def list_frames(self) -> list[dict]:
        with self._lock:
            return [{"id": f, "revision": self._revisions[f],
                     "annotations": len(self._records[f])}
                    for f in self.frames]

    def get_frame(self, frame: str) -> tuple[str, int] | None:
        with self._lock:
            if frame not in self._revisions:
                return None
            records = "".join(annotation_to_line(a) + "\n"
                              for a in sorted(self._records[frame], key=lambda a: a.id))
            return records, self._revisions[frame]

    def put_frame(self, frame: str, revision: int, records: str) -> tuple[bool, int]:
        """Apply a full-frame write; returns (accepted, current_revision)."""
        annotations = _parse_records(records, frame)
        with self._lock:
            if frame not in self._revisions:
                raise KeyError(frame)
            current = self._revisions[frame]
            if revision != current:
                return False, current
            new_rev = current + 1
            with open(self.journal_path, "a", encoding="utf-8", newline="\n") as fh:
                fh.write(json.dumps({"frame": frame, "revision": new_rev,
                                     "records": records}) + "\n")
            self._records[frame] = annotations
            self._revisions[frame] = new_rev
            return True, new_rev

    def dataset(self) -> Dataset:
        with self._lock:
            anns = [a for f in self.frames for a in self._records[f]]
            return Dataset(frames=list(self.frames), annotations=anns,
                           meta=list(self.meta))


def _parse_records(text: str, frame: str) -> list[Annotation]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        ann = parse_annotation_line(line, "<request>", lineno)
        if ann.frame != frame:
            raise PedbenchError(
                f"line {lineno}: record frame {ann.frame} != target {frame}")
        out.append(ann)
    ids = [a.id for a in out]
    if len(set(ids)) != len(ids):
        raise PedbenchError("duplicate annotation ids in request")
    return out


def _ann_to_json(ann: Annotation) -> dict:
    box = {"x": ann.box.x, "y": ann.box.y, "w": ann.box.w, "h": ann.box.h}
    visible = None
    if ann.visible is not None:
        v = ann.visible
        visible = {"x": v.x, "y": v.y, "w": v.w, "h": v.h}
    return {"id": ann.id, "label": ann.label, "box": box, "visible": visible,
            "ignore": ann.ignore, "source": ann.source}


def create_app(store: AnnotationStore, image_dir=None, original: Dataset | None = None,
               ui_dir=None, diff_iou: float = 0.5) -> FastAPI:
    """Assemble the API; `original` enables the original-vs-new diff overlay."""
    app = FastAPI(title="pedbench review service")
    images = FrameImageSource(image_dir) if image_dir else None
    ui_root = Path(ui_dir) if ui_dir else None

    def envelope(payload: dict, status: int = 200) -> JSONResponse:
        payload = {"schema_version": SCHEMA_VERSION, **payload}
        return JSONResponse(payload, status_code=status,
                            headers={"X-Schema-Version": str(SCHEMA_VERSION)})

    @app.get("/api/frames")
    def frames():
        return envelope({"frames": store.list_frames()})

    @app.get("/api/frames/{frame_id:path}/image")
    def frame_image(frame_id: str):
        if images is None:
            return envelope({"error": "no image directory configured"}, 404)
        path = images.path_for(frame_id)
        if path is None:
            return envelope({"error": f"no image for frame {frame_id}"}, 404)
        media = "image/png" if path.suffix == ".png" else "image/x-portable-graymap"
        return FileResponse(path, media_type=media,
                            headers={"X-Schema-Version": str(SCHEMA_VERSION)})

    @app.get("/api/frames/{frame_id:path}/annotations")
    def get_annotations(frame_id: str):
        result = store.get_frame(frame_id)
        if result is None:
            return envelope({"error": f"unknown frame {frame_id}"}, 404)
        records, revision = result
        return envelope({"frame": frame_id, "revision": revision,
                         "records": records})

    @app.put("/api/frames/{frame_id:path}/annotations")
    async def put_annotations(frame_id: str, request: Request):
        body = await request.json()
        if not isinstance(body, dict) or "revision" not in body or "records" not in body:
            return envelope({"error": "body needs 'revision' and 'records'"}, 400)
        try:
            accepted, revision = store.put_frame(frame_id, int(body["revision"]),
                                                 str(body["records"]))
        except KeyError:
            return envelope({"error": f"unknown frame {frame_id}"}, 404)
        except PedbenchError as exc:
            return envelope({"error": str(exc)}, 400)
        if not accepted:
            return envelope({"error": "stale revision", "revision": revision}, 409)
        return envelope({"frame": frame_id, "revision": revision})

    @app.post("/api/geometry/line-to-bbox")
    async def line_to_bbox(request: Request):
        body = await request.json()
        try:
            head = tuple(float(v) for v in body["head"])
            feet = tuple(float(v) for v in body["feet"])
            aspect = float(body.get("aspect", geometry.DEFAULT_ASPECT_RATIO))
            line = geometry.HeadFeetLine(head=head, feet=feet)
            box = geometry.line_to_bbox(line, aspect)
        except (KeyError, TypeError, ValueError) as exc:
            return envelope({"error": f"bad line: {exc}"}, 400)
        return envelope({"box": {"x": box.x, "y": box.y, "w": box.w, "h": box.h}})

    @app.get("/api/diff/{frame_id:path}")
    def frame_diff(frame_id: str):
        if original is None:
            return envelope({"error": "no original annotation set configured"}, 404)
        if frame_id not in set(store.frames) or frame_id not in set(original.frames):
            return envelope({"error": f"unknown frame {frame_id}"}, 404)
        current = store.dataset()
        orig_one = _single_frame(original, frame_id)
        cur_one = _single_frame(current, frame_id)
        report = sanitize.diff(orig_one, cur_one, diff_iou)
        return envelope({
            "frame": frame_id,
            "matched": [{"original": _ann_to_json(a), "new": _ann_to_json(b),
                         "iou": v} for a, b, v in report.matched],
            "original_only": [_ann_to_json(a) for a in report.a_only],
            "new_only": [_ann_to_json(b) for b in report.b_only],
            "agreement": report.agreement,
            "original_ignores": [_ann_to_json(a) for a in orig_one.annotations
                                 if a.ignore],
            "new_ignores": [_ann_to_json(a) for a in cur_one.annotations
                            if a.ignore],
        })

    @app.get("/")
    def index():
        if ui_root and (ui_root / "index.html").is_file():
            return FileResponse(ui_root / "index.html", media_type="text/html")
        return PlainTextResponse(
            "pedbench review service. API under /api/; no UI bundle configured.")

    @app.get("/assets/{asset_path:path}")
    def assets(asset_path: str):
        if not ui_root:
            return Response(status_code=404)
        target = (ui_root / "assets" / asset_path).resolve()
        if not str(target).startswith(str(ui_root.resolve())) or not target.is_file():
            return Response(status_code=404)
        media = {"js": "text/javascript", "css": "text/css",
                 "html": "text/html", "map": "application/json"}.get(
                     target.suffix.lstrip("."), "application/octet-stream")
        return FileResponse(target, media_type=media)

    return app


def _single_frame(ds: Dataset, frame: str) -> Dataset:
    return Dataset(frames=[frame],
                   annotations=[a for a in ds.annotations if a.frame == frame],
                   meta=[])
