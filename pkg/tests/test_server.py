import json
import random

import numpy as np
import pytest
from fastapi.testclient import TestClient

from pedbench.dataio import (Annotation, Dataset, annotation_to_line,
                             write_annotations)
from pedbench.geometry import BBox, HeadFeetLine, line_to_bbox
from pedbench.images import save_pgm
from pedbench.server import AnnotationStore, create_app


def store_fixture(tmp_path, n_frames=10):
    anns = [Annotation(id=f"a{i}", frame=f"v0/{i}", label="person",
                       box=BBox(10.0 + i, 20.0, 41.0, 100.0))
            for i in range(0, n_frames, 2)]
    ds = Dataset(frames=[f"v0/{i}" for i in range(n_frames)],
                 annotations=anns, meta=["server fixture"])
    path = tmp_path / "store.txt"
    write_annotations(ds, path)
    return AnnotationStore(path), ds, path


def make_client(tmp_path, **kwargs):
    store, ds, path = store_fixture(tmp_path)
    app = create_app(store, **kwargs)
    return TestClient(app), store, ds, path


class TestFramesApi:
    def test_frame_list(self, tmp_path):
        client, _, ds, _ = make_client(tmp_path)
        resp = client.get("/api/frames")
        assert resp.status_code == 200
        body = resp.json()
        assert body["schema_version"] == 1
        assert len(body["frames"]) == 10
        assert body["frames"][0] == {"id": "v0/0", "revision": 0,
                                     "annotations": 1}

    def test_get_annotations_roundtrip(self, tmp_path):
        client, _, ds, _ = make_client(tmp_path)
        resp = client.get("/api/frames/v0/0/annotations")
        assert resp.status_code == 200
        body = resp.json()
        assert body["revision"] == 0
        assert body["records"].startswith("A v0/0 a0 person")

    def test_unknown_frame_404(self, tmp_path):
        client, *_ = make_client(tmp_path)
        assert client.get("/api/frames/zzz/9/annotations").status_code == 404


class TestGeometryEndpoint:
    def test_known_example(self, tmp_path):
        client, *_ = make_client(tmp_path)
        resp = client.post("/api/geometry/line-to-bbox",
                           json={"head": [50, 10], "feet": [50, 110]})
        assert resp.status_code == 200
        assert resp.json()["box"] == {"x": 29.5, "y": 10.0, "w": 41.0, "h": 100.0}

    def test_parity_with_geometry_module(self, tmp_path):
        client, *_ = make_client(tmp_path)
        rng = random.Random(55)
        for _ in range(50):
            head = (rng.uniform(0, 640), rng.uniform(0, 480))
            feet = (head[0] + rng.uniform(-30, 30),
                    head[1] + rng.uniform(10, 200))
            resp = client.post("/api/geometry/line-to-bbox",
                               json={"head": list(head), "feet": list(feet)})
            want = line_to_bbox(HeadFeetLine(head=head, feet=feet))
            got = resp.json()["box"]
            assert (got["x"], got["y"], got["w"], got["h"]) == \
                (want.x, want.y, want.w, want.h)

    def test_degenerate_line_rejected(self, tmp_path):
        client, *_ = make_client(tmp_path)
        resp = client.post("/api/geometry/line-to-bbox",
                           json={"head": [5, 5], "feet": [5, 5]})
        assert resp.status_code == 400


class TestOptimisticConcurrency:
    def record(self, frame, ann_id="edit1", x=30.0):
        ann = Annotation(id=ann_id, frame=frame, label="person",
                         box=BBox(x, 15.0, 41.0, 100.0), source="new")
        return annotation_to_line(ann) + "\n"

    def test_put_happy_path(self, tmp_path):
        client, store, *_ = make_client(tmp_path)
        resp = client.put("/api/frames/v0/1/annotations",
                          json={"revision": 0, "records": self.record("v0/1")})
        assert resp.status_code == 200
        assert resp.json()["revision"] == 1
        records, rev = store.get_frame("v0/1")
        assert rev == 1
        assert "edit1" in records

    def test_stale_revision_conflict_leaves_store_unchanged(self, tmp_path):
        client, store, *_ = make_client(tmp_path)
        ok = client.put("/api/frames/v0/1/annotations",
                        json={"revision": 0, "records": self.record("v0/1")})
        assert ok.status_code == 200
        before = store.get_frame("v0/1")
        stale = client.put(
            "/api/frames/v0/1/annotations",
            json={"revision": 0, "records": self.record("v0/1", "sneaky", 99.0)})
        assert stale.status_code == 409
        assert stale.json()["revision"] == 1
        assert store.get_frame("v0/1") == before

    def test_wrong_frame_in_records_rejected(self, tmp_path):
        client, store, *_ = make_client(tmp_path)
        resp = client.put("/api/frames/v0/1/annotations",
                          json={"revision": 0, "records": self.record("v0/2")})
        assert resp.status_code == 400
        assert store.get_frame("v0/1")[1] == 0

    def test_journal_replays_to_current_state(self, tmp_path):
        client, store, _, path = make_client(tmp_path)
        client.put("/api/frames/v0/1/annotations",
                   json={"revision": 0, "records": self.record("v0/1")})
        client.put("/api/frames/v0/1/annotations",
                   json={"revision": 1, "records": self.record("v0/1", "edit2")})
        client.put("/api/frames/v0/3/annotations",
                   json={"revision": 0, "records": self.record("v0/3", "other")})
        reopened = AnnotationStore(path)
        assert reopened.get_frame("v0/1") == store.get_frame("v0/1")
        assert reopened.get_frame("v0/3") == store.get_frame("v0/3")
        assert reopened.get_frame("v0/1")[1] == 2

    def test_journal_lines_are_appended(self, tmp_path):
        client, store, _, path = make_client(tmp_path)
        client.put("/api/frames/v0/1/annotations",
                   json={"revision": 0, "records": self.record("v0/1")})
        journal = path.with_name(path.name + ".journal")
        lines = journal.read_text().strip().split("\n")
        assert len(lines) == 1
        entry = json.loads(lines[0])
        assert entry["frame"] == "v0/1" and entry["revision"] == 1


class TestImagesAndDiff:
    def test_image_passthrough(self, tmp_path):
        img_root = tmp_path / "imgs"
        (img_root / "v0").mkdir(parents=True)
        save_pgm(img_root / "v0" / "0.pgm", np.full((8, 8), 0.5))
        client, *_ = make_client(tmp_path, image_dir=img_root)
        resp = client.get("/api/frames/v0/0/image")
        assert resp.status_code == 200
        assert resp.content.startswith(b"P5")
        assert resp.headers["x-schema-version"] == "1"
        assert client.get("/api/frames/v0/1/image").status_code == 404

    def test_diff_endpoint(self, tmp_path):
        store, ds, path = store_fixture(tmp_path)
        original = Dataset(
            frames=list(ds.frames),
            annotations=[Annotation(id="o0", frame="v0/0", label="person",
                                    box=BBox(11.0, 20.0, 41.0, 100.0)),
                         Annotation(id="lonely", frame="v0/0", label="person",
                                    box=BBox(400.0, 20.0, 41.0, 100.0))],
            meta=[])
        client = TestClient(create_app(store, original=original))
        body = client.get("/api/diff/v0/0").json()
        assert len(body["matched"]) == 1
        assert body["matched"][0]["iou"] > 0.9
        assert [a["id"] for a in body["original_only"]] == ["lonely"]
        assert body["new_only"] == []

    def test_diff_without_original_404(self, tmp_path):
        client, *_ = make_client(tmp_path)
        assert client.get("/api/diff/v0/0").status_code == 404
