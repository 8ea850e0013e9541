"""Grayscale image access for patch measures and the review server.

Native support is 8-bit binary PGM (P5); PNG goes through a thin Pillow
decoding boundary. All loads return float64 arrays scaled to [0, 1].
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import PedbenchError

IMAGE_SUFFIXES = (".pgm", ".png")


def load_grayscale(path) -> np.ndarray:
    """Load an image as a (h, w) float array in [0, 1]."""
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        return _read_pgm(path) / 255.0
    if path.suffix.lower() == ".png":
        from PIL import Image

        with Image.open(path) as img:
            return np.asarray(img.convert("L"), dtype=np.float64) / 255.0
    raise PedbenchError(f"unsupported image container {path.suffix!r}")


def _read_pgm(path: Path) -> np.ndarray:
    data = path.read_bytes()
    if not data.startswith(b"P5"):
        raise PedbenchError(f"{path}: not a binary PGM (P5) file")
    # header: magic, width, height, maxval; '#' comments allowed between tokens
    tokens = []
    pos = 2
    while len(tokens) < 3:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos] != 0x0A:
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise PedbenchError(f"{path}: bad PGM header") from exc
    if maxval > 255:
        raise PedbenchError(f"{path}: only 8-bit PGM supported (maxval {maxval})")
    pixels = np.frombuffer(data, dtype=np.uint8, count=width * height, offset=pos)
    if pixels.size != width * height:
        raise PedbenchError(f"{path}: truncated PGM payload")
    return pixels.reshape(height, width).astype(np.float64)


def save_pgm(path, image: np.ndarray) -> None:
    """Write a [0, 1] float or uint8 array as binary PGM."""
    arr = np.asarray(image)
    if arr.dtype != np.uint8:
        arr = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    h, w = arr.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(arr.tobytes())


class FrameImageSource:
    """Resolves frame ids to images under a root directory.

    Looks for `<root>/<video>/<frame>.pgm` then `.png`.
    """

    def __init__(self, root):
        self.root = Path(root)

    def path_for(self, frame_id: str) -> Path | None:
        for suffix in IMAGE_SUFFIXES:
            candidate = self.root / f"{frame_id}{suffix}"
            if candidate.is_file():
                return candidate
        return None

    def __call__(self, frame_id: str) -> np.ndarray | None:
        path = self.path_for(frame_id)
        return load_grayscale(path) if path else None
