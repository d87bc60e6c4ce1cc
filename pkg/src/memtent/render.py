"""Raster output: histograms and polygon partitions as PPM (P6) or PNG.

Images are y-up: row 0 of the file is the top of the unit square.
"""

from __future__ import annotations

import colorsys
import math
from typing import Sequence

import numpy as np

from .geometry import ConvexPolygon, contains_points
from .measure import EmpiricalMeasure2D


def log_intensity(counts: np.ndarray) -> np.ndarray:
    """log(1 + c) / log(1 + max), as uint8 in 0..255."""
    counts = np.asarray(counts, dtype=np.float64)
    top = counts.max() if counts.size else 0.0
    if top <= 0:
        return np.zeros(counts.shape, dtype=np.uint8)
    scaled = np.log1p(counts) / math.log1p(top)
    return np.round(255.0 * scaled).astype(np.uint8)


def histogram_image(hist: EmpiricalMeasure2D) -> np.ndarray:
    """(R, R, 3) grayscale RGB image; white marks mass, black is empty."""
    g = log_intensity(hist.counts)[::-1]  # counts[iy, ix] has iy = 0 at the bottom
    return np.repeat(g[:, :, None], 3, axis=2)


def word_color(word: str) -> tuple[int, int, int]:
    """Deterministic, well-spread colour for a cell word over '12'."""
    k = int("1" + word.replace("1", "0").replace("2", "1"), 2) if word else 1
    hue = (k * 0.6180339887498949) % 1.0
    r, g, b = colorsys.hsv_to_rgb(hue, 0.55, 0.95)
    return int(round(255 * r)), int(round(255 * g)), int(round(255 * b))


def _edge_distance(poly: ConvexPolygon, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    v = poly.vertices
    w = np.roll(v, -1, axis=0)
    best = np.full(x.shape, np.inf)
    for (ax, ay), (bx, by) in zip(v, w):
        ex, ey = bx - ax, by - ay
        L2 = ex * ex + ey * ey
        if L2 == 0.0:
            continue
        t = np.clip(((x - ax) * ex + (y - ay) * ey) / L2, 0.0, 1.0)
        best = np.minimum(best, np.hypot(x - ax - t * ex, y - ay - t * ey))
    return best


def polygons_image(polygons: Sequence[ConvexPolygon], resolution: int, stroke: float = 0.6,
                   background=(255, 255, 255), edge=(20, 20, 20)) -> np.ndarray:
    """Fill each polygon with its word colour and stroke its boundary (width in pixels)."""
    R = resolution
    img = np.empty((R, R, 3), dtype=np.uint8)
    img[:] = background
    c = (np.arange(R) + 0.5) / R
    px = 1.0 / R
    for poly in polygons:
        if len(poly) < 3:
            continue
        lo = np.clip(np.floor(poly.vertices.min(axis=0) * R).astype(int) - 1, 0, R - 1)
        hi = np.clip(np.ceil(poly.vertices.max(axis=0) * R).astype(int) + 1, 0, R - 1)
        xs, ys = np.meshgrid(c[lo[0]:hi[0] + 1], c[lo[1]:hi[1] + 1])
        inside = contains_points(poly, xs, ys)
        rows = R - 1 - np.arange(lo[1], hi[1] + 1)
        sub = img[rows][:, lo[0]:hi[0] + 1]
        sub[inside] = word_color(poly.word)
        sub[_edge_distance(poly, xs, ys) <= stroke * px] = edge
        img[rows, lo[0]:hi[0] + 1] = sub
    return img


def encode_ppm(img: np.ndarray) -> bytes:
    img = np.ascontiguousarray(img, dtype=np.uint8)
    h, w = img.shape[:2]
    return b"P6\n%d %d\n255\n" % (w, h) + img.tobytes()


def encode_png(img: np.ndarray) -> bytes:
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover - depends on environment
        raise RuntimeError("PNG output needs Pillow; use --format ppm") from exc
    import io

    buf = io.BytesIO()
    Image.fromarray(np.ascontiguousarray(img, dtype=np.uint8), "RGB").save(buf, format="PNG")
    return buf.getvalue()


def encode(img: np.ndarray, fmt: str) -> bytes:
    if fmt == "ppm":
        return encode_ppm(img)
    if fmt == "png":
        return encode_png(img)
    raise ValueError(f"unsupported image format {fmt!r}")


def decode_ppm(data: bytes) -> np.ndarray:
    """Inverse of :func:`encode_ppm` (only the exact header it writes)."""
    parts = data.split(b"\n", 3)
    if parts[0] != b"P6" or parts[2] != b"255":
        raise ValueError("not a P6 image with maxval 255")
    w, h = map(int, parts[1].split())
    return np.frombuffer(parts[3], dtype=np.uint8).reshape(h, w, 3)
