"""Convex polygons and directed segments under affine maps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

#: Signed distances below this are treated as "on the cutting line".
CUT_EPS = 1e-13


@dataclass(frozen=True)
class DirectedSegment:
    """Points base + t*dir for t in [a, b]; ``dir`` is a unit vector."""

    base: tuple[float, float]
    dir: tuple[float, float]
    a: float = 0.0
    b: float = 1.0

    @classmethod
    def from_endpoints(cls, p, q) -> "DirectedSegment":
        dx, dy = q[0] - p[0], q[1] - p[1]
        n = math.hypot(dx, dy)
        if n == 0.0:
            return cls((float(p[0]), float(p[1])), (1.0, 0.0), 0.0, 0.0)
        return cls((float(p[0]), float(p[1])), (dx / n, dy / n), 0.0, n)

    @property
    def length(self) -> float:
        return self.b - self.a

    def point(self, t):
        """Point(s) at parameter t; arrays give arrays of shape (..., 2)."""
        t = np.asarray(t, dtype=float)
        return np.stack([self.base[0] + t * self.dir[0], self.base[1] + t * self.dir[1]], axis=-1)

    @property
    def endpoints(self):
        return self.point(self.a), self.point(self.b)

    def to_json(self) -> dict:
        p, q = self.endpoints
        return {"start": [float(p[0]), float(p[1])], "end": [float(q[0]), float(q[1])]}


def shoelace(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


@dataclass
class ConvexPolygon:
    vertices: np.ndarray  # (k, 2), counterclockwise
    word: str = ""
    area: float = field(init=False)

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        a = shoelace(self.vertices) if len(self.vertices) >= 3 else 0.0
        if a < 0:
            self.vertices = self.vertices[::-1].copy()
            a = -a
        self.area = a

    @classmethod
    def unit_square(cls) -> "ConvexPolygon":
        return cls(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))

    def __len__(self):
        return len(self.vertices)

    @property
    def empty(self) -> bool:
        return len(self.vertices) == 0

    def split(self, a: float, b: float, c: float) -> tuple["ConvexPolygon", "ConvexPolygon"]:
        """Split by the line a*x + b*y + c = 0 into (side <= 0, side >= 0)."""
        return clip_halfplane(self, a, b, c, keep_negative=True), clip_halfplane(self, a, b, c, keep_negative=False)

    def transformed(self, linear: np.ndarray, offset: np.ndarray, word: str | None = None) -> "ConvexPolygon":
        v = self.vertices @ linear.T + offset
        return ConvexPolygon(v, self.word if word is None else word)

    def contains(self, p, tol: float = 1e-9) -> bool:
        """Point inclusion with slack ``tol``; near-zero-length edges are ignored."""
        v = self.vertices
        if len(v) == 0:
            return False
        if len(v) == 1:
            return math.hypot(p[0] - v[0, 0], p[1] - v[0, 1]) <= tol
        e = np.roll(v, -1, axis=0) - v
        lengths = np.hypot(e[:, 0], e[:, 1])
        ok = lengths > 1e-14
        if not ok.any():
            return math.hypot(p[0] - v[0, 0], p[1] - v[0, 1]) <= tol
        e, v0, lengths = e[ok], v[ok], lengths[ok]
        # left-of-edge test for a ccw polygon
        cross = e[:, 0] * (p[1] - v0[:, 1]) - e[:, 1] * (p[0] - v0[:, 0])
        return bool(np.all(cross / lengths >= -tol))

    def to_json(self) -> dict:
        return {"word": self.word, "area": self.area, "vertices": self.vertices.tolist()}


def clip_halfplane(poly: ConvexPolygon, a: float, b: float, c: float, keep_negative: bool = True) -> ConvexPolygon:
    """Sutherland-Hodgman against one half-plane; vertices within CUT_EPS of the line are shared."""
    v = poly.vertices
    if len(v) == 0:
        return ConvexPolygon(np.empty((0, 2)), poly.word)
    norm = math.hypot(a, b)
    s = (v @ np.array([a, b]) + c) / norm
    if not keep_negative:
        s = -s
    s = np.where(np.abs(s) <= CUT_EPS, 0.0, s)
    if np.all(s <= 0.0):
        return ConvexPolygon(v.copy(), poly.word)
    if np.all(s >= 0.0):
        on = v[s == 0.0]
        return ConvexPolygon(on if len(on) < 3 else np.empty((0, 2)), poly.word)
    out = []
    k = len(v)
    for i in range(k):
        j = (i + 1) % k
        si, sj = s[i], s[j]
        if si <= 0.0:
            out.append(v[i])
        if (si < 0.0 < sj) or (sj < 0.0 < si):
            t = si / (si - sj)
            out.append(v[i] + t * (v[j] - v[i]))
    return ConvexPolygon(np.array(out), poly.word)


def contains_points(poly: ConvexPolygon, x: np.ndarray, y: np.ndarray, tol: float = 0.0) -> np.ndarray:
    """Vectorized :meth:`ConvexPolygon.contains`; returns a boolean mask."""
    v = poly.vertices
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(v) < 3:
        return np.zeros(x.shape, dtype=bool)
    e = np.roll(v, -1, axis=0) - v
    lengths = np.hypot(e[:, 0], e[:, 1])
    ok = lengths > 1e-14
    e, v0, lengths = e[ok], v[ok], lengths[ok]
    inside = np.ones(x.shape, dtype=bool)
    for (ex, ey), (vx, vy), ln in zip(e, v0, lengths):
        inside &= (ex * (y - vy) - ey * (x - vx)) / ln >= -tol
    return inside
