"""Monte Carlo estimators of the SRB measure and related sets.

Orbits of many starts are advanced together with numpy; every per-start
quantity is computed elementwise, so results do not depend on how starts are
grouped into chunks or workers.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import rng
from .core import MapParams, as_point, itinerary_arrays
from .errors import InconclusiveError
from .geometry import DirectedSegment
from .partition import StableFiber, fiber_lengths, in_stable_core_arrays, partition_polygons

ORBIT_BLOCK = 2048


# -- observables --------------------------------------------------------------

@dataclass(frozen=True)
class Observable:
    """One of a fixed family of bounded test functions on the square."""

    kind: str
    rect: Optional[tuple[float, float, float, float]] = None  # x0, x1, y0, y1

    KINDS = ("coord-x", "coord-y", "product-xy", "box")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown observable {self.kind!r}")
        if self.kind == "box":
            if self.rect is None:
                raise ValueError("box observable needs a rectangle")
            x0, x1, y0, y1 = self.rect
            if not (0.0 <= x0 <= x1 <= 1.0 and 0.0 <= y0 <= y1 <= 1.0):
                raise ValueError(f"box {self.rect} must lie in the unit square")

    @classmethod
    def parse(cls, text: str) -> "Observable":
        """'coord-x', 'coord-y', 'product-xy' or 'box:x0,x1,y0,y1'."""
        if text.startswith("box:"):
            return cls("box", tuple(float(t) for t in text[4:].split(",")))
        return cls(text)

    def __call__(self, x, y):
        if self.kind == "coord-x":
            return np.asarray(x, dtype=float)
        if self.kind == "coord-y":
            return np.asarray(y, dtype=float)
        if self.kind == "product-xy":
            return np.asarray(x) * np.asarray(y)
        x0, x1, y0, y1 = self.rect
        x, y = np.asarray(x), np.asarray(y)
        return ((x >= x0) & (x < x1) & (y >= y0) & (y < y1)).astype(float)

    def __str__(self):
        if self.kind == "box":
            return "box:" + ",".join(repr(v) for v in self.rect)
        return self.kind


COORD_X = Observable("coord-x")
COORD_Y = Observable("coord-y")


# -- histogram ----------------------------------------------------------------

HIST_MAGIC = b"MEMTENT-HIST\n"


@dataclass
class EmpiricalMeasure2D:
    """Counts on an R x R grid; ``counts[iy, ix]`` covers the cell at (ix/R, iy/R)."""

    resolution: int
    counts: np.ndarray = None
    total: int = 0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.counts is None:
            self.counts = np.zeros((self.resolution, self.resolution), dtype=np.int64)

    def add(self, x, y) -> None:
        R = self.resolution
        ix = np.minimum((np.asarray(x).ravel() * R).astype(np.int64), R - 1)
        iy = np.minimum((np.asarray(y).ravel() * R).astype(np.int64), R - 1)
        self.counts += np.bincount(iy * R + ix, minlength=R * R).reshape(R, R)
        self.total += ix.size

    def merge(self, other: "EmpiricalMeasure2D") -> None:
        if other.resolution != self.resolution:
            raise ValueError("resolution mismatch")
        self.counts += other.counts
        self.total += other.total

    def normalized(self) -> np.ndarray:
        return self.counts / self.total if self.total else self.counts.astype(float)

    def integrate(self, g: Observable) -> float:
        """Integral of g against the normalized histogram, using cell centers."""
        c = (np.arange(self.resolution) + 0.5) / self.resolution
        X, Y = np.meshgrid(c, c)
        return float(np.sum(self.normalized() * g(X, Y)))

    @property
    def occupied(self) -> int:
        return int(np.count_nonzero(self.counts))

    @property
    def occupied_fraction(self) -> float:
        return self.occupied / self.counts.size

    def coarsened(self, factor: int) -> "EmpiricalMeasure2D":
        R = self.resolution // factor
        c = self.counts.reshape(R, factor, R, factor).sum(axis=(1, 3))
        return EmpiricalMeasure2D(R, c, self.total, dict(self.meta))

    def to_bytes(self) -> bytes:
        header = dict(self.meta, resolution=self.resolution, total=self.total, dtype="<u8", order="row-major, row index = y bin")
        return HIST_MAGIC + json.dumps(header, sort_keys=True).encode() + b"\n" + self.counts.astype("<u8").tobytes()

    @classmethod
    def from_bytes(cls, data: bytes) -> "EmpiricalMeasure2D":
        if not data.startswith(HIST_MAGIC):
            raise ValueError("not a histogram dump")
        rest = data[len(HIST_MAGIC):]
        nl = rest.index(b"\n")
        header = json.loads(rest[:nl])
        R = header.pop("resolution")
        total = header.pop("total")
        header.pop("dtype"), header.pop("order")
        counts = np.frombuffer(rest[nl + 1:], dtype="<u8").reshape(R, R).astype(np.int64)
        return cls(R, counts, total, header)


# -- orbit kernel -------------------------------------------------------------

def _advance(x, y, a, b):
    # same arithmetic as core.step
    w = a * y + b * x
    z = np.where(w <= 0.5, 2.0 * w, 2.0 - 2.0 * w)
    np.clip(z, 0.0, 1.0, out=z)
    return y, z


def _orbit_chunk(alpha: float, starts: np.ndarray, n: int, burn_in: int,
                 observables: Sequence[Observable], resolution: Optional[int]):
    """Per-start sums of each observable over n post-burn-in iterates, plus histogram counts."""
    a, b = alpha, 1.0 - alpha
    x = starts[:, 0].astype(float).copy()
    y = starts[:, 1].astype(float).copy()
    m = len(x)
    for _ in range(burn_in):
        x, y = _advance(x, y, a, b)
    sums = np.zeros((len(observables), m))
    hist = EmpiricalMeasure2D(resolution) if resolution else None
    done = 0
    while done < n:
        B = min(ORBIT_BLOCK, n - done)
        X = np.empty((m, B))
        Y = np.empty((m, B))
        for j in range(B):
            X[:, j] = x
            Y[:, j] = y
            x, y = _advance(x, y, a, b)
        for i, g in enumerate(observables):
            sums[i] += g(X, Y).sum(axis=1)
        if hist is not None:
            hist.add(X, Y)
        done += B
    return sums, hist


def _run_orbits(params: MapParams, starts: np.ndarray, n: int, burn_in: int,
                observables: Sequence[Observable] = (), resolution: Optional[int] = None,
                workers: int = 1):
    """Fan out over contiguous start chunks; merge sums by concatenation, histograms by addition."""
    starts = np.asarray(starts, dtype=float).reshape(-1, 2)
    if workers <= 1 or len(starts) < 2:
        return _orbit_chunk(params.alpha, starts, n, burn_in, observables, resolution)
    chunks = np.array_split(starts, min(workers, len(starts)))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        parts = list(ex.map(_orbit_chunk, [params.alpha] * len(chunks), chunks, [n] * len(chunks),
                            [burn_in] * len(chunks), [tuple(observables)] * len(chunks),
                            [resolution] * len(chunks)))
    sums = np.concatenate([p[0] for p in parts], axis=1)
    hist = None
    if resolution:
        hist = parts[0][1]
        for p in parts[1:]:
            hist.merge(p[1])
    return sums, hist


# -- Birkhoff averages --------------------------------------------------------

def birkhoff_average(p0, g: Observable, n: int, burn_in: int, params: MapParams) -> float:
    """(1/n) sum_{k=burn_in}^{burn_in+n-1} g(G^k p0)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    p = as_point(p0)
    sums, _ = _orbit_chunk(params.alpha, np.array([[p.x, p.y]]), n, burn_in, (g,), None)
    return float(sums[0, 0] / n)


@dataclass
class BirkhoffResult:
    per_start_means: list[float]
    mean: float
    std: float
    n: int
    burn_in: int
    seed: int
    observable: str = ""
    clustered: bool = False

    def to_json(self) -> dict:
        return {
            "observable": self.observable, "mean": self.mean, "std": self.std, "n": self.n,
            "burn_in": self.burn_in, "seed": self.seed, "clustered": self.clustered,
            "per_start_means": self.per_start_means,
        }


def _clustered(means: np.ndarray, std: float) -> bool:
    """Largest gap between sorted per-start means exceeding twice their spread."""
    if len(means) < 3 or std == 0.0:
        return False
    return bool(np.max(np.diff(np.sort(means))) > 2.0 * std)


def start_points(starts: int, seed: int, mode: str = "random") -> np.ndarray:
    if mode == "random":
        return rng.random_starts(starts, seed)
    if mode == "grid":
        return rng.grid_starts(starts)
    raise ValueError(f"unknown start mode {mode!r}")


def srb_consistency(starts: int, g: Observable, n: int, burn_in: int, seed: int, params: MapParams,
                    mode: str = "random", points: Optional[np.ndarray] = None,
                    workers: int = 1) -> BirkhoffResult:
    """Birkhoff means of g from many starts; SRB predicts their spread shrinks as n grows."""
    pts = start_points(starts, seed, mode) if points is None else np.asarray(points, dtype=float)
    if len(pts) < 2:
        raise ValueError("need at least two starts")
    sums, _ = _run_orbits(params, pts, n, burn_in, (g,), None, workers)
    means = sums[0] / n
    std = float(np.std(means, ddof=1))
    return BirkhoffResult(means.tolist(), float(np.mean(means)), std, n, burn_in, seed, str(g), _clustered(means, std))


def attractor_histogram(starts: int, n: int, burn_in: int, resolution: int, seed: int, params: MapParams,
                        points: Optional[np.ndarray] = None, workers: int = 1) -> EmpiricalMeasure2D:
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    pts = rng.random_starts(starts, seed) if points is None else np.asarray(points, dtype=float)
    _, hist = _run_orbits(params, pts, n, burn_in, (), resolution, workers)
    hist.meta.update(alpha=params.alpha, seed=seed, starts=len(pts), iters=n, burn_in=burn_in)
    return hist


def pushforward_unstable_segment(I: DirectedSegment, n: int, samples: int, seed: int, params: MapParams,
                                 resolution: int = 256) -> EmpiricalMeasure2D:
    """Histogram of G^n applied to uniform mass on the segment ``I``."""
    t = I.a + I.length * rng.uniform_points(seed, rng.SEGMENT, samples, dim=1)[:, 0]
    pts = I.point(t)
    x = np.clip(pts[:, 0], 0.0, 1.0)
    y = np.clip(pts[:, 1], 0.0, 1.0)
    a, b = params.alpha, params.beta
    for _ in range(n):
        x, y = _advance(x, y, a, b)
    hist = EmpiricalMeasure2D(resolution)
    hist.add(x, y)
    hist.meta.update(alpha=params.alpha, seed=seed, iters=n, samples=samples)
    return hist


# -- conditional measures on stable fibers ------------------------------------

def coefficient_of_variation(positions, lo: float, hi: float, bins: int) -> float:
    """std/mean of bin counts of ``positions`` over [lo, hi]."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, _ = np.histogram(positions, bins=bins, range=(lo, hi))
    mean = counts.mean()
    if mean == 0:
        raise InconclusiveError("no samples in range")
    return float(counts.std() / mean)


def conditional_uniformity_probe(fiber: StableFiber, tube_halfwidth: float, samples: int, bins: int,
                                 seed: int, params: MapParams) -> float:
    """CoV of the arclength positions of tube points sharing the fiber's itinerary."""
    if fiber.D <= 10.0 * tube_halfwidth:
        raise ValueError("fiber must be longer than ten tube half-widths")
    if bins < 4:
        raise ValueError("bins must be >= 4")
    u = np.array(fiber.segment.dir)
    nrm = np.array([-u[1], u[0]])
    p = np.array(fiber.point)
    r = rng.uniform_points(seed, rng.TUBE, samples)
    s = -fiber.d_minus + fiber.D * r[:, 0]
    off = tube_halfwidth * (2.0 * r[:, 1] - 1.0)
    pts = p + s[:, None] * u + off[:, None] * nrm
    inside = np.all((pts >= 0.0) & (pts <= 1.0), axis=1)
    target = itinerary_arrays(np.array([p[0]]), np.array([p[1]]), fiber.depth, params)[0]
    words = itinerary_arrays(pts[inside, 0], pts[inside, 1], fiber.depth, params)
    match = np.all(words == target, axis=1)
    accepted = s[inside][match]
    if accepted.size < 1e-4 * samples or accepted.size == 0:
        raise InconclusiveError(f"acceptance rate {accepted.size / samples:.2e} below 1e-4")
    return coefficient_of_variation(accepted, -fiber.d_minus, fiber.d_plus, bins)


# -- tail of the fiber length -------------------------------------------------

@dataclass
class DTailEstimate:
    deltas: list[float]
    nu: list[float]
    hits: list[int]
    slope: float
    inv_moment: float  # estimate of E[D^-beta]
    beta: float
    samples: int

    def to_json(self) -> dict:
        return dict(self.__dict__)


def wedge_vertices(params: MapParams, depth: int = 3) -> np.ndarray:
    """Distinct vertices of the depth-step partition cells (corners where short fibers live)."""
    polys = partition_polygons(depth, params)
    return np.unique(np.round(np.vstack([p.vertices for p in polys]), 12), axis=0)


def _mixture_sample(count: int, seed: int, vertices: np.ndarray, scales: np.ndarray, w_uniform: float, first: int = 0):
    """Draw from w_uniform * U(square) + rest spread over boxes of half-width s around each vertex.

    Returns points, an in-square mask and importance weights 1/q (q = proposal
    density on the square).
    """
    u = rng.uniform_points(seed, rng.FIBERS, count, dim=5, first=first)
    n_comp = len(scales) + 1
    w_box = (1.0 - w_uniform) / len(scales)
    cdf = np.cumsum([w_uniform] + [w_box] * len(scales))
    comp = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), n_comp - 1)
    vi = np.minimum((u[:, 1] * len(vertices)).astype(int), len(vertices) - 1)
    x, y = u[:, 2].copy(), u[:, 3].copy()
    for j, s in enumerate(scales):
        m = comp == j + 1
        x[m] = vertices[vi[m], 0] + s * (2.0 * u[m, 2] - 1.0)
        y[m] = vertices[vi[m], 1] + s * (2.0 * u[m, 3] - 1.0)
    inside = (x >= 0.0) & (x <= 1.0) & (y >= 0.0) & (y <= 1.0)
    q = np.full(count, w_uniform)
    for s in scales:
        hits = (np.abs(x[:, None] - vertices[None, :, 0]) <= s) & (np.abs(y[:, None] - vertices[None, :, 1]) <= s)
        q += w_box / len(vertices) * hits.sum(axis=1) / (2.0 * s) ** 2
    return x, y, inside, np.where(inside, 1.0 / q, 0.0)


def d_tail_estimate(params: MapParams, samples: int, deltas: Sequence[float], seed: int,
                    beta: float = 1.5, depth: int = 48, w_uniform: float = 0.1,
                    vertex_depth: int = 3) -> DTailEstimate:
    """Importance-sampled nu({D < delta}) and E[D^-beta] under Lebesgue measure.

    Short fibers are chords of thin wedges at partition vertices, so the
    proposal mixes uniform sampling with boxes of half-width delta around
    those vertices; weights 1/q keep both estimators unbiased.
    """
    deltas = np.asarray(sorted(deltas, reverse=True), dtype=float)
    verts = wedge_vertices(params, vertex_depth)
    x, y, inside, w = _mixture_sample(samples, seed, verts, deltas, w_uniform)
    D = np.full(samples, np.inf)
    D[inside] = fiber_lengths(x[inside], y[inside], depth, params)
    nu = np.array([np.sum(w * (D < d)) / samples for d in deltas])
    hits = [int(np.sum(D < d)) for d in deltas]
    with np.errstate(divide="ignore"):
        slope = float(np.polyfit(np.log(deltas), np.log(nu), 1)[0]) if np.all(nu > 0) else float("nan")
    moment = float(np.sum(np.where(inside, w * np.where(inside, D, 1.0) ** -beta, 0.0)) / samples)
    return DTailEstimate(deltas.tolist(), nu.tolist(), hits, slope, moment, beta, samples)


def uniform_d_tail(params: MapParams, samples: int, deltas: Sequence[float], seed: int, depth: int = 48):
    """Plain Monte Carlo nu({D < delta}); the cross-check for :func:`d_tail_estimate`."""
    pts = rng.uniform_points(seed, rng.FIBERS + 100, samples)
    D = fiber_lengths(pts[:, 0], pts[:, 1], depth, params)
    return [float(np.mean(D < d)) for d in deltas]


# -- stable core along a segment ----------------------------------------------

def excluded_length(I: DirectedSegment, delta: float, samples: int, params: MapParams) -> float:
    """|I minus D^s(delta)| from a midpoint grid of ``samples`` points along I."""
    t = I.a + I.length * (np.arange(samples) + 0.5) / samples
    pts = np.clip(I.point(t), 0.0, 1.0)
    ok = in_stable_core_arrays(pts[:, 0], pts[:, 1], delta, params=params)
    return float(I.length * (1.0 - ok.mean()))
