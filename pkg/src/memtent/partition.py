"""Exact affine tracking of segments and polygons under iterates of G.

G^n is affine on every cell of the n-step defining partition, so segments and
polygons are pushed forward by composing 2x2 linear parts and offsets rather
than by re-iterating sample points. Splitting a piece by L costs one linear
equation per step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cones import DEFAULT_DEPTH, cone_constants, stable_slopes, stretch_rates_arrays
from .core import ABOVE, BELOW, MapParams, as_point, distance_to_L, forward_branch, step_arrays
from .errors import DegenerateInputError, RegimeError
from .geometry import ConvexPolygon, DirectedSegment, clip_halfplane

CUT_TOL = 1e-13
MIN_SEGMENT = 1e-13
FIBER_DEPTH = 48


@dataclass(frozen=True)
class RefinedCell:
    sub_interval: tuple[float, float]
    word: str
    image: DirectedSegment
    expansion: float

    @property
    def length(self) -> float:
        return self.sub_interval[1] - self.sub_interval[0]

    def to_json(self) -> dict:
        return {
            "sub_interval": list(self.sub_interval),
            "word": self.word,
            "expansion": self.expansion,
            "image": self.image.to_json(),
        }


def _unstable_ok(dx: float, dy: float, params: MapParams) -> bool:
    if dy == 0.0:
        return False
    cc = cone_constants(params)
    return abs(2.0 * (dx / dy) * params.beta) <= cc.theta0 + 1e-12


def _map_affine(px, py, dx, dy, below, params: MapParams):
    """Apply the branch selected by ``below`` to points (px, py) and vectors (dx, dy)."""
    two_a, two_b = 2.0 * params.alpha, 2.0 * params.beta
    zp = two_b * px + two_a * py
    zd = two_b * dx + two_a * dy
    npy = np.where(below, zp, 2.0 - zp)
    ndy = np.where(below, zd, -zd)
    return py, npy, dy, ndy


def refine_unstable_segment(I: DirectedSegment, n: int, params: MapParams) -> list[RefinedCell]:
    """Cells of the n-step partition restricted to ``I``, sorted by parameter."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if I.length < MIN_SEGMENT:
        raise DegenerateInputError(f"segment length {I.length} below {MIN_SEGMENT}")
    if not _unstable_ok(I.dir[0], I.dir[1], params):
        raise ValueError("segment direction is not in the unstable cone J+")
    a, b = params.alpha, params.beta
    ta = np.array([I.a])
    tb = np.array([I.b])
    px = np.array([I.base[0] + I.a * I.dir[0]])  # image of the piece's left end
    py = np.array([I.base[1] + I.a * I.dir[1]])
    dx = np.array([float(I.dir[0])])
    dy = np.array([float(I.dir[1])])
    words = np.zeros((1, n), dtype=np.int8)
    for k in range(n):
        w0 = a * py + b * px
        wd = a * dy + b * dx
        with np.errstate(divide="ignore", invalid="ignore"):
            s = (0.5 - w0) / wd  # crossing, measured from ta
        cut = np.isfinite(s) & (s > CUT_TOL) & (s < (tb - ta) - CUT_TOL)
        if cut.any():
            idx = np.flatnonzero(cut)
            tc = ta[idx] + s[idx]
            # right halves appended after the originals; re-sorted at the end
            ta = np.concatenate([ta, tc])
            tb = np.concatenate([tb, tb[idx]])
            tb[idx] = tc
            px = np.concatenate([px, px[idx] + s[idx] * dx[idx]])
            py = np.concatenate([py, py[idx] + s[idx] * dy[idx]])
            dx = np.concatenate([dx, dx[idx]])
            dy = np.concatenate([dy, dy[idx]])
            words = np.concatenate([words, words[idx]])
            w0 = a * py + b * px
            wd = a * dy + b * dx
        half = 0.5 * (tb - ta)
        below = (w0 + half * wd) <= 0.5
        words[:, k] = np.where(below, BELOW, ABOVE)
        px, py, dx, dy = _map_affine(px, py, dx, dy, below, params)
    order = np.argsort(ta, kind="stable")
    cells = []
    for i in order:
        e = math.hypot(dx[i], dy[i])
        L = e * (tb[i] - ta[i])
        img = DirectedSegment((float(px[i]), float(py[i])), (float(dx[i] / e), float(dy[i] / e)), 0.0, float(L))
        cells.append(RefinedCell((float(ta[i]), float(tb[i])), "".join(map(str, words[i])), img, float(e)))
    return cells


def gamma_from_cells(cells: list[RefinedCell]) -> float:
    return sum(c.length / c.image.length for c in cells)


def gamma_n(I: DirectedSegment, n: int, params: MapParams) -> float:
    """Sum over cells J of |J| / |G^n(J)|."""
    return gamma_from_cells(refine_unstable_segment(I, n, params))


def cell_of_parameter(cells: list[RefinedCell], t: np.ndarray) -> np.ndarray:
    """Index of the cell containing each parameter value (cells sorted)."""
    starts = np.array([c.sub_interval[0] for c in cells])
    return np.clip(np.searchsorted(starts, t, side="right") - 1, 0, len(cells) - 1)


# -- polygons -----------------------------------------------------------------

@dataclass
class PolygonSet:
    polygons: list[ConvexPolygon]
    total_area: float
    dropped: int = 0

    def to_json(self) -> dict:
        return {
            "total_area": self.total_area,
            "dropped": self.dropped,
            "polygons": [p.to_json() for p in self.polygons],
        }


def forward_image_polygons(n: int, params: MapParams) -> PolygonSet:
    """Pieces of G^n([0,1]^2), one per admissible n-word; total area is Jac^n."""
    if n < 0:
        raise ValueError("n must be non-negative")
    a, b = params.alpha, params.beta
    polys = [ConvexPolygon.unit_square()]
    dropped = 0
    for k in range(n):
        floor = 1e-16 * params.jac ** (k + 1)
        nxt = []
        for poly in polys:
            for s in (BELOW, ABOVE):
                piece = clip_halfplane(poly, b, a, -0.5, keep_negative=(s == BELOW))
                if len(piece) < 3:
                    continue
                br = forward_branch(s, params)
                img = piece.transformed(br.linear, br.offset, word=poly.word + str(s))
                if img.area < floor:
                    dropped += 1
                    continue
                nxt.append(img)
        polys = nxt
    return PolygonSet(polys, float(sum(p.area for p in polys)), dropped)


def partition_polygons(n: int, params: MapParams, return_maps: bool = False):
    """Cells of the n-step defining partition (join of pullbacks of {A1, A2}).

    Each cell is split by the preimage G^{-k}(L) computed from the composed
    affine map of its word. With ``return_maps`` the composed (linear, offset)
    of G^n on each cell is returned alongside.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    a, b = params.alpha, params.beta
    cells = [(ConvexPolygon.unit_square(), np.eye(2), np.zeros(2))]
    for _ in range(n):
        nxt = []
        for poly, M, c in cells:
            # w(F(p)) - 1/2 as an affine function of p
            ca, cb = b * M[0] + a * M[1]
            cc = b * c[0] + a * c[1] - 0.5
            for s in (BELOW, ABOVE):
                piece = clip_halfplane(poly, ca, cb, cc, keep_negative=(s == BELOW))
                if len(piece) < 3 or piece.area < 1e-16:
                    continue
                br = forward_branch(s, params)
                piece.word = poly.word + str(s)
                nxt.append((piece, br.linear @ M, br.linear @ c + br.offset))
        cells = nxt
    if return_maps:
        return cells
    return [p for p, _, _ in cells]


# -- stable fibers ------------------------------------------------------------

@dataclass(frozen=True)
class StableFiber:
    point: tuple[float, float]
    segment: DirectedSegment  # parameter 0 is the point itself
    d_minus: float
    d_plus: float
    depth: int
    slope: float
    error_bound: float
    trim_minus: int  # step whose cut produced the lower end, -1: square boundary
    trim_plus: int
    collapsed: bool = False
    accuracy_warning: bool = False

    @property
    def D(self) -> float:
        return self.d_minus + self.d_plus

    @property
    def trimmed_both(self) -> bool:
        return self.trim_minus >= 0 and self.trim_plus >= 0


def _square_interval(x, y, ux, uy):
    """Parameter range of the line (x, y) + t (ux, uy) inside the unit square."""
    with np.errstate(divide="ignore", invalid="ignore"):
        tx1, tx2 = -x / ux, (1.0 - x) / ux
        ty1, ty2 = -y / uy, (1.0 - y) / uy
    lo = np.maximum(np.minimum(tx1, tx2), np.where(uy == 0, -np.inf, np.minimum(ty1, ty2)))
    hi = np.minimum(np.maximum(tx1, tx2), np.where(uy == 0, np.inf, np.maximum(ty1, ty2)))
    return np.minimum(lo, 0.0), np.maximum(hi, 0.0)


def fibers_arrays(x, y, depth: int, params: MapParams):
    """Vectorized fiber trimming.

    Returns (slope, t_lo, t_hi, step_lo, step_hi): the fiber through each point
    is p + t (1, v)/|(1, v)| for t in [t_lo, t_hi], and step_* name the
    iterate whose crossing of L produced each end (-1 for the square boundary).
    """
    if not params.hyperbolic:
        raise RegimeError("strict regime requires alpha in (3/4,1)")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    v = stable_slopes(x, y, depth, params)
    nrm = np.sqrt(1.0 + v * v)
    ux, uy = 1.0 / nrm, v / nrm
    lo, hi = _square_interval(x, y, ux, uy)
    k_lo = np.full(x.shape, -1, dtype=np.int32)
    k_hi = np.full(x.shape, -1, dtype=np.int32)
    a, b = params.alpha, params.beta
    qx, qy, dx, dy = x.copy(), y.copy(), ux.copy(), uy.copy()
    for k in range(depth):
        w0 = a * qy + b * qx
        wd = a * dy + b * dx
        with np.errstate(divide="ignore", invalid="ignore"):
            ts = (0.5 - w0) / wd
        inside = np.isfinite(ts) & (ts > lo) & (ts < hi)
        up = inside & (ts > 0.0)
        dn = inside & (ts <= 0.0)
        hi = np.where(up, ts, hi)
        lo = np.where(dn, ts, lo)
        k_hi = np.where(up, k, k_hi)
        k_lo = np.where(dn, k, k_lo)
        qx, qy, dx, dy = _map_affine(qx, qy, dx, dy, w0 <= 0.5, params)
    return v, lo, hi, k_lo, k_hi


def xi_fiber(p, depth: int = FIBER_DEPTH, params: MapParams = None) -> StableFiber:
    """Approximate element of the stable partition through ``p``."""
    p = as_point(p)
    v, lo, hi, k_lo, k_hi = fibers_arrays(np.array([p.x]), np.array([p.y]), depth, params)
    cc = cone_constants(params)
    err = cc.kappa ** depth * cc.stable_width
    nrm = math.sqrt(1.0 + v[0] ** 2)
    d_minus, d_plus = float(-lo[0]), float(hi[0])
    collapsed = d_minus + d_plus < 1e-12
    if collapsed:
        d_minus = d_plus = 0.0
    seg = DirectedSegment((p.x, p.y), (1.0 / nrm, float(v[0]) / nrm), -d_minus, d_plus)
    return StableFiber(
        point=(p.x, p.y), segment=seg, d_minus=d_minus, d_plus=d_plus, depth=depth,
        slope=float(v[0]), error_bound=err, trim_minus=int(k_lo[0]), trim_plus=int(k_hi[0]),
        collapsed=collapsed, accuracy_warning=err > 1e-8,
    )


def fiber_lengths(x, y, depth: int, params: MapParams) -> np.ndarray:
    """D(p) for many points (depth-capped; untrimmed ends stop at the square)."""
    _, lo, hi, _, _ = fibers_arrays(x, y, depth, params)
    return hi - lo


# -- stable core --------------------------------------------------------------

def default_core_horizon(delta: float, params: MapParams) -> int:
    """Smallest n with C * lambda_-^n < 1e-12 * delta."""
    cc = cone_constants(params)
    target = 1e-12 * delta / cc.rate_constant
    return max(1, math.ceil(math.log(target) / math.log(cc.lambda_minus)))


def in_stable_core_arrays(x, y, delta: float, n_max: int | None = None, params: MapParams = None,
                          depth: int = DEFAULT_DEPTH) -> np.ndarray:
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n_max is None:
        n_max = default_core_horizon(delta, params)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lam, _ = stretch_rates_arrays(x, y, depth, n_max, params)
    ok = np.ones(x.shape, dtype=bool)
    qx, qy = x, y
    for k in range(n_max + 1):
        ok &= distance_to_L((qx, qy), params) >= delta * lam[:, k]
        qx, qy, _ = step_arrays(qx, qy, params)
    return ok


def in_stable_core(p, delta: float, n_max: int | None = None, params: MapParams = None,
                   depth: int = DEFAULT_DEPTH) -> bool:
    """dist(G^n p, L) >= delta * lambda^s_n(p) for every n <= n_max."""
    p = as_point(p)
    return bool(in_stable_core_arrays(np.array([p.x]), np.array([p.y]), delta, n_max, params, depth)[0])
