"""The memory tent map G(x, y) = (y, tau(alpha*y + (1 - alpha)*x)) on the unit square.

Scalar functions work on plain ``Point2`` tuples; the ``*_arrays`` variants
apply the identical floating point recipe elementwise to numpy arrays, so a
vectorized orbit reproduces the scalar orbit bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError, RegimeError

#: Coordinates may drift this far outside [0, 1] before they count as invalid.
CLAMP_TOL = 1e-12

BELOW = 1  # region A1, weighted coordinate <= 1/2 (ties on L land here)
ABOVE = 2  # region A2


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class MapParams:
    """Parameter of the map.

    ``strict`` demands the hyperbolic regime 3/4 < alpha < 1 needed by the
    cone geometry. Permissive instances accept any alpha in (0, 1).
    """

    alpha: float
    strict: bool = True

    def __post_init__(self):
        a = self.alpha
        if not isinstance(a, (int, float)) or not math.isfinite(a) or not 0.0 < a < 1.0:
            raise ParameterError(f"alpha must lie in (0, 1), got {a!r}")
        object.__setattr__(self, "alpha", float(a))
        if self.strict and not 0.75 < a < 1.0:
            raise RegimeError("strict regime requires alpha in (3/4,1)")

    @property
    def beta(self) -> float:
        """Weight 1 - alpha of the older coordinate."""
        return 1.0 - self.alpha

    @property
    def jac(self) -> float:
        """Absolute Jacobian determinant of both branches."""
        return 2.0 * (1.0 - self.alpha)

    @property
    def hyperbolic(self) -> bool:
        return 0.75 < self.alpha < 1.0

    def permissive(self) -> "MapParams":
        return MapParams(self.alpha, strict=False)


@dataclass(frozen=True)
class AffineBranch:
    """p -> linear @ p + offset."""

    linear: np.ndarray
    offset: np.ndarray

    def __call__(self, p) -> np.ndarray:
        return self.linear @ np.asarray(p, dtype=float) + self.offset

    def compose(self, inner: "AffineBranch") -> "AffineBranch":
        """Return self o inner."""
        return AffineBranch(self.linear @ inner.linear, self.linear @ inner.offset + self.offset)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))


def _clamp01(t: float) -> float:
    return 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)


def as_point(p) -> Point2:
    """Validate a point of the square, absorbing drift up to ``CLAMP_TOL``."""
    x, y = float(p[0]), float(p[1])
    for c in (x, y):
        if not (-CLAMP_TOL <= c <= 1.0 + CLAMP_TOL):
            raise DomainError(f"point {p!r} is outside the unit square")
    return Point2(_clamp01(x), _clamp01(y))


def tent(x: float) -> float:
    """Symmetric tent map 1 - 2|x - 1/2|."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"tent map argument must be in [0, 1], got {x!r}")
    return 1.0 - 2.0 * abs(x - 0.5)


def weighted_coordinate(p, params: MapParams) -> float:
    return params.alpha * p[1] + params.beta * p[0]


def region_of(p, params: MapParams) -> int:
    return BELOW if weighted_coordinate(p, params) <= 0.5 else ABOVE


def step(p, params: MapParams) -> tuple[Point2, int]:
    """One application of G; returns the image and the symbol of ``p``."""
    x, y = p[0], p[1]
    w = params.alpha * y + params.beta * x
    if w <= 0.5:
        z, s = 2.0 * w, BELOW
    else:
        z, s = 2.0 - 2.0 * w, ABOVE
    return Point2(y, _clamp01(z)), s


def orbit(p0, n: int, params: MapParams) -> list[tuple[Point2, int]]:
    """Element k holds (G^{k+1}(p0), symbol of G^k(p0))."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(iter_orbit(p0, n, params))


def iter_orbit(p0, n: Optional[int], params: MapParams) -> Iterator[tuple[Point2, int]]:
    """Streaming form of :func:`orbit`; ``n=None`` iterates forever in O(1) memory."""
    p = as_point(p0)
    k = 0
    while n is None or k < n:
        p, s = step(p, params)
        yield p, s
        k += 1


def itinerary(p0, n: int, params: MapParams) -> tuple[int, ...]:
    """Symbols of p0, G(p0), ..., G^{n-1}(p0)."""
    return tuple(s for _, s in iter_orbit(p0, n, params))


def word(symbols: Sequence[int]) -> str:
    return "".join(str(int(s)) for s in symbols)


def branch_matrices(params: MapParams) -> tuple[AffineBranch, AffineBranch, AffineBranch, AffineBranch]:
    """Forward branches A+ (region 1), A- (region 2) and their inverses B+, B-."""
    a, b = params.alpha, params.beta
    a_plus = AffineBranch(np.array([[0.0, 1.0], [2.0 * b, 2.0 * a]]), np.zeros(2))
    a_minus = AffineBranch(np.array([[0.0, 1.0], [-2.0 * b, -2.0 * a]]), np.array([0.0, 2.0]))
    b_plus = AffineBranch(np.array([[-a / b, 1.0 / (2.0 * b)], [1.0, 0.0]]), np.zeros(2))
    b_minus = AffineBranch(np.array([[-a / b, -1.0 / (2.0 * b)], [1.0, 0.0]]), np.array([1.0 / b, 0.0]))
    return a_plus, a_minus, b_plus, b_minus


def forward_branch(symbol: int, params: MapParams) -> AffineBranch:
    a_plus, a_minus, _, _ = branch_matrices(params)
    return a_plus if symbol == BELOW else a_minus


def inverse_branch(b: int, p, params: MapParams) -> Optional[Point2]:
    """Preimage of ``p`` through branch ``b``, or None when it leaves the square."""
    if b not in (BELOW, ABOVE):
        raise ValueError(f"branch must be 1 or 2, got {b!r}")
    X, Z = p[0], p[1]
    w = 0.5 * Z if b == BELOW else 1.0 - 0.5 * Z
    x = (w - params.alpha * X) / params.beta
    if not (-CLAMP_TOL <= x <= 1.0 + CLAMP_TOL):
        return None
    return Point2(_clamp01(x), float(X))


def preimages(p, params: MapParams) -> dict[int, Point2]:
    out = {}
    for b in (BELOW, ABOVE):
        q = inverse_branch(b, p, params)
        if q is not None:
            out[b] = q
    return out


def distance_to_L(p, params: MapParams):
    """Euclidean distance to the line alpha*y + (1-alpha)*x = 1/2 (arrays accepted)."""
    a, b = params.alpha, params.beta
    return np.abs(a * np.asarray(p[1]) + b * np.asarray(p[0]) - 0.5) / math.hypot(a, b)


# -- vectorized -------------------------------------------------------------

def step_arrays(x: np.ndarray, y: np.ndarray, params: MapParams):
    """Elementwise :func:`step`; returns (x', y', symbols)."""
    w = params.alpha * y + params.beta * x
    below = w <= 0.5
    z = np.where(below, 2.0 * w, 2.0 - 2.0 * w)
    np.clip(z, 0.0, 1.0, out=z)
    return y, z, np.where(below, BELOW, ABOVE).astype(np.int8)


def itinerary_arrays(x: np.ndarray, y: np.ndarray, n: int, params: MapParams) -> np.ndarray:
    """Symbols of the first n iterates for every point; shape (len(x), n), dtype int8."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.empty((x.size, n), dtype=np.int8)
    for k in range(n):
        x, y, out[:, k] = step_arrays(x, y, params)
    return out
