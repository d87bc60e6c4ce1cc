"""Invariant cones, continued-fraction direction fields and stretch rates.

Stable slopes v describe direction vectors (1, v) and live in
J- = {|v| <= theta0}; unstable slope parameters u describe (u, 1) and live in
J+ = {|2u(1 - alpha)| <= theta0}. Forward dynamics acts on stable slopes
through the inverse of T+/- and on unstable ones through S+/-, so both fields
are limits of compositions of contractions with rate kappa.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import ABOVE, BELOW, MapParams, Point2, as_point, itinerary_arrays, step
from .errors import AdmissibilityError, ParameterError, RegimeError, SingularityError
from .geometry import ConvexPolygon, clip_halfplane

DEFAULT_DEPTH = 64
_POLE_EPS = 1e-14


@dataclass(frozen=True)
class ConeConstants:
    alpha: float
    theta0: float
    theta1: float
    kappa: float
    lambda_plus: float
    lambda_minus: float
    jac: float

    @property
    def root(self) -> float:
        """sqrt(alpha^2 + 2 alpha - 2)."""
        return self.alpha - self.theta0

    @property
    def unstable_expansion(self) -> float:
        """|eigenvalue| of A- along the unstable direction at the fixed point."""
        return self.alpha + self.root

    @property
    def stable_width(self) -> float:
        """|J-|."""
        return 2.0 * self.theta0

    @property
    def unstable_width(self) -> float:
        """|J+|."""
        return self.theta0 / (1.0 - self.alpha)

    @property
    def rate_constant(self) -> float:
        """max h1 / min h1 over J-, with h1(v) = 1/sqrt(1 + v^2)."""
        return math.sqrt(1.0 + self.theta0 ** 2)

    def to_json(self) -> dict:
        return {
            "alpha": self.alpha,
            "theta0": self.theta0,
            "theta1": self.theta1,
            "kappa": self.kappa,
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "jac": self.jac,
            "rate_constant": self.rate_constant,
        }


def cone_constants(params: MapParams, strict: Optional[bool] = None) -> ConeConstants:
    """Closed-form cone constants; ``strict`` defaults to ``params.strict``."""
    a = params.alpha
    disc = a * a + 2.0 * a - 2.0
    if disc <= 0.0:
        raise ParameterError(f"alpha^2 + 2 alpha - 2 must be positive (alpha > sqrt(3) - 1), got alpha={a}")
    if (params.strict if strict is None else strict) and not params.hyperbolic:
        raise RegimeError("strict regime requires alpha in (3/4,1)")
    r = math.sqrt(disc)
    theta0 = a - r
    jac = 2.0 * (1.0 - a)
    return ConeConstants(
        alpha=a,
        theta0=theta0,
        theta1=1.0 / (2.0 * a + theta0),
        kappa=theta0 / (a + r),
        lambda_plus=theta0 / jac,
        lambda_minus=theta0,
        jac=jac,
    )


def _sign(s) -> float:
    if s in ("+", 1, +1, BELOW):
        return 1.0
    if s in ("-", -1, ABOVE):
        return -1.0
    raise ValueError(f"sign must be '+' or '-', got {s!r}")


def apply_S(sign, u: float, params: MapParams) -> float:
    """S+/-(u) = 1 / (+/-2u(1-alpha) +/- 2 alpha)."""
    e = _sign(sign)
    den = e * (2.0 * u * params.beta + 2.0 * params.alpha)
    if abs(den) < _POLE_EPS:
        raise SingularityError(f"S{'+' if e > 0 else '-'} has a pole at u={u}")
    return 1.0 / den


def apply_T(sign, v: float, params: MapParams) -> float:
    """T+/-(v) = 2(1-alpha) / (-2 alpha +/- v)."""
    e = _sign(sign)
    den = -2.0 * params.alpha + e * v
    if abs(den) < _POLE_EPS:
        raise SingularityError(f"T{'+' if e > 0 else '-'} has a pole at v={v}")
    return 2.0 * params.beta / den


def dS_abs(sign, u, params: MapParams):
    """|S'(u)| = 2(1-alpha) S(u)^2 (arrays accepted)."""
    e = _sign(sign)
    s = 1.0 / (e * (2.0 * np.asarray(u) * params.beta + 2.0 * params.alpha))
    return 2.0 * params.beta * s * s


def dT_abs(sign, v, params: MapParams):
    """|T'(v)| = T(v)^2 / (2(1-alpha)) (arrays accepted)."""
    e = _sign(sign)
    t = 2.0 * params.beta / (-2.0 * params.alpha + e * np.asarray(v))
    return t * t / (2.0 * params.beta)


def _require_hyperbolic(params: MapParams):
    if not params.hyperbolic:
        raise RegimeError("strict regime requires alpha in (3/4,1)")


# -- stable directions --------------------------------------------------------

def stable_slopes_from_symbols(symbols: np.ndarray, params: MapParams) -> np.ndarray:
    """Truncated stable continued fractions, one per row of ``symbols``.

    Row k holds the forward itinerary (1 -> +, 2 -> -); the innermost level is
    seeded with slope 0.
    """
    symbols = np.atleast_2d(symbols)
    eps = np.where(symbols == BELOW, 1.0, -1.0)
    two_b, two_a = 2.0 * params.beta, 2.0 * params.alpha
    v = np.zeros(symbols.shape[0])
    for k in range(symbols.shape[1] - 1, -1, -1):
        v = two_b / (-two_a + eps[:, k] * v)
    return v


def stable_direction(p, depth: int = DEFAULT_DEPTH, params: MapParams = None) -> tuple[float, float]:
    """Stable slope v(p) and the truncation bound kappa^depth * |J-|."""
    _require_hyperbolic(params)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    p = as_point(p)
    syms = np.empty(depth, dtype=np.int8)
    q = p
    for k in range(depth):
        q, syms[k] = step(q, params)
    v = float(stable_slopes_from_symbols(syms[None, :], params)[0])
    cc = cone_constants(params)
    return v, cc.kappa ** depth * cc.stable_width


def stable_slopes(x, y, depth: int, params: MapParams) -> np.ndarray:
    """Vectorized :func:`stable_direction` (slopes only)."""
    _require_hyperbolic(params)
    return stable_slopes_from_symbols(itinerary_arrays(x, y, depth, params), params)


# -- unstable directions ------------------------------------------------------

@dataclass(frozen=True)
class Past:
    """Backward branch choices, ``branches[0]`` being the most recent preimage.

    ``point`` is the point whose past this is; when present, admissibility is
    checked against it and not merely for non-emptiness.
    """

    branches: tuple[int, ...]
    point: Optional[Point2] = None

    def __post_init__(self):
        b = tuple(int(s) for s in self.branches)
        if any(s not in (BELOW, ABOVE) for s in b):
            raise ValueError("past branches must be 1 or 2")
        object.__setattr__(self, "branches", b)

    def __len__(self):
        return len(self.branches)

    @classmethod
    def fixed_point(cls, length: int) -> "Past":
        return cls((ABOVE,) * length, Point2(2.0 / 3.0, 2.0 / 3.0))


def realized_past(p0, n: int, params: MapParams) -> Past:
    """Run n steps from p0 and record the branch history of the endpoint."""
    q = as_point(p0)
    hist = []
    for _ in range(n):
        q, s = step(q, params)
        hist.append(s)
    return Past(tuple(reversed(hist)), q)


def past_region(branches: Sequence[int], params: MapParams) -> ConvexPolygon:
    """Points that have the given past: G_{b0}(...G_{b_{m-1}}(square ∩ A_{b_{m-1}})...).

    Computed by forward clipping, which is numerically stable (backward
    iteration expands rounding along the stable direction).
    """
    from .core import forward_branch

    poly = ConvexPolygon.unit_square()
    a, b = params.alpha, params.beta
    for s in reversed(tuple(branches)):
        poly = clip_halfplane(poly, b, a, -0.5, keep_negative=(s == BELOW))
        if poly.empty:
            return poly
        br = forward_branch(s, params)
        poly = poly.transformed(br.linear, br.offset)
    return poly


def check_admissible(past: Past, depth: int, params: MapParams) -> None:
    region = past_region(past.branches[:depth], params)
    if region.empty:
        raise AdmissibilityError(f"past {past.branches[:depth]} has no realizing preimages")
    if past.point is not None and not region.contains(past.point, tol=1e-9):
        raise AdmissibilityError(f"point {tuple(past.point)} has no past {past.branches[:depth]}")


def unstable_direction(past: Past, depth: int = DEFAULT_DEPTH, params: MapParams = None,
                       check: bool = True) -> tuple[float, float]:
    """Unstable slope parameter u for the chosen past and the bound kappa^depth * |J+|."""
    _require_hyperbolic(params)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if len(past) < depth:
        raise ValueError(f"past of length {len(past)} is shorter than depth {depth}")
    if check:
        check_admissible(past, depth, params)
    two_b, two_a = 2.0 * params.beta, 2.0 * params.alpha
    u = 0.0
    for s in reversed(past.branches[:depth]):
        u = (1.0 if s == BELOW else -1.0) / (two_a + two_b * u)
    cc = cone_constants(params)
    return u, cc.kappa ** depth * cc.unstable_width


# -- rates --------------------------------------------------------------------

def h1(v):
    return 1.0 / np.sqrt(np.asarray(v) ** 2 + 1.0)


def stretch_rates_arrays(x, y, depth: int, n: int, params: MapParams) -> tuple[np.ndarray, np.ndarray]:
    """lambda^s_k for k = 0..n and the slopes v(G^k p), both shape (N, n+1)."""
    _require_hyperbolic(params)
    syms = itinerary_arrays(x, y, n + depth, params)
    v = np.empty((syms.shape[0], n + 1))
    for k in range(n + 1):
        v[:, k] = stable_slopes_from_symbols(syms[:, k:k + depth], params)
    lam = np.ones_like(v)
    if n:
        lam[:, 1:] = np.cumprod(np.abs(v[:, :-1]), axis=1)
    lam *= h1(v[:, :1]) / h1(v)
    return lam, v


def stretch_rates(p, depth: int = DEFAULT_DEPTH, n: int = 1, params: MapParams = None) -> tuple[float, list[float]]:
    """lambda^s_n(p) = prod_{k<n} |v(G^k p)| * h1(p)/h1(G^n p), plus v(p)..v(G^n p)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cc = cone_constants(params)
    if cc.kappa ** depth >= 1e-10:
        raise ValueError(f"depth {depth} too small: kappa^depth must be below 1e-10")
    p = as_point(p)
    lam, v = stretch_rates_arrays(np.array([p.x]), np.array([p.y]), depth, n, params)
    return float(lam[0, n]), v[0].tolist()


def g_T_value(p, depth: int = DEFAULT_DEPTH, params: MapParams = None) -> float:
    """lambda^s(p) / Jac."""
    lam, _ = stretch_rates(p, depth, 1, params)
    return lam / params.jac


def g_n_value(p, n: int, depth: int = DEFAULT_DEPTH, params: MapParams = None) -> float:
    """n-step weight lambda^s_n(p) / Jac^n."""
    lam, _ = stretch_rates(p, depth, n, params)
    return lam / params.jac ** n


def condition_iv_n0(cc: ConeConstants) -> int:
    """Smallest n >= 1 with rate_constant * lambda_plus^n < 1."""
    if not 0.0 < cc.lambda_plus < 1.0:
        raise RegimeError("lambda_plus must lie in (0, 1)")
    return max(1, math.floor(math.log(cc.rate_constant) / -math.log(cc.lambda_plus)) + 1)
