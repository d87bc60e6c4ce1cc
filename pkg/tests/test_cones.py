import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from memtent.cones import (
    Past, apply_S, apply_T, check_admissible, condition_iv_n0, cone_constants, dS_abs, dT_abs, g_n_value,
    g_T_value, past_region, realized_past, stable_direction, stable_slopes, stretch_rates, unstable_direction,
)
from memtent.core import MapParams, forward_branch, step
from memtent.errors import AdmissibilityError, ParameterError, RegimeError, SingularityError

P = MapParams(0.82)
CC = cone_constants(P)
FP = (2 / 3, 2 / 3)


def test_constants_at_082():
    assert CC.theta0 == pytest.approx(0.26107, abs=1e-5)
    assert CC.kappa == pytest.approx(0.18933, abs=1e-5)
    assert CC.lambda_plus == pytest.approx(0.72520, abs=1e-5)
    assert CC.theta1 == pytest.approx(0.52602, abs=1e-5)
    assert CC.lambda_minus == CC.theta0


def test_constants_at_08():
    cc = cone_constants(MapParams(0.8))
    assert cc.theta0 == pytest.approx(0.8 - math.sqrt(0.24), abs=1e-15)
    assert cc.theta0 == pytest.approx(0.31010, abs=1e-5)
    assert cc.lambda_plus == pytest.approx(0.77526, abs=1e-5)


def test_boundary_075():
    with pytest.raises(RegimeError):
        cone_constants(MapParams(0.75, strict=False), strict=True)
    cc = cone_constants(MapParams(0.75, strict=False), strict=False)
    assert (cc.theta0, cc.kappa, cc.lambda_plus) == (0.5, 0.5, 1.0)
    with pytest.raises(ParameterError):
        cone_constants(MapParams(0.7, strict=False), strict=False)


@given(st.floats(0.7501, 0.9999))
def test_identities(a):
    cc = cone_constants(MapParams(a))
    assert cc.theta0 * (a + cc.root) == pytest.approx(2 * (1 - a), abs=1e-12)
    assert cc.lambda_minus * cc.unstable_expansion == pytest.approx(cc.jac, abs=1e-12)
    assert 0 < cc.kappa < 0.5 and 0 < cc.lambda_plus < 1
    assert cc.kappa == pytest.approx(cc.theta0 ** 2 / (2 * (1 - a)), rel=1e-12)


def test_direction_map_examples():
    assert apply_S("+", 0.0, P) == pytest.approx(1 / 1.64)
    assert 2 * P.beta * apply_S("+", 0.0, P) == pytest.approx(0.21951, abs=1e-5)
    assert apply_T("+", 0.0, P) == pytest.approx(-0.36 / 1.64)
    with pytest.raises(SingularityError):
        apply_T("+", 2 * P.alpha, P)
    with pytest.raises(SingularityError):
        apply_S("-", -P.alpha / P.beta, P)
    with pytest.raises(ValueError):
        apply_S("x", 0.0, P)


@given(st.floats(-1, 1), st.sampled_from("+-"))
def test_cone_invariance(t, sign):
    u = t * CC.theta0 / (2 * P.beta)
    v = t * CC.theta0
    su = apply_S(sign, u, P)
    tv = apply_T(sign, v, P)
    assert abs(2 * su * P.beta) <= CC.theta0 + 1e-12
    assert abs(tv) <= CC.theta0 + 1e-12
    assert abs(su) >= CC.theta1 - 1e-12
    assert abs(tv) >= 2 * P.beta * CC.theta1 - 1e-12
    assert dS_abs(sign, u, P) <= CC.kappa + 1e-12
    assert dT_abs(sign, v, P) <= CC.kappa + 1e-12


def test_derivative_formulas_match_finite_differences():
    h = 1e-6
    for sign in "+-":
        for u in (-0.3, 0.0, 0.5):
            fd = abs(apply_S(sign, u + h, P) - apply_S(sign, u - h, P)) / (2 * h)
            assert fd == pytest.approx(dS_abs(sign, u, P), rel=1e-6)
            fd = abs(apply_T(sign, u / 3 + h, P) - apply_T(sign, u / 3 - h, P)) / (2 * h)
            assert fd == pytest.approx(dT_abs(sign, u / 3, P), rel=1e-6)


def test_stable_direction_fixed_point_and_depth_one():
    v, err = stable_direction(FP, 64, P)
    assert v == pytest.approx(-CC.theta0, abs=1e-12)
    assert err == pytest.approx(CC.kappa ** 64 * 2 * CC.theta0)
    v1, _ = stable_direction((0.1, 0.2), 1, P)
    assert v1 == pytest.approx(-0.21951, abs=1e-5)
    with pytest.raises(RegimeError):
        stable_direction(FP, 8, MapParams(0.6, strict=False))


def test_unstable_direction_fixed_pasts():
    u, err = unstable_direction(Past.fixed_point(64), 64, P)
    assert u == pytest.approx(-CC.theta0 / (2 * P.beta), abs=1e-12)
    assert u == pytest.approx(-0.72520, abs=1e-5)
    assert err == pytest.approx(CC.kappa ** 64 * CC.theta0 / (1 - P.alpha))
    # the all-1 past belongs to the origin; oracle: the expanding eigenvector (1, lam) of A+
    u1, _ = unstable_direction(Past((1,) * 40, (0.0, 0.0)), 40, P)
    ap = forward_branch(1, P).linear
    ev, vec = np.linalg.eig(ap)
    k = np.argmax(np.abs(ev))
    assert u1 == pytest.approx(vec[0, k] / vec[1, k], abs=1e-12)
    assert u1 == pytest.approx(0.54464, abs=1e-5)
    with pytest.raises(ValueError):
        unstable_direction(Past((1,) * 3), 5, P)


def test_admissibility():
    past = realized_past((0.3, 0.7), 12, P)
    check_admissible(past, 12, P)
    assert past_region(past.branches, P).contains(past.point)
    with pytest.raises(AdmissibilityError):
        check_admissible(Past((2, 2), (0.0, 0.0)), 2, P)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
def test_direction_equivariance(x, y):
    # DG(p) (1, v_d(p)) is parallel to (1, v_{d-1}(G p)) since v_d(p) = T(v_{d-1}(G p))
    d = 30
    v, _ = stable_direction((x, y), d, P)
    q, s = step((x, y), P)
    w, _ = stable_direction(q, d - 1, P)
    img = forward_branch(s, P).linear @ np.array([1.0, v])
    cross = img[0] * w - img[1]
    assert abs(cross) <= 1e-12 * np.hypot(*img)


def test_stretch_rates_at_fixed_point():
    lam, vs = stretch_rates(FP, 64, 1, P)
    assert lam == pytest.approx(CC.theta0, abs=1e-12)
    lam5, _ = stretch_rates(FP, 64, 5, P)
    assert lam5 == pytest.approx(CC.theta0 ** 5, rel=1e-12)
    assert lam5 == pytest.approx(1.213e-3, rel=1e-3)
    assert g_T_value(FP, 64, P) == pytest.approx(0.72520, abs=1e-5)
    for n in (1, 3, 10):
        assert g_n_value(FP, n, 64, P) == pytest.approx(CC.lambda_plus ** n, rel=1e-10)
    with pytest.raises(ValueError):
        stretch_rates(FP, 8, 1, P)


def test_g1_tends_to_one_at_boundary():
    vals = [g_T_value(FP, 64, MapParams(a)) for a in (0.76, 0.751, 0.7501)]
    assert vals[0] < vals[1] < vals[2] < 1
    assert vals[2] == pytest.approx(1.0, abs=2e-2)


def test_condition_iv_n0():
    assert condition_iv_n0(CC) == 1
    n0 = condition_iv_n0(cone_constants(MapParams(0.76)))
    cc = cone_constants(MapParams(0.76))
    assert cc.rate_constant * cc.lambda_plus ** n0 < 1 <= cc.rate_constant * cc.lambda_plus ** (n0 - 1) or n0 == 1


def test_stable_slopes_vectorized_matches_scalar():
    pts = np.array([[0.1, 0.2], [0.7, 0.3], [0.45, 0.99]])
    vs = stable_slopes(pts[:, 0], pts[:, 1], 40, P)
    for p, v in zip(pts, vs):
        assert v == stable_direction(p, 40, P)[0]
