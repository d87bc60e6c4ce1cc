"""Acceptance suite: one test and one printed PASS/FAIL line per item.

Tolerances are pinned here; nothing is tuned per run.
"""

import math

import mpmath
import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from memtent.cli import main
from memtent.cones import cone_constants
from memtent.core import MapParams
from memtent.verify import (
    check_area_law, check_condition_iv, check_cone_invariance, check_conditional_uniformity, check_d_tail,
    check_direction_cauchy, check_fixed_point, check_gamma, check_kappa, check_partition_oracle,
    check_rate_bound, check_segment_refinement, check_srb, check_stable_core, regime_check, SIZES,
)

ALPHAS = (0.76, 0.8, 0.82, 0.9, 0.99)
P = MapParams(0.82)
CC = cone_constants(P)
SEED = 20240601


def record(tag: str, ok: bool, detail: str):
    line = f"{'PASS' if ok else 'FAIL'} [{tag}] {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _checks_ok(checks):
    return all(c.passed for c in checks), "; ".join(f"{c.name}={c.value:.4g} (bound {c.bound:.4g})" for c in checks)


def test_a01_constants_high_precision():
    mpmath.mp.dps = 50
    worst = 0.0
    for a in ALPHAS:
        cc = cone_constants(MapParams(a))
        A = mpmath.mpf(a)
        r = mpmath.sqrt(A * A + 2 * A - 2)
        t0 = A - r
        ref = {
            "theta0": t0,
            "theta1": 1 / (2 * A + t0),
            "kappa": t0 / (A + r),
            "lambda_plus": t0 / (2 * (1 - A)),
            "lambda_minus": t0,
        }
        for k, v in ref.items():
            worst = max(worst, abs(getattr(cc, k) - float(v)))
        worst = max(worst, abs(cc.theta0 * (a + math.sqrt(a * a + 2 * a - 2)) - 2 * (1 - a)))
    record("A1", worst <= 1e-12, f"constants vs 50-digit oracle over {ALPHAS}: max error {worst:.3g} <= 1e-12")


def test_a02_cone_invariance_and_kappa():
    checks, kappas = [], []
    for i, a in enumerate(ALPHAS):
        params = MapParams(a)
        cc = cone_constants(params)
        checks.append(check_cone_invariance(params, cc, 100_000, SEED + i))
        checks.append(check_kappa(params, cc, 100_000, SEED + i))
        kappas.append(cc.kappa)
    ok, detail = _checks_ok(checks)
    dec = all(x > y for x, y in zip(kappas, kappas[1:])) and max(kappas) < 0.5
    record("A2", ok and dec, f"cone images and kappa sup over {len(ALPHAS)} alphas; kappa decreasing={dec}")


def test_a03_direction_fields():
    checks = [check_direction_cauchy(P, CC, 1_000, SEED), check_fixed_point(P, CC)]
    ok, detail = _checks_ok(checks)
    record("A3", ok, detail)


def test_a04_rates():
    rate = check_rate_bound(P, CC, 1_000, SEED)
    fp = check_fixed_point(P, CC)
    det_ok = fp.details["det_error"] <= 1e-9
    iv = check_condition_iv(P, CC, 1_000, SEED)
    ok = rate.passed and det_ok and iv.passed
    record("A4", ok, f"max lambda_n/(C lambda_-^n)={rate.value:.4g}; det error {fp.details['det_error']:.2g}; "
                     f"max g_n={iv.value:.4g} for n>={iv.details['n0']} (n0={iv.details['n0']})")


def test_a05_partition_engine():
    checks = [check_segment_refinement(P), check_partition_oracle(P, 10_000, SEED, n=8), check_gamma(P, 20),
              check_area_law(P, 10)]
    area = checks[-1].details["area"]
    ok, detail = _checks_ok(checks)
    ok = ok and abs(area - 3.66e-5) <= 0.005e-5
    record("A5", ok, detail + f"; area(n=10)={area:.5g}")


def test_a06_fiber_length_tail():
    tail, moment = check_d_tail(P, 100_000, SEED)
    record("A6", tail.passed and moment.passed,
           f"log-log slope {tail.value:.3f} >= 1.6; E[D^-1.5]={moment.details['moment']:.4g}, "
           f"relative change on doubling {moment.value:.3g} <= 0.10")


def test_a07_stable_core():
    c = check_stable_core(P, 100_000)
    record("A7", c.passed, f"excluded/delta ratios {np.round(c.details['ratios'], 4).tolist()} within "
                           f"{c.value:.3g} <= 0.30 of A2={c.details['A2']:.4g}")


def test_a08_srb():
    sz = dict(SIZES["full"], srb_starts=200, srb_n=1_000_000, push_samples=200_000)
    spread, agree, sing = check_srb(P, sz, SEED)
    fr = sing.details["occupied_fraction"]
    ok = spread.passed and spread.bound == pytest.approx(5e-3) and agree.passed and sing.passed
    record("A8", ok, f"std {spread.value:.3g} <= 5e-3; estimator gap {agree.value:.3g} <= 1e-2; "
                     f"occupied fractions {fr}")


def test_a09_conditional_uniformity():
    c = check_conditional_uniformity(P, 1_000_000, SEED)
    ok = c.passed and c.details["D"] >= 0.1
    record("A9", ok, f"CoV {c.value:.4g} <= 0.1 on fiber D={c.details['D']:.4g} with 1e6 tube samples, 16 bins")


def test_a10_regimes():
    checks = [regime_check(a, 1_000, SEED) for a in (0.5, 0.6, 0.75)]
    ok, detail = _checks_ok(checks)
    record("A10", ok, detail)


def test_a11_reproducibility(tmp_path):
    outs = []
    for i, workers in enumerate(("1", "1", "3")):
        v = tmp_path / f"v{i}.json"
        a = tmp_path / f"a{i}.ppm"
        assert main(["verify", "--quick", "--seed", "7", "--workers", workers, "--out", str(v)]) == 0
        assert main(["attractor", "--seed", "7", "--iters", "50000", "--workers", workers, "--out", str(a)]) == 0
        outs.append((v.read_bytes(), a.read_bytes()))
    same = all(o == outs[0] for o in outs)
    record("A11", same, "verify JSON and attractor PPM byte-identical over 2 runs and worker counts 1/3")
