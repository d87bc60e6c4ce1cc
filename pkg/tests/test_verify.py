import json

import pytest

from memtent.cones import cone_constants
from memtent.core import MapParams
from memtent.verify import (
    SCHEMA, Check, VerificationReport, distortion_bound, fit_gamma_envelope, regime_check, verification_suite,
)


@pytest.fixture(scope="module")
def quick_report():
    return verification_suite(MapParams(0.82), seed=0, scale="quick")


def test_quick_suite_passes(quick_report):
    failed = [c.name for c in quick_report.checks if not c.passed]
    assert failed == []
    assert quick_report.passed


def test_every_check_describes_itself(quick_report):
    for c in quick_report.checks:
        assert c.name and c.anchor
        assert c.value is not None and c.bound is not None
        assert c.samples >= 1


def test_report_json(quick_report):
    d = json.loads(quick_report.dumps())
    assert d["schema"] == SCHEMA
    assert d["constants"]["theta0"] == pytest.approx(0.26107, abs=1e-5)
    assert {c["name"] for c in d["checks"]} >= {"cone_invariance", "kappa_contraction", "area_law",
                                                 "fiber_length_tail", "birkhoff_spread", "conditional_uniformity"}
    assert quick_report.check("expansion_condition").details["n0"] == 1


def test_report_is_deterministic(quick_report):
    again = verification_suite(MapParams(0.82), seed=0, scale="quick", workers=2)
    assert again.dumps() == quick_report.dumps()


def test_nonhyperbolic_alpha_skips_with_reason():
    r = verification_suite(MapParams(0.6, strict=False), seed=0, scale="quick")
    skipped = [c for c in r.checks if c.skipped]
    assert skipped and "strict regime" in skipped[0].reason
    assert [c.name for c in r.checks if not c.skipped] == ["regime_fixed_point"]
    assert r.passed and r.constants is None


def test_regimes_flag_runs_all_three():
    r = verification_suite(MapParams(0.5, strict=False), seed=0, scale="quick", include_regimes=True)
    names = [c.name for c in r.checks if not c.skipped]
    assert names == ["regime_period3", "regime_fixed_point", "regime_line"]
    assert r.passed


def test_unclassified_alpha_runs_nothing():
    r = verification_suite(MapParams(0.3, strict=False), seed=0, scale="quick")
    assert all(c.skipped for c in r.checks)
    assert r.passed


def test_failures_are_recorded_not_raised():
    rep = VerificationReport(0.82, None, [Check("x", "a", True), Check("y", "b", False)], 0)
    assert not rep.passed
    with pytest.raises(ValueError):
        regime_check(0.9, 10, 0)
    with pytest.raises(ValueError):
        verification_suite(MapParams(0.82), scale="huge")


def test_distortion_bound_closed_form():
    cc = cone_constants(MapParams(0.82))
    assert 0 < distortion_bound(cc) < 1


def test_gamma_fit_covers_data():
    import numpy as np

    g = [np.array([1.0, 0.6, 0.4, 0.3, 0.3]), np.array([1.0, 1.1, 1.2, 1.2, 1.2])]
    F, r = fit_gamma_envelope(g, [0.01, 0.8])
    for gi, L in zip(g, [0.01, 0.8]):
        assert (gi <= F * (r ** np.arange(5) + L) * (1 + 1e-12)).all()
