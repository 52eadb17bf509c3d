import json
import math

import numpy as np
import pytest

import fsobolev.asymptotics as asy
from fsobolev.asymptotics import (
    build_report,
    canonical_mode,
    hs_integral,
    predicted_hs_symmetric,
    predicted_hs_two_sided,
    predicted_one_sided_moments,
    predicted_pw,
    predicted_trace_two_sided,
    predictions,
    trace_integral,
)
from fsobolev.kernels import PWParams
from fsobolev.operators import kernel_operator_oracle, overlap_matrix_time, pw_operator_matrix
from fsobolev.spectra import eigvals_symmetric, moment


def test_trace_predictions():
    assert predicted_trace_two_sided(3, 3) == pytest.approx(18 * math.pi)
    assert predicted_trace_two_sided(1.7, 1.7) == pytest.approx(2 * math.pi * 1.7**2)
    assert predicted_trace_two_sided(1, 2) == pytest.approx(5 * math.pi)
    with pytest.raises(ValueError):
        predicted_trace_two_sided(0, 1)


def test_hs_prediction_formula():
    assert predicted_hs_two_sided(100, 100) / ((2 * math.pi - 2) * 1e4) == pytest.approx(1, abs=0.01)
    a = 9.0
    manual = math.pi * a + 2 * (2 * a * math.atan(1) - a - a * math.atan(3) + 2 * a * math.atan(1))
    assert predicted_hs_two_sided(3, 3) == pytest.approx(manual, rel=1e-14)
    # the printed expression is not symmetric in its two radii
    assert abs(predicted_hs_two_sided(1, 2) - predicted_hs_two_sided(2, 1)) > 1
    assert predicted_hs_symmetric(2) == pytest.approx((2 * math.pi - 2) * 4)


def test_one_sided_and_pw_predictions():
    assert predicted_one_sided_moments(2) == pytest.approx((4 * math.pi, 2 * math.pi, math.pi))
    assert predicted_one_sided_moments(3) == pytest.approx((9 * math.pi, 4.5 * math.pi, 2.25 * math.pi))
    tr, hs, m3 = predicted_one_sided_moments(1.3)
    assert hs / tr == pytest.approx(0.5) and m3 / tr == pytest.approx(0.25)
    assert predicted_pw(3, 3)["count_near_one"] == 36
    assert predicted_pw(3, 2)["trace"] == 24
    assert predicted_pw(0.5, 0.5)["trace"] == pytest.approx(1)


def test_mode_names():
    assert canonical_mode("two-sided") == "two_sided"
    with pytest.raises(ValueError):
        canonical_mode("sideways")
    with pytest.raises(ValueError):
        trace_integral("pw", 1.0)


def test_trace_integral_against_independent_oracle():
    # trace of the uncorrected Nystrom matrix is a Gregory-rule quadrature of the same diagonal
    R = 3.0
    O = kernel_operator_oracle(R, 1200, kink_correction=False)
    assert trace_integral("one_sided", R) == pytest.approx(O.trace(), rel=1e-9)


def test_trace_integral_symmetry_and_modes():
    one = trace_integral("one_sided", 3.0)
    assert trace_integral("two_sided", 3.0, 3.0) == pytest.approx(2 * one, rel=1e-14)
    assert trace_integral("freq_sided", 1.0, 3.0) == pytest.approx(one, rel=1e-14)
    assert trace_integral("two_sided", 1.0, 3.0) == pytest.approx(one + trace_integral("one_sided", 1.0), rel=1e-14)


def test_galerkin_trace_approaches_integral_from_below():
    exact = trace_integral("one_sided", 2.0)
    gaps = [exact - overlap_matrix_time(N, 2.0).trace() for N in (200, 800, 3200)]
    assert all(g > 0 for g in gaps)
    # diagonal entries decay like n^(-3/2), so the gap shrinks like N^(-1/2)
    for a, b in zip(gaps, gaps[1:]):
        assert a / b == pytest.approx(2.0, rel=0.1)


def test_pw_trace_integral_matches_matrix():
    assert trace_integral("pw", 3.0, 2.0) == pytest.approx(pw_operator_matrix(2.0, 3.0, 512).trace(), rel=1e-8)


def test_pw_hs_integral_matches_matrix():
    for R, T in ((2.0, 1.0), (3.0, 2.0)):
        s = eigvals_symmetric(pw_operator_matrix(T, R))
        assert hs_integral("pw", R, T) == pytest.approx(moment(s, 2), rel=1e-8)


def test_hs_integral_stable_under_refinement(monkeypatch):
    base = hs_integral("one_sided", 1.5)
    monkeypatch.setattr(asy, "KERNEL_PANEL", 0.1)
    assert hs_integral("one_sided", 1.5) == pytest.approx(base, rel=1e-11)


def test_hs_cross_term_against_scalar_quadrature():
    from scipy.integrate import dblquad

    from fsobolev.kernels import kernel_ft

    R, T = 0.6, 0.4
    ref, _ = dblquad(lambda t, y: abs(kernel_ft(y, t)) ** 2 * (1 + y * y) * (1 + t * t), -R, R, -T, T, epsabs=1e-12)
    assert asy.hs_cross_term(R, T) == pytest.approx(2 * ref, rel=1e-9)


def test_galerkin_hs_converges_to_integral():
    exact = hs_integral("one_sided", 2.0)
    s = eigvals_symmetric(overlap_matrix_time(4096, 2.0))
    assert moment(s, 2) == pytest.approx(exact, rel=1e-4)


def test_two_sided_hs_ordering_and_trend():
    one = hs_integral("one_sided", 2.0)
    two = hs_integral("two_sided", 2.0, 2.0)
    assert two >= 2 * one
    r2 = two / ((2 * math.pi - 2) * 4)
    r4 = hs_integral("two_sided", 4.0, 4.0) / ((2 * math.pi - 2) * 16)
    assert 0.8 <= r4 <= 1.2
    assert abs(r4 - 1) < abs(r2 - 1)


def test_predictions_per_mode():
    p = predictions("two_sided", 3, 3)
    assert p.count_near_one == 36 and p.third_moment is None
    assert p.count_above_eps_bound == pytest.approx(2 * math.pi * 18)
    assert predictions("pw", 3, 3).count_near_one == 36
    assert predictions("freq_sided", 1, 2).trace == pytest.approx(4 * math.pi)


def test_build_report_fields_and_json():
    r = build_report("one_sided", 2.0, None, 0.1, dim=300)
    d = r.to_dict()
    assert set(d) == {"mode", "R", "T", "dim", "measured", "predicted", "exact_integrals", "eps"}
    assert d["measured"]["count_half_band"] is not None and d["measured"]["third_moment"] is not None
    assert set(d["exact_integrals"]) == {"trace_integral", "hs_integral"}
    json.dumps(d)
    assert d["measured"]["trace"] <= d["dim"]
    r = build_report("pw", 3.0, 3.0, 0.1)
    assert r.predicted.count_near_one == 36
    assert r.measured.trace == pytest.approx(r.exact_integrals.trace_integral, rel=1e-5)
    assert r.measured.hs == pytest.approx(r.exact_integrals.hs_integral, rel=1e-3)
    with pytest.raises(ValueError):
        build_report("one_sided", 2.0, None, 0.7)
    with pytest.raises(ValueError):
        build_report("two_sided", 2.0, None, 0.1)


def test_build_report_deterministic():
    a = build_report("two_sided", 1.5, 1.0, 0.05, dim=200).to_dict()
    b = build_report("two_sided", 1.5, 1.0, 0.05, dim=200).to_dict()
    assert a == b
