import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsobolev.kernels import (
    DERIVATIVE_JUMP,
    KernelConfig,
    PWParams,
    kernel_asymptotic,
    kernel_ft,
    kernel_ft_asymptotic,
    kernel_ft_series,
    kernel_mehler,
    kernel_mehler_grid,
    kernel_resolvent,
    kernel_series,
    pw_kernel,
    pw_kernel_diag,
    pw_kernel_ft,
)
from fsobolev.quadrature_special import composite_rule

GRID = np.arange(-2.0, 2.01, 0.5)


def test_config_validation():
    with pytest.raises(ValueError):
        KernelConfig(series_terms=7)
    with pytest.raises(ValueError):
        KernelConfig(mehler_nodes=4)
    with pytest.raises(ValueError):
        PWParams(0.0)


def test_series_symmetries():
    assert kernel_series(1.2, -0.4) == pytest.approx(kernel_series(-0.4, 1.2), rel=1e-14)
    assert kernel_series(-0.7, -0.3) == pytest.approx(kernel_series(0.7, 0.3), rel=1e-14)


def test_series_converges_slowly_toward_mehler():
    # partial sums approach the integral, with error decaying like N^(-1/2) on the diagonal
    ref = kernel_mehler(0.0, 0.0)
    errs = [abs(kernel_series(0.0, 0.0, KernelConfig(series_terms=n)) - ref) for n in (100, 400, 1600)]
    assert errs[0] > errs[1] > errs[2]
    rates = [math.log2(errs[i] / errs[i + 1]) / 2 for i in range(2)]
    assert all(0.4 < r < 0.6 for r in rates)


def test_mehler_origin_closed_integral():
    from scipy.integrate import quad

    val, _ = quad(lambda th: math.sin(th) ** (2 * math.pi - 0.5), 0, math.pi / 2, epsabs=1e-15)
    assert kernel_mehler(0.0, 0.0) == pytest.approx(math.sqrt(2) * math.pi * val, rel=1e-13)


def test_mehler_exponent_matches_printed_form_away_from_endpoint():
    from fsobolev.kernels import mehler_exponent

    x, y = 0.8, -1.3
    t = np.linspace(0.01, 0.9, 20)
    printed = -math.pi * (x * x + y * y) + 2 * math.pi * (2 * x * y * t - (x * x + y * y) * t * t) / (1 - t * t)
    np.testing.assert_allclose(mehler_exponent(x, y, t, 1 - t), printed, rtol=1e-12, atol=1e-12)


def test_resolvent_matches_mehler_on_grid():
    worst = 0.0
    pts = [(x, y) for x in GRID for y in GRID] + [(3, 3.2), (5, 5.1), (3, 3.5), (8, 8.3)]
    for x, y in pts:
        r = kernel_resolvent(x, y)
        worst = max(worst, abs(kernel_mehler(x, y) - r) / max(abs(r), 1e-30))
    assert worst < 1e-10


def test_resolvent_derivative_jump():
    x, h = 0.4, 1e-5
    left = (kernel_resolvent(x, x) - kernel_resolvent(x, x - h, dps=40)) / h
    right = (kernel_resolvent(x, x + h, dps=40) - kernel_resolvent(x, x)) / h
    assert right - left == pytest.approx(DERIVATIVE_JUMP, rel=1e-3)


def test_mehler_off_diagonal_decay_and_positivity():
    assert abs(kernel_mehler(5, 9)) < 1e-20
    d = kernel_mehler_grid(np.linspace(0, 10, 201), np.linspace(0, 10, 201))
    assert np.all(d > 0)


def test_mehler_grid_matches_scalar():
    xs = np.array([-1.0, 0.2, 2.5])
    grid = kernel_mehler_grid(xs[:, None], xs[None, :])
    for i, x in enumerate(xs):
        for j, y in enumerate(xs):
            assert grid[i, j] == pytest.approx(kernel_mehler(x, y), rel=1e-12)
    np.testing.assert_allclose(grid, grid.T, rtol=1e-14, atol=0)


def test_argument_range():
    with pytest.raises(ValueError):
        kernel_mehler(51.0, 0.0)
    with pytest.raises(ValueError):
        kernel_series(0.0, -60.0)


def test_ft_examples():
    for x in (0.0, 0.5, 2.0, 7.0, 20.0):
        v = kernel_ft(x, 0.0)
        assert v.imag == 0.0 and v.real > 0
    assert kernel_ft(1.1, 0.6) == kernel_ft(0.6, 1.1)
    assert abs(kernel_ft(0.6, 1.1) - kernel_ft_series(0.6, 1.1)) < 1e-8


def test_ft_matches_series_on_grid():
    worst = max(abs(kernel_ft(x, y) - kernel_ft_series(x, y)) / abs(kernel_ft_series(x, y)) for x in GRID for y in GRID)
    assert worst < 1e-7


def test_ft_far_field_against_long_series():
    ref = kernel_ft_series(6.0, 5.0, KernelConfig(series_terms=3000))
    assert abs(kernel_ft(6.0, 5.0) - ref) < 1e-10 * abs(ref)


@settings(max_examples=20, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_ft_conjugate_symmetry(x, y):
    a, b = kernel_ft(x, y), kernel_ft(x, -y)
    assert abs(a - b.conjugate()) < 1e-13


def test_asymptotic_forms():
    assert kernel_asymptotic(8, 8) == pytest.approx(math.pi / 8)
    assert kernel_asymptotic(8, 8.3) == pytest.approx(math.pi / 8 * math.exp(-math.pi * 4.89), rel=1e-12)
    with pytest.raises(ValueError):
        kernel_asymptotic(8, 9.5)
    with pytest.raises(ValueError):
        kernel_asymptotic(-1, -1)
    assert abs(kernel_ft_asymptotic(6, 5)) == pytest.approx(1 / 61)
    assert kernel_ft_asymptotic(2.5, 1.5) == pytest.approx(kernel_ft_asymptotic(2.5, -1.5).conjugate())
    with pytest.raises(ValueError):
        kernel_ft_asymptotic(0, 0)


def test_diagonal_asymptotic_trend():
    ratios = [abs(kernel_mehler(x, x) * x / math.pi - 1) for x in (4, 6, 8, 10)]
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    for r, bound in zip(ratios, (0.15, 0.1, 0.07, 0.05)):
        assert r < bound


def test_pw_symmetry_and_diag():
    p = PWParams(1.0)
    assert pw_kernel(p, 0.4, 1.3) == pw_kernel(p, 1.3, 0.4)
    rng = np.random.default_rng(3)
    t, y = rng.uniform(-5, 5, (2, 200))
    np.testing.assert_allclose(pw_kernel(p, t, y), pw_kernel(p, y, t), rtol=1e-13, atol=1e-16)
    d = pw_kernel_diag(p, 0.0)
    stable = 2 - (1 / math.pi) / math.tanh(4 * math.pi) + (1 / math.pi) / math.sinh(4 * math.pi)
    assert d == pytest.approx(stable, rel=1e-14)
    assert d == pytest.approx(2 - 1 / math.pi, abs=1e-5)
    assert pw_kernel(p, 0.0, 0.0) == pytest.approx(d, rel=1e-14)
    ts = np.linspace(-30, 30, 301)
    assert np.all(np.abs(pw_kernel_diag(p, ts)) <= 2 / (1 + ts**2) + 2 / (math.pi * (1 + ts**2) ** 2))


def test_pw_near_diagonal_branch_matches_direct_formula():
    p = PWParams(2.5)
    for t in (0.0, 0.9, -3.0):
        y = t + 0.99e-6
        d = t - y
        direct = (
            (1 + t * y) * math.sin(2 * math.pi * p.T * d) / (math.pi * d * (1 + t * t) * (1 + y * y))
            + (-p.coth * math.cos(2 * math.pi * p.T * d) + math.cos(2 * math.pi * p.T * (t + y)) / math.sinh(4 * math.pi * p.T))
            / (math.pi * (1 + t * t) * (1 + y * y))
        )
        assert pw_kernel(p, t, y) == pytest.approx(direct, rel=1e-9)


def test_pw_second_term_bound_far_out():
    p = PWParams(2.0)
    t, y = 10.0, 10.05
    denom = math.pi * (1 + t * t) * (1 + y * y)
    second = pw_kernel(p, t, y) - (1 + t * y) * math.sin(2 * math.pi * 2 * (t - y)) / ((t - y) * denom)
    assert abs(second) < 2 / denom


def test_pw_no_overflow_large_band():
    p = PWParams(40.0)
    assert np.isfinite(pw_kernel(p, 0.3, 0.2)) and np.isfinite(pw_kernel_diag(p, 0.1))
    assert np.isfinite(pw_kernel_ft(p, 1.0, 39.0))


def test_pw_ft_boundary_and_ode():
    p = PWParams(1.0)
    assert abs(pw_kernel_ft(p, 0.5, 1.0)) < 1e-12
    assert abs(pw_kernel_ft(p, 0.5, -1.0)) < 1e-12
    with pytest.raises(ValueError):
        pw_kernel_ft(p, 0.5, 1.2)
    h = 1e-4
    f = lambda y: pw_kernel_ft(p, 0.5, y)
    y = 0.3
    res = f(y) - (f(y + h) - 2 * f(y) + f(y - h)) / h**2 / (4 * math.pi**2) - np.exp(-2j * math.pi * y * 0.5)
    assert abs(res) < 1e-6


def test_pw_ft_against_printed_formula_small_band():
    # the printed form is fine numerically when T is small
    T, t, y = 0.2, 0.7, 0.05
    e = np.exp
    printed = (
        e(2 * np.pi * T) * (e(-2j * np.pi * t * T) * e(4 * np.pi * T) - e(2j * np.pi * t * T))
        * (e(2 * np.pi * y) - e(2 * np.pi * (2 * T - y))) / ((1 - e(8 * np.pi * T)) * (1 + t * t))
        + (e(-2j * np.pi * t * y) - e(-2j * np.pi * t * T) * e(2 * np.pi * (T - y))) / (1 + t * t)
    )
    assert abs(pw_kernel_ft(PWParams(T), t, y) - printed) < 1e-13


def test_pw_kernel_is_inverse_transform_of_ft():
    # L_t(y) = integral over [-T, T] of conj(hat L_t(xi)) e^{-2 pi i xi y}... checked via Fourier inversion
    p = PWParams(1.0)
    t, y = 0.4, -0.9
    r = composite_rule(-1.0, 1.0, 0.05, 16)
    vals = np.array([pw_kernel_ft(p, t, xi) for xi in r.nodes])
    inv = r.integrate(vals * np.exp(2j * np.pi * r.nodes * y))
    assert inv.real == pytest.approx(pw_kernel(p, t, y), abs=1e-12)
    assert abs(inv.imag) < 1e-12


def test_pw_reproducing_property():
    T, t = 1.0, 0.7
    a = math.pi * T / 3
    f = lambda y: np.sinc(a * np.asarray(y) / math.pi) ** 6
    r = composite_rule(-60, 60, 0.1, 16)
    val = r.integrate(f(r.nodes) * pw_kernel(PWParams(T), t, r.nodes) * (1 + r.nodes**2))
    assert abs(val - f(t)) < 1e-6


def test_resolvent_matrix_matches_pointwise():
    from fsobolev.kernels import kernel_resolvent_matrix

    x = np.array([-2.0, -0.7, 0.0, 0.3, 0.30001, 1.5, 3.0, 8.0])
    K = kernel_resolvent_matrix(x)
    ref = np.array([[kernel_resolvent(a, b) for b in x] for a in x])
    np.testing.assert_allclose(K, ref, rtol=1e-13, atol=0)
    np.testing.assert_array_equal(K, K.T)
    # log-space products stay finite where the individual factors overflow a double
    big = kernel_resolvent_matrix(np.array([-40.0, 40.0]))
    assert np.all(np.isfinite(big)) and big[0, 0] == pytest.approx(math.pi / 40, rel=1e-3)


def test_mehler_near_diagonal_boundary_layer():
    # the integrand switches on at 1 - t ~ (x - y)^2, which graded panels must resolve
    for x, d in ((0.3, 1e-4), (0.2, 1e-9), (2.0, 1e-6)):
        assert kernel_mehler(x, x + d) == pytest.approx(kernel_resolvent(x, x + d), rel=1e-13)
