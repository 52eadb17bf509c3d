"""Named invariant suites used by the ``verify`` command.

Each check is a row ``name,measured,bound,PASS|FAIL``. For deviation checks ``measured``
is the observed error and the check passes when it is at most ``bound``; for reported
constants ``measured`` is the value and ``bound`` the reference it is compared with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bargmann import (
    IMAGE_CONSTANT_PROOF,
    FockConfig,
    b1_gram,
    fock_norm_sq,
    measured_image_constant,
    monomial_norm_b1,
    unitarity_check,
)
from .kernels import (
    PWParams,
    kernel_ft,
    kernel_ft_series,
    kernel_mehler,
    kernel_mehler_grid,
    kernel_resolvent,
    kernel_series,
    pw_kernel,
    pw_kernel_diag,
    pw_kernel_ft,
)
from .operators import kernel_operator_oracle, overlap_matrix_time, pw_operator_matrix
from .quadrature_special import composite_rule, h_gram
from .spectra import eigvals_symmetric


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    bound: float
    passed: bool

    def line(self) -> str:
        return f"{self.name},{self.measured:.17g},{self.bound:.17g},{'PASS' if self.passed else 'FAIL'}"


def _within(name: str, err: float, bound: float) -> Check:
    return Check(name, float(err), float(bound), bool(err <= bound))


def _value(name: str, value: float, ref: float, rtol: float) -> Check:
    return Check(name, float(value), float(ref), bool(abs(value - ref) <= rtol * abs(ref)))


KERNEL_GRID = np.arange(-2.0, 2.01, 0.5)
KERNEL_EXTRA = ((3.0, 3.2), (5.0, 5.1))


def suite_gram() -> list[Check]:
    out = []
    for count in (48, 96):
        G = h_gram(count)
        out.append(_within(f"h_gram_{count}_identity", np.abs(G - np.eye(count)).max(), 1e-8))
    G = h_gram(48, numeric_ft=False)
    out.append(_within("h_gram_48_eigenfunction_relation", np.abs(G - np.eye(48)).max(), 1e-8))
    return out


def suite_kernels() -> list[Check]:
    pts = [(x, y) for x in KERNEL_GRID for y in KERNEL_GRID] + list(KERNEL_EXTRA)
    worst_raw = worst = worst_ft = 0.0
    for x, y in pts:
        m = kernel_mehler(x, y)
        worst_raw = max(worst_raw, abs(kernel_series(x, y) - m) / max(abs(m), 1e-30))
        r = kernel_resolvent(x, y)
        worst = max(worst, abs(m - r) / max(abs(r), 1e-30))
        s = kernel_ft_series(x, y)
        worst_ft = max(worst_ft, abs(kernel_ft(x, y) - s) / max(abs(s), 1e-30))
    diag = kernel_mehler_grid(np.linspace(0, 10, 201), np.linspace(0, 10, 201))
    trend = [abs(kernel_mehler(x, x) * x / math.pi - 1) for x in (4.0, 6.0, 8.0, 10.0)]
    trend_ok = all(a <= b for a, b in zip(trend, (0.15, 0.1, 0.07, 0.05))) and all(np.diff(trend) < 0)
    rng = np.random.default_rng(1)
    t, y = rng.uniform(-5, 5, (2, 200))
    p = PWParams(1.0)
    sym = np.abs(pw_kernel(p, t, y) - pw_kernel(p, y, t)) / np.maximum(np.abs(pw_kernel(p, t, y)), 1e-30)
    return [
        # the truncated series converges like N^(-1/2) on the diagonal
        _within("kernel_series_partial_sum_vs_mehler", worst_raw, 1e-7),
        _within("kernel_series_exact_sum_vs_mehler", worst, 1e-7),
        _within("kernel_ft_series_vs_integral", worst_ft, 1e-7),
        _within("kernel_diag_positive_0_10", 0.0 if np.all(diag > 0) else 1.0, 0.0),
        Check("kernel_diag_ratio_trend_4_6_8_10", trend[-1], 0.05, bool(trend_ok)),
        _within("pw_kernel_symmetry", float(sym.max()), 1e-13),
    ]


def suite_bargmann() -> list[Check]:
    cfg = FockConfig(1)
    x = [fock_norm_sq(lambda z, n=n: z**n, cfg) / monomial_norm_b1(n) - 1 for n in range(11)]
    out = [_within("fock_monomial_norms_n_le_10", max(abs(v) for v in x), 1e-8)]
    res = [unitarity_check(n) for n in range(7)]
    out.append(_within("b1_norm_of_image_n_le_6", max(abs(r.b1_norm_of_image - 1) for r in res), 1e-3))
    G = b1_gram(7)
    out.append(_within("b1_gram_7x7_identity", float(np.abs(G - np.eye(7)).max()), 1e-3))
    ratios = np.array([r.b0_ratio for r in res])
    out.append(_within("b0_ratio_spread", float(np.ptp(ratios) / ratios.mean()), 1e-6))
    out.append(_value("b0_constant", float(ratios.mean()), 1 / math.pi, 1e-6))
    consts = [measured_image_constant(n) for n in range(6)]
    spread = max(abs(c - consts[0]) for c in consts) / abs(consts[0])
    out.append(_within("image_constant_spread", spread, 1e-10))
    out.append(_value("image_constant", abs(consts[0]), IMAGE_CONSTANT_PROOF, 1e-10))
    return out


ORACLE_R = 3.0
ORACLE_GALERKIN_DIM = 3600
ORACLE_NODES = 2000


def suite_oracle() -> list[Check]:
    g = eigvals_symmetric(overlap_matrix_time(ORACLE_GALERKIN_DIM, ORACLE_R)).eigenvalues[:50]
    o = eigvals_symmetric(kernel_operator_oracle(ORACLE_R, ORACLE_NODES)).eigenvalues[:50]
    return [_within("oracle_top50_R3", float(np.abs(g - o).max()), 1e-5)]


def _pw_ode_residual(p: PWParams, t: float, y: float, h: float = 1e-4) -> float:
    f = lambda v: pw_kernel_ft(p, t, v)
    second = (f(y + h) - 2 * f(y) + f(y - h)) / (h * h)
    return abs(f(y) - second / (4 * math.pi**2) - np.exp(-2j * math.pi * y * t))


def suite_pw() -> list[Check]:
    p = PWParams(1.0)
    bnd = max(abs(pw_kernel_ft(p, t, s)) for t in (-2.0, 0.0, 0.5, 1.7) for s in (-1.0, 1.0))
    rng = np.random.default_rng(0)
    samples = zip(rng.uniform(-3, 3, 10), rng.uniform(-0.9, 0.9, 10))
    ode = max(_pw_ode_residual(p, float(t), float(y)) for t, y in samples)
    # sixth power of a sinc of bandwidth T/6 per factor: band-limited to [-T, T] with fast decay
    T, t = 1.0, 0.7
    a = math.pi * T / 3
    f = lambda y: np.sinc(a * np.asarray(y) / math.pi) ** 6
    r = composite_rule(-60.0, 60.0, 0.1, 16)
    rep = abs(r.integrate(f(r.nodes) * pw_kernel(p, t, r.nodes) * (1 + r.nodes**2)) - f(t))
    R, T2 = 3.0, 2.0
    m = pw_operator_matrix(T2, R, 512)
    rd = composite_rule(-R, R, 0.05, 16)
    diag = rd.integrate(pw_kernel_diag(PWParams(T2), rd.nodes) * (1 + rd.nodes**2))
    ev = eigvals_symmetric(m).eigenvalues
    return [
        _within("pw_ft_boundary_zero", bnd, 1e-10),
        _within("pw_ft_ode_residual_10pts", ode, 1e-6),
        _within("pw_reproducing_sinc6", rep, 1e-6),
        _within("pw_trace_vs_diag_integral", abs(m.trace() - diag) / diag, 1e-8),
        _within("pw_spectrum_in_unit_interval", max(0.0, -ev[-1], ev[0] - 1), 1e-8),
    ]


SUITES: dict[str, Callable[[], list[Check]]] = {
    "gram": suite_gram,
    "kernels": suite_kernels,
    "bargmann": suite_bargmann,
    "oracle": suite_oracle,
    "pw": suite_pw,
}


def run_suite(name: str) -> list[Check]:
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name]()
