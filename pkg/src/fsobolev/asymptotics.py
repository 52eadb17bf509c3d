"""Predicted moments and counts, exact finite-size trace/HS integrals, and reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .kernels import DEFAULT_CONFIG, KernelConfig, PWParams, kernel_ft_grid, kernel_mehler_grid, pw_kernel, pw_kernel_diag
from .operators import (
    default_dim,
    overlap_matrix_freq,
    overlap_matrix_time,
    pw_operator_matrix,
    two_sided_matrix,
)
from .quadrature_special import _gauss_legendre_arrays, composite_rule, panel_rule
from .spectra import count_above, count_in, eigvals_symmetric, moment, plunge_width

MODES = ("one_sided", "freq_sided", "two_sided", "pw")
_ALIASES = {"one-sided": "one_sided", "freq-sided": "freq_sided", "two-sided": "two_sided"}

KERNEL_PANEL = 0.2
NODES_PER_PANEL = 16


def canonical_mode(mode: str) -> str:
    m = _ALIASES.get(mode, mode)
    if m not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    return m


# ---------------------------------------------------------------- predictions


def predicted_trace_two_sided(R1: float, R2: float) -> float:
    _positive(R1, R2)
    return math.pi * (R1 * R1 + R2 * R2)


def predicted_hs_two_sided(R1: float, R2: float) -> float:
    """The printed sum-of-squares expression, kept verbatim including its R1/R2 asymmetry."""
    _positive(R1, R2)
    a, b = R1 * R1, R2 * R2
    inner = (a + b) * math.atan(R1 / R2) - R1 * R2 - a * math.atan(R1) + 2 * a * math.atan(R2 / R1)
    return math.pi * a / 2 + math.pi * b / 2 + 2 * inner


def predicted_hs_symmetric(R: float) -> float:
    """(2 pi - 2) R^2, the equal-radii simplification."""
    _positive(R)
    return (2 * math.pi - 2) * R * R


def predicted_one_sided_moments(R: float) -> tuple[float, float, float]:
    _positive(R)
    a = math.pi * R * R
    return a, a / 2, a / 4


def predicted_pw(R: float, T: float) -> dict:
    _positive(R, T)
    return {"trace": 4 * R * T, "count_near_one": 4 * R * T}


def _positive(*vals):
    for v in vals:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError(f"expected a positive finite value, got {v}")


# ---------------------------------------------------------------- exact integrals


def _refine_until_stable(integrate, h0: float, rtol: float = 1e-13, max_halvings: int = 6) -> float:
    prev = integrate(h0)
    h = h0
    for _ in range(max_halvings):
        h /= 2
        cur = integrate(h)
        if abs(cur - prev) <= rtol * abs(cur):
            return cur
        prev = cur
    return prev


def _diag_integral(R: float, cfg: KernelConfig) -> float:
    def integrate(h):
        r = composite_rule(-R, R, h, NODES_PER_PANEL)
        return r.integrate(kernel_mehler_grid(r.nodes, r.nodes, cfg) * (1 + r.nodes**2))

    return _refine_until_stable(integrate, 0.5)


def _pw_diag_integral(R: float, T: float) -> float:
    p = PWParams(T)

    def integrate(h):
        r = composite_rule(-R, R, h, NODES_PER_PANEL)
        return r.integrate(pw_kernel_diag(p, r.nodes) * (1 + r.nodes**2))

    return _refine_until_stable(integrate, 1.0 / (4 * T + 4))


def trace_integral(mode: str, R: float, T: float | None = None, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Exact trace of the operator as a diagonal integral of its kernel."""
    mode = canonical_mode(mode)
    _positive(R)
    if mode == "one_sided":
        return _diag_integral(R, cfg)
    if mode == "freq_sided":
        return _diag_integral(_need_T(T), cfg)
    if mode == "two_sided":
        T = _need_T(T)
        one = _diag_integral(R, cfg)
        return 2 * one if T == R else one + _diag_integral(T, cfg)
    return _pw_diag_integral(R, _need_T(T))


def _need_T(T):
    if T is None:
        raise ValueError("T is required for this mode")
    _positive(T)
    return T


def _split_panels(lo: float, x: float, hi: float, width: float) -> np.ndarray:
    """Breakpoints on [lo, hi] that include x, with panels of at most ``width``."""
    left = x - width * np.arange(int(np.ceil((x - lo) / width - 1e-12)) + 1)
    left[-1] = lo
    right = x + width * np.arange(int(np.ceil((hi - x) / width - 1e-12)) + 1)
    right[-1] = hi
    br = np.concatenate((left[::-1], right[1:]))
    return br[np.concatenate(([True], np.diff(br) > 1e-14))]


def _kernel_sq_integral(R: float, cfg: KernelConfig) -> float:
    """int_I int_I K_y(t)^2 (1+y^2)(1+t^2) dy dt, inner integral split at the diagonal kink."""
    outer = composite_rule(-R, R, KERNEL_PANEL, NODES_PER_PANEL)
    total = 0.0
    for x, wx in zip(outer.nodes, outer.weights):
        inner = panel_rule(_split_panels(-R, x, R, KERNEL_PANEL), NODES_PER_PANEL)
        k = kernel_mehler_grid(x, inner.nodes, cfg)
        total += wx * (1 + x * x) * inner.integrate(k * k * (1 + inner.nodes**2))
    return float(total)


def _ft_cross_integral(R: float, T: float, cfg: KernelConfig) -> float:
    """int_{-R}^{R} int_{-T}^{T} |K^_y(t)|^2 (1+y^2)(1+t^2): the integrand is even in y and t."""
    ry = composite_rule(0.0, R, KERNEL_PANEL, NODES_PER_PANEL)
    rt = composite_rule(0.0, T, KERNEL_PANEL, NODES_PER_PANEL)
    vals = kernel_ft_grid(ry.nodes[:, None], rt.nodes[None, :], cfg)
    dens = np.abs(vals) ** 2 * (1 + ry.nodes[:, None] ** 2) * (1 + rt.nodes[None, :] ** 2)
    return 4.0 * float(ry.weights @ dens @ rt.weights)


def _pw_sq_integral(R: float, T: float) -> float:
    h = 1.0 / (4 * T + 4)
    r = composite_rule(-R, R, h, NODES_PER_PANEL)
    p = PWParams(T)
    wr = r.weights * (1 + r.nodes**2)
    total = 0.0
    step = max(1, 2_000_000 // len(r))
    for s in range(0, len(r), step):
        L = pw_kernel(p, r.nodes[s:s + step, None], r.nodes[None, :])
        total += float(wr[s:s + step] @ (L * L) @ wr)
    return total


def hs_integral(mode: str, R: float, T: float | None = None, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Exact sum of squared eigenvalues as a double integral of the kernel."""
    mode = canonical_mode(mode)
    _positive(R)
    if mode == "one_sided":
        return _kernel_sq_integral(R, cfg)
    if mode == "freq_sided":
        return _kernel_sq_integral(_need_T(T), cfg)
    if mode == "two_sided":
        T = _need_T(T)
        a = _kernel_sq_integral(R, cfg)
        b = a if T == R else _kernel_sq_integral(T, cfg)
        return a + b + 2 * _ft_cross_integral(R, T, cfg)
    return _pw_sq_integral(R, _need_T(T))


def hs_cross_term(R: float, T: float, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    return 2 * _ft_cross_integral(R, T, cfg)


# ---------------------------------------------------------------- reports


@dataclass(frozen=True)
class Measured:
    trace: float
    hs: float
    third_moment: float | None
    count_near_one: int
    count_above_eps: int
    count_half_band: int | None
    plunge: int


@dataclass(frozen=True)
class Predicted:
    trace: float
    hs: float
    third_moment: float | None
    count_near_one: float
    count_above_eps_bound: float | None
    hs_swapped: float | None = None


@dataclass(frozen=True)
class ExactIntegrals:
    trace_integral: float
    hs_integral: float


@dataclass(frozen=True)
class AsymptoticsReport:
    mode: str
    R: float
    T: float | None
    dim: int
    measured: Measured
    predicted: Predicted
    exact_integrals: ExactIntegrals
    eps: float

    def to_dict(self) -> dict:
        return asdict(self)


def predictions(mode: str, R: float, T: float | None) -> Predicted:
    mode = canonical_mode(mode)
    if mode == "one_sided":
        tr, hs, m3 = predicted_one_sided_moments(R)
        return Predicted(tr, hs, m3, 0.0, 2 * math.pi * R * R)
    if mode == "freq_sided":
        tr, hs, m3 = predicted_one_sided_moments(T)
        return Predicted(tr, hs, m3, 0.0, 2 * math.pi * T * T)
    if mode == "two_sided":
        return Predicted(
            predicted_trace_two_sided(R, T),
            predicted_hs_two_sided(R, T),
            None,
            4 * R * T,
            2 * math.pi * (R * R + T * T),
            hs_swapped=predicted_hs_two_sided(T, R),
        )
    pw = predicted_pw(R, T)
    return Predicted(pw["trace"], 4 * R * T, None, pw["count_near_one"], None)


def build_matrix(mode: str, R: float, T: float | None, dim: int | None = None):
    mode = canonical_mode(mode)
    if mode == "one_sided":
        return overlap_matrix_time(dim or default_dim(R), R)
    if mode == "freq_sided":
        T = _need_T(T)
        return overlap_matrix_freq(dim or default_dim(T), T)
    if mode == "two_sided":
        T = _need_T(T)
        return two_sided_matrix(dim or default_dim(R, T), R, T)
    return pw_operator_matrix(_need_T(T), R, dim)


def build_report(mode: str, R: float, T: float | None, eps: float, dim: int | None = None, cfg: KernelConfig = DEFAULT_CONFIG) -> AsymptoticsReport:
    mode = canonical_mode(mode)
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    _positive(R)
    if mode != "one_sided":
        _need_T(T)
    m = build_matrix(mode, R, T, dim)
    s = eigvals_symmetric(m)
    one_sided_like = mode in ("one_sided", "freq_sided")
    measured = Measured(
        trace=moment(s, 1),
        hs=moment(s, 2),
        third_moment=moment(s, 3) if one_sided_like else None,
        count_near_one=count_above(s, 1 - eps),
        count_above_eps=count_above(s, eps),
        count_half_band=count_in(s, 0.5 - eps, 0.5 + eps) if one_sided_like else None,
        plunge=plunge_width(s, eps),
    )
    exact = ExactIntegrals(trace_integral(mode, R, T, cfg), hs_integral(mode, R, T, cfg))
    return AsymptoticsReport(mode, float(R), None if T is None else float(T), m.dim, measured, predictions(mode, R, T), exact, float(eps))
