"""Reproducing kernel of the Fourier-symmetric Sobolev space, its Fourier transform,
their large-argument approximations, and the weighted Paley-Wiener kernel.

Representations of K_x(y) provided here:

* ``kernel_series``: plain partial sum of sum_n e_n(x) e_n(y).
* ``kernel_mehler``: the Mehler-type integral over t in (0, 1), after t = sin(theta).
* ``kernel_resolvent``: the exact limit of the series. With u = sqrt(2 pi) x the kernel is
  a multiple of the Green's function of the shifted oscillator ``-d^2/du^2 + u^2 + 4 pi``,
  which is a product of two parabolic cylinder functions divided by their Wronskian.

The resolvent form exists because the series converges only like N^(-1/2) on the
diagonal: the kernel has a jump in its first derivative at y = x.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np

from .quadrature_special import (
    HermiteBasis,
    _gauss_legendre_arrays,
    basis_table,
)

TWO_PI = 2.0 * np.pi
# exponent of t in both integral representations
T_POWER = TWO_PI - 0.5
# order of the parabolic cylinder functions in the Green's function
PCF_ORDER = -TWO_PI - 0.5
# jump of d/dy K_x(y) across y = x
DERIVATIVE_JUMP = -4.0 * np.pi**2

_MAX_ARG = 50.0


@dataclass(frozen=True)
class KernelConfig:
    series_terms: int = 400
    mehler_nodes: int = 256
    ft_base_nodes: int = 64

    def __post_init__(self):
        for name in ("series_terms", "mehler_nodes", "ft_base_nodes"):
            if getattr(self, name) < 8:
                raise ValueError(f"{name} must be >= 8")


DEFAULT_CONFIG = KernelConfig()


@dataclass(frozen=True)
class PWParams:
    """Band half-width T of the weighted Paley-Wiener space."""

    T: float

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ValueError("T must be a positive finite number")

    @property
    def coth(self) -> float:
        return 1.0 / math.tanh(4.0 * math.pi * self.T)

    @property
    def csch(self) -> float:
        # 1/sinh(4 pi T) written with a negative exponent only
        q = math.exp(-4.0 * math.pi * self.T)
        return 2.0 * q / (1.0 - q * q)


def _check_args(*vals):
    for v in vals:
        if abs(v) > _MAX_ARG:
            raise ValueError(f"argument {v} outside [-{_MAX_ARG}, {_MAX_ARG}]")


# ---------------------------------------------------------------- series forms


def series_terms_table(x, y, count: int) -> np.ndarray:
    """Products e_n(x) e_n(y), n < count, for matching 1-D arrays x and y."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    norm = HermiteBasis(count - 1).normalization
    return basis_table(count, x, norm) * basis_table(count, y, norm)


def kernel_series(x: float, y: float, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """Partial sum of sum_n e_n(x) e_n(y) with ``cfg.series_terms`` terms."""
    _check_args(x, y)
    return float(series_terms_table([x], [y], cfg.series_terms)[:, 0].sum())


def _repeated_average(partial: np.ndarray, rounds: int) -> float:
    s = np.asarray(partial[-(rounds + 1):], dtype=float)
    for _ in range(s.size - 1):
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def kernel_ft_series(x: float, y: float, cfg: KernelConfig = DEFAULT_CONFIG, rounds: int = 20) -> complex:
    """sum_n (-i)^n e_n(x) e_n(y), summed with averaging acceleration.

    The even and odd subsequences are each alternating, so repeated averaging of
    their last partial sums cancels the slowly decaying tail. The alternation is modulated
    at a rate set by x and y, so the term count grows with x^2 + y^2.
    """
    _check_args(x, y)
    count = max(cfg.series_terms, int(math.ceil(40.0 * (x * x + y * y))) + 400)
    a = series_terms_table([x], [y], count)[:, 0]
    sign_even = (-1.0) ** np.arange(a[0::2].size)
    sign_odd = (-1.0) ** np.arange(a[1::2].size)
    rounds = min(rounds, a[1::2].size - 1)
    re = _repeated_average(np.cumsum(sign_even * a[0::2]), rounds)
    im = _repeated_average(np.cumsum(sign_odd * a[1::2]), rounds)
    return complex(re, -im)


@lru_cache(maxsize=4096)
def _resolvent_cached(x: float, y: float, dps: int) -> float:
    with mpmath.workdps(dps):
        u_lo, u_hi = sorted((mpmath.mpf(x) * mpmath.sqrt(2 * mpmath.pi), mpmath.mpf(y) * mpmath.sqrt(2 * mpmath.pi)))
        nu = -2 * mpmath.pi - mpmath.mpf(1) / 2
        s2 = mpmath.sqrt(2)
        g = mpmath.gamma(-nu) * mpmath.pcfd(nu, -s2 * u_lo) * mpmath.pcfd(nu, s2 * u_hi) / mpmath.sqrt(mpmath.pi)
        return float(mpmath.sqrt(2) * mpmath.pi**1.5 * g)


def kernel_resolvent(x: float, y: float, dps: int = 30) -> float:
    """Exact sum of the kernel series via parabolic cylinder functions (mpmath)."""
    _check_args(x, y)
    return _resolvent_cached(float(x), float(y), int(dps))


@lru_cache(maxsize=65536)
def _log_pcf(z: float, dps: int) -> tuple[float, float]:
    """(log|D_nu(z)|, sign D_nu(z)) for nu = PCF_ORDER."""
    with mpmath.workdps(dps):
        v = mpmath.pcfd(mpmath.mpf(PCF_ORDER), mpmath.mpf(z))
        return float(mpmath.log(abs(v))), float(mpmath.sign(v))


def kernel_resolvent_matrix(x, dps: int = 20) -> np.ndarray:
    """K_{x_i}(x_j) for all pairs of the nodes x, from the separable resolvent form.

    K(x, y) = c D_nu(-sqrt(2) u_lo) D_nu(sqrt(2) u_hi) with u = sqrt(2 pi) x, so only one
    special-function value per node and sign is needed; products are formed from logarithms,
    which keeps large |x| free of overflow.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be one-dimensional")
    if x.size:
        _check_args(float(np.max(np.abs(x))))
    z = np.sqrt(2.0) * np.sqrt(2.0 * np.pi) * x
    lo = np.array([_log_pcf(float(-v), dps) for v in z]).reshape(-1, 2)
    hi = np.array([_log_pcf(float(v), dps) for v in z]).reshape(-1, 2)
    with mpmath.workdps(dps):
        log_c = float(mpmath.log(mpmath.sqrt(2) * mpmath.pi * mpmath.gamma(-mpmath.mpf(PCF_ORDER))))
    # row i is the lower point where x_i <= x_j
    below = x[:, None] <= x[None, :]
    logs = np.where(below, lo[:, None, 0] + hi[None, :, 0], lo[None, :, 0] + hi[:, None, 0])
    signs = np.where(below, lo[:, None, 1] * hi[None, :, 1], lo[None, :, 1] * hi[:, None, 1])
    return signs * np.exp(logs + log_c)


# ---------------------------------------------------------------- integral forms


def _graded_breakpoints(depth: int, length: float) -> np.ndarray:
    """Breakpoints on [0, length], geometric of ratio sqrt(2) toward both ends.

    Toward 0 they reach 2^(depth - 4); toward ``length`` they reach length * 2^-14, which
    resolves the non-integer power of sin(theta) in the weight at theta = 0.
    """
    half = 0.5 * length
    k = max(1, int(np.ceil(2 * (np.log2(half) - depth + 4))))
    low = half * 2.0 ** (-0.5 * np.arange(k, 0, -1))
    high = length - half * 2.0 ** (-0.5 * np.arange(1, 29))
    return np.concatenate(([0.0], low, [half], high, [length]))


MEHLER_NODES_PER_PANEL = 16
_MIN_DEPTH = -45


@lru_cache(maxsize=256)
def _mehler_rule(nodes: int, depth: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes t = sin(theta) and weights (sin theta)^(2 pi - 1/2) d theta on (0, pi/2).

    The panels in phi = pi/2 - theta shrink geometrically toward phi = 0. Near the diagonal
    the integrand switches on at phi ~ |x - y|, and for |x| + |y| large it concentrates at
    phi ~ 1/(|x| + |y|); geometric panels resolve features of any size above 2^depth.
    """
    half_pi = 0.5 * np.pi
    br = _graded_breakpoints(depth, half_pi)
    per = max(MEHLER_NODES_PER_PANEL, -(-nodes // (br.size - 1)))
    g, w = _gauss_legendre_arrays(per)
    lo, hi = br[:-1, None], br[1:, None]
    phi = (0.5 * (hi - lo) * (g + 1) + lo).ravel()
    wphi = (0.5 * (hi - lo) * w).ravel()
    theta = half_pi - phi
    t = np.sin(theta)
    # 1 - t and 1 + t computed without cancellation
    one_minus = 2.0 * np.sin(0.5 * phi) ** 2
    weight = wphi * t**T_POWER
    for a in (t, one_minus, weight):
        a.setflags(write=False)
    return t, one_minus, weight


def _mehler_depth(x: np.ndarray, y: np.ndarray) -> int:
    """log2 of the smallest phi scale the integrand has on the grid x, y (broadcast)."""
    s = float(np.max(np.abs(x)) + np.max(np.abs(y))) if x.size and y.size else 0.0
    # for |x| + |y| large the integrand lives at phi ~ 1/(|x| + |y|)
    depth = int(np.floor(np.log2(2.0 / max(s, 4.0)))) - 8
    if x.size and y.size:
        d = np.abs(np.subtract(x, y))
        d = d[d > 0]
        if d.size:
            depth = min(depth, int(np.floor(np.log2(d.min()))))
    return max(depth, _MIN_DEPTH)


def mehler_exponent(x, y, t, one_minus_t):
    """-pi (x^2 + y^2) + 2 pi (2xyt - (x^2 + y^2) t^2)/(1 - t^2), cancellation-free form."""
    one_plus = 1.0 + t
    return -0.5 * np.pi * ((x - y) ** 2 * one_plus / one_minus_t + (x + y) ** 2 * one_minus_t / one_plus)


def kernel_mehler_grid(x, y, cfg: KernelConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Mehler integral evaluated on broadcast arrays x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size and y.size:
        _check_args(float(np.max(np.abs(x))), float(np.max(np.abs(y))))
    t, om, w = _mehler_rule(cfg.mehler_nodes, _mehler_depth(x, y))
    xb, yb = np.broadcast_arrays(x, y)
    e = mehler_exponent(xb[..., None], yb[..., None], t, om)
    return np.sqrt(2.0) * np.pi * np.exp(e) @ w


def kernel_mehler(x: float, y: float, cfg: KernelConfig = DEFAULT_CONFIG) -> float:
    """K_x(y) from its Mehler-type integral with t = sin(theta)."""
    return float(kernel_mehler_grid(float(x), float(y), cfg))


def _ft_panels(x: float, y: float, cfg: KernelConfig) -> tuple[np.ndarray, np.ndarray]:
    s = x * x + y * y
    total = cfg.ft_base_nodes + math.ceil(4 * abs(x * y))
    if s * np.pi > 4.0:
        # integrand lives within ~1/(pi s) of t = 1
        br = 1.0 - _graded_breakpoints(1.0 / (np.pi * s), 1.0)[::-1]
    else:
        br = np.array([0.0, 0.5, 1.0])
    # phase 4 pi x y t/(1+t^2): allot nodes by panel length plus oscillation count
    phase = 2.0 * abs(x * y) * br / (1 + br * br)
    osc = np.abs(np.diff(phase))
    per_panel = 12 + np.ceil(10 * osc).astype(int)
    while per_panel.sum() < total:
        per_panel = per_panel + 1
    nodes, weights = [], []
    for k, m in enumerate(per_panel):
        g, w = _gauss_legendre_arrays(int(m))
        a, b = br[k], br[k + 1]
        nodes.append(0.5 * (b - a) * (g + 1) + a)
        weights.append(0.5 * (b - a) * w)
    return np.concatenate(nodes), np.concatenate(weights)


def kernel_ft(x: float, y: float, cfg: KernelConfig = DEFAULT_CONFIG) -> complex:
    """Fourier transform of K_x evaluated at y, from its integral over t in (0, 1)."""
    _check_args(x, y)
    t, w = _ft_panels(float(x), float(y), cfg)
    s = x * x + y * y
    q = 1.0 + t * t
    expo = -np.pi * s * (1.0 - t * t) / q
    phase = -4.0 * np.pi * x * y * t / q
    amp = w * t**T_POWER / np.sqrt(q) * np.exp(expo)
    val = np.sqrt(2.0) * np.pi * np.sum(amp * np.exp(1j * phase))
    return complex(val)


def kernel_ft_grid(x, y, cfg: KernelConfig = DEFAULT_CONFIG, chunk: int = 4096) -> np.ndarray:
    """kernel_ft on broadcast arrays, with one panel rule sized for the largest |x|, |y|."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xb, yb = np.broadcast_arrays(x, y)
    if xb.size == 0:
        return np.zeros(xb.shape, dtype=complex)
    xm, ym = float(np.max(np.abs(xb))), float(np.max(np.abs(yb)))
    _check_args(xm, ym)
    t, w = _ft_panels(xm, ym, cfg)
    q = 1.0 + t * t
    a = (1.0 - t * t) / q
    b = t / q
    amp = np.sqrt(2.0) * np.pi * w * t**T_POWER / np.sqrt(q)
    xf, yf = xb.ravel(), yb.ravel()
    out = np.empty(xf.size, dtype=complex)
    for s0 in range(0, xf.size, chunk):
        xs, ys = xf[s0:s0 + chunk, None], yf[s0:s0 + chunk, None]
        expo = -np.pi * (xs * xs + ys * ys) * a - 4j * np.pi * (xs * ys) * b
        out[s0:s0 + chunk] = np.exp(expo) @ amp
    return out.reshape(xb.shape)


# ---------------------------------------------------------------- asymptotics


def kernel_asymptotic(x: float, y: float) -> float:
    """(pi/x) exp(-pi |x^2 - y^2|), valid for large x and |y - x| < 1."""
    if not (x > 0 and x - 1 < y < x + 1):
        raise ValueError("need x > 0 and x - 1 < y < x + 1")
    return float(np.pi / x * np.exp(-np.pi * abs(x * x - y * y)))


def kernel_ft_asymptotic(x: float, y: float) -> complex:
    """exp(-2 pi i x y)/(x^2 + y^2) for large x^2 + y^2."""
    s = x * x + y * y
    if s <= 0:
        raise ValueError("(x, y) = (0, 0) is excluded")
    return complex(np.exp(-2j * np.pi * x * y) / s)


# ---------------------------------------------------------------- Paley-Wiener


def pw_kernel(p: PWParams, t, y):
    """L_t(y), the reproducing kernel of PW_T with weight 1 + x^2. Broadcasts over t, y."""
    T = p.T
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    d = t - y
    denom = np.pi * ((1.0 + t * t) * (1.0 + y * y))
    near = np.abs(d) < 1e-6
    safe_d = np.where(near, 1.0, d)
    x = TWO_PI * T * d
    # sin(2 pi T d)/(pi d) -> 2T (1 - x^2/6) on the near-diagonal branch
    sinc_term = np.where(near, 2.0 * T * (1.0 - x * x / 6.0) * np.pi, np.sin(x) / safe_d)
    first = (1.0 + t * y) * sinc_term / denom
    second = (-p.coth * np.cos(x) + p.csch * np.cos(TWO_PI * T * (t + y))) / denom
    out = first + second
    return float(out) if out.ndim == 0 else out


def pw_kernel_diag(p: PWParams, t):
    """L_t(t) in overflow-safe form."""
    t = np.asarray(t, dtype=float)
    q = 1.0 + t * t
    out = 2.0 * p.T / q + (-p.coth + p.csch * np.cos(4.0 * np.pi * p.T * t)) / (np.pi * q * q)
    return float(out) if out.ndim == 0 else out


def pw_kernel_ft(p: PWParams, t: float, y: float) -> complex:
    """Fourier transform of L_t at y in [-T, T]; every exponential has a non-positive argument."""
    T = p.T
    if abs(y) > T * (1 + 1e-15):
        raise ValueError(f"|y| = {abs(y)} exceeds T = {T}")
    a = np.exp(-2j * np.pi * t * T)
    ab = np.conj(a)
    em = math.exp(-TWO_PI * (T - y))
    ep = math.exp(-TWO_PI * (T + y))
    q = math.exp(-4.0 * np.pi * T)
    corr = (-a * em - ab * ep + q * (ab * em + a * ep)) / (1.0 - q * q)
    return complex((np.exp(-2j * np.pi * t * y) + corr) / (1.0 + t * t))


__all__ = [
    "DEFAULT_CONFIG",
    "DERIVATIVE_JUMP",
    "KernelConfig",
    "PWParams",
    "kernel_asymptotic",
    "kernel_ft",
    "kernel_ft_asymptotic",
    "kernel_ft_grid",
    "kernel_ft_series",
    "kernel_mehler",
    "kernel_mehler_grid",
    "kernel_resolvent",
    "kernel_series",
    "mehler_exponent",
    "pw_kernel",
    "pw_kernel_diag",
    "pw_kernel_ft",
    "series_terms_table",
]
