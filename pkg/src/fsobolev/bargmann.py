"""Numerical Bargmann transform and the weighted Fock norms B_0, B_1."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .quadrature_special import (
    SQRT_2PI,
    QuadratureRule,
    _gauss_legendre_arrays,
    basis_table,
    composite_rule,
    hermite_table,
)

PREFACTOR = 2.0**0.25 / np.pi**1.5
# the Fock weight is (FOCK_SHIFT + 2|z|^2)^beta
FOCK_SHIFT = 2.0 * np.pi - 0.5

# the two printed candidates for B(H_n(sqrt(2 pi) x) e^{-pi x^2})(z) / (2z)^n
IMAGE_CONSTANT_STATEMENT = math.sqrt(2.0) / np.pi**0.25
IMAGE_CONSTANT_PROOF = 2.0**0.25 / np.pi

_Z_CHUNK = 2048


@dataclass(frozen=True)
class FockConfig:
    beta: int = 1
    radial_cutoff: float = 8.0
    radial_nodes: int = 200
    angular_nodes: int = 128

    def __post_init__(self):
        if self.beta not in (0, 1):
            raise ValueError("beta must be 0 or 1")
        if self.radial_nodes < 1 or self.angular_nodes < 1:
            raise ValueError("node counts must be positive")
        c2 = self.radial_cutoff**2
        if not (self.radial_cutoff > 0 and -2 * c2 + math.log(FOCK_SHIFT + 2 * c2) < math.log(1e-40)):
            raise ValueError("radial_cutoff too small for a negligible Gaussian tail")

    def with_beta(self, beta: int) -> "FockConfig":
        return FockConfig(beta, self.radial_cutoff, self.radial_nodes, self.angular_nodes)


@dataclass(frozen=True)
class PolarGrid:
    points: np.ndarray  # complex, shape (radial, angular)
    weights: np.ndarray  # area weights r dr dtheta times the Fock weight

    @classmethod
    def build(cls, cfg: FockConfig) -> "PolarGrid":
        g, w = _gauss_legendre_arrays(cfg.radial_nodes)
        r = 0.5 * cfg.radial_cutoff * (g + 1)
        wr = 0.5 * cfg.radial_cutoff * w
        theta = 2 * np.pi * np.arange(cfg.angular_nodes) / cfg.angular_nodes
        weight_r = wr * r * np.exp(-2 * r * r) * (FOCK_SHIFT + 2 * r * r) ** cfg.beta
        pts = r[:, None] * np.exp(1j * theta)[None, :]
        wts = np.repeat(weight_r[:, None] * (2 * np.pi / cfg.angular_nodes), cfg.angular_nodes, axis=1)
        return cls(pts, wts)


def default_line_rule() -> QuadratureRule:
    """Rule in the integration variable t of the transform: [-20, 20], panels 0.25, 16 nodes."""
    return composite_rule(-20.0, 20.0, 0.25, 16)


def _transform_many(samples: np.ndarray, z: np.ndarray, rule: QuadratureRule) -> np.ndarray:
    """Rows of ``samples`` are f_k(t_j / sqrt(2 pi)) at the rule nodes; returns (k, len(z))."""
    t = rule.nodes
    ws = samples * rule.weights
    z = np.asarray(z, dtype=complex).ravel()
    out = np.empty((samples.shape[0], z.size), dtype=complex)
    for s in range(0, z.size, _Z_CHUNK):
        zc = z[s:s + _Z_CHUNK]
        expo = 2.0 * t[:, None] * zc[None, :] - zc[None, :] ** 2 - 0.5 * (t * t)[:, None]
        out[:, s:s + _Z_CHUNK] = ws @ np.exp(expo)
    return PREFACTOR * out


def bargmann_transform(f: Callable[[np.ndarray], np.ndarray], z, line_rule: QuadratureRule | None = None):
    """(B f)(z) by quadrature of the defining integral. ``f`` must accept arrays."""
    rule = default_line_rule() if line_rule is None else line_rule
    zarr = np.asarray(z, dtype=complex)
    if np.any(np.abs(zarr) > 10):
        raise ValueError("|z| must be <= 10")
    samples = np.asarray(f(rule.nodes / SQRT_2PI), dtype=float)[None, :]
    out = _transform_many(samples, zarr, rule)[0]
    return complex(out[0]) if zarr.ndim == 0 else out.reshape(zarr.shape)


def bargmann_basis(count: int, z, line_rule: QuadratureRule | None = None) -> np.ndarray:
    """B e_n at the points z for n < count, shape (count,) + z.shape."""
    rule = default_line_rule() if line_rule is None else line_rule
    zarr = np.asarray(z, dtype=complex)
    samples = basis_table(count, rule.nodes / SQRT_2PI)
    return _transform_many(samples, zarr, rule).reshape((count,) + zarr.shape)


def fock_norm_sq(F: Callable[[np.ndarray], np.ndarray], cfg: FockConfig = FockConfig()) -> float:
    """||F||^2 in B_beta by polar quadrature (Gauss-Legendre in r, trapezoid in angle)."""
    grid = PolarGrid.build(cfg)
    vals = np.asarray(F(grid.points))
    return float(np.sum(grid.weights * np.abs(vals) ** 2))


def fock_gram(values: np.ndarray, cfg: FockConfig) -> np.ndarray:
    """Gram matrix <F_n, F_m> from samples on the polar grid of ``cfg``, shape (k, radial, angular)."""
    grid = PolarGrid.build(cfg)
    v = values.reshape(values.shape[0], -1)
    return (v * grid.weights.ravel()) @ v.conj().T


_MAX_MONOMIAL = 300


def _check_monomial_degree(n: int):
    if not 0 <= n <= _MAX_MONOMIAL:
        raise ValueError(f"n must be in 0..{_MAX_MONOMIAL}")


def log_monomial_norm_b0(n: int) -> float:
    _check_monomial_degree(n)
    return float(math.log(np.pi) + gammaln(n + 1) - (n + 1) * math.log(2.0))


def log_monomial_norm_b1(n: int) -> float:
    return log_monomial_norm_b0(n) + math.log(n + 2 * np.pi + 0.5)


def _exp_or_inf(v: float) -> float:
    # the norms exceed the double range from n ~ 195 on; the log forms stay exact
    return math.exp(v) if v < 709.0 else math.inf


def monomial_norm_b1(n: int) -> float:
    """||z^n||^2 in B_1 = pi n! (n + 2 pi + 1/2) / 2^(n+1), via log-factorials."""
    return _exp_or_inf(log_monomial_norm_b1(n))


def monomial_norm_b0(n: int) -> float:
    """||z^n||^2 in B_0 = pi n! / 2^(n+1)."""
    return _exp_or_inf(log_monomial_norm_b0(n))


def l2_norm_sq_basis(n: int, rule: QuadratureRule | None = None) -> float:
    """||e_n||^2 in L^2(R) by quadrature on the real line."""
    if rule is None:
        c = 20.0 / SQRT_2PI
        rule = composite_rule(-c, c, 0.1, 16)
    e = basis_table(n + 1, rule.nodes)[n]
    return rule.integrate(e * e)


@dataclass(frozen=True)
class UnitarityResult:
    n: int
    b1_norm_of_image: float
    b0_ratio: float


_MAX_CHECK_DEGREE = 12


@lru_cache(maxsize=8)
def _basis_images_on_grid(radial_cutoff: float, radial_nodes: int, angular_nodes: int) -> np.ndarray:
    grid = PolarGrid.build(FockConfig(1, radial_cutoff, radial_nodes, angular_nodes))
    vals = bargmann_basis(_MAX_CHECK_DEGREE + 1, grid.points)
    vals.setflags(write=False)
    return vals


def _images_on_grid(count: int, cfg: FockConfig, line_rule: QuadratureRule | None) -> np.ndarray:
    if line_rule is None and count <= _MAX_CHECK_DEGREE + 1:
        return _basis_images_on_grid(cfg.radial_cutoff, cfg.radial_nodes, cfg.angular_nodes)[:count]
    return bargmann_basis(count, PolarGrid.build(cfg).points, line_rule)


def unitarity_check(n: int, cfg: FockConfig = FockConfig(), line_rule: QuadratureRule | None = None) -> UnitarityResult:
    if not 0 <= n <= _MAX_CHECK_DEGREE:
        raise ValueError(f"n must be in 0..{_MAX_CHECK_DEGREE}")
    grid = PolarGrid.build(cfg.with_beta(1))
    F = _images_on_grid(n + 1, cfg, line_rule)[n]
    b1 = float(np.sum(grid.weights * np.abs(F) ** 2))
    b0 = float(np.sum(PolarGrid.build(cfg.with_beta(0)).weights * np.abs(F) ** 2))
    return UnitarityResult(n, b1, b0 / l2_norm_sq_basis(n))


def b1_gram(count: int, cfg: FockConfig = FockConfig(), line_rule: QuadratureRule | None = None) -> np.ndarray:
    """<B e_n, B e_m> in B_1 for n, m < count."""
    cfg1 = cfg.with_beta(1)
    return fock_gram(_images_on_grid(count, cfg1, line_rule), cfg1)


def measured_image_constant(n: int, z: complex = 1.0, line_rule: QuadratureRule | None = None) -> complex:
    """B(H_n(sqrt(2 pi) x) e^{-pi x^2})(z) / (2z)^n, measured by quadrature.

    The raw Hermite function is rebuilt from the unit-normalized one, so no overflow
    occurs for the small n this is used with.
    """
    rule = default_line_rule() if line_rule is None else line_rule
    u = rule.nodes  # u = sqrt(2 pi) x
    log_scale = 0.5 * (n * math.log(2.0) + gammaln(n + 1) + 0.5 * math.log(np.pi))
    raw = hermite_table(n + 1, u)[n] * math.exp(log_scale)
    val = _transform_many(raw[None, :], np.array([z]), rule)[0, 0]
    return complex(val / (2 * z) ** n)


def angular_coefficients(n: int, radius: float = 1.0, samples: int = 64, line_rule: QuadratureRule | None = None) -> np.ndarray:
    """Fourier coefficients of theta -> (B e_n)(radius e^{i theta}), indices 0..samples-1."""
    z = radius * np.exp(2j * np.pi * np.arange(samples) / samples)
    vals = bargmann_basis(n + 1, z, line_rule)[n]
    return np.fft.fft(vals) / samples

