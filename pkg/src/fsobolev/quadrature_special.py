"""Scaled Hermite functions, the orthonormal basis of the space, and Gauss-Legendre rules.

Everything that evaluates a Hermite function goes through the unit-normalized
three-term recurrence, so neither ``H_n`` nor ``n!`` is ever formed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SQRT_2PI = np.sqrt(2.0 * np.pi)
# shift in the basis norms: ||H_n(sqrt(2 pi) x) exp(-pi x^2)||^2 is proportional to n + SHIFT
SHIFT = 2.0 * np.pi + 0.5
# numerator of normalization[n]**2
NORM_NUMERATOR = np.sqrt(2.0) * np.pi**1.5

_RESCALE = 1e150


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float]

    def __post_init__(self):
        a, b = self.domain
        if not a < b:
            raise ValueError(f"empty domain {self.domain}")
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def __len__(self) -> int:
        return self.nodes.size

    def integrate(self, values):
        out = np.dot(self.weights, values)
        return complex(out) if np.iscomplexobj(out) else float(out)


@dataclass(frozen=True)
class HermiteBasis:
    """The first ``max_degree + 1`` orthonormal basis functions.

    ``normalization[n]`` maps the unit L2-normalized Hermite function, evaluated at
    ``sqrt(2 pi) x``, to the n-th orthonormal element ``e_n(x)``.
    """

    max_degree: int
    normalization: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError("max_degree must be >= 0")
        n = np.arange(self.max_degree + 1, dtype=float)
        norm = np.sqrt(NORM_NUMERATOR / (n + SHIFT))
        norm.setflags(write=False)
        object.__setattr__(self, "normalization", norm)

    @property
    def size(self) -> int:
        return self.max_degree + 1

    def table(self, x) -> np.ndarray:
        """Values ``e_n(x_j)`` as an array of shape (max_degree + 1, len(x))."""
        return basis_table(self.size, x, self.normalization)


def hermite_table(count: int, u) -> np.ndarray:
    """Unit-normalized Hermite functions h_0..h_{count-1} at the points ``u``.

    Returns an array of shape ``(count, len(u))``. The recurrence is started from
    the polynomial part alone and the Gaussian factor is reattached per row, with
    running rescaling, so that large ``|u|`` does not underflow at the start.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    u = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty((count, u.size))
    half_sq = 0.5 * u * u
    logscale = np.zeros(u.size)
    prev = np.zeros(u.size)
    cur = np.full(u.size, np.pi**-0.25)
    out[0] = cur * np.exp(-half_sq)
    rescaled = False
    for n in range(1, count):
        nxt = u * np.sqrt(2.0 / n) * cur - np.sqrt((n - 1) / n) * prev
        prev, cur = cur, nxt
        big = np.abs(cur) > _RESCALE
        if big.any():
            rescaled = True
            s = np.where(big, np.abs(cur), 1.0)
            cur = cur / s
            prev = prev / s
            logscale += np.log(s)
        if rescaled:
            out[n] = cur * np.exp(logscale - half_sq)
        else:
            out[n] = cur * np.exp(-half_sq)
    return out


def hermite_unit(n: int, u: float) -> float:
    """Unit L2-normalized Hermite function ``H_n(u) exp(-u^2/2) / sqrt(2^n n! sqrt(pi))``."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(hermite_table(n + 1, [u])[n, 0])


def basis_table(count: int, x, normalization=None) -> np.ndarray:
    """``e_n(x_j)`` for n < count, shape ``(count, len(x))``."""
    if normalization is None:
        normalization = HermiteBasis(count - 1).normalization
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return normalization[:count, None] * hermite_table(count, SQRT_2PI * x)


def basis_fn(basis: HermiteBasis, n: int, x: float) -> float:
    if not 0 <= n <= basis.max_degree:
        raise ValueError(f"degree {n} outside 0..{basis.max_degree}")
    return float(basis.normalization[n] * hermite_unit(n, SQRT_2PI * x))


def truncation_radius(max_degree: int) -> float:
    """Half-width C of the interval [-C, C] that replaces the real line for degree <= max_degree."""
    return float(np.sqrt((2.0 * max_degree + 40.0) / (2.0 * np.pi)) + 4.0)


def default_panel_width(max_degree: int) -> float:
    return min(0.25, 1.0 / np.sqrt(max_degree + 1.0))


def _legendre_with_derivative(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(2, n + 1):
        p_prev, p = p, ((2 * j - 1) * x * p - (j - 1) * p_prev) / j
    if n == 1:
        return x.copy(), np.ones_like(x)
    return p, n * (x * p - p_prev) / (x * x - 1.0)


@lru_cache(maxsize=64)
def _gauss_legendre_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    k = np.arange(1, n + 1)
    x = np.cos(np.pi * (k - 0.25) / (n + 0.5))
    for _ in range(100):
        p, dp = _legendre_with_derivative(n, x)
        step = p / dp
        x = x - step
        if np.max(np.abs(step)) < 1e-15:
            break
    else:  # pragma: no cover
        raise RuntimeError(f"Gauss-Legendre Newton iteration failed for n={n}")
    _, dp = _legendre_with_derivative(n, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    # enforce exact symmetry about 0
    x = 0.5 * (x - x[::-1])
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int) -> QuadratureRule:
    """n-point Gauss-Legendre rule on (-1, 1), exact for degree <= 2n - 1."""
    if not 1 <= n <= 4096:
        raise ValueError(f"n must be in 1..4096, got {n}")
    x, w = _gauss_legendre_arrays(int(n))
    return QuadratureRule(x.copy(), w.copy(), (-1.0, 1.0))


def mapped_rule(a: float, b: float, n: int) -> QuadratureRule:
    """Gauss-Legendre rule with n points affinely mapped to (a, b)."""
    x, w = _gauss_legendre_arrays(int(n))
    half = 0.5 * (b - a)
    return QuadratureRule(half * x + 0.5 * (a + b), half * w, (a, b))


def panel_rule(breakpoints, nodes_per_panel: int) -> QuadratureRule:
    """Composite Gauss-Legendre rule over consecutive panels given by sorted breakpoints."""
    br = np.asarray(breakpoints, dtype=float)
    if br.ndim != 1 or br.size < 2 or np.any(np.diff(br) <= 0):
        raise ValueError("breakpoints must be strictly increasing with at least two entries")
    t, w = _gauss_legendre_arrays(int(nodes_per_panel))
    lo, hi = br[:-1, None], br[1:, None]
    half = 0.5 * (hi - lo)
    nodes = (half * t + 0.5 * (hi + lo)).ravel()
    weights = (half * w).ravel()
    return QuadratureRule(nodes, weights, (float(br[0]), float(br[-1])))


def composite_rule(a: float, b: float, panel_width: float, nodes_per_panel: int) -> QuadratureRule:
    """Gauss-Legendre panels of width ``panel_width`` from a; the last one ends exactly at b."""
    if not a < b:
        raise ValueError("need a < b")
    if panel_width <= 0:
        raise ValueError("panel_width must be positive")
    if nodes_per_panel < 2:
        raise ValueError("nodes_per_panel must be >= 2")
    full = int(np.floor((b - a) / panel_width * (1 + 1e-12)))
    br = a + panel_width * np.arange(full + 1)
    if b - br[-1] > 1e-12 * max(1.0, abs(b)):
        br = np.append(br, b)
    else:
        br[-1] = b
    return panel_rule(br, nodes_per_panel)


def line_rule(max_degree: int, panel_width: float | None = None, nodes_per_panel: int = 16) -> QuadratureRule:
    """Rule on [-C, C] adequate for products of basis functions up to ``max_degree``."""
    c = truncation_radius(max_degree)
    if panel_width is None:
        panel_width = default_panel_width(max_degree)
    return composite_rule(-c, c, panel_width, nodes_per_panel)


def h_gram(count: int, rule: QuadratureRule | None = None, numeric_ft: bool = True) -> np.ndarray:
    """<e_n, e_m> in the Fourier-symmetric space for n, m < count.

    The time half is int e_n e_m (1 + x^2). With ``numeric_ft`` the frequency half uses
    Fourier transforms of e_n computed by quadrature on the same rule; otherwise it uses
    the eigenfunction relation e_n^ = (-i)^n e_n.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if rule is None:
        rule = line_rule(count - 1)
    x, w = rule.nodes, rule.weights
    E = basis_table(count, x)
    time = (E * (w * (1.0 + x * x))) @ E.T
    if not numeric_ft:
        d = np.subtract.outer(np.arange(count), np.arange(count))
        return time + np.real((-1j) ** d) * time
    F = (E * w) @ np.exp(-2j * np.pi * np.outer(x, x))
    freq = np.real((F * (w * (1.0 + x * x))) @ F.conj().T)
    return time + freq
