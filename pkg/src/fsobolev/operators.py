"""Dense symmetric discretizations of the concentration operators.

Galerkin matrices live in the orthonormal basis e_n; the Paley-Wiener operator and the
kernel oracle are Nystrom discretizations symmetrized with sqrt(w (1 + x^2)).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType

import numpy as np

from .kernels import DEFAULT_CONFIG, DERIVATIVE_JUMP, KernelConfig, PWParams, kernel_mehler_grid, kernel_resolvent_matrix, pw_kernel
from .quadrature_special import HermiteBasis, composite_rule, default_panel_width, mapped_rule

MODES = ("one_sided", "freq_sided", "two_sided", "pw", "oracle_one_sided")
# Galerkin dimension heuristic N(r) = ceil(DIM_BASE * (1 + r^2)^(2/3)), capped. The sum of
# squared Galerkin eigenvalues misses its limit by about (5.5 r^2 + 9) N^(-3/2) (relative),
# so this keeps that gap below 1e-3 for r <= 4.
DIM_BASE = 500.0
DIM_CAP = 4096
PW_MAX_NODES = 4096


@dataclass(frozen=True)
class ConcentrationMatrix:
    entries: np.ndarray
    mode: str
    R: float | None = None
    T: float | None = None
    meta: MappingProxyType = field(default_factory=lambda: MappingProxyType({}))

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}")
        e = np.array(self.entries, dtype=float)
        if e.ndim != 2 or e.shape[0] != e.shape[1]:
            raise ValueError("entries must be a square matrix")
        # keep the upper triangle and mirror it, so symmetry is exact
        e = np.triu(e) + np.triu(e, 1).T
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)
        object.__setattr__(self, "meta", MappingProxyType(dict(self.meta)))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries))

    def frobenius_sq(self) -> float:
        return float(np.sum(self.entries**2))


def default_dim(R: float, T: float | None = None) -> int:
    """Galerkin truncation for the interval radius max(R, T)."""
    r = max(R, T or 0.0)
    if r <= 0:
        raise ValueError("R must be positive")
    return int(min(DIM_CAP, math.ceil(DIM_BASE * (1.0 + r * r) ** (2.0 / 3.0))))


def _check_positive(**kw):
    for k, v in kw.items():
        if not (v is not None and v > 0 and math.isfinite(v)):
            raise ValueError(f"{k} must be positive and finite, got {v}")


def _interval_overlap(N: int, R: float) -> tuple[np.ndarray, dict]:
    """int_{-R}^{R} e_n e_m (1 + x^2) dx for n, m < N, odd n - m set to exact zero."""
    basis = HermiteBasis(N - 1)
    rule = composite_rule(-R, R, default_panel_width(N - 1), 16)
    E = basis.table(rule.nodes)
    M = (E * (rule.weights * (1.0 + rule.nodes**2))) @ E.T
    idx = np.arange(N)
    M[(idx[:, None] + idx[None, :]) % 2 == 1] = 0.0
    return M, {"quadrature": "composite_gauss_legendre", "nodes": len(rule), "panel_width": float(default_panel_width(N - 1))}


def _freq_signs(N: int) -> np.ndarray:
    # (-i)^(n-m) realized on even n - m: +1 when 4 | n - m, -1 otherwise
    d = np.subtract.outer(np.arange(N), np.arange(N))
    return np.where(d % 4 == 0, 1.0, -1.0)


def overlap_matrix_time(N: int, R: float) -> ConcentrationMatrix:
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_positive(R=R)
    M, meta = _interval_overlap(N, R)
    return ConcentrationMatrix(M, "one_sided", R=R, meta=meta)


def overlap_matrix_freq(N: int, T: float) -> ConcentrationMatrix:
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_positive(T=T)
    M, meta = _interval_overlap(N, T)
    return ConcentrationMatrix(M * _freq_signs(N), "freq_sided", T=T, meta=meta)


def two_sided_matrix(N: int, R: float, T: float) -> ConcentrationMatrix:
    if N < 1:
        raise ValueError("N must be >= 1")
    _check_positive(R=R, T=T)
    a, meta = _interval_overlap(N, R)
    b = a * _freq_signs(N) if T == R else _interval_overlap(N, T)[0] * _freq_signs(N)
    return ConcentrationMatrix(a + b, "two_sided", R=R, T=T, meta=meta)


def pw_default_nodes(R: float, T: float) -> int:
    return int(min(PW_MAX_NODES, max(512, math.ceil(40.0 * R * T))))


def pw_operator_matrix(T: float, R: float, M: int | None = None) -> ConcentrationMatrix:
    """sqrt(w_j rho_j) L_{x_j}(x_k) sqrt(w_k rho_k) on Gauss-Legendre nodes of [-R, R]."""
    _check_positive(R=R, T=T)
    M = pw_default_nodes(R, T) if M is None else int(M)
    if not 16 <= M <= PW_MAX_NODES:
        raise ValueError(f"M must be in 16..{PW_MAX_NODES}")
    rule = mapped_rule(-R, R, M)
    x = rule.nodes
    s = np.sqrt(rule.weights * (1.0 + x * x))
    L = pw_kernel(PWParams(T), x[:, None], x[None, :])
    return ConcentrationMatrix(s[:, None] * L * s[None, :], "pw", R=R, T=T, meta={"quadrature": "gauss_legendre", "nodes": M})


def gregory_weights(M: int, h: float) -> np.ndarray:
    """Trapezoid weights with third-order Gregory end corrections."""
    if M < 8:
        raise ValueError("need at least 8 nodes")
    w = np.full(M, h)
    ends = np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0]) * h
    w[:3] = ends
    w[-3:] = ends[::-1]
    return w


ORACLE_KERNELS = ("resolvent", "mehler")


def kernel_operator_oracle(
    R: float,
    M: int,
    cfg: KernelConfig = DEFAULT_CONFIG,
    kink_correction: bool = True,
    kernel: str = "resolvent",
) -> ConcentrationMatrix:
    """Nystrom discretization of T_I with the kernel K_x(y), independent of the basis e_n.

    Uniform nodes with Gregory end weights. ``kernel`` picks the separable parabolic-cylinder
    form (fast, one special-function value per node) or the Mehler integral. K has a jump of
    DERIVATIVE_JUMP in its first derivative across the diagonal, which limits plain rules to
    O(h^2); with ``kink_correction`` the leading Euler-Maclaurin term of that jump,
    h^2/12 * jump * rho_j, is added on the interior diagonal, giving O(h^3).
    """
    _check_positive(R=R)
    if M < 16:
        raise ValueError("M must be >= 16")
    if kernel not in ORACLE_KERNELS:
        raise ValueError(f"kernel must be one of {ORACLE_KERNELS}")
    x = np.linspace(-R, R, M)
    x[M // 2:] = -x[(M - 1) // 2::-1]  # exact mirror symmetry of the nodes
    h = 2.0 * R / (M - 1)
    rho = 1.0 + x * x
    s = np.sqrt(gregory_weights(M, h) * rho)
    if kernel == "resolvent":
        K = kernel_resolvent_matrix(x)
    else:
        K = np.empty((M, M))
        for i in range(M):
            K[i, i:] = kernel_mehler_grid(x[i], x[i:], cfg)
    K = np.triu(K) + np.triu(K, 1).T
    mat = s[:, None] * K * s[None, :]
    if kink_correction:
        corr = h * h / 12.0 * DERIVATIVE_JUMP * rho
        corr[0] = corr[-1] = 0.0
        mat[np.diag_indices(M)] += corr
    meta = {"quadrature": "uniform_gregory", "nodes": M, "kink_correction": bool(kink_correction), "kernel": kernel}
    return ConcentrationMatrix(mat, "oracle_one_sided", R=R, meta=meta)


_HEADER = struct.Struct("<Q")


def dump_matrix(m: ConcentrationMatrix | np.ndarray, path) -> None:
    """Little-endian u64 dimension followed by dim^2 float64 entries, row-major."""
    a = m.entries if isinstance(m, ConcentrationMatrix) else np.asarray(m, dtype=float)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(a.shape[0]))
        fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_matrix(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    (dim,) = _HEADER.unpack_from(raw)
    data = np.frombuffer(raw, dtype="<f8", offset=_HEADER.size)
    if data.size != dim * dim:
        raise ValueError(f"expected {dim * dim} entries, found {data.size}")
    return data.reshape(dim, dim).astype(float)
