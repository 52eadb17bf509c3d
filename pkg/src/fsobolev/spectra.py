"""Dense symmetric eigendecomposition and the spectral statistics built on it."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .operators import ConcentrationMatrix


class NumericalFailure(RuntimeError):
    """The eigensolver did not converge."""


@dataclass(frozen=True)
class SymSpectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray | None = None

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1:
            raise ValueError("eigenvalues must be one-dimensional")
        if np.any(np.diff(ev) > 0):
            raise ValueError("eigenvalues must be nonincreasing")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)
        if self.eigenvectors is not None:
            v = np.asarray(self.eigenvectors, dtype=float)
            if v.shape != (ev.size, ev.size):
                raise ValueError("eigenvectors must be dim x dim")
            v.setflags(write=False)
            object.__setattr__(self, "eigenvectors", v)

    @property
    def dim(self) -> int:
        return self.eigenvalues.size

    @classmethod
    def from_values(cls, values) -> "SymSpectrum":
        return cls(np.sort(np.asarray(values, dtype=float))[::-1].copy())


def eigvals_symmetric(m: ConcentrationMatrix | np.ndarray, want_vectors: bool = False) -> SymSpectrum:
    """All eigenvalues (descending) of a real symmetric matrix, optionally with vectors."""
    a = m.entries if isinstance(m, ConcentrationMatrix) else np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if not np.all(np.isfinite(a)):
        raise NumericalFailure("matrix has non-finite entries")
    if not np.array_equal(a, a.T):
        raise ValueError("matrix must be exactly symmetric")
    try:
        if want_vectors:
            w, v = scipy.linalg.eigh(a, driver="evd")
            return SymSpectrum(w[::-1].copy(), v[:, ::-1].copy())
        w = scipy.linalg.eigh(a, eigvals_only=True, driver="evd")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericalFailure(str(exc)) from exc
    return SymSpectrum(w[::-1].copy())


def moment(s: SymSpectrum, p: int) -> float:
    if p not in (1, 2, 3):
        raise ValueError("p must be 1, 2 or 3")
    return float(math.fsum(s.eigenvalues**p))


def count_above(s: SymSpectrum, thr: float) -> int:
    return int(np.count_nonzero(s.eigenvalues > thr))


def count_in(s: SymSpectrum, lo: float, hi: float) -> int:
    """Number of eigenvalues in the open interval (lo, hi)."""
    if not lo < hi:
        raise ValueError("need lo < hi")
    ev = s.eigenvalues
    return int(np.count_nonzero((ev > lo) & (ev < hi)))


def plunge_width(s: SymSpectrum, eps: float) -> int:
    """#{n : eps < lambda_n < 1 - eps}."""
    if not 0 < eps < 0.5:
        raise ValueError("eps must be in (0, 1/2)")
    return count_in(s, eps, 1.0 - eps)


def double_orthogonality_defect(m: ConcentrationMatrix | np.ndarray, s: SymSpectrum, gap_tol: float = 1e-8, top: int | None = None) -> float:
    """max |u_n^T A u_m| over n != m with |lambda_n - lambda_m| > gap_tol.

    ``top`` restricts the pairs to the leading eigenvectors. The eigenvectors are
    orthonormal in the ambient inner product; this measures orthogonality in the
    interval inner product represented by A.
    """
    if s.eigenvectors is None:
        raise ValueError("spectrum has no eigenvectors")
    a = m.entries if isinstance(m, ConcentrationMatrix) else np.asarray(m, dtype=float)
    k = s.dim if top is None else min(top, s.dim)
    V = s.eigenvectors[:, :k]
    lam = s.eigenvalues[:k]
    G = V.T @ a @ V
    mask = np.abs(lam[:, None] - lam[None, :]) > gap_tol
    np.fill_diagonal(mask, False)
    if not mask.any():
        return 0.0
    return float(np.abs(G[mask]).max())
