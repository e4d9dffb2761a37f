"""Single-particle transfer amplitudes on the N x N hopping matrix.

The creation operator of the last cavity evolves in the Heisenberg picture
as ``a_N^dag(t) = sum_n alpha_n(t) a_{N+1-n}^dag`` with the amplitude vector
obeying ``dA/dt = i (G + omega) A``, ``A(0) = e_1``.  ``G`` is the real
symmetric tridiagonal hopping matrix written in reversed bond order, so its
(1, 2) entry is J_{N-1}.

``amplitudes``/``alpha_end`` are the production path (eigendecomposition of
G).  ``uniform_alpha_series``, ``modulated_alpha_closed`` and
``laplace_alpha`` are closed forms used to cross-check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import LinAlgError, eigh_tridiagonal, eigvalsh_tridiagonal

from ccaqst.constants import DEGENERACY_TOL, LAPLACE_REFERENCE_TIME
from ccaqst.errors import DegenerateSpectrumError, NumericalError
from ccaqst.lattice import CavityArray


@dataclass(frozen=True)
class HoppingMatrix:
    dimension: int
    off_diagonal: tuple[float, ...]

    def dense(self) -> np.ndarray:
        g = np.diag(np.asarray(self.off_diagonal), 1)
        return g + g.T


@dataclass(frozen=True)
class TransferAmplitudes:
    time: float
    values: np.ndarray

    @property
    def end(self) -> complex:
        return complex(self.values[-1])

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.values) ** 2))


def hopping_matrix(array: CavityArray) -> HoppingMatrix:
    return HoppingMatrix(array.n_cavities, tuple(array.couplings[::-1]))


@lru_cache(maxsize=256)
def _eigensystem(off_diagonal: tuple[float, ...]):
    e = np.asarray(off_diagonal, dtype=float)
    try:
        evals, evecs = eigh_tridiagonal(np.zeros(e.size + 1), e)
    except (LinAlgError, ValueError) as exc:
        raise NumericalError(f"tridiagonal eigendecomposition failed: {exc}") from exc
    if not (np.all(np.isfinite(evals)) and np.all(np.isfinite(evecs))):
        raise NumericalError("tridiagonal eigendecomposition returned non-finite values")
    evals.setflags(write=False)
    evecs.setflags(write=False)
    return evals, evecs


def eigensystem(array: CavityArray):
    """Eigenvalues and eigenvectors (columns) of G, cached per coupling profile."""
    return _eigensystem(hopping_matrix(array).off_diagonal)


def _evolve_columns(array: CavityArray, t, rows):
    evals, evecs = eigensystem(array)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise NumericalError("evolution time must be finite")
    # A(t) = exp(i omega t) V diag(exp(i lambda t)) V^T e_1
    phases = np.exp(1j * np.multiply.outer(t, evals))
    weights = evecs[rows, :] * evecs[0, :]
    out = phases @ weights.T
    return out * np.exp(1j * array.omega * t)[..., None]


def amplitudes(array: CavityArray, t: float) -> TransferAmplitudes:
    """Full amplitude vector (alpha_1, ..., alpha_N) at time ``t``."""
    values = _evolve_columns(array, float(t), slice(None))
    return TransferAmplitudes(float(t), values)


def alpha_end(array: CavityArray, t):
    """Arrival amplitude alpha_N(t); ``t`` may be a scalar or an array."""
    out = _evolve_columns(array, t, [array.n_cavities - 1])[..., 0]
    return complex(out) if np.ndim(out) == 0 else out


def uniform_alpha_series(n: int, j: float, omega: float, t):
    """Eigen-sum for a uniform chain.

    sum_n (-1)^(n-1) 2/(N+1) exp(-i E_n t) sin^2(pi n/(N+1)),
    E_n = -2 j cos(pi n/(N+1)) - omega.
    """
    k = np.arange(1, n + 1)
    theta = np.pi * k / (n + 1)
    energies = -2.0 * j * np.cos(theta) - omega
    coeff = (-1.0) ** (k - 1) * (2.0 / (n + 1)) * np.sin(theta) ** 2
    out = np.exp(-1j * np.multiply.outer(np.asarray(t, dtype=float), energies)) @ coeff
    return complex(out) if np.ndim(out) == 0 else out


def modulated_alpha_closed(n: int, omega: float, t):
    """(i sin t)^(N-1) exp(i omega t) for the k = 0 modulated profile."""
    t = np.asarray(t, dtype=float)
    out = (1j * np.sin(t)) ** (n - 1) * np.exp(1j * omega * t)
    return complex(out) if np.ndim(out) == 0 else out


def laplace_roots(array: CavityArray) -> np.ndarray:
    """Nonnegative pole locations of the Laplace-transformed amplitude.

    Even N: the m positive eigenvalues q_i of G.  Odd N: s_0 = 0 followed by
    the m positive eigenvalues.  Raises DegenerateSpectrumError when two
    squared roots are closer than the degeneracy tolerance.
    """
    n = array.n_cavities
    evals = np.sort(eigvalsh_tridiagonal(np.zeros(n), np.asarray(hopping_matrix(array).off_diagonal)))
    scale = max(1.0, float(np.max(np.abs(evals))))
    if np.max(np.abs(evals + evals[::-1])) > 1e-8 * scale:
        raise NumericalError("spectrum of G is not symmetric about zero")
    m = n // 2
    positive = evals[n - m:]
    roots = np.concatenate([[0.0], positive]) if n % 2 else positive
    sq = roots**2
    gaps = np.abs(sq[:, None] - sq[None, :])
    np.fill_diagonal(gaps, np.inf)
    if gaps.size and gaps.min() < DEGENERACY_TOL:
        raise DegenerateSpectrumError(f"near-degenerate squared roots (gap {gaps.min():.3e})")
    return roots


def _residue_sum(roots: np.ndarray, n: int, t):
    t = np.asarray(t, dtype=float)
    sq = roots**2
    diff = sq[None, :] - sq[:, None]  # diff[i, j] = s_j^2 - s_i^2
    np.fill_diagonal(diff, 1.0)
    denom = np.prod(diff, axis=1)
    if n % 2 == 0:
        terms = np.sin(np.multiply.outer(t, roots)) / (roots * denom)
    else:
        terms = np.cos(np.multiply.outer(t, roots)) / denom
    return terms.sum(axis=-1)


def laplace_prefactor(array: CavityArray) -> complex:
    """Analytic prefactor i^(N-1) * prod(J_n) of the residue sum."""
    return (1j) ** (array.n_cavities - 1) * math.prod(array.couplings)


def laplace_alpha(array: CavityArray, t, prefactor: str = "analytic"):
    """alpha_N(t) from the residue (inverse Laplace) form.

    ``prefactor="matched"`` fixes the constant by matching the eigen path at
    t = 0.1 instead of using the analytic value.
    """
    n = array.n_cavities
    roots = laplace_roots(array)
    if prefactor == "analytic":
        c = laplace_prefactor(array)
    elif prefactor == "matched":
        t_ref = LAPLACE_REFERENCE_TIME
        c = alpha_end(array.with_omega(0.0), t_ref) / _residue_sum(roots, n, t_ref)
    else:
        raise ValueError(f"unknown prefactor mode {prefactor!r}")
    out = c * _residue_sum(roots, n, t) * np.exp(1j * array.omega * np.asarray(t, dtype=float))
    return complex(out) if np.ndim(out) == 0 else out
