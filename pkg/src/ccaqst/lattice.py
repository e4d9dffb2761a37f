"""Cavity-array configurations and the coupling profiles used for transfer.

Units are hbar = 1; times are measured in inverse units of the reference
coupling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ccaqst.errors import InvalidConfigurationError


@dataclass(frozen=True)
class CavityArray:
    """A chain of ``n_cavities`` identical cavities.

    ``couplings[n - 1]`` is the hopping strength J_n on the bond between
    cavities n and n + 1 (1-based, cavity 1 is the sender).
    """

    n_cavities: int
    couplings: tuple[float, ...]
    omega: float = 0.0

    def __post_init__(self):
        if int(self.n_cavities) != self.n_cavities or self.n_cavities < 2:
            raise InvalidConfigurationError(f"need at least 2 cavities, got {self.n_cavities}")
        object.__setattr__(self, "n_cavities", int(self.n_cavities))
        couplings = tuple(float(j) for j in self.couplings)
        if len(couplings) != self.n_cavities - 1:
            raise InvalidConfigurationError(
                f"{self.n_cavities} cavities need {self.n_cavities - 1} couplings, got {len(couplings)}"
            )
        for n, j in enumerate(couplings, start=1):
            if not (math.isfinite(j) and j > 0):
                raise InvalidConfigurationError(f"coupling J_{n} must be finite and > 0, got {j}")
        object.__setattr__(self, "couplings", couplings)
        omega = float(self.omega)
        if not math.isfinite(omega) or omega < 0:
            raise InvalidConfigurationError(f"omega must be finite and >= 0, got {self.omega}")
        object.__setattr__(self, "omega", omega)

    @property
    def n(self) -> int:
        return self.n_cavities

    def coupling_array(self) -> np.ndarray:
        return np.asarray(self.couplings, dtype=float)

    def with_omega(self, omega: float) -> CavityArray:
        return CavityArray(self.n_cavities, self.couplings, omega)

    def reversed(self) -> CavityArray:
        """Mirror image of the chain (cavity n <-> cavity N + 1 - n)."""
        return CavityArray(self.n_cavities, self.couplings[::-1], self.omega)

    def is_mirror_symmetric(self, tol: float = 0.0) -> bool:
        j = self.coupling_array()
        return bool(np.all(np.abs(j - j[::-1]) <= tol))


def _check_n(n):
    if int(n) != n or n < 2:
        raise InvalidConfigurationError(f"need n >= 2 cavities, got {n}")
    return int(n)


def build_uniform(n: int, j: float = 1.0, omega: float = 0.0) -> CavityArray:
    n = _check_n(n)
    if not j > 0:
        raise InvalidConfigurationError(f"uniform coupling must be > 0, got {j}")
    return CavityArray(n, (float(j),) * (n - 1), omega)


def modulated_couplings(n: int, k: int = 0) -> np.ndarray:
    """J_n = sqrt(n(N-n)) on even bonds, sqrt((n+2k)(N-n+2k)) on odd bonds."""
    n = _check_n(n)
    if int(k) != k or k < 0:
        raise InvalidConfigurationError(f"modulation index k must be a nonnegative integer, got {k}")
    bond = np.arange(1, n, dtype=float)
    even = np.sqrt(bond * (n - bond))
    odd = np.sqrt((bond + 2 * k) * (n - bond + 2 * k))
    return np.where(bond % 2 == 0, even, odd)


def build_modulated(n: int, k: int = 0, omega: float = 0.0) -> CavityArray:
    return CavityArray(_check_n(n), tuple(modulated_couplings(n, k)), omega)


def build_ballistic(n: int, j_end: float, j_bulk: float = 1.0, omega: float = 0.0) -> CavityArray:
    """Uniform bulk with both end bonds weakened to ``j_end`` in (0, 1).

    For n = 3 both bonds are end bonds and get ``j_end``.
    """
    n = _check_n(n)
    if not 0 < j_end < 1:
        raise InvalidConfigurationError(f"ballistic end coupling must lie in (0, 1), got {j_end}")
    if not j_bulk > 0:
        raise InvalidConfigurationError(f"bulk coupling must be > 0, got {j_bulk}")
    couplings = [float(j_bulk)] * (n - 1)
    couplings[0] = couplings[-1] = float(j_end)
    return CavityArray(n, tuple(couplings), omega)


def build_custom(values, omega: float = 0.0) -> CavityArray:
    values = tuple(values)
    return CavityArray(len(values) + 1, values, omega)
