"""Pretty-good transfer: length condition, residual phase, transfer-time
search and phase-matching cavity frequencies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from ccaqst.constants import TIE_TOL, TIME_RESOLUTION
from ccaqst.errors import InvalidConfigurationError
from ccaqst.lattice import CavityArray
from ccaqst.propagator import alpha_end, eigensystem


def is_prime(p: int) -> bool:
    """Deterministic trial division."""
    if p < 2 or int(p) != p:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    for d in range(3, math.isqrt(p) + 1, 2):
        if p % d == 0:
            return False
    return True


@dataclass(frozen=True)
class LengthClass:
    n: int
    witnesses: tuple[tuple[str, int], ...] = ()

    @property
    def is_pgst(self) -> bool:
        return bool(self.witnesses)

    def as_dict(self):
        return {
            "n": self.n,
            "is_pgst": self.is_pgst,
            "witnesses": [{"form": form, "value": value} for form, value in self.witnesses],
        }


def classify_length(n: int) -> LengthClass:
    """Check N = p - 1, N = 2p - 1 (p prime) and N = 2^m - 1."""
    if int(n) != n or n < 2:
        raise InvalidConfigurationError(f"chain length must be >= 2, got {n}")
    n = int(n)
    witnesses = []
    if is_prime(n + 1):
        witnesses.append(("p-1", n + 1))
    if (n + 1) % 2 == 0 and is_prime((n + 1) // 2):
        witnesses.append(("2p-1", (n + 1) // 2))
    if (n + 1) & n == 0:
        witnesses.append(("2^m-1", (n + 1).bit_length() - 1))
    return LengthClass(n, tuple(witnesses))


@dataclass(frozen=True)
class TransferWindow:
    tau: float
    magnitude: float
    phase: float

    @property
    def value(self) -> complex:
        return self.magnitude * complex(math.cos(self.phase), math.sin(self.phase))


_UNITS = {1: 1 + 0j, -1: -1 + 0j, 1j: 1j, -1j: -1j}


@dataclass(frozen=True)
class GammaPhase:
    n: int
    gamma: complex | None
    candidates: tuple[complex, ...] = field(default=())

    @property
    def resolved(self) -> bool:
        return self.gamma is not None

    def as_json(self):
        if self.gamma is None:
            return {"resolved": False, "candidates": [_unit_label(c) for c in self.candidates]}
        return {"resolved": True, "gamma": _unit_label(self.gamma)}


def _unit_label(z: complex) -> str:
    return {1: "+1", -1: "-1", 1j: "+i", -1j: "-i"}[z]


def gamma_for(n: int, window: TransferWindow | None = None) -> GammaPhase:
    """Residual phase of the arrival amplitude at the transfer time.

    Odd N follows the mod-4 rule.  For even N the sign of +-i is read off the
    numerically located window (its phase at omega = 0); without a window the
    result is left unresolved.
    """
    if n % 4 == 1:
        return GammaPhase(n, 1 + 0j)
    if n % 4 == 3:
        return GammaPhase(n, -1 + 0j)
    if window is None:
        return GammaPhase(n, None, (1j, -1j))
    return GammaPhase(n, 1j if math.sin(window.phase) >= 0 else -1j)


def _refine(f, lo, hi):
    res = minimize_scalar(lambda t: -f(t), bounds=(lo, hi), method="bounded",
                          options={"xatol": TIME_RESOLUTION / 10})
    return float(res.x), float(-res.fun)


def _slope(array: CavityArray):
    """d|alpha_N|^2/dt from the eigen-sum (omega drops out of the modulus)."""
    evals, evecs = eigensystem(array)
    w = evecs[-1, :] * evecs[0, :]

    def f(t):
        ph = np.exp(1j * evals * t)
        a = np.dot(w, ph)
        da = np.dot(1j * evals * w, ph)
        return 2.0 * float((a.conjugate() * da).real)

    return f


def _polish(slope, t, width):
    # the modulus is flat at its maximum, so locate the zero of its slope instead
    lo, hi = t - width, t + width
    if lo <= 0:
        return t
    flo, fhi = slope(lo), slope(hi)
    if not (flo > 0 > fhi):
        return t
    return float(brentq(slope, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps))


def find_transfer_time(array: CavityArray, t_max: float | None = None, grid: int = 4000,
                       candidates: int = 8) -> TransferWindow:
    """Maximise |alpha_N(t)| over (0, t_max].

    A uniform coarse scan is followed by bounded Brent refinement around the
    ``candidates`` best local maxima of the scan; the earliest of the
    refined maxima within TIE_TOL of the best wins.  Phase is reported at
    the array's own omega.
    """
    if t_max is None:
        t_max = 5.0 * array.n_cavities
    if not t_max > 0:
        raise InvalidConfigurationError(f"t_max must be > 0, got {t_max}")
    if grid < 100:
        raise InvalidConfigurationError(f"grid must have at least 100 points, got {grid}")
    ts = np.linspace(0.0, t_max, grid + 1)[1:]
    mags = np.abs(alpha_end(array, ts))
    dt = ts[1] - ts[0]

    padded = np.concatenate([[-np.inf], mags, [-np.inf]])
    peaks = np.flatnonzero((padded[1:-1] >= padded[:-2]) & (padded[1:-1] >= padded[2:]))
    order = peaks[np.argsort(-mags[peaks], kind="stable")][:candidates]

    def mag(t):
        return abs(alpha_end(array, t))

    slope = _slope(array)
    refined = []
    for i in order:
        lo = max(ts[i] - dt, 1e-12)
        hi = min(ts[i] + dt, t_max)
        t, m = _refine(mag, lo, hi)
        t = _polish(slope, t, 10 * TIME_RESOLUTION)
        m = mag(t)
        if m < mags[i]:
            t, m = float(ts[i]), float(mags[i])
        refined.append((t, m))
    best = max(m for _, m in refined)
    tau = min(t for t, m in refined if m >= best - TIE_TOL)
    value = alpha_end(array, tau)
    return TransferWindow(tau, abs(value), math.atan2(value.imag, value.real))


def search_pgst_window(array: CavityArray, target: float = 0.99, t_max: float | None = None,
                       widen: int = 6, points_per_unit: float = 40.0) -> tuple[TransferWindow, bool]:
    """Scan ever wider windows (doubling) until |alpha_N| >= target.

    Returns the best window found and whether the target was reached.  A
    miss only means the window budget ran out.
    """
    if t_max is None:
        t_max = 5.0 * array.n_cavities
    best = None
    for _ in range(widen + 1):
        window = find_transfer_time(array, t_max, grid=max(100, int(points_per_unit * t_max)))
        if best is None or window.magnitude > best.magnitude + TIE_TOL:
            best = window
        if best.magnitude >= target:
            return best, True
        t_max *= 2
    return best, False


def phase_matching_omega(tau: float, phase_at_tau: float, k: int) -> float:
    """omega with exp(i omega tau) exp(i phase) = 1: (2 k pi - phase) / tau."""
    if not tau > 0:
        raise InvalidConfigurationError(f"tau must be > 0, got {tau}")
    return (2 * k * math.pi - phase_at_tau) / tau


def recommended_omegas(tau: float, phase_at_tau: float, count: int = 4) -> list[float]:
    """The first ``count`` nonnegative phase-matching frequencies."""
    k0 = math.ceil(phase_at_tau / (2 * math.pi) - 1e-12)
    out = []
    k = k0
    while len(out) < count:
        w = phase_matching_omega(tau, phase_at_tau, k)
        if w >= -1e-12:
            out.append(max(w, 0.0))
        k += 1
    return out
