"""Exact truncated Fock-space engine.

The chain Hamiltonian

    H = omega sum_n a_n^dag a_n + sum_n J_n (a_n^dag a_{n+1} + h.c.)

conserves the total photon number, so the d^N dimensional truncated space
splits into independent sectors.  Sectors are enumerated lazily; every block
is a real symmetric matrix that is diagonalised once and reused for all
time points and all mixture components.

Occupation tuples are encoded as integers with mode k carrying the place
value d^k, so the last cavity is the most significant digit and the
environment (cavities 1..N-1) is ``code % d^(N-1)``.
"""

from __future__ import annotations

import heapq
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import gammainc

from ccaqst import _kernels
from ccaqst.constants import (
    DEFAULT_COHERENT_CUTOFF,
    DEFAULT_SECTOR_BUDGET,
    DEFAULT_TAIL_TOL,
    NORM_TOL,
    SPEC_NORM_TOL,
)
from ccaqst.errors import CapacityError, InvalidConfigurationError, NumericalError, TruncationError
from ccaqst.lattice import CavityArray

# ---------------------------------------------------------------------------
# basis


@lru_cache(maxsize=512)
def _compositions(n_modes: int, total: int, cap: int) -> np.ndarray:
    if n_modes == 1:
        if total <= cap:
            return np.array([[total]], dtype=np.int64)
        return np.empty((0, 1), dtype=np.int64)
    parts = []
    for first in range(min(total, cap) + 1):
        rest = _compositions(n_modes - 1, total - first, cap)
        if rest.shape[0]:
            head = np.full((rest.shape[0], 1), first, dtype=np.int64)
            parts.append(np.hstack([head, rest]))
    if not parts:
        return np.empty((0, n_modes), dtype=np.int64)
    return np.vstack(parts)


@dataclass(frozen=True)
class Sector:
    total: int
    occupations: np.ndarray  # (dim, n_modes), rows sorted by code
    codes: np.ndarray

    @property
    def dim(self) -> int:
        return self.codes.size


class FockBasis:
    """Per-mode cutoff ``d`` (levels 0..d-1) over ``n_modes`` cavities."""

    def __init__(self, n_modes: int, cutoff: int):
        if n_modes < 1 or cutoff < 1:
            raise InvalidConfigurationError(f"invalid basis: {n_modes} modes, cutoff {cutoff}")
        if n_modes * math.log2(cutoff) > 62:
            raise CapacityError(cutoff**n_modes, 2**62, what="full space")
        self.n_modes = int(n_modes)
        self.cutoff = int(cutoff)
        self.place = cutoff ** np.arange(n_modes, dtype=np.int64)
        self.env_size = int(cutoff ** (n_modes - 1))
        self._sectors: dict[int, Sector] = {}
        self._lock = threading.Lock()

    def __eq__(self, other):
        return isinstance(other, FockBasis) and (self.n_modes, self.cutoff) == (other.n_modes, other.cutoff)

    def __hash__(self):
        return hash((self.n_modes, self.cutoff))

    def __repr__(self):
        return f"FockBasis(n_modes={self.n_modes}, cutoff={self.cutoff})"

    @property
    def max_total(self) -> int:
        return self.n_modes * (self.cutoff - 1)

    @property
    def dimension(self) -> int:
        return self.cutoff**self.n_modes

    def sector_size(self, total: int) -> int:
        """Number of tuples with the given photon total (no enumeration)."""
        if total < 0 or total > self.max_total:
            return 0
        return int(_sector_counts(self.n_modes, self.cutoff)[total])

    def sector_sizes(self) -> list[int]:
        return [int(c) for c in _sector_counts(self.n_modes, self.cutoff)]

    def sector(self, total: int) -> Sector:
        with self._lock:
            sec = self._sectors.get(total)
            if sec is None:
                occ = _compositions(self.n_modes, total, self.cutoff - 1)
                codes = occ @ self.place
                order = np.argsort(codes, kind="stable")
                occ = np.ascontiguousarray(occ[order])
                codes = np.ascontiguousarray(codes[order])
                occ.setflags(write=False)
                codes.setflags(write=False)
                sec = Sector(total, occ, codes)
                self._sectors[total] = sec
            return sec

    def index_of(self, occupation) -> tuple[int, int]:
        """(sector total, row) of an occupation tuple."""
        occ = np.asarray(occupation, dtype=np.int64)
        if occ.shape != (self.n_modes,) or occ.min() < 0 or occ.max() >= self.cutoff:
            raise InvalidConfigurationError(f"occupation {tuple(occupation)} not in {self!r}")
        sec = self.sector(int(occ.sum()))
        return sec.total, int(np.searchsorted(sec.codes, int(occ @ self.place)))


@lru_cache(maxsize=256)
def _sector_counts(n_modes: int, cutoff: int) -> tuple[int, ...]:
    counts = [1]
    for _ in range(n_modes):
        new = [0] * (len(counts) + cutoff - 1)
        for s, c in enumerate(counts):
            for level in range(cutoff):
                new[s + level] += c
        counts = new
    return tuple(counts)


# ---------------------------------------------------------------------------
# states


@dataclass(frozen=True)
class StateSpec:
    """Single-mode initial state.

    kind "fock": normalised superposition ``coefficients`` over levels 0..;
    kind "coherent": coherent state of complex ``amplitude``;
    kind "thermal": number-diagonal Gibbs state of mean occupancy ``n_bar``.
    """

    kind: str
    coefficients: tuple[complex, ...] = ()
    amplitude: complex = 0j
    n_bar: float = 0.0

    def __post_init__(self):
        if self.kind == "fock":
            c = np.asarray(self.coefficients, dtype=complex)
            if c.size == 0:
                raise InvalidConfigurationError("Fock superposition needs at least one coefficient")
            if abs(np.linalg.norm(c) - 1) > SPEC_NORM_TOL:
                raise InvalidConfigurationError(f"Fock coefficients not normalised (norm {np.linalg.norm(c)})")
            object.__setattr__(self, "coefficients", tuple(complex(x) for x in c))
        elif self.kind == "coherent":
            object.__setattr__(self, "amplitude", complex(self.amplitude))
        elif self.kind == "thermal":
            if not (math.isfinite(self.n_bar) and self.n_bar >= 0):
                raise InvalidConfigurationError(f"thermal mean occupancy must be >= 0, got {self.n_bar}")
            object.__setattr__(self, "n_bar", float(self.n_bar))
        else:
            raise InvalidConfigurationError(f"unknown state kind {self.kind!r}")

    @classmethod
    def fock(cls, level: int) -> StateSpec:
        return cls("fock", (0,) * level + (1,))

    @classmethod
    def superposition(cls, coefficients, normalize: bool = True) -> StateSpec:
        c = np.asarray(coefficients, dtype=complex)
        if normalize:
            norm = np.linalg.norm(c)
            if norm == 0:
                raise InvalidConfigurationError("Fock superposition has zero norm")
            c = c / norm
        return cls("fock", tuple(c))

    @classmethod
    def coherent(cls, amplitude: complex) -> StateSpec:
        return cls("coherent", amplitude=amplitude)

    @classmethod
    def thermal(cls, n_bar: float) -> StateSpec:
        return cls("thermal", n_bar=n_bar)

    @property
    def is_pure(self) -> bool:
        return self.kind != "thermal"

    @property
    def max_level(self) -> int | None:
        """Highest populated level for Fock states, None for unbounded kinds."""
        if self.kind == "fock":
            nz = np.flatnonzero(np.abs(self.coefficients) > 0)
            return int(nz[-1]) if nz.size else 0
        if self.kind == "coherent" and self.amplitude == 0:
            return 0
        if self.kind == "thermal" and self.n_bar == 0:
            return 0
        return None

    def tail(self, cutoff: int) -> float:
        """Probability weight on levels >= cutoff."""
        if self.kind == "fock":
            return float(np.sum(np.abs(self.coefficients[cutoff:]) ** 2))
        if self.kind == "coherent":
            lam = abs(self.amplitude) ** 2
            return float(gammainc(cutoff, lam)) if lam > 0 else 0.0
        q = self.n_bar / (1 + self.n_bar)
        return q**cutoff

    def levels(self, cutoff: int, tail_tol: float = DEFAULT_TAIL_TOL) -> np.ndarray:
        """Renormalised amplitudes on levels 0..cutoff-1 of a pure state."""
        if not self.is_pure:
            raise InvalidConfigurationError("thermal states are mixtures; expand them first")
        tail = self.tail(cutoff)
        if tail > tail_tol:
            raise TruncationError(
                f"{self.kind} state leaves weight {tail:.3e} above cutoff {cutoff} "
                f"(tolerance {tail_tol:.1e}); increase the cutoff"
            )
        out = np.zeros(cutoff, dtype=complex)
        if self.kind == "fock":
            c = np.asarray(self.coefficients[:cutoff])
            out[: c.size] = c
        else:
            # keep only the levels the tolerance needs, so the sector budget
            # computed by default_cutoff is never exceeded
            n = np.arange(min(cutoff, self.minimal_cutoff(tail_tol)))
            beta = self.amplitude
            log_fact = np.array([math.lgamma(k + 1) for k in n])
            mag = np.exp(-abs(beta) ** 2 / 2 + n * np.log(abs(beta)) - log_fact / 2) if beta != 0 else (n == 0) * 1.0
            out[: n.size] = mag * np.exp(1j * np.angle(beta) * n)
        return out / np.linalg.norm(out)

    def mean_number(self) -> float:
        if self.kind == "fock":
            return float(np.sum(np.arange(len(self.coefficients)) * np.abs(self.coefficients) ** 2))
        if self.kind == "coherent":
            return abs(self.amplitude) ** 2
        return self.n_bar

    def minimal_cutoff(self, tail_tol: float) -> int:
        if self.max_level is not None:
            return self.max_level + 1
        d = 1
        while self.tail(d) > tail_tol:
            d += 1
        return d


def expand_thermal(n_bar: float, d: int, tail_tol: float = DEFAULT_TAIL_TOL, strict: bool = True):
    """Geometric weights (1/(1+n)) (n/(1+n))^k, cut once the remaining tail
    drops below ``tail_tol`` and renormalised.

    Returns a list of (weight, level).  If the tail is still above
    ``tail_tol`` at level d - 1, raises TruncationError unless ``strict`` is
    False, in which case all d levels are kept.
    """
    if not (math.isfinite(n_bar) and n_bar >= 0):
        raise InvalidConfigurationError(f"mean occupancy must be >= 0, got {n_bar}")
    if n_bar == 0:
        return [(1.0, 0)]
    q = n_bar / (1 + n_bar)
    weights = []
    level = 0
    while True:
        weights.append((1 - q) * q**level)
        if q ** (level + 1) < tail_tol:
            break
        level += 1
        if level >= d:
            if strict:
                raise TruncationError(
                    f"thermal state (n_bar={n_bar:g}) needs more than {d} levels for tail {tail_tol:.1e}"
                )
            break
    total = sum(weights)
    return [(w / total, k) for k, w in enumerate(weights)]


def bose_occupancy(beta: float, omega: float) -> float:
    """Mean occupancy 1/(exp(beta omega) - 1) of a mode at inverse temperature beta."""
    x = beta * omega
    if x <= 0:
        raise InvalidConfigurationError(f"beta * omega must be > 0 for a thermal mode, got {x}")
    return 1.0 / math.expm1(x)


@dataclass(frozen=True)
class MixtureComponent:
    weight: float
    specs: tuple[StateSpec, ...]


def expand_mixture(specs, cutoff: int | None = None, tail_tol: float = DEFAULT_TAIL_TOL,
                   max_components: int = 200_000) -> list[MixtureComponent]:
    """Expand per-mode specs (thermal ones become Fock mixtures) into pure
    product components, heaviest first, until the kept weight reaches
    1 - tail_tol.  Kept weights are renormalised.
    """
    options = []
    for spec in specs:
        if spec.is_pure:
            options.append([(1.0, spec)])
        else:
            levels = expand_thermal(spec.n_bar, cutoff if cutoff is not None else 10**6, tail_tol)
            options.append(sorted(((w, StateSpec.fock(k)) for w, k in levels), key=lambda x: -x[0]))

    def weight(idx):
        return math.prod(options[m][i][0] for m, i in enumerate(idx))

    start = (0,) * len(options)
    heap = [(-weight(start), start, 0)]
    kept = []
    total = 0.0
    while heap and (not kept or total < 1 - tail_tol):
        negw, idx, lowest = heapq.heappop(heap)
        kept.append(MixtureComponent(-negw, tuple(options[m][i][1] for m, i in enumerate(idx))))
        total += -negw
        if len(kept) > max_components:
            raise CapacityError(len(kept), max_components, what="mixture component count")
        # only advance modes >= lowest so every index tuple is generated once
        for m in range(lowest, len(options)):
            if idx[m] + 1 < len(options[m]):
                nxt = idx[:m] + (idx[m] + 1,) + idx[m + 1:]
                heapq.heappush(heap, (-weight(nxt), nxt, m))
    return [MixtureComponent(c.weight / total, c.specs) for c in kept]


class StateVector:
    """Sector-organised coefficients; ``blocks[s]`` holds sector s."""

    def __init__(self, basis: FockBasis, blocks: dict[int, np.ndarray]):
        self.basis = basis
        self.blocks = {s: np.asarray(v, dtype=complex) for s, v in blocks.items()}

    def norm(self) -> float:
        return math.sqrt(sum(float(np.vdot(v, v).real) for v in self.blocks.values()))

    def amplitude(self, occupation) -> complex:
        s, row = self.basis.index_of(occupation)
        block = self.blocks.get(s)
        return complex(block[row]) if block is not None else 0j

    def dense(self) -> np.ndarray:
        """Coefficients over the full d^N space indexed by occupation code."""
        out = np.zeros(self.basis.dimension, dtype=complex)
        for s, v in self.blocks.items():
            out[self.basis.sector(s).codes] = v
        return out

    def mean_number(self, mode: int) -> float:
        """<a_m^dag a_m> for a 0-based mode index."""
        acc = 0.0
        for s, v in self.blocks.items():
            acc += float(np.sum(np.abs(v) ** 2 * self.basis.sector(s).occupations[:, mode]))
        return acc


def prepare_product_state(basis: FockBasis, specs, tail_tol: float = DEFAULT_TAIL_TOL) -> StateVector:
    if len(specs) != basis.n_modes:
        raise InvalidConfigurationError(f"need {basis.n_modes} mode specs, got {len(specs)}")
    d = basis.cutoff
    mode_coeffs = np.vstack([spec.levels(d, tail_tol) for spec in specs])
    top = [int(np.flatnonzero(np.abs(row) > 0)[-1]) for row in mode_coeffs]
    low = [int(np.flatnonzero(np.abs(row) > 0)[0]) for row in mode_coeffs]
    blocks = {}
    for s in range(sum(low), sum(top) + 1):
        sec = basis.sector(s)
        if sec.dim == 0:
            continue
        amp = _kernels.product_amplitudes(sec.occupations, mode_coeffs)
        if np.any(amp != 0):
            blocks[s] = amp
    return StateVector(basis, blocks)


# ---------------------------------------------------------------------------
# Hamiltonian and evolution


class SectorHamiltonian:
    """Block-diagonal H over photon-number sectors, built on demand.

    Hops that would push a mode to level d are dropped, so each truncated
    block stays real symmetric.
    """

    def __init__(self, array: CavityArray, basis: FockBasis, budget: int = DEFAULT_SECTOR_BUDGET):
        if basis.n_modes != array.n_cavities:
            raise InvalidConfigurationError(
                f"basis has {basis.n_modes} modes but array has {array.n_cavities} cavities")
        self.array = array
        self.basis = basis
        self.budget = int(budget)
        self._blocks: dict[int, np.ndarray] = {}
        self._eig: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._lock = threading.Lock()

    def block(self, total: int) -> np.ndarray:
        with self._lock:
            h = self._blocks.get(total)
            if h is None:
                h = self._build(total)
                self._blocks[total] = h
            return h

    def _build(self, total: int) -> np.ndarray:
        dim = self.basis.sector_size(total)
        if dim > self.budget:
            raise CapacityError(dim, self.budget)
        sec = self.basis.sector(total)
        h = np.zeros((sec.dim, sec.dim))
        h[np.diag_indices(sec.dim)] = self.array.omega * total
        rows, cols, vals = _kernels.hopping_entries(
            sec.occupations, sec.codes, self.basis.place, self.array.coupling_array(), self.basis.cutoff)
        h[rows, cols] = vals
        h[cols, rows] = vals
        h.setflags(write=False)
        return h

    def eig(self, total: int):
        h = self.block(total)
        with self._lock:
            pair = self._eig.get(total)
        if pair is None:
            try:
                evals, evecs = np.linalg.eigh(h)
            except np.linalg.LinAlgError as exc:
                raise NumericalError(f"sector {total} diagonalisation failed: {exc}") from exc
            evals.setflags(write=False)
            evecs.setflags(write=False)
            pair = (evals, evecs)
            with self._lock:
                self._eig.setdefault(total, pair)
        return pair


def build_hamiltonian(array: CavityArray, basis: FockBasis, sectors=None,
                      budget: int = DEFAULT_SECTOR_BUDGET) -> SectorHamiltonian:
    """Sector Hamiltonian; blocks listed in ``sectors`` are built eagerly."""
    h = SectorHamiltonian(array, basis, budget)
    for s in sectors or ():
        h.block(s)
    return h


def evolve(h: SectorHamiltonian, psi0: StateVector, t: float) -> StateVector:
    """exp(-i H t) applied sector by sector."""
    if psi0.basis != h.basis:
        raise InvalidConfigurationError(f"state basis {psi0.basis!r} does not match {h.basis!r}")
    out = {}
    for s, v in psi0.blocks.items():
        evals, evecs = h.eig(s)
        modal = _real_matmul(evecs.T, v[:, None])
        out[s] = _real_matmul(evecs, np.exp(-1j * evals * t)[:, None] * modal)[:, 0]
    return StateVector(h.basis, out)


def _real_matmul(real: np.ndarray, z: np.ndarray) -> np.ndarray:
    """real @ z for complex z without promoting ``real`` to complex."""
    z = np.ascontiguousarray(z, dtype=complex)
    return np.ascontiguousarray(real @ z.view(np.float64)).view(complex)


class BatchEvolver:
    """Evolve many initial states (columns) to many times with shared
    factorisations.  Read-only after construction."""

    def __init__(self, h: SectorHamiltonian, states: list[StateVector]):
        self.h = h
        self.n_states = len(states)
        sectors = sorted({s for psi in states for s in psi.blocks})
        self.sectors = sectors
        self._modal = {}
        for s in sectors:
            dim = h.basis.sector_size(s)
            cols = np.zeros((dim, self.n_states), dtype=complex)
            for c, psi in enumerate(states):
                if psi.basis != h.basis:
                    raise InvalidConfigurationError("state basis does not match Hamiltonian basis")
                if s in psi.blocks:
                    cols[:, c] = psi.blocks[s]
            evals, evecs = h.eig(s)
            self._modal[s] = (evals, evecs, _real_matmul(evecs.T, cols))

    def at(self, t: float) -> dict[int, np.ndarray]:
        out = {}
        for s, (evals, evecs, modal) in self._modal.items():
            out[s] = _real_matmul(evecs, np.exp(-1j * evals * t)[:, None] * modal)
        return out


# ---------------------------------------------------------------------------
# fidelity


class LastModeProjector:
    """Computes sum_b |(<b| x <phi|) psi>|^2 over environment tuples b.

    Environment tuples are shared across sectors, so coherences between
    different photon numbers in the last cavity are kept.
    """

    def __init__(self, basis: FockBasis, sectors, target):
        self.basis = basis
        target = np.asarray(target, dtype=complex)
        d = basis.cutoff
        if target.size > d:
            if np.any(target[d:] != 0):
                raise TruncationError(f"target state has weight above cutoff {d}")
            target = target[:d]
        self.target = np.zeros(d, dtype=complex)
        self.target[: target.size] = target
        env_codes = {}
        levels = {}
        for s in sectors:
            sec = basis.sector(s)
            env_codes[s] = sec.codes % basis.env_size
            levels[s] = sec.occupations[:, -1]
        all_env = np.unique(np.concatenate([env_codes[s] for s in sectors])) if sectors else np.empty(0, np.int64)
        self.n_env = all_env.size
        self._maps = {
            s: (np.searchsorted(all_env, env_codes[s]).astype(np.int64), np.conj(self.target[levels[s]]))
            for s in sectors
        }

    def fidelities(self, blocks: dict[int, np.ndarray]) -> np.ndarray:
        n_cols = next(iter(blocks.values())).shape[1] if blocks else 0
        acc = np.zeros((self.n_env, n_cols), dtype=complex)
        for s, block in blocks.items():
            env_index, weight = self._maps[s]
            _kernels.env_project(np.ascontiguousarray(block), env_index, weight, self.n_env, acc)
        return np.sum(acc.real**2 + acc.imag**2, axis=0)


def site_fidelity(psi: StateVector, target_coeffs) -> float:
    """Overlap <phi| rho_N |phi> of the last cavity's reduced state with
    the normalised target ``target_coeffs`` (levels 0..)."""
    proj = LastModeProjector(psi.basis, sorted(psi.blocks), target_coeffs)
    return float(proj.fidelities({s: v[:, None] for s, v in psi.blocks.items()})[0])


def coherent_fidelity_closed(beta_amp: complex, alpha_end_value: complex) -> float:
    """exp(-|beta|^2 |1 - alpha_N|^2): overlap of |beta> with |alpha_N beta>."""
    return math.exp(-abs(beta_amp) ** 2 * abs(1 - alpha_end_value) ** 2)


# ---------------------------------------------------------------------------
# transfer experiments


def default_cutoff(sent: StateSpec, rest, tail_tol: float = DEFAULT_TAIL_TOL) -> int:
    """Cutoff large enough that the sector truncation is exact for the
    expanded components; coherent sends use at least 8 levels."""
    rest_max = 0
    for spec in rest:
        if spec.kind == "thermal":
            rest_max += len(expand_thermal(spec.n_bar, 10**6, tail_tol)) - 1
        else:
            rest_max += spec.minimal_cutoff(tail_tol) - 1
    sent_levels = sent.minimal_cutoff(tail_tol)
    if sent.kind == "coherent":
        sent_levels = max(sent_levels, DEFAULT_COHERENT_CUTOFF)
    return max(sent_levels + rest_max, 2)


@dataclass
class TransferSetup:
    """Everything needed to evaluate a fidelity curve for one array."""

    array: CavityArray
    sent: StateSpec
    rest: tuple[StateSpec, ...]
    cutoff: int
    tail_tol: float = DEFAULT_TAIL_TOL
    budget: int = DEFAULT_SECTOR_BUDGET
    components: list[MixtureComponent] = field(init=False)

    def __post_init__(self):
        n = self.array.n_cavities
        if len(self.rest) != n - 1:
            raise InvalidConfigurationError(f"need {n - 1} rest-state specs, got {len(self.rest)}")
        if not self.sent.is_pure:
            raise InvalidConfigurationError("the sent state must be pure")
        self.basis = FockBasis(n, self.cutoff)
        self.target = self.sent.levels(self.cutoff, self.tail_tol)
        self.components = expand_mixture((self.sent,) + tuple(self.rest), self.cutoff, self.tail_tol)
        self.weights = np.array([c.weight for c in self.components])
        self.states = [prepare_product_state(self.basis, c.specs, self.tail_tol) for c in self.components]
        self.hamiltonian = SectorHamiltonian(self.array, self.basis, self.budget)
        self.evolver = BatchEvolver(self.hamiltonian, self.states)
        self.projector = LastModeProjector(self.basis, self.evolver.sectors, self.target)

    def component_fidelities(self, t: float) -> np.ndarray:
        return self.projector.fidelities(self.evolver.at(t))

    def fidelity(self, t: float) -> float:
        return float(self.weights @ self.component_fidelities(t))

    def curve(self, times, threads: int = 1) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        if threads <= 1 or times.size < 2:
            return np.array([self.fidelity(t) for t in times])
        chunks = np.array_split(np.arange(times.size), threads)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = pool.map(lambda idx: [self.fidelity(times[i]) for i in idx], chunks)
            return np.concatenate([np.asarray(p, dtype=float) for p in parts])

    def mean_number_last(self, t: float) -> float:
        blocks = self.evolver.at(t)
        acc = np.zeros(len(self.components))
        for s, block in blocks.items():
            occ = self.basis.sector(s).occupations[:, -1]
            acc += occ @ (np.abs(block) ** 2)
        return float(self.weights @ acc)

    def norms(self, t: float) -> np.ndarray:
        blocks = self.evolver.at(t)
        return np.sqrt(sum(np.sum(np.abs(b) ** 2, axis=0) for b in blocks.values()))


def fidelity_curve(scenario, threads: int = 1):
    """List of (t, F) over the scenario's time grid."""
    setup = scenario.setup()
    times = scenario.times()
    return list(zip(times.tolist(), setup.curve(times, threads).tolist()))


def heisenberg_check(scenario, t: float) -> tuple[float, float]:
    """(<n_N>(t), <n_1>(0)) for the scenario's initial state."""
    setup = scenario.setup()
    lhs = setup.mean_number_last(t)
    rhs = float(setup.weights @ np.array([psi.mean_number(0) for psi in setup.states]))
    return lhs, rhs


# ---------------------------------------------------------------------------
# full-space oracle (toy sizes only)


def dense_hamiltonian(array: CavityArray, cutoff: int) -> np.ndarray:
    """H on the whole d^N space from Kronecker products of ladder operators,
    indexed by occupation code (mode k has place value d^k)."""
    n, d = array.n_cavities, cutoff
    if d**n > 4096:
        raise CapacityError(d**n, 4096, what="dense full space")
    lower = np.diag(np.sqrt(np.arange(1, d, dtype=float)), 1)
    eye = np.eye(d)

    def on_mode(op, k):
        # kron order puts the last factor on the least significant digit
        out = np.array([[1.0]])
        for m in reversed(range(n)):
            out = np.kron(out, op if m == k else eye)
        return out

    ops = [on_mode(lower, k) for k in range(n)]
    h = sum(array.omega * a.T @ a for a in ops)
    for b, j in enumerate(array.couplings):
        h = h + j * (ops[b].T @ ops[b + 1] + ops[b] @ ops[b + 1].T)
    return h


def dense_evolve(array: CavityArray, cutoff: int, psi: np.ndarray, t: float) -> np.ndarray:
    evals, evecs = np.linalg.eigh(dense_hamiltonian(array, cutoff))
    return evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi))


def check_norm(psi: StateVector, tol: float = NORM_TOL) -> None:
    if abs(psi.norm() - 1) > tol:
        raise NumericalError(f"state norm drifted to {psi.norm():.15f}")
