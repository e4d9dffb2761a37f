"""Cross-checks between the independent computation paths.

Each check returns a ``CheckResult`` with the worst deviation it measured
and the tolerance it is held to.  ``run_checks`` is what ``ccaqst verify``
executes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ccaqst import lattice, propagator
from ccaqst.constants import ANALYTIC_TOL, DEFAULT_TAIL_TOL, LAPLACE_TOL, NORM_TOL, UNITARITY_TOL
from ccaqst.fock import (
    FockBasis,
    StateSpec,
    StateVector,
    TransferSetup,
    build_hamiltonian,
    coherent_fidelity_closed,
    default_cutoff,
    dense_evolve,
    evolve,
    prepare_product_state,
)

MUTATIONS = ("reversed-couplings",)


@dataclass
class CheckResult:
    name: str
    deviation: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.deviation <= self.tolerance)

    def as_dict(self):
        return {**asdict(self), "passed": self.passed}


def _random_array(rng, n_max=6, omega_max=2.0):
    n = int(rng.integers(2, n_max + 1))
    return lattice.build_custom(rng.uniform(0.2, 2.0, n - 1), rng.uniform(0, omega_max))


def single_excitation_amplitudes(array: lattice.CavityArray, t: float) -> np.ndarray:
    """alpha_n(t) read off the Fock engine.

    a_N^dag(t)|0> = exp(iHt) a_N^dag |0>, so evolving one photon in the last
    cavity for time -t leaves alpha_n on cavity N + 1 - n.
    """
    n = array.n_cavities
    basis = FockBasis(n, 2)
    h = build_hamiltonian(array, basis)
    specs = [StateSpec.fock(0)] * (n - 1) + [StateSpec.fock(1)]
    psi = evolve(h, prepare_product_state(basis, specs), -t)
    site = np.array([psi.amplitude(tuple(int(m == k) for m in range(n))) for k in range(n)])
    return site[::-1]


def check_unitarity(rng, samples=20):
    worst = 0.0
    for _ in range(samples):
        arr = _random_array(rng, 10)
        for t in rng.uniform(0, 50, 5):
            worst = max(worst, abs(propagator.amplitudes(arr, t).norm_squared() - 1))
    return CheckResult("propagator unitarity", worst, UNITARITY_TOL)


def check_uniform_series(grid=None):
    grid = np.linspace(0, 30, 100) if grid is None else grid
    worst = 0.0
    for n in (2, 3, 5, 8, 12):
        for omega in (0.0, 2 * np.pi / 21.8, 1.3):
            arr = lattice.build_uniform(n, 1.0, omega)
            diff = propagator.uniform_alpha_series(n, 1.0, omega, grid) - propagator.alpha_end(arr, grid)
            worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("uniform eigen-sum vs eigendecomposition", worst, ANALYTIC_TOL)


def check_modulated_closed(grid=None):
    grid = np.linspace(0, 10, 100) if grid is None else grid
    worst = 0.0
    for n in range(2, 13):
        for omega in (0.0, 1.0, 4.0 + 1 - n if n <= 5 else 17.0):
            arr = lattice.build_modulated(n, 0, omega)
            diff = propagator.modulated_alpha_closed(n, omega, grid) - propagator.alpha_end(arr, grid)
            worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("modulated closed form vs eigendecomposition", worst, ANALYTIC_TOL)


def check_laplace(rng, grid=None, samples=10):
    grid = np.linspace(0, 10, 100) if grid is None else grid
    arrays = [lattice.build_uniform(n, 1.0, 0.3) for n in (2, 3, 4, 5, 6)]
    arrays += [lattice.build_modulated(8, 0, 0.0), lattice.build_ballistic(8, 0.3)]
    arrays += [_random_array(rng) for _ in range(samples)]
    worst = 0.0
    for arr in arrays:
        diff = propagator.laplace_alpha(arr, grid) - propagator.alpha_end(arr, grid)
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("residue form vs eigendecomposition", worst, LAPLACE_TOL)


def check_single_excitation(rng, samples=20, mutation=None):
    worst = 0.0
    arrays = [lattice.build_custom([0.4, 1.0, 1.7, 0.8], 0.5)]  # asymmetric on purpose
    arrays += [_random_array(rng) for _ in range(samples)]
    for arr in arrays:
        reference = arr.reversed() if mutation == "reversed-couplings" else arr
        for t in rng.uniform(0, 20, 10):
            fock_side = single_excitation_amplitudes(arr, t)
            worst = max(worst, float(np.max(np.abs(fock_side - propagator.amplitudes(reference, t).values))))
    return CheckResult("single-excitation Fock evolution vs propagator", worst, ANALYTIC_TOL)


def check_sector_vs_full(rng, samples=10):
    worst = 0.0
    for _ in range(samples):
        n = int(rng.integers(2, 4))
        d = int(rng.integers(2, 4))
        arr = lattice.build_custom(rng.uniform(0.2, 2.0, n - 1), rng.uniform(0, 2))
        basis = FockBasis(n, d)
        blocks = {}
        for s in range(basis.max_total + 1):
            dim = basis.sector_size(s)
            blocks[s] = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi = StateVector(basis, blocks)
        norm = psi.norm()
        psi = StateVector(basis, {s: v / norm for s, v in blocks.items()})
        h = build_hamiltonian(arr, basis)
        t = float(rng.uniform(0, 10))
        full = dense_evolve(arr, d, psi.dense(), t)
        worst = max(worst, float(np.max(np.abs(evolve(h, psi, t).dense() - full))))
    return CheckResult("sector-blocked vs full-space evolution", worst, 1e-12)


def check_coherent_closed(points=50, cutoff=None):
    arr = lattice.build_uniform(5, 1.0, 2 * np.pi / 21.8)
    sent, rest = StateSpec.coherent(1.0), (StateSpec.fock(0),) * 4
    cutoff = default_cutoff(sent, rest) if cutoff is None else cutoff
    tail = sent.tail(cutoff)
    setup = TransferSetup(arr, sent, rest, cutoff=cutoff, tail_tol=max(tail, DEFAULT_TAIL_TOL))
    worst = 0.0
    for t in np.linspace(0, 25, points):
        closed = coherent_fidelity_closed(1.0, propagator.alpha_end(arr, t))
        worst = max(worst, abs(setup.fidelity(t) - closed))
    return CheckResult("coherent closed form vs Fock engine", worst, max(1e-6, tail))


def check_heisenberg():
    arr = lattice.build_modulated(8, 0, 1.0)
    sent = StateSpec.superposition([1, 1, 1])
    setup = TransferSetup(arr, sent, (StateSpec.fock(0),) * 7, cutoff=3)
    lhs = setup.mean_number_last(np.pi / 2)
    return CheckResult("number transfer <n_N>(pi/2) = <n_1>(0)", abs(lhs - sent.mean_number()), 1e-9)


def check_norm(rng):
    arr = lattice.build_ballistic(5, 0.4, 1.0, 0.7)
    rest = (StateSpec.fock(1), StateSpec.coherent(0.3), StateSpec.fock(0), StateSpec.fock(2))
    setup = TransferSetup(arr, StateSpec.superposition([1, 1j, 1]), rest, cutoff=6, tail_tol=1e-6)
    worst = max(float(np.max(np.abs(setup.norms(t) - 1))) for t in rng.uniform(0, 30, 5))
    return CheckResult("Fock-space norm conservation", worst, NORM_TOL)


def run_checks(seed: int = 0, mutation: str | None = None, tolerance: float | None = None) -> list[CheckResult]:
    """Run every cross-check; ``tolerance`` replaces all stated tolerances."""
    if mutation is not None and mutation not in MUTATIONS:
        raise ValueError(f"unknown mutation {mutation!r}")
    rng = np.random.default_rng(seed)
    results = [
        check_unitarity(rng),
        check_uniform_series(),
        check_modulated_closed(),
        check_laplace(rng),
        check_single_excitation(rng, mutation=mutation),
        check_sector_vs_full(rng),
        check_coherent_closed(),
        check_heisenberg(),
        check_norm(rng),
    ]
    if tolerance is not None:
        for r in results:
            r.tolerance = tolerance
    return results
