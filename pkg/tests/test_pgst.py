import math

import numpy as np
import pytest

from ccaqst import InvalidConfigurationError
from ccaqst.lattice import build_modulated, build_uniform
from ccaqst.pgst import (
    TransferWindow,
    classify_length,
    find_transfer_time,
    gamma_for,
    is_prime,
    phase_matching_omega,
    recommended_omegas,
    search_pgst_window,
)
from ccaqst.propagator import alpha_end

LIMIT = 10_000


def sieve(limit):
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return set(np.flatnonzero(flags).tolist())


@pytest.fixture(scope="module")
def brute_force_lengths():
    primes = sieve(2 * LIMIT + 2)
    lengths = {p - 1 for p in primes} | {2 * p - 1 for p in primes} | {2**m - 1 for m in range(1, 16)}
    return {n for n in lengths if 2 <= n <= LIMIT}


def test_classify_matches_enumeration(brute_force_lengths):
    got = {n for n in range(2, LIMIT + 1) if classify_length(n).is_pgst}
    assert got == brute_force_lengths


@pytest.mark.parametrize(
    "n, witnesses",
    [
        (5, {("2p-1", 3)}),
        (7, {("2^m-1", 3)}),
        (2, {("p-1", 3)}),
        (3, {("2p-1", 2), ("2^m-1", 2)}),
        (4, {("p-1", 5)}),
        (8, set()),
    ],
)
def test_classify_witnesses(n, witnesses):
    lc = classify_length(n)
    assert set(lc.witnesses) == witnesses
    assert lc.is_pgst == bool(witnesses)


def test_classify_rejects_short():
    with pytest.raises(InvalidConfigurationError):
        classify_length(1)


def test_is_prime_small():
    assert [p for p in range(30) if is_prime(p)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("n, gamma", [(5, 1), (9, 1), (7, -1), (3, -1)])
def test_gamma_odd(n, gamma):
    assert gamma_for(n).gamma == gamma


def test_gamma_even_unresolved_without_window():
    g = gamma_for(8)
    assert not g.resolved
    assert set(g.candidates) == {1j, -1j}


def test_gamma_even_from_window():
    window = find_transfer_time(build_uniform(8, 1, 0), 40)
    g = gamma_for(8, window)
    assert g.gamma in (1j, -1j)
    assert abs(window.phase - np.angle(g.gamma)) < 0.05


def test_modulated_transfer_time():
    for omega in (0.0, 3.0):
        w = find_transfer_time(build_modulated(8, 0, omega), 10)
        assert abs(w.tau - math.pi / 2) < 1e-6
        assert abs(w.magnitude - 1) < 1e-10


def test_two_site_transfer_time():
    w = find_transfer_time(build_uniform(2, 1, 0), 10)
    assert abs(w.tau - math.pi / 2) < 1e-6
    assert abs(w.magnitude - 1) < 1e-10


def test_uniform_five_transfer_time():
    # the |alpha_5| maximum in (0, 25] sits at 21.8786 with magnitude 0.99365
    w = find_transfer_time(build_uniform(5, 1, 0), 25)
    assert w.tau == pytest.approx(21.8786, abs=1e-3)
    assert w.magnitude == pytest.approx(0.993654, abs=1e-6)
    assert abs(w.phase) < 1e-9


def test_earliest_of_tied_maxima():
    # |sin t|^7 reaches 1 at pi/2, 3pi/2, ...; the earliest must win
    w = find_transfer_time(build_modulated(8, 0, 0.0), 20)
    assert abs(w.tau - math.pi / 2) < 1e-6


def test_low_magnitude_is_returned():
    arr = build_uniform(30, 1, 0)
    w = find_transfer_time(arr, 1.0, grid=100)
    assert w.magnitude < 0.1 and 0 < w.tau <= 1.0


@pytest.mark.parametrize("t_max, grid", [(0, 200), (-1, 200), (5, 50)])
def test_search_arguments(t_max, grid):
    with pytest.raises(InvalidConfigurationError):
        find_transfer_time(build_uniform(4), t_max, grid)


def test_phase_matching_examples():
    assert phase_matching_omega(21.8, 0.0, 1) == pytest.approx(0.2882, abs=1e-4)
    assert phase_matching_omega(math.pi / 2, -math.pi / 2, 1) == pytest.approx(5.0, abs=1e-12)
    assert phase_matching_omega(3.7, 0.0, 0) == 0.0


def test_phase_matching_removes_phase(rng):
    for arr in (build_uniform(5, 1, 0), build_uniform(4, 1, 0), build_modulated(6, 0, 0)):
        w = find_transfer_time(arr, 5.0 * arr.n_cavities)
        for omega in recommended_omegas(w.tau, w.phase, 4):
            value = alpha_end(arr.with_omega(omega), w.tau)
            assert abs(value - abs(value)) < 1e-6


@pytest.mark.parametrize("n", range(2, 13))
def test_modulated_family(n):
    w = find_transfer_time(build_modulated(n, 0, 0.0), 10)
    family = {4 * j + 1 - n for j in range(0, 40) if 4 * j + 1 - n >= 0}
    for omega in recommended_omegas(w.tau, w.phase, 4):
        assert min(abs(omega - f) for f in family) < 1e-9


def test_recommended_are_smallest_nonnegative():
    omegas = recommended_omegas(math.pi / 2, -math.pi / 2)
    np.testing.assert_allclose(omegas, [1, 5, 9, 13], atol=1e-12)


def test_window_value():
    w = TransferWindow(1.0, 0.5, math.pi / 2)
    assert w.value == pytest.approx(0.5j)


# Search windows grow quickly with N for uniform chains; N <= 7 is reachable in a
# few doublings of 5N, longer lengths are reported rather than asserted.
@pytest.mark.parametrize("n", [2, 3, 4, 5, 6, 7])
def test_pgst_lengths_reach_099(n):
    window, reached = search_pgst_window(build_uniform(n), 0.99, t_max=5.0 * n**1.5)
    assert reached and window.magnitude >= 0.99


@pytest.mark.slow
@pytest.mark.parametrize("n", [9, 10, 12, 13, 15, 16, 18, 21, 22, 25, 28, 30, 31])
def test_pgst_long_lengths_reported(n, record_property):
    window, reached = search_pgst_window(build_uniform(n), 0.99, t_max=5.0 * n**1.5, widen=3)
    record_property("pgst_window", f"N={n} reached={reached} best={window.magnitude:.4f} at {window.tau:.1f}")
    assert 0 < window.magnitude <= 1 + 1e-12
