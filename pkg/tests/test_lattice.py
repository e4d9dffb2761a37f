import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ccaqst import InvalidConfigurationError
from ccaqst.lattice import CavityArray, build_ballistic, build_custom, build_modulated, build_uniform


def test_uniform_fig1():
    arr = build_uniform(5, 1, 0.288)
    assert arr.couplings == (1.0, 1.0, 1.0, 1.0)
    assert arr.omega == 0.288


@pytest.mark.parametrize("n, j, expected", [(2, 1, [1.0]), (3, 0.5, [0.5, 0.5])])
def test_uniform_fill(n, j, expected):
    assert list(build_uniform(n, j).couplings) == expected


@pytest.mark.parametrize("n, j", [(1, 1.0), (5, 0.0), (5, -1.0)])
def test_uniform_rejects(n, j):
    with pytest.raises(InvalidConfigurationError):
        build_uniform(n, j)


def test_modulated_k0_n8():
    expected = [math.sqrt(7), math.sqrt(12), math.sqrt(15), 4, math.sqrt(15), math.sqrt(12), math.sqrt(7)]
    np.testing.assert_allclose(build_modulated(8, 0).couplings, expected, rtol=0, atol=1e-15)


def test_modulated_minimal():
    assert build_modulated(2, 0).couplings == (1.0,)


def test_modulated_k2_odd_bonds():
    k0 = build_modulated(8, 0).couplings
    k2 = build_modulated(8, 2).couplings
    np.testing.assert_allclose([k2[0], k2[2], k2[4], k2[6]], np.sqrt([55, 63, 63, 55]), atol=1e-14)
    assert [k2[1], k2[3], k2[5]] == [k0[1], k0[3], k0[5]]


def test_ballistic_fig3():
    assert build_ballistic(8, 0.3, 1).couplings == (0.3, 1, 1, 1, 1, 1, 0.3)


def test_ballistic_n3_both_ends():
    assert build_ballistic(3, 0.3, 1).couplings == (0.3, 0.3)


def test_ballistic_pattern():
    assert build_ballistic(4, 0.5, 2).couplings == (0.5, 2, 0.5)


@pytest.mark.parametrize("j_end", [0.0, 1.0, 1.5, -0.2])
def test_ballistic_rejects_end(j_end):
    with pytest.raises(InvalidConfigurationError):
        build_ballistic(6, j_end)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(n_cavities=3, couplings=(1.0,)),
        dict(n_cavities=3, couplings=(1.0, 0.0)),
        dict(n_cavities=3, couplings=(1.0, float("nan"))),
        dict(n_cavities=3, couplings=(1.0, 1.0), omega=-0.1),
        dict(n_cavities=3, couplings=(1.0, 1.0), omega=float("inf")),
    ],
)
def test_array_invariants(kwargs):
    with pytest.raises(InvalidConfigurationError):
        CavityArray(**kwargs)


def test_array_immutable():
    arr = build_uniform(3)
    with pytest.raises(AttributeError):
        arr.omega = 2.0


@given(n=st.integers(2, 40), k=st.integers(0, 5), omega=st.floats(0, 50))
def test_builders_valid_and_modulated_k0_mirror(n, k, omega):
    for arr in (build_modulated(n, k, omega), build_uniform(n, 0.7, omega), build_ballistic(n, 0.4, 1.3, omega)):
        assert len(arr.couplings) == n - 1 and all(j > 0 for j in arr.couplings)
    assert build_modulated(n, 0).is_mirror_symmetric(1e-12)
    assert build_uniform(n, 0.7).is_mirror_symmetric()
    assert build_ballistic(n, 0.4, 1.3).is_mirror_symmetric()


def test_custom_and_reversed():
    arr = build_custom([1, 2, 3], 0.5)
    assert arr.n_cavities == 4
    assert arr.reversed().couplings == (3.0, 2.0, 1.0)
    assert not arr.is_mirror_symmetric()
