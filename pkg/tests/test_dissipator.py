import math

import numpy as np
import pytest
from scipy.linalg import expm

from QCatLab.dissipator import (BlockDensity, block_generator, block_length, block_propagator,
                                block_twice_m, dense_liouvillian_apply, evolve_exact,
                                evolve_oracle, evolve_oracle_series, liouvillian_apply,
                                propagator_exact, propagator_short_time, s_sum_exact,
                                short_time_block_propagator)
from QCatLab.errors import DimensionMismatch, IndexOutOfRange
from QCatLab.spin import CoherentLabel, DensityMatrix, SpinQuantum, coherent_state


def test_block_layout():
    spin = SpinQuantum(4)
    assert block_length(spin, 0) == 5
    assert block_length(spin, -3) == 2
    assert block_twice_m(spin, 2).tolist() == [2, 0, -2]
    assert block_twice_m(spin, -3).tolist() == [1, -1]


def test_matrix_round_trip(random_density):
    spin = SpinQuantum(5)
    rho = random_density(spin)
    back = BlockDensity.from_matrix(rho.to_matrix())
    assert back.max_abs_difference(rho) == 0.0
    assert sorted(rho.blocks) == list(range(-5, 6))


def test_block_density_validation():
    spin = SpinQuantum(2)
    with pytest.raises(DimensionMismatch):
        BlockDensity(spin, {0: np.zeros(2)})
    with pytest.raises(DimensionMismatch):
        BlockDensity(spin, {7: np.zeros(1)})
    with pytest.raises(TypeError):
        BlockDensity.from_matrix(np.eye(3))
    assert BlockDensity.zeros(spin).nonzero_blocks() == []


def test_block_entries_follow_the_matrix():
    spin = SpinQuantum(3)
    entries = np.arange(16, dtype=complex).reshape(4, 4)
    rho = BlockDensity.from_matrix(entries, spin)
    count = 0
    for twice_k, twice_m, value in rho.entries():
        row = (spin.twice_j - twice_m - twice_k) // 2
        column = (spin.twice_j - twice_m + twice_k) // 2
        assert value == entries[row, column]
        count += 1
    assert count == 16


@pytest.mark.parametrize('twice_j', [3, 6])
def test_block_generator_matches_dense_generator(twice_j, random_density):
    rho = random_density(SpinQuantum(twice_j))
    dense = BlockDensity.from_matrix(dense_liouvillian_apply(rho.to_matrix()))
    assert liouvillian_apply(rho).max_abs_difference(dense) < 1e-12


def test_generator_preserves_trace(spin10):
    state = coherent_state(spin10, CoherentLabel(1.0, 0.4))
    rho = BlockDensity.from_matrix(DensityMatrix.pure(state))
    assert abs(liouvillian_apply(rho).trace()) < 1e-12


def test_polar_block_decays_as_exp():
    spin = SpinQuantum(10)
    propagator = block_propagator(spin, 10, 0.5)
    assert propagator.shape == (1, 1)
    assert propagator[0, 0] == pytest.approx(math.exp(-0.5), rel=1e-14)


def test_diagonal_propagator_is_single_exponential(spin10):
    # g_0 - k^2 = j (j + 1) at m = n = k = 0
    assert propagator_exact(spin10, 0, 0, 0, 0.01) == pytest.approx(math.exp(-0.11), rel=1e-13)


def test_propagator_at_zero_time(spin10):
    assert propagator_exact(spin10, 2, 0, 0, 0.0) == 1.0
    assert propagator_exact(spin10, 2, 0, 4, 0.0) == 0.0


@pytest.mark.parametrize('indices', [(0, 4, 2), (0, 1, 1), (0, 0, 22), (30, 0, 0)])
def test_propagator_rejects_invalid_indices(spin10, indices):
    twice_k, twice_m, twice_n = indices
    with pytest.raises(IndexOutOfRange):
        propagator_exact(spin10, twice_k, twice_m, twice_n, 0.1)


def test_propagator_rejects_negative_time(spin10):
    with pytest.raises(ValueError):
        propagator_exact(spin10, 0, 0, 2, -1.0)


@pytest.mark.parametrize('twice_j, twice_k', [(6, 2), (4, 0), (7, 1), (8, -4)])
def test_residues_match_matrix_exponential(twice_j, twice_k):
    spin = SpinQuantum(twice_j)
    residues = block_propagator(spin, twice_k, 0.7, 'residues')
    cascade = expm(0.7 * block_generator(spin, twice_k))
    assert np.allclose(residues, cascade, rtol=1e-10, atol=1e-13)
    assert np.allclose(block_propagator(spin, twice_k, 0.7, 'cascade'), cascade)


def test_double_pole_propagator():
    # g_1 = g_0 puts a double pole into the k = 0 block of j = 2
    spin = SpinQuantum(4)
    cascade = expm(1.3 * block_generator(spin, 0))
    assert propagator_exact(spin, 0, -4, 4, 1.3) == pytest.approx(cascade[4, 0], rel=1e-10)


def test_propagator_is_lower_triangular(spin10):
    propagator = block_propagator(spin10, 4, 0.2)
    assert np.allclose(np.triu(propagator, k=1), 0.0)
    assert not propagator.flags.writeable


def test_unknown_block_and_method(spin10):
    with pytest.raises(IndexOutOfRange):
        block_propagator(spin10, 22, 0.1)
    with pytest.raises(ValueError):
        block_propagator(spin10, 0, 0.1, 'series')


def test_exact_evolution_matches_integrator(random_density):
    rho = random_density(SpinQuantum(5))
    for tau in (0.1, 1.0):
        assert evolve_exact(rho, tau).max_abs_difference(evolve_oracle(rho, tau, 1e-13)) < 1e-9


def test_evolution_preserves_trace(spin10):
    state = coherent_state(spin10, CoherentLabel(2.0, 1.0))
    rho = BlockDensity.from_matrix(DensityMatrix.pure(state))
    assert evolve_exact(rho, 0.4).trace() == pytest.approx(1.0, abs=1e-12)


def test_integrator_series_validation(random_density):
    rho = random_density(SpinQuantum(2))
    with pytest.raises(ValueError):
        evolve_oracle_series(rho, [0.2, 0.1])
    with pytest.raises(ValueError):
        evolve_oracle_series(rho, [0.1], tol=0.0)
    assert evolve_oracle_series(rho, []) == []
    series = evolve_oracle_series(rho, [0.0, 0.1, 0.1])
    assert series[0].max_abs_difference(rho) < 1e-14
    assert series[1].max_abs_difference(series[2]) == 0.0


def test_short_time_exponents(spin10):
    printed = propagator_short_time(spin10, 0, 0, 0, 0.01, 'printed')
    matched = propagator_short_time(spin10, 0, 0, 0, 0.01, 'matched')
    assert printed.value == pytest.approx(math.exp(-0.09975), rel=1e-13)
    assert matched.value == pytest.approx(math.exp(-0.11), rel=1e-13)
    assert printed.valid and matched.valid


def test_short_time_off_diagonal_entry(spin10):
    # m = 0, n = 2, k = 0 at tau = 0.05: the printed exponent overshoots by about 5 %
    exact = propagator_exact(spin10, 0, 0, 4, 0.05)
    printed = propagator_short_time(spin10, 0, 0, 4, 0.05, 'printed').value
    matched = propagator_short_time(spin10, 0, 0, 4, 0.05, 'matched').value
    assert exact == pytest.approx(0.085963, rel=1e-4)
    assert printed == pytest.approx(5940.0 * 2.5e-5 * math.exp(-0.49875), rel=1e-12)
    assert matched == pytest.approx(5940.0 * 2.5e-5 * math.exp(-0.55), rel=1e-12)
    assert 0.04 < printed / exact - 1.0 < 0.06
    assert abs(matched / exact - 1.0) < 0.005


def test_matched_exponent_reproduces_diagonal_decay():
    spin = SpinQuantum(9)
    for twice_k in (-3, 1, 5):
        for twice_m in block_twice_m(spin, twice_k):
            exact = propagator_exact(spin, twice_k, int(twice_m), int(twice_m), 0.3)
            matched = propagator_short_time(spin, twice_k, int(twice_m), int(twice_m), 0.3,
                                            'matched')
            assert matched.value == pytest.approx(exact, rel=1e-12)


def test_short_time_validity_flag(spin10):
    assert not propagator_short_time(spin10, 0, -10, 10, 1.0).valid
    _, valid = short_time_block_propagator(spin10, 0, 1.0)
    assert not valid
    with pytest.raises(ValueError):
        propagator_short_time(spin10, 0, 0, 0, 0.1, 'other')


def test_column_sum(spin10):
    assert s_sum_exact(spin10, 2, 0, 0.0) == pytest.approx(1.0)
    assert 0.0 < s_sum_exact(spin10, 2, 0, 0.5) < 1.0
    with pytest.raises(IndexOutOfRange):
        s_sum_exact(spin10, 2, 1, 0.5)
