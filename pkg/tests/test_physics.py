import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import malus_product
from zenolab.core import PAULI_X, HermitianOperator, basis_state
from zenolab.errors import EmptyChain, NotNormalized
from zenolab.physics import (
    PolarizerChain,
    TwoLevelDecayModel,
    chain_as_zeno,
    chain_transmission,
    chain_transmission_matrix,
    chain_zeno_survival,
    fixed_basis_transfer,
    staircase,
    steered_mutation_probability,
    survival_closed_form,
    survival_under_repeated_measurement,
)
from zenolab.zeno import inverse_zeno_run

# cos^200(π/200) from a 30-digit mpmath evaluation
STAIRCASE_100 = 0.975626914143900280917104444239


def test_frozen_staircase_value():
    with mpmath.workdps(30):
        assert float(mpmath.cos(mpmath.pi / 200) ** 200) == pytest.approx(STAIRCASE_100, abs=1e-16)


# --- chain_transmission -------------------------------------------------------------


def test_crossed_pair_blocks_light():
    assert chain_transmission(PolarizerChain((0.0, math.pi / 2))) < 1e-12


def test_inserted_diagonal_polarizer():
    chain = PolarizerChain((0.0, math.pi / 4, math.pi / 2))
    assert chain_transmission(chain) == pytest.approx(0.25, abs=1e-12)
    assert malus_product(0.0, chain.angles) == pytest.approx(0.25, abs=1e-12)


def test_staircase_of_hundred():
    assert chain_transmission(staircase(100)) == pytest.approx(STAIRCASE_100, abs=1e-10)
    assert chain_transmission(staircase(100)) == pytest.approx(0.97563, abs=1e-5)


def test_empty_chain():
    with pytest.raises(EmptyChain):
        chain_transmission(PolarizerChain(()))
    with pytest.raises(EmptyChain):
        chain_transmission_matrix(PolarizerChain(()))


@given(st.lists(st.floats(0, math.pi, exclude_max=True), min_size=1, max_size=12), st.floats(-1, 1))
def test_transmission_matches_malus_and_projectors(angles, start):
    chain = PolarizerChain(tuple(angles), start)
    expected = malus_product(start, angles)
    assert chain_transmission(chain) == pytest.approx(expected, abs=1e-12)
    assert chain_transmission_matrix(chain) == pytest.approx(expected, abs=1e-12)


def test_efficiency_multiplies_each_factor():
    chain = PolarizerChain((0.0, math.pi / 4, math.pi / 2), efficiency=0.9)
    assert chain_transmission(chain) == pytest.approx(0.25 * 0.9**3, abs=1e-12)
    assert chain_transmission_matrix(chain) == pytest.approx(0.25 * 0.9**3, abs=1e-12)
    with pytest.raises(ValueError):
        PolarizerChain((0.0,), efficiency=0.0)


# --- chain_as_zeno -----------------------------------------------------------------


def test_chain_as_zeno_small_cases():
    assert chain_as_zeno(1).angles == (math.pi / 2,)
    assert chain_transmission(chain_as_zeno(1)) < 1e-30
    assert chain_transmission(chain_as_zeno(2)) == pytest.approx(0.25, abs=1e-15)


def test_chain_as_zeno_equals_inverse_zeno_survival():
    for N in (50, 1, 7, 512):
        assert abs(chain_transmission(chain_as_zeno(N)) - chain_zeno_survival(N)) < 1e-10


def test_chain_as_zeno_tends_to_full_transmission():
    values = [chain_transmission(chain_as_zeno(N)) for N in (2, 8, 32, 128, 512)]
    assert values == sorted(values)
    assert values[-1] > 0.995


# --- two-level model ---------------------------------------------------------------


def test_model_validation():
    with pytest.raises(NotNormalized):
        TwoLevelDecayModel(1.0, alpha0=1.0, beta0=0.5)
    m = TwoLevelDecayModel(0.3)
    np.testing.assert_array_equal(m.initial_state.amplitudes, [1, 0])


def test_full_rabi_transfer_then_measure():
    m = TwoLevelDecayModel(math.pi / 2)
    assert survival_under_repeated_measurement(m, 1.0, 1) < 1e-30


def test_short_time_transfer_is_quadratic():
    m = TwoLevelDecayModel(1.0)
    t = 1e-3
    transfer = fixed_basis_transfer(m, t, 1)
    assert transfer == pytest.approx(math.sin(t) ** 2, rel=1e-9)
    assert transfer == pytest.approx(t**2, rel=1e-6)


def test_survival_hundred_measurements():
    m = TwoLevelDecayModel(math.pi / 2)
    assert survival_under_repeated_measurement(m, 1.0, 100) == pytest.approx(STAIRCASE_100, abs=1e-10)


@pytest.mark.parametrize("lam_T", [0.3, 1.0, math.pi / 2])
def test_survival_matches_closed_form_and_increases(lam_T):
    m = TwoLevelDecayModel(lam_T)
    prev = -1.0
    for N in range(1, 65):
        value = survival_under_repeated_measurement(m, 1.0, N)
        assert abs(value - survival_closed_form(lam_T, 1.0, N)) < 1e-10
        assert value > prev
        prev = value


def test_steered_single_crossed_projection():
    m = TwoLevelDecayModel(0.0)
    assert steered_mutation_probability(m, 1) < 1e-30


@pytest.mark.parametrize("N", [1, 2, 5, 64])
def test_steered_without_coupling_is_polarizer_chain(N):
    m = TwoLevelDecayModel(0.0)
    assert steered_mutation_probability(m, N) == pytest.approx(chain_transmission(chain_as_zeno(N)), abs=1e-12)


def test_steered_large_n():
    m = TwoLevelDecayModel(0.2)
    fid = steered_mutation_probability(m, 256)
    bound = 4 * (0.2 + math.pi / 2) ** 2 / 256
    assert fid > 0.95
    assert -math.log(fid) <= bound


def test_steered_uses_total_time():
    m = TwoLevelDecayModel(0.5)
    H = HermitianOperator(2.0 * 0.5 * PAULI_X)
    direct = inverse_zeno_run(H, basis_state(2, 0), basis_state(2, 1), 32).final_fidelity
    assert steered_mutation_probability(m, 32, T=2.0) == pytest.approx(direct, abs=1e-15)
