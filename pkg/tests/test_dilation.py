import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import partial_trace_loops
from zenolab.core import (
    PAULI_X,
    HermitianOperator,
    Projector,
    StateVector,
    basis_state,
    haar_random_state,
    matrix_exp_hermitian,
    normalized,
    operator_norm,
    random_hermitian,
    random_projector,
    rng,
)
from zenolab.dilation import (
    DilationSetup,
    ancilla_mixture,
    build_dilation,
    decoherence_check,
    dephased,
    dilated_zeno_run,
)
from zenolab.errors import AncillaNotOrthogonal, DimensionMismatch, NonPositiveDuration
from zenolab.harness import random_dilation_setup
from zenolab.zeno import inverse_zeno_run

seeds = st.integers(min_value=0, max_value=2**64 - 1)
a0, a1, a2 = basis_state(3, 0), basis_state(3, 1), basis_state(3, 2)


def _weights(setup):
    kept = setup.P.entries @ setup.phi.amplitudes
    p = float(np.vdot(kept, kept).real)
    return p, 1.0 - p


def test_identity_projector_sends_everything_to_psi1():
    phi = haar_random_state(2, 1)
    setup = DilationSetup(Projector(np.eye(2)), phi, a1, a2, a0, s=0.5)
    res = build_dilation(setup)
    np.testing.assert_allclose(res.joint_out.amplitudes, np.kron(phi.amplitudes, a1.amplitudes), atol=1e-9)
    np.testing.assert_allclose(res.rho_ancilla.entries, np.outer(a1.amplitudes, a1.amplitudes), atol=1e-9)
    assert decoherence_check(res, setup.P) == 0.0


def test_symmetric_amplitudes_give_even_ancilla_mixture():
    P = Projector(np.diag([1.0, 0.0]))
    setup = DilationSetup(P, normalized([1, 1]), a1, a2)
    res = build_dilation(setup)
    expected = 0.5 * np.outer(a1.amplitudes, a1.amplitudes) + 0.5 * np.outer(a2.amplitudes, a2.amplitudes)
    np.testing.assert_allclose(res.rho_ancilla.entries, expected, atol=1e-9)


def test_rank_one_projector_kills_cross_blocks():
    gen = rng(2718)
    P = random_projector(3, 1, gen)
    phi = haar_random_state(3, gen)
    psi0 = haar_random_state(2, gen)
    setup = DilationSetup(P, phi, basis_state(2, 0), basis_state(2, 1), psi0, s=0.37)
    res = build_dilation(setup)
    # brute-force projector sandwich
    rho = np.outer(phi.amplitudes, phi.amplitudes.conj())
    Q = np.eye(3) - P.entries
    oracle = P.entries @ rho @ P.entries + Q @ rho @ Q
    np.testing.assert_allclose(res.rho_system.entries, oracle, atol=1e-9)
    assert np.max(np.abs(P.entries @ res.rho_system.entries @ Q)) < 1e-9
    assert decoherence_check(res, P) < 1e-9


def test_decoherence_contrast_before_dilation():
    P = Projector(np.diag([1.0, 0.0]))
    pure = normalized([1, 1]).density()
    assert decoherence_check(pure, P) == pytest.approx(0.5, abs=1e-15)


def test_setup_validation():
    P = Projector(np.eye(2))
    phi = basis_state(2, 0)
    with pytest.raises(AncillaNotOrthogonal):
        DilationSetup(P, phi, a1, normalized([0, 1, 1]))
    with pytest.raises(NonPositiveDuration):
        DilationSetup(P, phi, a1, a2, s=0.0)
    with pytest.raises(NonPositiveDuration):
        DilationSetup(P, phi, a1, a2, s=-1.0)
    with pytest.raises(DimensionMismatch):
        DilationSetup(Projector(np.eye(3)), phi, a1, a2)
    with pytest.raises(DimensionMismatch):
        DilationSetup(P, phi, a1, a2, basis_state(2, 0))
    assert DilationSetup(P, phi, a1, a2).psi0 is a1


def test_decoherence_check_dimension_mismatch():
    res = build_dilation(DilationSetup(Projector(np.eye(2)), basis_state(2, 0), a1, a2))
    with pytest.raises(DimensionMismatch):
        decoherence_check(res, Projector(np.eye(3)))


@settings(max_examples=60, deadline=None)
@given(seeds, st.integers(2, 4), st.integers(2, 3), st.sampled_from([0.1, 1.0, 10.0]))
def test_dilation_invariants(seed, dim, ancilla, s):
    gen = rng(seed)
    P = random_projector(dim, int(gen.integers(0, dim + 1)), gen)
    phi = haar_random_state(dim, gen)
    basis = np.linalg.qr(gen.standard_normal((ancilla, ancilla)) + 1j * gen.standard_normal((ancilla, ancilla)))[0]
    setup = DilationSetup(P, phi, StateVector(basis[:, 0]), StateVector(basis[:, 1]),
                          haar_random_state(ancilla, gen), s=s)
    res = build_dilation(setup)
    assert np.linalg.norm(res.joint_out.amplitudes - setup.target()) < 1e-8
    assert abs(np.linalg.norm(res.joint_out.amplitudes) - 1) < 1e-9
    np.testing.assert_allclose(res.rho_system.entries, dephased(P, phi), atol=1e-9)
    np.testing.assert_allclose(res.rho_ancilla.entries, ancilla_mixture(setup), atol=1e-9)
    rho = np.outer(res.joint_out.amplitudes, res.joint_out.amplitudes.conj())
    np.testing.assert_allclose(res.rho_system.entries, partial_trace_loops(rho, dim, ancilla, 0), atol=1e-13)
    assert decoherence_check(res, P) < 1e-9
    p, q = _weights(setup)
    assert abs(np.trace(P.entries @ res.rho_system.entries).real - p) < 1e-10
    assert abs(res.rho_system.purity() - (p**2 + q**2)) < 1e-9
    assert operator_norm(res.L) <= (np.pi / 2 + 2 * np.pi) / s + 1e-9


def test_purity_is_one_only_for_sharp_outcomes():
    P = Projector(np.diag([1.0, 0.0]))
    for phi, pure in [(basis_state(2, 0), True), (basis_state(2, 1), True), (normalized([1, 2]), False)]:
        res = build_dilation(DilationSetup(P, phi, a1, a2))
        assert (abs(res.rho_system.purity() - 1) < 1e-9) is pure


def test_results_do_not_depend_on_duration():
    gen = rng(31)
    P = random_projector(3, 2, gen)
    phi = haar_random_state(3, gen)
    outs = []
    for s in (0.1, 1.0, 10.0):
        res = build_dilation(DilationSetup(P, phi, a1, a2, a0, s=s))
        outs.append(res)
        np.testing.assert_allclose(res.L.entries * s, outs[0].L.entries * 0.1, atol=1e-12)
    for res in outs[1:]:
        np.testing.assert_allclose(res.joint_out.amplitudes, outs[0].joint_out.amplitudes, atol=1e-12)
        np.testing.assert_allclose(res.rho_system.entries, outs[0].rho_system.entries, atol=1e-12)


def test_joint_state_reproduced_by_exponentiating_l():
    setup = random_dilation_setup(3, 5, 4)
    res = build_dilation(setup)
    joint = matrix_exp_hermitian(res.L, setup.s).entries @ res.joint_in.amplitudes
    np.testing.assert_allclose(joint, setup.target(), atol=1e-8)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_composition_with_inverse_zeno(N):
    H = HermitianOperator(PAULI_X)
    e0, e1 = basis_state(2, 0), basis_state(2, 1)
    direct = inverse_zeno_run(H, e0, e1, N).final_state
    dilated = dilated_zeno_run(H, e0, e1, N)
    np.testing.assert_allclose(dilated.final_state, direct, atol=1e-7)
    assert dilated.rest_amplitude < 1e-10


@given(seeds, st.integers(1, 4))
def test_composition_random_two_level(seed, N):
    gen = rng(seed)
    H = random_hermitian(2, gen, norm=1.3)
    phi, psi = haar_random_state(2, gen), haar_random_state(2, gen)
    direct = inverse_zeno_run(H, phi, psi, N).final_state
    dilated = dilated_zeno_run(H, phi, psi, N, ancilla_dim=2)
    np.testing.assert_allclose(dilated.final_state, direct, atol=1e-7)
