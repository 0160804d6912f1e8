"""Two toy models: ideal polarizer chains and a two-level tunneling system."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import tolerances as tol
from .core import PAULI_X, HermitianOperator, StateVector, basis_state, matrix_exp_hermitian
from .errors import EmptyChain, NotNormalized
from .zeno import inverse_zeno_run


@dataclass(frozen=True)
class PolarizerChain:
    """Ideal polarizers with transmission axes ``angles`` (radians).

    ``efficiency`` multiplies every cos² factor; 1.0 is the lossless ideal.
    """

    angles: tuple[float, ...]
    input_angle: float = 0.0
    efficiency: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if not 0.0 < self.efficiency <= 1.0:
            raise ValueError(f"efficiency must lie in (0, 1], got {self.efficiency!r}")


def chain_transmission(chain: PolarizerChain) -> float:
    """Intensity fraction passing the whole chain (Malus's law per polarizer)."""
    if not chain.angles:
        raise EmptyChain("polarizer chain has no elements")
    axes = np.array((chain.input_angle,) + chain.angles)
    return float(np.prod(chain.efficiency * np.cos(np.diff(axes)) ** 2))


def polarizer_projector(angle: float) -> np.ndarray:
    v = np.array([math.cos(angle), math.sin(angle)], dtype=np.complex128)
    return np.outer(v, v)


def chain_transmission_matrix(chain: PolarizerChain) -> float:
    """Same quantity as :func:`chain_transmission`, by applying 2x2 projectors."""
    if not chain.angles:
        raise EmptyChain("polarizer chain has no elements")
    field = np.array([math.cos(chain.input_angle), math.sin(chain.input_angle)], dtype=np.complex128)
    for a in chain.angles:
        field = math.sqrt(chain.efficiency) * (polarizer_projector(a) @ field)
    return float(np.vdot(field, field).real)


def chain_as_zeno(N: int) -> PolarizerChain:
    """N polarizers stepping from the input axis 0 to π/2 in equal increments."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    return PolarizerChain(tuple(k * (math.pi / 2) / N for k in range(1, N + 1)), 0.0)


def chain_zeno_survival(N: int) -> float:
    """Survival of the abstract inverse-Zeno run H = 0, e₀ -> e₁ with N steps."""
    zero = HermitianOperator(np.zeros((2, 2)))
    return inverse_zeno_run(zero, basis_state(2, 0), basis_state(2, 1), N).survival_probability


@dataclass(frozen=True)
class TwoLevelDecayModel:
    """H = λ σ_x between a source level (index 0) and a target level (index 1)."""

    lam: float
    alpha0: complex = 1.0
    beta0: complex = 0.0
    source_label: str = "Arg"
    target_label: str = "His"

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError(f"coupling must be nonnegative, got {self.lam!r}")
        norm = math.sqrt(abs(self.alpha0) ** 2 + abs(self.beta0) ** 2)
        if abs(norm - 1.0) > tol.NORM:
            raise NotNormalized(f"|α|² + |β|² = {norm**2!r}")

    @property
    def hamiltonian(self) -> HermitianOperator:
        return HermitianOperator(self.lam * PAULI_X)

    @property
    def initial_state(self) -> StateVector:
        return StateVector(np.array([self.alpha0, self.beta0], dtype=np.complex128))


def survival_under_repeated_measurement(model: TwoLevelDecayModel, T: float, N: int) -> float:
    """Probability of finding the initial state at every one of N equally
    spaced measurements over total time T (standard Zeno)."""
    if T <= 0 or N < 1:
        raise ValueError("T and N must be positive")
    U = matrix_exp_hermitian(model.hamiltonian, T / N).entries
    init = model.initial_state.amplitudes
    chi = init.copy()
    for _ in range(N):
        chi = np.vdot(init, U @ chi) * init
    return float(np.vdot(chi, chi).real)


def survival_closed_form(lam: float, T: float, N: int) -> float:
    return math.cos(lam * T / N) ** (2 * N)


def fixed_basis_transfer(model: TwoLevelDecayModel, T: float, N: int) -> float:
    """Transfer probability left over when measuring in the initial basis."""
    return 1.0 - survival_under_repeated_measurement(model, T, N)


def steered_mutation_probability(model: TwoLevelDecayModel, N: int, T: float = 1.0) -> float:
    """Final fidelity with the target level under the engineered measurement
    schedule, evolving under λσ_x for total time T."""
    if N < 1:
        raise ValueError("N must be a positive integer")
    H = HermitianOperator(T * model.lam * PAULI_X)
    return inverse_zeno_run(H, model.initial_state, basis_state(2, 1), N).final_fidelity


def staircase(N: int) -> PolarizerChain:
    """N + 1 polarizers at k·(π/2)/N, k = 0..N."""
    return PolarizerChain(tuple(k * (math.pi / 2) / N for k in range(N + 1)), 0.0)
