"""Projective measurement written as one unitary on system ⊗ ancilla.

For a projector P, a system state Φ and ancilla states Ψ₀, Ψ₁ ⊥ Ψ₂, the
generator L = K/s (K the rotation generator on the product space) satisfies

    exp(-isL)(Φ ⊗ Ψ₀) = PΦ ⊗ Ψ₁ + (1-P)Φ ⊗ Ψ₂,

so tracing out either factor gives the dephased system state or the Born
weights on the ancilla.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import tolerances as tol
from .core import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    StateVector,
    basis_state,
    matrix_exp_hermitian,
    partial_trace,
    tensor_product,
)
from .errors import AncillaNotOrthogonal, DimensionMismatch, NonPositiveDuration, NotNormalized
from .zeno import rotation_hamiltonian, zeno_schedule

ORTHOGONALITY = 1e-10


@dataclass(frozen=True, eq=False)
class DilationSetup:
    P: Projector
    phi: StateVector
    psi1: StateVector
    psi2: StateVector
    psi0: Optional[StateVector] = None
    s: float = 1.0

    def __post_init__(self):
        if self.psi0 is None:
            object.__setattr__(self, "psi0", self.psi1)
        if self.P.dim != self.phi.dim:
            raise DimensionMismatch(f"projector dim {self.P.dim} != state dim {self.phi.dim}")
        ancilla = {self.psi0.dim, self.psi1.dim, self.psi2.dim}
        if len(ancilla) != 1:
            raise DimensionMismatch(f"ancilla states have different dims: {sorted(ancilla)}")
        if self.psi1.dim < 2:
            raise DimensionMismatch("ancilla dimension must be at least 2")
        overlap = abs(np.vdot(self.psi1.amplitudes, self.psi2.amplitudes))
        if overlap > ORTHOGONALITY:
            raise AncillaNotOrthogonal(f"|<Ψ1|Ψ2>| = {overlap:.3e}")
        if not self.s > 0:
            raise NonPositiveDuration(f"interaction time must be positive, got {self.s!r}")

    @property
    def dims(self) -> tuple[int, int]:
        return self.phi.dim, self.psi1.dim

    def target(self) -> np.ndarray:
        """PΦ ⊗ Ψ₁ + (1-P)Φ ⊗ Ψ₂ as a raw vector."""
        kept = self.P.entries @ self.phi.amplitudes
        rest = self.phi.amplitudes - kept
        return np.kron(kept, self.psi1.amplitudes) + np.kron(rest, self.psi2.amplitudes)


@dataclass(frozen=True, eq=False)
class DilationResult:
    L: HermitianOperator
    joint_in: StateVector
    joint_out: StateVector
    rho_system: DensityMatrix
    rho_ancilla: DensityMatrix
    target: np.ndarray


def build_dilation(setup: DilationSetup) -> DilationResult:
    target = setup.target()
    norm = np.linalg.norm(target)
    if abs(norm - 1.0) > tol.NORM:
        raise NotNormalized(f"dilation target has norm {norm!r}")
    joint_in = tensor_product(setup.phi, setup.psi0)
    rd = rotation_hamiltonian(joint_in, StateVector(target))
    L = HermitianOperator(rd.K.entries / setup.s)
    joint_out = matrix_exp_hermitian(L, setup.s).apply(joint_in)
    rho = joint_out.density()
    return DilationResult(
        L=L,
        joint_in=joint_in,
        joint_out=joint_out,
        rho_system=partial_trace(rho, setup.dims, keep=0),
        rho_ancilla=partial_trace(rho, setup.dims, keep=1),
        target=target,
    )


def dephased(P: Projector, phi: StateVector) -> np.ndarray:
    """PρP + (1-P)ρ(1-P) for ρ = |Φ><Φ|, computed directly."""
    rho = np.outer(phi.amplitudes, phi.amplitudes.conj())
    Q = np.eye(P.dim) - P.entries
    return P.entries @ rho @ P.entries + Q @ rho @ Q


def ancilla_mixture(setup: DilationSetup) -> np.ndarray:
    """‖PΦ‖²|Ψ₁><Ψ₁| + ‖(1-P)Φ‖²|Ψ₂><Ψ₂|."""
    kept = setup.P.entries @ setup.phi.amplitudes
    w1 = float(np.vdot(kept, kept).real)
    a1, a2 = setup.psi1.amplitudes, setup.psi2.amplitudes
    return w1 * np.outer(a1, a1.conj()) + (1.0 - w1) * np.outer(a2, a2.conj())


def decoherence_check(result, P: Projector) -> float:
    """Frobenius norm of the coherence block P ρ (1-P) of the system state.

    Accepts a :class:`DilationResult`, a :class:`DensityMatrix` or a raw matrix,
    so the same measure can be taken before the dilation for contrast.
    """
    if isinstance(result, DilationResult):
        rho = result.rho_system.entries
    elif isinstance(result, DensityMatrix):
        rho = result.entries
    else:
        rho = np.asarray(result)
    if rho.shape != P.entries.shape:
        raise DimensionMismatch(f"state shape {rho.shape} vs projector {P.entries.shape}")
    block = P.entries @ rho @ (np.eye(P.dim) - P.entries)
    return float(np.linalg.norm(block))


@dataclass(frozen=True, eq=False)
class DilatedRun:
    final_state: np.ndarray
    rest_amplitude: float


def dilated_zeno_run(H, phi, psi, N: int, ancilla_dim: int = 3, s: Optional[float] = None) -> DilatedRun:
    """Inverse-Zeno run with every projection replaced by a dilation.

    After each free step the (renormalized) system state is coupled to a fresh
    ancilla in Ψ₀ = Ψ₁ = e₀, Ψ₂ = e₁; keeping only the Ψ₁ outcome gives the
    projected state. Amplitude left on the remaining ancilla levels is reported
    as ``rest_amplitude`` (it should vanish).
    """
    if ancilla_dim < 2:
        raise DimensionMismatch("ancilla dimension must be at least 2")
    s = 1.0 / N if s is None else s
    psi1, psi2 = basis_state(ancilla_dim, 0), basis_state(ancilla_dim, 1)
    schedule = zeno_schedule(rotation_hamiltonian(phi, psi), N)
    U = matrix_exp_hermitian(H, 1.0 / N).entries
    d = schedule.phi.dim

    chi = schedule.phi.amplitudes.copy()
    rest = 0.0
    for P in schedule.projectors:
        chi = U @ chi
        weight = np.linalg.norm(chi)
        if weight == 0.0:
            break
        setup = DilationSetup(P, StateVector(chi / weight), psi1, psi2, s=s)
        out = build_dilation(setup).joint_out.amplitudes.reshape(d, ancilla_dim)
        rest = max(rest, float(np.linalg.norm(out[:, 2:]))) if ancilla_dim > 2 else rest
        chi = weight * (out @ psi1.amplitudes.conj())
    return DilatedRun(chi, rest)
