"""State-rotation generators and measurement schedules that steer Φ to Ψ."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import tolerances as tol
from .core import (
    HermitianOperator,
    Projector,
    StateVector,
    inner_product,
    matrix_exp_hermitian,
    operator_norm,
)
from .errors import DimensionMismatch

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class RotationDecomposition:
    """K = -iθ|Φ><Φ_⊥| + iθ|Φ_⊥><Φ| + δ·I with exp(-iK)Φ = Ψ.

    ``phi_perp`` is None when Φ and Ψ lie on the same ray; K is then δ·I.
    """

    phi: StateVector
    psi: StateVector
    theta: float
    delta: float
    phi_perp: Optional[StateVector]
    K: HermitianOperator

    @property
    def K_prime(self) -> HermitianOperator:
        return HermitianOperator(self.K.entries - self.delta * np.eye(self.K.dim))


def _as_state(v) -> StateVector:
    if isinstance(v, StateVector):
        return v
    return StateVector(v)


def rotation_hamiltonian(phi: StateVector, psi: StateVector) -> RotationDecomposition:
    phi, psi = _as_state(phi), _as_state(psi)
    if phi.dim != psi.dim:
        raise DimensionMismatch(f"dimensions differ: {phi.dim} vs {psi.dim}")
    overlap = inner_product(phi, psi)
    mag = abs(overlap)
    # <Φ|Ψ> = e^{-iδ}|<Φ|Ψ>|, δ in [0, 2π); δ = 0 for orthogonal states
    delta = 0.0 if mag == 0.0 else float(np.mod(-np.angle(overlap), TWO_PI))
    if delta >= TWO_PI:
        delta = 0.0
    dim = phi.dim
    a = phi.amplitudes

    # sin θ is taken as the norm of the rejected component, which stays
    # accurate when |<Φ|Ψ>| is within rounding of 1.
    rejected = np.exp(1j * delta) * psi.amplitudes - mag * a
    sin_theta = float(np.linalg.norm(rejected))
    if sin_theta < tol.PARALLEL:
        return RotationDecomposition(
            phi, psi, 0.0, delta, None, HermitianOperator(delta * np.eye(dim))
        )

    perp = rejected / sin_theta
    perp = perp - np.vdot(a, perp) * a
    if sin_theta < tol.REORTHOGONALIZE:
        perp = perp - np.vdot(a, perp) * a
    perp = perp / np.linalg.norm(perp)
    theta = math.atan2(sin_theta, mag)

    gen = -1j * theta * np.outer(a, perp.conj())
    gen = gen + gen.conj().T + delta * np.eye(dim)
    return RotationDecomposition(phi, psi, theta, delta, StateVector(perp), HermitianOperator(gen))


def interpolating_state(rd: RotationDecomposition, t: float) -> StateVector:
    """exp(-itK)Φ: Φ at t=0, Ψ at t=1."""
    return matrix_exp_hermitian(rd.K, t).apply(rd.phi)


def _schedule_states(rd: RotationDecomposition, n_steps: int) -> np.ndarray:
    """Rows are exp(-inK/N)Φ for n = 1..N, sharing one eigendecomposition."""
    n = np.arange(1, n_steps + 1)[:, None] / n_steps
    if rd.phi_perp is None:
        return np.exp(-1j * rd.delta * n) * rd.phi.amplitudes[None, :]
    w, v = rd.K.eigh
    coeffs = v.conj().T @ rd.phi.amplitudes
    return (np.exp(-1j * n * w[None, :]) * coeffs[None, :]) @ v.T


@dataclass(frozen=True, eq=False)
class ZenoSchedule:
    """Rank-1 measurement targets exp(-inK/N)Φ, n = 1..N."""

    N: int
    targets: np.ndarray
    K: HermitianOperator
    phi: StateVector
    psi: StateVector

    @property
    def projectors(self) -> list[Projector]:
        return [Projector(np.outer(row, row.conj())) for row in self.targets]


def zeno_schedule(rd: RotationDecomposition, N: int) -> ZenoSchedule:
    if N < 1:
        raise ValueError("N must be a positive integer")
    targets = _schedule_states(rd, N)
    targets.setflags(write=False)
    return ZenoSchedule(N, targets, rd.K, rd.phi, rd.psi)


@dataclass(frozen=True, eq=False)
class ZenoRunResult:
    N: int
    final_state: np.ndarray
    final_fidelity: float
    survival_probability: float
    analytic_bound: float
    per_step_overlaps: np.ndarray
    M: float
    K_norm: float

    @property
    def deficit(self) -> float:
        return 1.0 - self.final_fidelity

    @property
    def bound_applies(self) -> bool:
        """True when N >= 2(M + ‖K‖), where the 4(M + ‖K‖)²/N bound is asserted."""
        return self.N >= 2.0 * (self.M + self.K_norm)


def _check_inputs(H, phi, psi=None):
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(H)
    phi = _as_state(phi)
    dims = [H.dim, phi.dim]
    if psi is not None:
        psi = _as_state(psi)
        dims.append(psi.dim)
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimensions differ: {dims}")
    return H, phi, psi


def run_schedule(H: HermitianOperator, schedule: ZenoSchedule) -> ZenoRunResult:
    """Apply P_N U(1/N) ... P_1 U(1/N) to Φ for a prepared schedule."""
    N = schedule.N
    U = matrix_exp_hermitian(H, 1.0 / N).entries
    chi = schedule.phi.amplitudes.copy()
    prev = schedule.phi.amplitudes
    overlaps = np.empty(N, dtype=np.complex128)
    for n, target in enumerate(schedule.targets):
        chi = U @ chi
        chi = np.vdot(target, chi) * target
        overlaps[n] = np.vdot(target, U @ prev)
        prev = target
    chi.setflags(write=False)
    overlaps.setflags(write=False)
    M = operator_norm(H)
    k_norm = operator_norm(schedule.K)
    return ZenoRunResult(
        N=N,
        final_state=chi,
        final_fidelity=float(abs(np.vdot(schedule.psi.amplitudes, chi)) ** 2),
        survival_probability=float(np.vdot(chi, chi).real),
        analytic_bound=4.0 * (M + k_norm) ** 2 / N,
        per_step_overlaps=overlaps,
        M=M,
        K_norm=k_norm,
    )


def inverse_zeno_run(H, phi, psi, N: int) -> ZenoRunResult:
    H, phi, psi = _check_inputs(H, phi, psi)
    return run_schedule(H, zeno_schedule(rotation_hamiltonian(phi, psi), N))


def _short_time_image(H, K, phi, N: int) -> tuple[np.ndarray, np.ndarray]:
    H, phi, _ = _check_inputs(H, phi)
    if not isinstance(K, HermitianOperator):
        K = HermitianOperator(K)
    if K.dim != H.dim:
        raise DimensionMismatch(f"dimensions differ: {H.dim} vs {K.dim}")
    t = 1.0 / N
    a = phi.amplitudes
    return a, matrix_exp_hermitian(H, t).entries @ (matrix_exp_hermitian(K, -t).entries @ a)


def short_time_fidelity(H, K, phi, N: int) -> float:
    """|<Φ|exp(-iH/N) exp(iK/N)|Φ>|²."""
    a, moved = _short_time_image(H, K, phi, N)
    return float(abs(np.vdot(a, moved)) ** 2)


def short_time_deficit(H, K, phi, N: int) -> float:
    """One minus :func:`short_time_fidelity`, computed as a squared rejection norm
    so that deficits far below machine epsilon relative to 1 stay accurate."""
    a, moved = _short_time_image(H, K, phi, N)
    rejected = moved - np.vdot(a, moved) * a
    return float(np.vdot(rejected, rejected).real)


def short_time_bound(M: float, k_norm: float, N: int) -> float:
    """Upper bound 2(M + ‖K‖)²/N² on the short-time deficit."""
    return 2.0 * (M + k_norm) ** 2 / N**2


def loglog_slope(ns: Sequence[int], deficits: Sequence[float]) -> Optional[float]:
    """Least-squares slope of ln(deficit) against ln(N) over the largest decade.

    Points with deficit <= 1e-12 are dropped. Returns None with fewer than two
    usable points.
    """
    ns = np.asarray(ns, dtype=float)
    deficits = np.asarray(deficits, dtype=float)
    if ns.size == 0:
        return None
    keep = (ns >= ns.max() / 10.0) & (deficits > tol.DEFICIT_FLOOR)
    if keep.sum() < 2:
        return None
    x, y = np.log(ns[keep]), np.log(deficits[keep])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: list[ZenoRunResult]
    slope: Optional[float]
    seed: Optional[int] = None
    extra: dict = field(default_factory=dict)


def _check_n_list(n_list: Sequence[int]) -> list[int]:
    ns = [int(n) for n in n_list]
    if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"N list must be strictly increasing positive integers: {ns}")
    return ns


def convergence_sweep(H, phi, psi, n_list: Sequence[int], seed: Optional[int] = None) -> SweepResult:
    H, phi, psi = _check_inputs(H, phi, psi)
    ns = _check_n_list(n_list)
    rd = rotation_hamiltonian(phi, psi)
    rows = [run_schedule(H, zeno_schedule(rd, n)) for n in ns]
    slope = loglog_slope(ns, [r.deficit for r in rows])
    return SweepResult(rows, slope, seed)


def short_time_sweep(H, K, phi, n_list: Sequence[int]) -> tuple[list[float], Optional[float]]:
    """Deficits of the short-time fidelity over ``n_list`` and their fitted slope."""
    ns = _check_n_list(n_list)
    deficits = [short_time_deficit(H, K, phi, n) for n in ns]
    return deficits, loglog_slope(ns, deficits)
