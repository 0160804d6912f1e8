"""Dense complex linear algebra: states, Hermitian operators, unitaries,
projectors, density matrices, tensor products and partial traces.

Every value type is a frozen dataclass around a read-only complex128 array and
validates its invariant on construction. Tensor indices follow the convention
(i, j) -> i * d' + j, i.e. the left factor is the slow index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from . import tolerances as tol
from .errors import (
    DimensionMismatch,
    NotDensityMatrix,
    NotHermitian,
    NotNormalized,
    NotProjector,
    NotUnitary,
)

Seed = Union[int, np.random.Generator]


def _frozen(array, ndim: int) -> np.ndarray:
    out = np.array(array, dtype=np.complex128)
    if out.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {out.shape}")
    if ndim == 2 and out.shape[0] != out.shape[1]:
        raise DimensionMismatch(f"matrix is not square: {out.shape}")
    if out.size == 0:
        raise ValueError("empty array")
    out.setflags(write=False)
    return out


def _herm_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector in C^dim. Use :func:`normalized` to build one from raw data."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes, 1)
        object.__setattr__(self, "amplitudes", amps)
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > tol.NORM:
            raise NotNormalized(f"state norm is {norm!r}, expected 1")

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def projector(self) -> Projector:
        return Projector(np.outer(self.amplitudes, self.amplitudes.conj()))

    def density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries, 2)
        res = _herm_residual(m)
        if res > tol.HERM:
            raise NotHermitian(f"max |A - A†| = {res:.3e} exceeds {tol.HERM:g}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def eigh(self) -> tuple[np.ndarray, np.ndarray]:
        """Eigenvalues (ascending) and orthonormal eigenvectors as columns."""
        sym = 0.5 * (self.entries + self.entries.conj().T)
        return np.linalg.eigh(sym)

    def __add__(self, other: HermitianOperator) -> HermitianOperator:
        return HermitianOperator(self.entries + other.entries)

    def __mul__(self, scalar: float) -> HermitianOperator:
        return HermitianOperator(self.entries * float(scalar))

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class UnitaryMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries, 2)
        res = float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))
        if res > tol.UNIT:
            raise NotUnitary(f"max |U U† - I| = {res:.3e}")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, state: StateVector) -> StateVector:
        _check_dims(self.dim, state.dim)
        return StateVector(self.entries @ state.amplitudes)


@dataclass(frozen=True, eq=False)
class Projector:
    entries: np.ndarray
    rank: int = field(init=False)

    def __post_init__(self):
        m = _frozen(self.entries, 2)
        herm = _herm_residual(m)
        if herm > tol.HERM:
            raise NotProjector(f"projector not Hermitian ({herm:.3e})")
        idem = float(np.max(np.abs(m @ m - m)))
        if idem > tol.IDEM:
            raise NotProjector(f"max |P² - P| = {idem:.3e}")
        trace = float(np.trace(m).real)
        rank = int(round(trace))
        if abs(trace - rank) > tol.RANK:
            raise NotProjector(f"trace {trace!r} is not an integer")
        object.__setattr__(self, "entries", m)
        object.__setattr__(self, "rank", rank)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def complement(self) -> Projector:
        return Projector(np.eye(self.dim) - self.entries)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        m = _frozen(self.entries, 2)
        herm = _herm_residual(m)
        if herm > tol.HERM:
            raise NotDensityMatrix(f"density matrix not Hermitian ({herm:.3e})")
        trace = np.trace(m)
        if abs(trace - 1.0) > tol.TRACE:
            raise NotDensityMatrix(f"trace is {trace!r}")
        low = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T))[0])
        if low < -tol.PSD:
            raise NotDensityMatrix(f"smallest eigenvalue {low:.3e} is negative")
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


def _check_dims(*dims: int) -> None:
    if len(set(dims)) != 1:
        raise DimensionMismatch(f"dimensions differ: {dims}")


def normalized(v) -> StateVector:
    """Rescale a nonzero vector to unit norm and wrap it."""
    arr = np.asarray(v, dtype=np.complex128)
    norm = np.linalg.norm(arr)
    if norm == 0.0:
        raise NotNormalized("cannot normalize the zero vector")
    return StateVector(arr / norm)


def basis_state(dim: int, index: int) -> StateVector:
    v = np.zeros(dim, dtype=np.complex128)
    v[index] = 1.0
    return StateVector(v)


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, antilinear in ``a``."""
    _check_dims(a.dim, b.dim)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(target: StateVector, vec) -> float:
    """|<target|vec>|² where ``vec`` may be an unnormalized array."""
    amps = vec.amplitudes if isinstance(vec, StateVector) else np.asarray(vec)
    _check_dims(target.dim, amps.shape[0])
    return float(abs(np.vdot(target.amplitudes, amps)) ** 2)


def matrix_exp_hermitian(a: HermitianOperator, t: float) -> UnitaryMatrix:
    """exp(-i t A) through the eigendecomposition A = V diag(w) V†."""
    if not isinstance(a, HermitianOperator):
        a = HermitianOperator(a)
    w, v = a.eigh
    return UnitaryMatrix((v * np.exp(-1j * t * w)) @ v.conj().T)


def operator_norm(a: HermitianOperator) -> float:
    if not isinstance(a, HermitianOperator):
        a = HermitianOperator(a)
    w, _ = a.eigh
    return float(np.max(np.abs(w)))


_KRON_KINDS = (StateVector, HermitianOperator, UnitaryMatrix, Projector, DensityMatrix)


def tensor_product(a, b):
    """Kronecker product of two values of the same kind; the result has that kind too.

    Plain numpy arrays are accepted and give a plain array back.
    """
    if type(a) is not type(b):
        raise TypeError(f"cannot tensor {type(a).__name__} with {type(b).__name__}")
    if isinstance(a, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, _KRON_KINDS):
        return type(a)(np.kron(a.entries, b.entries))
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace(rho, dims: tuple[int, int], keep: int | str = 0):
    """Reduce an operator on C^d ⊗ C^d' to one factor.

    ``keep`` is 0/"A" for the left factor or 1/"B" for the right one. A
    :class:`DensityMatrix` input gives a :class:`DensityMatrix` back; raw arrays
    give arrays.
    """
    keep_idx = {"A": 0, "B": 1, 0: 0, 1: 1}.get(keep)
    if keep_idx is None:
        raise ValueError(f"keep must be 0, 1, 'A' or 'B', got {keep!r}")
    d_a, d_b = dims
    m = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho)
    if m.shape != (d_a * d_b, d_a * d_b):
        raise DimensionMismatch(f"operator of shape {m.shape} does not act on {d_a}x{d_b}")
    t = m.reshape(d_a, d_b, d_a, d_b)
    out = np.einsum("ijkj->ik", t) if keep_idx == 0 else np.einsum("ijil->jl", t)
    return DensityMatrix(out) if isinstance(rho, DensityMatrix) else out


def rng(seed: Seed, *stream: int) -> np.random.Generator:
    """Counter-based (Philox) generator for ``seed``; ``stream`` selects an
    independent substream. Existing generators are passed through."""
    if isinstance(seed, np.random.Generator):
        return seed
    seq = np.random.SeedSequence(int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in stream))
    return np.random.Generator(np.random.Philox(seq))


def taylor_exp(a, t: float, terms: int = 30) -> np.ndarray:
    """exp(-i t A) by a truncated power series, with scaling and squaring once
    the Frobenius norm of tA exceeds 2. Reference oracle only; it never
    diagonalizes."""
    m = -1j * t * np.asarray(a.entries if hasattr(a, "entries") else a, dtype=np.complex128)
    size = np.linalg.norm(m)
    squarings = int(np.ceil(np.log2(size / 2.0))) if size > 2.0 else 0
    m = m / 2.0**squarings
    out = np.eye(m.shape[0], dtype=np.complex128)
    term = out.copy()
    for k in range(1, terms):
        term = term @ m / k
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


def _complex_gaussian(gen: np.random.Generator, shape) -> np.ndarray:
    return gen.standard_normal(shape) + 1j * gen.standard_normal(shape)


def haar_random_state(dim: int, seed: Seed) -> StateVector:
    if dim < 1:
        raise ValueError("dim must be positive")
    return normalized(_complex_gaussian(rng(seed), dim))


def random_hermitian(dim: int, seed: Seed, norm: float = 1.0) -> HermitianOperator:
    """GUE-style sample rescaled to the requested operator norm."""
    g = _complex_gaussian(rng(seed), (dim, dim))
    h = 0.5 * (g + g.conj().T)
    h *= norm / np.max(np.abs(np.linalg.eigvalsh(h)))
    return HermitianOperator(h)


def random_unitary(dim: int, seed: Seed) -> np.ndarray:
    q, r = np.linalg.qr(_complex_gaussian(rng(seed), (dim, dim)))
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_projector(dim: int, rank: int, seed: Seed) -> Projector:
    cols = random_unitary(dim, seed)[:, :rank]
    return Projector(cols @ cols.conj().T)


PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)
