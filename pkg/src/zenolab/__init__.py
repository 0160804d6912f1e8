"""Finite-dimensional inverse quantum Zeno toolkit."""

from .core import (
    DensityMatrix,
    HermitianOperator,
    Projector,
    StateVector,
    UnitaryMatrix,
    basis_state,
    haar_random_state,
    inner_product,
    matrix_exp_hermitian,
    normalized,
    operator_norm,
    partial_trace,
    random_hermitian,
    rng,
    tensor_product,
)
from .dilation import DilationResult, DilationSetup, build_dilation, decoherence_check
from .errors import ZenoError
from .physics import (
    PolarizerChain,
    TwoLevelDecayModel,
    chain_as_zeno,
    chain_transmission,
    steered_mutation_probability,
    survival_under_repeated_measurement,
)
from .zeno import (
    RotationDecomposition,
    ZenoRunResult,
    ZenoSchedule,
    convergence_sweep,
    interpolating_state,
    inverse_zeno_run,
    rotation_hamiltonian,
    short_time_fidelity,
    zeno_schedule,
)

__version__ = "0.1.0"
