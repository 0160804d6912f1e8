"""Experiment runner behind the ``zenolab`` command line.

Every experiment turns an :class:`ExperimentConfig` into a list of flat rows
with the columns in :data:`COLUMNS`; experiment-specific values go into the
``extra`` mapping, which is written as a JSON string in CSV output.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import traceback
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

import numpy as np

from .core import (
    PAULI_X,
    HermitianOperator,
    basis_state,
    haar_random_state,
    matrix_exp_hermitian,
    operator_norm,
    random_hermitian,
    random_projector,
    random_unitary,
    rng,
    StateVector,
    taylor_exp,
)
from .dilation import DilationSetup, ancilla_mixture, build_dilation, decoherence_check, dephased
from .errors import ConfigInvalid, ZenoError
from .physics import (
    TwoLevelDecayModel,
    chain_as_zeno,
    chain_transmission,
    chain_zeno_survival,
    fixed_basis_transfer,
    steered_mutation_probability,
    survival_closed_form,
    survival_under_repeated_measurement,
)
from .zeno import (
    convergence_sweep,
    inverse_zeno_run,
    loglog_slope,
    rotation_hamiltonian,
    short_time_bound,
    short_time_deficit,
    short_time_fidelity,
)

EXPERIMENTS = ("a1-oracle", "inverse-zeno", "eq1-scaling", "dilation", "polarizer", "two-level")
HAMILTONIANS = ("zero", "pauli-x", "random-normalized")
FORMATS = ("csv", "json")
COLUMNS = (
    "experiment", "dim", "N", "seed", "fidelity", "survival",
    "deficit", "analytic_bound", "slope", "extra",
)
SEED_ENV = "ZENOLAB_SEED"

_POW2 = lambda lo, hi: [2**k for k in range(lo, hi + 1)]  # noqa: E731
DEFAULT_N_LIST = {
    "a1-oracle": [1000],
    "inverse-zeno": _POW2(3, 11),
    "eq1-scaling": _POW2(2, 12),
    "dilation": list(range(1, 13)),
    "polarizer": _POW2(0, 9),
    "two-level": _POW2(0, 8),
}
TAYLOR_CHECKS = 50
TWO_LEVEL_TIME = 1.0


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    dim: int = 2
    n_list: tuple[int, ...] = ()
    seed: int = 0
    lam: float = math.pi / 2
    hamiltonian: Optional[str] = None
    states: Optional[str] = None
    format: str = "csv"
    out: Optional[str] = None

    def resolved(self) -> ExperimentConfig:
        """Fill experiment-dependent defaults and validate."""
        cfg = self
        if not cfg.n_list:
            cfg = replace(cfg, n_list=tuple(DEFAULT_N_LIST.get(cfg.experiment, ())))
        if cfg.hamiltonian is None:
            default = "pauli-x" if cfg.dim == 2 and cfg.experiment == "inverse-zeno" else "random-normalized"
            cfg = replace(cfg, hamiltonian=default)
        if cfg.states is None:
            cfg = replace(cfg, states="random" if cfg.hamiltonian == "random-normalized" else "basis")
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigInvalid(f"unknown experiment {self.experiment!r}")
        if self.hamiltonian not in HAMILTONIANS:
            raise ConfigInvalid(f"unknown hamiltonian {self.hamiltonian!r}")
        if self.states not in ("basis", "random"):
            raise ConfigInvalid(f"states must be 'basis' or 'random', got {self.states!r}")
        if self.format not in FORMATS:
            raise ConfigInvalid(f"unknown format {self.format!r}")
        ns = self.n_list
        if not ns or any(n < 1 for n in ns) or any(b <= a for a, b in zip(ns, ns[1:])):
            raise ConfigInvalid(f"n-list must be strictly increasing positive integers: {list(ns)}")
        min_dim = 1 if self.experiment == "a1-oracle" else 2
        if self.dim < min_dim:
            raise ConfigInvalid(f"{self.experiment} needs dim >= {min_dim}, got {self.dim}")
        if self.experiment in ("polarizer", "two-level") and self.dim != 2:
            raise ConfigInvalid(f"{self.experiment} is two-dimensional; got --dim {self.dim}")
        if self.hamiltonian == "pauli-x" and self.dim != 2 and self.experiment in ("inverse-zeno", "eq1-scaling"):
            raise ConfigInvalid("pauli-x hamiltonian needs --dim 2")
        if not self.lam > 0:
            raise ConfigInvalid(f"lambda must be positive, got {self.lam!r}")
        if not 0 <= self.seed < 2**64:
            raise ConfigInvalid(f"seed must be a 64-bit unsigned integer, got {self.seed}")


def _row(cfg: ExperimentConfig, N: int, **values) -> dict:
    row = {c: None for c in COLUMNS}
    row.update(experiment=cfg.experiment, dim=cfg.dim, N=int(N), seed=int(cfg.seed), extra={})
    row.update(values)
    return row


def _pairs(v: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v).ravel()]


def _hamiltonian(cfg: ExperimentConfig) -> HermitianOperator:
    if cfg.hamiltonian == "zero":
        return HermitianOperator(np.zeros((cfg.dim, cfg.dim)))
    if cfg.hamiltonian == "pauli-x":
        return HermitianOperator(PAULI_X)
    return random_hermitian(cfg.dim, rng(cfg.seed, 0))


def _states(cfg: ExperimentConfig) -> tuple[StateVector, StateVector]:
    if cfg.states == "basis":
        return basis_state(cfg.dim, 0), basis_state(cfg.dim, 1)
    gen = rng(cfg.seed, 1)
    return haar_random_state(cfg.dim, gen), haar_random_state(cfg.dim, gen)


def _a1_oracle(cfg):
    rows = []
    for N in cfg.n_list:
        gen = rng(cfg.seed, 2, N)
        worst = dict(residual=0.0, taylor_diff=0.0, cos_error=0.0, norm_excess=-math.inf)
        min_fid = 1.0
        for i in range(N):
            phi, psi = haar_random_state(cfg.dim, gen), haar_random_state(cfg.dim, gen)
            rd = rotation_hamiltonian(phi, psi)
            U = matrix_exp_hermitian(rd.K, 1.0).entries
            out = U @ phi.amplitudes
            worst["residual"] = max(worst["residual"], float(np.linalg.norm(out - psi.amplitudes)))
            min_fid = min(min_fid, float(abs(np.vdot(psi.amplitudes, out)) ** 2))
            cos_err = abs(math.cos(rd.theta) - abs(np.vdot(phi.amplitudes, psi.amplitudes)))
            worst["cos_error"] = max(worst["cos_error"], cos_err)
            excess = operator_norm(rd.K) - (rd.theta + rd.delta)
            worst["norm_excess"] = max(worst["norm_excess"], excess)
            if i < TAYLOR_CHECKS:
                diff = float(np.max(np.abs(taylor_exp(rd.K, 1.0) - U)))
                worst["taylor_diff"] = max(worst["taylor_diff"], diff)
        worst["pairs"] = N
        worst["taylor_checked"] = min(N, TAYLOR_CHECKS)
        rows.append(_row(cfg, N, fidelity=min_fid, deficit=1.0 - min_fid, extra=worst))
    return rows


def _inverse_zeno(cfg):
    H = _hamiltonian(cfg)
    phi, psi = _states(cfg)
    sweep = convergence_sweep(H, phi, psi, cfg.n_list, seed=cfg.seed)
    rows = []
    for r in sweep.rows:
        extra = {
            "M": r.M,
            "K_norm": r.K_norm,
            "bound_applies": r.bound_applies,
            "neg_log_fidelity": -math.log(r.final_fidelity) if r.final_fidelity > 0 else None,
            "final_state": _pairs(r.final_state),
            "per_step_overlaps": _pairs(r.per_step_overlaps),
            "hamiltonian": cfg.hamiltonian,
            "states": cfg.states,
        }
        rows.append(_row(
            cfg, r.N, fidelity=r.final_fidelity, survival=r.survival_probability,
            deficit=r.deficit, analytic_bound=r.analytic_bound, slope=sweep.slope, extra=extra,
        ))
    return rows


def _eq1_scaling(cfg):
    H = _hamiltonian(cfg)
    K = random_hermitian(cfg.dim, rng(cfg.seed, 3))
    phi = haar_random_state(cfg.dim, rng(cfg.seed, 4))
    M, k_norm = operator_norm(H), operator_norm(K)
    deficits = [short_time_deficit(H, K, phi, N) for N in cfg.n_list]
    slope = loglog_slope(cfg.n_list, deficits)
    rows = []
    for N, deficit in zip(cfg.n_list, deficits):
        rows.append(_row(
            cfg, N, fidelity=short_time_fidelity(H, K, phi, N), deficit=deficit,
            analytic_bound=short_time_bound(M, k_norm, N), slope=slope,
            extra={"M": M, "K_norm": k_norm, "hamiltonian": cfg.hamiltonian},
        ))
    return rows


def random_dilation_setup(dim: int, seed: int, index: int) -> DilationSetup:
    """Seeded random setup: ancilla dims alternate 2/3 and s cycles 0.1, 1, 10."""
    gen = rng(seed, 5, index)
    ancilla = 2 + index % 2
    rank = int(gen.integers(1, dim)) if dim > 1 else 1
    P = random_projector(dim, rank, gen)
    phi = haar_random_state(dim, gen)
    basis = random_unitary(ancilla, gen)
    psi0 = haar_random_state(ancilla, gen)
    return DilationSetup(
        P, phi, StateVector(basis[:, 0]), StateVector(basis[:, 1]), psi0,
        s=(0.1, 1.0, 10.0)[index % 3],
    )


def _dilation(cfg):
    rows = []
    for N in cfg.n_list:
        setup = random_dilation_setup(cfg.dim, cfg.seed, N)
        res = build_dilation(setup)
        kept = setup.P.entries @ setup.phi.amplitudes
        p_kept = float(np.vdot(kept, kept).real)
        fid = float(abs(np.vdot(res.target, res.joint_out.amplitudes)) ** 2)
        purity = res.rho_system.purity()
        extra = {
            "ancilla_dim": setup.psi1.dim,
            "s": setup.s,
            "rank": setup.P.rank,
            "L_norm": operator_norm(res.L),
            "joint_residual": float(np.linalg.norm(res.joint_out.amplitudes - res.target)),
            "rho_system_error": float(np.max(np.abs(res.rho_system.entries - dephased(setup.P, setup.phi)))),
            "rho_ancilla_error": float(np.max(np.abs(res.rho_ancilla.entries - ancilla_mixture(setup)))),
            "coherence_norm": decoherence_check(res, setup.P),
            "purity": purity,
            "purity_error": abs(purity - (p_kept**2 + (1.0 - p_kept) ** 2)),
        }
        rows.append(_row(cfg, N, fidelity=fid, survival=p_kept, deficit=1.0 - fid, extra=extra))
    return rows


def _polarizer(cfg):
    rows = []
    transmissions = [chain_transmission(chain_as_zeno(N)) for N in cfg.n_list]
    slope = loglog_slope(cfg.n_list, [1.0 - t for t in transmissions])
    zero = HermitianOperator(np.zeros((2, 2)))
    for N, trans in zip(cfg.n_list, transmissions):
        run = inverse_zeno_run(zero, basis_state(2, 0), basis_state(2, 1), N)
        closed = math.cos(math.pi / (2 * N)) ** (2 * N)
        extra = {
            "zeno_survival": run.survival_probability,
            "closed_form": closed,
            "zeno_abs_diff": abs(trans - chain_zeno_survival(N)),
        }
        rows.append(_row(
            cfg, N, fidelity=run.final_fidelity, survival=trans, deficit=1.0 - trans,
            analytic_bound=run.analytic_bound, slope=slope, extra=extra,
        ))
    return rows


def _two_level(cfg):
    model = TwoLevelDecayModel(cfg.lam)
    T = TWO_LEVEL_TIME
    steered = [steered_mutation_probability(model, N, T) for N in cfg.n_list]
    slope = loglog_slope(cfg.n_list, [1.0 - f for f in steered])
    H = HermitianOperator(T * cfg.lam * PAULI_X)
    rows = []
    for N, fid in zip(cfg.n_list, steered):
        run = inverse_zeno_run(H, basis_state(2, 0), basis_state(2, 1), N)
        extra = {
            "lambda": cfg.lam,
            "T": T,
            "fixed_basis_transfer": fixed_basis_transfer(model, T, N),
            "closed_form_survival": survival_closed_form(cfg.lam, T, N),
        }
        rows.append(_row(
            cfg, N, fidelity=fid, survival=survival_under_repeated_measurement(model, T, N),
            deficit=1.0 - fid, analytic_bound=run.analytic_bound, slope=slope, extra=extra,
        ))
    return rows


_RUNNERS = {
    "a1-oracle": _a1_oracle,
    "inverse-zeno": _inverse_zeno,
    "eq1-scaling": _eq1_scaling,
    "dilation": _dilation,
    "polarizer": _polarizer,
    "two-level": _two_level,
}


def run_experiment(cfg: ExperimentConfig) -> list[dict]:
    cfg = cfg.resolved()
    rows = _RUNNERS[cfg.experiment](cfg)
    return sorted(rows, key=lambda r: (r["experiment"], r["dim"], r["N"], r["seed"]))


# --- serialization ---------------------------------------------------------


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.16e}"


def _clean(obj):
    """Plain-Python copy with non-finite floats replaced by None."""
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    return obj


def to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        cells = [_num(row[c]) for c in COLUMNS[:-1]]
        cells.append(json.dumps(_clean(row["extra"]), sort_keys=True, allow_nan=False))
        writer.writerow(cells)
    return buf.getvalue()


def to_json(rows: list[dict]) -> str:
    return json.dumps([_clean(r) for r in rows], indent=2, allow_nan=False) + "\n"


def serialize(rows: list[dict], fmt: str) -> str:
    return to_csv(rows) if fmt == "csv" else to_json(rows)


# --- configuration -----------------------------------------------------------


def parse_n_list(text: str) -> tuple[int, ...]:
    """Comma-separated integers. An ellipsis item ("..." or "…") continues the
    progression set by the two preceding items up to the following item:
    geometric when their ratio is an integer, arithmetic otherwise."""
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    out: list[int] = []
    pending = False
    try:
        for item in items:
            if item in ("...", "…"):
                pending = True
                continue
            value = int(item)
            if pending:
                if len(out) < 2:
                    raise ConfigInvalid("an ellipsis needs two preceding values")
                a, b = out[-2], out[-1]
                if a > 0 and b % a == 0 and b // a > 1:
                    step = lambda x, r=b // a: x * r  # noqa: E731
                else:
                    step = lambda x, d=b - a: x + d  # noqa: E731
                if b - a <= 0:
                    raise ConfigInvalid("an ellipsis needs an increasing progression")
                nxt = step(b)
                while nxt < value:
                    out.append(nxt)
                    nxt = step(nxt)
                pending = False
            out.append(value)
    except ValueError as exc:
        raise ConfigInvalid(f"bad n-list {text!r}: {exc}") from None
    if pending:
        raise ConfigInvalid("n-list cannot end with an ellipsis")
    return tuple(out)


_FILE_KEYS = {
    "dim": int,
    "n-list": parse_n_list,
    "seed": int,
    "lambda": float,
    "hamiltonian": str,
    "states": str,
    "format": str,
    "out": str,
}


def read_config_file(path: str | Path) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys use the flag spelling."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigInvalid(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("_", "-")
        if key not in _FILE_KEYS:
            raise ConfigInvalid(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = _FILE_KEYS[key](value)
        except ValueError as exc:
            raise ConfigInvalid(f"{path}:{lineno}: {exc}") from None
    return values


def build_config(experiment: str, flags: dict, config_path: Optional[str] = None,
                 environ=os.environ) -> ExperimentConfig:
    """Merge flags over the config file over defaults. ``flags`` maps flag
    names (``n-list`` etc.) to values, with None meaning "not given"."""
    merged: dict = {}
    env_seed = environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            merged["seed"] = int(env_seed)
        except ValueError:
            raise ConfigInvalid(f"{SEED_ENV} must be an integer, got {env_seed!r}") from None
    if config_path:
        merged.update(read_config_file(config_path))
    merged.update({k: v for k, v in flags.items() if v is not None})
    kwargs = {"experiment": experiment}
    names = {"n-list": "n_list", "lambda": "lam"}
    for key, value in merged.items():
        kwargs[names.get(key, key)] = value
    return ExperimentConfig(**kwargs)


def error_record(exc: BaseException) -> dict:
    """Machine-readable description of a failure, naming the library operation
    that raised it."""
    operation = None
    for frame in traceback.extract_tb(exc.__traceback__):
        module = Path(frame.filename).stem
        if "zenolab" in frame.filename and module not in ("harness", "cli"):
            operation = f"{module}.{frame.name}"
            break
    if operation is None and isinstance(exc, ConfigInvalid):
        operation = "config"
    return {
        "error": type(exc).__name__,
        "operation": operation,
        "message": str(exc),
    }


__all__ = [
    "COLUMNS",
    "EXPERIMENTS",
    "ExperimentConfig",
    "ZenoError",
    "build_config",
    "error_record",
    "parse_n_list",
    "read_config_file",
    "run_experiment",
    "serialize",
    "to_csv",
    "to_json",
]
