"""Orchestration behind the CLI subcommands.

Everything here is importable and deterministic: the CLI is a thin argv
wrapper, and the test suite drives these functions directly.
"""

import dataclasses
import json
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import classical as cl
from .config import InitialSpec, RunConfig
from .errors import ConfigError
from .friction import (
    FrictionKind,
    hermitian_friction_pair,
    nonhermitian_friction_pair,
    bernoulli_series_friction,
    nonhermitian_friction_closed_form,
    sylvester_solve,
)
from .linalg import commutator, frobenius
from .liouvillian import (
    DEFAULT_CHOI_DT,
    ModelKind,
    build_liouvillian,
    lindblad_region_check,
    qome_mapping,
)
from .oscillator import (
    OscillatorModel,
    TOP_LEVEL_POPULATION_WARN,
    energies,
    gibbs_state,
    hamiltonian,
    momentum_matrix,
    position_matrix,
    potential_gradient,
)
from .propagate import Trajectory, evolve, gibbs_initial, mixed_power_law, pure_level
from .reporting import write_csv
from .thermo import ThermoDiagnostics, ThermoRecord

QUANTUM_HEADER = list(ThermoRecord.FIELDS)

LINDBLAD_HEADER = [
    "xi",
    "beta_p",
    "beta_q",
    "D_pp",
    "D_qq",
    "lambda",
    "mu",
    "x",
    "x1",
    "x2",
    "cond1",
    "cond2",
    "cond3",
    "choi_min_eig",
]

CLASSICAL_HEADER = [
    "t",
    "mean_E",
    "mean_p2_over_m",
    "mean_mw2q2",
    "first_law_residual",
    "stderr_E",
    "stderr_p2_over_m",
    "stderr_mw2q2",
    "stderr_first_law",
]

SWEEP_MODELS = [
    ModelKind.FULL_HERMITIAN.value,
    ModelKind.FULL_NONHERMITIAN.value,
    ModelKind.MOMENTUM_HERMITIAN.value,
    ModelKind.MOMENTUM_NONHERMITIAN.value,
    ModelKind.CALDEIRA_LEGGETT.value,
]


def initial_state(spec: InitialSpec, model: OscillatorModel) -> np.ndarray:
    if spec.kind == "mixed-power-law":
        return mixed_power_law(model.dim, spec.f)
    if spec.kind == "pure-level":
        return pure_level(model.dim, spec.s)
    return gibbs_initial(model)


def qome_pair(cfg: RunConfig, model: OscillatorModel) -> tuple[float | None, float | None]:
    if cfg.kind is not ModelKind.QOME:
        return None, None
    if cfg.gamma0 is not None and cfg.nbar is not None:
        return cfg.gamma0, cfg.nbar
    return qome_mapping(model)


@dataclass
class QuantumRunResult:
    config: RunConfig
    model: OscillatorModel
    trajectory: Trajectory
    records: list[ThermoRecord]
    summary: dict


def run_quantum(cfg: RunConfig) -> QuantumRunResult:
    model = cfg.oscillator()
    kind = cfg.kind
    gamma0, nbar = qome_pair(cfg, model)
    liou = build_liouvillian(model, kind, gamma0=gamma0, nbar=nbar)
    rho0 = initial_state(cfg.initial, model)
    traj = evolve(liou, rho0, cfg.dt, cfg.steps)
    top = max(float(np.real(rho[-1, -1])) for rho in traj.states)
    if top > TOP_LEVEL_POPULATION_WARN:
        warnings.warn(
            f"top-level population reached {top:.3e}; truncation dim={model.dim} "
            "is no longer negligible",
            stacklevel=2,
        )
    diag = ThermoDiagnostics(model, kind, liou)
    records = diag.records(traj)
    target = float(np.real(np.trace(gibbs_state(model) @ hamiltonian(model))))
    summary = {
        "final_energy": records[-1].energy,
        "target_energy": target,
        "max_negative_dsp": max(0.0, -min(r.dsp_dt for r in records)),
        "negative_eigenvalue_steps": sum(1 for r in records if r.neg_count > 0),
        "max_trace_error": traj.max_trace_error,
        "max_hermitian_correction": traj.max_hermitian_correction,
        "top_level_population": top,
    }
    return QuantumRunResult(
        config=cfg, model=model, trajectory=traj, records=records, summary=summary
    )


def quantum_rows(result: QuantumRunResult) -> list[tuple]:
    return [r.row() for r in result.records]


def write_quantum_csv(result: QuantumRunResult, path: str) -> None:
    write_csv(
        path,
        QUANTUM_HEADER,
        quantum_rows(result),
        config=result.config.effective_dict(),
        precision=result.config.emit_precision,
    )


def print_summary(summary: dict, stream=None) -> None:
    import sys

    stream = stream or sys.stdout
    for key in (
        "final_energy",
        "target_energy",
        "max_negative_dsp",
        "negative_eigenvalue_steps",
        "max_trace_error",
    ):
        print(f"{key} = {summary[key]:.12g}", file=stream)


def grid_values(cfg: RunConfig):
    grid = cfg.grid or {}
    beta_p = grid.get("beta_p_values", [0.05, 0.1, 0.2, 1.0, 4.0])
    beta_q = grid.get("beta_q_values", [0.05, 0.1, 0.2, 1.0, 4.0])
    xis = grid.get("xi_values", [0.25, 0.5, 1.0, 2.0])
    dt = grid.get("choi_dt", DEFAULT_CHOI_DT)
    return beta_p, beta_q, xis, dt


def run_lindblad_grid(cfg: RunConfig, include_choi: bool = True):
    """LindbladReport rows over the (beta_p, beta_q, xi) grid plus the two
    boundary lines Y = x1 X and Y = x2 X for plotting."""
    kind = cfg.kind
    if kind in (ModelKind.UNITARY, ModelKind.QOME):
        raise ConfigError("lindblad-check needs a friction-operator model kind")
    beta_p_vals, beta_q_vals, xis, dt = grid_values(cfg)
    rows = []
    for xi in xis:
        temperature = cfg.hbar * cfg.omega / (2.0 * cfg.kb * xi)
        for bp in beta_p_vals:
            for bq in beta_q_vals:
                model = OscillatorModel(
                    mass=cfg.mass,
                    omega=cfg.omega,
                    hbar=cfg.hbar,
                    kb=cfg.kb,
                    temperature=temperature,
                    beta_p=bp,
                    beta_q=bq,
                    dim=cfg.dim,
                )
                rep = lindblad_region_check(model, kind, dt=dt, include_choi=include_choi)
                rows.append(
                    (
                        rep.xi,
                        rep.beta_p,
                        rep.beta_q,
                        rep.d_pp,
                        rep.d_qq,
                        rep.lam,
                        rep.mu,
                        rep.x,
                        rep.x1,
                        rep.x2,
                        rep.cond1,
                        rep.cond2,
                        rep.cond3,
                        rep.choi_min_eigenvalue if rep.choi_min_eigenvalue is not None else math.nan,
                    )
                )
    boundary = []
    samples = (cfg.grid or {}).get("boundary_samples", 50)
    for xi in xis:
        x1 = math.tanh(0.5 * xi) ** 2
        x2 = 1.0 / x1
        xmax = max(beta_q_vals) * cfg.mass**2 * cfg.omega**2
        for x_axis in np.linspace(0.0, xmax, samples):
            boundary.append((xi, x_axis, x1 * x_axis, x2 * x_axis))
    return rows, boundary


def run_qome_compare(cfg: RunConfig) -> dict:
    model = cfg.oscillator()
    gamma0, nbar = qome_mapping(model)
    l_qome = build_liouvillian(model, ModelKind.QOME, gamma0=gamma0, nbar=nbar)
    l_full = build_liouvillian(model, ModelKind.FULL_HERMITIAN)
    dist = frobenius(l_qome - l_full)
    return {
        "gamma0": gamma0,
        "nbar": nbar,
        "frobenius_distance": dist,
        "relative_distance": dist / frobenius(l_full),
        "generator_norm": frobenius(l_full),
    }


def required_burn_in_steps(params: cl.ClassicalParams) -> int:
    """ceil(10 / min active dissipation rate / dt); zero without dissipation."""
    rates = [r for r in (params.beta_p, params.beta_q_rate) if r > 0]
    if not rates:
        return 0
    return int(math.ceil(10.0 / min(rates) / params.dt))


def classical_params(cfg: RunConfig) -> tuple[cl.ClassicalParams, int, int]:
    section = cfg.classical
    params = cl.ClassicalParams(
        mass=cfg.mass,
        omega=cfg.omega,
        kb=cfg.kb,
        temperature=cfg.temperature,
        beta_p=cfg.beta_p,
        beta_q=cfg.beta_q,
        force=cfg.force,
        dt=section["dt"],
        n_steps=section["n_steps"],
        n_trajectories=section["n_trajectories"],
        rng_seed=cfg.rng_seed,
    )
    burn = section.get("burn_in_steps")
    if burn is None:
        burn = required_burn_in_steps(params)
    params = dataclasses.replace(params, n_steps=params.n_steps + burn)
    return params, burn, section["n_windows"]


def run_classical(cfg: RunConfig):
    params, burn, n_windows = classical_params(cfg)
    run = cl.simulate_ensemble(params, initial="equilibrium", burn_in_steps=burn)
    stationary = cl.stationary_check(run)
    balance = cl.energy_balance_check(run, n_windows=n_windows)
    rhs = cl.energy_balance_rhs(run)
    edges = np.linspace(0, params.n_steps, n_windows + 1).astype(int)
    rows = []
    for k in range(n_windows):
        lo, hi = edges[k], edges[k + 1]
        mid = (lo + hi) // 2
        rows.append(
            (
                run.times[mid],
                run.mean_E[mid],
                run.mean_p2_over_m[mid],
                run.mean_mw2q2[mid],
                balance.window_residuals[k],
                run.sem_E[mid],
                run.sem_p2_over_m[mid],
                run.sem_mw2q2[mid],
                balance.stderr,
            )
        )
    return run, rows, stationary, balance


def sweep_cells(cfg: RunConfig, axis: str, values=None) -> list[tuple[str, RunConfig]]:
    if axis == "model":
        values = values or SWEEP_MODELS
        return [(str(v), cfg.replace(model=str(v))) for v in values]
    if axis == "f":
        values = values or [1.0, 2.0, 3.0, 4.0]
        return [
            (f"f{float(v):g}", cfg.replace(initial=InitialSpec("mixed-power-law", f=float(v))))
            for v in values
        ]
    if axis == "s":
        values = values or [1, 2, 3, 4]
        return [
            (f"s{int(v)}", cfg.replace(initial=InitialSpec("pure-level", s=int(v))))
            for v in values
        ]
    raise ConfigError(f"sweep axis must be one of model/f/s, got {axis!r}")


def run_sweep(cfg: RunConfig, out_dir: str, axis: str, values=None, jobs: int = 4, plot=None):
    """One quantum run per axis value; any cell failure is recorded in the
    manifest instead of aborting the sweep."""
    cells = sweep_cells(cfg, axis, values)
    os.makedirs(out_dir, exist_ok=True)

    def one(cell):
        label, cell_cfg = cell
        path = os.path.join(out_dir, f"quantum_run_{axis}_{label}.csv")
        entry = {"value": label, "digest": cell_cfg.digest(), "csv": os.path.basename(path), "error": None}
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                result = run_quantum(cell_cfg)
            write_quantum_csv(result, path)
            if plot is not None:
                plot(result, os.path.splitext(path)[0] + ".png")
        except Exception as exc:  # recorded per cell, reported via exit code
            entry["error"] = f"{type(exc).__name__}: {exc}"
        return entry

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        entries = list(pool.map(one, cells))
    manifest = {
        "axis": axis,
        "base_digest": cfg.digest(),
        "cells": entries,
        "failures": sum(1 for e in entries if e["error"]),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


FRICTION_OPERATORS = ("theta_p", "theta_q", "xi_p", "xi_q")
FRICTION_ROUTES = ("spectral", "sylvester", "bernoulli", "closed-form")


def friction_operator(cfg: RunConfig, operator: str, route: str = "spectral") -> np.ndarray:
    """Build the requested friction operator by the requested route."""
    if operator not in FRICTION_OPERATORS:
        raise ConfigError(f"operator must be one of {FRICTION_OPERATORS}")
    if route not in FRICTION_ROUTES:
        raise ConfigError(f"route must be one of {FRICTION_ROUTES}")
    model = cfg.oscillator()
    e = energies(model)
    q = position_matrix(model)
    p = momentum_matrix(model)
    base_p = p
    base_q = model.mass * potential_gradient(model)
    kt = model.kt
    hermitian = operator.startswith("theta")
    momentum = operator.endswith("_p")
    if hermitian:
        if route == "spectral":
            pair = hermitian_friction_pair(model)
            return pair[0] if momentum else pair[1]
        if route == "sylvester":
            g = np.diag(np.exp(-(e - e.mean()) / kt))
            sign = 1.0 if momentum else -1.0
            c = sign * (2j * model.mass * kt / model.hbar) * commutator(q if momentum else p, g)
            return sylvester_solve(g, c)
        if route == "bernoulli":
            return bernoulli_series_friction(e, base_p if momentum else base_q, kt, order=8)
        raise ConfigError("closed-form applies to the non-Hermitian operators only")
    if route == "spectral":
        pair = nonhermitian_friction_pair(model)
        return pair[0] if momentum else pair[1]
    if route == "closed-form":
        kind = FrictionKind.MOMENTUM if momentum else FrictionKind.POSITION
        partner = q if momentum else p
        return nonhermitian_friction_closed_form(e, partner, kt, kind, model.mass, model.hbar)
    raise ConfigError(f"route {route!r} applies to the Hermitian operators only")


def friction_csv(matrix: np.ndarray, path: str, cfg: RunConfig, extra: dict | None = None) -> None:
    """Write a complex matrix as interleaved re/im columns, one row per matrix row."""
    d = matrix.shape[0]
    header = []
    for j in range(d):
        header += [f"re_{j}", f"im_{j}"]
    rows = []
    for i in range(d):
        row = []
        for j in range(d):
            row += [matrix[i, j].real, matrix[i, j].imag]
        rows.append(tuple(row))
    config = cfg.effective_dict()
    if extra:
        config = {**config, **extra}
    write_csv(path, header, rows, config=config, precision=cfg.emit_precision)
