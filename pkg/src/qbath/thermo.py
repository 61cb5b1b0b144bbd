"""Thermodynamic functionals along a density-matrix trajectory.

All rates are exact trace formulas evaluated at each stored state, never
finite differences of the time series: the derivations give closed trace
expressions, and differencing would confuse regularization effects at pure
states.  A central-difference cross-check of the entropy rate is provided as
a diagnostic with a loose tolerance.

Eigenvalues are floored at ``LOG_CLAMP`` inside logarithms only; the true
eigenvalues always multiply from outside, so pure states have exactly zero
entropy while states with genuinely negative eigenvalues (the
momentum-only models) produce the spiky regularized rates they are known
for.  Steps where any eigenvalue sat below the floor are flagged, not
rejected.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .linalg import LOG_CLAMP, commutator, devec, hermitize, vec
from .liouvillian import ModelKind, build_liouvillian
from .oscillator import (
    OscillatorModel,
    energies,
    gibbs_state,
    hamiltonian,
    log_partition_function,
    momentum_matrix,
    position_matrix,
    potential_gradient,
)
from .propagate import NEG_EIG_THRESHOLD


def clamped_log(w: np.ndarray, clamp: float = LOG_CLAMP) -> np.ndarray:
    return np.log(np.maximum(w, clamp))


def von_neumann_entropy(rho: np.ndarray, kb: float = 1.0, clamp: float = LOG_CLAMP) -> float:
    """-kB Tr(rho ln rho) with the log eigenvalues floored at ``clamp``."""
    w = np.linalg.eigvalsh(hermitize(rho))
    return float(-kb * np.sum(w * clamped_log(w, clamp)))


def relative_entropy(rho1: np.ndarray, rho2: np.ndarray, clamp: float = LOG_CLAMP) -> float:
    """Tr(rho1 ln rho1 - rho1 ln rho2); non-negative, zero iff the states match.

    ``rho2`` must be full rank (the Gibbs state always is); ``rho1``
    eigenvalues are floored at ``clamp`` inside the log.
    """
    w1, v1 = np.linalg.eigh(hermitize(rho1))
    term1 = float(np.sum(w1 * clamped_log(w1, clamp)))
    w2, v2 = np.linalg.eigh(hermitize(rho2))
    log2 = (v2 * clamped_log(w2, clamp)) @ v2.conj().T
    term2 = float(np.real(np.trace(hermitize(rho1) @ log2)))
    return term1 - term2


def _hamiltonian_part(model: OscillatorModel, h0: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return (-1j / model.hbar) * commutator(h0, rho)


def _force_part(model: OscillatorModel, q: np.ndarray, rho: np.ndarray) -> np.ndarray:
    if model.force == 0.0:
        return np.zeros_like(rho)
    return (1j * model.force / model.hbar) * commutator(q, rho)


def dissipator_part(
    liou: np.ndarray, model: OscillatorModel, kind: ModelKind, rho: np.ndarray
) -> np.ndarray:
    """Friction-plus-noise part of the generator applied to rho.

    Subtracts the commutator flow and the force term from the full action of
    the generator; the result is traceless.
    """
    h0 = hamiltonian(model)
    q = position_matrix(model)
    full = devec(liou @ vec(rho))
    return full - _hamiltonian_part(model, h0, rho) - _force_part(model, q, rho)


def heat_rate(r_rho: np.ndarray, h0: np.ndarray) -> float:
    """Tr(R rho H0); the imaginary part is rounding only."""
    val = complex(np.trace(r_rho @ h0))
    assert abs(val.imag) <= 1e-11 * max(1.0, abs(val.real)), "heat rate not real"
    return val.real


def work_rate(model: OscillatorModel, rho: np.ndarray) -> float:
    """f <p> / m; zero without an external force."""
    if model.force == 0.0:
        return 0.0
    p = momentum_matrix(model)
    return model.force * float(np.real(np.trace(p @ rho))) / model.mass


class EntropyRates(NamedTuple):
    ds_dt: float
    dsp_dt: float
    dsf_dt: float


def entropy_rates(
    liou: np.ndarray,
    model: OscillatorModel,
    kind: ModelKind,
    rho: np.ndarray,
    rho_eq: np.ndarray,
    clamp: float = LOG_CLAMP,
) -> EntropyRates:
    """(dS/dt, dSp/dt, dSf/dt) from three independent trace formulas.

    dS/dt = -kB Tr(R rho ln rho); the production rate weighs R rho against
    ln rho_eq - ln rho; the flow rate is the heat rate over T.  The balance
    dS/dt = dSf/dt + dSp/dt then holds identically.  Eigenvalues below the
    clamp floor make the rates regularized rather than exact; callers can
    detect that through :func:`clamp_count`.
    """
    r_rho = dissipator_part(liou, model, kind, rho)
    h0 = hamiltonian(model)
    w, v = np.linalg.eigh(hermitize(rho))
    log_rho = (v * clamped_log(w, clamp)) @ v.conj().T
    weq, veq = np.linalg.eigh(hermitize(rho_eq))
    log_eq = (veq * clamped_log(weq, clamp)) @ veq.conj().T
    ds = -model.kb * float(np.real(np.trace(r_rho @ log_rho)))
    dsp = model.kb * float(np.real(np.trace(r_rho @ (log_eq - log_rho))))
    dsf = heat_rate(r_rho, h0) / model.temperature
    return EntropyRates(ds_dt=ds, dsp_dt=dsp, dsf_dt=dsf)


def clamp_count(rho: np.ndarray, clamp: float = LOG_CLAMP) -> int:
    """Number of eigenvalues regularized by the log floor."""
    w = np.linalg.eigvalsh(hermitize(rho))
    return int(np.sum(w < clamp))


def free_energy(rho: np.ndarray, rho_eq: np.ndarray, model: OscillatorModel) -> float:
    """kT Tr(rho ln rho - rho ln rho_eq) - kT ln Z_d.

    Equals E - T S and never drops below the equilibrium value -kT ln Z_d.
    """
    return model.kt * relative_entropy(rho, rho_eq) - model.kt * log_partition_function(model)


def equipartition_residuals(
    model: OscillatorModel,
    rho: np.ndarray,
    theta_p: np.ndarray,
    theta_q: np.ndarray,
) -> tuple[float, float]:
    """Residuals of the two equilibrium identities behind the heat rate.

    Kinetic channel:  kT/2 - Tr[rho (p Tp + Tp p)/2] / (2m).
    Potential channel: kT m Tr[rho V''] - Tr[rho (V' Tq + Tq V')/2], with
    V' = dV/dq (the extra mass factor lives inside the position-channel
    operator) and V'' = m w^2 for the oscillator.
    """
    p = momentum_matrix(model)
    vprime = potential_gradient(model)
    vsecond = model.mass * model.omega**2 * np.eye(model.dim)
    sym_p = 0.5 * (p @ theta_p + theta_p @ p)
    sym_q = 0.5 * (vprime @ theta_q + theta_q @ vprime)
    res_kin = 0.5 * model.kt - float(np.real(np.trace(rho @ sym_p))) / (2.0 * model.mass)
    res_pot = model.kt * model.mass * float(np.real(np.trace(rho @ vsecond))) - float(
        np.real(np.trace(rho @ sym_q))
    )
    return res_kin, res_pot


def first_law_residual(
    liou: np.ndarray, model: OscillatorModel, kind: ModelKind, rho: np.ndarray
) -> float:
    """|dE/dt - work rate - heat rate| with dE/dt = Tr(L(rho) H0)."""
    h0 = hamiltonian(model)
    de = float(np.real(np.trace(devec(liou @ vec(rho)) @ h0)))
    r_rho = dissipator_part(liou, model, kind, rho)
    return abs(de - work_rate(model, rho) - heat_rate(r_rho, h0))


def entropy_rate_fd_check(
    states: list[np.ndarray], dt: float, index: int, kb: float = 1.0
) -> float:
    """Central-difference dS/dt at ``index``; diagnostic only (~1e-4 accuracy)."""
    if not 1 <= index <= len(states) - 2:
        raise ValueError("index must have both neighbours")
    s_prev = von_neumann_entropy(states[index - 1], kb)
    s_next = von_neumann_entropy(states[index + 1], kb)
    return (s_next - s_prev) / (2.0 * dt)


@dataclass(frozen=True)
class ThermoRecord:
    """One time step of diagnostics, in the CSV column order."""

    t: float
    energy: float
    entropy: float
    ds_dt: float
    dsp_dt: float
    dsf_dt: float
    heat_rate: float
    work_rate: float
    free_energy: float
    rel_entropy: float
    min_eig: float
    neg_count: int
    purity: float
    trace_err: float
    clamped: int

    FIELDS = (
        "t",
        "energy",
        "entropy",
        "ds_dt",
        "dsp_dt",
        "dsf_dt",
        "heat_rate",
        "work_rate",
        "free_energy",
        "rel_entropy",
        "min_eig",
        "neg_count",
        "purity",
        "trace_err",
        "clamped",
    )

    def row(self) -> tuple:
        return tuple(getattr(self, name) for name in self.FIELDS)


class ThermoDiagnostics:
    """Precomputed context for producing ThermoRecords along one trajectory."""

    def __init__(self, model: OscillatorModel, kind: ModelKind, liou: np.ndarray):
        self.model = model
        self.kind = kind
        self.liou = liou
        self.h0 = hamiltonian(model)
        self.q = position_matrix(model)
        self.p = momentum_matrix(model)
        self.rho_eq = gibbs_state(model)
        self.log_z = log_partition_function(model)
        # ln rho_eq is exactly diagonal: -E_n/kT - ln Z.
        self._log_eq_diag = -energies(model) / model.kt - self.log_z

    def record(self, t: float, rho: np.ndarray) -> ThermoRecord:
        model = self.model
        rho = hermitize(rho)
        w, v = np.linalg.eigh(rho)
        logw = clamped_log(w)
        log_rho = (v * logw) @ v.conj().T
        log_eq = np.diag(self._log_eq_diag)

        energy = float(np.real(np.trace(rho @ self.h0)))
        entropy = float(-model.kb * np.sum(w * logw))
        r_rho = devec(self.liou @ vec(rho))
        r_rho = (
            r_rho
            - _hamiltonian_part(model, self.h0, rho)
            - _force_part(model, self.q, rho)
        )
        heat = heat_rate(r_rho, self.h0)
        work = work_rate(model, rho)
        ds = -model.kb * float(np.real(np.trace(r_rho @ log_rho)))
        dsp = model.kb * float(np.real(np.trace(r_rho @ (log_eq - log_rho))))
        dsf = heat / model.temperature

        tr_log_rho = float(np.sum(w * logw))
        tr_log_eq = float(np.real(np.sum(np.diag(rho).real * self._log_eq_diag)))
        rel_ent = tr_log_rho - tr_log_eq
        free = model.kt * rel_ent - model.kt * self.log_z

        return ThermoRecord(
            t=float(t),
            energy=energy,
            entropy=entropy,
            ds_dt=ds,
            dsp_dt=dsp,
            dsf_dt=dsf,
            heat_rate=heat,
            work_rate=work,
            free_energy=free,
            rel_entropy=rel_ent,
            min_eig=float(w[0]),
            neg_count=int(np.sum(w < NEG_EIG_THRESHOLD)),
            purity=float(np.sum(w**2)),
            trace_err=abs(float(np.trace(rho).real) - 1.0),
            clamped=int(np.sum(w < LOG_CLAMP)),
        )

    def records(self, trajectory) -> list[ThermoRecord]:
        return [
            self.record(t, rho) for t, rho in zip(trajectory.times, trajectory.states)
        ]


def diagnostics_for(model: OscillatorModel, kind: ModelKind, **kwargs) -> ThermoDiagnostics:
    return ThermoDiagnostics(model, kind, build_liouvillian(model, kind, **kwargs))
