"""Stochastic Hamilton dynamics for one classical degree of freedom.

Friction and noise act on both equations of motion:

    dp = (-m w^2 q - beta_p p + f) dt + sqrt(2 kT beta_p m dt) N(0,1)
    dq = (p/m - beta_q m * m w^2 q) dt + sqrt(2 kT beta_q m dt) N(0,1)

The factor 2 in the increment variances comes from the noise correlation
normalization E{n(t1) n(t2)} = 2 delta(t1 - t2).  Euler-Maruyama is
sufficient here: the noise is additive, so the Ito and Stratonovich readings
coincide.  Trajectories are vectorized across the ensemble and fully
reproducible from the seed.
"""

import warnings
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InsufficientSamples


@dataclass(frozen=True)
class ClassicalParams:
    mass: float = 1.0
    omega: float = 1.0
    kb: float = 1.0
    temperature: float = 1.0
    beta_p: float = 0.2
    beta_q: float = 0.0
    force: float = 0.0
    dt: float = 0.005
    n_steps: int = 4000
    n_trajectories: int = 5000
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("mass", "omega", "kb", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.beta_p < 0 or self.beta_q < 0:
            raise ValueError("friction coefficients must be non-negative")
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        limit = self.stability_limit
        if self.dt > limit:
            warnings.warn(
                f"dt = {self.dt:.3g} exceeds the stability bound {limit:.3g}",
                stacklevel=2,
            )

    @property
    def kt(self) -> float:
        return self.kb * self.temperature

    @property
    def beta_q_rate(self) -> float:
        return self.mass**2 * self.omega**2 * self.beta_q

    @property
    def stability_limit(self) -> float:
        return 0.01 / max(self.omega, self.beta_p, self.beta_q_rate)


def euler_maruyama_step(q, p, params: ClassicalParams, noise_q, noise_p):
    """One explicit step from (q, p); both updates use the pre-step state."""
    m, w = params.mass, params.omega
    dt = params.dt
    sig_p = np.sqrt(2.0 * params.kt * params.beta_p * m * dt)
    sig_q = np.sqrt(2.0 * params.kt * params.beta_q * m * dt)
    p_new = p + (-m * w**2 * q - params.beta_p * p + params.force) * dt + sig_p * noise_p
    q_new = q + (p / m - params.beta_q * m * (m * w**2 * q)) * dt + sig_q * noise_q
    return q_new, p_new


def equilibrium_sample(params: ClassicalParams, rng: np.random.Generator, n: int):
    """Draw (q, p) from the Gibbs Gaussian, shifted by the mean f/(m w^2)."""
    m, w = params.mass, params.omega
    q = params.force / (m * w**2) + np.sqrt(params.kt / (m * w**2)) * rng.standard_normal(n)
    p = np.sqrt(m * params.kt) * rng.standard_normal(n)
    return q, p


class StationaryResiduals(NamedTuple):
    res_p2: float
    se_p2: float
    res_q2: float
    se_q2: float
    res_equi_r: float
    se_equi_r: float


class EnergyBalance(NamedTuple):
    residual: float
    stderr: float
    window_times: np.ndarray
    window_residuals: np.ndarray


@dataclass
class ClassicalRun:
    """Per-step ensemble statistics plus post-burn-in per-trajectory averages."""

    params: ClassicalParams
    burn_in_steps: int
    times: np.ndarray
    mean_E: np.ndarray
    sem_E: np.ndarray
    mean_p2_over_m: np.ndarray
    sem_p2_over_m: np.ndarray
    mean_mw2q2: np.ndarray
    sem_mw2q2: np.ndarray
    mean_power: np.ndarray
    mean_v1sq_m: np.ndarray
    mean_q: np.ndarray
    traj_avg_p2_over_m: np.ndarray
    traj_avg_mw2q2: np.ndarray
    traj_avg_v1sq_m: np.ndarray
    traj_avg_q: np.ndarray


def simulate_ensemble(
    params: ClassicalParams,
    initial: str = "equilibrium",
    burn_in_steps: int = 0,
    initial_state=None,
) -> ClassicalRun:
    """Run the ensemble and accumulate means without storing raw trajectories.

    ``initial`` is ``"equilibrium"`` (Gibbs Gaussian), ``"zero"`` (all
    trajectories at the origin), ``"scaled"`` with ``initial_state`` as a
    (q, p) array pair, or ``"custom"`` with explicit arrays.
    """
    rng = np.random.default_rng(params.rng_seed)
    n = params.n_trajectories
    if initial == "equilibrium":
        q, p = equilibrium_sample(params, rng, n)
    elif initial == "zero":
        q = np.zeros(n)
        p = np.zeros(n)
    elif initial == "custom":
        q, p = (np.array(initial_state[0], dtype=float), np.array(initial_state[1], dtype=float))
    else:
        raise ValueError(f"unknown initial condition {initial!r}")

    m, w = params.mass, params.omega
    steps = params.n_steps
    n_rec = steps + 1
    mean_E = np.empty(n_rec)
    sem_E = np.empty(n_rec)
    mean_p2m = np.empty(n_rec)
    sem_p2m = np.empty(n_rec)
    mean_mw2q2 = np.empty(n_rec)
    sem_mw2q2 = np.empty(n_rec)
    mean_power = np.empty(n_rec)
    mean_v1sq_m = np.empty(n_rec)
    mean_q_arr = np.empty(n_rec)

    acc_p2m = np.zeros(n)
    acc_mw2q2 = np.zeros(n)
    acc_v1sq = np.zeros(n)
    acc_q = np.zeros(n)
    n_acc = 0

    sqn = np.sqrt(n)

    def record(i, q, p):
        p2m = p * p / m
        mw2q2 = m * w**2 * q * q
        e = 0.5 * (p2m + mw2q2)
        v1sq_m = m * (m * w**2 * q) ** 2
        mean_E[i] = e.mean()
        sem_E[i] = e.std() / sqn
        mean_p2m[i] = p2m.mean()
        sem_p2m[i] = p2m.std() / sqn
        mean_mw2q2[i] = mw2q2.mean()
        sem_mw2q2[i] = mw2q2.std() / sqn
        mean_power[i] = (params.force * p / m).mean()
        mean_v1sq_m[i] = v1sq_m.mean()
        mean_q_arr[i] = q.mean()

    record(0, q, p)
    for i in range(1, steps + 1):
        noise = rng.standard_normal((2, n))
        q, p = euler_maruyama_step(q, p, params, noise[0], noise[1])
        record(i, q, p)
        if i > burn_in_steps:
            acc_p2m += p * p / m
            acc_mw2q2 += m * w**2 * q * q
            acc_v1sq += m * (m * w**2 * q) ** 2
            acc_q += q
            n_acc += 1

    if n_acc == 0:
        n_acc = 1  # burn-in consumed the whole run; averages stay zero
    return ClassicalRun(
        params=params,
        burn_in_steps=burn_in_steps,
        times=params.dt * np.arange(n_rec),
        mean_E=mean_E,
        sem_E=sem_E,
        mean_p2_over_m=mean_p2m,
        sem_p2_over_m=sem_p2m,
        mean_mw2q2=mean_mw2q2,
        sem_mw2q2=sem_mw2q2,
        mean_power=mean_power,
        mean_v1sq_m=mean_v1sq_m,
        mean_q=mean_q_arr,
        traj_avg_p2_over_m=acc_p2m / n_acc,
        traj_avg_mw2q2=acc_mw2q2 / n_acc,
        traj_avg_v1sq_m=acc_v1sq / n_acc,
        traj_avg_q=acc_q / n_acc,
    )


def _mean_se(samples: np.ndarray) -> tuple[float, float]:
    return float(samples.mean()), float(samples.std(ddof=1) / np.sqrt(samples.size))


def stationary_check(run: ClassicalRun) -> StationaryResiduals:
    """Residuals of the stationary moments against their Gibbs values.

    Per-trajectory time averages are the independent samples behind the
    standard errors.

    Raises
    ------
    InsufficientSamples
        If any standard error exceeds 10% of kT.
    """
    params = run.params
    kt = params.kt
    m, w = params.mass, params.omega
    p2, se_p2 = _mean_se(run.traj_avg_p2_over_m)
    q2, se_q2 = _mean_se(run.traj_avg_mw2q2)
    v1, se_v1 = _mean_se(run.traj_avg_v1sq_m)
    res = StationaryResiduals(
        res_p2=p2 - kt,
        se_p2=se_p2,
        res_q2=q2 - kt,
        se_q2=se_q2,
        res_equi_r=v1 - kt * m * (m * w**2),
        se_equi_r=se_v1,
    )
    for se in (res.se_p2, res.se_q2, res.se_equi_r):
        if se > 0.1 * kt * max(1.0, m * (m * w**2)):
            raise InsufficientSamples(f"standard error {se:.3g} exceeds 10% of kT")
    return res


def energy_balance_rhs(run: ClassicalRun) -> np.ndarray:
    """Per-step first-law right-hand side: power plus the two heat channels."""
    params = run.params
    kt = params.kt
    m, w = params.mass, params.omega
    heat_p = 2.0 * params.beta_p * (0.5 * kt - 0.5 * run.mean_p2_over_m)
    heat_q = params.beta_q * (kt * m * (m * w**2) - run.mean_v1sq_m)
    return run.mean_power + heat_p + heat_q


def energy_balance_check(run: ClassicalRun, n_windows: int = 20) -> EnergyBalance:
    """Windowed comparison of d<E>/dt against the first-law right-hand side."""
    params = run.params
    steps = len(run.times) - 1
    if n_windows < 2 or steps < 2 * n_windows:
        raise ValueError("need at least two windows of at least two steps")
    rhs = energy_balance_rhs(run)
    edges = np.linspace(0, steps, n_windows + 1).astype(int)
    residuals = np.empty(n_windows)
    centers = np.empty(n_windows)
    for k in range(n_windows):
        lo, hi = edges[k], edges[k + 1]
        de_dt = (run.mean_E[hi] - run.mean_E[lo]) / (run.times[hi] - run.times[lo])
        residuals[k] = de_dt - rhs[lo:hi].mean()
        centers[k] = 0.5 * (run.times[lo] + run.times[hi])
    mean, se = _mean_se(residuals)
    return EnergyBalance(residual=mean, stderr=se, window_times=centers, window_residuals=residuals)
