"""Generators for the damped-oscillator master equations and their positivity analysis.

``build_liouvillian`` assembles the d^2 x d^2 matrix L such that
``d vec(rho)/dt = L vec(rho)`` under the column-stacking convention, for each
model kind:

* ``UNITARY``            -- commutator flow only (plus the force term).
* ``FULL_HERMITIAN``     -- friction and noise in both channels, Hermitian
                            friction operators (tanh kernel).
* ``FULL_NONHERMITIAN``  -- both channels, non-Hermitian friction operators
                            (sinh/cosh kernels).
* ``MOMENTUM_HERMITIAN`` / ``MOMENTUM_NONHERMITIAN`` -- position channel
                            switched off (beta_q forced to zero).
* ``CALDEIRA_LEGGETT``   -- momentum channel only with the friction kernel
                            replaced by its classical limit 1.
* ``QOME``               -- damped-mode optical master equation with rate
                            gamma0 and occupation nbar.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidModel, OffBisector
from .friction import hermitian_friction_pair, nonhermitian_friction_pair, tanh_kernel
from .linalg import (
    hermitize,
    left_mult_superop,
    matrix_exponential,
    right_mult_superop,
)
from .oscillator import (
    OscillatorModel,
    gibbs_state,
    hamiltonian,
    ladder_operators,
    momentum_matrix,
    position_matrix,
)

#: Certification time step for the Choi test, the same step the trajectory
#: experiments use.
DEFAULT_CHOI_DT = math.pi / 200.0


class ModelKind(enum.Enum):
    UNITARY = "unitary"
    FULL_HERMITIAN = "full-hermitian"
    FULL_NONHERMITIAN = "full-nonhermitian"
    MOMENTUM_HERMITIAN = "momentum-hermitian"
    MOMENTUM_NONHERMITIAN = "momentum-nonhermitian"
    CALDEIRA_LEGGETT = "caldeira-leggett"
    QOME = "qome"


MOMENTUM_ONLY_KINDS = frozenset(
    {ModelKind.MOMENTUM_HERMITIAN, ModelKind.MOMENTUM_NONHERMITIAN, ModelKind.CALDEIRA_LEGGETT}
)
DISSIPATIVE_KINDS = frozenset(
    {
        ModelKind.FULL_HERMITIAN,
        ModelKind.FULL_NONHERMITIAN,
        ModelKind.MOMENTUM_HERMITIAN,
        ModelKind.MOMENTUM_NONHERMITIAN,
        ModelKind.CALDEIRA_LEGGETT,
        ModelKind.QOME,
    }
)
HERMITIAN_FAMILY = frozenset(
    {ModelKind.FULL_HERMITIAN, ModelKind.MOMENTUM_HERMITIAN, ModelKind.CALDEIRA_LEGGETT}
)


def effective_beta_q(model: OscillatorModel, kind: ModelKind) -> float:
    """Position-channel friction actually used by the generator (kinds with a
    momentum-only structure force it to zero)."""
    return 0.0 if kind in MOMENTUM_ONLY_KINDS else model.beta_q


def _commutator_superop(a: np.ndarray) -> np.ndarray:
    return left_mult_superop(a) - right_mult_superop(a)


def _sandwich_superop(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Superoperator for rho -> left rho right."""
    return right_mult_superop(right) @ left_mult_superop(left)


def build_liouvillian(
    model: OscillatorModel,
    kind: ModelKind,
    gamma0: float | None = None,
    nbar: float | None = None,
) -> np.ndarray:
    """Assemble the generator for the requested model kind.

    For ``QOME`` the pair (gamma0, nbar) must be supplied; all other kinds use
    the model's friction coefficients.
    """
    hbar = model.hbar
    h0 = hamiltonian(model)
    q = position_matrix(model)
    liou = -1j / hbar * _commutator_superop(h0)
    if model.force != 0.0:
        liou = liou + (1j * model.force / hbar) * _commutator_superop(q)

    if kind is ModelKind.UNITARY:
        return liou
    if kind not in DISSIPATIVE_KINDS:
        raise InvalidModel(f"unknown model kind {kind!r}")

    if kind is ModelKind.QOME:
        if gamma0 is None or nbar is None:
            raise InvalidModel("QOME needs gamma0 and nbar")
        if gamma0 <= 0 or nbar < 0:
            raise InvalidModel("QOME needs gamma0 > 0 and nbar >= 0")
        a, adag = ladder_operators(model)
        num = adag @ a
        anti_num = left_mult_superop(num) + right_mult_superop(num)
        rev = a @ adag
        anti_rev = left_mult_superop(rev) + right_mult_superop(rev)
        liou = -1j * model.omega * _commutator_superop(num)
        liou = liou + 0.5 * gamma0 * (nbar + 1.0) * (2.0 * _sandwich_superop(a, adag) - anti_num)
        liou = liou + 0.5 * gamma0 * nbar * (2.0 * _sandwich_superop(adag, a) - anti_rev)
        if model.force != 0.0:
            liou = liou + (1j * model.force / hbar) * _commutator_superop(q)
        return liou

    beta_p = model.beta_p
    beta_q = effective_beta_q(model, kind)
    if beta_p <= 0:
        raise InvalidModel(f"{kind.value} needs beta_p > 0")

    p = momentum_matrix(model)
    kt = model.kt
    m = model.mass
    comm_q = _commutator_superop(q)
    comm_p = _commutator_superop(p)

    if kind in HERMITIAN_FAMILY:
        theta_p, theta_q = hermitian_friction_pair(model)
        if kind is ModelKind.CALDEIRA_LEGGETT:
            theta_p = p  # classical-limit kernel tanh(x)/x -> 1
        fric_p = left_mult_superop(theta_p) + right_mult_superop(theta_p)
        fric_q = left_mult_superop(theta_q) + right_mult_superop(theta_q)
    else:
        xi_p, xi_q = nonhermitian_friction_pair(model)
        fric_p = left_mult_superop(xi_p.conj().T) + right_mult_superop(xi_p)
        fric_q = left_mult_superop(xi_q.conj().T) + right_mult_superop(xi_q)

    liou = liou - (kt * beta_p * m / hbar**2) * (comm_q @ comm_q)
    liou = liou - (1j * beta_p / (2.0 * hbar)) * (comm_q @ fric_p)
    if beta_q > 0:
        liou = liou - (kt * beta_q * m / hbar**2) * (comm_p @ comm_p)
        liou = liou + (1j * beta_q / (2.0 * hbar)) * (comm_p @ fric_q)
    return liou


def qome_mapping(model: OscillatorModel, rtol: float = 1e-12) -> tuple[float, float]:
    """Map bisector friction coefficients onto the optical pair (gamma0, nbar).

    ``nbar = 1/(exp(hbar w / kT) - 1)`` and ``gamma0 = 2 beta_p tanh(xi)/xi``;
    valid only on the bisector beta_p = m^2 w^2 beta_q.
    """
    lhs = model.beta_p
    rhs = model.beta_q_rate
    if abs(lhs - rhs) > rtol * max(abs(lhs), abs(rhs), 1e-300):
        raise OffBisector(f"beta_p = {lhs:.6g} but m^2 w^2 beta_q = {rhs:.6g}")
    nbar = 1.0 / math.expm1(model.eta)
    gamma0 = 2.0 * model.beta_p * float(tanh_kernel(np.array([model.xi]))[0])
    return gamma0, nbar


@dataclass(frozen=True)
class LindbladReport:
    """Analytic Lindblad-form data for one parameter point.

    ``x1 <= x <= x2`` with ``x = beta_p / (m^2 w^2 beta_q)`` is the
    complete-positivity window; ``x1 * x2 = 1`` identically.
    """

    xi: float
    beta_p: float
    beta_q: float
    d_pp: float
    d_qq: float
    d_pq: float
    lam: float
    mu: float
    x: float
    x1: float
    x2: float
    cond1: bool
    cond2: bool
    cond3: bool
    choi_min_eigenvalue: float | None = None

    @property
    def lindblad_form(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3


def lindblad_region_check(
    model: OscillatorModel,
    kind: ModelKind,
    dt: float = DEFAULT_CHOI_DT,
    include_choi: bool = True,
) -> LindbladReport:
    """Evaluate the diffusion/friction parameters and the three Lindblad conditions.

    The Hermitian family uses D_pp = kT beta_p m, D_qq = kT beta_q m and the
    tanh kernel in lambda +- mu; the non-Hermitian family adds
    ``(m hbar w / 2) (cosh(eta) - 1)/eta`` to each diffusion coefficient and
    uses the sinh kernel.  The window endpoints coincide for both families.
    """
    if kind in (ModelKind.UNITARY, ModelKind.QOME):
        raise InvalidModel("region check applies to the friction-operator kinds")
    m, w, hbar, kt = model.mass, model.omega, model.hbar, model.kt
    xi = model.xi
    eta = model.eta
    beta_p = model.beta_p
    beta_q = effective_beta_q(model, kind)

    if kind in HERMITIAN_FAMILY:
        kernel = 1.0 if kind is ModelKind.CALDEIRA_LEGGETT else math.tanh(xi) / xi
        d_pp = kt * beta_p * m
        d_qq = kt * beta_q * m
    else:
        kernel = math.sinh(eta) / eta
        extra = 0.5 * m * hbar * w * (math.cosh(eta) - 1.0) / eta
        d_pp = kt * beta_p * m + extra * beta_p
        d_qq = kt * beta_q * m + extra * beta_q
    sum_rate = beta_p * kernel
    dif_rate = m**2 * w**2 * beta_q * kernel
    lam = 0.5 * (sum_rate + dif_rate)
    mu = 0.5 * (sum_rate - dif_rate)

    x = beta_p / (m**2 * w**2 * beta_q) if beta_q > 0 else math.inf
    x1 = math.tanh(0.5 * xi) ** 2  # ((cosh xi - 1)/sinh xi)^2
    x2 = 1.0 / math.tanh(0.5 * xi) ** 2
    cond1 = d_pp > 0
    cond2 = d_qq > 0
    cond3 = d_pp * d_qq - 0.0**2 >= lam**2 * hbar**2 / 4.0

    choi_min = None
    if include_choi:
        choi_min = choi_min_eigenvalue(build_liouvillian(model, kind), dt)
    return LindbladReport(
        xi=xi,
        beta_p=beta_p,
        beta_q=beta_q,
        d_pp=d_pp,
        d_qq=d_qq,
        d_pq=0.0,
        lam=lam,
        mu=mu,
        x=x,
        x1=x1,
        x2=x2,
        cond1=cond1,
        cond2=cond2,
        cond3=cond3,
        choi_min_eigenvalue=choi_min,
    )


def choi_matrix(superop: np.ndarray) -> np.ndarray:
    """Reshuffle a column-stacking superoperator into its Choi matrix.

    For the identity map on a d-level system this returns the rank-one matrix
    ``vec(I) vec(I)^dagger`` (eigenvalues {d, 0, ...}); positivity of the
    Choi matrix is equivalent to complete positivity of the map.
    """
    n = superop.shape[0]
    d = int(round(math.sqrt(n)))
    if d * d != n:
        raise ValueError(f"superoperator dimension {n} is not a perfect square")
    return superop.reshape(d, d, d, d).swapaxes(0, 3).reshape(n, n)


def choi_min_eigenvalue(liou: np.ndarray, dt: float) -> float:
    """Minimum Choi eigenvalue of the step map exp(L dt).

    Values at or above roughly -1e-9 certify complete positivity of the step;
    markedly negative values expose its failure.  Meaningful for dt small
    enough that ``|L| dt`` stays of order one.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    step = matrix_exponential(liou * dt)
    choi = hermitize(choi_matrix(step))
    return float(np.linalg.eigvalsh(choi)[0])


def gibbs_residual(model: OscillatorModel, kind: ModelKind, **kwargs) -> float:
    """2-norm of L vec(rho_eq), the stationarity defect of the Gibbs state."""
    from .linalg import vec

    liou = build_liouvillian(model, kind, **kwargs)
    return float(np.linalg.norm(liou @ vec(gibbs_state(model))))
