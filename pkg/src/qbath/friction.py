"""Friction operators fixed by stationarity of the Gibbs state.

The momentum-channel operator plays the role of the classical momentum ``p``;
the position-channel operator plays the role of ``m * dV/dq``.  Both come in a
Hermitian variant (spectral tanh kernel, equivalently the unique solution of a
Sylvester equation, equivalently a Bernoulli-number commutator series) and a
non-Hermitian variant (sinh/cosh kernels, equivalently a closed form built
from exp(+-H/kT) conjugation).  Independent routes are kept separate so they
can cross-validate each other.

All functions work in the energy eigenbasis of an arbitrary non-degenerate
one-dof Hamiltonian: they take the level energies plus the base operator
expressed in that basis.
"""

import enum
import math

import numpy as np
from scipy.special import bernoulli

from .errors import DimensionMismatch, NonHermitianInput, SingularPairing
from .linalg import frobenius, hermitize, is_hermitian
from .oscillator import OscillatorModel, energies, momentum_matrix, potential_gradient

#: Largest Bernoulli-series order accepted; the expansion is asymptotic in
#: hbar*omega/kT and is a diagnostic, not a production route.
MAX_BERNOULLI_ORDER = 8

#: cosh overflows past this kernel argument.
KERNEL_OVERFLOW = 700.0


class FrictionKind(enum.Enum):
    """Which classical quantity the operator replaces."""

    MOMENTUM = "momentum"  # base operator p
    POSITION = "position"  # base operator m * dV/dq


def _gaps_over(energies_arr: np.ndarray, scale: float) -> np.ndarray:
    e = np.asarray(energies_arr, dtype=float)
    return (e[:, None] - e[None, :]) / scale


def tanh_kernel(x: np.ndarray) -> np.ndarray:
    """tanh(x)/x with its analytic value 1 at x = 0.

    The series branch handles the zero diagonal gaps of any spectrum.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 - xs**2 / 3.0 + 2.0 * xs**4 / 15.0
    xl = x[~small]
    out[~small] = np.tanh(xl) / xl
    return out


def sinh_kernel(x: np.ndarray) -> np.ndarray:
    """sinh(x)/x with value 1 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = 1.0 + xs**2 / 6.0 + xs**4 / 120.0
    xl = x[~small]
    out[~small] = np.sinh(xl) / xl
    return out


def _coshm1_over(x: np.ndarray) -> np.ndarray:
    """(cosh(x) - 1)/x with value 0 at x = 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = np.abs(x) < 1e-6
    xs = x[small]
    out[small] = xs / 2.0 + xs**3 / 24.0
    xl = x[~small]
    out[~small] = np.cosh(xl) / xl - 1.0 / xl
    return out


def _check_base(energies_arr, base) -> tuple[np.ndarray, np.ndarray]:
    e = np.asarray(energies_arr, dtype=float)
    base = np.asarray(base, dtype=complex)
    if base.ndim != 2 or base.shape[0] != base.shape[1]:
        raise DimensionMismatch(f"base operator must be square, got {base.shape}")
    if base.shape[0] != e.size:
        raise DimensionMismatch(
            f"energies ({e.size}) and base operator ({base.shape[0]}) disagree"
        )
    if not is_hermitian(base):
        raise NonHermitianInput("base operator must be Hermitian")
    return e, base


def spectral_friction_hermitian(energies_arr, base, kt: float) -> np.ndarray:
    """Hermitian friction operator from the tanh spectral kernel.

    Entrywise in the energy basis: ``base_lj * g((E_l - E_j)/(2 kT))`` with
    ``g(x) = tanh(x)/x``.  Works for the momentum channel (base = p) and the
    position channel (base = m dV/dq) alike.
    """
    e, base = _check_base(energies_arr, base)
    if kt <= 0:
        raise ValueError("kt must be positive")
    return hermitize(base * tanh_kernel(_gaps_over(e, 2.0 * kt)))


def sylvester_solve(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solve A X + X A = C for Hermitian positive-definite A.

    Solved in A's eigenbasis where X_ij = C_ij / (a_i + a_j); this closed
    form evaluates the integral representation
    ``int_0^inf exp(-A t) C exp(-A t) dt`` exactly, since
    1/(a_i + a_j) = int_0^inf exp(-(a_i + a_j) t) dt.

    Raises
    ------
    SingularPairing
        If any eigenvalue pairing a_i + a_j falls below 1e-300.
    """
    a = np.asarray(a, dtype=complex)
    c = np.asarray(c, dtype=complex)
    if a.shape != c.shape:
        raise DimensionMismatch(f"A {a.shape} and C {c.shape} disagree")
    if not is_hermitian(a):
        raise NonHermitianInput("A must be Hermitian")
    w, v = np.linalg.eigh(hermitize(a))
    pair = w[:, None] + w[None, :]
    if np.min(pair) < 1e-300:
        raise SingularPairing(f"eigenvalue pairing underflow: min a_i + a_j = {np.min(pair):.3e}")
    ct = v.conj().T @ c @ v
    return v @ (ct / pair) @ v.conj().T


def bernoulli_series_friction(energies_arr, base, kt: float, order: int) -> np.ndarray:
    """Partial Bernoulli-number series for the Hermitian friction operator.

    Term n carries coefficient ``4 (2^(2n+2)-1) B_(2n+2) / (2n+2)!`` on the
    2n-fold nested commutator of H with the base operator, divided by
    (kT)^(2n).  Diagnostic route only: asymptotic in hbar*omega/kT, capped at
    order 8.
    """
    e, base = _check_base(energies_arr, base)
    if order < 0 or int(order) != order:
        raise ValueError("order must be a non-negative integer")
    if order > MAX_BERNOULLI_ORDER:
        raise ValueError(f"order {order} exceeds cap {MAX_BERNOULLI_ORDER}; series is asymptotic")
    bnum = bernoulli(2 * order + 2)
    h = np.diag(e).astype(complex)
    nested = np.array(base)  # [H, base]_0
    total = np.zeros_like(base)
    for n in range(order + 1):
        k = 2 * n + 2
        coeff = 4.0 * (2.0**k - 1.0) * bnum[k] / math.factorial(k) / kt ** (2 * n)
        total = total + coeff * nested
        nested = h @ nested - nested @ h
        nested = h @ nested - nested @ h
    return hermitize(total)


def nonhermitian_friction(
    energies_arr,
    base,
    kt: float,
    kind: FrictionKind,
    partner: np.ndarray | None = None,
    mass: float | None = None,
    hbar: float | None = None,
) -> np.ndarray:
    """Non-Hermitian friction operator from the sinh/cosh spectral kernels.

    The Hermitian part is ``base_lj * sinh(x)/x`` with
    ``x = (E_l - E_j)/kT``; the anti-Hermitian part carries
    ``(cosh(x) - 1)`` on the conjugate operator (q for the momentum channel,
    p for the position channel).  When ``partner`` is omitted it is derived
    from the base operator through the commutator identities
    ``[q, H] = i hbar p / m`` and ``[p, H] = -i hbar dV/dq``, which makes the
    anti-Hermitian entries ``-i * base_lj * (cosh(x) - 1)/x``; entries on
    degenerate gaps vanish with the kernel either way.

    With ``partner`` supplied explicitly (requires ``mass`` and ``hbar``),
    the textbook form ``+- i (m kT / hbar) partner_lj (cosh(x) - 1)`` is used
    (+ for the momentum channel, - for the position channel).
    """
    e, base = _check_base(energies_arr, base)
    if kt <= 0:
        raise ValueError("kt must be positive")
    x = _gaps_over(e, kt)
    if np.max(np.abs(x)) > KERNEL_OVERFLOW:
        raise OverflowError("level gap / kT exceeds 700; cosh overflows")
    herm_part = base * sinh_kernel(x)
    if partner is None:
        anti = -1j * base * _coshm1_over(x)
    else:
        if mass is None or hbar is None:
            raise ValueError("explicit partner requires mass and hbar")
        partner = np.asarray(partner, dtype=complex)
        if partner.shape != base.shape:
            raise DimensionMismatch("partner and base shapes disagree")
        sign = 1.0 if kind is FrictionKind.MOMENTUM else -1.0
        anti = sign * (mass * kt / hbar) * partner * (np.cosh(x) - 1.0)
    return herm_part + 1j * anti


def nonhermitian_friction_closed_form(
    energies_arr,
    partner,
    kt: float,
    kind: FrictionKind,
    mass: float,
    hbar: float,
) -> np.ndarray:
    """Closed-form non-Hermitian friction operator via exp(+-H/kT) conjugation.

    Momentum channel (partner = q):
        ``+ i (m kT / hbar) (exp(+H/kT) q exp(-H/kT) - q)``
    Position channel (partner = p):
        ``- i (m kT / hbar) (exp(+H/kT) p exp(-H/kT) - p)``

    Independent of the spectral-kernel route; the two must agree to 1e-10.
    """
    e = np.asarray(energies_arr, dtype=float)
    partner = np.asarray(partner, dtype=complex)
    if partner.shape != (e.size, e.size):
        raise DimensionMismatch("partner shape does not match energies")
    if np.max(np.abs(e - e.min())) / kt > KERNEL_OVERFLOW:
        raise OverflowError("level span / kT exceeds 700; exp overflows")
    # Shift by the mean energy: the conjugation is invariant and exp stays tame.
    shifted = (e - e.mean()) / kt
    gp = np.exp(shifted)
    conj = (gp[:, None] * partner) * (1.0 / gp)[None, :]
    sign = 1.0 if kind is FrictionKind.MOMENTUM else -1.0
    return sign * (1j * mass * kt / hbar) * (conj - partner)


def hermitian_friction_pair(model: OscillatorModel) -> tuple[np.ndarray, np.ndarray]:
    """(momentum-channel, position-channel) Hermitian operators for the oscillator."""
    e = energies(model)
    theta_p = spectral_friction_hermitian(e, momentum_matrix(model), model.kt)
    theta_q = spectral_friction_hermitian(e, model.mass * potential_gradient(model), model.kt)
    return theta_p, theta_q


def nonhermitian_friction_pair(model: OscillatorModel) -> tuple[np.ndarray, np.ndarray]:
    """(momentum-channel, position-channel) non-Hermitian operators for the oscillator."""
    e = energies(model)
    xi_p = nonhermitian_friction(e, momentum_matrix(model), model.kt, FrictionKind.MOMENTUM)
    xi_q = nonhermitian_friction(
        e, model.mass * potential_gradient(model), model.kt, FrictionKind.POSITION
    )
    return xi_p, xi_q


def stationarity_residual(g: np.ndarray, rhs: np.ndarray, x: np.ndarray, adjoint: bool = False) -> float:
    """Frobenius residual of the defining equation X G + G X = rhs.

    With ``adjoint=True`` checks the non-Hermitian variant
    ``X^dagger G + G X = rhs``.
    """
    left = (x.conj().T if adjoint else x) @ g + g @ x
    return frobenius(left - rhs) / max(frobenius(rhs), 1e-300)
