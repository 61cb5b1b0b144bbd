"""Truncated number-basis operators and the Gibbs state of the harmonic oscillator.

The Hamiltonian is built exactly diagonal with levels ``hbar*omega*(n + 1/2)``
rather than assembled as ``p^2/2m + m w^2 q^2/2`` from the truncated matrices:
the two differ in the last two rows/columns, and the friction kernels
(tanh, sinh of level spacings) need the exact gaps.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .linalg import matrix_function_hermitian

#: Populations above this in the top level mean truncation is no longer negligible.
TOP_LEVEL_POPULATION_WARN = 1e-6


@dataclass(frozen=True)
class OscillatorModel:
    """Physical and truncation parameters of the damped oscillator.

    ``beta_p`` damps the momentum equation (units 1/time); ``beta_q`` damps
    the position equation and classically multiplies ``m * dV/dq``, so the
    1/time-dimensioned quantity comparable to ``beta_p`` is
    ``m^2 w^2 beta_q`` (exposed as :attr:`beta_q_rate`).
    """

    mass: float = 1.0
    omega: float = 1.0
    hbar: float = 1.0
    kb: float = 1.0
    temperature: float = 1.0
    beta_p: float = 0.2
    beta_q: float = 0.2
    force: float = 0.0
    dim: int = 16

    def __post_init__(self):
        for name in ("mass", "omega", "hbar", "kb", "temperature"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.beta_p < 0 or self.beta_q < 0:
            raise ValueError("friction coefficients must be non-negative")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError("dim must be a positive integer")

    @property
    def kt(self) -> float:
        return self.kb * self.temperature

    @property
    def xi(self) -> float:
        """hbar*omega / (2 kB T), the friction-kernel argument."""
        return self.hbar * self.omega / (2.0 * self.kt)

    @property
    def eta(self) -> float:
        """hbar*omega / (kB T) = 2 xi."""
        return 2.0 * self.xi

    @property
    def beta_q_rate(self) -> float:
        """m^2 w^2 beta_q, the 1/time-dimensioned position-channel rate."""
        return self.mass**2 * self.omega**2 * self.beta_q


def energies(model: OscillatorModel) -> np.ndarray:
    """Exact level energies hbar*omega*(n + 1/2), n = 0..dim-1."""
    n = np.arange(model.dim)
    return model.hbar * model.omega * (n + 0.5)


def hamiltonian(model: OscillatorModel) -> np.ndarray:
    return np.diag(energies(model)).astype(complex)


def position_matrix(model: OscillatorModel) -> np.ndarray:
    d = model.dim
    if d < 2:
        raise ValueError("position matrix needs dim >= 2")
    s = np.sqrt(model.hbar / (2.0 * model.mass * model.omega))
    root = np.sqrt(np.arange(1, d))
    q = np.zeros((d, d), dtype=complex)
    q[np.arange(d - 1), np.arange(1, d)] = s * root
    q[np.arange(1, d), np.arange(d - 1)] = s * root
    return q


def momentum_matrix(model: OscillatorModel) -> np.ndarray:
    d = model.dim
    if d < 2:
        raise ValueError("momentum matrix needs dim >= 2")
    s = np.sqrt(model.mass * model.omega * model.hbar / 2.0)
    root = np.sqrt(np.arange(1, d))
    p = np.zeros((d, d), dtype=complex)
    p[np.arange(d - 1), np.arange(1, d)] = -1j * s * root
    p[np.arange(1, d), np.arange(d - 1)] = 1j * s * root
    return p


def ladder_operators(model: OscillatorModel) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices (a, a_dagger)."""
    q = position_matrix(model)
    p = momentum_matrix(model)
    cq = np.sqrt(model.mass * model.omega / (2.0 * model.hbar))
    cp = np.sqrt(1.0 / (2.0 * model.mass * model.hbar * model.omega))
    a = cq * q + 1j * cp * p
    return a, a.conj().T


def potential_gradient(model: OscillatorModel) -> np.ndarray:
    """dV/dq = m w^2 q for the harmonic potential."""
    return model.mass * model.omega**2 * position_matrix(model)


def log_partition_function(model: OscillatorModel) -> float:
    """ln Z_d over the d retained levels."""
    return float(logsumexp(-energies(model) / model.kt))


def gibbs_state(model: OscillatorModel) -> np.ndarray:
    """Diagonal canonical state exp(-E_n/kT)/Z_d, trace one."""
    e = energies(model)
    w = np.exp(-(e - e[0]) / model.kt)
    return np.diag(w / w.sum()).astype(complex)


def gibbs_state_spectral(model: OscillatorModel) -> np.ndarray:
    """Gibbs state via the matrix-function route, for cross-checks."""
    g = matrix_function_hermitian(hamiltonian(model), lambda x: np.exp(-(x - x.min()) / model.kt))
    return g / np.trace(g).real
