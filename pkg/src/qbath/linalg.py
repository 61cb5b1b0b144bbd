"""Dense complex operator algebra and the vectorization calculus.

Vectorization convention, fixed package-wide: ``vec`` stacks matrix COLUMNS,
so that for conforming matrices

    vec(A X B) = (B^T kron A) vec(X).

Consequently a superoperator that multiplies from the left is ``I kron A``
and one that multiplies from the right is ``B^T kron I``.  The Choi
reshuffle in :mod:`qbath.liouvillian` assumes the same convention.

Worked 2x2 example of the convention: for X = [[a, b], [c, d]],
vec(X) = (a, c, b, d)^T.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    DomainError,
    NonHermitianInput,
)

#: Relative Frobenius tolerance below which an operator counts as Hermitian.
#: Operators here are built from analytic formulas and carry rounding error only.
HERMITICITY_RTOL = 1e-10

#: Floor applied to density-matrix eigenvalues before taking logarithms.
#: Pure states carry exact zeros, which make entropy functionals singular.
LOG_CLAMP = 1e-14

#: Default Frobenius-norm bound above which matrix_exponential refuses to run.
EXPM_NORM_BOUND = 1e4


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(a))


def _require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def _require_same_dim(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shape mismatch: {a.shape} vs {b.shape}")


def is_hermitian(a: np.ndarray, rtol: float = HERMITICITY_RTOL) -> bool:
    a = _require_square(a)
    return frobenius(a - a.conj().T) <= rtol * max(1.0, frobenius(a))


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (A + A^dagger)/2."""
    return 0.5 * (a + a.conj().T)


def vec(a: np.ndarray) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return np.asarray(a).flatten(order="F")


def devec(v: np.ndarray) -> np.ndarray:
    """Inverse of :func:`vec` for square matrices."""
    v = np.asarray(v)
    d = int(round(np.sqrt(v.size)))
    if d * d != v.size:
        raise DimensionMismatch(f"vector of length {v.size} is not a square matrix")
    return v.reshape((d, d), order="F")


def left_mult_superop(a: np.ndarray) -> np.ndarray:
    """Superoperator for X -> A X, i.e. ``I kron A``."""
    a = _require_square(a)
    return np.kron(np.eye(a.shape[0]), a)


def right_mult_superop(b: np.ndarray) -> np.ndarray:
    """Superoperator for X -> X B, i.e. ``B^T kron I``."""
    b = _require_square(b)
    return np.kron(b.T, np.eye(b.shape[0]))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _require_square(a)
    b = _require_square(b)
    _require_same_dim(a, b)
    return a @ b - b @ a


def anticommutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _require_square(a)
    b = _require_square(b)
    _require_same_dim(a, b)
    return a @ b + b @ a


@dataclass(frozen=True)
class HermitianEigenSystem:
    """Spectral data of a Hermitian matrix.

    ``eigenvalues`` are real and ascending; the columns of ``eigenvectors``
    are the corresponding orthonormal eigenvectors, so
    ``V diag(w) V^dagger`` reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def hermitian_eigendecompose(a: np.ndarray, rtol: float = HERMITICITY_RTOL) -> HermitianEigenSystem:
    """Eigendecompose a Hermitian matrix, ascending eigenvalues.

    Raises
    ------
    NonHermitianInput
        If ``a`` deviates from Hermiticity by more than ``rtol`` in relative
        Frobenius norm.
    ConvergenceFailure
        If the underlying LAPACK solver does not converge.
    """
    a = _require_square(a)
    if not is_hermitian(a, rtol):
        raise NonHermitianInput(
            f"matrix is not Hermitian: |A - A^H| = {frobenius(a - a.conj().T):.3e}"
        )
    try:
        w, v = np.linalg.eigh(hermitize(a))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - very rare
        raise ConvergenceFailure(str(exc)) from exc
    return HermitianEigenSystem(eigenvalues=w, eigenvectors=v)


def matrix_function_hermitian(a: np.ndarray, f, clamp: float | None = None) -> np.ndarray:
    """Apply a real scalar function to a Hermitian matrix spectrally.

    Returns ``V diag(f(w)) V^dagger``.  With ``clamp`` set, eigenvalues are
    floored at ``clamp`` before ``f`` is applied (used for logarithms of
    rank-deficient density matrices).

    Raises
    ------
    DomainError
        If ``f`` evaluates to a non-finite value on the (possibly clamped)
        spectrum.
    """
    eig = hermitian_eigendecompose(a)
    w = eig.eigenvalues
    if clamp is not None:
        w = np.maximum(w, clamp)
    with np.errstate(divide="ignore", invalid="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("scalar function is not finite on the spectrum")
    v = eig.eigenvectors
    return hermitize((v * fw) @ v.conj().T)


def matrix_exponential(a: np.ndarray, norm_bound: float = EXPM_NORM_BOUND) -> np.ndarray:
    """Matrix exponential of a general (not necessarily Hermitian) matrix.

    Hermitian inputs take the spectral route so that ``exp(-H/kT)`` is exact
    on the energy basis; everything else goes through scaling-and-squaring
    with Pade approximation (scipy).

    Raises
    ------
    OverflowError
        If the Frobenius norm of ``a`` exceeds ``norm_bound``.
    """
    a = _require_square(a)
    nrm = frobenius(a)
    if not np.isfinite(nrm):
        raise DomainError("matrix has non-finite entries")
    if nrm > norm_bound:
        raise OverflowError(f"|A|_F = {nrm:.3e} exceeds bound {norm_bound:.3e}")
    if is_hermitian(a, rtol=1e-13):
        return matrix_function_hermitian(a, np.exp)
    out = scipy.linalg.expm(np.asarray(a, dtype=complex))
    if not np.all(np.isfinite(out)):
        raise ConvergenceFailure("expm produced non-finite entries")
    return out
