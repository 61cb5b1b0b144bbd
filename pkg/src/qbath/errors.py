"""Exception types shared across the package."""


class QBathError(Exception):
    """Base class for all package-specific failures."""


class DimensionMismatch(QBathError):
    """Operands do not have compatible shapes."""


class NonHermitianInput(QBathError):
    """An operator that must be Hermitian is not, beyond tolerance."""


class ConvergenceFailure(QBathError):
    """An iterative dense solver (eigensolver, expm) did not converge."""


class DomainError(QBathError):
    """A scalar function is undefined on part of an operator's spectrum."""


class SingularPairing(QBathError):
    """An eigenvalue pairing a_i + a_j underflows; Sylvester solve is ill posed."""


class OffBisector(QBathError):
    """beta_p != m^2 w^2 beta_q, so no optical-master-equation mapping exists."""


class InvalidModel(QBathError):
    """Model parameters are inconsistent with the requested generator kind."""


class TraceDrift(QBathError):
    """The propagated density matrix lost trace normalization."""


class InsufficientSamples(QBathError):
    """Ensemble statistics are too noisy for the requested check."""


class ConfigError(QBathError):
    """A run configuration failed schema validation."""
