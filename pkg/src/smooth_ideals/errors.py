"""Exception hierarchy.

The CLI maps the three families to exit codes: input errors to 1, numerical
failures to 2 and certification failures to 3.
"""


class IdealSpaceError(Exception):
    """Base class for all package errors."""


class InputError(IdealSpaceError, ValueError):
    """Malformed or inconsistent input."""


class NumericalFailure(IdealSpaceError):
    """A numerical step could not be carried out reliably."""


class CertificationFailure(IdealSpaceError):
    """A certificate or invariant check did not hold."""


class MergeToleranceViolation(InputError):
    """Two points of a configuration are closer than the merge tolerance."""


class CodimMismatch(InputError):
    """A subspace does not have the codimension required by its configuration."""


class SingularFiber(NumericalFailure):
    """The interpolation matrix is singular or too badly conditioned."""

    def __init__(self, message, condition_number=float("inf")):
        super().__init__(message)
        self.condition_number = condition_number


class TransversalityFail(NumericalFailure):
    """A transversal does not surject onto the jets of some ``m_Y``."""

    def __init__(self, message, witness=None, min_singular_value=None):
        super().__init__(message)
        self.witness = witness
        self.min_singular_value = min_singular_value


class NotTransverse(NumericalFailure):
    """A subspace of ``F'`` does not meet ``F`` transversally."""


class ComplexSpectrum(NumericalFailure):
    """Multiplication operators have eigenvalues with non-negligible imaginary part."""


class ClusterAmbiguity(NumericalFailure):
    """Eigenvalue clusters are too close to be separated."""


class ExtrapolationDivergence(NumericalFailure):
    """Sampled subspaces do not form a Cauchy sequence."""


class ClusterOracleFail(CertificationFailure):
    """A cluster passed to an intersection does not represent an ideal."""


class InjectivityWitnessFail(CertificationFailure):
    """Two distinct ideals were mapped to the same coordinates."""

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class QuadratureWarning(UserWarning):
    """Black-box simplex quadrature did not converge to the requested tolerance."""
