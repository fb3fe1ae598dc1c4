"""Domain exceptions.

Everything derives from ``ValueError`` so callers validating input can keep catching that.
Flagged outcomes (budget exhaustion, divergent tails, undetermined state values) are returned
as values and never raised.
"""


class ResolventLabError(ValueError):
    """Base class for all domain errors."""


class DimensionMismatch(ResolventLabError):
    pass


class DegenerateFormError(ResolventLabError):
    pass


class OddDimensionError(DegenerateFormError):
    pass


class DependentVectorsError(ResolventLabError):
    pass


class NonIsotropicError(ResolventLabError):
    pass


class InconsistentRegularityData(ResolventLabError):
    pass


class InvalidGeneratorError(ResolventLabError):
    """Spectral parameter on the imaginary axis."""


class OutOfDiskError(ResolventLabError):
    pass


class NonSymplecticMapError(ResolventLabError):
    pass


class InvalidBasisError(ResolventLabError):
    pass


class InvalidCovarianceError(ResolventLabError):
    pass


class InvalidConstraintSet(ResolventLabError):
    pass


class ChainTooLongError(ResolventLabError):
    pass


class FourierClosureError(ResolventLabError):
    """Potential has no Fourier transform, or violates the zero-mean condition."""


class DimensionBudgetExceeded(ResolventLabError):
    pass


class QuadratureError(ResolventLabError):
    def __init__(self, message: str, achieved_error: float):
        super().__init__(f"{message} (achieved error {achieved_error:.3e})")
        self.achieved_error = achieved_error


class SolverError(ResolventLabError):
    pass


class ConfigurationError(ResolventLabError):
    """Experiment configuration is valid JSON but cannot be run as given."""
