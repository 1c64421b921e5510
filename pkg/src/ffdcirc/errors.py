"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands live on chains of different length."""


class DenseSizeError(ValueError):
    """Dense realization requested beyond the configured site cap."""


class ConstructionError(ValueError):
    """A representation or named pattern cannot be built for the given parameters."""


class AngleConsistencyError(ValueError):
    """A constrained geometry carries two different angles for the same gate."""


class NonUnitaryError(ValueError):
    """Input matrix fails the unitarity check."""


class RecursionDomainError(ValueError):
    """An angle recursion left its domain (|sin| > 1)."""

    def __init__(self, message, index=None, species=None):
        super().__init__(message)
        self.index = index
        self.species = species


class SingularAngleError(ValueError):
    """cos(2*phi) vanished where the coupling map needs to divide by it."""


class ConditioningError(RuntimeError):
    """Polynomial roots came out complex, negative or degenerate beyond tolerance."""


class GaugeAmbiguityError(RuntimeError):
    """Degenerate quasi-energies make the fermionic operators gauge-dependent."""


class ModeExtractionError(RuntimeError):
    """No consistent signed-sum mode decomposition was found for a spectrum."""


class OracleInapplicableError(RuntimeError):
    """The operator's spectrum is incompatible with the requested free structure."""
