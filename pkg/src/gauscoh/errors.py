class GaussCohError(Exception):
    """Base class for errors raised by gauscoh."""


class DimensionError(GaussCohError, ValueError):
    """Matrix or vector shapes are inconsistent."""


class PairingError(GaussCohError, ValueError):
    """Eigenvalues of i*Omega*V failed to pair into a symplectic spectrum."""


class InvalidObjectError(GaussCohError, ValueError):
    """A state, channel or superchannel fails its physicality constraints."""


class OptimizerBudgetError(GaussCohError, RuntimeError):
    """The coherence optimizer exceeded its evaluation budget."""
