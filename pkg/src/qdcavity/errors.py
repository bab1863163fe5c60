"""Exception types raised by the simulator."""


class QDCavityError(Exception):
    """Base class for all simulator errors."""


class OutOfRangeError(QDCavityError, IndexError):
    """A photon number lies beyond a precomputed deformation table."""


class ConfigurationError(QDCavityError, ValueError):
    """Physical parameters violate a constraint."""


class CutoffTooSmallError(ConfigurationError):
    """The Fock cutoff cannot hold the coherent field."""

    def __init__(self, message, required_n_max):
        super().__init__(message)
        self.required_n_max = required_n_max


class UnsupportedConfigurationError(ConfigurationError):
    """The closed-form propagator was asked for a case it does not cover."""


class BlockStructureError(QDCavityError):
    """The Hamiltonian couples states carrying different excitation labels."""


class NumericalError(QDCavityError, ArithmeticError):
    """An eigendecomposition failed or produced a non-unitary result."""
