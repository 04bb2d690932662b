"""Exceptions raised by ikchain"""


class IKChainError(Exception):
    """Base class for every error raised by the solver layers"""
    pass


class SamplingError(IKChainError):
    """A trigonometric polynomial could not be fitted from the supplied samples"""
    pass


class SizeCapError(IKChainError):
    """Dense work was requested for a chain longer than the configured cap"""
    pass


class HomogeneityError(IKChainError):
    """The explicit Hamiltonian only exists at the homogeneous point"""
    pass


class NormalizationError(IKChainError):
    """t(0) is too small to be inverted"""
    pass


class PairingError(IKChainError):
    """Roots of an eigenvalue curve could not be collapsed into zeroes"""

    def __init__(self, message, unpaired=()):
        super().__init__(message)
        self.unpaired = tuple(unpaired)


class PoleError(IKChainError):
    """A zero sits on a pole of the energy formula"""
    pass


class ConvergenceError(IKChainError):
    """Newton iteration stopped without reaching the requested residual"""

    def __init__(self, message, best=None, trace=()):
        super().__init__(message)
        self.best = best  # best iterate seen, a ZeroSet when raised by solve_bae
        self.trace = tuple(trace)


class DegenerateConfigurationError(ConvergenceError):
    """The Newton Jacobian is singular at the current iterate"""
    pass


class DomainError(IKChainError):
    """A closed form was evaluated outside the range where it holds"""
    pass


class ConfigError(IKChainError):
    """Invalid command line or config file settings"""
    pass
