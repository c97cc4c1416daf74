"""Exception hierarchy shared by all ruinkit modules."""


class RuinkitError(Exception):
    """Base class for every error raised by ruinkit."""


class MomentUnavailable(RuinkitError):
    pass


class TransformUnavailable(RuinkitError):
    pass


class DomainError(RuinkitError, ValueError):
    """Argument outside the region where a transform is defined."""


class NotRational(RuinkitError):
    pass


class NotSupported(RuinkitError):
    pass


class NoRoot(RuinkitError):
    pass


class PerturbedNotSupported(RuinkitError):
    """Method only defined for the unperturbed model (sigma = 0)."""


class NotPerturbed(RuinkitError):
    """Method only defined for the perturbed model (sigma > 0)."""


class SingularSystem(RuinkitError):
    pass


class InconsistentConstraints(RuinkitError, ValueError):
    pass


class UnstablePole(RuinkitError):
    """Rational transform has a pole with nonnegative real part."""


class NumericalInconsistency(RuinkitError):
    pass


class PoleAtZero(RuinkitError):
    pass


class InfeasibleMoments(RuinkitError, ValueError):
    """Moment vector is not a valid Stieltjes moment sequence."""


class OrderCap(RuinkitError):
    pass


class NegativeWeight(RuinkitError):
    pass


class NotApplicable(RuinkitError, ValueError):
    pass


class InvalidSubgenerator(RuinkitError, ValueError):
    pass


class ContourFailure(RuinkitError):
    pass


class SamplerUnavailable(RuinkitError):
    pass


class ConfigError(RuinkitError, ValueError):
    pass
