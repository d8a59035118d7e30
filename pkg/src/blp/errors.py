"""Exception hierarchy shared by all solver modules."""


class BlpError(Exception):
    """Base class for every error raised by this package."""


class DimensionError(BlpError, ValueError):
    pass


class SingularError(BlpError, ArithmeticError):
    pass


class ParseError(BlpError, ValueError):
    pass


class InfeasibleAt(BlpError):
    """The follower's feasible set is empty at the requested leader decision."""


class UnboundedBelow(BlpError):
    pass


class UnboundedAbove(BlpError):
    pass


class EmptyDual(BlpError):
    pass


class UnboundedEpigraph(BlpError):
    pass


class RelaxedA1Refused(BlpError):
    """A solver that needs bounded feasible sets was handed a relaxed instance."""


class PreconditionViolated(BlpError):
    pass


class NoVertices(BlpError):
    pass


class NoVerifiedCandidate(BlpError):
    pass


class SizeGuard(BlpError):
    pass
