"""Exception hierarchy shared by all hypflow modules."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class PreconditionError(ValueError):
    """A geometric precondition fails at one or more grid nodes.

    ``nodes`` holds the flat indices of the offending nodes.
    """

    def __init__(self, message, nodes=()):
        self.nodes = [int(i) for i in nodes]
        if self.nodes:
            shown = ", ".join(str(i) for i in self.nodes[:20])
            more = "" if len(self.nodes) <= 20 else f" (+{len(self.nodes) - 20} more)"
            message = f"{message}; offending nodes: [{shown}]{more}"
        super().__init__(message)


class TwoConvexityError(PreconditionError):
    """Principal curvatures leave the cone {sigma_1 > 0, sigma_2 > 0}."""


class MeanConvexityError(PreconditionError):
    """Mean curvature sigma_1 is not strictly positive."""


class GeometryOverflowError(OverflowError):
    """Warp factors overflowed or produced non-finite curvature."""


class StepRejected(RuntimeError):
    """A time step produced an invalid state; the caller may retry with a smaller step."""


class FlowBreakdown(RuntimeError):
    """Repeated step rejection. ``last_state`` is the last accepted FlowState."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class FitUnreliable(RuntimeError):
    """The data to be fitted sit at or below floating-point noise."""
