"""Exception types shared across the package."""


class DickeError(Exception):
    """Base class for all errors raised by dicke_qpt."""


class DegenerateCoupling(DickeError):
    """All couplings vanish where a coupling-dependent quantity is required."""


class ZeroCooperation(DickeError):
    """Cooperation number 2j = 0 where a spin-dependent quantity is required."""


class DimensionOverflow(DickeError):
    """A requested Hilbert-space dimension exceeds the configured limit."""


class DimensionMismatch(DickeError):
    """Operator and state (or two states) live in different spaces."""


class NoConvergence(DickeError):
    """An iterative procedure exhausted its budget without converging."""


class ProjectionCollapse(DickeError):
    """The even-parity projection of a trial state has (numerically) zero norm."""


class TruncationLoss(DickeError):
    """A trial state loses more norm to the Fock cutoff than tolerated."""


class NoTransitionInRange(DickeError):
    """A transition locator landed on (or outside) the sweep boundary."""


class UsageError(DickeError):
    """Invalid command-line or configuration input."""
