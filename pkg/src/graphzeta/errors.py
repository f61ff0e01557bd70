"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class GraphZetaError(Exception):
    exit_code = 1


class GraphInputError(GraphZetaError, ValueError):
    """Malformed graph: loops, out-of-range endpoints, bad charges."""

    exit_code = 4


class ResourceLimitError(GraphZetaError, RuntimeError):
    """A size cap or enumeration guard was exceeded."""

    exit_code = 5


class DomainError(GraphZetaError, ValueError):
    exit_code = 6


class PoleError(GraphZetaError, ArithmeticError):
    """Evaluation or specialization hit a pole of a rational function."""

    exit_code = 7


class VarianceRegionError(DomainError):
    """Monte Carlo refused: the estimator would have infinite variance."""

    exit_code = 8
