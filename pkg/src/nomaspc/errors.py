"""Exception hierarchy for nomaspc.

Numerical failures are semantic: a caller can distinguish "the integral did
not converge" from "the alternating sum lost too much precision" from "the
requested operating point is physically impossible".
"""


class NomaSpcError(Exception):
    """Base class for all nomaspc-specific errors."""


class NonConvergence(NomaSpcError):
    """Adaptive quadrature exhausted its subdivision budget before reaching
    the requested tolerance."""


class CombinatorialBlowup(NomaSpcError):
    """A multinomial expansion would generate more terms than the configured
    cap allows."""


class PrecisionLoss(NomaSpcError):
    """An alternating sum produced a value too far outside [0, 1] to be
    explained by benign rounding; the result cannot be trusted."""


class CeilingViolation(NomaSpcError):
    """The decoding threshold exceeds the interference-limited SINR ceiling
    alpha_h / alpha_l; the requested rate is unreachable at any SNR."""


class InfeasibleTargets(NomaSpcError):
    """The low-priority reliability target is unreachable: the SIC stage
    alone (pinned by the high-priority target) already exceeds it."""


class MaxIterations(NomaSpcError):
    """An iterative solver hit its iteration cap before converging."""


class ScenarioError(NomaSpcError):
    """A scenario file failed to parse or validate; the message carries the
    offending section/key."""
