"""Exception hierarchy.

Parameter problems derive from :class:`ParameterError` (a ``ValueError``),
dynamical problems from :class:`InstabilityError`. The CLI maps the two
families onto exit codes 2 and 3.
"""


class CVFeedbackError(Exception):
    """Base class for all package errors."""


class ParameterError(CVFeedbackError, ValueError):
    """Model or configuration parameters are outside their admissible range."""


class EtaOutOfRange(ParameterError):
    pass


class NegativeChi(ParameterError):
    pass


class FeedbackWithoutDetection(ParameterError):
    """Nonzero feedback gain requested with zero detection efficiency."""


class StepTooLarge(ParameterError):
    pass


class CurrentUndefined(ParameterError):
    """The joint homodyne current does not exist when nothing is detected."""


class InstabilityError(CVFeedbackError):
    """The linear dynamics has no unique steady state."""


class UnstableSystem(InstabilityError):
    pass


class UnstableMeans(InstabilityError):
    pass


class NotConverged(CVFeedbackError):
    pass


class CovarianceError(CVFeedbackError, ValueError):
    """A covariance matrix does not have the structure an operation needs."""


class NotPositiveDefinite(CovarianceError):
    pass


class StructureViolation(CovarianceError):
    pass


class BranchViolation(CovarianceError):
    pass
