"""
Exception hierarchy shared by every gradeloc app.

Management commands map these onto exit codes: configuration and domain
problems exit with 3, failures while a run is in progress exit with 4.
"""


class GradelocError(Exception):
    """Base class for all simulator errors."""

    exit_code = 4


class ConfigurationError(GradelocError):
    """A scenario, model or command argument is invalid."""

    exit_code = 3

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f'{field}: {message}'
        super().__init__(message)


class DomainError(GradelocError):
    """An input lies outside the domain of a geometric or analytic formula."""

    exit_code = 3


class PlanningError(GradelocError):
    """No deployment plan satisfies the requested targets."""

    exit_code = 3


class ContractViolation(GradelocError):
    """A caller broke an ordering or state precondition."""


class NoCandidates(GradelocError):
    """A centroid was requested over an empty candidate set."""


class FineLocalizationUnavailable(GradelocError):
    """Fewer than three non-collinear anchors are within NTL range."""


class UndefinedOverhead(GradelocError):
    """The overhead baseline fired no fine-grained localizations."""


class EmptyTraceError(GradelocError):
    """A trace holds no usable samples for the requested NTL."""


class ModelValidityWarning(UserWarning):
    """Inputs fall outside the range where the analytic model is exact."""
