"""Exception hierarchy.

Everything raised for bad user input derives from :class:`ValidationError`,
which is what the command line maps to exit code 1.
"""


class ValidationError(ValueError):
    """Base class for rejected inputs."""


class GridValidationError(ValidationError):
    pass


class DuplicateNodeError(GridValidationError):
    pass


class DanglingEndpointError(GridValidationError):
    pass


class NonPositiveAdmittanceError(GridValidationError):
    pass


class SelfLoopError(GridValidationError):
    pass


class ParallelLinkError(GridValidationError):
    pass


class IsolatedNodeError(GridValidationError):
    """A node without incident links has zero attack cost."""


class InvalidComponentError(ValidationError, IndexError):
    pass


class GeneratorlessIslandError(ValidationError):
    """A connected subgrid without a generator was handed to the solver."""


class SingularSystemError(RuntimeError):
    """The network equations could not be solved to tolerance."""


class CaseParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NoGeneratorError(ValidationError):
    pass


class DuplicateBranchError(CaseParseError):
    pass


class UnknownCaseError(ValidationError, LookupError):
    pass

