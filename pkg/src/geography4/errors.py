"""Exception hierarchy.

Every error carries the CLI exit code it maps to, so the dispatcher never
has to guess.
"""


class GeographyError(Exception):
    exit_code = 3


class DomainError(GeographyError, ValueError):
    """An argument is outside the domain of an operation."""

    exit_code = 3


class ParseError(GeographyError, ValueError):
    exit_code = 2

    def __init__(self, message, line=None, source=None):
        self.line = line
        self.source = source
        where = ""
        if source is not None:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class ConfigurationError(DomainError):
    """A group profile is missing data some bound rule needs."""


class NotSupportedError(DomainError, NotImplementedError):
    pass


class BudgetExceededError(DomainError):
    def __init__(self, estimate, budget):
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"estimated {estimate} candidates exceeds budget {budget}; "
            "narrow the family or raise --budget"
        )


class WindowTooSmallError(DomainError):
    def __init__(self, window, required):
        self.window = window
        self.required = required
        super().__init__(
            f"q-function not stabilized on window {window}; "
            f"extend the window to at least {required}"
        )


class ContradictionError(GeographyError):
    """A realized point lies strictly below a proven lower bound."""

    exit_code = 5


class InternalInconsistencyError(GeographyError, AssertionError):
    exit_code = 5


class VerificationError(GeographyError):
    exit_code = 5


class RegressionMismatch(GeographyError):
    exit_code = 4
