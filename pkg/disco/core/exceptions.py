"""Exception hierarchy shared by the library and the command line."""

from typing import Optional


class DiscoError(Exception):
    """Base class for all errors raised by disco."""


class DiscoParseError(DiscoError):
    """Malformed input text."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        source: Optional[str] = None,
    ):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        super().__init__(self._format())

    def _format(self) -> str:
        where = []
        if self.source:
            where.append(self.source)
        if self.line is not None:
            where.append(f"line {self.line}")
            if self.column is not None:
                where[-1] += f", column {self.column}"
        if where:
            return f"{': '.join(where)}: {self.message}"
        return self.message


class ArityMismatchError(DiscoParseError):
    """A predicate is used with two different arities."""


class RuleValidationError(DiscoParseError):
    """A clause parses but is not an admissible rule."""


class ContractViolation(DiscoError):
    """An operation was called with arguments breaking its precondition."""


class ResourceGuardError(DiscoError):
    """A requested output would exceed a configured size guard."""


class LearningTimeout(DiscoError):
    """The learner ran out of its wall-clock budget."""
