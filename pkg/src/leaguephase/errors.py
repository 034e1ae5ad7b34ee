"""Exception hierarchy.

Everything raised on purpose derives from :class:`LeaguePhaseError`, and the
argument-style failures also derive from :class:`ValueError` so that callers
who only care about "bad input" can catch the builtin.
"""

from __future__ import annotations


class LeaguePhaseError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LeaguePhaseError, ValueError):
    pass


class NumericRangeError(LeaguePhaseError, ArithmeticError):
    """A computed quantity left the finite floating point range."""


class InvalidRhoError(LeaguePhaseError, ValueError):
    """The dependence parameter makes a low-score correction factor negative.

    ``match_index`` is set when the failure comes from a specific training
    observation, ``rho`` carries the offending value when known.
    """

    def __init__(self, message: str, *, rho: float | None = None, match_index: int | None = None):
        super().__init__(message)
        self.rho = rho
        self.match_index = match_index


class FitDegenerateError(LeaguePhaseError):
    pass


class SingularInformationError(LeaguePhaseError):
    pass


class GenerationFailureError(LeaguePhaseError):
    pass


class ParseError(LeaguePhaseError, ValueError):
    def __init__(self, message: str, *, line: int | None = None, path: str | None = None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.line = line
        self.path = path


class DuplicateKeyError(ParseError):
    pass
