"""Exception types shared by all modules."""

from __future__ import annotations


class FunDataError(Exception):
    """Base class for errors raised by fda_engine.

    ``code`` is the machine-greppable prefix printed by the CLI.
    """

    code = "E_INPUT"


class ValidationError(FunDataError, ValueError):
    """Invalid container, argument, shape or file content."""


class NumericError(FunDataError, ArithmeticError):
    """Numeric failure: non-finite results, singular systems, degenerate resamples."""

    code = "E_NUMERIC"
