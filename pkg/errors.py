"""Exception types shared by the coupler toolkit.

Hard failures raise one of these. Soft conditions (near poles, hybridized
states, regime warnings) are reported as flags on results instead.
"""
from __future__ import annotations


class CouplerError(Exception):
    """Base class for all toolkit errors."""


class DomainError(CouplerError, ValueError):
    """An input violates a precondition (non-positive capacitance, bad truncation...)."""


class PoleError(CouplerError, ArithmeticError):
    """A perturbative denominator fell inside the hard pole guard."""

    def __init__(self, term: str, denominator: float):
        self.term = term
        self.denominator = float(denominator)
        super().__init__(f"{term}: denominator {self.denominator:.3e} GHz is at a pole")


class NumericError(CouplerError, ArithmeticError):
    """A numerical routine could not produce a trustworthy result."""


class ConfigError(CouplerError, ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}:{line}: " if line is not None else f"{path}: "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(f"{where}{message}")
