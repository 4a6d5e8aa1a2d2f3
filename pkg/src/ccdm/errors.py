"""Exception hierarchy.

Input problems (bad scheme files, bad panel data) derive from
:class:`InputError`; failures while computing derive from
:class:`ComputationError`. The CLI maps these to exit codes 1 and 2.
"""

from __future__ import annotations


class CCDMError(Exception):
    """Base class for every error raised by this package."""


class InputError(CCDMError, ValueError):
    """Malformed or inconsistent input (scheme, panel, options)."""


class SchemeSyntaxError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemeSemanticError(InputError):
    def __init__(self, message: str, violations=()):
        self.violations = list(violations)
        super().__init__(message)


class PanelError(InputError):
    """Raised by the panel loader (unknown ids, duplicates, gaps)."""


class ComputationError(CCDMError, ArithmeticError):
    """A well-formed input for which a quantity is undefined."""
