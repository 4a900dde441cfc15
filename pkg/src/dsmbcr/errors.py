"""Exception hierarchy shared by the library and the CLI.

``ValidationError`` covers bad input (exit code 1), ``ComputationError`` covers inputs
that are well-formed but for which the requested computation is undefined (exit code 2).
"""

from __future__ import annotations


class DsmError(Exception):
    """Root of every error raised by dsmbcr."""


class ValidationError(DsmError):
    """Input is malformed or violates a model/bba invariant."""


class ComputationError(DsmError):
    """The requested computation has no defined result for this input."""


class FormulaSyntaxError(ValidationError):
    """Raised when a set formula does not follow the grammar."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset


class UnknownAtomError(ValidationError):
    """Raised when a formula names an atom the frame does not declare."""

    def __init__(self, atom: str) -> None:
        super().__init__(f"Unknown atom: {atom}")
        self.atom = atom


class FrameError(ValidationError):
    """Raised on an invalid frame of discernment."""


class ModelError(ValidationError):
    """Raised on an invalid model, or on operands from different models."""


class BbaFormatError(ValidationError):
    """Raised when a bba document cannot be loaded."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class InvalidBbaError(ValidationError):
    """Raised when masses break the bba invariants."""


class EmptyConditioningError(ValidationError):
    """Raised when conditioning on the empty element (closed world)."""


class UnknownRuleError(ValidationError):
    """Raised on a rule name outside the registry."""


class TotalConflictError(ComputationError):
    """Raised when normalization would divide by zero conflict-free mass."""


class UndefinedConditioningError(ComputationError):
    """Raised when Shafer's conditioning is undefined (Pl of the event is 0)."""


class EnumerationLimitError(ComputationError):
    """Raised when enumerating a hyper-power set above the size guard."""
