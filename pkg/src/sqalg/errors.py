from __future__ import annotations


class ParseError(ValueError):
    """Malformed element, expression or file; carries a 1-based position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class ModuleFormatError(ValueError):
    """Action tables that do not describe a graded module at all."""


class AlgebraError(ValueError):
    """A presented algebra whose data is inconsistent."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(str(p) for p in self.problems[:5]))


class IsoSearchInconclusive(RuntimeError):
    """Raised when the isomorphism search space is too large to exhaust."""
