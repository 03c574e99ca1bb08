"""Exception hierarchy shared by every stage of the toolchain."""

from __future__ import annotations

from typing import NamedTuple, Optional


class Loc(NamedTuple):
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


class YarelError(Exception):
    """Base class.  ``kind`` is the stable, machine-readable error name."""

    kind = "Error"

    def __init__(self, message: str, loc: Optional[Loc] = None, path: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.loc = loc
        self.path = path

    def render(self) -> str:
        """``file:line:col: kind: message``; unknown parts are left empty."""
        line, col = (self.loc.line, self.loc.col) if self.loc else (0, 0)
        return f"{self.path or '<input>'}:{line}:{col}: {self.kind}: {self.message}"

    def __str__(self) -> str:
        return self.render()


# lexing / parsing

class LexError(YarelError):
    kind = "LexError"


class UnterminatedComment(LexError):
    kind = "UnterminatedComment"


class IllegalCharacter(LexError):
    kind = "IllegalCharacter"


class ParseError(YarelError):
    kind = "SyntaxError"

    def __init__(self, message, loc=None, path=None, expected=()):
        super().__init__(message, loc, path)
        self.expected = frozenset(expected)


# import resolution

class ModuleNotFound(YarelError):
    kind = "ModuleNotFound"


class ImportCycle(YarelError):
    kind = "ImportCycle"

    def __init__(self, cycle, loc=None, path=None):
        super().__init__("import cycle: " + " -> ".join(cycle), loc, path)
        self.cycle = tuple(cycle)


class DuplicateModuleName(YarelError):
    kind = "DuplicateModuleName"


# checking

class ArityError(YarelError):
    """A static error found by the checker.

    ``kind`` is one of the names in ``ARITY_ERROR_KINDS`` and is set per
    instance, unlike the other error classes.
    """

    def __init__(self, kind: str, message: str, loc=None, path=None, **details):
        if kind not in ARITY_ERROR_KINDS:
            raise ValueError(f"unknown arity error kind {kind!r}")
        super().__init__(message, loc, path)
        self.kind = kind
        self.details = details


ARITY_ERROR_KINDS = frozenset({
    "SeqMismatch", "BranchMismatch", "BadPermutation", "UndefinedName",
    "DeclBodyMismatch", "MissingDecl", "MissingDef", "DuplicateName",
    "RecursiveCall",
})


class CheckFailed(YarelError):
    """Raised by whole-unit checks; carries every error found."""

    kind = "CheckFailed"

    def __init__(self, errors):
        self.errors = list(errors)
        first = self.errors[0]
        super().__init__(first.message, first.loc, first.path)

    def render(self) -> str:
        return "\n".join(e.render() for e in self.errors)


# running

class StepLimitExceeded(YarelError):
    kind = "StepLimitExceeded"


class WrongArgCount(YarelError):
    kind = "WrongArgCount"


# inversion / analysis

class NameCollision(YarelError):
    kind = "NameCollision"


class AnalysisError(YarelError):
    kind = "AnalysisError"


class OverflowRisk(AnalysisError):
    kind = "OverflowRisk"
