"""Source spans, diagnostic codes, and the error hierarchy shared by all stages."""
from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceSpan:
    """A 1-based region of a source file; start is never past end."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def __post_init__(self) -> None:
        if (self.start_line, self.start_col) > (self.end_line, self.end_col):
            raise ValueError(f"backwards span {self}")

    def to(self, other: SourceSpan) -> SourceSpan:
        """The smallest span covering both self and other."""
        return SourceSpan(
            self.file, self.start_line, self.start_col, other.end_line, other.end_col
        )

    def __str__(self) -> str:
        return f"{self.file}:{self.start_line}:{self.start_col}"


# Diagnostic codes, grouped by pipeline stage.
LEX_ERROR = "E101"
PARSE_ERROR = "E102"

UNKNOWN_IDENT = "E201"
BAD_APPLICATION = "E202"
DUPLICATE_DECL = "E203"
SHADOWS_CTOR = "E204"

UNKNOWN_NAME = "E301"
ARITY_MISMATCH = "E302"
TYPE_MISMATCH = "E303"
UNEXPECTED_FORM = "E304"
CTOR_UNAVAILABLE = "E305"
CTOR_STUCK = "E306"
NOT_A_DATA_TYPE = "E307"
IMPOSSIBLE_REJECTED = "E308"
WRONG_DATA_TYPE = "E309"
DUPLICATE_PATTERN_VAR = "E310"
IMPOSSIBLE_HAS_BODY = "E311"
MISSING_BODY = "E312"
DUPLICATE_NAME = "E313"

MISSING_CASE = "E401"
CANNOT_SPLIT = "E402"

FUEL_EXHAUSTED = "E501"

UNREACHABLE_CLAUSE = "W401"
STRICT_FIELD_SCOPE = "W301"


class InternalError(Exception):
    """An invariant the pipeline was supposed to maintain has been violated."""


class SitError(Exception):
    """Base for all user-facing diagnostics."""

    def __init__(self, code: str, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.span = span

    def render(self) -> str:
        where = str(self.span) if self.span else "<unknown>:0:0"
        return f"{where}: error[{self.code}]: {self.message}"


class LexError(SitError):
    pass


class ParseError(SitError):
    pass


class ResolveError(SitError):
    pass


class TypeCheckError(SitError):
    """A rejection from the type checker, optionally with the two offending types."""

    def __init__(
        self,
        code: str,
        message: str,
        span: SourceSpan | None = None,
        expected: str | None = None,
        actual: str | None = None,
    ):
        super().__init__(code, message, span)
        self.expected = expected
        self.actual = actual


class CoverageError(TypeCheckError):
    pass


class FuelError(SitError):
    def __init__(self, limit: int):
        super().__init__(FUEL_EXHAUSTED, f"evaluation exceeded {limit} reduction steps")
        self.limit = limit


@dataclass(frozen=True)
class Warning:
    """A non-fatal diagnostic; never changes the exit status."""

    code: str
    message: str
    span: SourceSpan | None = None

    def render(self) -> str:
        where = str(self.span) if self.span else "<unknown>:0:0"
        return f"{where}: warning[{self.code}]: {self.message}"
