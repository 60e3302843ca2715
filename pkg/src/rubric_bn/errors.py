"""Exception types shared across the toolkit."""

from __future__ import annotations


class RubricBnError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RubricBnError):
    """A domain object, coordinate or parameter violates its invariants."""


class ParseError(RubricBnError):
    """A document could not be parsed or is structurally malformed.

    Carries optional line/field context so file errors point at the
    offending spot.
    """

    def __init__(self, message: str, *, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        ctx = []
        if line is not None:
            ctx.append(f"line {line}")
        if field is not None:
            ctx.append(f"field {field!r}")
        if ctx:
            message = f"{message} ({', '.join(ctx)})"
        super().__init__(message)


class EncodingError(RubricBnError):
    """Observations contradict the dominance rules.

    ``conflicts`` lists the offending cells, either as ``(task, r, c)``
    tuples or as answer-node ids depending on where the conflict was
    detected.
    """

    def __init__(self, message: str, conflicts: tuple = ()):
        self.conflicts = tuple(conflicts)
        super().__init__(message)


class ImpossibleEvidenceError(RubricBnError):
    """The observed evidence has probability zero under the model.

    ``evidence`` holds a (near-)minimal offending subset of answer-node
    assignments when one could be identified.
    """

    def __init__(self, message: str, evidence: tuple = ()):
        self.evidence = tuple(evidence)
        super().__init__(message)


class CapacityError(RubricBnError):
    """An exact-enumeration size cap was exceeded."""


class UndefinedCorrelationError(RubricBnError):
    """Pearson correlation is undefined for the given vectors."""
