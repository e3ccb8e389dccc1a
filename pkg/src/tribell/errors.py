"""Exception hierarchy for tribell.

Every error raised by the public API derives from :class:`TribellError`, so
callers can catch the whole family with one clause.  Errors are semantic:
they name the violated contract, not the code path that noticed it.
"""

from __future__ import annotations


class TribellError(Exception):
    """Base class for all tribell errors."""


# --- scenario / behavior construction ---------------------------------------


class NormalizationError(TribellError, ValueError):
    """A probability slice p(..|xyz) does not sum to one within tolerance."""


class RangeError(TribellError, ValueError):
    """A probability entry lies outside [0, 1] beyond tolerance."""


class SignallingError(TribellError, ValueError):
    """Marginals are ambiguous: they depend on a traced-out setting."""


class BasisError(TribellError, ValueError):
    """A functional was evaluated in a basis its input cannot support."""


# --- catalog parsing ---------------------------------------------------------


class ParseError(TribellError, ValueError):
    """Malformed catalog text; carries entry index and field when known."""

    def __init__(self, message: str, *, entry: object = None, field: str | None = None):
        ctx = []
        if entry is not None:
            ctx.append(f"entry {entry}")
        if field is not None:
            ctx.append(f"field {field!r}")
        if ctx:
            message = f"{message} ({', '.join(ctx)})"
        super().__init__(message)
        self.entry = entry
        self.field = field


class DuplicateIdError(TribellError, ValueError):
    """Two catalog entries share an id."""


# --- moment engine -----------------------------------------------------------


class UnsupportedLevel(TribellError, ValueError):
    """Requested relaxation level outside the supported range."""


class IncompleteSet(TribellError, ValueError):
    """Generating set lacks a moment required by the requested operation."""


class StructureError(TribellError, ValueError):
    """Operation requires party-product index structure the set does not have."""


# --- solver ------------------------------------------------------------------


class SolverError(TribellError, RuntimeError):
    """Optimization failed; the attached status says how."""

    def __init__(self, message: str, status: object = None):
        super().__init__(message)
        self.status = status


class DimensionGateError(TribellError, ValueError):
    """Problem exceeds the desk-scale dimension gate and no override was given."""


class CertificationFailure(TribellError, RuntimeError):
    """Independent re-check of a reported optimum found a violated residual."""


# --- reports -----------------------------------------------------------------


class KeyMismatchError(TribellError, KeyError):
    """Report and reference table do not share row/column keys."""


class SeparationNotReproduced(TribellError, RuntimeError):
    """A headline separation margin failed to reproduce."""

    def __init__(self, message: str, margin: float | None = None):
        super().__init__(message)
        self.margin = margin
