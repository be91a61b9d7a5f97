"""Exception hierarchy and warning categories."""

from __future__ import annotations


class PermsigError(Exception):
    """Base class for every error raised by permsig."""


class ValidationError(PermsigError, ValueError):
    """An argument failed validation."""


class InputShapeError(ValidationError):
    """An array has the wrong number of elements or dimensions."""


class SeriesLengthError(ValidationError):
    """A series or trace is too short for the requested operation."""


class DegenerateSupportError(ValidationError):
    """A probability vector has a support too small to normalise against."""


class ParameterError(ValidationError):
    """A numeric or categorical parameter is out of range."""


class ConfigurationError(ValidationError):
    """A configuration object holds inconsistent values."""


class ManifestError(ValidationError):
    """A dataset manifest is malformed or points at missing files."""


class TraceParseError(ValidationError):
    """A trace file could not be parsed.

    Attributes:
        path: File being parsed.
        line: One-based line number of the offending row, if known.
    """

    def __init__(self, message: str, *, path: str | None = None, line: int | None = None) -> None:
        location = path or "<trace>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.line = line


class InsufficientDataError(PermsigError, ValueError):
    """Too few samples to train or summarise."""


class UndefinedMetricError(PermsigError, ValueError):
    """A metric is undefined for the given labels (e.g. a single class)."""


class ConvergenceError(PermsigError, RuntimeError):
    """The dual solver stopped before reaching its tolerance.

    Attributes:
        residual: KKT violation when the solver gave up.
        iterations: Number of pair updates performed.
    """

    def __init__(self, residual: float, iterations: int) -> None:
        super().__init__(f"solver did not converge after {iterations} updates (KKT residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


class ModelStateError(PermsigError, RuntimeError):
    """A model was used before it was trained."""


class ProtocolError(PermsigError):
    """An evaluation protocol cannot run for a subject.

    Attributes:
        subject_id: Subject that violated the protocol requirements.
    """

    def __init__(self, subject_id: str, reason: str) -> None:
        super().__init__(f"subject {subject_id!r}: {reason}")
        self.subject_id = subject_id


class PermsigWarning(UserWarning):
    """Base category for advisory warnings; ``--strict`` escalates these."""


class ShortSeriesWarning(PermsigWarning):
    """Series shorter than ten times the number of ordinal patterns."""


class DegenerateAxisWarning(PermsigWarning):
    """A coordinate axis is constant and cannot be min-max scaled."""


class ResamplingWarning(PermsigWarning):
    """A trace is being downsampled rather than expanded."""


class EmptyClassWarning(PermsigWarning):
    """A class in a class-restricted protocol has no subjects."""
