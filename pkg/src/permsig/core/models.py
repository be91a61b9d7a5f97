"""Data models shared across the pipeline."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Literal, NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from permsig.core.config import DEFAULT_RESAMPLE_LENGTH
from permsig.core.errors import InputShapeError, SeriesLengthError, ValidationError

Label = Literal["genuine", "forgery"]
LABELS: tuple[Label, ...] = ("genuine", "forgery")

FEATURE_NAMES: tuple[str, ...] = ("h_x", "c_x", "f_x", "h_y", "c_y", "f_y")
"""Column order of the six-feature vector."""


def validate_label(label: str) -> Label:
    """Return ``label`` if it is a known signature label.

    Raises:
        ValidationError: If the label is not ``genuine`` or ``forgery``.
    """
    if label not in LABELS:
        msg = f"label must be one of {LABELS}, got {label!r}"
        raise ValidationError(msg)
    return label  # type: ignore[return-value]


@dataclass(frozen=True, eq=False)
class SignatureTrace:
    """A pen trajectory: horizontal and vertical coordinates plus metadata.

    Pressure and pen angles are never carried; only the two position channels
    feed the quantifiers.

    Attributes:
        x: Horizontal coordinates.
        y: Vertical coordinates, same length as ``x``.
        subject_id: Writer identifier.
        label: ``genuine`` or ``forgery``.
        sample_index: Index of this signature within the writer's set.
        preprocessed: Whether the trace has been rescaled and resampled.
        target_length: Resampling length M used by preprocessing.
    """

    x: NDArray[np.float64]
    y: NDArray[np.float64]
    subject_id: str = ""
    label: Label = "genuine"
    sample_index: int = 0
    preprocessed: bool = False
    target_length: int = DEFAULT_RESAMPLE_LENGTH

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.ndim != 1 or y.ndim != 1:
            msg = "trace coordinates must be one-dimensional"
            raise InputShapeError(msg)
        if x.shape != y.shape:
            msg = f"x and y must have equal length, got {x.size} and {y.size}"
            raise InputShapeError(msg)
        if x.size < 2:
            msg = f"a trace needs at least 2 points, got {x.size}"
            raise SeriesLengthError(msg)
        validate_label(self.label)
        if self.preprocessed:
            if x.size != self.target_length:
                msg = f"preprocessed trace must have {self.target_length} points, got {x.size}"
                raise InputShapeError(msg)
            if min(x.min(), y.min()) < 0.0 or max(x.max(), y.max()) > 1.0:
                msg = "preprocessed trace values must lie in [0, 1]"
                raise ValidationError(msg)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self) -> int:
        return int(self.x.size)

    @property
    def key(self) -> tuple[str, str, int]:
        """Sort key: subject, label, sample index."""
        return (self.subject_id, self.label, self.sample_index)

    def with_coordinates(self, x: ArrayLike, y: ArrayLike, **changes: Any) -> SignatureTrace:
        """Copy this trace with new coordinates and optional metadata changes."""
        return replace(self, x=np.asarray(x, dtype=np.float64), y=np.asarray(y, dtype=np.float64), **changes)


class QuantifierTriple(NamedTuple):
    """Normalised entropy, statistical complexity and Fisher information of one PDF."""

    entropy: float
    complexity: float
    fisher: float


@dataclass(frozen=True)
class FeatureVector:
    """The six ordinal-pattern quantifiers of one signature.

    Attributes:
        h_x: Normalised permutation entropy of the horizontal series.
        c_x: Statistical complexity of the horizontal series.
        f_x: Fisher information of the horizontal series.
        h_y: Normalised permutation entropy of the vertical series.
        c_y: Statistical complexity of the vertical series.
        f_y: Fisher information of the vertical series.
        subject_id: Writer identifier.
        label: ``genuine`` or ``forgery``.
        sample_index: Index of the signature within the writer's set.
    """

    h_x: float
    c_x: float
    f_x: float
    h_y: float
    c_y: float
    f_y: float
    subject_id: str = ""
    label: Label = "genuine"
    sample_index: int = 0

    def __post_init__(self) -> None:
        for name in FEATURE_NAMES:
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                msg = f"feature {name} must lie in [0, 1], got {value}"
                raise ValidationError(msg)
        validate_label(self.label)

    @classmethod
    def from_triples(
        cls,
        x: QuantifierTriple,
        y: QuantifierTriple,
        *,
        subject_id: str = "",
        label: Label = "genuine",
        sample_index: int = 0,
    ) -> FeatureVector:
        return cls(
            h_x=x.entropy,
            c_x=x.complexity,
            f_x=x.fisher,
            h_y=y.entropy,
            c_y=y.complexity,
            f_y=y.fisher,
            subject_id=subject_id,
            label=label,
            sample_index=sample_index,
        )

    @property
    def key(self) -> tuple[str, str, int]:
        return (self.subject_id, self.label, self.sample_index)

    @property
    def values(self) -> tuple[float, ...]:
        """The six features in ``FEATURE_NAMES`` order."""
        return tuple(getattr(self, name) for name in FEATURE_NAMES)

    def as_array(self) -> NDArray[np.float64]:
        return np.array(self.values, dtype=np.float64)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for serialization.

        Returns:
            Dictionary representation.
        """
        return {
            "subject_id": self.subject_id,
            "sample_index": self.sample_index,
            "label": self.label,
            **{name: getattr(self, name) for name in FEATURE_NAMES},
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> FeatureVector:
        return cls(
            **{name: float(data[name]) for name in FEATURE_NAMES},
            subject_id=str(data["subject_id"]),
            label=validate_label(str(data["label"])),
            sample_index=int(data["sample_index"]),
        )


def stack_features(vectors: list[FeatureVector]) -> NDArray[np.float64]:
    """Stack feature vectors into an ``(n, 6)`` matrix."""
    if not vectors:
        return np.empty((0, len(FEATURE_NAMES)), dtype=np.float64)
    return np.vstack([v.as_array() for v in vectors])
