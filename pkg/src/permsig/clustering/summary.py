"""Per-writer summaries of genuine-signature features."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from permsig.core.errors import InsufficientDataError, ParameterError, ValidationError
from permsig.core.models import FEATURE_NAMES, FeatureVector

DEFAULT_SELECTION: tuple[str, ...] = ("h_x", "h_y")
"""Entropy of both axes, the default pair for clustering writers."""


def resolve_selection(selection: Sequence[str] | str) -> tuple[str, ...]:
    """Validate a feature selection; ``"all"`` means the six features.

    Raises:
        ParameterError: On unknown or repeated feature names.
    """
    if selection == "all":
        return FEATURE_NAMES
    names = (selection,) if isinstance(selection, str) else tuple(selection)
    unknown = [name for name in names if name not in FEATURE_NAMES]
    if unknown or not names:
        msg = f"feature selection must be non-empty names from {FEATURE_NAMES}, got {names}"
        raise ParameterError(msg)
    if len(set(names)) != len(names):
        msg = f"feature selection repeats a name: {names}"
        raise ParameterError(msg)
    return names


@dataclass(frozen=True, eq=False)
class SubjectSummary:
    """Mean and sample standard deviation of selected features over one writer's genuine signatures.

    Attributes:
        subject_id: Writer identifier.
        features: Names of the summarised features.
        mean: Per-feature mean.
        sd: Per-feature sample standard deviation (n - 1 denominator).
        count: Number of signatures summarised.
    """

    subject_id: str
    features: tuple[str, ...]
    mean: NDArray[np.float64]
    sd: NDArray[np.float64]
    count: int

    @property
    def vector(self) -> NDArray[np.float64]:
        """Means followed by standard deviations."""
        return np.concatenate([self.mean, self.sd])

    @property
    def columns(self) -> tuple[str, ...]:
        return (*(f"{name}_mean" for name in self.features), *(f"{name}_sd" for name in self.features))

    def to_dict(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "count": self.count,
            **dict(zip(self.columns, self.vector.tolist(), strict=True)),
        }


def summarize_subject(
    features: Sequence[FeatureVector],
    selection: Sequence[str] | str = DEFAULT_SELECTION,
) -> SubjectSummary:
    """Summarise one writer's genuine feature vectors.

    Forgeries in ``features`` are ignored.

    Raises:
        InsufficientDataError: If fewer than 2 genuine vectors remain.
        ValidationError: If the vectors belong to more than one writer.
    """
    names = resolve_selection(selection)
    genuine = [v for v in features if v.label == "genuine"]
    if len(genuine) < 2:
        msg = f"need at least 2 genuine vectors to summarise, got {len(genuine)}"
        raise InsufficientDataError(msg)
    subjects = {v.subject_id for v in genuine}
    if len(subjects) != 1:
        msg = f"vectors span several subjects: {sorted(subjects)}"
        raise ValidationError(msg)
    matrix = np.array([[getattr(v, name) for name in names] for v in genuine], dtype=np.float64)
    return SubjectSummary(
        subject_id=subjects.pop(),
        features=names,
        mean=matrix.mean(axis=0),
        sd=matrix.std(axis=0, ddof=1),
        count=len(genuine),
    )


def summarize_subjects(
    features: Iterable[FeatureVector],
    selection: Sequence[str] | str = DEFAULT_SELECTION,
) -> list[SubjectSummary]:
    """Summaries of every writer, sorted by writer id."""
    grouped: dict[str, list[FeatureVector]] = {}
    for vector in features:
        grouped.setdefault(vector.subject_id, []).append(vector)
    return [summarize_subject(grouped[subject_id], selection) for subject_id in sorted(grouped)]
