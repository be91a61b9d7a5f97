"""Parallelepiped (axis-aligned box) classifier over writer summaries."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import ArrayLike, NDArray

from permsig.clustering.summary import SubjectSummary
from permsig.core.errors import InputShapeError, InsufficientDataError, ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Box:
    """Per-dimension ``[lower, upper]`` interval of one class."""

    lower: NDArray[np.float64]
    upper: NDArray[np.float64]

    def __post_init__(self) -> None:
        if self.lower.shape != self.upper.shape:
            msg = "box bounds differ in shape"
            raise InputShapeError(msg)
        if np.any(self.lower > self.upper):
            msg = "box lower bound exceeds upper bound"
            raise ValidationError(msg)

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    def contains(self, point: NDArray[np.float64]) -> bool:
        return bool(np.all((self.lower <= point) & (point <= self.upper)))


@dataclass(frozen=True, eq=False)
class ParallelepipedModel:
    """One box per class.

    Attributes:
        boxes: Class name to its box.
        columns: Dimension names, e.g. ``h_x_mean``.
    """

    boxes: dict[str, Box]
    columns: tuple[str, ...]

    def classify(self, point: SubjectSummary | ArrayLike) -> str | None:
        """Class whose box contains ``point``; smallest volume wins overlaps, ``None`` if outside all boxes."""
        vector = point.vector if isinstance(point, SubjectSummary) else np.asarray(point, dtype=np.float64)
        if vector.shape != (len(self.columns),):
            msg = f"expected a point with {len(self.columns)} coordinates, got shape {vector.shape}"
            raise InputShapeError(msg)
        containing = [(box.volume, name) for name, box in self.boxes.items() if box.contains(vector)]
        if not containing:
            return None
        return min(containing)[1]

    def to_dict(self) -> dict[str, Any]:
        """``{class: {dimension: [min, max]}}``."""
        return {
            name: {
                column: [float(low), float(high)]
                for column, low, high in zip(self.columns, box.lower, box.upper, strict=True)
            }
            for name, box in self.boxes.items()
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Mapping[str, Sequence[float]]]) -> ParallelepipedModel:
        columns: tuple[str, ...] | None = None
        boxes: dict[str, Box] = {}
        for name, dims in data.items():
            if columns is None:
                columns = tuple(dims)
            elif tuple(dims) != columns:
                msg = f"class {name!r} has dimensions {tuple(dims)}, expected {columns}"
                raise ValidationError(msg)
            bounds = np.array([dims[c] for c in columns], dtype=np.float64)
            boxes[name] = Box(lower=bounds[:, 0], upper=bounds[:, 1])
        return cls(boxes=boxes, columns=columns or ())


def parallelepiped_fit(summaries: Sequence[SubjectSummary], classes: Mapping[str, str]) -> ParallelepipedModel:
    """Fit one min/max box per class over the writers assigned to it.

    Args:
        summaries: Writer summaries built from one feature selection.
        classes: Class of each writer; writers without a class are ignored.

    Raises:
        InsufficientDataError: If no writer has a class.
        ValidationError: If summaries use different feature selections.
    """
    grouped: dict[str, list[NDArray[np.float64]]] = {}
    columns: tuple[str, ...] | None = None
    for summary in summaries:
        if summary.subject_id not in classes:
            continue
        if columns is None:
            columns = summary.columns
        elif summary.columns != columns:
            msg = "summaries were built from different feature selections"
            raise ValidationError(msg)
        grouped.setdefault(classes[summary.subject_id], []).append(summary.vector)
    if columns is None:
        msg = "no summary has a class assignment"
        raise InsufficientDataError(msg)

    boxes = {}
    for name in sorted(grouped):
        points = np.vstack(grouped[name])
        boxes[name] = Box(lower=points.min(axis=0), upper=points.max(axis=0))
        logger.debug("class %s: %d members, volume %.3g", name, points.shape[0], boxes[name].volume)
    return ParallelepipedModel(boxes=boxes, columns=columns)


def parallelepiped_classify(model: ParallelepipedModel, point: SubjectSummary | ArrayLike) -> str | None:
    """See :meth:`ParallelepipedModel.classify`."""
    return model.classify(point)
