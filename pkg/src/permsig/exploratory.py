"""Descriptive statistics of feature sets.

These produce the plot-ready tables behind entropy-complexity and
entropy-Fisher scatter plots and the per-writer quantifier tables.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.stats import pearsonr

from permsig.core.errors import InsufficientDataError, ParameterError
from permsig.core.models import FEATURE_NAMES, LABELS, FeatureVector

PLANE_COLUMNS: tuple[str, ...] = ("subject_id", "label", "sample_index", "axis", "entropy", "complexity", "fisher")
MIN_CORRELATION_SAMPLES = 3


def describe_columns() -> tuple[str, ...]:
    stats = [f"{name}_{stat}" for name in FEATURE_NAMES for stat in ("mean", "sd")]
    return ("subject_id", "label", "count", *stats)


def describe_subjects(vectors: Iterable[FeatureVector]) -> list[dict[str, Any]]:
    """Mean and sample SD of each feature per writer and label.

    Groups with a single signature report an SD of NaN.
    """
    groups: dict[tuple[str, str], list[FeatureVector]] = {}
    for vector in vectors:
        groups.setdefault((vector.subject_id, vector.label), []).append(vector)

    rows = []
    for (subject_id, label), members in sorted(groups.items()):
        matrix = np.array([v.values for v in members], dtype=np.float64)
        means = matrix.mean(axis=0)
        sds = matrix.std(axis=0, ddof=1) if len(members) > 1 else np.full(len(FEATURE_NAMES), np.nan)
        row: dict[str, Any] = {"subject_id": subject_id, "label": label, "count": len(members)}
        for name, mean, sd in zip(FEATURE_NAMES, means, sds, strict=True):
            row[f"{name}_mean"] = float(mean)
            row[f"{name}_sd"] = float(sd)
        rows.append(row)
    return rows


@dataclass(frozen=True)
class Correlation:
    """Pearson correlation of two features within one label."""

    label: str
    count: int
    r: float
    p_value: float

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready form; undefined values become ``None``."""
        return {
            "label": self.label,
            "count": self.count,
            "r": None if math.isnan(self.r) else self.r,
            "p_value": None if math.isnan(self.p_value) else self.p_value,
        }


def feature_correlation(
    vectors: Sequence[FeatureVector],
    first: str = "h_x",
    second: str = "h_y",
) -> dict[str, Correlation]:
    """Correlation between two features, computed separately for each label.

    A label whose values are constant in either feature gets ``r = nan``.

    Raises:
        ParameterError: On an unknown feature name.
        InsufficientDataError: If a present label has fewer than 3 vectors.
    """
    for name in (first, second):
        if name not in FEATURE_NAMES:
            msg = f"unknown feature {name!r}; expected one of {FEATURE_NAMES}"
            raise ParameterError(msg)

    results = {}
    for label in LABELS:
        members = [v for v in vectors if v.label == label]
        if not members:
            continue
        if len(members) < MIN_CORRELATION_SAMPLES:
            msg = f"need at least {MIN_CORRELATION_SAMPLES} {label} vectors for a correlation, got {len(members)}"
            raise InsufficientDataError(msg)
        a = np.array([getattr(v, first) for v in members])
        b = np.array([getattr(v, second) for v in members])
        if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
            results[label] = Correlation(label, len(members), float("nan"), float("nan"))
            continue
        statistic, p_value = pearsonr(a, b)
        results[label] = Correlation(label, len(members), float(statistic), float(p_value))
    return results


def plane_points(vectors: Iterable[FeatureVector]) -> list[dict[str, Any]]:
    """One row per signature and axis with its entropy, complexity and Fisher information."""
    rows = []
    for vector in sorted(vectors, key=lambda v: v.key):
        for axis in ("x", "y"):
            rows.append(
                {
                    "subject_id": vector.subject_id,
                    "label": vector.label,
                    "sample_index": vector.sample_index,
                    "axis": axis,
                    "entropy": getattr(vector, f"h_{axis}"),
                    "complexity": getattr(vector, f"c_{axis}"),
                    "fisher": getattr(vector, f"f_{axis}"),
                }
            )
    return rows
