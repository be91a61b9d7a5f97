"""Verification metrics: accuracy, ROC curve, AUC and equal error rate.

Scores are oriented so that higher means more genuine, and a score of zero or
more is an acceptance. At threshold ``t`` a forgery is falsely accepted when
its score is ``>= t`` and a genuine signature is falsely rejected when its
score is ``< t``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from scipy.stats import rankdata

from permsig.core.errors import InsufficientDataError, ParameterError, UndefinedMetricError, ValidationError
from permsig.core.models import Label, validate_label

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

EerMethod = Literal["interpolated", "convex_hull"]


@dataclass(frozen=True)
class ScoredSample:
    """A decision value with its ground truth.

    Attributes:
        raw_score: Decision value, higher is more genuine.
        true_label: ``genuine`` or ``forgery``.
        subject_id: Claimed writer.
    """

    raw_score: float
    true_label: Label
    subject_id: str = ""

    def __post_init__(self) -> None:
        if not math.isfinite(self.raw_score):
            msg = f"score must be finite, got {self.raw_score}"
            raise ValidationError(msg)
        validate_label(self.true_label)

    @property
    def accepted(self) -> bool:
        return self.raw_score >= 0.0


def _split(scored: Sequence[ScoredSample]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    genuine = np.array([s.raw_score for s in scored if s.true_label == "genuine"], dtype=np.float64)
    forgery = np.array([s.raw_score for s in scored if s.true_label == "forgery"], dtype=np.float64)
    if genuine.size == 0 or forgery.size == 0:
        msg = f"metric needs both labels, got {genuine.size} genuine and {forgery.size} forgery scores"
        raise UndefinedMetricError(msg)
    return genuine, forgery


def accuracy(scored: Sequence[ScoredSample]) -> float:
    """Fraction of samples whose verdict (score >= 0 is genuine) matches the label.

    Raises:
        InsufficientDataError: If ``scored`` is empty.
    """
    if not scored:
        msg = "accuracy of an empty sample set is undefined"
        raise InsufficientDataError(msg)
    correct = sum(1 for s in scored if s.accepted == (s.true_label == "genuine"))
    return correct / len(scored)


def auc(scored: Sequence[ScoredSample]) -> float:
    """Probability that a random genuine score beats a random forgery score, ties counting half.

    Raises:
        UndefinedMetricError: If only one label is present.
    """
    genuine, forgery = _split(scored)
    ranks = rankdata(np.concatenate([genuine, forgery]))
    u_statistic = ranks[: genuine.size].sum() - genuine.size * (genuine.size + 1) / 2.0
    return float(u_statistic / (genuine.size * forgery.size))


@dataclass(frozen=True, eq=False)
class RocCurve:
    """Error rates at every observed threshold, plus one threshold above all scores.

    Attributes:
        thresholds: Increasing thresholds.
        far: False acceptance rate at each threshold (non-increasing).
        frr: False rejection rate at each threshold (non-decreasing).
    """

    thresholds: NDArray[np.float64]
    far: NDArray[np.float64]
    frr: NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.thresholds.size)

    def area(self) -> float:
        """Trapezoidal area under the (FAR, 1 - FRR) curve."""
        far = self.far[::-1]
        tpr = 1.0 - self.frr[::-1]
        return float(np.sum(np.diff(far) * (tpr[1:] + tpr[:-1]) / 2.0))

    def rows(self) -> list[tuple[float, float, float]]:
        """``(threshold, far, frr)`` rows for export."""
        return [(float(t), float(a), float(r)) for t, a, r in zip(self.thresholds, self.far, self.frr, strict=True)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "threshold": self.thresholds.tolist(),
            "far": self.far.tolist(),
            "frr": self.frr.tolist(),
        }


def roc_from_scores(genuine: NDArray[np.float64], forgery: NDArray[np.float64]) -> RocCurve:
    """ROC curve from raw genuine and forgery score arrays."""
    observed = np.unique(np.concatenate([genuine, forgery]))
    thresholds = np.append(observed, np.nextafter(observed[-1], np.inf))
    sorted_genuine = np.sort(genuine)
    sorted_forgery = np.sort(forgery)
    # forgeries with score >= t, genuines with score < t
    far = (sorted_forgery.size - np.searchsorted(sorted_forgery, thresholds, side="left")) / sorted_forgery.size
    frr = np.searchsorted(sorted_genuine, thresholds, side="left") / sorted_genuine.size
    return RocCurve(thresholds=thresholds, far=far, frr=frr)


def roc_curve(scored: Sequence[ScoredSample]) -> RocCurve:
    """Sweep thresholds over the observed scores.

    Raises:
        UndefinedMetricError: If only one label is present.
    """
    return roc_from_scores(*_split(scored))


def _interpolated_eer(curve: RocCurve) -> float:
    gap = curve.far - curve.frr
    # gap starts at 1 (everything accepted) and ends at -1 (everything rejected)
    k = int(np.argmax(gap <= 0.0))
    if gap[k] == 0.0:
        return float(curve.far[k])
    weight = gap[k - 1] / (gap[k - 1] - gap[k])
    return float(curve.far[k - 1] + weight * (curve.far[k] - curve.far[k - 1]))


def _lower_hull(points: NDArray[np.float64]) -> list[tuple[float, float]]:
    hull: list[tuple[float, float]] = []
    for x, y in sorted({(float(a), float(b)) for a, b in points}):
        while len(hull) >= 2:
            (x0, y0), (x1, y1) = hull[-2], hull[-1]
            if (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0) > 0.0:
                break
            hull.pop()
        hull.append((x, y))
    return hull


def _convex_hull_eer(curve: RocCurve) -> float:
    hull = _lower_hull(np.column_stack([curve.far, curve.frr]))
    best = 0.0
    for (x0, y0), (x1, y1) in zip(hull, hull[1:], strict=False):
        if x0 == x1 or y0 == y1:
            continue
        # line a*x + b*y = 1 through both points meets x = y at 1 / (a + b)
        a, b = np.linalg.solve(np.array([[x0, y0], [x1, y1]]), np.ones(2))
        best = max(best, float(1.0 / (a + b)))
    return best


def eer(scored: Sequence[ScoredSample], method: EerMethod = "interpolated") -> float:
    """Equal error rate, the operating point where FAR equals FRR.

    Args:
        scored: Scored samples of both labels.
        method: ``interpolated`` walks the ROC polyline and interpolates
            linearly across the first threshold where FAR - FRR changes sign.
            ``convex_hull`` intersects the ROC convex hull with the diagonal.

    Raises:
        UndefinedMetricError: If only one label is present.
        ParameterError: If ``method`` is unknown.
    """
    curve = roc_curve(scored)
    return eer_from_curve(curve, method)


def eer_from_curve(curve: RocCurve, method: EerMethod = "interpolated") -> float:
    if method == "interpolated":
        return _interpolated_eer(curve)
    if method == "convex_hull":
        return _convex_hull_eer(curve)
    msg = f"unknown EER method {method!r}"
    raise ParameterError(msg)
