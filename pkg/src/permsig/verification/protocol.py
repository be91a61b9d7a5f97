"""Per-writer enrollment and verification protocol.

For every writer, ``n`` genuine signatures are drawn at random for enrollment.
A one-class model is trained on them and then scored on the writer's remaining
genuine signatures and on all forgeries of that writer. Metrics are averaged
over writers with equal weight; a pooled ROC over every score is reported
alongside.
"""

from __future__ import annotations

import logging
import warnings
import zlib
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np

from permsig.core.config import OcSvmConfig
from permsig.core.errors import EmptyClassWarning, ParameterError, ProtocolError
from permsig.verification.metrics import (
    RocCurve,
    ScoredSample,
    accuracy,
    auc,
    eer,
    eer_from_curve,
    roc_from_scores,
)
from permsig.verification.ocsvm import train

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping, Sequence

    from permsig.core.models import FeatureVector

logger = logging.getLogger(__name__)

AGGREGATION = "subject_mean"


@dataclass(frozen=True)
class SubjectResult:
    """Metrics of one writer.

    Attributes:
        subject_id: Writer identifier.
        acc: Accuracy on the writer's queries.
        auc: Area under the writer's ROC curve.
        eer: Equal error rate of the writer's scores.
        n_train: Number of enrolled genuine signatures.
        n_test_genuine: Number of held-out genuine queries.
        n_test_forgery: Number of forgery queries.
        enrolled: Sample indices used for enrollment.
        scores: Every query score of this writer.
    """

    subject_id: str
    acc: float
    auc: float
    eer: float
    n_train: int
    n_test_genuine: int
    n_test_forgery: int
    enrolled: tuple[int, ...] = ()
    scores: tuple[ScoredSample, ...] = ()

    @property
    def confusion(self) -> dict[str, int]:
        """Counts of true/false acceptances and rejections."""
        counts = {"true_accept": 0, "false_reject": 0, "false_accept": 0, "true_reject": 0}
        for s in self.scores:
            if s.true_label == "genuine":
                counts["true_accept" if s.accepted else "false_reject"] += 1
            else:
                counts["false_accept" if s.accepted else "true_reject"] += 1
        return counts

    def to_row(self) -> dict[str, Any]:
        return {
            "subject_id": self.subject_id,
            "acc": self.acc,
            "auc": self.auc,
            "eer": self.eer,
            "n_train": self.n_train,
            "n_test_genuine": self.n_test_genuine,
            "n_test_forgery": self.n_test_forgery,
        }


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    """Outcome of one protocol run.

    Attributes:
        acc: Mean accuracy over writers.
        auc: Mean AUC over writers.
        eer: Mean EER over writers.
        roc: ROC curve of all scores pooled.
        pooled_auc: AUC of the pooled scores.
        pooled_eer: EER of the pooled scores; lies on ``roc``.
        subjects: Per-writer results in sorted writer order.
        protocol: Run parameters (n, seed, folds, model settings, aggregation).
    """

    acc: float
    auc: float
    eer: float
    roc: RocCurve
    pooled_auc: float
    pooled_eer: float
    subjects: tuple[SubjectResult, ...] = ()
    protocol: dict[str, Any] = field(default_factory=dict)

    @property
    def confusion(self) -> dict[str, int]:
        totals: dict[str, int] = defaultdict(int)
        for result in self.subjects:
            for key, value in result.confusion.items():
                totals[key] += value
        return dict(totals)

    def rows(self) -> list[dict[str, Any]]:
        return [result.to_row() for result in self.subjects]

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-ready dictionary."""
        return {
            "acc": self.acc,
            "auc": self.auc,
            "eer": self.eer,
            "pooled_auc": self.pooled_auc,
            "pooled_eer": self.pooled_eer,
            "confusion": self.confusion,
            "protocol": self.protocol,
            "subjects": self.rows(),
            "roc": self.roc.to_dict(),
        }


def group_by_subject(features: Iterable[FeatureVector]) -> dict[str, dict[str, list[FeatureVector]]]:
    """Split feature vectors into ``{subject: {label: [vectors sorted by sample index]}}``."""
    grouped: dict[str, dict[str, list[FeatureVector]]] = {}
    for vector in features:
        grouped.setdefault(vector.subject_id, {"genuine": [], "forgery": []})[vector.label].append(vector)
    for labels in grouped.values():
        for vectors in labels.values():
            vectors.sort(key=lambda v: v.sample_index)
    return dict(sorted(grouped.items()))


def subject_rng(seed: int, subject_id: str) -> np.random.Generator:
    """Random stream of one writer; it does not depend on which other writers take part."""
    key = zlib.crc32(subject_id.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(key,)))


def split_enrollment(
    subject_id: str,
    genuine: Sequence[FeatureVector],
    n: int,
    seed: int,
) -> tuple[list[FeatureVector], list[FeatureVector]]:
    """Draw ``n`` genuine signatures without replacement from the writer's stream.

    Returns:
        The enrolled vectors and the held-out vectors, both in input order.

    Raises:
        ProtocolError: If the writer has fewer than ``n`` genuine signatures.
    """
    if len(genuine) < n:
        raise ProtocolError(subject_id, f"needs at least {n} genuine signatures, has {len(genuine)}")
    chosen = np.sort(subject_rng(seed, subject_id).choice(len(genuine), size=n, replace=False))
    enrolled_mask = np.zeros(len(genuine), dtype=bool)
    enrolled_mask[chosen] = True
    enrollment = [v for v, keep in zip(genuine, enrolled_mask, strict=True) if keep]
    held_out = [v for v, keep in zip(genuine, enrolled_mask, strict=True) if not keep]
    return enrollment, held_out


def evaluate_subject(
    subject_id: str,
    genuine: Sequence[FeatureVector],
    forgeries: Sequence[FeatureVector],
    n: int,
    config: OcSvmConfig,
    seed: int,
) -> SubjectResult:
    """Enroll ``n`` random genuine signatures of one writer and score the rest.

    Raises:
        ProtocolError: If the writer has ``n`` or fewer genuine signatures, or no forgeries.
    """
    if len(genuine) <= n:
        raise ProtocolError(subject_id, f"needs more than {n} genuine signatures, has {len(genuine)}")
    if not forgeries:
        raise ProtocolError(subject_id, "has no forgeries")

    enrollment, held_out = split_enrollment(subject_id, genuine, n, seed)
    model = train(enrollment, config, subject_id=subject_id)
    queries = [*held_out, *forgeries]
    values = model.decision_values(queries)
    scored = tuple(
        ScoredSample(raw_score=float(value), true_label=query.label, subject_id=subject_id)
        for query, value in zip(queries, values, strict=True)
    )
    result = SubjectResult(
        subject_id=subject_id,
        acc=accuracy(scored),
        auc=auc(scored),
        eer=eer(scored),
        n_train=n,
        n_test_genuine=len(held_out),
        n_test_forgery=len(forgeries),
        enrolled=tuple(v.sample_index for v in enrollment),
        scores=scored,
    )
    logger.debug(
        "subject %s: acc=%.4f auc=%.4f eer=%.4f", subject_id, result.acc, result.auc, result.eer
    )
    return result


def summarize(results: Sequence[SubjectResult], protocol: dict[str, Any]) -> EvaluationReport:
    """Average per-writer results and pool their scores."""
    scores = [s for result in results for s in result.scores]
    genuine = np.array([s.raw_score for s in scores if s.true_label == "genuine"])
    forgery = np.array([s.raw_score for s in scores if s.true_label == "forgery"])
    pooled = roc_from_scores(genuine, forgery)
    return EvaluationReport(
        acc=float(np.mean([r.acc for r in results])),
        auc=float(np.mean([r.auc for r in results])),
        eer=float(np.mean([r.eer for r in results])),
        roc=pooled,
        pooled_auc=auc(scores),
        pooled_eer=eer_from_curve(pooled),
        subjects=tuple(results),
        protocol=protocol,
    )


def run_protocol(
    features: Iterable[FeatureVector],
    n: int,
    config: OcSvmConfig | None = None,
    seed: int = 0,
    *,
    folds: int = 5,
    jobs: int = 1,
) -> EvaluationReport:
    """Run the enrollment protocol for every writer in ``features``.

    Args:
        features: Feature vectors of every writer, both labels.
        n: Enrollment size per writer.
        config: One-class SVM settings.
        seed: Root seed; each writer draws from its own stream.
        folds: Cross-validation folds used to pick sigma_sq, recorded in the report.
        jobs: Number of writers trained concurrently.

    Returns:
        The aggregated report.

    Raises:
        ProtocolError: If some writer cannot satisfy the protocol.
        ParameterError: If ``n < 1`` or there are no writers.
    """
    config = config or OcSvmConfig()
    if n < 1:
        msg = f"enrollment size must be >= 1, got {n}"
        raise ParameterError(msg)
    grouped = group_by_subject(features)
    if not grouped:
        msg = "no subjects to evaluate"
        raise ParameterError(msg)

    def run_one(subject_id: str) -> SubjectResult:
        labels = grouped[subject_id]
        return evaluate_subject(subject_id, labels["genuine"], labels["forgery"], n, config, seed)

    logger.info("running protocol n=%d over %d subjects with %d job(s)", n, len(grouped), jobs)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, grouped))
    else:
        results = [run_one(subject_id) for subject_id in grouped]

    protocol = {
        "n": n,
        "seed": seed,
        "folds": folds,
        "subjects": list(grouped),
        "nu": config.nu,
        "sigma_sq": config.sigma_sq,
        "aggregation": AGGREGATION,
    }
    return summarize(results, protocol)


def run_protocol_by_class(
    features: Iterable[FeatureVector],
    class_assignment: Mapping[str, str],
    n: int,
    config: OcSvmConfig | None = None,
    seed: int = 0,
    *,
    classes: Sequence[str] | None = None,
    folds: int = 5,
    jobs: int = 1,
) -> dict[str, EvaluationReport]:
    """Run the protocol separately for each class of writers.

    Args:
        features: Feature vectors of every writer.
        class_assignment: Class of each writer.
        n: Enrollment size per writer.
        config: One-class SVM settings.
        seed: Root seed.
        classes: Classes to report, in order. Defaults to the sorted assigned classes.
        folds: Recorded in each report.
        jobs: Number of writers trained concurrently.

    Returns:
        One report per non-empty class. Empty classes are skipped with an
        :class:`~permsig.core.errors.EmptyClassWarning`.

    Raises:
        ProtocolError: If a writer in ``features`` has no class.
    """
    vectors = list(features)
    for subject_id in sorted({v.subject_id for v in vectors}):
        if subject_id not in class_assignment:
            raise ProtocolError(subject_id, "has no class assignment")

    members: dict[str, list[FeatureVector]] = defaultdict(list)
    for vector in vectors:
        members[class_assignment[vector.subject_id]].append(vector)

    reports: dict[str, EvaluationReport] = {}
    for name in classes if classes is not None else sorted(set(class_assignment.values())):
        if not members.get(name):
            logger.debug("class %s has no subjects", name)
            warnings.warn(f"class {name!r} has no subjects; skipped", EmptyClassWarning, stacklevel=2)
            continue
        report = run_protocol(members[name], n, config, seed, folds=folds, jobs=jobs)
        report.protocol["class"] = name
        reports[name] = report
    return reports
