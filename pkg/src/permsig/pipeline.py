"""Feature extraction over whole datasets."""

from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, TypeVar

from permsig.core.config import DEFAULT_RESAMPLE_LENGTH, OrdinalConfig
from permsig.core.errors import PermsigError, PermsigWarning
from permsig.core.preprocess import preprocess_trace
from permsig.core.quantifiers import quantify_signature
from permsig.dataio.traces import load_trace

if TYPE_CHECKING:
    from pathlib import Path

    from permsig.core.models import FeatureVector, SignatureTrace
    from permsig.dataio.manifest import DatasetManifest, ManifestItem

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass(frozen=True)
class ExtractionFailure:
    """A trace that could not be turned into features.

    Attributes:
        key: (subject, label, sample index) of the trace.
        path: File the trace came from, if any.
        error: Human-readable reason.
    """

    key: tuple[str, str, int]
    path: Path | None
    error: str


@dataclass(frozen=True)
class ExtractionResult:
    """Feature vectors in sorted key order plus any per-trace failures."""

    vectors: tuple[FeatureVector, ...] = ()
    failures: tuple[ExtractionFailure, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return not self.failures


def featurize(
    trace: SignatureTrace,
    config: OrdinalConfig | None = None,
    resample_length: int = DEFAULT_RESAMPLE_LENGTH,
) -> FeatureVector:
    """Preprocess a raw trace and compute its six features."""
    return quantify_signature(preprocess_trace(trace, resample_length), config)


def run_tasks(tasks: Sequence[T], work: Callable[[T], R], jobs: int) -> list[R]:
    """Apply ``work`` to every task on up to ``jobs`` threads; results keep task order."""
    if jobs > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(work, tasks))
    return [work(task) for task in tasks]


def extract_features(
    manifest: DatasetManifest,
    config: OrdinalConfig | None = None,
    resample_length: int = DEFAULT_RESAMPLE_LENGTH,
    *,
    jobs: int = 1,
) -> ExtractionResult:
    """Load, preprocess and quantify every trace listed in a manifest.

    A trace that fails to load or to quantify is recorded as a failure and
    the rest are still processed. Output order is the sorted key order
    whatever the number of workers.
    """
    config = config or OrdinalConfig()
    items = list(manifest.items())

    def work(item: ManifestItem) -> FeatureVector | ExtractionFailure:
        try:
            trace = load_trace(
                item.path,
                manifest.fmt,
                subject_id=item.subject_id,
                label=item.label,
                sample_index=item.sample_index,
            )
            return featurize(trace, config, resample_length)
        except (PermsigError, PermsigWarning, OSError) as e:
            logger.warning("failed to process %s: %s", item.path, e)
            return ExtractionFailure(key=item.key, path=item.path, error=str(e))

    return _collect(run_tasks(items, work, jobs), len(items))


def extract_trace_features(
    traces: Iterable[SignatureTrace],
    config: OrdinalConfig | None = None,
    resample_length: int = DEFAULT_RESAMPLE_LENGTH,
    *,
    jobs: int = 1,
) -> ExtractionResult:
    """Same as :func:`extract_features` for traces already in memory."""
    config = config or OrdinalConfig()
    ordered = sorted(traces, key=lambda t: t.key)

    def work(trace: SignatureTrace) -> FeatureVector | ExtractionFailure:
        try:
            return featurize(trace, config, resample_length)
        except (PermsigError, PermsigWarning) as e:
            logger.warning("failed to process trace %s: %s", trace.key, e)
            return ExtractionFailure(key=trace.key, path=None, error=str(e))

    return _collect(run_tasks(ordered, work, jobs), len(ordered))


def _collect(outcomes: list[FeatureVector | ExtractionFailure], total: int) -> ExtractionResult:
    vectors = tuple(o for o in outcomes if not isinstance(o, ExtractionFailure))
    failures = tuple(o for o in outcomes if isinstance(o, ExtractionFailure))
    logger.info("extracted %d of %d feature vectors (%d failed)", len(vectors), total, len(failures))
    return ExtractionResult(vectors=vectors, failures=failures)
