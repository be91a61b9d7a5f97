"""Seeded synthetic signature corpus.

Each writer gets a smooth base trajectory made of a few low-order harmonics
per axis. Genuine signatures add a small smooth perturbation to the base.
Forgeries are drawn more slowly (more samples), add a larger shape
distortion and carry a sample-level tremor, which is what raises their
ordinal-pattern entropy. The output is a pure function of the configuration.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np

from permsig.core.config import SynthConfig
from permsig.core.models import SignatureTrace
from permsig.dataio.manifest import DatasetManifest, SubjectEntry, save_manifest
from permsig.dataio.traces import TraceFormat, write_trace

if TYPE_CHECKING:
    from numpy.typing import NDArray

logger = logging.getLogger(__name__)

PERTURBATION_HARMONICS = 2
MANIFEST_NAME = "manifest.json"


@dataclass(frozen=True)
class SyntheticDataset:
    """Generated traces, sorted by (subject, label, index)."""

    traces: tuple[SignatureTrace, ...]
    config: SynthConfig = field(default_factory=SynthConfig)

    @property
    def subjects(self) -> list[str]:
        return sorted({t.subject_id for t in self.traces})

    def __len__(self) -> int:
        return len(self.traces)


def subject_name(index: int) -> str:
    return f"s{index + 1:03d}"


def _harmonic_curve(
    rng: np.random.Generator, phase: NDArray[np.float64], harmonics: int, amplitude: float
) -> NDArray[np.float64]:
    orders = np.arange(1, harmonics + 1)
    weights = rng.normal(0.0, amplitude, size=harmonics) / orders
    offsets = rng.uniform(0.0, 2.0 * np.pi, size=harmonics)
    return (weights[:, None] * np.sin(2.0 * np.pi * orders[:, None] * phase[None, :] + offsets[:, None])).sum(axis=0)


def _smooth_perturbation(
    rng: np.random.Generator, phase: NDArray[np.float64], amplitude: float
) -> NDArray[np.float64]:
    if amplitude == 0.0:
        return np.zeros_like(phase)
    return _harmonic_curve(rng, phase, PERTURBATION_HARMONICS, amplitude)


def _subject_traces(subject_id: str, rng: np.random.Generator, config: SynthConfig) -> list[SignatureTrace]:
    length = int(rng.integers(config.min_length, config.max_length + 1))
    phase = np.linspace(0.0, 1.0, length)
    base_x = _harmonic_curve(rng, phase, config.harmonics, 1.0) + phase
    base_y = _harmonic_curve(rng, phase, config.harmonics, 1.0)

    traces = []
    for index in range(config.genuine_per_subject):
        x = base_x + _smooth_perturbation(rng, phase, config.genuine_jitter)
        y = base_y + _smooth_perturbation(rng, phase, config.genuine_jitter)
        traces.append(SignatureTrace(x=x, y=y, subject_id=subject_id, label="genuine", sample_index=index))

    for index in range(config.forgeries_per_subject):
        stretch = 1.0 + config.forgery_slowdown * rng.uniform(0.5, 1.5)
        slow_phase = np.linspace(0.0, 1.0, max(2, round(length * stretch)))
        x = np.interp(slow_phase, phase, base_x) + _smooth_perturbation(rng, slow_phase, config.forgery_distortion)
        y = np.interp(slow_phase, phase, base_y) + _smooth_perturbation(rng, slow_phase, config.forgery_distortion)
        x = x + rng.normal(0.0, config.forgery_tremor, size=slow_phase.size)
        y = y + rng.normal(0.0, config.forgery_tremor, size=slow_phase.size)
        traces.append(SignatureTrace(x=x, y=y, subject_id=subject_id, label="forgery", sample_index=index))
    return traces


def generate_synthetic(config: SynthConfig | None = None) -> SyntheticDataset:
    """Generate raw traces for every synthetic writer.

    Every writer draws from its own child of ``SeedSequence(config.seed)``.
    """
    config = config or SynthConfig()
    children = np.random.SeedSequence(config.seed).spawn(config.n_subjects)
    traces: list[SignatureTrace] = []
    for index, child in enumerate(children):
        traces.extend(_subject_traces(subject_name(index), np.random.default_rng(child), config))
    logger.info("generated %d traces for %d subjects (seed %d)", len(traces), config.n_subjects, config.seed)
    return SyntheticDataset(traces=tuple(sorted(traces, key=lambda t: t.key)), config=config)


def write_dataset(
    dataset: SyntheticDataset,
    directory: str | Path,
    fmt: TraceFormat = "csv_txy",
) -> DatasetManifest:
    """Write every trace and a ``manifest.json`` under ``directory``.

    Returns:
        The manifest that was written.
    """
    directory = Path(directory)
    suffix = ".csv" if fmt == "csv_txy" else ".txt"
    files: dict[str, dict[str, list[str]]] = {}
    for trace in dataset.traces:
        prefix = "g" if trace.label == "genuine" else "f"
        name = f"{trace.subject_id}/{prefix}{trace.sample_index:03d}{suffix}"
        write_trace(trace, directory / name, fmt)
        files.setdefault(trace.subject_id, {"genuine": [], "forgery": []})[trace.label].append(name)

    manifest = DatasetManifest(
        root=directory,
        subjects=tuple(
            SubjectEntry(subject_id, tuple(lists["genuine"]), tuple(lists["forgery"]))
            for subject_id, lists in sorted(files.items())
        ),
        fmt=fmt,
    )
    save_manifest(manifest, directory / MANIFEST_NAME)
    logger.info("wrote %d traces and %s to %s", len(dataset), MANIFEST_NAME, directory)
    return manifest
