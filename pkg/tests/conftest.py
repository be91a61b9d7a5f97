"""Pytest configuration and fixtures."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import pytest

from permsig import FeatureVector, OcSvmConfig, OrdinalConfig, SignatureTrace, SynthConfig
from permsig.dataio.synthetic import SyntheticDataset, generate_synthetic
from permsig.pipeline import extract_trace_features

SMALL_SYNTH = SynthConfig(n_subjects=3, genuine_per_subject=8, forgeries_per_subject=4, seed=7)
SMALL_ORDINAL = OrdinalConfig(embedding_dimension=3, time_lag=1)
SMALL_LENGTH = 800


@pytest.fixture
def rng() -> np.random.Generator:
    """Create a seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def ordinal_config() -> OrdinalConfig:
    """Create the default ordinal configuration."""
    return OrdinalConfig()


@pytest.fixture
def ocsvm_config() -> OcSvmConfig:
    """Create the default one-class SVM configuration."""
    return OcSvmConfig()


@pytest.fixture
def make_vector() -> Callable[..., FeatureVector]:
    """Build feature vectors from six values and metadata."""

    def factory(
        values: tuple[float, ...] | list[float],
        subject_id: str = "s001",
        label: str = "genuine",
        sample_index: int = 0,
    ) -> FeatureVector:
        h_x, c_x, f_x, h_y, c_y, f_y = (float(v) for v in values)
        return FeatureVector(
            h_x=h_x,
            c_x=c_x,
            f_x=f_x,
            h_y=h_y,
            c_y=c_y,
            f_y=f_y,
            subject_id=subject_id,
            label=label,  # type: ignore[arg-type]
            sample_index=sample_index,
        )

    return factory


@pytest.fixture
def raw_trace() -> SignatureTrace:
    """Create a short raw trace with distinct coordinates on both axes."""
    t = np.linspace(0.0, 1.0, 60)
    return SignatureTrace(
        x=10.0 + 5.0 * t + np.sin(6.0 * t),
        y=-3.0 + np.cos(4.0 * t),
        subject_id="s001",
        label="genuine",
        sample_index=0,
    )


@pytest.fixture(scope="session")
def small_dataset() -> SyntheticDataset:
    """Create a three-writer synthetic corpus."""
    return generate_synthetic(SMALL_SYNTH)


@pytest.fixture(scope="session")
def small_features(small_dataset: SyntheticDataset) -> tuple[FeatureVector, ...]:
    """Create feature vectors of the three-writer corpus (D=3, M=800)."""
    result = extract_trace_features(small_dataset.traces, SMALL_ORDINAL, SMALL_LENGTH)
    assert result.ok
    return result.vectors


@pytest.fixture(scope="session")
def default_features() -> tuple[FeatureVector, ...]:
    """Create feature vectors of the default synthetic corpus with default settings."""
    result = extract_trace_features(generate_synthetic(SynthConfig()).traces, OrdinalConfig(), jobs=4)
    assert result.ok
    return result.vectors
