"""Configuration objects for feature extraction, training, synthesis and CLI runs."""

from __future__ import annotations

import os
from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, field
from typing import Any, Literal

from permsig.core.errors import ConfigurationError

MAX_EMBEDDING_DIMENSION = 8
DEFAULT_RESAMPLE_LENGTH = 2000
SEED_ENV_VAR = "PERMSIG_SEED"

DistanceMetric = Literal["euclidean", "manhattan", "maximum"]
Linkage = Literal["average", "complete", "single"]
DISTANCE_METRICS: tuple[DistanceMetric, ...] = ("euclidean", "manhattan", "maximum")
LINKAGES: tuple[Linkage, ...] = ("average", "complete", "single")


@dataclass(frozen=True)
class OrdinalConfig:
    """Ordinal-pattern symbolisation settings.

    Attributes:
        embedding_dimension: Pattern length D. Defaults to 5.
        time_lag: Sampling lag τ between pattern elements. Defaults to 1.
    """

    embedding_dimension: int = 5
    time_lag: int = 1

    def __post_init__(self) -> None:
        if not 2 <= self.embedding_dimension <= MAX_EMBEDDING_DIMENSION:
            msg = f"embedding_dimension must be in [2, {MAX_EMBEDDING_DIMENSION}], got {self.embedding_dimension}"
            raise ConfigurationError(msg)
        if self.time_lag < 1:
            msg = f"time_lag must be >= 1, got {self.time_lag}"
            raise ConfigurationError(msg)

    @property
    def span(self) -> int:
        """Number of samples covered by one window, ``(D - 1) * τ + 1``."""
        return (self.embedding_dimension - 1) * self.time_lag + 1

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class OcSvmConfig:
    """One-class SVM hyper-parameters and solver limits.

    Attributes:
        nu: Upper bound on the outlier fraction, in (0, 1]. Defaults to 0.1.
        sigma_sq: RBF kernel width σ². Defaults to 10.
        solver_tolerance: Stop when the maximal KKT violation drops below this.
        max_iterations: Maximum number of pair updates before giving up.
    """

    nu: float = 0.1
    sigma_sq: float = 10.0
    solver_tolerance: float = 1e-6
    max_iterations: int = 10_000_000

    def __post_init__(self) -> None:
        if not 0.0 < self.nu <= 1.0:
            msg = f"nu must be in (0, 1], got {self.nu}"
            raise ConfigurationError(msg)
        if not self.sigma_sq > 0.0:
            msg = f"sigma_sq must be positive, got {self.sigma_sq}"
            raise ConfigurationError(msg)
        if not self.solver_tolerance > 0.0:
            msg = f"solver_tolerance must be positive, got {self.solver_tolerance}"
            raise ConfigurationError(msg)
        if self.max_iterations < 1:
            msg = f"max_iterations must be >= 1, got {self.max_iterations}"
            raise ConfigurationError(msg)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class SynthConfig:
    """Synthetic signature corpus settings.

    Attributes:
        n_subjects: Number of enrolled writers.
        genuine_per_subject: Genuine signatures per writer.
        forgeries_per_subject: Skilled forgeries per writer.
        harmonics: Number of low-order harmonics in each writer's base curve.
        genuine_jitter: Amplitude of the smooth perturbation of genuine samples.
        forgery_distortion: Amplitude of the shape distortion of forgeries.
        forgery_tremor: Amplitude of the sample-level tremor of forgeries.
        forgery_slowdown: Relative increase of forgery duration (more samples).
        min_length: Shortest raw base trajectory, in samples.
        max_length: Longest raw base trajectory, in samples.
        seed: Root seed of the generator.
    """

    n_subjects: int = 20
    genuine_per_subject: int = 25
    forgeries_per_subject: int = 25
    harmonics: int = 4
    genuine_jitter: float = 0.02
    forgery_distortion: float = 0.08
    forgery_tremor: float = 0.01
    forgery_slowdown: float = 0.5
    min_length: int = 180
    max_length: int = 420
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("n_subjects", "genuine_per_subject", "forgeries_per_subject", "harmonics"):
            if getattr(self, name) < 1:
                msg = f"{name} must be >= 1, got {getattr(self, name)}"
                raise ConfigurationError(msg)
        for name in ("genuine_jitter", "forgery_distortion", "forgery_tremor", "forgery_slowdown"):
            if getattr(self, name) < 0:
                msg = f"{name} must be >= 0, got {getattr(self, name)}"
                raise ConfigurationError(msg)
        if not 2 <= self.min_length <= self.max_length:
            msg = f"need 2 <= min_length <= max_length, got {self.min_length}, {self.max_length}"
            raise ConfigurationError(msg)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


@dataclass
class RunConfig:
    """Parameters shared by the command-line commands.

    Defaults reproduce the published experimental settings.

    Attributes:
        embedding_dimension: Pattern length D.
        time_lag: Pattern lag τ.
        resample_length: Number of points M after resampling.
        nu: One-class SVM ν.
        sigma_sq: RBF kernel width σ².
        train_sizes: Enrollment sizes n for the verification protocol.
        seed: Root seed; falls back to ``PERMSIG_SEED``.
        metric: Dissimilarity for hierarchical clustering.
        linkage: Linkage rule for hierarchical clustering.
        folds: Number of cross-validation folds for σ² selection.
        sigma_grid: Candidate σ² values; empty means use ``sigma_sq`` as-is.
        jobs: Worker pool size.
        strict: Escalate advisory warnings to errors.
    """

    embedding_dimension: int = 5
    time_lag: int = 1
    resample_length: int = DEFAULT_RESAMPLE_LENGTH
    nu: float = 0.1
    sigma_sq: float = 10.0
    train_sizes: Sequence[int] = field(default_factory=lambda: [5])
    seed: int = 0
    metric: DistanceMetric = "euclidean"
    linkage: Linkage = "average"
    folds: int = 5
    sigma_grid: Sequence[float] = field(default_factory=list)
    jobs: int = 1
    strict: bool = False

    def __post_init__(self) -> None:
        if self.resample_length < 2:
            msg = f"resample_length must be >= 2, got {self.resample_length}"
            raise ConfigurationError(msg)
        if self.jobs < 1:
            msg = f"jobs must be >= 1, got {self.jobs}"
            raise ConfigurationError(msg)
        if self.metric not in DISTANCE_METRICS:
            msg = f"metric must be one of {DISTANCE_METRICS}, got {self.metric!r}"
            raise ConfigurationError(msg)
        if self.linkage not in LINKAGES:
            msg = f"linkage must be one of {LINKAGES}, got {self.linkage!r}"
            raise ConfigurationError(msg)
        if self.seed < 0:
            msg = f"seed must be non-negative, got {self.seed}"
            raise ConfigurationError(msg)
        if self.folds < 2:
            msg = f"folds must be >= 2, got {self.folds}"
            raise ConfigurationError(msg)
        if any(n < 1 for n in self.train_sizes):
            msg = f"train sizes must be positive, got {list(self.train_sizes)}"
            raise ConfigurationError(msg)

    @property
    def ordinal(self) -> OrdinalConfig:
        return OrdinalConfig(embedding_dimension=self.embedding_dimension, time_lag=self.time_lag)

    @property
    def ocsvm(self) -> OcSvmConfig:
        return OcSvmConfig(nu=self.nu, sigma_sq=self.sigma_sq)

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["train_sizes"] = list(self.train_sizes)
        data["sigma_grid"] = list(self.sigma_grid)
        return data


def resolve_seed(explicit: int | None, environ: Mapping[str, str] | None = None) -> int:
    """Pick the run seed: explicit value, then ``PERMSIG_SEED``, then 0.

    Args:
        explicit: Seed given on the command line, if any.
        environ: Environment mapping. Defaults to ``os.environ``.

    Returns:
        The seed to use.
    """
    if explicit is not None:
        return explicit
    env = os.environ if environ is None else environ
    raw = env.get(SEED_ENV_VAR)
    if raw is None or not raw.strip():
        return 0
    try:
        seed = int(raw)
    except ValueError as e:
        msg = f"{SEED_ENV_VAR} must be an integer, got {raw!r}"
        raise ConfigurationError(msg) from e
    if seed < 0:
        msg = f"{SEED_ENV_VAR} must be non-negative, got {seed}"
        raise ConfigurationError(msg)
    return seed
