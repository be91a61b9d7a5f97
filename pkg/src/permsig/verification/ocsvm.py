"""Nu-parameterised one-class SVM with a Gaussian RBF kernel.

The dual problem::

    minimise    1/2 a^T K a
    subject to  0 <= a_i <= 1 / (nu N),   sum(a) = 1

is solved by sequential two-variable updates on the maximal violating pair.
The decision value of a query ``z`` is ``sum_i a_i K(z, z_i) - b``; a value of
zero or more is accepted as genuine.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.model_selection import KFold

from permsig.core.config import OcSvmConfig
from permsig.core.errors import (
    ConvergenceError,
    InputShapeError,
    InsufficientDataError,
    ModelStateError,
    ParameterError,
    ValidationError,
)
from permsig.core.models import FEATURE_NAMES, FeatureVector, stack_features

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

MODEL_FORMAT_VERSION = 1
MIN_CURVATURE = 1e-12

Verdict = Literal["genuine", "suspicious"]


def as_sample_matrix(samples: Sequence[FeatureVector] | ArrayLike) -> NDArray[np.float64]:
    """Turn feature vectors or a 2-D array-like into an ``(n, d)`` float matrix.

    Raises:
        InputShapeError: If the result is not two-dimensional.
        ValidationError: If any entry is not finite.
    """
    if isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], FeatureVector):
        matrix = stack_features(list(samples))
    else:
        matrix = np.asarray(samples, dtype=np.float64)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        msg = f"samples must form a two-dimensional matrix, got shape {matrix.shape}"
        raise InputShapeError(msg)
    if not np.all(np.isfinite(matrix)):
        msg = "samples contain non-finite values"
        raise ValidationError(msg)
    return matrix


def rbf_kernel(z_i: ArrayLike, z_j: ArrayLike, sigma_sq: float) -> float:
    """Gaussian kernel ``exp(-||z_i - z_j||^2 / (2 sigma_sq))``."""
    if not sigma_sq > 0.0:
        msg = f"sigma_sq must be positive, got {sigma_sq}"
        raise ParameterError(msg)
    a = np.asarray(z_i, dtype=np.float64)
    b = np.asarray(z_j, dtype=np.float64)
    if a.shape != b.shape:
        msg = f"kernel arguments differ in shape: {a.shape} vs {b.shape}"
        raise InputShapeError(msg)
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        msg = "kernel arguments must be finite"
        raise ValidationError(msg)
    return math.exp(-float(np.sum((a - b) ** 2)) / (2.0 * sigma_sq))


def rbf_gram(a: NDArray[np.float64], b: NDArray[np.float64], sigma_sq: float) -> NDArray[np.float64]:
    """Kernel matrix between the rows of ``a`` and the rows of ``b``."""
    return np.exp(-cdist(a, b, "sqeuclidean") / (2.0 * sigma_sq))


def _kernel_sums(
    queries: NDArray[np.float64],
    support_vectors: NDArray[np.float64],
    alphas: NDArray[np.float64],
    sigma_sq: float,
) -> NDArray[np.float64]:
    # b and the decision values must agree bit for bit; training and scoring both go through here.
    return (rbf_gram(queries, support_vectors, sigma_sq) * alphas).sum(axis=1)


@dataclass(frozen=True)
class DecisionResult:
    """Outcome of scoring one query.

    Attributes:
        raw_score: ``sum_i a_i K(z, z_i) - b``.
        verdict: ``genuine`` when ``raw_score >= 0``, else ``suspicious``.
    """

    raw_score: float
    verdict: Verdict

    @classmethod
    def from_score(cls, raw_score: float) -> DecisionResult:
        return cls(raw_score=raw_score, verdict="genuine" if raw_score >= 0.0 else "suspicious")

    @property
    def accepted(self) -> bool:
        return self.verdict == "genuine"


@dataclass(frozen=True, eq=False)
class OcSvmModel:
    """A trained one-class model.

    Attributes:
        support_vectors: Training points with a non-zero multiplier, ``(n_sv, d)``.
        alphas: Their multipliers.
        offset: The threshold ``b``.
        config: Hyper-parameters used for training.
        training_size: Number of training points N.
        feature_schema: Column names of the support vectors.
        subject_id: Writer the model was enrolled for, if any.
        iterations: Pair updates performed by the solver.
        kkt_residual: Maximal KKT violation at convergence.
    """

    support_vectors: NDArray[np.float64]
    alphas: NDArray[np.float64]
    offset: float
    config: OcSvmConfig = field(default_factory=OcSvmConfig)
    training_size: int = 0
    feature_schema: tuple[str, ...] = FEATURE_NAMES
    subject_id: str = ""
    iterations: int = 0
    kkt_residual: float = 0.0

    @property
    def upper_bound(self) -> float:
        """Box constraint ``1 / (nu N)``."""
        return 1.0 / (self.config.nu * self.training_size)

    @property
    def is_trained(self) -> bool:
        return self.alphas.size > 0

    def decision_values(self, samples: Sequence[FeatureVector] | ArrayLike) -> NDArray[np.float64]:
        """Raw scores of several queries at once.

        Raises:
            ModelStateError: If the model has no support vectors.
            InputShapeError: If the query width differs from the support vectors.
        """
        if not self.is_trained:
            msg = "model has no support vectors; train it first"
            raise ModelStateError(msg)
        queries = as_sample_matrix(samples)
        if queries.shape[1] != self.support_vectors.shape[1]:
            msg = f"query has {queries.shape[1]} features, model expects {self.support_vectors.shape[1]}"
            raise InputShapeError(msg)
        return _kernel_sums(queries, self.support_vectors, self.alphas, self.config.sigma_sq) - self.offset

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-ready dictionary."""
        return {
            "version": MODEL_FORMAT_VERSION,
            "nu": self.config.nu,
            "sigma_sq": self.config.sigma_sq,
            "b": self.offset,
            "support_vectors": self.support_vectors.tolist(),
            "alphas": self.alphas.tolist(),
            "training_size": self.training_size,
            "feature_schema": list(self.feature_schema),
            "subject_id": self.subject_id,
            "solver_tolerance": self.config.solver_tolerance,
            "iterations": self.iterations,
            "kkt_residual": self.kkt_residual,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> OcSvmModel:
        """Rebuild a model written by :meth:`to_dict`.

        Raises:
            ValidationError: If the version or the array shapes do not match.
        """
        version = data.get("version")
        if version != MODEL_FORMAT_VERSION:
            msg = f"unsupported model format version {version!r}"
            raise ValidationError(msg)
        schema = tuple(str(name) for name in data.get("feature_schema", FEATURE_NAMES))
        support_vectors = np.asarray(data["support_vectors"], dtype=np.float64).reshape(-1, len(schema))
        alphas = np.asarray(data["alphas"], dtype=np.float64)
        if alphas.shape != (support_vectors.shape[0],):
            msg = f"{alphas.size} alphas for {support_vectors.shape[0]} support vectors"
            raise ValidationError(msg)
        config = OcSvmConfig(
            nu=float(data["nu"]),
            sigma_sq=float(data["sigma_sq"]),
            solver_tolerance=float(data.get("solver_tolerance", OcSvmConfig.solver_tolerance)),
        )
        return cls(
            support_vectors=support_vectors,
            alphas=alphas,
            offset=float(data["b"]),
            config=config,
            training_size=int(data["training_size"]),
            feature_schema=schema,
            subject_id=str(data.get("subject_id", "")),
            iterations=int(data.get("iterations", 0)),
            kkt_residual=float(data.get("kkt_residual", 0.0)),
        )


def _initial_alphas(n: int, nu: float, upper: float) -> NDArray[np.float64]:
    alphas = np.zeros(n)
    n_full = min(int(math.floor(nu * n + 1e-9)), n)
    alphas[:n_full] = upper
    if n_full < n:
        alphas[n_full] = min(max(1.0 - n_full * upper, 0.0), upper)
    return alphas


def _violating_pair(
    gradient: NDArray[np.float64], alphas: NDArray[np.float64], upper: float
) -> tuple[int, int, float]:
    can_grow = alphas < upper
    can_shrink = alphas > 0.0
    if not can_grow.any() or not can_shrink.any():
        return -1, -1, 0.0
    i = int(np.argmin(np.where(can_grow, gradient, np.inf)))
    j = int(np.argmax(np.where(can_shrink, gradient, -np.inf)))
    return i, j, float(gradient[j] - gradient[i])


def solve_dual(
    kernel: NDArray[np.float64],
    nu: float,
    tolerance: float = 1e-6,
    max_iterations: int = 10_000_000,
) -> tuple[NDArray[np.float64], int, float]:
    """Minimise ``1/2 a^T K a`` over the nu-one-class feasible set.

    Returns:
        The multipliers, the number of pair updates and the final KKT residual.

    Raises:
        ConvergenceError: If the residual is still above ``tolerance`` after
            ``max_iterations`` updates.
    """
    n = kernel.shape[0]
    upper = 1.0 / (nu * n)
    alphas = _initial_alphas(n, nu, upper)
    gradient = kernel @ alphas
    iterations = 0

    while True:
        i, j, residual = _violating_pair(gradient, alphas, upper)
        if residual < tolerance:
            # Accumulated updates drift; confirm against a fresh gradient before stopping.
            gradient = kernel @ alphas
            i, j, residual = _violating_pair(gradient, alphas, upper)
            if residual < tolerance:
                return alphas, iterations, max(residual, 0.0)
        if iterations >= max_iterations:
            raise ConvergenceError(residual, iterations)

        curvature = max(kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j], MIN_CURVATURE)
        room_i = upper - alphas[i]
        room_j = alphas[j]
        step = min(residual / curvature, room_i, room_j)
        # clipped multipliers sit exactly on their bound
        alphas[i] = upper if step == room_i else alphas[i] + step
        alphas[j] = 0.0 if step == room_j else alphas[j] - step
        gradient += step * (kernel[:, i] - kernel[:, j])
        iterations += 1


def _offset(scores: NDArray[np.float64], alphas: NDArray[np.float64], upper: float) -> float:
    free = (alphas > 0.0) & (alphas < upper)
    if free.any():
        return float(scores[free].min())
    at_bound = scores[alphas >= upper]
    at_zero = scores[alphas <= 0.0]
    if at_bound.size and at_zero.size:
        return float((at_bound.max() + at_zero.min()) / 2.0)
    if at_bound.size:
        return float(at_bound.max())
    return float(at_zero.min())


def train(
    samples: Sequence[FeatureVector] | ArrayLike,
    config: OcSvmConfig | None = None,
    *,
    subject_id: str = "",
) -> OcSvmModel:
    """Fit a one-class model to genuine samples.

    Args:
        samples: N training vectors, as feature vectors or an ``(N, d)`` array.
        config: Hyper-parameters. Defaults to nu=0.1, sigma_sq=10.
        subject_id: Writer recorded on the model.

    Returns:
        The trained model, restricted to its support vectors.

    Raises:
        InsufficientDataError: If fewer than 2 samples are given.
        ConvergenceError: If the solver hits ``max_iterations``.
    """
    config = config or OcSvmConfig()
    matrix = as_sample_matrix(samples)
    n, width = matrix.shape
    if n < 2:
        msg = f"need at least 2 training samples, got {n}"
        raise InsufficientDataError(msg)

    kernel = rbf_gram(matrix, matrix, config.sigma_sq)
    alphas, iterations, residual = solve_dual(kernel, config.nu, config.solver_tolerance, config.max_iterations)
    upper = 1.0 / (config.nu * n)

    support = alphas > 0.0
    support_vectors = matrix[support]
    support_alphas = alphas[support]
    scores = _kernel_sums(matrix, support_vectors, support_alphas, config.sigma_sq)
    offset = _offset(scores, alphas, upper)

    logger.debug(
        "trained one-class model%s: N=%d, %d support vectors, %d updates, residual %.2e, b=%.6f",
        f" for {subject_id!r}" if subject_id else "",
        n,
        support_vectors.shape[0],
        iterations,
        residual,
        offset,
    )
    schema = FEATURE_NAMES if width == len(FEATURE_NAMES) else tuple(f"f{k}" for k in range(width))
    return OcSvmModel(
        support_vectors=support_vectors,
        alphas=support_alphas,
        offset=offset,
        config=config,
        training_size=n,
        feature_schema=schema,
        subject_id=subject_id,
        iterations=iterations,
        kkt_residual=residual,
    )


def decide(model: OcSvmModel, sample: FeatureVector | ArrayLike) -> DecisionResult:
    """Score one query against a trained model.

    Raises:
        ModelStateError: If the model has no support vectors.
    """
    query = sample.as_array() if isinstance(sample, FeatureVector) else np.asarray(sample, dtype=np.float64)
    if query.ndim != 1:
        msg = f"expected a single feature vector, got shape {query.shape}"
        raise InputShapeError(msg)
    return DecisionResult.from_score(float(model.decision_values(query.reshape(1, -1))[0]))


class OneClassSVM:
    """Estimator wrapper around :func:`train` and :func:`decide`."""

    __slots__ = ("_model", "config")

    def __init__(self, config: OcSvmConfig | None = None) -> None:
        self.config = config or OcSvmConfig()
        self._model: OcSvmModel | None = None

    @property
    def model(self) -> OcSvmModel:
        if self._model is None:
            msg = "OneClassSVM is not fitted yet; call fit() first"
            raise ModelStateError(msg)
        return self._model

    def fit(self, samples: Sequence[FeatureVector] | ArrayLike, *, subject_id: str = "") -> OneClassSVM:
        self._model = train(samples, self.config, subject_id=subject_id)
        return self

    def decision_function(self, samples: Sequence[FeatureVector] | ArrayLike) -> NDArray[np.float64]:
        return self.model.decision_values(samples)

    def predict(self, samples: Sequence[FeatureVector] | ArrayLike) -> NDArray[np.bool_]:
        """``True`` for queries accepted as genuine."""
        return self.decision_function(samples) >= 0.0

    def decide(self, sample: FeatureVector | ArrayLike) -> DecisionResult:
        return decide(self.model, sample)


def sigma_fold_scores(
    samples: Sequence[FeatureVector] | ArrayLike,
    nu: float,
    sigma_grid: Sequence[float],
    folds: int = 5,
    seed: int = 0,
) -> dict[float, list[float]]:
    """Held-out acceptance rate of every fold for every candidate sigma_sq.

    The same seeded partition is reused for all candidates.

    Raises:
        ParameterError: If the grid is empty or ``folds < 2``.
        InsufficientDataError: If there are fewer samples than folds.
    """
    if not sigma_grid:
        msg = "sigma grid is empty"
        raise ParameterError(msg)
    if folds < 2:
        msg = f"need at least 2 folds, got {folds}"
        raise ParameterError(msg)
    matrix = as_sample_matrix(samples)
    if matrix.shape[0] < folds:
        msg = f"need at least {folds} samples for {folds}-fold selection, got {matrix.shape[0]}"
        raise InsufficientDataError(msg)

    splits = list(KFold(n_splits=folds, shuffle=True, random_state=seed).split(matrix))
    scores: dict[float, list[float]] = {}
    for sigma_sq in sigma_grid:
        config = OcSvmConfig(nu=nu, sigma_sq=float(sigma_sq))
        rates = []
        for train_index, test_index in splits:
            model = train(matrix[train_index], config)
            rates.append(float(np.mean(model.decision_values(matrix[test_index]) >= 0.0)))
        scores[float(sigma_sq)] = rates
    return scores


def select_sigma(fold_scores: dict[float, list[float]], nu: float) -> float:
    """Pick the candidate whose mean acceptance is closest to ``1 - nu``; earliest wins ties."""
    target = 1.0 - nu
    best_sigma, best_gap = None, math.inf
    for sigma_sq, rates in fold_scores.items():
        gap = abs(float(np.mean(rates)) - target)
        if gap < best_gap:
            best_sigma, best_gap = sigma_sq, gap
    if best_sigma is None:
        msg = "no fold scores to select from"
        raise ParameterError(msg)
    return best_sigma


def cross_validate_sigma(
    samples: Sequence[FeatureVector] | ArrayLike,
    nu: float,
    sigma_grid: Sequence[float],
    folds: int = 5,
    seed: int = 0,
) -> float:
    """Choose sigma_sq by k-fold cross-validation on genuine samples.

    Each fold is held out in turn, a model is trained on the rest and the
    fraction of held-out samples it accepts is recorded. The candidate whose
    mean acceptance is closest to the target ``1 - nu`` is returned.
    """
    fold_scores = sigma_fold_scores(samples, nu, sigma_grid, folds, seed)
    chosen = select_sigma(fold_scores, nu)
    logger.info(
        "selected sigma_sq=%s from %s (mean acceptance %s)",
        chosen,
        list(fold_scores),
        {k: round(float(np.mean(v)), 4) for k, v in fold_scores.items()},
    )
    return chosen
