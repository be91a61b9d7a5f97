"""Information-theory quantifiers of ordinal-pattern distributions.

Every function accepts either a plain probability vector or an
:class:`~permsig.core.ordinal.OrdinalDistribution`. Natural logarithms are
used throughout.
"""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np
from scipy.special import entr

from permsig.core.config import OrdinalConfig
from permsig.core.errors import DegenerateSupportError, ValidationError
from permsig.core.models import FeatureVector, QuantifierTriple, SignatureTrace
from permsig.core.ordinal import OrdinalDistribution, bandt_pompe_pdf

if TYPE_CHECKING:
    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

NORMALIZATION_TOLERANCE = 1e-9
UNDERFLOW_GUARD = 1e-300


def _probabilities(distribution: ArrayLike | OrdinalDistribution) -> NDArray[np.float64]:
    if isinstance(distribution, OrdinalDistribution):
        return distribution.probabilities
    p = np.asarray(distribution, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        msg = f"probability vector must be one-dimensional and non-empty, got shape {p.shape}"
        raise ValidationError(msg)
    if not np.all(np.isfinite(p)):
        msg = "probability vector contains non-finite values"
        raise ValidationError(msg)
    if np.any(p < 0.0):
        msg = f"probabilities must be non-negative, got minimum {p.min()}"
        raise ValidationError(msg)
    total = float(p.sum())
    if abs(total - 1.0) > NORMALIZATION_TOLERANCE:
        msg = f"probabilities must sum to 1 (within {NORMALIZATION_TOLERANCE}), got {total!r}"
        raise ValidationError(msg)
    return p


def _require_support(p: NDArray[np.float64]) -> int:
    if p.size < 2:
        msg = f"need at least 2 states to normalise, got N={p.size}"
        raise DegenerateSupportError(msg)
    return int(p.size)


def _entropy(p: NDArray[np.float64]) -> float:
    # entr(p) = -p ln p with entr(0) = 0
    return float(entr(np.where(p < UNDERFLOW_GUARD, 0.0, p)).sum())


def shannon_entropy(distribution: ArrayLike | OrdinalDistribution) -> float:
    """Shannon entropy ``-Σ p ln p`` with ``0 ln 0 = 0``.

    Returns:
        A value in ``[0, ln N]``.

    Raises:
        ValidationError: On negative entries or a sum away from 1.
    """
    return _entropy(_probabilities(distribution))


def normalized_entropy(distribution: ArrayLike | OrdinalDistribution) -> float:
    """Shannon entropy divided by its maximum ``ln N``.

    Raises:
        DegenerateSupportError: If ``N == 1``.
    """
    p = _probabilities(distribution)
    n = _require_support(p)
    return float(np.clip(_entropy(p) / np.log(n), 0.0, 1.0))


def _is_endpoint_delta(distribution: ArrayLike | OrdinalDistribution, p: NDArray[np.float64]) -> bool:
    if isinstance(distribution, OrdinalDistribution):
        counts = distribution.counts
        return bool(counts[0] == distribution.window_count or counts[-1] == distribution.window_count)
    return bool(p[0] == 1.0 or p[-1] == 1.0)


def fisher_information(distribution: ArrayLike | OrdinalDistribution) -> float:
    """Discrete normalised Fisher information over Lehmer-ordered states.

    ``F = F0 * Σ (sqrt(p[i+1]) - sqrt(p[i]))**2`` where ``F0`` is 1 when all the
    mass sits on the first or last state and 1/2 otherwise.

    Unlike the entropy this depends on the order of the states.
    """
    p = _probabilities(distribution)
    _require_support(p)
    f0 = 1.0 if _is_endpoint_delta(distribution, p) else 0.5
    root = np.sqrt(p)
    return float(np.clip(f0 * np.sum(np.diff(root) ** 2), 0.0, 1.0))


def _raw_jensen_shannon(p: NDArray[np.float64]) -> float:
    uniform = np.full(p.size, 1.0 / p.size)
    return _entropy((p + uniform) / 2.0) - _entropy(p) / 2.0 - _entropy(uniform) / 2.0


@lru_cache(maxsize=64)
def disequilibrium_normalizer(n_states: int) -> float:
    """Inverse of the largest Jensen-Shannon divergence from the uniform over ``n_states``.

    The maximum is attained by a delta distribution, so the constant is
    evaluated there directly.
    """
    if n_states < 2:
        msg = f"need at least 2 states, got {n_states}"
        raise DegenerateSupportError(msg)
    delta = np.zeros(n_states)
    delta[0] = 1.0
    return 1.0 / _raw_jensen_shannon(delta)


def jensen_shannon_disequilibrium(distribution: ArrayLike | OrdinalDistribution) -> float:
    """Normalised Jensen-Shannon divergence between ``P`` and the uniform distribution.

    Returns:
        0 for the uniform distribution and 1 for any delta distribution.
    """
    p = _probabilities(distribution)
    n = _require_support(p)
    return float(np.clip(disequilibrium_normalizer(n) * _raw_jensen_shannon(p), 0.0, 1.0))


def statistical_complexity(distribution: ArrayLike | OrdinalDistribution) -> float:
    """Product of the disequilibrium and the normalised entropy."""
    p = _probabilities(distribution)
    return float(np.clip(jensen_shannon_disequilibrium(p) * normalized_entropy(p), 0.0, 1.0))


def quantify(distribution: ArrayLike | OrdinalDistribution) -> QuantifierTriple:
    """Entropy, complexity and Fisher information of one distribution."""
    p = _probabilities(distribution)
    entropy = normalized_entropy(p)
    disequilibrium = jensen_shannon_disequilibrium(p)
    return QuantifierTriple(
        entropy=entropy,
        complexity=float(np.clip(disequilibrium * entropy, 0.0, 1.0)),
        fisher=fisher_information(distribution),
    )


def quantify_series(series: ArrayLike, config: OrdinalConfig | None = None) -> QuantifierTriple:
    """Ordinal-pattern quantifiers of a single coordinate series."""
    return quantify(bandt_pompe_pdf(series, config))


def quantify_signature(trace: SignatureTrace, config: OrdinalConfig | None = None) -> FeatureVector:
    """Six-feature vector of a preprocessed trace.

    The horizontal and vertical series are symbolised independently.

    Raises:
        ValidationError: If the trace has not been preprocessed.
    """
    if not trace.preprocessed:
        msg = f"trace {trace.key} must be preprocessed before feature extraction"
        raise ValidationError(msg)
    config = config or OrdinalConfig()
    x = quantify_series(trace.x, config)
    y = quantify_series(trace.y, config)
    logger.debug("quantified %s: x=%s y=%s", trace.key, x, y)
    return FeatureVector.from_triples(
        x,
        y,
        subject_id=trace.subject_id,
        label=trace.label,
        sample_index=trace.sample_index,
    )
