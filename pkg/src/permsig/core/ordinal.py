"""Ordinal-pattern symbolisation of scalar time series.

A window of ``D`` samples taken every ``τ`` steps is replaced by the permutation
that sorts it. The permutation lists the window positions (0 = oldest sample,
``D - 1`` = most recent) in ascending order of value::

    window      1   4   3   2        positions 0 1 2 3
    ascending   1 < 2 < 3 < 4   ->   pattern (0, 3, 2, 1)

Of two equal values the more recent sample counts as the smaller one, so
``(2, 2)`` maps to ``(1, 0)`` just like the strict descent ``(2, 1)``, and
``(5, 1, 5)`` maps to ``(1, 2, 0)``.

Patterns are indexed by their rank in lexicographic order (Lehmer code). The
all-ascending pattern ``(0, 1, ..., D - 1)`` is rank 0 and the all-descending
pattern is rank ``D! - 1``, so both monotone ramps land on an end of the index
range; this matters for the Fisher information, which depends on index order.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations
from math import factorial
from typing import TYPE_CHECKING

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from permsig.core.config import OrdinalConfig
from permsig.core.errors import InputShapeError, SeriesLengthError, ShortSeriesWarning, ValidationError

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

RELIABLE_LENGTH_FACTOR = 10
"""Series shorter than this many times ``D!`` trigger a ``ShortSeriesWarning``."""


@dataclass(frozen=True, eq=False)
class OrdinalDistribution:
    """Relative frequencies of the ``D!`` ordinal patterns of a series.

    Attributes:
        probabilities: Length ``D!`` vector indexed by Lehmer rank.
        counts: Raw pattern counts, same indexing.
        config: Pattern length and lag used.
        window_count: Number of windows evaluated, ``M - (D - 1) * τ``.
    """

    probabilities: NDArray[np.float64]
    counts: NDArray[np.int64]
    config: OrdinalConfig = field(default_factory=OrdinalConfig)
    window_count: int = 0

    @property
    def size(self) -> int:
        return int(self.probabilities.size)

    @property
    def is_delta(self) -> bool:
        """Whether every window produced the same pattern."""
        return bool(np.count_nonzero(self.counts) == 1)

    def dominant_pattern(self) -> tuple[int, ...]:
        """Most frequent pattern (lowest rank on ties)."""
        return pattern_of_rank(int(np.argmax(self.counts)), self.config.embedding_dimension)


def _as_series(values: ArrayLike) -> NDArray[np.float64]:
    series = np.asarray(values, dtype=np.float64)
    if series.ndim != 1:
        msg = f"expected a one-dimensional series, got shape {series.shape}"
        raise InputShapeError(msg)
    if not np.all(np.isfinite(series)):
        msg = "series contains non-finite values"
        raise ValidationError(msg)
    return series


def pattern_of_window(window: ArrayLike, dimension: int | None = None) -> tuple[int, ...]:
    """Return the ordinal pattern of a single window.

    Args:
        window: The ``D`` values of the window in chronological order.
        dimension: Expected pattern length; checked when given.

    Returns:
        Window positions sorted by ascending value; among equal values the later
        position comes first.

    Raises:
        InputShapeError: If the window is not one-dimensional with ``dimension`` elements.
    """
    values = np.asarray(window, dtype=np.float64)
    if values.ndim != 1 or values.size < 2:
        msg = f"a window needs at least 2 values, got shape {values.shape}"
        raise InputShapeError(msg)
    if dimension is not None and values.size != dimension:
        msg = f"window must have exactly {dimension} values, got {values.size}"
        raise InputShapeError(msg)
    positions = np.arange(values.size)
    return tuple(int(i) for i in np.lexsort((-positions, values)))


def lehmer_rank(pattern: Sequence[int]) -> int:
    """Rank of a permutation of ``0..D-1`` in lexicographic order.

    Args:
        pattern: A permutation of ``range(D)``.

    Returns:
        Integer in ``[0, D! - 1]``; the identity maps to 0 and the reversal to ``D! - 1``.

    Raises:
        ValidationError: If ``pattern`` is not a permutation of ``range(len(pattern))``.
    """
    digits = [int(v) for v in pattern]
    if sorted(digits) != list(range(len(digits))):
        msg = f"not a permutation of 0..{len(digits) - 1}: {tuple(digits)}"
        raise ValidationError(msg)
    size = len(digits)
    rank = 0
    for i, value in enumerate(digits):
        smaller_after = sum(1 for later in digits[i + 1 :] if later < value)
        rank += smaller_after * factorial(size - 1 - i)
    return rank


def pattern_of_rank(rank: int, dimension: int) -> tuple[int, ...]:
    """Inverse of :func:`lehmer_rank`.

    Raises:
        ValidationError: If ``rank`` is outside ``[0, dimension! - 1]``.
    """
    if not 0 <= rank < factorial(dimension):
        msg = f"rank must be in [0, {factorial(dimension) - 1}], got {rank}"
        raise ValidationError(msg)
    remaining = list(range(dimension))
    digits: list[int] = []
    for i in range(dimension - 1, -1, -1):
        index, rank = divmod(rank, factorial(i))
        digits.append(remaining.pop(index))
    return tuple(digits)


@lru_cache(maxsize=16)
def all_patterns(dimension: int) -> tuple[tuple[int, ...], ...]:
    """Every pattern of length ``dimension`` in Lehmer order."""
    return tuple(permutations(range(dimension)))


@lru_cache(maxsize=16)
def _rank_weights(dimension: int) -> tuple[NDArray[np.int64], NDArray[np.bool_]]:
    weights = np.array([factorial(dimension - 1 - i) for i in range(dimension)], dtype=np.int64)
    later = np.triu(np.ones((dimension, dimension), dtype=bool), k=1)
    return weights, later


def lehmer_ranks(patterns: NDArray[np.int64]) -> NDArray[np.int64]:
    """Vectorised :func:`lehmer_rank` over the rows of an ``(n, D)`` array."""
    weights, later = _rank_weights(patterns.shape[1])
    inversions = (patterns[:, :, None] > patterns[:, None, :]) & later
    return inversions.sum(axis=2) @ weights


def ordinal_patterns(series: ArrayLike, config: OrdinalConfig | None = None) -> NDArray[np.int64]:
    """Patterns of every window of a series, one row per window.

    Raises:
        SeriesLengthError: If the series is shorter than one window.
    """
    config = config or OrdinalConfig()
    values = _as_series(series)
    if values.size < config.span:
        msg = (
            f"series of length {values.size} is too short for D={config.embedding_dimension}, "
            f"tau={config.time_lag} (needs at least {config.span})"
        )
        raise SeriesLengthError(msg)
    windows = sliding_window_view(values, config.span)[:, :: config.time_lag]
    # Stable sort of the time-reversed window puts the later of two equal samples first.
    last = config.embedding_dimension - 1
    return last - np.argsort(windows[:, ::-1], axis=1, kind="stable")


def bandt_pompe_pdf(series: ArrayLike, config: OrdinalConfig | None = None) -> OrdinalDistribution:
    """Ordinal-pattern probability distribution of a series.

    Args:
        series: Scalar time series of length M.
        config: Pattern length and lag. Defaults to D=5, τ=1.

    Returns:
        The distribution of the ``M - (D - 1) * τ`` window patterns, indexed by Lehmer rank.

    Raises:
        SeriesLengthError: If ``M < (D - 1) * τ + 1``.
    """
    config = config or OrdinalConfig()
    patterns = ordinal_patterns(series, config)
    window_count = patterns.shape[0]
    n_patterns = factorial(config.embedding_dimension)

    series_length = window_count + config.span - 1
    if series_length < RELIABLE_LENGTH_FACTOR * n_patterns:
        logger.debug("series length %d below %d x D! = %d", series_length, RELIABLE_LENGTH_FACTOR, n_patterns)
        warnings.warn(
            f"series of length {series_length} is short for {n_patterns} patterns; estimates may be unreliable",
            ShortSeriesWarning,
            stacklevel=2,
        )

    counts = np.bincount(lehmer_ranks(patterns), minlength=n_patterns).astype(np.int64)
    return OrdinalDistribution(
        probabilities=counts / window_count,
        counts=counts,
        config=config,
        window_count=window_count,
    )
