"""Rescaling and resampling of raw pen trajectories."""

from __future__ import annotations

import logging
import warnings
from typing import TYPE_CHECKING

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from permsig.core.config import DEFAULT_RESAMPLE_LENGTH
from permsig.core.errors import DegenerateAxisWarning, ParameterError, ResamplingWarning, SeriesLengthError

if TYPE_CHECKING:
    from numpy.typing import NDArray

    from permsig.core.models import SignatureTrace

logger = logging.getLogger(__name__)

DEGENERATE_AXIS_VALUE = 0.5


def _rescale_axis(values: NDArray[np.float64], axis: str, key: tuple[str, str, int]) -> NDArray[np.float64]:
    low = float(values.min())
    high = float(values.max())
    if high == low:
        logger.debug("constant %s axis in trace %s", axis, key)
        warnings.warn(
            f"{axis} axis of trace {key} is constant; mapped to {DEGENERATE_AXIS_VALUE}",
            DegenerateAxisWarning,
            stacklevel=3,
        )
        return np.full(values.shape, DEGENERATE_AXIS_VALUE)
    scaled = (values - low) / (high - low)
    return np.clip(scaled, 0.0, 1.0)


def rescale_unit_square(trace: SignatureTrace) -> SignatureTrace:
    """Min-max scale each axis of a trace into ``[0, 1]``.

    A constant axis cannot be scaled and becomes the constant 0.5, with a
    :class:`~permsig.core.errors.DegenerateAxisWarning`.

    Raises:
        SeriesLengthError: If the trace has fewer than 2 points.
    """
    if len(trace) < 2:
        msg = f"trace {trace.key} needs at least 2 points to rescale"
        raise SeriesLengthError(msg)
    return trace.with_coordinates(
        _rescale_axis(trace.x, "x", trace.key),
        _rescale_axis(trace.y, "y", trace.key),
        preprocessed=False,
    )


def hermite_curve(values: NDArray[np.float64], length: int) -> NDArray[np.float64]:
    """Resample one series to ``length`` points with a cubic Hermite interpolant.

    Knots sit at the integer sample positions. Interior tangents are
    three-point central differences and the end tangents one-sided differences
    (``np.gradient``). The first and last values are reproduced exactly.
    """
    if length < 2:
        msg = f"resample length must be >= 2, got {length}"
        raise ParameterError(msg)
    if values.size < 2:
        msg = f"need at least 2 samples to interpolate, got {values.size}"
        raise SeriesLengthError(msg)
    knots = np.arange(values.size, dtype=np.float64)
    spline = CubicHermiteSpline(knots, values, np.gradient(values))
    resampled = spline(np.linspace(0.0, knots[-1], length))
    resampled[0] = values[0]
    resampled[-1] = values[-1]
    return resampled


def hermite_resample(trace: SignatureTrace, length: int = DEFAULT_RESAMPLE_LENGTH) -> SignatureTrace:
    """Resample both axes of a rescaled trace to ``length`` points.

    Values are clamped to ``[0, 1]`` after interpolation. Traces longer than
    ``length`` are downsampled through the same interpolant, with a
    :class:`~permsig.core.errors.ResamplingWarning`.

    Raises:
        ParameterError: If ``length < 2``.
    """
    if length < 2:
        msg = f"resample length must be >= 2, got {length}"
        raise ParameterError(msg)
    if len(trace) > length:
        logger.debug("downsampling trace %s from %d to %d points", trace.key, len(trace), length)
        warnings.warn(
            f"trace {trace.key} has {len(trace)} points; downsampling to {length}",
            ResamplingWarning,
            stacklevel=2,
        )
    x = np.clip(hermite_curve(trace.x, length), 0.0, 1.0)
    y = np.clip(hermite_curve(trace.y, length), 0.0, 1.0)
    return trace.with_coordinates(x, y, preprocessed=True, target_length=length)


def preprocess_trace(trace: SignatureTrace, length: int = DEFAULT_RESAMPLE_LENGTH) -> SignatureTrace:
    """Rescale into the unit square, then resample to ``length`` points."""
    return hermite_resample(rescale_unit_square(trace), length)
