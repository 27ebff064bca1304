"""Scaled forecast-error metrics.

Forecast errors are normalized by the error a seasonal-naive forecaster
makes on the context window, which makes values comparable across
channels whose scale drifts over time. The same block-averaged score
doubles as the loss signal for the weighters.

The denominator is floored at ``DENOMINATOR_FLOOR`` so block averages stay
defined on locally constant or perfectly periodic contexts; callers that
care can test :func:`seasonal_naive_mae` against the floor and flag the
window.
"""

from __future__ import annotations

import numpy as np

from .errors import EmptyBlock, InvalidSeasonality, ShapeMismatch

DENOMINATOR_FLOOR = 1e-8

# seasonal periods conventionally paired with the common benchmark sets
DATASET_SEASONALITY = {
    "etth1": 24,
    "etth2": 24,
    "ettm1": 96,
    "ettm2": 96,
    "us_weather": 24,
    "weather": 144,
    "solar": 24,
    "ecl": 24,
    "traffic": 24,
}


def default_seasonality(dataset_name: str) -> int:
    """Seasonal period for a known dataset name (case/space insensitive)."""
    key = dataset_name.strip().lower().replace(" ", "_").replace("-", "_")
    try:
        return DATASET_SEASONALITY[key]
    except KeyError:
        raise InvalidSeasonality(
            f"no default seasonality for {dataset_name!r}; known: "
            + ", ".join(sorted(DATASET_SEASONALITY))
        ) from None


def _check_inputs(forecast, target, context, s):
    forecast = np.asarray(forecast, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    context = np.asarray(context, dtype=np.float64)
    if forecast.shape != target.shape or forecast.ndim != 1:
        raise ShapeMismatch(
            f"forecast {forecast.shape} and target {target.shape} must be equal-length vectors"
        )
    if context.ndim != 1:
        raise ShapeMismatch(f"context must be a vector, got shape {context.shape}")
    if not isinstance(s, (int, np.integer)) or s < 1:
        raise InvalidSeasonality(f"seasonality must be a positive integer, got {s!r}")
    if s >= context.shape[0]:
        raise InvalidSeasonality(
            f"seasonality {s} must be smaller than the context length {context.shape[0]}"
        )
    return forecast, target, context


def seasonal_naive_mae(context, s: int) -> float:
    """Mean absolute seasonal difference of the context (unfloored)."""
    context = np.asarray(context, dtype=np.float64)
    if not isinstance(s, (int, np.integer)) or not 1 <= s < context.shape[0]:
        raise InvalidSeasonality(f"need 1 <= s < {context.shape[0]}, got {s!r}")
    return float(np.mean(np.abs(context[s:] - context[:-s])))


def seasonal_naive_mse(context, s: int) -> float:
    """Mean squared seasonal difference of the context (unfloored)."""
    context = np.asarray(context, dtype=np.float64)
    if not isinstance(s, (int, np.integer)) or not 1 <= s < context.shape[0]:
        raise InvalidSeasonality(f"need 1 <= s < {context.shape[0]}, got {s!r}")
    return float(np.mean(np.square(context[s:] - context[:-s])))


def mase(forecast, target, context, s: int) -> float:
    """Mean absolute error scaled by the context's seasonal-naive error."""
    forecast, target, context = _check_inputs(forecast, target, context, s)
    numerator = float(np.mean(np.abs(forecast - target)))
    return numerator / max(seasonal_naive_mae(context, s), DENOMINATOR_FLOOR)


def rmsse(forecast, target, context, s: int) -> float:
    """Root mean squared error scaled by the seasonal-naive RMSE."""
    forecast, target, context = _check_inputs(forecast, target, context, s)
    numerator = float(np.mean(np.square(forecast - target)))
    return float(np.sqrt(numerator / max(seasonal_naive_mse(context, s), DENOMINATOR_FLOOR)))


def block_average_mase(forecasts, targets, contexts, s: int) -> float:
    """Arithmetic mean of per-window MASE over one update block.

    Parameters
    ----------
    forecasts, targets : (m, H) arrays, one row per window
    contexts : (m, L) array of the matching context windows
    """
    forecasts = np.asarray(forecasts, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    contexts = np.asarray(contexts, dtype=np.float64)
    if forecasts.ndim != 2 or forecasts.shape[0] == 0:
        raise EmptyBlock("block must contain at least one window")
    if targets.shape != forecasts.shape or contexts.shape[0] != forecasts.shape[0]:
        raise ShapeMismatch(
            f"inconsistent block shapes: {forecasts.shape}, {targets.shape}, {contexts.shape}"
        )
    return float(np.mean([
        mase(forecasts[i], targets[i], contexts[i], s) for i in range(forecasts.shape[0])
    ]))
