"""Decomposition-based forecasters: seasonal component by seasonal-naive
repetition, seasonally adjusted series by a configurable sub-model."""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError, DataError
from ..numerics import STLConfig, stl_decompose
from .base import FitConfig, ModelId
from .baselines import predict_drift, predict_naive, predict_snaive
from .sarima import predict_arima
from .smoothing import predict_es, predict_holt


def _stl_config(config: FitConfig) -> STLConfig:
    return STLConfig(
        seasonal_window=config.stl_seasonal_window,
        inner_iterations=config.stl_inner_iterations,
        robustness_iterations=config.stl_robustness_iterations,
    )


def predict_stl_composite(
    y: np.ndarray, h: int, remainder_model: ModelId, config: FitConfig
) -> tuple[np.ndarray, list[str]]:
    """Forecast = repeated seasonal cycle + sub-model forecast of the
    seasonally adjusted series. Returns (values, notes)."""
    y = np.asarray(y, dtype=float)
    period = config.seasonal_period
    if len(y) < 2 * period:
        raise DataError(f"stl composite: need at least {2 * period} observations, got {len(y)}")

    decomp = stl_decompose(y, period, _stl_config(config))
    seasonal_fc = predict_snaive(decomp.seasonal, h, period)
    adjusted = decomp.seasonally_adjusted()

    notes: list[str] = []
    if remainder_model is ModelId.DRIFT:
        adjusted_fc = predict_drift(adjusted, h)
    elif remainder_model is ModelId.ES:
        adjusted_fc = predict_es(adjusted, h, period)
    elif remainder_model is ModelId.HOLT:
        adjusted_fc = predict_holt(adjusted, h, period)
    elif remainder_model is ModelId.ARIMA:
        adjusted_fc, fit = predict_arima(adjusted, h, config.sarima)
        if fit is None:
            adjusted_fc = predict_naive(adjusted, h)
            notes.append("arima inadmissible on adjusted series; naive fallback")
    else:
        raise ConfigError(f"stl composite: unsupported sub-model {remainder_model.value}")

    return seasonal_fc + adjusted_fc, notes
