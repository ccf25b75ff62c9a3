"""The forecasting models behind one fit/predict entry point.

``fit_predict`` produces raw (unclamped) point forecasts so equivariance
properties hold exactly; ``forecast_series`` wraps the result into a
nonnegative :class:`Forecast` for downstream use.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..weekly import WeeklySeries
from .base import HORIZON_WEEKS, FitConfig, Forecast, ModelFit, ModelId, PUBLIC_MODELS, SarimaGrid, model_from_name
from .baselines import predict_drift, predict_naive, predict_snaive
from .fourier_trend import predict_fourier_trend
from .sarima import predict_arima, predict_sarima
from .smoothing import predict_es, predict_holt, predict_hw
from .stl_models import predict_stl_composite

__all__ = [
    "HORIZON_WEEKS",
    "FitConfig",
    "Forecast",
    "ModelFit",
    "ModelId",
    "PUBLIC_MODELS",
    "SarimaGrid",
    "model_from_name",
    "fit_predict",
    "forecast_series",
]

_STL_SUBMODELS = {
    ModelId.STL_DRIFT: ModelId.DRIFT,
    ModelId.STL_ES: ModelId.ES,
    ModelId.STL_HOLT: ModelId.HOLT,
    ModelId.STL_ARIMA: ModelId.ARIMA,
}


def fit_predict(model: ModelId, y: np.ndarray, h: int = HORIZON_WEEKS,
                config: FitConfig = FitConfig()) -> ModelFit:
    """Fit ``model`` on ``y`` and return its raw ``h``-step point forecast."""
    y = np.asarray(y, dtype=float)
    period = config.seasonal_period
    notes: list[str] = []

    if model is ModelId.NAIVE:
        values = predict_naive(y, h)
    elif model is ModelId.DRIFT:
        values = predict_drift(y, h)
    elif model is ModelId.SNAIVE:
        values = predict_snaive(y, h, period)
    elif model is ModelId.ES:
        values = predict_es(y, h, period)
    elif model is ModelId.HOLT:
        values = predict_holt(y, h, period)
    elif model is ModelId.HW:
        values = predict_hw(y, h, period)
    elif model is ModelId.PROPHET:
        values = predict_fourier_trend(y, h, config)
    elif model is ModelId.SARIMA:
        values, fit = predict_sarima(y, h, config.sarima, period)
        if fit is None:
            # a corpus run must not abort on one hard series
            values = predict_snaive(y, h, period)
            notes.append("sarima: no admissible order; snaive fallback")
    elif model in _STL_SUBMODELS:
        values, notes = predict_stl_composite(y, h, _STL_SUBMODELS[model], config)
    elif model is ModelId.ARIMA:
        values, fit = predict_arima(y, h, config.sarima)
        if fit is None:
            values = predict_naive(y, h)
            notes.append("arima: no admissible order; naive fallback")
    else:
        raise ConfigError(f"no forecaster registered for {model!r}")

    return ModelFit(model=model, values=np.asarray(values, dtype=float), notes=notes)


def forecast_series(train: WeeklySeries, model: ModelId, h: int = HORIZON_WEEKS,
                    config: FitConfig = FitConfig()) -> tuple[Forecast, list[str]]:
    """Clamped forecast for a weekly series plus any fit notes."""
    fit = fit_predict(model, train.values, h, config)
    forecast = Forecast(series_id=train.series_id, producer=model.value,
                        values=fit.values, horizon=h)
    return forecast, fit.notes
