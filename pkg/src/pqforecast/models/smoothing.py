"""Exponential smoothing family: simple, with trend (Holt), and with trend
plus additive seasonality (Holt-Winters).

Smoothing parameters are chosen by minimizing the in-sample one-step
squared error with the bounded simplex optimizer; initial states follow a
fixed heuristic (first-period mean, period-to-period change, first-period
deviations) so fits stay deterministic and low-dimensional.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from ..numerics import nelder_mead

PARAM_LO = 1e-4
PARAM_HI = 0.9999

_MIN_OBS = 10


def _standardize(y: np.ndarray) -> tuple[np.ndarray, float, float]:
    """Center and scale so optimizer behavior is independent of the data's
    affine frame; forecasts must be mapped back with mu + sd * value."""
    mu = float(np.mean(y))
    sd = float(np.std(y))
    if sd <= 0.0:
        sd = 1.0
    return (y - mu) / sd, mu, sd


def _initial_level_trend(y: np.ndarray, period: int) -> tuple[float, float]:
    n = len(y)
    p = min(period, n)
    level = float(np.mean(y[:p]))
    if n >= 2 * period:
        trend = float((np.mean(y[period : 2 * period]) - np.mean(y[:period])) / period)
    elif n >= 2:
        trend = float((y[-1] - y[0]) / (n - 1))
    else:
        trend = 0.0
    return level, trend


def _ses_run(y: np.ndarray, alpha: float, level0: float) -> tuple[float, float]:
    """One-step SSE and final level."""
    level = level0
    sse = 0.0
    for value in y:
        err = value - level
        sse += err * err
        level += alpha * err
    return sse, level


def _holt_run(y: np.ndarray, alpha: float, beta: float, level0: float, trend0: float) -> tuple[float, float, float]:
    level, trend = level0, trend0
    sse = 0.0
    for value in y:
        prior = level + trend
        err = value - prior
        sse += err * err
        new_level = prior + alpha * err
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        level = new_level
    return sse, level, trend


def _hw_run(
    y: np.ndarray, alpha: float, beta: float, gamma: float,
    level0: float, trend0: float, seasonal0: np.ndarray,
) -> tuple[float, float, float, np.ndarray]:
    period = len(seasonal0)
    n = len(y)
    seasonal = np.empty(n + period, dtype=float)
    seasonal[:period] = seasonal0
    level, trend = level0, trend0
    sse = 0.0
    for t in range(n):
        s = seasonal[t]
        prior = level + trend
        err = y[t] - (prior + s)
        sse += err * err
        new_level = alpha * (y[t] - s) + (1.0 - alpha) * prior
        seasonal[t + period] = gamma * (y[t] - prior) + (1.0 - gamma) * s
        trend = beta * (new_level - level) + (1.0 - beta) * trend
        level = new_level
    return sse, level, trend, seasonal


def predict_es(y: np.ndarray, h: int, period: int = 52) -> np.ndarray:
    """Simple exponential smoothing; flat extrapolation of the final level."""
    y = np.asarray(y, dtype=float)
    if len(y) < _MIN_OBS:
        raise DataError(f"es: need at least {_MIN_OBS} observations, got {len(y)}")
    z, mu, sd = _standardize(y)
    level0, _ = _initial_level_trend(z, period)
    result = nelder_mead(
        lambda p: _ses_run(z, p[0], level0)[0],
        x0=[0.5], bounds=[(PARAM_LO, PARAM_HI)],
    )
    _, level = _ses_run(z, result.argmin[0], level0)
    return np.full(h, mu + sd * level)


def predict_holt(y: np.ndarray, h: int, period: int = 52) -> np.ndarray:
    """Holt's linear trend method."""
    y = np.asarray(y, dtype=float)
    if len(y) < _MIN_OBS:
        raise DataError(f"holt: need at least {_MIN_OBS} observations, got {len(y)}")
    z, mu, sd = _standardize(y)
    level0, trend0 = _initial_level_trend(z, period)
    result = nelder_mead(
        lambda p: _holt_run(z, p[0], p[1], level0, trend0)[0],
        x0=[0.5, 0.1], bounds=[(PARAM_LO, PARAM_HI)] * 2,
    )
    alpha, beta = result.argmin
    _, level, trend = _holt_run(z, alpha, beta, level0, trend0)
    return mu + sd * (level + trend * np.arange(1, h + 1))


def predict_hw(y: np.ndarray, h: int, period: int = 52) -> np.ndarray:
    """Holt-Winters with additive trend and additive seasonality."""
    y = np.asarray(y, dtype=float)
    n = len(y)
    if n < 2 * period:
        raise DataError(f"hw: needs two seasons ({2 * period} observations), got {n}")
    z, mu, sd = _standardize(y)
    level0, trend0 = _initial_level_trend(z, period)
    seasonal0 = z[:period] - np.mean(z[:period])
    result = nelder_mead(
        lambda p: _hw_run(z, p[0], p[1], p[2], level0, trend0, seasonal0)[0],
        x0=[0.5, 0.1, 0.1], bounds=[(PARAM_LO, PARAM_HI)] * 3,
    )
    alpha, beta, gamma = result.argmin
    _, level, trend, seasonal = _hw_run(z, alpha, beta, gamma, level0, trend0, seasonal0)
    steps = np.arange(1, h + 1)
    seasonal_idx = n + (steps - 1) % period
    return mu + sd * (level + trend * steps + seasonal[seasonal_idx])
