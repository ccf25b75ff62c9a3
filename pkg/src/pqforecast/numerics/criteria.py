"""Model selection criteria."""

from __future__ import annotations

import math

# Floor for the residual variance so a perfect fit yields a huge but finite
# log-likelihood instead of log(0).
_VARIANCE_FLOOR = 1e-300


def gaussian_loglik(sse: float, n_obs: int) -> float:
    """Gaussian log-likelihood with the variance profiled out (sigma^2 = SSE/n)."""
    sigma2 = max(sse / n_obs, _VARIANCE_FLOOR)
    return -0.5 * n_obs * (math.log(2.0 * math.pi * sigma2) + 1.0)


def aicc(log_likelihood: float, n_params: int, n_obs: int) -> float:
    """Small-sample corrected AIC; the variance counts as one extra parameter.

    Returns +inf when there are too few observations for the correction
    term, marking the model inadmissible.
    """
    k = n_params + 1
    if n_obs - k - 1 <= 0:
        return math.inf
    return -2.0 * log_likelihood + 2.0 * k + 2.0 * k * (k + 1) / (n_obs - k - 1)
