"""Box-bounded Nelder-Mead simplex minimization.

Deterministic by construction: the initial simplex is the start point plus
a 5 % perturbation per coordinate, and proposals leaving the box are
reflected back inside. Good enough for the low-dimensional, cheap but
non-smooth objectives used by the model fits (smoothing SSE, ARMA CSS).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ConfigError

_REFLECT = 1.0
_EXPAND = 2.0
_CONTRACT = 0.5
_SHRINK = 0.5


@dataclass
class OptimizerResult:
    argmin: np.ndarray
    objective_value: float
    iterations: int
    converged: bool


def _fold_into_box(x: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Reflect coordinates back into [lo, hi] (triangular fold)."""
    x = x.copy()
    span = hi - lo
    for i in range(len(x)):
        if span[i] <= 0:
            x[i] = lo[i]
            continue
        if x[i] < lo[i] or x[i] > hi[i]:
            period = 2.0 * span[i]
            offset = (x[i] - lo[i]) % period
            x[i] = lo[i] + (offset if offset <= span[i] else period - offset)
    return x


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    bounds: Sequence[tuple[float, float]],
    tol: float = 1e-8,
    max_iter: int = 500,
) -> OptimizerResult:
    """Minimize ``objective`` inside the box ``bounds`` starting from ``x0``.

    Converged when the simplex diameter or the objective spread drops below
    ``tol``; otherwise stops at ``max_iter`` with ``converged=False``. The
    returned point is never worse than the start point.
    """
    x0 = np.asarray(x0, dtype=float)
    lo = np.array([b[0] for b in bounds], dtype=float)
    hi = np.array([b[1] for b in bounds], dtype=float)
    if len(lo) != len(x0):
        raise ConfigError("nelder_mead: bounds length must match x0")
    if np.any(lo > hi):
        raise ConfigError("nelder_mead: empty box")

    n = len(x0)
    x0 = _fold_into_box(x0, lo, hi)
    f0 = float(objective(x0))
    if not np.isfinite(f0):
        raise ConfigError("nelder_mead: objective not finite at start point")

    simplex = [x0]
    for i in range(n):
        step = 0.05 * abs(x0[i]) if x0[i] != 0 else 0.05
        vertex = x0.copy()
        vertex[i] += step
        simplex.append(_fold_into_box(vertex, lo, hi))
    values = [f0] + [float(objective(v)) for v in simplex[1:]]

    def sort_simplex() -> None:
        order = np.argsort(values, kind="stable")
        simplex[:] = [simplex[i] for i in order]
        values[:] = [values[i] for i in order]

    sort_simplex()
    iterations = 0
    converged = False
    while iterations < max_iter:
        diameter = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:]) if n else 0.0
        spread = values[-1] - values[0]
        if diameter < tol:
            converged = True
            break
        if spread < tol:
            # tied vertex values on a wide simplex: either a flat objective
            # (converged) or a symmetric straddle of the minimum (keep going)
            probe = float(objective(_fold_into_box(np.mean(simplex, axis=0), lo, hi)))
            if abs(probe - values[0]) < tol:
                converged = True
                break
        iterations += 1

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]

        reflected = _fold_into_box(centroid + _REFLECT * (centroid - worst), lo, hi)
        f_reflected = float(objective(reflected))
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
        elif f_reflected < values[0]:
            expanded = _fold_into_box(centroid + _EXPAND * (centroid - worst), lo, hi)
            f_expanded = float(objective(expanded))
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
        else:
            contracted = _fold_into_box(centroid + _CONTRACT * (worst - centroid), lo, hi)
            f_contracted = float(objective(contracted))
            if f_contracted < values[-1]:
                simplex[-1], values[-1] = contracted, f_contracted
            else:
                best = simplex[0]
                for i in range(1, n + 1):
                    simplex[i] = _fold_into_box(best + _SHRINK * (simplex[i] - best), lo, hi)
                    values[i] = float(objective(simplex[i]))
        sort_simplex()

    sort_simplex()
    return OptimizerResult(
        argmin=simplex[0].copy(),
        objective_value=values[0],
        iterations=iterations,
        converged=converged,
    )
