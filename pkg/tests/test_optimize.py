from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pqforecast.errors import ConfigError
from pqforecast.numerics import nelder_mead


def test_quadratic_bowl():
    result = nelder_mead(lambda v: (v[0] - 3.0) ** 2, [0.0], [(-10.0, 10.0)])
    assert result.converged
    assert result.argmin[0] == pytest.approx(3.0, abs=1e-4)


def test_rosenbrock():
    rosen = lambda v: (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2  # noqa: E731
    result = nelder_mead(rosen, [-1.0, 1.0], [(-5.0, 5.0)] * 2, tol=1e-10, max_iter=3000)
    assert result.argmin == pytest.approx([1.0, 1.0], abs=1e-3)


def test_constant_objective_converges_at_start():
    result = nelder_mead(lambda v: 7.0, [1.0, 2.0], [(-10.0, 10.0)] * 2)
    assert result.converged
    assert result.iterations == 0
    assert result.argmin.tolist() == [1.0, 2.0]
    assert result.objective_value == 7.0


def test_max_iter_returns_unconverged_result():
    rosen = lambda v: (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2  # noqa: E731
    result = nelder_mead(rosen, [-1.0, 1.0], [(-5.0, 5.0)] * 2, tol=1e-14, max_iter=5)
    assert not result.converged
    assert np.isfinite(result.objective_value)


def test_objective_value_matches_argmin():
    obj = lambda v: float(np.sum(v**2)) + 1.0  # noqa: E731
    result = nelder_mead(obj, [2.0, -1.5], [(-4.0, 4.0)] * 2)
    assert result.objective_value == pytest.approx(obj(result.argmin), rel=1e-12)


def test_bounds_respected_during_search():
    lo, hi = 0.5, 2.0
    seen = []

    def objective(v):
        seen.append(v.copy())
        return (v[0] - 5.0) ** 2  # minimum outside the box

    result = nelder_mead(objective, [1.0], [(lo, hi)], max_iter=200)
    assert all(lo - 1e-12 <= v[0] <= hi + 1e-12 for v in seen)
    assert result.argmin[0] == pytest.approx(hi, abs=1e-3)


def test_empty_box_errors():
    with pytest.raises(ConfigError):
        nelder_mead(lambda v: 0.0, [0.0], [(1.0, -1.0)])


def test_nonfinite_start_errors():
    with pytest.raises(ConfigError):
        nelder_mead(lambda v: float("nan"), [0.0], [(-1.0, 1.0)])


def test_deterministic():
    obj = lambda v: np.sin(3 * v[0]) + v[0] ** 2 + 0.3 * v[1] ** 2  # noqa: E731
    a = nelder_mead(obj, [1.0, -2.0], [(-5.0, 5.0)] * 2)
    b = nelder_mead(obj, [1.0, -2.0], [(-5.0, 5.0)] * 2)
    assert np.array_equal(a.argmin, b.argmin)
    assert a.iterations == b.iterations


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-3.0, 3.0), st.floats(-3.0, 3.0),
    st.floats(0.1, 5.0), st.floats(-2.0, 2.0),
)
def test_never_worse_than_start(x0, x1, curve, center):
    obj = lambda v: curve * float(np.sum((v - center) ** 2)) + np.sin(v[0])  # noqa: E731
    start = np.array([x0, x1])
    result = nelder_mead(obj, start, [(-6.0, 6.0)] * 2, max_iter=60)
    assert result.objective_value <= obj(start) + 1e-12
