import math

import numpy as np
import pytest

from fractalcalc import (
    CantorSpec,
    DomainError,
    GridFunction,
    ParameterError,
    ResolutionError,
    build_staircase,
    derivative_grid,
    eval_staircase,
    fractal_derivative,
    fractal_integral,
    in_set,
    set_samples,
)
from fractalcalc.calculus import _segment_index

ALPHA = 0.7564707973660301
GAMMA = math.gamma(ALPHA + 1.0)


@pytest.fixture(scope="module")
def table():
    return build_staircase(CantorSpec(mu=0.2, depth=12), ALPHA)


@pytest.fixture(scope="module")
def staircase_fn(table):
    # f(t) = S(t); its derivative with respect to the staircase is one
    return GridFunction.from_function(table, lambda t: eval_staircase(table, t))


def test_in_set_distinguishes_points(table):
    assert in_set(table, 0.0)
    assert in_set(table, 1.0)
    assert in_set(table, 0.4)
    assert in_set(table, 0.6)       # gap endpoints belong to the set
    assert not in_set(table, 0.5)
    assert not in_set(table, 0.41)
    with pytest.raises(DomainError):
        in_set(table, -0.1)


def test_from_function_defaults_to_breakpoints(table):
    f = GridFunction.from_function(table, lambda t: t)
    assert len(f) == len(table.t)
    assert np.array_equal(f.t, table.t)


def test_from_values_requires_set_points(table):
    with pytest.raises(ParameterError):
        GridFunction.from_values(table, [0.0, 0.5], [1.0, 1.0])


def test_derivative_of_staircase_is_one(staircase_fn):
    d = derivative_grid(staircase_fn)
    assert np.allclose(d.values, 1.0, atol=1e-9)


def test_derivative_off_set_is_zero(staircase_fn):
    assert fractal_derivative(staircase_fn, 0.5) == 0.0
    assert fractal_derivative(staircase_fn, 0.45) == 0.0


def test_derivative_at_unsampled_set_point_raises(table):
    f = GridFunction.from_values(table, [0.0, 0.4, 0.6, 1.0],
                                 [0.0, 1.0, 2.0, 3.0])
    # 0.16 belongs to the set but carries no stored sample
    with pytest.raises(ParameterError):
        fractal_derivative(f, 0.16)


def test_derivative_matches_chain_rule(table):
    # for f = S^2 the staircase quotient gives 2 S exactly up to grid error
    f = GridFunction.from_function(
        table, lambda t: eval_staircase(table, t) ** 2)
    d = derivative_grid(f)
    expected = 2.0 * f.s
    assert np.allclose(d.values, expected, atol=5e-4)


def test_single_sample_derivative_raises(table):
    f = GridFunction.from_values(table, [0.0], [1.0])
    with pytest.raises(ResolutionError):
        fractal_derivative(f, 0.0)


def test_integral_of_one_is_total_mass(table):
    f = GridFunction.from_function(table, lambda t: np.ones_like(t))
    assert fractal_integral(f, 0.0, 1.0) == pytest.approx(GAMMA, rel=1e-9)


def test_integral_splits_additively(table):
    f = GridFunction.from_function(table, lambda t: eval_staircase(table, t))
    whole = fractal_integral(f, 0.0, 1.0)
    parts = fractal_integral(f, 0.0, 0.4) + fractal_integral(f, 0.4, 1.0)
    assert whole == pytest.approx(parts, rel=1e-12)


def test_integral_over_gap_is_zero(table):
    f = GridFunction.from_function(table, lambda t: np.ones_like(t))
    assert fractal_integral(f, 0.41, 0.59) == 0.0


def test_integral_fundamental_pairing(table):
    # integrating D(S^2) recovers S(1)^2 to first order in the grid spacing
    f = GridFunction.from_function(
        table, lambda t: eval_staircase(table, t) ** 2)
    d = derivative_grid(f)
    total = fractal_integral(d, 0.0, 1.0)
    assert total == pytest.approx(GAMMA ** 2, rel=1e-3)


def test_breakpoint_grid_integrates_staircase_functions_exactly(table):
    # on the bare breakpoint grid the quotient collapses to a per-segment
    # secant and the left sum telescopes, so the pairing is exact to rounding
    f = GridFunction.from_function(
        table, lambda t: np.exp(eval_staircase(table, t)))
    total = fractal_integral(derivative_grid(f), 0.0, 1.0)
    expected = math.exp(eval_staircase(table, 1.0)) - 1.0
    assert total == pytest.approx(expected, rel=1e-12)


def test_ftc_error_shrinks_with_depth():
    errors = []
    for depth in (6, 8, 10):
        tab = build_staircase(CantorSpec(mu=0.2, depth=depth), ALPHA)
        grid = set_samples(tab, 3)
        f = GridFunction.from_function(
            tab, lambda t: eval_staircase(tab, t) ** 2, t=grid)
        total = fractal_integral(derivative_grid(f), 0.0, 1.0)
        errors.append(abs(total - eval_staircase(tab, 1.0) ** 2))
    assert errors[0] > errors[1] > errors[2]
    assert errors[-1] <= 1e-2 * GAMMA ** 2


def test_set_samples_layout(table):
    grid = set_samples(table, 2)
    assert grid.size == 2 * len(table.t)
    assert np.all(np.diff(grid) > 0.0)
    base = set_samples(table, 0)
    assert np.array_equal(base, table.t)


def test_segment_index_alternates(table):
    # even segments cover set intervals, odd segments cover gaps
    assert _segment_index(table, 0.1) % 2 == 0
    assert _segment_index(table, 0.5) % 2 == 1
