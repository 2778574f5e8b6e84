"""Derivatives and integrals taken with respect to a staircase.

A GridFunction stores samples of a scalar function at points of the set
underlying a StaircaseTable.  Differentiation is the difference quotient in
staircase value rather than in time, and integration is the left sum of
values against staircase increments; both collapse to the classical
operations when the staircase is the identity.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, ResolutionError
from .staircase import StaircaseTable, eval_staircase


def _segment_index(table: StaircaseTable, t: float):
    # breakpoints alternate interval-start/interval-end, so even segments
    # are covering intervals and odd segments are gaps
    grid = table.t
    if not grid[0] <= t <= grid[-1]:
        raise DomainError(f"t={t!r} outside the tabulated span")
    i = int(np.searchsorted(grid, t, side="right")) - 1
    return min(max(i, 0), grid.size - 2)


def in_set(table: StaircaseTable, t: float) -> bool:
    """Whether t lies in the depth-m set the table was built from."""
    i = _segment_index(table, t)
    if i % 2 == 0:
        return True
    # inside a gap segment only the endpoints belong to the set
    return t == table.t[i] or t == table.t[i + 1]


def set_samples(table: StaircaseTable, per_segment: int = 0) -> np.ndarray:
    """Set points of the table: breakpoints plus interior samples.

    With per_segment = 0 this is just the breakpoint grid.  Positive values
    insert that many uniformly spaced points inside every covering segment,
    which matters for convergence studies: on the bare breakpoint grid the
    difference quotients of any function of the staircase value telescope
    and integrate it exactly, so refinement effects only show up once
    segments carry interior samples.
    """
    if per_segment < 0:
        raise ParameterError(f"per_segment must be >= 0, got {per_segment!r}")
    t = table.t
    if per_segment == 0:
        return t.copy()
    lefts = t[0::2]
    rights = t[1::2]
    w = np.linspace(0.0, 1.0, per_segment + 2)
    return (lefts[:, None] + w[None, :] * (rights - lefts)[:, None]).ravel()


def _apply(fn, t: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(fn(t), dtype=float)
        if out.shape == t.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([float(fn(x)) for x in t])


@dataclass(frozen=True)
class GridFunction:
    """Function samples pinned to set points of a staircase table."""

    table: StaircaseTable
    t: np.ndarray
    s: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        s = np.asarray(self.s, dtype=float)
        values = np.asarray(self.values, dtype=float)
        for name, arr in (("t", t), ("s", s), ("values", values)):
            object.__setattr__(self, name, arr)
            arr.setflags(write=False)
        if t.ndim != 1 or t.size == 0:
            raise ParameterError("sample grid must be a non-empty 1-d array")
        if s.shape != t.shape or values.shape != t.shape:
            raise ParameterError("t, s and values must have matching shapes")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("sample grid must be strictly increasing")

    def __len__(self):
        return int(self.t.size)

    @classmethod
    def from_function(cls, table: StaircaseTable, fn, t=None) -> "GridFunction":
        """Sample ``fn`` at set points; defaults to every breakpoint.

        ``fn`` receives the time array (vectorized call, with a scalar
        fallback).  Supplied grids must consist of set points.
        """
        if t is None:
            t = table.t
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cls._require_set_points(table, t)
        s = np.interp(t, table.t, table.s)
        return cls(table=table, t=t, s=s, values=_apply(fn, t))

    @classmethod
    def from_values(cls, table: StaircaseTable, t, values) -> "GridFunction":
        t = np.atleast_1d(np.asarray(t, dtype=float))
        cls._require_set_points(table, t)
        s = np.interp(t, table.t, table.s)
        return cls(table=table, t=t, s=s, values=values)

    @staticmethod
    def _require_set_points(table, t):
        bad = [x for x in np.atleast_1d(t) if not in_set(table, float(x))]
        if bad:
            raise ParameterError(
                f"{len(bad)} sample point(s) fall outside the set, first: {bad[0]!r}")


def fractal_derivative(f: GridFunction, t: float) -> float:
    """Difference quotient of f in staircase value at the sample point t.

    Points off the set return 0.0 by convention.  Interior samples use the
    symmetric quotient (values[i+1] - values[i-1]) / (s[i+1] - s[i-1]); the
    first and last samples fall back to one-sided quotients.
    """
    t = float(t)
    if not in_set(f.table, t):  # raises DomainError outside the span
        return 0.0
    i = int(np.searchsorted(f.t, t))
    if i >= len(f) or f.t[i] != t:
        raise ParameterError(
            f"t={t!r} is in the set but is not one of the stored samples")
    if len(f) < 2:
        raise ResolutionError("cannot form a quotient from a single sample")
    lo = max(i - 1, 0)
    hi = min(i + 1, len(f) - 1)
    ds = f.s[hi] - f.s[lo]
    if ds <= 0.0:
        raise ResolutionError(
            f"staircase does not advance around t={t!r}; refine the grid")
    return float((f.values[hi] - f.values[lo]) / ds)


def derivative_grid(f: GridFunction) -> GridFunction:
    """Fractal derivative at every stored sample, as a new GridFunction."""
    if len(f) < 2:
        raise ResolutionError("cannot form quotients from fewer than two samples")
    s, v = f.s, f.values
    ds = s[2:] - s[:-2]
    if np.any(ds <= 0.0) or s[1] <= s[0] or s[-1] <= s[-2]:
        raise ResolutionError("staircase stalls inside the sample grid; refine it")
    out = np.empty_like(v)
    out[1:-1] = (v[2:] - v[:-2]) / ds
    out[0] = (v[1] - v[0]) / (s[1] - s[0])
    out[-1] = (v[-1] - v[-2]) / (s[-1] - s[-2])
    return GridFunction(table=f.table, t=f.t, s=f.s, values=out)


def fractal_integral(f: GridFunction, a: float, b: float) -> float:
    """Left sum of f against staircase increments over [a, b].

    Needs at least two samples inside [a, b] unless the staircase is flat
    there, in which case the integral is exactly zero (gaps carry no mass).
    """
    a, b = float(a), float(b)
    if not a < b:
        raise ParameterError("integration bounds need a < b")
    lo, hi = f.table.span
    if a < lo or b > hi:
        raise DomainError(f"[{a}, {b}] leaves the tabulated span [{lo}, {hi}]")
    i0 = int(np.searchsorted(f.t, a, side="left"))
    i1 = int(np.searchsorted(f.t, b, side="right")) - 1
    if i1 - i0 + 1 < 2:
        if eval_staircase(f.table, a) == eval_staircase(f.table, b):
            return 0.0
        raise ResolutionError(
            f"fewer than two samples cover [{a}, {b}] but mass accrues there")
    ds = np.diff(f.s[i0:i1 + 1])
    return float(np.sum(f.values[i0:i1] * ds))
