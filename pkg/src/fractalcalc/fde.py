"""Initial value problems driven by a staircase clock.

Equations of the form D y = g(y) or the damped second order family

    D y = z,    D z = -u(tau) f(y, z) z - v(tau) h(y) + q(tau, y, z)

are integrated in the staircase variable tau = S(t), where D denotes the
derivative with respect to S.  In tau the systems are ordinary ODEs, so a
fixed-step classical Runge-Kutta scheme (or explicit Euler) applies; the
results are mapped back to t through the inverse staircase ``warp_time``.
Because S is flat across gaps, a solution in t is constant there, which the
piecewise-linear interpolation of Trajectory.at_time reproduces.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericalBlowupError, ParameterError
from .staircase import StaircaseTable, eval_staircase

BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class FdeConstants:
    """Structural constants used by the assumption and theorem checkers.

    u0/E bound the damping coefficient u, v0/Q bound the stiffness
    coefficient v, lambda1/eps0/eps1 locate the damping shape f, lambda2 and
    eps2 pin the restoring slope, sigma and delta weight the forcing bounds.
    ``delta`` defaults to E (lambda1 + eps0) / 2 when left unset.
    """

    u0: float = 1.0
    E: float = 1.0
    v0: float = 1.0
    Q: float = 1.0
    lambda1: float = 0.5
    lambda2: float = 1.0
    eps0: float = 0.25
    eps1: float = 0.5
    eps2: float = 0.1
    sigma: float = 1.0
    delta: Optional[float] = None

    def delta_value(self) -> float:
        if self.delta is not None:
            return self.delta
        return self.E * (self.lambda1 + self.eps0) / 2.0


@dataclass
class FdeSystem:
    """Damped second order system with optional forcing.

    ``u`` and ``v`` map tau to positive coefficients, ``f`` maps (y, z) to a
    damping shape, ``h`` is the restoring force and ``q`` an optional forcing
    term q(tau, y, z).  ``r1``/``r2`` are optional envelopes bounding the
    forcing as |q| <= r1 + r2 [H(y) + z^2]^(sigma^alpha / 2) + delta^alpha |z|
    with H the restoring potential.  The analytic hooks ``h_integral``,
    ``h_derivative`` and ``v_derivative`` replace numeric quadrature and
    finite differences when provided.
    """

    u: Callable[[float], float]
    v: Callable[[float], float]
    f: Callable[[float, float], float]
    h: Callable[[float], float]
    q: Optional[Callable[[float, float, float], float]] = None
    constants: FdeConstants = field(default_factory=FdeConstants)
    r1: Optional[Callable[[float], float]] = None
    r2: Optional[Callable[[float], float]] = None
    h_integral: Optional[Callable[[float], float]] = None
    h_derivative: Optional[Callable[[float], float]] = None
    v_derivative: Optional[Callable[[float], float]] = None

    def forcing(self, tau, y, z):
        if self.q is None:
            return 0.0
        return self.q(tau, y, z)

    def rhs(self, tau, y, z):
        """Right-hand side (Dy, Dz) of the first order form in tau."""
        zdot = -self.u(tau) * self.f(y, z) * z - self.v(tau) * self.h(y)
        if self.q is not None:
            zdot = zdot + self.q(tau, y, z)
        return z, zdot

    def restoring_integral(self, y):
        """Potential H(y), the integral of h from 0 to y."""
        if self.h_integral is not None:
            return self.h_integral(y)
        y_arr = np.asarray(y, dtype=float)
        out = np.array([quad(self.h, 0.0, float(val), limit=200)[0]
                        for val in y_arr.ravel()])
        if y_arr.ndim == 0:
            return float(out[0])
        return out.reshape(y_arr.shape)

    def restoring_slope(self, y):
        """h'(y), analytic when available, else a central difference."""
        if self.h_derivative is not None:
            return self.h_derivative(y)
        return _central_diff(self.h, y)

    def coefficient_slope(self, tau):
        """v'(tau), analytic when available, else a central difference."""
        if self.v_derivative is not None:
            return self.v_derivative(tau)
        return _central_diff(self.v, tau)


def _central_diff(fn, x, rel_step=1e-6):
    x_arr = np.asarray(x, dtype=float)
    step = rel_step * np.maximum(1.0, np.abs(x_arr))
    hi = _apply_scalar(fn, x_arr + step)
    lo = _apply_scalar(fn, x_arr - step)
    out = (hi - lo) / (2.0 * step)
    if x_arr.ndim == 0:
        return float(out)
    return out


def _apply_scalar(fn, x):
    """Evaluate a scalar-to-scalar function over any array shape.

    Prefers one vectorized call; constant-returning functions broadcast; a
    per-element loop is the last resort.
    """
    x_arr = np.asarray(x, dtype=float)
    if x_arr.ndim == 0:
        return float(fn(float(x_arr)))
    try:
        out = np.asarray(fn(x_arr), dtype=float)
        if out.shape == x_arr.shape:
            return out
        if out.ndim == 0:
            return np.full(x_arr.shape, float(out))
    except (TypeError, ValueError):
        pass
    flat = np.array([float(fn(float(v))) for v in x_arr.ravel()])
    return flat.reshape(x_arr.shape)


@dataclass(frozen=True)
class Trajectory:
    """Recorded solution samples in both clocks.

    ``tau`` is the integration grid, ``t`` the corresponding set points from
    the inverse staircase.  ``z`` is None for first order problems.  ``meta``
    records solver settings for reproducibility.
    """

    t: np.ndarray
    tau: np.ndarray
    y: np.ndarray
    z: Optional[np.ndarray]
    table: StaircaseTable = field(repr=False)
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return int(self.tau.size)

    @property
    def terminal(self):
        """Final state, (y,) or (y, z)."""
        if self.z is None:
            return (float(self.y[-1]),)
        return float(self.y[-1]), float(self.z[-1])

    def at_time(self, t):
        """State at time t by interpolation in tau; constant across gaps."""
        tau = eval_staircase(self.table, t)
        tau = np.clip(tau, self.tau[0], self.tau[-1])
        y = np.interp(tau, self.tau, self.y)
        if self.z is None:
            return (y if np.ndim(t) else float(y),)
        z = np.interp(tau, self.tau, self.z)
        if np.ndim(t):
            return y, z
        return float(y), float(z)


class _BlowupSignal(Exception):
    def __init__(self, taus, states, offender):
        self.taus = taus
        self.states = states
        self.offender = offender


def _rk4_step(rhs, tau, state, h):
    k1 = rhs(tau, state)
    k2 = rhs(tau + 0.5 * h, state + 0.5 * h * k1)
    k3 = rhs(tau + 0.5 * h, state + 0.5 * h * k2)
    k4 = rhs(tau + h, state + h * k3)
    return state + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def _euler_step(rhs, tau, state, h):
    return state + h * rhs(tau, state)


_STEPPERS = {"rk4": _rk4_step, "euler": _euler_step}


def _integrate(rhs, tau_end, state0, dtau, method, record_every, blowup_limit):
    """Fixed-step march from tau=0 to tau_end, recording every k-th step.

    The last step is shortened so the grid lands exactly on tau_end.  The
    initial state and the final state are always recorded.
    """
    try:
        stepper = _STEPPERS[method]
    except KeyError:
        raise ParameterError(
            f"unknown method {method!r}, expected one of {sorted(_STEPPERS)}") from None
    if not dtau > 0.0:
        raise ParameterError(f"dtau must be positive, got {dtau!r}")
    if record_every < 1:
        raise ParameterError("record_every must be >= 1")
    state = np.asarray(state0, dtype=float).copy()
    n_steps = max(int(math.ceil(tau_end / dtau - 1e-12)), 0)
    taus = [0.0]
    states = [state.copy()]
    tau = 0.0
    for k in range(n_steps):
        last = k == n_steps - 1
        h = (tau_end - tau) if last else dtau
        state = stepper(rhs, tau, state, h)
        tau = tau_end if last else (k + 1) * dtau
        if not np.all(np.isfinite(state)) or np.max(np.abs(state)) > blowup_limit:
            raise _BlowupSignal(taus, states, tau)
        if last or (k + 1) % record_every == 0:
            taus.append(tau)
            states.append(state.copy())
    return np.array(taus), np.stack(states, axis=0)


def _tau_horizon(table, t_end):
    tau_end = eval_staircase(table, t_end)
    if tau_end < 0.0:
        raise ParameterError(
            f"t_end={t_end!r} precedes the staircase anchor t0={table.t0!r}")
    return float(tau_end)


def _finish(table, taus, states, meta, second_order):
    t = warp_time(table, taus)
    if second_order:
        return Trajectory(t=t, tau=taus, y=states[:, 0], z=states[:, 1],
                          table=table, meta=meta)
    return Trajectory(t=t, tau=taus, y=states[:, 0], z=None, table=table, meta=meta)


def solve_first_order(g, table: StaircaseTable, h0: float, t_end: float,
                      dtau: float = 1e-3, method: str = "rk4",
                      record_every: int = 1,
                      blowup_limit: float = BLOWUP_LIMIT) -> Trajectory:
    """Integrate D y = g(y) from the anchor up to time t_end.

    On blow-up a NumericalBlowupError is raised with the partial trajectory
    attached.
    """
    tau_end = _tau_horizon(table, t_end)
    meta = {"method": method, "dtau": float(dtau), "tau_end": tau_end,
            "t_end": float(t_end), "alpha": table.alpha}

    def rhs(tau, state):
        return np.asarray(g(state[0]), dtype=float).reshape(1)

    state0 = np.array([float(h0)])
    try:
        taus, states = _integrate(rhs, tau_end, state0, dtau, method,
                                  record_every, blowup_limit)
    except _BlowupSignal as sig:
        partial = _finish(table, np.array(sig.taus), np.stack(sig.states), meta, False)
        raise NumericalBlowupError(
            f"state exceeded {blowup_limit:g} near tau={sig.offender:.6g}",
            trajectory=partial) from None
    return _finish(table, taus, states, meta, False)


def solve_second_order(sys: FdeSystem, table: StaircaseTable, y0: float,
                       z0: float, t_end: float, dtau: float = 1e-3,
                       method: str = "rk4", record_every: int = 1,
                       blowup_limit: float = BLOWUP_LIMIT) -> Trajectory:
    """Integrate the damped second order system from the anchor to t_end."""
    tau_end = _tau_horizon(table, t_end)
    meta = {"method": method, "dtau": float(dtau), "tau_end": tau_end,
            "t_end": float(t_end), "alpha": table.alpha}

    def rhs(tau, state):
        dy, dz = sys.rhs(tau, state[0], state[1])
        return np.array([dy, dz])

    state0 = np.array([float(y0), float(z0)])
    try:
        taus, states = _integrate(rhs, tau_end, state0, dtau, method,
                                  record_every, blowup_limit)
    except _BlowupSignal as sig:
        partial = _finish(table, np.array(sig.taus), np.stack(sig.states), meta, True)
        raise NumericalBlowupError(
            f"state exceeded {blowup_limit:g} near tau={sig.offender:.6g}",
            trajectory=partial) from None
    return _finish(table, taus, states, meta, True)


def warp_time(table: StaircaseTable, tau):
    """Smallest set point t with S(t) >= tau (the inverse staircase).

    Values inside a plateau's range return the plateau's left breakpoint, so
    warp_time(S(t)) <= t with equality exactly on the rising segments.
    """
    arr = np.asarray(tau, dtype=float)
    s = table.s
    if np.any(arr < s[0]) or np.any(arr > s[-1]):
        raise DomainError(
            f"tau outside the staircase range [{s[0]!r}, {s[-1]!r}]")
    j = np.searchsorted(s, arr, side="left")
    j = np.clip(j, 0, s.size - 1)
    exact = s[j] == arr
    j0 = np.maximum(j - 1, 0)
    ds = s[j] - s[j0]
    frac = np.where(ds > 0.0, (arr - s[j0]) / np.where(ds > 0.0, ds, 1.0), 0.0)
    t_between = table.t[j0] + frac * (table.t[j] - table.t[j0])
    out = np.where(exact, table.t[j], t_between)
    if arr.ndim == 0:
        return float(out)
    return out
