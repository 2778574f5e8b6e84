"""Stability analysis in the staircase clock.

Three layers live here.  LyapunovFunction and lyapunov_derivative evaluate
candidate functions and their derivative along a flow.  classify_stability
probes an equilibrium empirically with balls whose radii scale as
radius**alpha, matching how the staircase clock rescales neighborhoods, and
sorts the outcome into a small label set.  check_assumptions and the two
verify_* routines test the structural conditions (C1)-(C7) of the damped
second order family on grids and then certify, along computed trajectories,
the decrease and sandwich inequalities the stability and boundedness
statements rest on.

Everything returns plain report dataclasses with a ``to_json`` method; no
routine prints or plots.
"""

import inspect
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, PreconditionError
from .fde import FdeConstants, FdeSystem, _apply_scalar, warp_time
from .staircase import StaircaseTable, eval_staircase

BLOWUP_LIMIT = 1e12


def _jsonify(value):
    """Recursively convert numpy scalars and arrays so json.dumps accepts them."""
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.bool_):
        return bool(value)
    return value


# ---------------------------------------------------------------------------
# Lyapunov functions and their derivative along a flow
# ---------------------------------------------------------------------------

@dataclass
class LyapunovFunction:
    """Candidate function V(tau, *state) with optional analytic gradients.

    ``grad_state`` is a tuple of callables, one per state component, and
    ``grad_tau`` the clock derivative; missing gradients fall back to central
    finite differences, which injects noise around 1e-10, so analytic forms
    are preferred wherever a drift check is tight.
    """

    value: Callable
    grad_state: Optional[tuple] = None
    grad_tau: Optional[Callable] = None
    fd_step: float = 1e-6

    def __call__(self, tau, *state):
        return self.value(tau, *state)

    def state_gradient(self, tau, state):
        if self.grad_state is not None:
            return tuple(g(tau, *state) for g in self.grad_state)
        state = tuple(state)
        grads = []
        for i, x in enumerate(state):
            step = self.fd_step * max(1.0, float(np.max(np.abs(x))))
            hi = list(state)
            lo = list(state)
            hi[i] = x + step
            lo[i] = x - step
            grads.append((self.value(tau, *hi) - self.value(tau, *lo)) / (2.0 * step))
        return tuple(grads)

    def time_gradient(self, tau, state):
        if self.grad_tau is not None:
            return self.grad_tau(tau, *state)
        step = self.fd_step * max(1.0, float(np.max(np.abs(tau))))
        if float(np.min(tau)) - step < 0.0:
            # one-sided difference keeps evaluations inside the clock domain
            return (self.value(tau + step, *state) - self.value(tau, *state)) / step
        return (self.value(tau + step, *state)
                - self.value(tau - step, *state)) / (2.0 * step)


def as_tau_field(flow):
    """Normalize a flow description to (rhs, dim).

    Accepts an FdeSystem, a scalar map g(y) for first order problems, or a
    planar field field(tau, y, z) returning (Dy, Dz).  The returned rhs maps
    (tau, state_tuple) to a tuple of component derivatives.
    """
    if isinstance(flow, FdeSystem):
        return (lambda tau, st: flow.rhs(tau, st[0], st[1])), 2
    if not callable(flow):
        raise ParameterError(
            f"flow must be callable or an FdeSystem, got {type(flow).__name__}")
    try:
        n_params = len(inspect.signature(flow).parameters)
    except (TypeError, ValueError):
        raise ParameterError(
            "cannot inspect the flow's signature; wrap it in a function of "
            "1 argument (y) or 3 (tau, y, z)") from None
    if n_params == 1:
        return (lambda tau, st: (flow(st[0]),)), 1
    if n_params == 3:
        return (lambda tau, st: tuple(flow(tau, st[0], st[1]))), 2
    raise ParameterError(
        f"flow must take 1 argument (y) or 3 (tau, y, z), got {n_params}")


def lyapunov_derivative(L: LyapunovFunction, flow, state, tau=0.0):
    """Derivative of L along the flow at one state, in the staircase clock.

    Computes grad_tau + sum_i dV/dx_i * field_i and vectorizes over
    array-valued state components.
    """
    rhs, dim = as_tau_field(flow)
    if isinstance(state, tuple):
        comps = tuple(np.asarray(x, dtype=float) for x in state)
    else:
        arr = np.asarray(state, dtype=float)
        if dim == 1:
            # any scalar or array is the one component, vectorized
            comps = (arr,)
        elif arr.ndim == 1 and arr.size == dim:
            comps = tuple(arr)
        else:
            raise ParameterError(
                f"pass a tuple of {dim} components (arrays allowed)")
    if len(comps) != dim:
        raise ParameterError(f"state has {len(comps)} component(s), flow expects {dim}")
    derivs = rhs(tau, comps)
    grads = L.state_gradient(tau, comps)
    total = L.time_gradient(tau, comps)
    for g, d in zip(grads, derivs):
        total = total + g * d
    if np.ndim(total) == 0:
        return float(total)
    return total


# ---------------------------------------------------------------------------
# batch integration shared by the empirical probes
# ---------------------------------------------------------------------------

def _vectorize_rhs(rhs, dim, n_cols, probe_block):
    """Return f(tau, block) on (dim, n_cols) arrays, probing for array support."""

    def matrix_call(tau, block):
        out = rhs(tau, tuple(block))
        return np.stack([np.broadcast_to(np.asarray(c, dtype=float), (n_cols,))
                         for c in out])

    try:
        probe = matrix_call(0.0, probe_block)
        if probe.shape == (dim, n_cols) and np.all(np.isfinite(probe)):
            return matrix_call
    except Exception:
        pass

    def column_call(tau, block):
        cols = [np.asarray(rhs(tau, tuple(block[:, b])), dtype=float)
                for b in range(n_cols)]
        return np.stack(cols, axis=1)

    return column_call


def _batch_integrate(rhs, dim, Y0, tau_end, dtau, record_every,
                     limit=BLOWUP_LIMIT):
    """March many initial states at once, clipping escapes instead of raising.

    Returns (taus, blocks, escaped): blocks has shape (n_records, dim, B) and
    escaped marks columns that left the blow-up ball or went non-finite.
    Escaped columns stay frozen at their clipped value, so the remaining
    columns keep integrating undisturbed.
    """
    Y = np.array(Y0, dtype=float)
    _, B = Y.shape
    f = _vectorize_rhs(rhs, dim, B, Y)
    if not dtau > 0.0:
        raise ParameterError(f"dtau must be positive, got {dtau!r}")
    n_steps = max(int(math.ceil(tau_end / dtau - 1e-12)), 0)
    taus = [0.0]
    blocks = [Y.copy()]
    escaped = np.zeros(B, dtype=bool)
    tau = 0.0
    for k in range(n_steps):
        last = k == n_steps - 1
        h = (tau_end - tau) if last else dtau
        k1 = f(tau, Y)
        k2 = f(tau + 0.5 * h, Y + 0.5 * h * k1)
        k3 = f(tau + 0.5 * h, Y + 0.5 * h * k2)
        k4 = f(tau + h, Y + h * k3)
        Y_new = Y + (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        finite = np.all(np.isfinite(Y_new), axis=0)
        with np.errstate(invalid="ignore"):
            big = np.any(np.abs(Y_new) > limit, axis=0)
        bad = ~finite | big
        if np.any(bad):
            Y_new[:, bad] = np.clip(
                np.nan_to_num(Y_new[:, bad], nan=limit, posinf=limit,
                              neginf=-limit), -limit, limit)
        hold = escaped & ~bad
        if np.any(hold):
            Y_new[:, hold] = Y[:, hold]
        escaped |= bad
        Y = Y_new
        tau = tau_end if last else (k + 1) * dtau
        if last or (k + 1) % record_every == 0:
            taus.append(tau)
            blocks.append(Y.copy())
    return np.array(taus), np.stack(blocks, axis=0), escaped


# ---------------------------------------------------------------------------
# empirical stability classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    """Least squares decay fits of the leading deviation curve."""

    rate_tau: float
    r2_tau: float
    rate_t: float
    r2_t: float
    kappa_alpha: float
    bound_holds: bool


@dataclass
class StabilityReport:
    """Outcome of the ball-containment probe around an equilibrium."""

    classification: str
    alpha: float
    equilibrium: tuple
    eps_results: list
    delta_results: list
    decay: Optional[DecayFit]
    notes: tuple
    meta: dict

    def to_json(self):
        decay = None
        if self.decay is not None:
            decay = {"rate_tau": self.decay.rate_tau, "r2_tau": self.decay.r2_tau,
                     "rate_t": self.decay.rate_t, "r2_t": self.decay.r2_t,
                     "kappa_alpha": self.decay.kappa_alpha,
                     "bound_holds": self.decay.bound_holds}
        return _jsonify({
            "classification": self.classification,
            "alpha": self.alpha,
            "equilibrium": list(self.equilibrium),
            "eps": self.eps_results,
            "delta": self.delta_results,
            "decay": decay,
            "notes": list(self.notes),
            "meta": self.meta,
        })


def _fit_line(x, y):
    """Least squares line y ~ slope*x + intercept with its R^2."""
    A = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(A, y, rcond=None)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r2


def classify_stability(flow, table: StaircaseTable, equilibrium=0.0,
                       eps_grid=(0.5, 0.25, 0.1),
                       delta_grid=(0.5, 0.25, 0.1, 0.05, 0.02),
                       horizon: float = 20.0, dtau: float = 1e-3,
                       settle_rtol: float = 1e-3, fit_min_r2: float = 0.99,
                       bound_slack: float = 1e-3,
                       record_every: int = 20) -> StabilityReport:
    """Probe an equilibrium with alpha-scaled balls and label the outcome.

    For every tolerance eps the probe asks whether some delta from the grid
    keeps all trajectories launched on the sphere of radius delta**alpha
    inside the ball of radius eps**alpha over the horizon; the radii scale
    as radius**alpha because that is how the staircase clock rescales
    neighborhoods of the set.  Labels:

    - every eps satisfied and terminal deviations below settle_rtol of the
      initial ones: "asymptotically-stable", upgraded to
      "exponentially-stable" when the deviation admits a decay fit against
      plain time t, dev <= kappa_alpha * dev0 * exp(-rate * alpha * t), with
      R^2 >= fit_min_r2 over the latter half of the horizon that also holds
      pointwise from t = 0 up to the slack bound_slack.  The pointwise
      requirement matters: a slowly flattening decay can fit the tail well
      yet exceed any such bound near t = 0.
    - every eps satisfied without settling: "lyapunov-stable".
    - no eps satisfied, or an escape to the blow-up ball: "unstable-evidence".
    - anything else: "inconclusive".
    """
    rhs, dim = as_tau_field(flow)
    eq = np.atleast_1d(np.asarray(equilibrium, dtype=float))
    if eq.size != dim:
        raise ParameterError(f"equilibrium needs {dim} component(s), got {eq.size}")
    resid = float(np.max(np.abs(np.asarray(rhs(0.0, tuple(eq)), dtype=float))))
    if not resid < 1e-9:
        raise ParameterError(
            f"not an equilibrium: field magnitude {resid:.3g} at the given state")
    eps_list = sorted(float(e) for e in eps_grid)
    delta_list = sorted((float(d) for d in delta_grid), reverse=True)
    if not eps_list or not delta_list:
        raise ParameterError("eps_grid and delta_grid must be non-empty")
    if eps_list[0] <= 0.0 or delta_list[-1] <= 0.0:
        raise ParameterError("eps and delta values must be positive")

    alpha = table.alpha
    tau_end = min(float(horizon), table.s_range[1])
    notes = ["deviation balls scale as radius**alpha with alpha from the table"]
    if tau_end < float(horizon):
        notes.append(
            f"horizon truncated to tau={tau_end:.6g}, the staircase range end")

    if dim == 1:
        dirs = np.array([[1.0], [-1.0]])
    else:
        dirs = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    n_dirs = dirs.shape[0]
    cols = [eq + (d ** alpha) * u for d in delta_list for u in dirs]
    Y0 = np.array(cols).T
    taus, blocks, escaped = _batch_integrate(rhs, dim, Y0, tau_end, dtau,
                                             record_every)
    devs = np.linalg.norm(blocks - eq.reshape(1, dim, 1), axis=1)

    delta_results = []
    sup_by_delta = []
    settled = []
    for i, d in enumerate(delta_list):
        sl = slice(i * n_dirs, (i + 1) * n_dirs)
        sup = float(np.max(devs[:, sl]))
        term = float(np.max(devs[-1, sl]))
        d_alpha = d ** alpha
        ok = term <= settle_rtol * d_alpha
        sup_by_delta.append(sup)
        settled.append(ok)
        delta_results.append({"delta": d, "delta_alpha": d_alpha,
                              "sup_dev": sup, "terminal_dev": term,
                              "escaped": bool(np.any(escaped[sl])),
                              "settled": ok})

    eps_results = []
    for e in eps_list:
        e_alpha = e ** alpha
        good = [d for d, sup in zip(delta_list, sup_by_delta) if sup < e_alpha]
        eps_results.append({"eps": e, "eps_alpha": e_alpha,
                            "satisfied": bool(good),
                            "delta": max(good) if good else None})
    n_good = sum(r["satisfied"] for r in eps_results)
    stable = n_good == len(eps_results)
    asymptotic = stable and all(settled)

    decay = None
    if asymptotic:
        t = warp_time(table, taus)
        floor = 1e-300
        half_tau = taus >= 0.5 * taus[-1]
        half_t = t >= 0.5 * t[-1]
        log_rep = np.log(np.maximum(devs[:, 0], floor))
        slope_tau, _, r2_tau = _fit_line(taus[half_tau], log_rep[half_tau])
        slope_t, intercept_t, r2_t = _fit_line(t[half_t], log_rep[half_t])
        bound_all = True
        for b in range(devs.shape[1]):
            log_b = np.log(np.maximum(devs[:, b], floor))
            m_b, c_b, r2_b = _fit_line(t[half_t], log_b[half_t])
            if m_b >= 0.0 or r2_b < fit_min_r2:
                bound_all = False
                break
            if np.any(devs[:, b] > np.exp(c_b + m_b * t) * (1.0 + bound_slack)):
                bound_all = False
                break
        dev0 = float(devs[0, 0])
        decay = DecayFit(
            rate_tau=-slope_tau, r2_tau=r2_tau,
            rate_t=-slope_t / alpha, r2_t=r2_t,
            kappa_alpha=float(np.exp(intercept_t)) / dev0 if dev0 > 0 else math.inf,
            bound_holds=bound_all)

    if not stable:
        if n_good == 0 or bool(np.any(escaped)):
            classification = "unstable-evidence"
        else:
            classification = "inconclusive"
        if bool(np.any(escaped)):
            notes.append("some trajectories left the blow-up ball")
    elif not asymptotic:
        classification = "lyapunov-stable"
    elif decay is not None and decay.bound_holds and decay.r2_t >= fit_min_r2 \
            and decay.rate_t > 0.0:
        classification = "exponentially-stable"
    else:
        classification = "asymptotically-stable"

    meta = {"horizon": float(horizon), "tau_end": tau_end, "dtau": float(dtau),
            "record_every": int(record_every), "settle_rtol": settle_rtol,
            "fit_min_r2": fit_min_r2, "bound_slack": bound_slack,
            "directions": int(n_dirs), "equilibrium_residual": resid}
    return StabilityReport(
        classification=classification, alpha=alpha,
        equilibrium=tuple(eq.tolist()), eps_results=eps_results,
        delta_results=delta_results, decay=decay, notes=tuple(notes), meta=meta)


# ---------------------------------------------------------------------------
# structural assumption checks (C1)-(C7)
# ---------------------------------------------------------------------------

def _default_tau():
    return np.linspace(0.0, 20.0, 401)


def _default_state():
    return np.linspace(-5.0, 5.0, 201)


def _default_growth():
    return np.geomspace(1.0, 1e3, 13)


@dataclass(frozen=True)
class AssumptionGrids:
    """Grids and tolerances the condition checks sweep over.

    ``alpha`` is the staircase order the exponents refer to.  ``slack``
    absorbs finite difference noise in pass/fail decisions; worst margins
    are always reported raw.  The improper integrals are judged by their
    increment over the last of the expanding ``tail_windows``, which must
    fall below ``tail_tol``; unboundedness of the potential is judged by a
    growth factor across ``y_growth``.  A pass is therefore grid-supported
    evidence, not a proof.
    """

    alpha: float
    tau: np.ndarray = field(default_factory=_default_tau)
    y: np.ndarray = field(default_factory=_default_state)
    z: np.ndarray = field(default_factory=_default_state)
    y_growth: np.ndarray = field(default_factory=_default_growth)
    tail_windows: tuple = (5.0, 10.0, 20.0, 40.0)
    tail_tol: float = 1e-3
    zero_tol: float = 1e-12
    slack: float = 1e-9
    growth_factor: float = 10.0
    forcing_stride: int = 8

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ParameterError(f"alpha must lie in (0, 1], got {self.alpha!r}")


@dataclass(frozen=True)
class ConditionCheck:
    name: str
    passed: bool
    worst_margin: float
    witness: dict


@dataclass
class AssumptionReport:
    """Results of the structural condition sweep, keyed C1 through C7."""

    conditions: "OrderedDict[str, ConditionCheck]"
    alpha: float

    def __getitem__(self, name) -> ConditionCheck:
        return self.conditions[name]

    def __iter__(self):
        return iter(self.conditions.values())

    def all_pass(self, names=None) -> bool:
        names = list(names) if names else list(self.conditions)
        return all(self.conditions[n].passed for n in names)

    def failing(self, names=None):
        names = list(names) if names else list(self.conditions)
        return [n for n in names if not self.conditions[n].passed]

    def to_json(self):
        return _jsonify({
            "alpha": self.alpha,
            "conditions": [
                {"condition": c.name, "pass": c.passed,
                 "worst_margin": c.worst_margin, "witness": c.witness}
                for c in self.conditions.values()],
        })


def _apply_pair(fn, X, Z):
    """fn(x, z) over same-shape arrays, with a per-element fallback."""
    try:
        out = np.asarray(fn(X, Z), dtype=float)
        if out.shape == X.shape:
            return out
        if out.ndim == 0:
            return np.full(X.shape, float(out))
    except (TypeError, ValueError):
        pass
    flat = np.array([float(fn(a, b)) for a, b in zip(X.ravel(), Z.ravel())])
    return flat.reshape(X.shape)


def _apply_triple(fn, T, X, Z):
    """fn(t, x, z) over broadcast-compatible arrays, with a fallback loop."""
    shape = np.broadcast_shapes(np.shape(T), np.shape(X), np.shape(Z))
    try:
        out = np.asarray(fn(T, X, Z), dtype=float)
        return np.broadcast_to(out, shape).copy()
    except (TypeError, ValueError):
        pass
    Tb = np.broadcast_to(T, shape)
    Xb = np.broadcast_to(X, shape)
    Zb = np.broadcast_to(Z, shape)
    flat = np.array([float(fn(a, b, c))
                     for a, b, c in zip(Tb.ravel(), Xb.ravel(), Zb.ravel())])
    return flat.reshape(shape)


def _argmin_point(values, *coords):
    idx = int(np.argmin(values))
    return [float(np.broadcast_to(c, values.shape).ravel()[idx]) for c in coords]


def _tail_integral(fn, windows):
    """Integrals over expanding windows and the increment of the last one."""
    w = sorted(float(x) for x in windows)
    grid = np.linspace(0.0, w[-1], max(int(w[-1] / 0.05), 200) + 1)
    vals = _apply_scalar(fn, grid)
    cum = np.concatenate(
        ([0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid))))
    totals = [float(np.interp(x, grid, cum)) for x in w]
    increments = np.diff([0.0] + totals)
    return totals, float(increments[-1])


def check_assumptions(sys: FdeSystem, grids: AssumptionGrids) -> AssumptionReport:
    """Sweep the structural conditions (C1)-(C7) over the supplied grids.

    Margins are the worst slack of each inequality over its grid and a
    condition passes when its margin stays above -grids.slack.  Witnesses
    carry the individual inequality slacks and the grid points where the
    worst one occurs.
    """
    a = grids.alpha
    c = sys.constants
    slack = grids.slack
    checks = OrderedDict()

    tau = np.asarray(grids.tau, dtype=float)
    y = np.asarray(grids.y, dtype=float)
    z = np.asarray(grids.z, dtype=float)

    # C1: coefficient bounds 1 <= u0^a <= u <= E^a and 1 <= v0^a <= v <= Q^a
    u_vals = _apply_scalar(sys.u, tau)
    v_vals = _apply_scalar(sys.v, tau)
    u0a, Ea, v0a, Qa = c.u0 ** a, c.E ** a, c.v0 ** a, c.Q ** a
    parts = {
        "u0_alpha_ge_1": u0a - 1.0,
        "u_ge_u0_alpha": float(np.min(u_vals)) - u0a,
        "u_le_E_alpha": Ea - float(np.max(u_vals)),
        "v0_alpha_ge_1": v0a - 1.0,
        "v_ge_v0_alpha": float(np.min(v_vals)) - v0a,
        "v_le_Q_alpha": Qa - float(np.max(v_vals)),
    }
    worst = min(parts.values())
    checks["C1"] = ConditionCheck("C1", worst >= -slack, worst, {
        "parts": parts,
        "u_range": [float(np.min(u_vals)), float(np.max(u_vals))],
        "v_range": [float(np.min(v_vals)), float(np.max(v_vals))]})

    # C2: positive constants and damping shape bounded below by eps0^a
    Ymesh, Zmesh = np.meshgrid(y, z, indexing="ij")
    f_vals = _apply_pair(sys.f, Ymesh, Zmesh)
    const_floor = min(c.lambda1, c.lambda2, c.eps0, c.eps1, c.eps2)
    f_margin = float(np.min(f_vals - c.eps0 ** a))
    worst = min(f_margin, const_floor)
    checks["C2"] = ConditionCheck("C2", worst >= -slack and const_floor > 0.0,
                                  worst, {
        "parts": {"f_ge_eps0_alpha": f_margin, "constants_floor": const_floor},
        "worst_at_yz": _argmin_point(f_vals - c.eps0 ** a, Ymesh, Zmesh)})

    # C3: restoring force centered and sign definite, slope >= lambda2,
    # potential unbounded in both directions
    h0 = abs(float(sys.h(0.0)))
    y_off = y[np.abs(y) > 0.0]
    sign_vals = _apply_scalar(sys.h, y_off) * np.sign(y_off)
    dh_vals = _apply_scalar(sys.restoring_slope, y)
    Hg_pos = _apply_scalar(sys.restoring_integral, grids.y_growth)
    Hg_neg = _apply_scalar(sys.restoring_integral, -np.asarray(grids.y_growth))
    grow_pos = float(Hg_pos[-1] / max(Hg_pos[0], 1e-300))
    grow_neg = float(Hg_neg[-1] / max(Hg_neg[0], 1e-300))
    parts = {
        "h_zero": grids.zero_tol - h0,
        "h_sign": float(np.min(sign_vals)),
        "slope_ge_lambda2": float(np.min(dh_vals)) - c.lambda2,
        "H_increasing": float(min(np.min(np.diff(Hg_pos)),
                                  np.min(np.diff(Hg_neg)))),
        "H_growth": min(grow_pos, grow_neg) - grids.growth_factor,
    }
    worst = min(parts.values())
    checks["C3"] = ConditionCheck("C3", worst >= -slack, worst, {
        "parts": parts, "h_at_zero": h0,
        "H_at_growth_ends": [float(Hg_pos[-1]), float(Hg_neg[-1])],
        "growth_ratios": [grow_pos, grow_neg]})

    # C4: positive part of v' integrable and v' settling to zero
    def zeta0_of(s):
        return np.maximum(_apply_scalar(sys.coefficient_slope, s), 0.0)

    totals, last_inc = _tail_integral(zeta0_of, grids.tail_windows)
    probe_end = np.linspace(0.8, 1.0, 9) * max(grids.tail_windows)
    dv_end = float(np.max(np.abs(_apply_scalar(sys.coefficient_slope, probe_end))))
    parts = {"integral_tail": grids.tail_tol - last_inc,
             "slope_settles": grids.tail_tol - dv_end}
    worst = min(parts.values())
    checks["C4"] = ConditionCheck("C4", worst >= -slack, worst, {
        "parts": parts, "window_integrals": totals, "dv_near_end": dv_end})

    # C5: forcing under positive integrable envelopes
    #     |q| <= r1 + r2 [H + z^2]^(sigma^a / 2) + Delta^a |z|
    sigma, Delta = c.sigma, c.delta_value()
    const_parts = {"sigma_in_unit": min(sigma, 1.0 - sigma),
                   "Delta_in_unit": min(Delta, 1.0 - Delta)}
    if sys.q is None:
        worst = min(const_parts.values())
        checks["C5"] = ConditionCheck("C5", worst >= -slack, worst, {
            "parts": const_parts,
            "note": "no forcing term; the envelope holds trivially"})
    elif sys.r1 is None or sys.r2 is None:
        checks["C5"] = ConditionCheck("C5", False, -math.inf, {
            "parts": const_parts,
            "note": "forcing present but envelopes r1/r2 missing"})
    else:
        r1_vals = _apply_scalar(sys.r1, tau)
        r2_vals = _apply_scalar(sys.r2, tau)
        _, inc1 = _tail_integral(lambda s: _apply_scalar(sys.r1, s),
                                 grids.tail_windows)
        _, inc2 = _tail_integral(lambda s: _apply_scalar(sys.r2, s),
                                 grids.tail_windows)
        stride = max(int(grids.forcing_stride), 1)
        t_sub = tau[::stride]
        y_sub = y[::stride]
        z_sub = z[::stride]
        H_sub = _apply_scalar(sys.restoring_integral, y_sub)
        T3 = t_sub[:, None, None]
        Y3 = y_sub[None, :, None]
        Z3 = z_sub[None, None, :]
        q_abs = np.abs(_apply_triple(sys.q, T3, Y3, Z3))
        r1_3 = _apply_scalar(sys.r1, t_sub)[:, None, None]
        r2_3 = _apply_scalar(sys.r2, t_sub)[:, None, None]
        base = np.maximum(H_sub[None, :, None] + Z3 ** 2, 0.0)
        envelope = r1_3 + r2_3 * base ** (sigma ** a / 2.0) + Delta ** a * np.abs(Z3)
        env_margin = envelope - q_abs
        parts = dict(const_parts)
        parts.update({
            "envelopes_positive": float(min(np.min(r1_vals), np.min(r2_vals))),
            "envelope_bound": float(np.min(env_margin)),
            "integral_tails": grids.tail_tol - max(inc1, inc2),
        })
        worst = min(parts.values())
        checks["C5"] = ConditionCheck("C5", worst >= -slack, worst, {
            "parts": parts,
            "worst_at_tau_y_z": _argmin_point(env_margin, T3, Y3, Z3)})

    # C6: damping shape window eps0^a <= f - lambda1 <= eps1^a
    shifted = f_vals - c.lambda1
    lo_m = float(np.min(shifted - c.eps0 ** a))
    hi_m = float(np.min(c.eps1 ** a - shifted))
    worst = min(lo_m, hi_m)
    checks["C6"] = ConditionCheck("C6", worst >= -slack, worst, {
        "parts": {"lower": lo_m, "upper": hi_m},
        "lower_at_yz": _argmin_point(shifted - c.eps0 ** a, Ymesh, Zmesh),
        "upper_at_yz": _argmin_point(c.eps1 ** a - shifted, Ymesh, Zmesh)})

    # C7: restoring slope window 0 <= lambda2 - h' <= eps2^a
    gap = c.lambda2 - dh_vals
    parts = {"gap_nonnegative": float(np.min(gap)),
             "gap_le_eps2_alpha": float(np.min(c.eps2 ** a - gap))}
    worst = min(parts.values())
    checks["C7"] = ConditionCheck("C7", worst >= -slack, worst, {
        "parts": parts,
        "slope_range": [float(np.min(dh_vals)), float(np.max(dh_vals))]})

    return AssumptionReport(conditions=checks, alpha=a)


# ---------------------------------------------------------------------------
# certificate functions and the theorem verifiers
# ---------------------------------------------------------------------------

def _as_arr(fn, x):
    return _apply_scalar(fn, np.asarray(x, dtype=float))


def stability_certificate(sys: FdeSystem) -> LyapunovFunction:
    """Energy certificate H(y) + z^2 / (2 v(tau)) for the unforced family."""
    return LyapunovFunction(
        value=lambda tau, y, z: sys.restoring_integral(y)
        + z * z / (2.0 * _as_arr(sys.v, tau)),
        grad_state=(
            lambda tau, y, z: _as_arr(sys.h, y),
            lambda tau, y, z: z / _as_arr(sys.v, tau)),
        grad_tau=lambda tau, y, z: -_as_arr(sys.coefficient_slope, tau)
        * z * z / (2.0 * _as_arr(sys.v, tau) ** 2))


def boundedness_certificate(sys: FdeSystem, k: float = 1.0 / 32.0) -> LyapunovFunction:
    """Shifted certificate v(tau) H(y) + z^2 / 2 + k for the forced family."""
    if not k > 0.0:
        raise ParameterError(f"k must be positive, got {k!r}")
    return LyapunovFunction(
        value=lambda tau, y, z: _as_arr(sys.v, tau) * sys.restoring_integral(y)
        + 0.5 * z * z + k,
        grad_state=(
            lambda tau, y, z: _as_arr(sys.v, tau) * _as_arr(sys.h, y),
            lambda tau, y, z: z),
        grad_tau=lambda tau, y, z: _as_arr(sys.coefficient_slope, tau)
        * sys.restoring_integral(y))


def _compass_states(radii, n_dirs=8):
    angles = 2.0 * math.pi * np.arange(n_dirs) / n_dirs
    return [(r * math.cos(th), r * math.sin(th)) for r in radii for th in angles]


def _tau_end_for(table, t_end):
    t_end = table.span[1] if t_end is None else float(t_end)
    tau_end = float(eval_staircase(table, t_end))
    if tau_end < 0.0:
        raise ParameterError("t_end precedes the staircase anchor")
    return t_end, tau_end


@dataclass
class Theorem1Report:
    """Decrease and positive definiteness certificate for the unforced family."""

    assumptions: AssumptionReport
    max_drift: float
    drift_tol: float
    drift_ok: bool
    lambda_bar: float
    bound_margin: float
    bound_ok: bool
    zero_value: float
    zero_ok: bool
    passed: bool
    meta: dict

    def to_json(self):
        return _jsonify({
            "passed": self.passed,
            "max_drift": self.max_drift, "drift_tol": self.drift_tol,
            "drift_ok": self.drift_ok,
            "lambda_bar": self.lambda_bar, "bound_margin": self.bound_margin,
            "bound_ok": self.bound_ok,
            "zero_value": self.zero_value, "zero_ok": self.zero_ok,
            "meta": self.meta,
            "assumptions": self.assumptions.to_json()})


def verify_theorem1(sys: FdeSystem, table: StaircaseTable,
                    initial_states=None, t_end=None, dtau: float = 1e-3,
                    drift_tol: float = 1e-10, grid_halfwidth: float = 2.0,
                    grid_points: int = 50,
                    grids: Optional[AssumptionGrids] = None,
                    record_every: int = 10) -> Theorem1Report:
    """Certify decrease of the energy certificate for an unforced system.

    Checks (C1)-(C4) on grids first and raises PreconditionError naming the
    failures otherwise.  Then integrates a fan of initial states, evaluates
    the certificate derivative

        dL2 = -v'/(2 v^2) z^2 - (u/v) f z^2

    at every recorded step against drift_tol, and bounds the certificate
    below by lambda_bar (y^2 + z^2), lambda_bar = min(lambda2, 1/(2 Q^alpha)),
    on a state grid crossed with probe times.
    """
    if sys.q is not None:
        raise ParameterError(
            "the decrease certificate applies to unforced systems; "
            "use the boundedness verifier for forced ones")
    grids = grids or AssumptionGrids(alpha=table.alpha)
    report = check_assumptions(sys, grids)
    failing = report.failing(("C1", "C2", "C3", "C4"))
    if failing:
        raise PreconditionError(
            "structural conditions fail: "
            + ", ".join(f"{n} (margin {report[n].worst_margin:.3g})"
                        for n in failing),
            failing=failing)

    alpha = table.alpha
    t_end, tau_end = _tau_end_for(table, t_end)
    if initial_states is None:
        initial_states = _compass_states((1.0, 2.0))
    Y0 = np.array(initial_states, dtype=float).T
    rhs, _ = as_tau_field(sys)
    taus, blocks, escaped = _batch_integrate(rhs, 2, Y0, tau_end, dtau,
                                             record_every)
    Yb, Zb = blocks[:, 0, :], blocks[:, 1, :]
    u_v = _apply_scalar(sys.u, taus)[:, None]
    v_v = _apply_scalar(sys.v, taus)[:, None]
    dv_v = _apply_scalar(sys.coefficient_slope, taus)[:, None]
    f_v = _apply_pair(sys.f, Yb, Zb)
    drift = -dv_v / (2.0 * v_v ** 2) * Zb ** 2 - (u_v / v_v) * f_v * Zb ** 2
    max_drift = float(np.max(drift))
    drift_ok = max_drift <= drift_tol and not bool(np.any(escaped))

    c = sys.constants
    lambda_bar = min(c.lambda2, 1.0 / (2.0 * c.Q ** alpha))
    gp = np.linspace(-grid_halfwidth, grid_halfwidth, int(grid_points))
    Yg, Zg = np.meshgrid(gp, gp, indexing="ij")
    L2 = stability_certificate(sys)
    margins = []
    zero_vals = []
    for tp in (0.0, 0.5 * tau_end, tau_end):
        vals = np.asarray(L2(tp, Yg, Zg), dtype=float)
        margins.append(float(np.min(vals - lambda_bar * (Yg ** 2 + Zg ** 2))))
        zero_vals.append(abs(float(L2(tp, 0.0, 0.0))))
    bound_margin = min(margins)
    bound_ok = bound_margin >= 0.0
    zero_value = max(zero_vals)
    zero_ok = zero_value <= 1e-12

    passed = drift_ok and bound_ok and zero_ok
    meta = {"tau_end": tau_end, "t_end": t_end, "dtau": float(dtau),
            "n_states": Y0.shape[1], "record_every": int(record_every),
            "escaped": bool(np.any(escaped)), "alpha": alpha,
            "recorded_steps": int(taus.size),
            "grid": [float(gp[0]), float(gp[-1]), int(grid_points)]}
    return Theorem1Report(
        assumptions=report, max_drift=max_drift, drift_tol=float(drift_tol),
        drift_ok=drift_ok, lambda_bar=float(lambda_bar),
        bound_margin=bound_margin, bound_ok=bound_ok, zero_value=zero_value,
        zero_ok=zero_ok, passed=passed, meta=meta)


def _theorem2_constants(c: FdeConstants, alpha: float, k: float) -> dict:
    E1 = min(c.v0, 0.5)
    E2 = max(c.Q, 1.0)
    E3 = c.E * (c.lambda1 + c.eps0) / 2.0
    E4 = 1.0 / E1
    return {
        "E1": E1, "E2": E2, "E3": E3, "E4": E4, "k": k,
        "E1_inv_alpha": E1 ** (1.0 / alpha),
        "E2_inv_alpha": E2 ** (1.0 / alpha),
        "E1_alpha": E1 ** alpha,
        "E3_alpha": E3 ** alpha,
        "E4_alpha": E4 ** alpha,
    }


def _certificate_pieces(sys: FdeSystem, k: float, tau_b, Y, Z):
    """L0, its flow derivative and the envelope pieces at broadcast samples.

    tau_b must broadcast against Y and Z.  The derivative uses the closed
    form dL0 = v' H - u f z^2 + q z, in which the v h z cross terms cancel.
    """
    shape = np.broadcast_shapes(np.shape(tau_b), np.shape(Y), np.shape(Z))
    Tb = np.broadcast_to(np.asarray(tau_b, dtype=float), shape)
    Yb = np.broadcast_to(np.asarray(Y, dtype=float), shape)
    Zb = np.broadcast_to(np.asarray(Z, dtype=float), shape)
    u_v = _apply_scalar(sys.u, Tb)
    v_v = _apply_scalar(sys.v, Tb)
    dv_v = _apply_scalar(sys.coefficient_slope, Tb)
    H_v = _apply_scalar(sys.restoring_integral, Yb)
    f_v = _apply_pair(sys.f, Yb, Zb)
    if sys.q is None:
        q_v = np.zeros(shape)
        r1_v = np.zeros(shape)
        r2_v = np.zeros(shape)
    else:
        q_v = _apply_triple(sys.q, Tb, Yb, Zb)
        r1_v = _apply_scalar(sys.r1, Tb)
        r2_v = _apply_scalar(sys.r2, Tb)
    zeta0 = np.maximum(dv_v, 0.0)
    L0 = v_v * H_v + 0.5 * Zb ** 2 + k
    dL0 = dv_v * H_v - u_v * f_v * Zb ** 2 + q_v * Zb
    return {"H": H_v, "L0": L0, "dL0": dL0, "zeta0": zeta0,
            "r1": r1_v, "r2": r2_v, "Z": Zb}


def _lemma_margins(pieces: dict, consts: dict, k: float):
    """Sandwich and decrease margins from precomputed certificate pieces."""
    H, Z, L0 = pieces["H"], pieces["Z"], pieces["L0"]
    base = H + Z ** 2 + k
    lemma1_lo = L0 - consts["E1_inv_alpha"] * base
    lemma1_hi = consts["E2_inv_alpha"] * base - L0
    bound = (-consts["E3_alpha"] * Z ** 2
             + (pieces["r1"] + pieces["r2"]) * np.abs(Z)
             + pieces["r2"] * (H + Z ** 2)
             + consts["E4_alpha"] * pieces["zeta0"] * L0)
    lemma2 = bound - pieces["dL0"]
    return lemma1_lo, lemma1_hi, lemma2


@dataclass
class Theorem2Report:
    """Boundedness and convergence certificate for the forced family."""

    assumptions: AssumptionReport
    constants: dict
    lemma1_margin: float
    lemma1_random_margin: float
    lemma1_ok: bool
    lemma2_margin: float
    lemma2_random_margin: float
    lemma2_ok: bool
    weighted_margin: float
    weighted_ok: bool
    bounded: bool
    sup_norm: float
    terminal_y: float
    terminal_z: float
    converged: bool
    conv_threshold: float
    passed: bool
    meta: dict

    def to_json(self):
        return _jsonify({
            "passed": self.passed,
            "constants": self.constants,
            "lemma1": {"trajectory_margin": self.lemma1_margin,
                       "random_margin": self.lemma1_random_margin,
                       "ok": self.lemma1_ok},
            "lemma2": {"trajectory_margin": self.lemma2_margin,
                       "random_margin": self.lemma2_random_margin,
                       "ok": self.lemma2_ok},
            "weighted_decrease": {"margin": self.weighted_margin,
                                  "ok": self.weighted_ok},
            "bounded": self.bounded, "sup_norm": self.sup_norm,
            "terminal_y": self.terminal_y, "terminal_z": self.terminal_z,
            "converged": self.converged, "conv_threshold": self.conv_threshold,
            "meta": self.meta,
            "assumptions": self.assumptions.to_json()})


def verify_theorem2(sys: FdeSystem, table: StaircaseTable, k: float = 1.0 / 32.0,
                    initial_states=None, t_end=None, dtau: float = 1e-3,
                    conv_tau: float = 20.0, conv_threshold: float = 1e-2,
                    n_random: int = 64, seed: int = 0,
                    grids: Optional[AssumptionGrids] = None,
                    record_every: int = 10) -> Theorem2Report:
    """Certify boundedness and convergence for the forced family.

    Requires all seven structural conditions on grids (PreconditionError
    otherwise) and k >= 1/32, the smallest offset for which the weighted
    decrease argument closes.  Along a fan of trajectories and at seeded
    random states it checks the sandwich

        E1^(1/alpha) [H + z^2 + k] <= L0 <= E2^(1/alpha) [H + z^2 + k],

    the decrease bound dL0 <= -E3^alpha z^2 + (r1 + r2)|z| + r2 [H + z^2] +
    E4^alpha zeta0 L0, and the weighted decrease d(e^-W L0) <= -E5^alpha z^2
    where W integrates E4^alpha zeta0 + (4 / E1^alpha)(r1 + r2) and
    E5^alpha = E3^alpha exp(-W at the horizon).  Boundedness of the fan and
    terminal smallness of |y| and |z| at conv_tau close the verdict.  A
    system without forcing runs the same checks with r1 = r2 = 0.
    """
    if not k >= 1.0 / 32.0:
        raise ParameterError(f"k must be at least 1/32, got {k!r}")
    grids = grids or AssumptionGrids(alpha=table.alpha)
    report = check_assumptions(sys, grids)
    failing = report.failing(("C1", "C2", "C3", "C4", "C5", "C6", "C7"))
    if failing:
        raise PreconditionError(
            "structural conditions fail: "
            + ", ".join(f"{n} (margin {report[n].worst_margin:.3g})"
                        for n in failing),
            failing=failing)

    alpha = table.alpha
    t_end, tau_end = _tau_end_for(table, t_end)
    if tau_end <= 0.0:
        raise ParameterError("t_end must advance the staircase past the anchor")
    if initial_states is None:
        initial_states = _compass_states((1.0, 2.0))
    norms = [math.hypot(s[0], s[1]) for s in initial_states]
    Y0 = np.array(initial_states, dtype=float).T

    rhs, _ = as_tau_field(sys)
    taus, blocks, escaped = _batch_integrate(rhs, 2, Y0, tau_end, dtau,
                                             record_every)
    Yb, Zb = blocks[:, 0, :], blocks[:, 1, :]
    bounded = not bool(np.any(escaped))
    sup_norm = float(np.max(np.hypot(Yb, Zb)))

    consts = _theorem2_constants(sys.constants, alpha, k)
    pieces = _certificate_pieces(sys, k, taus[:, None], Yb, Zb)
    l1_lo, l1_hi, l2 = _lemma_margins(pieces, consts, k)
    lemma1_margin = float(min(np.min(l1_lo), np.min(l1_hi)))
    lemma2_margin = float(np.min(l2))

    # weight W(tau) integrates the decay factor of the damped certificate
    zeta_line = (consts["E4_alpha"] * pieces["zeta0"][:, 0]
                 + (4.0 / consts["E1_alpha"])
                 * (pieces["r1"][:, 0] + pieces["r2"][:, 0]))
    W = np.concatenate(
        ([0.0], np.cumsum(0.5 * (zeta_line[1:] + zeta_line[:-1]) * np.diff(taus))))
    e5a = consts["E3_alpha"] * math.exp(-float(W[-1]))
    dLw = np.exp(-W)[:, None] * (pieces["dL0"] - zeta_line[:, None] * pieces["L0"])
    weighted = -e5a * Zb ** 2 - dLw
    weighted_margin = float(np.min(weighted))

    rng = np.random.default_rng(seed)
    r_tau = rng.uniform(0.0, tau_end, n_random)
    r_y = rng.uniform(-3.0, 3.0, n_random)
    r_z = rng.uniform(-3.0, 3.0, n_random)
    rp = _certificate_pieces(sys, k, r_tau, r_y, r_z)
    r1_lo, r1_hi, r2m = _lemma_margins(rp, consts, k)
    lemma1_random = float(min(np.min(r1_lo), np.min(r1_hi)))
    lemma2_random = float(np.min(r2m))

    conv_at = min(float(conv_tau), tau_end)
    idx = min(int(np.searchsorted(taus, conv_at)), taus.size - 1)
    terminal_y = float(np.max(np.abs(Yb[idx:, :])))
    terminal_z = float(np.max(np.abs(Zb[idx:, :])))
    converged = terminal_y <= conv_threshold and terminal_z <= conv_threshold

    lemma1_ok = lemma1_margin >= 0.0 and lemma1_random >= 0.0
    lemma2_ok = lemma2_margin >= 0.0 and lemma2_random >= 0.0
    weighted_ok = weighted_margin >= 0.0
    passed = lemma1_ok and lemma2_ok and weighted_ok and bounded and converged

    constants = dict(consts)
    constants["E5_alpha"] = e5a
    constants["weight_integral_end"] = float(W[-1])
    meta = {"tau_end": tau_end, "t_end": t_end, "dtau": float(dtau),
            "conv_tau": conv_at, "n_states": Y0.shape[1],
            "max_initial_norm": float(max(norms)), "n_random": int(n_random),
            "seed": int(seed), "record_every": int(record_every),
            "alpha": alpha, "recorded_steps": int(taus.size),
            "forced": sys.q is not None}
    return Theorem2Report(
        assumptions=report, constants=constants,
        lemma1_margin=lemma1_margin, lemma1_random_margin=lemma1_random,
        lemma1_ok=lemma1_ok, lemma2_margin=lemma2_margin,
        lemma2_random_margin=lemma2_random, lemma2_ok=lemma2_ok,
        weighted_margin=weighted_margin, weighted_ok=weighted_ok,
        bounded=bounded, sup_norm=sup_norm, terminal_y=terminal_y,
        terminal_z=terminal_z, converged=converged,
        conv_threshold=float(conv_threshold), passed=passed, meta=meta)
