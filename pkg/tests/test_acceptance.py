"""End-to-end acceptance checks.

Each test exercises one advertised guarantee at its stated tolerance and
prints a single pass/fail line (visible under pytest -s or on failure), so
the suite doubles as a checklist of what the package promises.
"""

import json
import math
import time

import numpy as np
import pytest

from fractalcalc import (
    CantorSpec,
    GridFunction,
    build_staircase,
    covering_measure,
    derivative_grid,
    estimate_mass,
    eval_staircase,
    example1_exact,
    example1_field,
    example1_lyapunov,
    example3_field,
    example3_system,
    fractal_integral,
    hausdorff_dimension,
    classify_stability,
    lyapunov_derivative,
    set_samples,
    solve_first_order,
    solve_second_order,
    theorem1_toy,
    theorem2_toy,
    verify_theorem1,
    verify_theorem2,
)
from fractalcalc.cli import main as cli_main

ALPHA_02 = hausdorff_dimension(0.2)


def report(num, ok, detail):
    print(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, f"criterion {num} failed: {detail}"


@pytest.fixture(scope="module")
def table60():
    return build_staircase(
        CantorSpec(mu=0.2, depth=12, origin=0.0, extent=60.0), ALPHA_02)


@pytest.fixture(scope="module")
def table500():
    return build_staircase(
        CantorSpec(mu=0.2, depth=12, origin=0.0, extent=500.0), ALPHA_02)


def test_criterion_01_dimension_command(tmp_path):
    out = tmp_path / "dim.json"
    start = time.perf_counter()
    code = cli_main(["dimension", "--mu", "0.2", "--depth", "16",
                     "--format", "json", "--out", str(out)])
    elapsed = time.perf_counter() - start
    payload = json.loads(out.read_text())
    estimate = payload["estimate"]
    ok = code == 0 and abs(estimate - 0.75) <= 0.02 and elapsed <= 5.0
    report(1, ok, f"estimate={estimate:.6f} (target 0.75 +/- 0.02), "
                  f"runtime={elapsed:.2f}s (limit 5s)")


def test_criterion_02_mass_fixed_point():
    worst_rel = 0.0
    worst_spread = 0.0
    for mu in (0.2, 1.0 / 3.0, 0.5):
        alpha = hausdorff_dimension(mu)
        expected = math.gamma(alpha + 1.0)
        values = []
        for depth in (8, 12, 16):
            spec = CantorSpec(mu=mu, depth=depth)
            est = estimate_mass(spec, alpha, 0.0, 1.0,
                                spec.keep_ratio ** depth)
            values.append(est.value)
            worst_rel = max(worst_rel, abs(est.value - expected) / expected)
        worst_spread = max(worst_spread,
                           (max(values) - min(values)) / expected)
    ok = worst_rel <= 1e-6 and worst_spread <= 1e-6
    report(2, ok, f"worst relative error {worst_rel:.2e} (tol 1e-6), "
                  f"depth spread {worst_spread:.2e}")


def test_criterion_03_linear_decay_exactness():
    table = build_staircase(CantorSpec(mu=0.2, depth=12), ALPHA_02)
    worst = 0.0
    for c in (1.0, 0.5):
        traj = solve_first_order(lambda y: -y, table, c, 1.0, dtau=1e-3)
        exact = example1_exact(c, traj.tau[-1])
        worst = max(worst, abs(traj.y[-1] - exact) / abs(exact))
    ok = worst <= 1e-6
    report(3, ok, f"worst terminal relative error {worst:.2e} (tol 1e-6)")


def test_criterion_04_linear_decay_certificate(table60):
    L = example1_lyapunov()
    rng = np.random.default_rng(11)
    states = rng.uniform(-5.0, 5.0, 100)
    worst = max(abs(lyapunov_derivative(L, example1_field, z)
                    - (-2.0 * z * z)) for z in states)
    rep = classify_stability(example1_field, table60)
    rate_err = (abs(rep.decay.rate_tau - 1.0)
                if rep.decay is not None else math.inf)
    ok = (worst <= 1e-9
          and rep.classification == "asymptotically-stable"
          and rate_err <= 1e-2)
    report(4, ok, f"certificate deviation {worst:.2e} (tol 1e-9), "
                  f"label={rep.classification}, rate error {rate_err:.2e}")


def test_criterion_05_energy_conservation(table500):
    sys = example3_system(1.0)
    traj = solve_second_order(sys, table500, 1.0, 0.0, 500.0, dtau=1e-3,
                              record_every=10)
    L = 0.5 * (traj.y ** 2 + traj.z ** 2)
    late = traj.tau >= 1.0
    drift_rate = float(np.max(
        np.abs(L[late] - L[0]) / (L[0] * traj.tau[late])))
    rep = classify_stability(example3_field(1.0), table500,
                             equilibrium=(0.0, 0.0))
    ok = (traj.tau[-1] >= 100.0
          and drift_rate <= 1e-6
          and rep.classification == "lyapunov-stable")
    report(5, ok, f"tau range {traj.tau[-1]:.1f} (needs 100), drift "
                  f"{drift_rate:.2e}/tau (tol 1e-6), label={rep.classification}")


def test_criterion_06_decrease_certificate(table60):
    rep = verify_theorem1(theorem1_toy(), table60)
    conds = rep.assumptions.all_pass(("C1", "C2", "C3", "C4"))
    ok = (rep.passed and conds
          and rep.max_drift <= 1e-10
          and rep.bound_margin >= 0.0)
    report(6, ok, f"conditions C1-C4 {'pass' if conds else 'fail'}, "
                  f"max drift {rep.max_drift:.2e} (tol 1e-10), "
                  f"grid margin {rep.bound_margin:.2e} (needs >= 0)")


def test_criterion_07_boundedness_certificate(table60):
    states = [(r * math.cos(th), r * math.sin(th))
              for r in (0.5, 1.0, 2.0)
              for th in np.linspace(0.0, 2.0 * math.pi, 8, endpoint=False)]
    rep = verify_theorem2(theorem2_toy(), table60, initial_states=states)
    ok = (rep.passed
          and rep.lemma1_margin >= 0.0 and rep.lemma2_margin >= 0.0
          and rep.bounded
          and rep.terminal_y <= 1e-2 and rep.terminal_z <= 1e-2)
    report(7, ok, f"lemma margins {rep.lemma1_margin:.2e}/"
                  f"{rep.lemma2_margin:.2e} (need >= 0), bounded={rep.bounded}, "
                  f"terminal |y|={rep.terminal_y:.2e}, |Dy|={rep.terminal_z:.2e} "
                  f"(tol 1e-2 at tau=20)")


def test_criterion_08_calculus_pairing():
    results = {}
    for label, fn_of_s in (("square", lambda s: s ** 2),
                           ("exp", np.exp)):
        errors = []
        for depth in (8, 12, 16):
            tab = build_staircase(CantorSpec(mu=0.2, depth=depth), ALPHA_02)
            grid = set_samples(tab, 3)
            f = GridFunction.from_function(
                tab, lambda t: fn_of_s(eval_staircase(tab, t)), t=grid)
            total = fractal_integral(derivative_grid(f), 0.0, 1.0)
            s_end = eval_staircase(tab, 1.0)
            exact = fn_of_s(s_end) - fn_of_s(0.0)
            errors.append(abs(total - exact) / abs(exact))
        results[label] = errors
    ok = all(e[0] > e[1] > e[2] and e[2] <= 1e-2 for e in results.values())
    report(8, ok, "relative errors by depth "
                  + ", ".join(f"{k}: {v[0]:.1e}>{v[1]:.1e}>{v[2]:.1e}"
                              for k, v in results.items())
                  + " (final tol 1e-2)")


def test_criterion_09_measure_limit():
    value = covering_measure(CantorSpec(mu=0.2, depth=20))
    expected = 0.8 ** 20
    rel = abs(value - expected) / expected
    ok = rel <= 1e-12
    report(9, ok, f"relative error {rel:.2e} (tol 1e-12)")


def test_criterion_10_determinism(tmp_path):
    commands = [
        ["staircase", "--depth", "10", "--samples", "101"],
        ["dimension", "--mu", "0.2", "--depth", "12", "--format", "json"],
        ["solve", "--system", "example2", "--t-end", "1", "--dtau", "0.01",
         "--depth", "10"],
        ["verify", "--theorem", "2", "--extent", "60", "--dtau", "0.01",
         "--format", "json"],
    ]
    identical = True
    for i, argv in enumerate(commands):
        a = tmp_path / f"a{i}"
        b = tmp_path / f"b{i}"
        assert cli_main(argv + ["--out", str(a)]) == 0
        assert cli_main(argv + ["--out", str(b)]) == 0
        identical = identical and a.read_bytes() == b.read_bytes()
    report(10, identical,
           f"{len(commands)} command configurations re-run byte-identically")
