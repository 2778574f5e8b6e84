"""Stability classification and certificate verification.

Three layers: derivatives of candidate Lyapunov functions along a flow,
empirical classification of an equilibrium with alpha-scaled balls, and
grid-plus-trajectory verification of the decrease and boundedness
certificates for the damped second order family.

Run with: python3 demos/05_stability_and_certificates.py
"""

import numpy as np

from fractalcalc import (
    AssumptionGrids,
    CantorSpec,
    build_staircase,
    check_assumptions,
    classify_stability,
    example1_field,
    example1_lyapunov,
    example2_system,
    example3_field,
    hausdorff_dimension,
    lyapunov_derivative,
    theorem1_toy,
    theorem2_toy,
    verify_theorem1,
    verify_theorem2,
)


def main():
    alpha = hausdorff_dimension(0.2)
    table = build_staircase(
        CantorSpec(mu=0.2, depth=12, origin=0.0, extent=60.0), alpha)

    # V = z^2 along Dz = -z gives DV = -2 z^2 exactly.
    L = example1_lyapunov()
    z = np.array([-2.0, -0.5, 1.0, 3.0])
    print("certificate derivative for linear decay:")
    print(f"  DV       = {lyapunov_derivative(L, example1_field, z)}")
    print(f"  -2 z^2   = {-2.0 * z * z}")

    # Empirical classification probes balls whose radii scale as
    # radius**alpha, matching how the staircase rescales neighborhoods.
    print("\nempirical classification:")
    for name, flow in (("linear decay", example1_field),
                       ("undamped oscillator", example3_field(1.0)),
                       ("damped toy", theorem1_toy()),
                       ("expanding", lambda y: y)):
        eq = 0.0 if name in ("linear decay", "expanding") else (0.0, 0.0)
        rep = classify_stability(flow, table, equilibrium=eq)
        print(f"  {name:20s} -> {rep.classification}")

    # The structural conditions behind the certificates are checked on
    # grids; the cubic damping system passes the decrease conditions but
    # leaves the narrow damping window.
    grids = AssumptionGrids(alpha=alpha)
    rep = check_assumptions(example2_system(), grids)
    print("\nstructural conditions for the cubic damping system:")
    for check in rep:
        print(f"  {check.name}: {'pass' if check.passed else 'FAIL':4s} "
              f"(worst margin {check.worst_margin:.3g})")

    # Decrease certificate: DL2 <= 0 along trajectories plus a positive
    # definiteness bound on a state grid.
    r1 = verify_theorem1(theorem1_toy(), table)
    print("\ndecrease certificate on the unforced toy:")
    print(f"  passed = {r1.passed}, max drift = {r1.max_drift:.2e}, "
          f"grid margin = {r1.bound_margin:.2e}")

    # Boundedness certificate: sandwich and decrease inequalities for the
    # shifted energy, then boundedness and terminal smallness of the fan.
    r2 = verify_theorem2(theorem2_toy(), table)
    print("\nboundedness certificate on the forced toy:")
    print(f"  passed = {r2.passed}")
    print(f"  lemma margins: sandwich {r2.lemma1_margin:.2e}, "
          f"decrease {r2.lemma2_margin:.2e}, weighted {r2.weighted_margin:.2e}")
    print(f"  sup norm = {r2.sup_norm:.3f}, terminal |y| = {r2.terminal_y:.2e}, "
          f"|Dy| = {r2.terminal_z:.2e}")


if __name__ == "__main__":
    main()
