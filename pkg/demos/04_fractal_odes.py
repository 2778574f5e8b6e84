"""Differential equations driven by the staircase clock.

A fractal differential equation advances state only while time moves
through the set; the substitution tau = S(t) turns it into an ordinary
system that is integrated with a fixed-step method and mapped back through
the inverse staircase.  Trajectories are therefore staircase-shaped in
plain time: they move across set intervals and hold still across gaps.

Run with: python3 demos/04_fractal_odes.py
"""

import numpy as np

from fractalcalc import (
    CantorSpec,
    NumericalBlowupError,
    build_staircase,
    example1_exact,
    example2_system,
    example3_system,
    hausdorff_dimension,
    solve_first_order,
    solve_second_order,
)


def main():
    alpha = hausdorff_dimension(0.2)
    table = build_staircase(
        CantorSpec(mu=0.2, depth=12, origin=0.0, extent=60.0), alpha)

    # Linear decay has the closed form y = c exp(-S(t)), which the solver
    # reproduces to solver precision.
    traj = solve_first_order(lambda y: -y, table, 1.0, 10.0, dtau=1e-3)
    exact = example1_exact(1.0, traj.tau)
    print("linear decay versus closed form:")
    print(f"  {len(traj)} recorded steps to t = 10")
    print(f"  max |y - c exp(-tau)| = {np.max(np.abs(traj.y - exact)):.2e}")

    # The trajectory is constant across gaps; compare plain-time and
    # clock-time spacing around the first big gap of the set.
    (y_left,) = traj.at_time(24.0)
    (y_right,) = traj.at_time(35.0)
    print(f"  y holds across the gap (24, 36): "
          f"y(24) = {y_left:.6f}, y(35) = {y_right:.6f}")

    # A damped second order system spirals into the origin.
    traj2 = solve_second_order(example2_system(), table, 1.0, 0.0, 60.0,
                               dtau=1e-3, record_every=100)
    print("\ndamped system, terminal state:")
    print(f"  y = {traj2.y[-1]:.2e}, Dy = {traj2.z[-1]:.2e} "
          f"at tau = {traj2.tau[-1]:.2f}")

    # An undamped oscillator conserves its energy in the clock.
    traj3 = solve_second_order(example3_system(1.0), table, 1.0, 0.0, 60.0,
                               dtau=1e-3, record_every=100)
    energy = 0.5 * (traj3.y ** 2 + traj3.z ** 2)
    print("\nundamped oscillator:")
    print(f"  energy drift = {np.max(np.abs(energy - energy[0])):.2e}")

    # Quadratic growth escapes in finite clock time; the solver reports the
    # blow-up and keeps the partial trajectory.
    try:
        solve_first_order(lambda y: y * y, table, 3.0, 60.0, dtau=1e-3)
    except NumericalBlowupError as exc:
        partial = exc.trajectory
        print("\nquadratic growth blows up:")
        print(f"  {exc}")
        print(f"  partial trajectory keeps {len(partial)} steps, "
              f"last y = {partial.y[-1]:.3e}")


if __name__ == "__main__":
    main()
