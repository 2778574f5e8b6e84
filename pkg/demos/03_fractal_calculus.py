"""Differentiating and integrating against the staircase.

Functions supported on the set are stored as samples at set points.  The
derivative is the difference quotient in staircase value, the integral is
the left sum of values against staircase increments, and the two pair up in
a change-of-variables version of the fundamental theorem.

Run with: python3 demos/03_fractal_calculus.py
"""

import math

import numpy as np

from fractalcalc import (
    CantorSpec,
    GridFunction,
    build_staircase,
    characteristic,
    derivative_grid,
    eval_staircase,
    fractal_derivative,
    fractal_integral,
    hausdorff_dimension,
    set_samples,
)


def main():
    mu = 0.2
    alpha = hausdorff_dimension(mu)
    spec = CantorSpec(mu=mu, depth=12)
    table = build_staircase(spec, alpha)
    gamma = math.gamma(alpha + 1.0)

    # The characteristic is 1/Gamma(alpha+1) on the set and 0 off it.
    print("characteristic of the set:")
    for t in (0.0, 0.3, 0.5, 1.0):
        chi = float(characteristic(spec, alpha, t))
        print(f"  chi({t:.1f}) = {chi:.6f}")
    print(f"  1/Gamma(alpha + 1) = {1.0 / gamma:.6f}")

    # The staircase differentiates to one against itself, and the
    # derivative vanishes off the set by convention.
    f = GridFunction.from_function(table, lambda t: eval_staircase(table, t))
    d = derivative_grid(f)
    print("\nderivative of S with respect to S:")
    print(f"  max |D S - 1| over set samples = {np.max(np.abs(d.values - 1.0)):.2e}")
    print(f"  D S at the gap point t = 0.5: {fractal_derivative(f, 0.5)}")

    # Integrating 1 recovers the total mass.
    one = GridFunction.from_function(table, lambda t: np.ones_like(t))
    total = fractal_integral(one, 0.0, 1.0)
    print(f"\nintegral of 1 over [0, 1] = {total:.12f} (Gamma = {gamma:.12f})")
    print(f"integral over the central gap [0.41, 0.59] = "
          f"{fractal_integral(one, 0.41, 0.59)}")

    # Fundamental pairing: integrate D(S^2) and compare with S(1)^2.
    # Interior samples matter here; on the bare breakpoint grid the pairing
    # telescopes exactly and hides the discretization error entirely.
    print("\nintegral of D(S^2) versus S(1)^2 by construction depth:")
    for depth in (8, 12, 16):
        tab = build_staircase(CantorSpec(mu=mu, depth=depth), alpha)
        g = GridFunction.from_function(
            tab, lambda t: eval_staircase(tab, t) ** 2, t=set_samples(tab, 3))
        got = fractal_integral(derivative_grid(g), 0.0, 1.0)
        exact = eval_staircase(tab, 1.0) ** 2
        print(f"  depth {depth:2d}: {got:.10f} vs {exact:.10f} "
              f"(error {abs(got - exact):.2e})")


if __name__ == "__main__":
    main()
