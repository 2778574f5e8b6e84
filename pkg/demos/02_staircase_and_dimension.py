"""The integral staircase and the mass scaling dimension.

The staircase S(t) accumulates alpha-order mass from the anchor to t.  It
rises across set intervals, stays flat across gaps, and its total over the
base interval equals Gamma(alpha + 1) when alpha matches the set's
dimension.  The dimension itself is recovered numerically as the order at
which refining the resolution stops changing the mass.

Run with: python3 demos/02_staircase_and_dimension.py
"""

import math

import numpy as np

from fractalcalc import (
    CantorSpec,
    build_staircase,
    dimension_sweep,
    estimate_mass,
    eval_staircase,
    gamma_dimension,
    hausdorff_dimension,
)


def main():
    mu = 0.2
    alpha = hausdorff_dimension(mu)
    spec = CantorSpec(mu=mu, depth=12)
    print(f"mu = {mu}, matching order alpha = {alpha:.6f}")

    # Mass at the matching order is depth independent: the two kept copies
    # scale as 2 * keep_ratio^alpha = 1 exactly.
    print("\nmass estimates at the matching order:")
    expected = math.gamma(alpha + 1.0)
    for depth in (4, 8, 12, 16):
        sp = CantorSpec(mu=mu, depth=depth)
        est = estimate_mass(sp, alpha, 0.0, 1.0, sp.keep_ratio ** depth)
        print(f"  depth {depth:2d}: {est.value:.12f}")
    print(f"  Gamma(alpha + 1) = {expected:.12f}")

    # Away from the matching order the estimates run off to 0 or blow up,
    # which is what the two-resolution ratio detects.
    table = build_staircase(spec, alpha)
    print("\nstaircase samples (flat across the central gap):")
    for t in (0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0):
        print(f"  S({t:.1f}) = {eval_staircase(table, t):.6f}")

    fine = spec.keep_ratio ** 12
    coarse = spec.keep_ratio ** 8
    alphas, ratios, _ = dimension_sweep(spec, coarse, fine)
    print("\nfine/coarse mass ratio crosses 1 at the dimension:")
    for a, r in zip(alphas[::16], ratios[::16]):
        print(f"  alpha = {a:.3f}: ratio = {r:10.4f}")

    estimate = gamma_dimension(spec, coarse, fine)
    print(f"\nestimated dimension: {estimate:.10f}")
    print(f"closed form:         {hausdorff_dimension(mu):.10f}")
    print(f"difference:          {abs(estimate - hausdorff_dimension(mu)):.2e}")


if __name__ == "__main__":
    main()
