"""Constructing middle-mu Cantor sets and measuring them.

Run with: python3 demos/01_cantor_sets.py
"""

from fractalcalc import (
    CantorSpec,
    contains,
    covering_measure,
    generate,
    hausdorff_dimension,
    iter_levels,
)


def main():
    # Remove the open middle fifth of every surviving interval.  Each pass
    # keeps two outer copies scaled by keep_ratio = (1 - mu) / 2 = 0.4.
    spec = CantorSpec(mu=0.2, depth=4)
    print(f"cut fraction mu = {spec.mu}, keep ratio = {spec.keep_ratio}")

    print("\nfirst construction levels:")
    for level, iset in iter_levels(spec):
        pieces = ", ".join(f"[{a:.4f}, {b:.4f}]" for a, b in iset)
        if level > 2:
            pieces = f"{len(iset)} intervals of length {iset.lengths()[0]:.6f}"
        print(f"  level {level}: {pieces}")

    # Membership is decided against the depth-m realization; gap interiors
    # are outside, gap endpoints are inside.
    iset = generate(spec)
    for t in (0.0, 0.16, 0.3, 0.5, 1.0):
        print(f"  t = {t:<5} in set: {bool(contains(iset, t))}")

    # The covering length shrinks geometrically, so the limit set is a
    # Lebesgue null set even though it is uncountable.
    print("\ncovering measure (1 - mu)^depth:")
    for depth in (1, 5, 10, 20):
        print(f"  depth {depth:2d}: {covering_measure(CantorSpec(mu=0.2, depth=depth)):.3e}")

    # The similarity dimension interpolates between 0 and 1 as the cut
    # fraction varies.
    print("\nsimilarity dimension by cut fraction:")
    for mu in (0.1, 0.2, 1.0 / 3.0, 0.5, 0.8):
        print(f"  mu = {mu:.3f}: dimension {hausdorff_dimension(mu):.6f}")


if __name__ == "__main__":
    main()
