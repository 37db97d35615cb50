"""The explicit Young-function family behind the energy estimates.

Everything grows out of one density H(t) = t (log(e + t))^(eps0) tamed
by a lambda-power of an iterated logarithm; its primitive G and the
conjugate F = primitive of H^{-1} satisfy ab <= G(a) + F(b).  A second
pair (G1, F1) built from the deviation function phi covers the squared
gradient terms.  The demo prints the inequality margins on random
pairs, the small-argument envelopes of the conjugates, and the two
ratio trends that pin down the family's shape.

Run:  python demos/02_young_family.py
"""

import math

import numpy as np

from mingraph import (build_G1_F1, build_density, build_phi, lambert_w,
                      young_from_density)


def main():
    eps0, lam = 0.5, 1.25
    H = build_density(eps0, lam)
    pair = young_from_density(H)
    phi = build_phi(pair)
    sq = build_G1_F1(H, phi)

    rng = np.random.default_rng(7)
    a = np.exp(rng.uniform(math.log(1e-8), math.log(10.0), 2000))
    b = np.exp(rng.uniform(math.log(1e-8), math.log(10.0), 2000))
    for label, p in (("G/F", pair), ("G1/F1", sq)):
        m = p.margin(a, b) / (p.G(a) + p.F(b))
        print(f"young inequality {label}: min relative margin "
              f"{float(np.min(m)):.3e} over 2000 random pairs")

    # the conjugate pushes mass to small arguments: F(t) decays faster
    # than any power of t as t -> 0, here shown in log space
    print()
    print("conjugate smallness at t -> 0 (log F(t), more negative = smaller):")
    for t in (1e-2, 1e-4, 1e-6):
        print(f"  t = {t:.0e}:  log F = {float(pair.F.log(t)):10.1f},"
              f"  log F1 = {float(sq.F.log(t)):10.1f},"
              f"  log t^2 = {2 * math.log(t):7.1f}")

    print()
    print("G(phi'(t)) reproduces phi(t) where phi is alive:")
    for t in (3.0, 5.0, 9.0):
        lhs, rhs = float(pair.G(phi.dphi(t))), float(phi.phi(t))
        print(f"  t = {t:g}:  {lhs:.6f} vs {rhs:.6f}"
              f"  (rel gap {abs(lhs / rhs - 1.0):.1e})")

    print()
    print("shape ratios approaching 1:")
    slope = [(t, float(t * H(t) / pair.G(t))) for t in (1e-3, 1e-6, 1e-12)]
    curv = [(t, float(phi.d2phi(t) * phi.phi(t) / phi.dphi(t) ** 2))
            for t in (3.5, 3.2, 3.0)]
    print("  t H(t)/G(t) as t -> 0:  ",
          ",  ".join(f"{t:.0e}: {v:.4f}" for t, v in slope))
    print("  phi'' phi / phi'^2 near the threshold:  ",
          ",  ".join(f"{t:g}: {v:.4f}" for t, v in curv))

    print()
    print(f"lambert_w(1) = {float(lambert_w(1.0)):.12f}"
          "  (the omega constant)")


if __name__ == "__main__":
    main()
