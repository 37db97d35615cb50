"""Rotationally symmetric models from a radial curvature profile.

The warped metric dr^2 + f(r)^2 dsigma^2 is fixed by one scalar ODE:
f'' + k(r) f = 0 with f(0) = 0, f'(0) = 1.  This demo solves three
profiles, checks them against closed forms, and locates the radius R1
past which the radial Laplacian drift r * Delta r clears the threshold
(n-1) phi / (1+eps) that the downstream estimates need.

Run:  python demos/01_model_manifolds.py
"""

import math

import numpy as np

from mingraph import (CurvatureProfile, laplacian_r, solve_jacobi,
                      verify_laplacian_bound)


def main():
    r = np.linspace(0.0, 10.0, 11)[1:]

    print("euclidean k = 0: f(r) = r")
    je = solve_jacobi(CurvatureProfile.euclidean(), n=2, r_max=20.0)
    print("  max rel err vs r:", float(np.max(np.abs(je.f(r) / r - 1.0))))

    print("constant k = -1: f(r) = sinh r")
    jc = solve_jacobi(CurvatureProfile.constant(1.0), n=2, r_max=20.0)
    print("  max rel err vs sinh:",
          float(np.max(np.abs(jc.f(r) / np.sinh(r) - 1.0))))

    # k = -phi(phi-1)/r^2 outside the unit ball, flat inside; the ODE
    # then has the exact solution (2/3) r^2 + (1/3) / r for r >= 1
    print("power phi = 2 (n = 3): f matches (2/3) r^2 + (1/3)/r beyond 1")
    jp = solve_jacobi(CurvatureProfile.power(2.0), n=3, r_max=1e6)
    rp = r[r >= 1.0]
    closed = (2.0 / 3.0) * rp ** 2 + (1.0 / 3.0) / rp
    print("  max rel err vs closed form:",
          float(np.max(np.abs(jp.f(rp) / closed - 1.0))))

    print()
    print("radial drift r * Delta r (never below n-1 when k <= 0):")
    for name, jac, n in (("euclidean", je, 2), ("constant", jc, 2),
                         ("power2", jp, 3)):
        rr = np.array([0.5, 1.0, 2.0, 5.0])
        q = rr * laplacian_r(jac, rr)
        row = ", ".join(f"r={x:g}: {v:.4f}" for x, v in zip(rr, q))
        print(f"  {name:10s} {row}   (floor {n - 1})")

    print()
    print("threshold radius R1 with r * Delta r >= (n-1) phi/(1+eps):")
    for name, jac, phi in (("constant, phi=5", jc, 5.0),
                           ("power2,   phi=2", jp, 2.0)):
        R1 = verify_laplacian_bound(jac, phi, eps=0.1)
        print(f"  {name}: R1 = {R1:.6f}")
    R1 = verify_laplacian_bound(je, 2.0, eps=0.1)
    print(f"  euclidean, phi=2: R1 = {R1}  (flat drift never exceeds n-1)")


if __name__ == "__main__":
    main()
