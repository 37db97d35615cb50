"""Rotationally symmetric model geometry.

A model manifold is determined by its radial curvature profile k(r) <= 0
through the Jacobi initial value problem

    f'' + k f = 0,   f(0) = 0,  f'(0) = 1,

whose solution f is the warping factor of the metric dr^2 + f(r)^2 dsigma^2.
Everything downstream (volume weights, the radial Laplacian, gradient bounds
for boundary extensions) is a function of f and f'.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

__all__ = [
    "ProfileError",
    "CurvatureProfile",
    "JacobiSolution",
    "solve_jacobi",
    "laplacian_r",
    "verify_laplacian_bound",
    "grad_theta_bound",
]


class ProfileError(ValueError):
    """Raised for invalid curvature profile parameters or sample tables."""


def _smoothstep(t):
    # C1 cubic ramp: 0 -> 1 with zero slope at both ends.
    return t * t * (3.0 - 2.0 * t)


@dataclass(frozen=True)
class CurvatureProfile:
    """Radial curvature function k(r) <= 0.

    Supported kinds:

    - ``euclidean``: k identically 0.
    - ``constant``: k identically -a^2.
    - ``power``: k = -phi(phi-1)/r^2 for r >= R0 and k = 0 near the origin.
      With ``bridge="none"`` the profile jumps at R0; with
      ``bridge="c1_cubic"`` the scaled curvature r^2 k(r) is ramped by a
      monotone C1 cubic on [R0-delta, R0], which makes k itself continuously
      differentiable while keeping the exact power law outside R0.
    - ``custom``: piecewise-linear interpolation of a sampled (r, k) table,
      held constant outside the sampled range.
    """

    kind: str
    a: float = 0.0
    phi: float = math.nan
    R0: float = math.nan
    bridge: str = "none"
    delta: float = 0.0
    table_r: tuple[float, ...] = field(default=())
    table_k: tuple[float, ...] = field(default=())

    @classmethod
    def euclidean(cls) -> "CurvatureProfile":
        return cls(kind="euclidean")

    @classmethod
    def constant(cls, a: float) -> "CurvatureProfile":
        if not (a >= 0.0 and math.isfinite(a)):
            raise ProfileError(f"constant profile needs a >= 0, got a={a!r}")
        if a == 0.0:
            return cls.euclidean()
        return cls(kind="constant", a=float(a))

    @classmethod
    def power(cls, phi: float, R0: float = 1.0, bridge: str = "none",
              delta: float = 0.0) -> "CurvatureProfile":
        if not (phi > 1.0 and math.isfinite(phi)):
            raise ProfileError(f"power profile needs phi > 1, got phi={phi!r}")
        if not (R0 > 0.0 and math.isfinite(R0)):
            raise ProfileError(f"power profile needs R0 > 0, got R0={R0!r}")
        if bridge not in ("none", "c1_cubic"):
            raise ProfileError(f"unknown bridge kind {bridge!r}")
        if bridge == "c1_cubic":
            if not (0.0 < delta < R0):
                raise ProfileError(
                    f"c1_cubic bridge needs 0 < delta < R0, got delta={delta!r}")
        else:
            delta = 0.0
        return cls(kind="power", phi=float(phi), R0=float(R0),
                   bridge=bridge, delta=float(delta))

    @classmethod
    def custom(cls, r, k) -> "CurvatureProfile":
        r = np.asarray(r, dtype=float)
        k = np.asarray(k, dtype=float)
        if r.ndim != 1 or r.shape != k.shape or r.size < 2:
            raise ProfileError("custom profile needs matching 1-d r and k arrays "
                               "with at least two samples")
        if not np.all(np.diff(r) > 0.0):
            raise ProfileError("custom profile needs strictly increasing r")
        if r[0] < 0.0:
            raise ProfileError("custom profile needs r >= 0")
        if np.any(k > 0.0):
            raise ProfileError("custom profile needs k <= 0 everywhere")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(k))):
            raise ProfileError("custom profile has non-finite samples")
        return cls(kind="custom", table_r=tuple(r), table_k=tuple(k))

    @classmethod
    def from_csv(cls, path) -> "CurvatureProfile":
        """Load a custom profile from a two-column CSV with header ``r,k``."""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline()
        cols = [c.strip().lower() for c in header.strip().split(",")]
        if cols != ["r", "k"]:
            raise ProfileError(
                f"{path}: expected header 'r,k', got {header.strip()!r}")
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] != 2:
            raise ProfileError(f"{path}: expected exactly two columns")
        return cls.custom(data[:, 0], data[:, 1])

    # -- evaluation ------------------------------------------------------

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "euclidean":
            return np.zeros_like(r)
        if self.kind == "constant":
            return np.full_like(r, -self.a * self.a)
        if self.kind == "power":
            q = -self.phi * (self.phi - 1.0)
            out = np.zeros_like(r)
            outside = r >= self.R0
            with np.errstate(divide="ignore"):
                out[outside] = q / np.square(r[outside])
            if self.bridge == "c1_cubic":
                lo = self.R0 - self.delta
                mid = (~outside) & (r > lo)
                tau = (r[mid] - lo) / self.delta
                out[mid] = q * _smoothstep(tau) / np.square(r[mid])
            return out
        # custom: linear interpolation, constant extension outside the table
        return np.interp(r, self.table_r, self.table_k)

    def k0(self) -> float:
        """Curvature at the origin."""
        if self.kind in ("euclidean",):
            return 0.0
        if self.kind == "constant":
            return -self.a * self.a
        if self.kind == "power":
            return 0.0
        return float(self.table_k[0])

    def head_radius(self) -> float:
        """Largest radius up to which k is exactly the constant k(0)."""
        if self.kind in ("euclidean", "constant"):
            return math.inf
        if self.kind == "power":
            return self.R0 - self.delta
        r, k = np.asarray(self.table_r), np.asarray(self.table_k)
        head = r[0]
        for i in range(1, len(r)):
            if k[i] != k[0]:
                break
            head = r[i]
        return float(head)

    def breakpoints(self) -> list[float]:
        """Radii where k loses smoothness (integration is split there)."""
        if self.kind == "power":
            pts = [self.R0]
            if self.bridge == "c1_cubic":
                pts.insert(0, self.R0 - self.delta)
            return pts
        if self.kind == "custom" and len(self.table_r) <= 64:
            return [float(x) for x in self.table_r]
        return []


def _constant_head(k0: float, r):
    """Exact Jacobi solution (f, f') for constant curvature k0 <= 0."""
    r = np.asarray(r, dtype=float)
    if k0 == 0.0:
        return r.copy(), np.ones_like(r)
    a = math.sqrt(-k0)
    return np.sinh(a * r) / a, np.cosh(a * r)


@dataclass
class JacobiSolution:
    """Numerical solution of the Jacobi IVP on [0, r_max].

    Stores (f, f') on a refined integration grid and answers off-grid
    queries with cubic Hermite interpolation whose slopes are the exact
    derivative data, so both f and f' are smooth C1 evaluators.
    """

    profile: CurvatureProfile
    n: int
    r_max: float
    tol: float
    r_grid: np.ndarray
    f_grid: np.ndarray
    fp_grid: np.ndarray

    def __post_init__(self):
        fpp = -self.profile(self.r_grid) * self.f_grid
        self._f_spline = CubicHermiteSpline(self.r_grid, self.f_grid, self.fp_grid)
        self._fp_spline = CubicHermiteSpline(self.r_grid, self.fp_grid, fpp)
        self._check_invariants()

    def _check_invariants(self):
        r, f, fp = self.r_grid, self.f_grid, self.fp_grid
        if f[0] != 0.0 or abs(fp[0] - 1.0) > 1e-12:
            raise AssertionError("Jacobi initial conditions violated")
        if np.any(np.diff(fp) < -1e-9 * np.maximum(1.0, fp[1:])):
            raise AssertionError("f' must be nondecreasing (k <= 0)")
        pos = r > 0.0
        if np.any(f[pos] < r[pos] * (1.0 - 1e-9)):
            raise AssertionError("f >= r must hold under nonpositive curvature")
        ratio = f[pos] / r[pos]
        if np.any(np.diff(ratio) < -1e-8 * ratio[1:]):
            raise AssertionError("f/r must be nondecreasing")

    def _check_domain(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < 0.0) or np.any(r > self.r_max * (1.0 + 1e-12)):
            raise ValueError(
                f"query outside [0, r_max={self.r_max}]: r in "
                f"[{r.min()}, {r.max()}]")
        return r

    def f(self, r):
        r = self._check_domain(r)
        return self._f_spline(np.clip(r, 0.0, self.r_max))

    def fprime(self, r):
        r = self._check_domain(r)
        return self._fp_spline(np.clip(r, 0.0, self.r_max))

    def log_f(self, r):
        """log f(r), for products like f^p that would overflow."""
        return np.log(self.f(r))

    def volume_weight(self, r):
        """Polar Jacobian f(r)^(n-1)."""
        return self.f(r) ** (self.n - 1)


def solve_jacobi(profile: CurvatureProfile, n: int, r_max: float,
                 tol: float = 1e-10) -> JacobiSolution:
    """Integrate the Jacobi IVP f'' + k f = 0, f(0)=0, f'(0)=1 up to r_max.

    Parameters
    ----------
    profile : CurvatureProfile
        Radial curvature k(r) <= 0.
    n : int
        Manifold dimension (>= 2); stored for volume weights.
    r_max : float
        Right end of the integration interval.
    tol : float
        Relative tolerance handed to the adaptive 4th/5th order pair.

    Notes
    -----
    The origin is handled with the exact constant-curvature solution on a
    short head interval [0, r_start] where k == k(0) (every supported
    profile is constant near 0); numerical integration starts from the exact
    state at r_start and is split at the profile's breakpoints so the
    integrator never steps across a non-smooth point.
    """
    if n < 2 or int(n) != n:
        raise ValueError(f"dimension must be an integer >= 2, got {n!r}")
    if not (r_max > 0.0 and math.isfinite(r_max)):
        raise ValueError(f"r_max must be positive and finite, got {r_max!r}")
    if not (0.0 < tol <= 1e-2):
        raise ValueError(f"tol must lie in (0, 1e-2], got {tol!r}")

    k0 = profile.k0()
    head = profile.head_radius()
    # Cap the analytic head so constant profiles still exercise the
    # integrator instead of returning the oracle itself.
    r_start = min(head, 0.01, 0.1 * r_max)
    if r_start <= 0.0:
        r_start = min(1e-8, 0.1 * r_max)

    head_r = np.linspace(0.0, r_start, 9)
    if k0 == 0.0 or head >= r_start:
        head_f, head_fp = _constant_head(k0, head_r)
    else:
        # No constant head (custom table starting at 0 with varying k):
        # series start f = r - k0 r^3/6 is exact to O(r^5) at this scale.
        head_f = head_r - k0 * head_r**3 / 6.0
        head_fp = 1.0 - k0 * head_r**2 / 2.0

    def rhs(r, y):
        return [y[1], -float(profile(r)) * y[0]]

    stops = [b for b in profile.breakpoints() if r_start < b < r_max]
    segments = [r_start] + stops + [r_max]

    rs = [head_r]
    fs = [head_f]
    fps = [head_fp]
    y0 = [head_f[-1], head_fp[-1]]
    for a, b in zip(segments[:-1], segments[1:]):
        sol = solve_ivp(rhs, (a, b), y0, method="RK45", dense_output=True,
                        rtol=tol, atol=tol * 1e-3)
        if not sol.success:
            raise RuntimeError(f"Jacobi integration failed on [{a}, {b}]: "
                               f"{sol.message}")
        # Refine each accepted step x8 so Hermite storage keeps the dense
        # output's accuracy between nodes.
        seg_nodes = [np.linspace(t0, t1, 9)[1:]
                     for t0, t1 in zip(sol.t[:-1], sol.t[1:])]
        seg_r = np.concatenate(seg_nodes) if seg_nodes else np.array([b])
        vals = sol.sol(seg_r)
        rs.append(seg_r)
        fs.append(vals[0])
        fps.append(vals[1])
        y0 = [vals[0][-1], vals[1][-1]]

    r_grid = np.concatenate(rs)
    f_grid = np.concatenate(fs)
    fp_grid = np.concatenate(fps)
    keep = np.concatenate([[True], np.diff(r_grid) > 0.0])
    return JacobiSolution(profile=profile, n=int(n), r_max=float(r_max),
                          tol=float(tol), r_grid=r_grid[keep],
                          f_grid=f_grid[keep], fp_grid=fp_grid[keep])


def laplacian_r(jac: JacobiSolution, r):
    """Laplacian of the distance function, (n-1) f'(r)/f(r), for r > 0."""
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("laplacian_r is defined for r > 0 only")
    return (jac.n - 1) * jac.fprime(r) / jac.f(r)


def verify_laplacian_bound(jac: JacobiSolution, phi: float, eps: float) -> float:
    """Smallest grid radius R1 with r * laplacian >= (n-1) phi/(1+eps) beyond it.

    Also asserts the unconditional bound r * laplacian >= n - 1 on the whole
    grid, which is the comparison consequence of k <= 0. Returns ``math.inf``
    if the phi-target is not met anywhere on the grid (for instance on a
    Euclidean profile with phi > 1).
    """
    if not (phi > 1.0):
        raise ValueError(f"phi must exceed 1, got {phi!r}")
    if not (eps > 0.0):
        raise ValueError(f"eps must be positive, got {eps!r}")
    pos = jac.r_grid > 0.0
    r = jac.r_grid[pos]
    q = r * (jac.n - 1) * jac.fp_grid[pos] / jac.f_grid[pos]
    floor = (jac.n - 1) * (1.0 - 1e-9)
    if np.any(q < floor):
        bad = r[q < floor][0]
        raise AssertionError(
            f"r * laplacian dropped below n-1 at r={bad:.6g}; "
            "profile violates k <= 0 somewhere")
    target = (jac.n - 1) * phi / (1.0 + eps)
    if target <= floor:
        return 0.0
    ok = q >= target
    if not ok[-1]:
        return math.inf
    # Last failing index; everything beyond it satisfies the target.
    fail = np.nonzero(~ok)[0]
    if fail.size == 0:
        return float(r[0])
    idx = fail[-1] + 1
    if idx >= r.size:
        return math.inf

    def gap(x):
        return x * (jac.n - 1) * float(jac.fprime(x) / jac.f(x)) - target

    # Polish the crossing inside the bracketing grid cell so the answer
    # does not inherit the integrator's step size.
    return float(brentq(gap, r[idx - 1], r[idx], xtol=1e-12, rtol=1e-14))


def grad_theta_bound(jac: JacobiSolution, L: float, r):
    """Gradient bound L/f(r) for the radial extension of L-Lipschitz data."""
    if not (L >= 0.0):
        raise ValueError(f"Lipschitz constant must be >= 0, got {L!r}")
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0.0):
        raise ValueError("grad_theta_bound is defined for r > 0 only")
    return L / jac.f(r)
