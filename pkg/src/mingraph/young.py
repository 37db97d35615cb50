"""Young-function family with logarithmically slow growth near zero.

The family is generated by a density H that switches between three regimes:

- for small t the reciprocal law H(t) = 1/(u (log u)^lam) with u = log(1/t),
  which decays slower than any power of t;
- for large t the power law H(t) = t^(1/eps0);
- in between, a monotone C1 bridge built in log-log coordinates.

From H the module builds the Young pair G = int H, F = int H^{-1}, the
squared pair int H^2 and int (H^2)^{-1}, and the convex gauge defined by
the slope reconstruction

    value'(t) = S^{-1}(t)  with  S(y) = int_0^y H(x)/x dx,

so that G(value'(t)) = value(t) holds identically.  S has closed forms on
the outer regimes, which keeps the construction meaningful far below the
double-exponential underflow threshold of the gauge itself.

Values that fall below the smallest positive float are returned as an
honest 0.0; log-space evaluators cover the regions where that happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import BPoly, CubicHermiteSpline, PchipInterpolator
from scipy.optimize import brentq

__all__ = [
    "FamilyError",
    "lambert_w",
    "BridgeDensity",
    "PowerDensity",
    "Primitive",
    "YoungPair",
    "PhiFunction",
    "build_density",
    "young_from_density",
    "build_phi",
    "build_G1_F1",
    "g1_identity_log_gap",
    "dump_table",
]


class FamilyError(ValueError):
    """Raised for invalid family parameters or evaluation domains."""


# ---------------------------------------------------------------------------
# Lambert W (principal branch, positive arguments)

_BRANCH_POINT = -1.0 / math.e


def _lambert_w_scalar(s: float) -> float:
    if not (s >= _BRANCH_POINT):
        raise FamilyError(f"lambert_w needs s >= -1/e, got {s!r}")
    if s == 0.0:
        return 0.0
    if s > 1e300:
        # asymptotic expansion; Halley below would overflow exp(w)
        L1 = math.log(s)
        L2 = math.log(L1)
        return L1 - L2 + L2 / L1 + L2 * (L2 - 2.0) / (2.0 * L1 * L1)
    if s > math.e:
        w = math.log(s)
        w -= math.log(w)
    elif s > -0.25:
        # series-flavoured start is enough for Halley here
        w = s / (1.0 + s)
    else:
        # near the branch point: sqrt expansion of the principal branch
        p = math.sqrt(2.0 * (1.0 + math.e * s))
        w = -1.0 + p - p * p / 3.0
    for _ in range(80):
        ew = math.exp(w)
        f = w * ew - s
        if f == 0.0 or w == -1.0:
            break  # converged, or pinned at the branch point
        denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 1e-16 * (1.0 + abs(w)):
            break
    return w


def lambert_w(s):
    """Principal-branch Lambert W for s >= -1/e, Halley iteration."""
    if np.isscalar(s):
        return _lambert_w_scalar(float(s))
    arr = np.asarray(s, dtype=float)
    out = np.empty_like(arr)
    flat = arr.ravel()
    oflat = out.ravel()
    for i, v in enumerate(flat):
        oflat[i] = _lambert_w_scalar(float(v))
    return out


# ---------------------------------------------------------------------------
# the generating density

_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(10)


def _hermite_min_slope(x0, y0, m0, x1, y1, m1):
    # minimum of the cubic Hermite derivative over the segment, exact
    h = x1 - x0
    A = 6.0 * (y0 - y1) + 3.0 * h * (m0 + m1)
    B = -6.0 * (y0 - y1) - h * (4.0 * m0 + 2.0 * m1)
    C = h * m0

    def d(tau):
        return (A * tau * tau + B * tau + C) / h

    cands = [d(0.0), d(1.0)]
    if A != 0.0:
        tau_star = -B / (2.0 * A)
        if 0.0 < tau_star < 1.0:
            cands.append(d(tau_star))
    return min(cands)


class BridgeDensity:
    """Generating density H with slow, bridged and power regimes.

    Parameters
    ----------
    eps0 : float
        Reciprocal exponent of the power regime, H(t) = t^(1/eps0) for
        t >= t_large.  Must be positive.
    lam : float
        Secondary log exponent of the slow regime; requires
        1 < lam < 1 + eps0.
    t_small, t_large : float
        Regime boundaries.  t_small must stay below 1/e so the iterated
        logarithm in the slow regime is positive.
    """

    def __init__(self, eps0: float = 0.5, lam: float = 1.25,
                 t_small: float = 1e-2, t_large: float = 2.0):
        if not (0.0 < eps0 < 1.0):
            raise FamilyError(f"eps0 must lie in (0, 1), got {eps0!r}")
        if not (1.0 < lam < 1.0 + eps0):
            raise FamilyError(
                f"lam must lie in (1, 1+eps0) = (1, {1.0 + eps0}), got {lam!r}")
        if not (0.0 < t_small < 1.0 / math.e):
            raise FamilyError(f"t_small must lie in (0, 1/e), got {t_small!r}")
        if not (t_large > max(t_small, 1.0)):
            raise FamilyError(f"t_large must exceed max(t_small, 1), "
                              f"got {t_large!r}")
        self.eps0 = float(eps0)
        self.lam = float(lam)
        self.t_small = float(t_small)
        self.t_large = float(t_large)

        u0 = math.log(1.0 / self.t_small)
        x0 = math.log(self.t_small)
        y0 = -math.log(u0) - self.lam * math.log(math.log(u0))
        m0 = 1.0 / u0 + self.lam / (u0 * math.log(u0))
        x1 = math.log(self.t_large)
        y1 = math.log(self.t_large) / self.eps0
        m1 = 1.0 / self.eps0
        self._ends = (x0, y0, m0, x1, y1, m1)

        if _hermite_min_slope(x0, y0, m0, x1, y1, m1) > 1e-9:
            self.bridge_kind = "cubic"
            self._cubic = CubicHermiteSpline([x0, x1], [y0, y1], [m0, m1])
            self._cubic_d = self._cubic.derivative()
        else:
            # tangent-intersection control point gives a monotone arc
            xc = (y1 - y0 + m0 * x0 - m1 * x1) / (m0 - m1)
            yc = y0 + m0 * (xc - x0)
            if not (x0 < xc < x1 and y0 < yc < y1):
                raise FamilyError(
                    "no monotone bridge for these parameters; the regime "
                    "slopes are incompatible")
            self.bridge_kind = "bezier"
            self._bezier = (x0, xc, x1, y0, yc, y1)

    # -- bridge in log-log coordinates --------------------------------

    def _bezier_tau(self, x):
        x0, xc, x1, _, _, _ = self._bezier
        a = x0 - 2.0 * xc + x1
        b = 2.0 * (xc - x0)
        c = x0 - x
        if abs(a) < 1e-14 * (abs(b) + 1.0):
            return -c / b
        disc = b * b - 4.0 * a * c
        return (-b + math.sqrt(max(disc, 0.0))) / (2.0 * a)

    def _bridge_logH(self, x):
        if self.bridge_kind == "cubic":
            return self._cubic(x)
        x0, xc, x1, y0, yc, y1 = self._bezier
        out = np.empty_like(np.asarray(x, dtype=float))
        for i, xi in enumerate(np.atleast_1d(x)):
            tau = self._bezier_tau(float(xi))
            out.flat[i] = ((1 - tau) ** 2 * y0 + 2 * tau * (1 - tau) * yc
                           + tau * tau * y1)
        return out

    def _bridge_slope(self, x):
        if self.bridge_kind == "cubic":
            return self._cubic_d(x)
        x0, xc, x1, y0, yc, y1 = self._bezier
        out = np.empty_like(np.asarray(x, dtype=float))
        for i, xi in enumerate(np.atleast_1d(x)):
            tau = self._bezier_tau(float(xi))
            dy = (1 - tau) * (yc - y0) + tau * (y1 - yc)
            dx = (1 - tau) * (xc - x0) + tau * (x1 - xc)
            out.flat[i] = dy / dx
        return out

    # -- evaluation ----------------------------------------------------

    def __call__(self, t):
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0.0):
            raise FamilyError("density argument must be >= 0")
        out = np.zeros_like(t)
        small = (t > 0.0) & (t <= self.t_small)
        if np.any(small):
            u = np.log(1.0 / t[small])
            out[small] = 1.0 / (u * np.log(u) ** self.lam)
        large = t >= self.t_large
        if np.any(large):
            out[large] = t[large] ** (1.0 / self.eps0)
        mid = (t > self.t_small) & (t < self.t_large)
        if np.any(mid):
            out[mid] = np.exp(self._bridge_logH(np.log(t[mid])))
        return float(out[0]) if scalar else out

    def loglog_slope(self, t):
        """d log H / d log t, used for head corrections and spline slopes."""
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0.0):
            raise FamilyError("loglog_slope needs t > 0")
        out = np.empty_like(t)
        small = t <= self.t_small
        if np.any(small):
            u = np.log(1.0 / t[small])
            out[small] = 1.0 / u + self.lam / (u * np.log(u))
        large = t >= self.t_large
        out[large] = 1.0 / self.eps0
        mid = ~small & ~large
        if np.any(mid):
            out[mid] = self._bridge_slope(np.log(t[mid]))
        return float(out[0]) if scalar else out

    def neg_log_inverse(self, x):
        """v(x) = -log H^{-1}(x), exact in the slow regime via Lambert W.

        v solves v (log v)^lam = 1/x there; accurate for arbitrarily tiny
        x even when H^{-1}(x) itself underflows.
        """
        scalar = np.isscalar(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x <= 0.0):
            raise FamilyError("neg_log_inverse needs x > 0")
        out = np.empty_like(x)
        lo = self(self.t_small)
        slow = x <= lo
        if np.any(slow):
            w = self.lam * lambert_w(x[slow] ** (-1.0 / self.lam) / self.lam)
            with np.errstate(over="ignore"):
                out[slow] = np.exp(w)
        rest = ~slow
        if np.any(rest):
            out[rest] = -np.log(self.inverse(x[rest]))
        return float(out[0]) if scalar else out

    def inverse(self, x):
        """Inverse function H^{-1}; underflows to 0.0 for very small x."""
        scalar = np.isscalar(x)
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(x < 0.0):
            raise FamilyError("inverse needs x >= 0")
        out = np.zeros_like(x)
        lo = self(self.t_small)
        hi = self(self.t_large)
        slow = (x > 0.0) & (x <= lo)
        if np.any(slow):
            v = np.exp(self.lam
                       * lambert_w(x[slow] ** (-1.0 / self.lam) / self.lam))
            with np.errstate(over="ignore"):
                out[slow] = np.exp(-v)
        large = x >= hi
        out[large] = x[large] ** self.eps0
        mid = (x > lo) & (x < hi)
        if np.any(mid):
            x0, _, _, x1, _, _ = self._ends
            for i in np.nonzero(mid)[0]:
                target = math.log(x[i])
                root = brentq(lambda z: float(self._bridge_logH(z)) - target,
                              x0, x1, xtol=1e-14, rtol=8.9e-16)
                out[i] = math.exp(root)
        return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# cached primitives

def _segment_integrals(density, log_nodes):
    """Integral of the density over each log-grid segment, 10-point Gauss."""
    a = log_nodes[:-1]
    b = log_nodes[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    # nodes: shape (nseg, 10)
    x = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
    t = np.exp(x)
    vals = density(t.ravel()).reshape(t.shape)
    return half * np.sum(_GAUSS_W[None, :] * vals * t, axis=1)


@dataclass
class _PowerTail:
    coef: float
    exponent: float  # density = coef * t**exponent above the cache


def _laplace_panels():
    # fixed rule for int_0^inf exp(-r) q(w+r) dr with q slowly varying:
    # 12 Gauss-20 panels of width 5 cover [0, 60]; the truncated remainder
    # is below exp(-60) relative, the panel error near machine epsilon
    gx, gw = np.polynomial.legendre.leggauss(20)
    nodes, weights = [], []
    for k in range(12):
        mid = 5.0 * k + 2.5
        nodes.append(mid + 2.5 * gx)
        weights.append(2.5 * gw * np.exp(-(mid + 2.5 * gx)))
    return np.concatenate(nodes), np.concatenate(weights)


_PANEL_R, _PANEL_E = _laplace_panels()


def _logQ_power_of_m(w, lam: float, power: float):
    """log of int_0^inf e^-r m(w+r)^power dr, m(s) = 1/(s log(s)^lam).

    Panel quadrature while w fits the node grid, two-term expansion
    beyond (relative error O(1/w^2) there, below resolution).
    """
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    near = w <= 1e8
    if np.any(near):
        s = w[near, None] + _PANEL_R[None, :]
        q = (s * np.log(s) ** lam) ** -power
        out[near] = np.log(q @ _PANEL_E)
    far = ~near
    if np.any(far):
        s = w[far]
        ls = np.log(s)
        out[far] = (-power * (ls + lam * np.log(ls))
                    + np.log1p(-power * (1.0 + lam / ls) / s))
    return out


class Primitive:
    """Cumulative integral P(x) = int_0^x density, exact-grade throughout.

    Three regimes:

    - slow region x < slow_hi: the integral has the exact factored form
      P(x) = exp(-w) * Q(w) at w = w_of_x(x), with Q(w) =
      int_0^inf exp(-r) q(w+r) dr smooth and slowly varying.  Q is
      evaluated by a fixed panel Gauss rule (machine precision up to
      w ~ 1e8, a two-term Watson expansion beyond), so values, logs and
      inverses carry no asymptotic truncation error.  exp(-w) underflows
      to an honest 0.0; the log evaluator stays exact there.
    - cached mid region [slow_hi, hi]: cumulative per-segment Gauss
      integrals on a log grid anchored at the exact slow value, wrapped
      in a C1 interpolant of log P against log x with exact slopes.
    - power tail x > hi: the density is exactly coef*x**exponent and
      everything is closed-form algebra.

    With pure_power=True the density is a power law on all of [0, inf)
    and only the closed forms are used.
    """

    _W_ASYM = 1e8  # switch point between panel rule and Watson expansion

    def __init__(self, density, slow_hi, hi, tail: _PowerTail, *,
                 w_of_x=None, x_of_w=None, q_fn=None, dlogq_fn=None,
                 logq_fn=None, kappa_fn=None, points_per_decade=200,
                 pure_power=False):
        self.density = density
        self.slow_hi = float(slow_hi)
        self.hi = float(hi)
        self.tail = tail
        self.pure_power = bool(pure_power)
        if pure_power:
            self._P_hi = self._tail_value(self.hi)
            return
        self._w_of_x = w_of_x
        self._x_of_w = x_of_w
        self._q = q_fn
        self._dlogq = dlogq_fn
        self._logq = logq_fn
        self._w0 = float(w_of_x(self.slow_hi))

        ndec = math.log10(self.hi / self.slow_hi)
        n = max(int(points_per_decade * ndec), 16) + 1
        logt = np.linspace(math.log(self.slow_hi), math.log(self.hi), n)
        seg = _segment_integrals(density, logt)
        anchor = math.exp(-self._w0
                          + float(self._logQ(np.array([self._w0]))[0]))
        P = anchor + np.concatenate([[0.0], np.cumsum(seg)])
        t = np.exp(logt)
        s1 = t * density(t) / P
        self._logP = np.log(P)
        # quintic pieces with exact first and second log-derivatives:
        # d2(logP) = s1 (1 + kappa - s1) with kappa the density's own
        # log-log slope, so the interpolant error is far below the
        # per-segment quadrature error
        s2 = s1 * (1.0 + kappa_fn(t) - s1)
        self._spline = BPoly.from_derivatives(
            logt, np.column_stack([self._logP, s1, s2]))
        self._spline_d = self._spline.derivative()
        # strictly increasing in both coordinates, so the swap is monotone
        self._inv_init = PchipInterpolator(self._logP, logt)
        self._P_lo = P[0]
        self._P_hi = P[-1]

    # -- closed-form pieces --------------------------------------------

    def _tail_value(self, t):
        c, p = self.tail.coef, self.tail.exponent
        if self.pure_power:
            return c / (p + 1.0) * np.asarray(t, dtype=float) ** (p + 1.0)
        return self._P_hi + c / (p + 1.0) * (
            np.asarray(t, dtype=float) ** (p + 1.0) - self.hi ** (p + 1.0))

    def _tail_inverse(self, s):
        c, p = self.tail.coef, self.tail.exponent
        if self.pure_power:
            return ((p + 1.0) * s / c) ** (1.0 / (p + 1.0))
        base = self.hi ** (p + 1.0) + (p + 1.0) / c * (s - self._P_hi)
        return base ** (1.0 / (p + 1.0))

    def _logQ(self, w):
        out = np.empty_like(w)
        near = w <= self._W_ASYM
        idx = np.nonzero(near)[0]
        # chunked so huge slow-region batches stay memory-bounded
        for k in range(0, idx.size, 4096):
            ii = idx[k:k + 4096]
            q = self._q(w[ii][:, None] + _PANEL_R[None, :])
            out[ii] = np.log(q @ _PANEL_E)
        far = ~near
        if np.any(far):
            out[far] = self._logq(w[far]) + np.log1p(self._dlogq(w[far]))
        return out

    # -- public evaluation ----------------------------------------------

    def __call__(self, t):
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0.0):
            raise FamilyError("primitive argument must be >= 0")
        out = np.zeros_like(t)
        if self.pure_power:
            pos = t > 0
            out[pos] = self._tail_value(t[pos])
            return float(out[0]) if scalar else out
        slow = (t > 0.0) & (t < self.slow_hi)
        if np.any(slow):
            w = np.atleast_1d(np.asarray(self._w_of_x(t[slow]), dtype=float))
            with np.errstate(under="ignore"):
                out[slow] = np.exp(-w + self._logQ(w))
        mid = (t >= self.slow_hi) & (t <= self.hi)
        if np.any(mid):
            out[mid] = np.exp(self._spline(np.log(t[mid])))
        tail = t > self.hi
        if np.any(tail):
            out[tail] = self._tail_value(t[tail])
        return float(out[0]) if scalar else out

    def log(self, t):
        """log P(t); defined far below the underflow point of P itself."""
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0.0):
            raise FamilyError("log primitive needs t > 0")
        out = np.empty_like(t)
        if self.pure_power:
            c, p = self.tail.coef, self.tail.exponent
            out[:] = math.log(c / (p + 1.0)) + (p + 1.0) * np.log(t)
            return float(out[0]) if scalar else out
        slow = t < self.slow_hi
        if np.any(slow):
            w = np.atleast_1d(np.asarray(self._w_of_x(t[slow]), dtype=float))
            out[slow] = -w + self._logQ(w)
        mid = (t >= self.slow_hi) & (t <= self.hi)
        if np.any(mid):
            out[mid] = self._spline(np.log(t[mid]))
        tail = t > self.hi
        if np.any(tail):
            out[tail] = np.log(self._tail_value(t[tail]))
        return float(out[0]) if scalar else out

    def log_from_w(self, w):
        """log P at the slow-region point with coordinate w = w_of_x(x)."""
        w = np.atleast_1d(np.asarray(w, dtype=float))
        return -w + self._logQ(w)

    def _slow_inverse_w(self, logs: float) -> float:
        # solve -w + log Q(w) = log s for w; log s may sit far below the
        # representable range of s itself
        w = max(-logs, self._w0)
        for _ in range(60):
            if w <= self._W_ASYM:
                qv = self._q(w + _PANEL_R)
                Q = float(qv @ _PANEL_E)
                Qp = float((qv * self._dlogq(w + _PANEL_R)) @ _PANEL_E)
                g = -w + math.log(Q) - logs
                gp = -1.0 + Qp / Q
            else:
                arr = np.array([w])
                dl = float(self._dlogq(arr)[0])
                g = (float(self._logq(arr)[0]) + math.log1p(dl) - w - logs)
                gp = -1.0 + dl
            dw = g / gp
            w -= dw
            if w < self._w0:
                w = self._w0
            if abs(dw) <= 1e-14 * (1.0 + abs(w)):
                break
        return w

    def _slow_inverse(self, s: float) -> float:
        return float(self._x_of_w(self._slow_inverse_w(math.log(s))))

    def _inverse_scalar(self, s: float) -> float:
        if s < 0.0:
            raise FamilyError("inverse needs s >= 0")
        if s == 0.0:
            return 0.0
        if self.pure_power or s >= self._P_hi:
            return float(self._tail_inverse(s))
        if s >= self._P_lo:
            t = math.exp(float(self._inv_init(math.log(s))))
            logs = math.log(s)
            for _ in range(3):
                logt = math.log(t)
                err = float(self._spline(logt)) - logs
                dd = float(self._spline_d(logt))
                t *= math.exp(-err / dd)
                t = min(max(t, self.slow_hi), self.hi)
            return t
        return self._slow_inverse(s)

    def inverse(self, s):
        if np.isscalar(s):
            return self._inverse_scalar(float(s))
        arr = np.asarray(s, dtype=float)
        out = np.empty_like(arr)
        for i, v in enumerate(arr.ravel()):
            out.ravel()[i] = self._inverse_scalar(float(v))
        return out


class PowerDensity:
    """Exact power-law density coef * t**exponent, closed form throughout.

    Used for analytically solvable sanity families (the identity density
    in particular); every derived primitive and gauge is exact, which makes
    this the independent oracle for the generic construction.
    """

    def __init__(self, coef: float = 1.0, exponent: float = 1.0):
        if not (coef > 0.0 and exponent > 0.0):
            raise FamilyError("power density needs positive coef and exponent")
        self.coef = float(coef)
        self.exponent = float(exponent)

    def __call__(self, t):
        t = np.asarray(t, dtype=float) if not np.isscalar(t) else t
        return self.coef * np.power(t, self.exponent)

    def loglog_slope(self, t):
        if np.isscalar(t):
            return self.exponent
        return np.full_like(np.asarray(t, dtype=float), self.exponent)

    def inverse(self, x):
        x = np.asarray(x, dtype=float) if not np.isscalar(x) else x
        return np.power(np.asarray(x) / self.coef, 1.0 / self.exponent)


# ---------------------------------------------------------------------------
# Young pairs

@dataclass
class YoungPair:
    """Complementary Young pair: G = int density, F = int inverse density."""

    density: object
    G: Primitive
    F: Primitive
    fitted_c: float | None = None

    def margin(self, a, b):
        """Young inequality margin G(a) + F(b) - a*b (nonnegative up to
        cache accuracy, zero exactly when b = density(a))."""
        a = np.asarray(a, dtype=float)
        b = np.asarray(b, dtype=float)
        return self.G(a) + self.F(b) - a * b


def _family_primitive(H: BridgeDensity, which: str,
                      points_per_decade: int = 200) -> Primitive:
    """Build one of the four primitives of a bridge density.

    The slow regions are the exact Laplace forms P = exp(-w) Q(w) obtained
    by substituting the slow regime of H into the integral:

    - G  = int H:            w = log(1/t),   q(s) = 1/(s (log s)^lam)
    - G1 = int H^2:          w = log(1/t),   q(s) = 1/(s (log s)^lam)^2
    - F  = int H^{-1}:       w = -log H^{-1}(x),
                             q(s) = (1 + lam/log s)/(s^2 (log s)^lam)
    - F1 = int (H^2)^{-1}:   w = -log H^{-1}(sqrt y),
                             q(s) = 2 (1 + lam/log s)/(s^3 (log s)^{2 lam})

    with w exact (Lambert W based for the inverse densities).
    """
    lam = H.lam
    p = 1.0 / H.eps0
    hi_F = H(H.t_large)

    def m(w):
        return 1.0 / (w * np.log(w) ** lam)

    def neg_log_t(t):
        return -np.log(np.asarray(t, dtype=float))

    def exp_neg(w):
        return np.exp(-np.asarray(w, dtype=float))

    if which == "G":
        return Primitive(
            H, H.t_small, H.t_large, _PowerTail(1.0, p),
            w_of_x=neg_log_t, x_of_w=exp_neg, q_fn=m,
            dlogq_fn=lambda s: -(1.0 + lam / np.log(s)) / s,
            logq_fn=lambda s: -np.log(s) - lam * np.log(np.log(s)),
            kappa_fn=H.loglog_slope,
            points_per_decade=points_per_decade)
    if which == "G1":
        return Primitive(
            lambda t: np.square(H(t)), H.t_small, H.t_large,
            _PowerTail(1.0, 2.0 * p),
            w_of_x=neg_log_t, x_of_w=exp_neg,
            q_fn=lambda s: np.square(m(s)),
            dlogq_fn=lambda s: -2.0 * (1.0 + lam / np.log(s)) / s,
            logq_fn=lambda s: -2.0 * (np.log(s) + lam * np.log(np.log(s))),
            kappa_fn=lambda t: 2.0 * H.loglog_slope(t),
            points_per_decade=points_per_decade)
    if which == "F":
        def q_fn(s):
            L = np.log(s)
            return (1.0 + lam / L) / (s * s * L ** lam)

        def dlogq_fn(s):
            L = np.log(s)
            return -(2.0 + lam / L + lam / (L * L * (1.0 + lam / L))) / s

        def logq_fn(s):
            L = np.log(s)
            return -2.0 * np.log(s) - lam * np.log(L) + np.log1p(lam / L)

        return Primitive(
            H.inverse, H(H.t_small), hi_F, _PowerTail(1.0, H.eps0),
            w_of_x=H.neg_log_inverse, x_of_w=m,
            q_fn=q_fn, dlogq_fn=dlogq_fn, logq_fn=logq_fn,
            kappa_fn=lambda x: 1.0 / H.loglog_slope(H.inverse(x)),
            points_per_decade=points_per_decade)
    if which == "F1":
        def q_fn(s):
            L = np.log(s)
            return 2.0 * (1.0 + lam / L) / (s ** 3 * L ** (2.0 * lam))

        def dlogq_fn(s):
            L = np.log(s)
            return -(3.0 + 2.0 * lam / L
                     + lam / (L * L * (1.0 + lam / L))) / s

        def logq_fn(s):
            L = np.log(s)
            return (math.log(2.0) - 3.0 * np.log(s)
                    - 2.0 * lam * np.log(L) + np.log1p(lam / L))

        return Primitive(
            lambda y: H.inverse(np.sqrt(np.asarray(y, dtype=float))),
            H(H.t_small) ** 2, hi_F ** 2, _PowerTail(1.0, 0.5 * H.eps0),
            w_of_x=lambda y: H.neg_log_inverse(
                np.sqrt(np.asarray(y, dtype=float))),
            x_of_w=lambda w: np.square(m(w)),
            q_fn=q_fn, dlogq_fn=dlogq_fn, logq_fn=logq_fn,
            kappa_fn=lambda y: 0.5 / H.loglog_slope(
                H.inverse(np.sqrt(np.asarray(y, dtype=float)))),
            points_per_decade=points_per_decade)
    raise ValueError(which)


def _power_primitive(density: PowerDensity, inverse: bool) -> Primitive:
    c, p = density.coef, density.exponent
    if inverse:
        tail = _PowerTail(c ** (-1.0 / p), 1.0 / p)
        rho = density.inverse
    else:
        tail = _PowerTail(c, p)
        rho = density
    return Primitive(rho, 1.0, 1.0, tail, pure_power=True)


def young_from_density(H) -> YoungPair:
    """Young pair (G, F) generated by a density: G = int H, F = int H^{-1}."""
    if isinstance(H, BridgeDensity):
        return YoungPair(density=H, G=_family_primitive(H, "G"),
                         F=_family_primitive(H, "F"))
    if isinstance(H, PowerDensity):
        return YoungPair(density=H, G=_power_primitive(H, inverse=False),
                         F=_power_primitive(H, inverse=True))
    raise FamilyError(f"unsupported density type {type(H).__name__}")


def build_density(eps0: float, lam: float) -> BridgeDensity:
    """Construct the bridged density; parameters validated strictly."""
    return BridgeDensity(eps0=eps0, lam=lam)


# ---------------------------------------------------------------------------
# the convex gauge and its inverse

class PhiFunction:
    """Convex gauge phi with G(phi'(t)) = phi(t) and its inverse psi.

    psi(s) = int_0^s dx/G^{-1}(x) is evaluated through the slope potential
    S(y) = int_0^y H(x)/x dx as psi(s) = S(G^{-1}(s)); then phi' = S^{-1},
    phi = G(phi'), phi'' = phi'/H(phi').  S has closed forms on the outer
    regimes of H, which keeps psi and the slope exact where phi itself
    underflows (phi(t) drops below the smallest float already for t of
    order 2.5 with default parameters; such values are returned as 0.0 and
    log_phi covers the range where the logarithm is still representable).
    """

    def __init__(self, pair: YoungPair, bridge_points: int = 400):
        self.pair = pair
        H = pair.density
        if isinstance(H, PowerDensity):
            self._power = (H.coef, H.exponent)
            return
        self._power = None
        lam, eps0 = H.lam, H.eps0
        self._lam = lam
        self._p = 1.0 / eps0
        u0 = math.log(1.0 / H.t_small)
        self._s_small = math.log(u0) ** (1.0 - lam) / (lam - 1.0)
        z = np.linspace(math.log(H.t_small), math.log(H.t_large),
                        bridge_points)
        seg = _segment_integrals(lambda tt: H(tt) / tt, z)
        S = self._s_small + np.concatenate([[0.0], np.cumsum(seg)])
        t = np.exp(z)
        s1 = H(t)
        self._s_large = float(S[-1])
        # quintic pieces with exact dS/dz = H and d2S/dz2 = H * slope
        self._S_spline = BPoly.from_derivatives(
            z, np.column_stack([S, s1, s1 * H.loglog_slope(t)]))
        self._S_inv_init = PchipInterpolator(S, z)
        self._z_lo, self._z_hi = float(z[0]), float(z[-1])

    # -- the slope potential S ------------------------------------------

    def slope_potential(self, y):
        """S(y) = int_0^y H(x)/x dx."""
        H = self.pair.density
        if self._power is not None:
            c, p = self._power
            return c / p * np.power(np.asarray(y, dtype=float), p)
        scalar = np.isscalar(y)
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(y < 0.0):
            raise FamilyError("slope_potential needs y >= 0")
        out = np.zeros_like(y)
        lam = self._lam
        small = (y > 0.0) & (y <= H.t_small)
        if np.any(small):
            w = np.log(np.log(1.0 / y[small]))
            out[small] = w ** (1.0 - lam) / (lam - 1.0)
        mid = (y > H.t_small) & (y < H.t_large)
        if np.any(mid):
            out[mid] = self._S_spline(np.log(y[mid]))
        large = y >= H.t_large
        if np.any(large):
            p = self._p
            out[large] = self._s_large + (y[large] ** p
                                          - H.t_large ** p) / p
        return float(out[0]) if scalar else out

    def _slope_scalar_bridge(self, t: float) -> float:
        H = self.pair.density
        z = float(self._S_inv_init(t))
        for _ in range(40):
            err = float(self._S_spline(z)) - t
            dz = err / float(H(math.exp(z)))
            z -= dz
            z = min(max(z, self._z_lo), self._z_hi)
            if abs(dz) < 1e-15 * (1.0 + abs(z)):
                break
        return math.exp(z)

    def dphi(self, t):
        """phi'(t) = S^{-1}(t); underflows to an honest 0.0 for small t."""
        if self._power is not None:
            c, p = self._power
            return np.power(p / c * np.asarray(t, dtype=float), 1.0 / p)
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t < 0.0):
            raise FamilyError("dphi needs t >= 0")
        out = np.zeros_like(t)
        lam = self._lam
        small = (t > 0.0) & (t <= self._s_small)
        if np.any(small):
            with np.errstate(over="ignore"):
                expo = ((lam - 1.0) * t[small]) ** (-1.0 / (lam - 1.0))
                out[small] = np.exp(-np.exp(expo))
        mid = (t > self._s_small) & (t < self._s_large)
        for i in np.nonzero(mid)[0]:
            out[i] = self._slope_scalar_bridge(float(t[i]))
        large = t >= self._s_large
        if np.any(large):
            H = self.pair.density
            p = self._p
            out[large] = (H.t_large ** p
                          + p * (t[large] - self._s_large)) ** (1.0 / p)
        return float(out[0]) if scalar else out

    def phi(self, t):
        """phi(t) = G(phi'(t)); exact zero below the underflow threshold."""
        y = self.dphi(t)
        return self.pair.G(y)

    def d2phi(self, t):
        """phi''(t) = phi'(t)/H(phi'(t)), with 0/0 at the origin set to 0."""
        H = self.pair.density
        y = self.dphi(t)
        scalar = np.isscalar(y)
        y = np.atleast_1d(np.asarray(y, dtype=float))
        out = np.zeros_like(y)
        pos = y > 0.0
        if np.any(pos):
            out[pos] = y[pos] / H(y[pos])
        return float(out[0]) if scalar else out

    def psi(self, s):
        """psi(s) = S(G^{-1}(s)), the inverse function of phi."""
        if self._power is not None:
            return self.slope_potential(self.pair.G.inverse(s))
        scalar = np.isscalar(s)
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(s < 0.0):
            raise FamilyError("psi needs s >= 0")
        out = np.zeros_like(s)
        pos = s > 0.0
        if np.any(pos):
            y = self.pair.G.inverse(s[pos])
            out[pos] = self.slope_potential(y)
        return float(out[0]) if scalar else out

    def log_phi(self, t):
        """log phi(t), usable far below phi's underflow threshold.

        Returns -inf where even the logarithm exceeds the float range
        (roughly t < 0.776 with default parameters).
        """
        if self._power is not None:
            return self.pair.G.log(self.dphi(t))
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(t <= 0.0):
            raise FamilyError("log_phi needs t > 0")
        out = np.empty_like(t)
        lam = self._lam
        deep = t <= self._s_small
        if np.any(deep):
            with np.errstate(over="ignore"):
                w = ((lam - 1.0) * t[deep]) ** (-1.0 / (lam - 1.0))
                u = np.exp(w)
            vals = np.full(u.shape, -np.inf)
            fin = np.isfinite(u)
            if np.any(fin):
                vals[fin] = self.pair.G.log_from_w(u[fin])
            out[deep] = vals
        rest = ~deep
        if np.any(rest):
            out[rest] = self.pair.G.log(self.dphi(t[rest]))
        return float(out[0]) if scalar else out

    def psi_from_log(self, log_s):
        """psi evaluated from log s, for s far below the float range.

        Agrees with psi(exp(log_s)) wherever both are defined; for very
        negative log_s it solves the deep inverse in the w coordinate and
        applies the closed small form of the slope potential, so the
        composition psi(phi(t)) = t survives phi's underflow.
        """
        if self._power is not None:
            raise FamilyError("psi_from_log requires the bridge family")
        scalar = np.isscalar(log_s)
        log_s = np.atleast_1d(np.asarray(log_s, dtype=float))
        G = self.pair.G
        out = np.empty_like(log_s)
        deep = log_s < math.log(G._P_lo)
        for i in np.nonzero(deep)[0]:
            wg = G._slow_inverse_w(float(log_s[i]))
            out[i] = math.log(wg) ** (1.0 - self._lam) / (self._lam - 1.0)
        rest = ~deep
        if np.any(rest):
            out[rest] = self.psi(np.exp(log_s[rest]))
        return float(out[0]) if scalar else out

    def log_neg_log_phi(self, t):
        """log(-log phi(t)), finite far beyond where even log phi overflows.

        Only the deep regime t <= S(t_small) is supported; there
        -log phi = u - log Q(u) with u = e^w, and once u itself would
        overflow the outer logarithm collapses to w + log1p(...) which
        never does.
        """
        if self._power is not None:
            raise FamilyError("log_neg_log_phi requires the bridge family")
        scalar = np.isscalar(t)
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any((t <= 0.0) | (t > self._s_small)):
            raise FamilyError("log_neg_log_phi needs 0 < t <= S(t_small)")
        lam = self._lam
        w = ((lam - 1.0) * t) ** (-1.0 / (lam - 1.0))
        out = np.empty_like(w)
        mod = w < 40.0
        if np.any(mod):
            u = np.exp(w[mod])
            out[mod] = np.log(-self.pair.G.log_from_w(u))
        big = ~mod
        if np.any(big):
            wb = w[big]
            # (w + lam log w)/e^w, formed in log space to dodge overflow
            with np.errstate(under="ignore"):
                ratio = np.exp(np.log(wb + lam * np.log(wb)) - wb)
            out[big] = wb + np.log1p(ratio)
        return float(out[0]) if scalar else out

    def psi_from_log_neg_log(self, llog):
        """psi at the point whose double logarithm log(-log s) is llog.

        Requires llog >= 37 so that the neglected log Q correction to the
        inner logarithm is below resolution; use psi_from_log otherwise.
        """
        if self._power is not None:
            raise FamilyError("psi_from_log_neg_log requires the bridge "
                              "family")
        scalar = np.isscalar(llog)
        llog = np.atleast_1d(np.asarray(llog, dtype=float))
        if np.any(llog < 37.0):
            raise FamilyError("psi_from_log_neg_log needs llog >= 37")
        out = llog ** (1.0 - self._lam) / (self._lam - 1.0)
        return float(out[0]) if scalar else out

    def psi_asymptote(self, s):
        """Iterated-log asymptote of psi near zero for the bridge family."""
        if self._power is not None:
            raise FamilyError("power families have no iterated-log asymptote")
        lam = self._lam
        s = np.asarray(s, dtype=float)
        return np.log(np.log(1.0 / s)) ** (1.0 - lam) / (lam - 1.0)


def build_phi(pair: YoungPair) -> PhiFunction:
    """Gauge construction for a Young pair (see PhiFunction)."""
    return PhiFunction(pair)


# ---------------------------------------------------------------------------
# squared pair and its identities

def g1_identity_log_gap(H: BridgeDensity, t):
    """log[G1(phi''(t))] - log[phi(t)] carried out in deep-regime variables.

    G1 = int H^2.  The gap is positive, decreases to 0 as t decreases, and
    underflows to an exact 0.0 once it drops below the float range; the
    arithmetic never forms phi or phi'' themselves, so the expression stays
    meaningful where both (and even their logarithms) underflow.  While the
    inner exponential is representable the two logarithms come from panel
    quadrature and are exact to rounding; beyond that a closed form in
    iterated-log variables takes over with error far below resolution.
    Valid for t small enough that phi'(t) sits in the slow regime
    (t <= S(t_small), with enough slack for the shifted argument).
    """
    lam = H.lam
    scalar = np.isscalar(t)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    w = ((lam - 1.0) * t) ** (-1.0 / (lam - 1.0))
    if np.any(w < 2.5):
        raise FamilyError("argument outside the deep regime of the gap"
                          f" formula (needs t <= {4.0 * 2.5 ** (1 - lam):.3g}"
                          " for these parameters)")
    logw = np.log(w)
    gap = np.empty_like(w)
    # Past w ~ 16 the two panel logs agree to more digits than the float
    # mantissa holds and their difference is noise; the shift form, whose
    # truncation error decays like e^-w, is the accurate one there.
    rep = w <= 16.0
    if np.any(rep):
        wr, lr = w[rep], logw[rep]
        u = np.exp(wr)
        w1 = u - wr - lam * lr       # slow coordinate of G1 at phi''
        gap[rep] = (wr + lam * lr + _logQ_power_of_m(w1, lam, 2.0)
                    - _logQ_power_of_m(u, lam, 1.0))
    big = ~rep
    if np.any(big):
        wb, lb = w[big], logw[big]
        # (w + lam log w)/u with u = e^w, in log space to dodge overflow
        with np.errstate(over="ignore", under="ignore"):
            ew = np.exp(np.log(wb + lam * lb) - wb)
        shift = np.log1p(-ew)        # log(w1/u)
        wx = wb + shift
        with np.errstate(under="ignore"):
            m0u = np.exp(-wb) * (1.0 + lam / wb)
            m0x = np.exp(-wx) * (1.0 + lam / wx)
        gap[big] = (-2.0 * shift - 2.0 * lam * np.log1p(shift / wb)
                    + np.log1p(-2.0 * m0x) - np.log1p(-m0u))
    return float(gap[0]) if scalar else gap


def build_G1_F1(H: BridgeDensity, phi: PhiFunction) -> YoungPair:
    """Squared pair G1 = int H^2, F1 = int (H^2)^{-1}.

    Verifies at build time that the squared-gauge identity ratio
    G1(phi''(t))/phi(t) trends to 1 along decreasing t, and fits the
    constant of the conjugate smallness bound

        F1(t) <= c * t * exp(-2^lam * t^(-1/2) * (log 1/t)^(-lam))

    over sampled small t.  The fitted constant is recorded on the returned
    pair; no universal value is asserted.
    """
    if not isinstance(H, BridgeDensity):
        if isinstance(H, PowerDensity):
            G1 = _power_primitive(
                PowerDensity(H.coef ** 2, 2.0 * H.exponent), inverse=False)
            F1 = _power_primitive(
                PowerDensity(H.coef ** 2, 2.0 * H.exponent), inverse=True)
            return YoungPair(density=H, G=G1, F=F1)
        raise FamilyError(f"unsupported density type {type(H).__name__}")

    pair = YoungPair(density=H, G=_family_primitive(H, "G1"),
                     F=_family_primitive(H, "F1"))

    gaps = g1_identity_log_gap(H, np.array([3.0, 2.6, 2.2]))
    if not (np.all(gaps >= 0.0) and np.all(np.diff(gaps) <= 0.0)):
        raise FamilyError(f"squared-gauge identity trend violated: {gaps}")

    lam = H.lam
    ts = np.geomspace(1e-7, 1e-3, 25)
    log_bound = np.log(ts) - 2.0 ** lam * ts ** -0.5 * np.log(1.0 / ts) ** -lam
    log_ratio = pair.F.log(ts) - log_bound
    c_fit = float(np.exp(np.max(log_ratio)))
    if not math.isfinite(c_fit):
        raise FamilyError("conjugate smallness bound fit failed")
    pair.fitted_c = c_fit
    return pair


# ---------------------------------------------------------------------------
# tabulation

def dump_table(path, pair: YoungPair, phi: PhiFunction, t_values):
    """Write (t, H, G, F, psi, phi, dphi, d2phi) rows, 17 significant digits."""
    t = np.asarray(t_values, dtype=float)
    H = pair.density
    cols = [t, H(t), pair.G(t), pair.F(t), phi.psi(t),
            phi.phi(t), phi.dphi(t), phi.d2phi(t)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,H,G,F,psi,phi,dphi,d2phi\n")
        for row in zip(*cols):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
