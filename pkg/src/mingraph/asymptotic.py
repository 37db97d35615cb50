"""Exhaustion runs and the integral estimates behind boundary attainment.

Solves the Dirichlet problem on an increasing sequence of geodesic balls
with the same angular data and measures everything the limit argument
needs: how far each solution sits from the radial data extension at probe
radii, Orlicz integrals of the deviation, a Caccioppoli-type energy
inequality, sup/integral ratios on interior balls, and the decay of the
conjugate pair along the warping factor.

Conventions shared by every metric here: quantities live at cell centers
with midpoint quadrature (cell volume f^(n-1) sin^(n-2) h_r h_theta; the
constant angular sphere factor is omitted since it cancels in every
asserted comparison), and the pole cell is excluded because the radial
extension of angular data has no value there.
"""

import json
import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .manifold import JacobiSolution
from .pde import BoundaryData, DiscreteField, PdeError, assemble, solve_dirichlet

__all__ = [
    "AsymptoticError",
    "RadiusRecord",
    "ExhaustionReport",
    "ScenarioVerdict",
    "dimension_gate",
    "select_nu",
    "attainment_metric",
    "phi_integral",
    "rhs_budget",
    "caccioppoli_check",
    "moser_ratio",
    "decay_check",
    "run_exhaustion",
    "classify",
]


class AsymptoticError(ValueError):
    """Invalid probe geometry, a violated estimate, or a divergent budget."""


def dimension_gate(n: int, phi: float) -> bool:
    """True iff the dimension clears the growth-exponent threshold n > 4/phi + 1."""
    if n < 2 or int(n) != n:
        raise AsymptoticError(f"dimension must be an integer >= 2, got {n!r}")
    if not phi > 1.0:
        raise AsymptoticError(f"growth exponent must exceed 1, got {phi!r}")
    return n > 4.0 / phi + 1.0


def select_nu(phi, C1: float) -> float:
    """Smallest scale nu on a doubling grid normalizing the deviation range.

    Conditions at h_max = 2 C1 / nu: phi(h_max) <= 1, phi'(h_max) <= 1, and
    sup_{0 < t <= h_max} phi(t)/phi'(t) <= 10.  Convexity with phi(0) = 0
    gives phi/phi' <= t, so the conditions are achievable for every family.
    """
    if C1 < 0.0:
        raise AsymptoticError("amplitude bound must be nonnegative")
    if C1 == 0.0:
        return 1.0
    for k in range(-20, 60):
        nu = C1 * 2.0 ** k
        hmax = 2.0 * C1 / nu
        with np.errstate(over="ignore"):
            if not (phi.phi(hmax) <= 1.0 and phi.dphi(hmax) <= 1.0):
                continue
            t = np.linspace(0.0, hmax, 513)[1:]
            p, dp = phi.phi(t), phi.dphi(t)
        quot = np.zeros_like(p)
        pos = dp > 0.0
        quot[pos] = p[pos] / dp[pos]
        if np.max(quot) <= 10.0:
            return nu
    raise AsymptoticError("no admissible nu found on the doubling grid")


def _theta_extension(grid, data: BoundaryData):
    # radial extension of the angular data, sampled at cell centers
    return np.broadcast_to(data(grid.theta)[None, :],
                           (grid.n_r, grid.n_theta))


def attainment_metric(field: DiscreteField, data: BoundaryData,
                      rho: float) -> float:
    """Largest gap |u(rho, theta) - g(theta)| over the angular grid."""
    grid = field.grid
    lo = 0.0 if grid.has_pole else grid.R_in
    if not (lo <= rho <= grid.R * (1.0 + 1e-12)):
        raise AsymptoticError(f"probe radius {rho} outside [{lo}, {grid.R}]")
    theta = grid.theta
    u = field.sample(np.full_like(theta, min(rho, grid.R)), theta)
    return float(np.max(np.abs(u - data(theta))))


def phi_integral(field: DiscreteField, data: BoundaryData, phi,
                 nu: float) -> float:
    """Orlicz mass of the deviation: sum of phi(|u - theta|/nu) dV."""
    if not nu > 0.0:
        raise AsymptoticError("nu must be positive")
    grid = field.grid
    h = np.abs(field.u - _theta_extension(grid, data)) / nu
    with np.errstate(over="ignore"):
        vals = phi.phi(h.ravel()).reshape(h.shape)
    if not np.all(np.isfinite(vals)):
        raise AsymptoticError("phi overflow: nu too small for this deviation")
    return float(np.sum(vals * grid.vol))


_BUDGET_GX, _BUDGET_GW = np.polynomial.legendre.leggauss(10)


def rhs_budget(jac: JacobiSolution, data: BoundaryData, F, F1,
               R: float) -> float:
    """Data-side budget: integral of F(r L/f) + F1(r^2 L^2/f^2) over the ball.

    L is the data's angular Lipschitz bound, so r L / f dominates r|grad|
    of the radial extension.  Before returning, the integrand is scanned
    out to the solved range: if it is not decaying there the full-space
    budget cannot be finite and the scenario violates the hypotheses.
    """
    if not (0.0 < R <= jac.r_max * (1.0 + 1e-12)):
        raise AsymptoticError(f"R = {R} outside the solved range")
    L = data.L
    if L == 0.0:
        return 0.0
    p = jac.n - 1

    def integrand(r):
        f = jac.f(r)
        t1 = r * L / f
        return (F.F(t1) + F1.F(t1 * t1)) * f ** p

    # the integrand is continuous up to r = 0 (argument -> L), so fixed
    # Gauss panels never sample the removable 0/0 at the origin
    edges = np.linspace(0.0, R, 601)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * _BUDGET_GX[None, :]).ravel()
    wts = (half[:, None] * np.broadcast_to(_BUDGET_GW, (600, 10))).ravel()
    total = float(np.sum(wts * integrand(nodes)))

    # certify the tail in log space: far out the Young factor underflows
    # while the volume factor overflows, so the direct product is 0*inf
    hi = jac.r_max * (1.0 - 1e-12)
    if hi > R:
        tail = np.geomspace(R, hi, 200)
        f = jac.f(tail)
        t1 = tail * L / f
        logv = np.logaddexp(F.F.log(t1), F1.F.log(t1 * t1)) \
            + p * np.log(f)
        if logv[-1] > -690.0 and logv[-1] >= logv[0] + math.log(0.999):
            raise AsymptoticError(
                "budget integrand is not decaying past R; the full-space "
                "integral diverges for this profile")
    return total


def _cell_gradients(field: DiscreteField, g_out):
    """Cell-centered (u_r, u_theta) with the solver's boundary stencils."""
    grid = field.grid
    U = field.u
    h, ht = grid.h_r, grid.h_theta
    ur = np.empty_like(U)
    ur[1:-1] = (U[2:] - U[:-2]) / (2.0 * h)
    if grid.has_pole:
        ur[0] = (U[1] - field.pole) / (2.0 * h)
    else:
        ur[0] = (U[1] - field.g_inner) / (1.5 * h)
    ur[-1] = (g_out - U[-2]) / (1.5 * h)
    pad = np.pad(U, ((0, 0), (1, 1)), mode="edge")
    ut = (pad[:, 2:] - pad[:, :-2]) / (2.0 * ht)
    return ur, ut


def caccioppoli_check(field: DiscreteField, data: BoundaryData, eta, phi,
                      nu: float, eps: float):
    """Energy inequality for the deviation h = |u - theta|/nu.

    eta = (r_plateau, r_zero) describes a piecewise-linear radial cutoff:
    1 on [0, r_plateau], linear to 0 at r_zero, 0 beyond; r_zero <= R keeps
    eta^2 phi(h) away from the Dirichlet face.  (0, 0) is the identically
    zero cutoff.  Returns (lhs, rhs) of

        int eta^2 phi'(h) |grad u|^2 / W  <=  C_eps int eta^2 phi'(h)
            |grad theta|^2  +  (4+eps) nu^2 int (phi^2/phi')(h) |grad eta|^2

    with eps1 = eps/(4+eps) and C_eps = 2/(eps1 (2-eps1)); raises if the
    inequality fails beyond a 1e-6 relative allowance.
    """
    grid = field.grid
    if not grid.has_pole:
        raise AsymptoticError("cutoff check needs a ball field")
    if not eps > 0.0:
        raise AsymptoticError("eps must be positive")
    if not nu > 0.0:
        raise AsymptoticError("nu must be positive")
    r0, r1 = float(eta[0]), float(eta[1])
    if r0 == 0.0 and r1 == 0.0:
        return 0.0, 0.0
    if not (0.0 <= r0 < r1 <= grid.R * (1.0 + 1e-12)):
        raise AsymptoticError(
            f"cutoff knots ({r0}, {r1}) must satisfy 0 <= r0 < r1 <= {grid.R}")

    g = data(grid.theta)
    theta_ext = np.broadcast_to(g[None, :], field.u.shape)
    hdev = np.abs(field.u - theta_ext) / nu
    with np.errstate(over="ignore"):
        phv = phi.phi(hdev.ravel()).reshape(hdev.shape)
        dphv = phi.dphi(hdev.ravel()).reshape(hdev.shape)
    if not (np.all(np.isfinite(phv)) and np.all(np.isfinite(dphv))):
        raise AsymptoticError("phi overflow: nu too small for this deviation")
    quot = np.zeros_like(phv)
    pos = dphv > 0.0
    quot[pos] = phv[pos] ** 2 / dphv[pos]    # (phi^2/phi')(0) := 0

    ur, ut = _cell_gradients(field, g)
    fc = grid.f_center[:, None]
    grad2_u = ur ** 2 + (ut / fc) ** 2
    dg = (np.pad(g, 1, mode="edge")[2:] - np.pad(g, 1, mode="edge")[:-2]) \
        / (2.0 * grid.h_theta)
    grad2_t = np.broadcast_to((dg[None, :] / fc) ** 2, field.u.shape)

    r = grid.r
    eta_c = np.clip((r1 - r) / (r1 - r0), 0.0, 1.0)
    eta_c[r <= r0] = 1.0
    slope = -1.0 / (r1 - r0)
    eta_p = np.where((r > r0) & (r < r1), slope, 0.0)

    W = np.sqrt(1.0 + grad2_u)
    e2 = (eta_c ** 2)[:, None]
    lhs = float(np.sum(e2 * dphv * grad2_u / W * grid.vol))
    eps1 = eps / (4.0 + eps)
    c_eps = 2.0 / (eps1 * (2.0 - eps1))
    rhs = float(c_eps * np.sum(e2 * dphv * grad2_t * grid.vol)
                + (4.0 + eps) * nu ** 2
                * np.sum(quot * (eta_p ** 2)[:, None] * grid.vol))
    if lhs > rhs * (1.0 + 1e-6):
        raise AsymptoticError(
            f"energy inequality violated: lhs {lhs:.6e} > rhs {rhs:.6e}")
    return lhs, rhs


def _geodesic_distances(grid, i_src: int, j_src: int):
    """Dijkstra distances from a cell center over the metric graph.

    Edges join radial and angular neighbors with lengths dr and f(r) dtheta;
    reflection symmetry of the metric makes the half-domain graph distance
    agree with the manifold distance to O(h).  The returned vector covers
    tensor cells (pole omitted; it is never a metric target here).
    """
    n_r, M = grid.n_r, grid.n_theta
    cells = np.arange(n_r * M).reshape(n_r, M)
    rows = [cells[:-1].ravel(), cells[:, :-1].ravel()]
    cols = [cells[1:].ravel(), cells[:, 1:].ravel()]
    wts = [np.repeat(np.diff(grid.r), M),
           np.repeat(grid.f_center * grid.h_theta, M - 1)]
    n_nodes = n_r * M
    if grid.has_pole:
        # route through the pole: cell centers of ring 0 sit at distance r_0
        rows.append(np.full(M, n_nodes))
        cols.append(cells[0])
        wts.append(np.full(M, grid.r[0]))
        n_nodes += 1
    graph = coo_matrix(
        (np.concatenate(wts), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_nodes, n_nodes)).tocsr()
    dist = dijkstra(graph, directed=False, indices=cells[i_src, j_src])
    return dist[:n_r * M].reshape(n_r, M)


def moser_ratio(field: DiscreteField, data: BoundaryData, phi, nu: float,
                center, s: float) -> float:
    """sup over B(center, s/2) of phi(h)^(n+1) per unit integral over B(center, s).

    A diagnostic for the sup-estimate stage: finite ratios across centers
    and radii witness one empirical constant.  0/0 is defined as 0.
    """
    grid = field.grid
    if not nu > 0.0:
        raise AsymptoticError("nu must be positive")
    rc, tc = float(center[0]), float(center[1])
    if not (0.0 <= tc <= math.pi):
        raise AsymptoticError("center angle outside [0, pi]")
    if not s > 0.0:
        raise AsymptoticError("probe radius must be positive")
    lo = 0.0 if grid.has_pole else grid.R_in
    if rc + s > grid.R * (1.0 + 1e-12) or (not grid.has_pole
                                           and rc - s < lo * (1.0 - 1e-12)):
        raise AsymptoticError(
            f"ball of radius {s} about r = {rc} leaves the domain")

    dist = _geodesic_distances(grid, int(np.argmin(np.abs(grid.r - rc))),
                               int(np.argmin(np.abs(grid.theta - tc))))
    h = np.abs(field.u - _theta_extension(grid, data)) / nu
    with np.errstate(over="ignore"):
        vals = phi.phi(h.ravel()).reshape(h.shape)
    if not np.all(np.isfinite(vals)):
        raise AsymptoticError("phi overflow: nu too small for this deviation")
    inner = dist <= s / 2.0
    outer = dist <= s
    denom = float(np.sum(vals[outer] * grid.vol[outer]))
    if denom == 0.0:
        return 0.0
    sup = float(np.max(vals[inner])) if np.any(inner) else 0.0
    return sup ** (grid.n + 1) / denom


def decay_check(F, F1, jac: JacobiSolution, C: float, r_scan) -> float:
    """Smallest scanned r* past which both conjugate decays beat r^-2.

    Checks F(r/j) j^(C(n-1)) <= r^-2 and F1(r^2/j^2) j^(C(n-1)) <= r^-2
    with j = f on a log grid; evaluation is in log space, so the certificate
    stays exact far below the floating underflow range.
    """
    if not C > 0.0:
        raise AsymptoticError("exponent C must be positive")
    lo, hi = float(r_scan[0]), float(r_scan[1])
    if not (0.0 < lo < hi):
        raise AsymptoticError("scan range must satisfy 0 < lo < hi")
    if hi > jac.r_max * (1.0 + 1e-12):
        raise AsymptoticError(
            f"scan reaches {hi} but the profile is solved to {jac.r_max}")
    r = np.geomspace(lo, hi, 600)
    j = jac.f(r)
    logr = np.log(r)
    logjpow = C * (jac.n - 1) * np.log(j)
    log_lhs1 = F.F.log(r / j) + logjpow
    log_lhs2 = F1.F.log((r / j) ** 2) + logjpow
    ok = (log_lhs1 <= -2.0 * logr) & (log_lhs2 <= -2.0 * logr)
    suffix = np.logical_and.accumulate(ok[::-1])[::-1]
    if not suffix.any():
        raise AsymptoticError(
            "decay condition never satisfied on the scanned range")
    k = int(np.argmax(suffix))
    # eventual decrease: some suffix of the scan must be nonincreasing
    # (not necessarily from r* itself, where wobble under the envelope
    # is possible); require a tail of at least 10 grid points
    dec = (np.diff(log_lhs1) <= 1e-9) & (np.diff(log_lhs2) <= 1e-9)
    dec_suffix = np.logical_and.accumulate(dec[::-1])[::-1]
    if not dec_suffix.any() or int(np.argmax(dec_suffix)) > dec.size - 10:
        raise AsymptoticError("left sides are not eventually decreasing")
    return float(r[k])


@dataclass
class RadiusRecord:
    """Everything measured on one exhaustion ball (field kept in memory only)."""

    R: float
    n_r: int
    n_theta: int
    converged: bool
    error: str = ""
    iterations: int = 0
    residual_linf: float = math.nan
    delta: dict = dc_field(default_factory=dict)
    phi_integral: float = math.nan
    caccioppoli: tuple = ()
    moser: dict = dc_field(default_factory=dict)
    field: DiscreteField = None

    def summary(self) -> dict:
        return {
            "R": self.R,
            "n_r": self.n_r,
            "n_theta": self.n_theta,
            "converged": self.converged,
            "error": self.error,
            "iterations": self.iterations,
            "residual_linf": self.residual_linf,
            "delta": dict(self.delta),
            "phi_integral": self.phi_integral,
            "caccioppoli": list(self.caccioppoli),
            "moser": dict(self.moser),
        }


@dataclass
class ScenarioVerdict:
    verdict: str
    gates: dict
    trend: dict
    margins: dict
    fitted: dict

    def as_dict(self) -> dict:
        return {"verdict": self.verdict, "gates": dict(self.gates),
                "trend": dict(self.trend), "margins": dict(self.margins),
                "fitted": dict(self.fitted)}


@dataclass
class ExhaustionReport:
    scenario: str
    nu: float
    schedule: list
    probe_labels: list
    records: list
    distances: list          # (R_k, R_{k+1}, sup |u_{k+1} - u_k| on B(rho0))
    rho0: float

    def record(self, R: float) -> RadiusRecord:
        for rec in self.records:
            if rec.R == R:
                return rec
        raise AsymptoticError(f"no record at R = {R}")

    def to_json(self, path, gates=None, verdict=None):
        doc = {
            "scenario": self.scenario,
            "gates": dict(gates) if gates is not None else None,
            "nu": self.nu,
            "schedule": list(self.schedule),
            "probes": list(self.probe_labels),
            "rho0": self.rho0,
            "per_radius": [rec.summary() for rec in self.records],
            "distances": [list(d) for d in self.distances],
            "verdict": verdict.as_dict() if verdict is not None else None,
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def attainment_csv(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("R,rho,delta\n")
            for rec in self.records:
                for label in self.probe_labels:
                    if label not in rec.delta:
                        continue
                    rho = _resolve_probe(_parse_label(label), rec.R)
                    fh.write(f"{rec.R:.17g},{rho:.17g},"
                             f"{rec.delta[label]:.17g}\n")


def _parse_label(label: str):
    if label.endswith("R"):
        return ("rel", float(label[:-1]))
    return ("abs", float(label))


def _probe_label(probe) -> str:
    if isinstance(probe, tuple):
        kind, val = probe
        if kind != "rel":
            raise AsymptoticError(f"unknown probe kind {kind!r}")
        return f"{float(val):g}R"
    return f"{float(probe):g}"


def _resolve_probe(probe, R: float) -> float:
    if probe[0] == "rel":
        return probe[1] * R
    return probe[1]


def run_exhaustion(jac: JacobiSolution, data: BoundaryData, schedule,
                   probes, grid_policy, young, nu: float,
                   min_radius=None, scenario: str = "run",
                   eps: float = 1.0, sobolev_radius: float = 1.0,
                   tol: float = 1e-10, max_iter: int = 50
                   ) -> ExhaustionReport:
    """Solve on each ball of the schedule and collect the estimate metrics.

    probes: radii at which the deviation from the data extension is read;
    floats are absolute, ("rel", q) means q*R on each ball.  grid_policy is
    (n_r, n_theta) or a callable R -> (n_r, n_theta).  nu must be at least
    the normalizing scale of select_nu for the data's amplitude bound.
    sobolev_radius caps the interior balls of the sup/integral ratios.
    Solver failures are recorded per radius and the run continues.
    """
    schedule = [float(R) for R in schedule]
    if len(schedule) < 2:
        raise AsymptoticError("schedule needs at least two radii")
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise AsymptoticError("schedule must be strictly increasing")
    if schedule[-1] > jac.r_max * (1.0 + 1e-12):
        raise AsymptoticError(
            f"schedule reaches {schedule[-1]} but the profile is solved "
            f"to {jac.r_max}")
    if min_radius is not None and schedule[0] < min_radius * (1.0 - 1e-12):
        raise AsymptoticError(
            f"schedule starts at {schedule[0]} below the admissible "
            f"radius {min_radius}")
    nu0 = select_nu(young, data.C1)
    if nu < nu0 * (1.0 - 1e-12):
        raise AsymptoticError(f"nu = {nu} below the normalizing scale {nu0}")

    parsed = [(_probe_label(p), _parse_label(_probe_label(p)))
              for p in probes]
    labels = [lab for lab, _ in parsed]

    records = []
    for R in schedule:
        n_r, n_theta = (grid_policy(R) if callable(grid_policy)
                        else grid_policy)
        rec = RadiusRecord(R=R, n_r=int(n_r), n_theta=int(n_theta),
                           converged=False)
        try:
            grid = assemble(jac, jac.n, R, n_r, n_theta)
            fld = solve_dirichlet(grid, data, tol=tol, max_iter=max_iter)
        except PdeError as exc:
            rec.error = str(exc)
            rec.field = getattr(exc, "field", None)
            records.append(rec)
            continue
        rec.converged = True
        rec.field = fld
        rec.iterations = fld.report["iterations"]
        rec.residual_linf = fld.report["residual_linf"]
        for lab, probe in parsed:
            rho = _resolve_probe(probe, R)
            if 0.0 < rho <= R:
                rec.delta[lab] = attainment_metric(fld, data, rho)
        rec.phi_integral = phi_integral(fld, data, young, nu)
        r_zero = max(R - 1.0, 0.5 * R)
        rec.caccioppoli = caccioppoli_check(fld, data, (0.0, r_zero),
                                            young, nu, eps)
        for lab, probe in parsed:
            rho = _resolve_probe(probe, R)
            s = min(sobolev_radius, 0.9 * (R - rho), 0.9 * rho)
            if s > 0.0:
                rec.moser[lab] = moser_ratio(fld, data, young, nu,
                                             (rho, math.pi / 2.0), s)
        records.append(rec)

    abs_probes = [val for _, (kind, val) in parsed if kind == "abs"]
    rho0 = min(abs_probes) if abs_probes else 0.5 * schedule[0]
    r_lat = np.linspace(0.0, rho0, 49)
    t_lat = np.linspace(0.0, math.pi, 97)
    rr = np.repeat(r_lat, t_lat.size)
    tt = np.tile(t_lat, r_lat.size)
    distances = []
    for a, b in zip(records, records[1:]):
        if a.converged and b.converged:
            gap = np.max(np.abs(a.field.sample(rr, tt)
                                - b.field.sample(rr, tt)))
            distances.append((a.R, b.R, float(gap)))
    return ExhaustionReport(scenario=scenario, nu=nu, schedule=schedule,
                            probe_labels=labels, records=records,
                            distances=distances, rho0=rho0)


def classify(report: ExhaustionReport, gates) -> ScenarioVerdict:
    """Apply the finite-run attainment thresholds to a complete report.

    Attainment-consistent: final deviation at most half the initial one at
    every probe.  Non-attainment: final at least 0.8x the initial at the
    relative probe.  Anything else is inconclusive.
    """
    if not report.records:
        raise AsymptoticError("empty report")
    for rec in report.records:
        if not rec.converged:
            raise AsymptoticError(
                f"report incomplete: solve at R = {rec.R} failed "
                f"({rec.error})")
    first, last = report.records[0], report.records[-1]
    trend = {}
    for lab in report.probe_labels:
        if lab in first.delta and lab in last.delta:
            trend[lab] = {"initial": first.delta[lab],
                          "final": last.delta[lab]}
    if not trend:
        raise AsymptoticError("report carries no usable probe readings")

    attain = all(v["final"] <= 0.5 * v["initial"] for v in trend.values())
    rel_labels = [lab for lab in trend if lab.endswith("R")]
    persist = any(trend[lab]["final"] >= 0.8 * trend[lab]["initial"]
                  for lab in rel_labels)
    if attain:
        verdict = "attainment-consistent"
    elif persist:
        verdict = "non-attainment"
    else:
        verdict = "inconclusive"

    margins = {"caccioppoli_min": min(
        rec.caccioppoli[1] - rec.caccioppoli[0] for rec in report.records)}
    moser_vals = [v for rec in report.records for v in rec.moser.values()]
    fitted = {
        "phi_integral_sup": max(rec.phi_integral for rec in report.records),
        "moser_ratio_sup": max(moser_vals) if moser_vals else 0.0,
    }
    if report.distances:
        margins["compact_distance_final"] = report.distances[-1][2]
    return ScenarioVerdict(verdict=verdict, gates=dict(gates), trend=trend,
                           margins=margins, fitted=fitted)
