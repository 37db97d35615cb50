"""Release acceptance checks, one test per criterion.

Every test prints a single PASS/FAIL line with the measured numbers, so
a plain pytest run doubles as the acceptance report.  Tolerances and
runtime budgets are stated inline and asserted as-is.

Criterion 7 has two legs.  The fixed-probe leg is marked strict-xfail
rather than weakened: on the hyperbolic preset the deviation at frozen
rho = 3 converges upward to the gap of the limit solution (about 0.095
for this data), so no halving between R = 4 and R = 8 can occur; decay
at probes that scale with R, and the shrinking distance between
consecutive solutions, are what the runs actually deliver.  The
euclidean contrast leg passes as stated.
"""

import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

from mingraph import asymptotic as asy
from mingraph.cli import main
from mingraph.manifold import (CurvatureProfile, laplacian_r, solve_jacobi,
                               verify_laplacian_bound)
from mingraph.pde import (BoundaryData, assemble, comparison_check,
                          solve_dirichlet)
from mingraph.young import (build_G1_F1, build_density, build_phi,
                            lambert_w, young_from_density)

EPS0, LAM = 0.5, 1.25


def _emit(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"acceptance {num:>3}: {'PASS' if ok else 'FAIL'} {detail}")


@pytest.fixture(scope="module")
def family():
    H = build_density(EPS0, LAM)
    pair = young_from_density(H)
    phi = build_phi(pair)
    sq = build_G1_F1(H, phi)
    return H, pair, phi, sq


@pytest.fixture(scope="module")
def jac_hyp():
    return solve_jacobi(CurvatureProfile.constant(1.0), n=2, r_max=40.0)


@pytest.fixture(scope="module")
def jac_flat():
    return solve_jacobi(CurvatureProfile.euclidean(), n=2, r_max=1e4)


@pytest.fixture(scope="module")
def jac_pow23():
    return solve_jacobi(CurvatureProfile.power(2.0), n=3, r_max=1e6)


@pytest.fixture(scope="module")
def cos_data():
    return BoundaryData(lambda th: np.cos(th), L=1.0, C1=1.0)


@pytest.fixture(scope="module")
def hyp_run(jac_hyp, cos_data, family):
    _, _, phi, _ = family
    t0 = time.perf_counter()
    rep = asy.run_exhaustion(
        jac_hyp, cos_data, [4.0, 6.0, 8.0], [3.0, ("rel", 0.75)],
        lambda R: (max(32, int(8 * R)), 48), phi, 0.5,
        scenario="acceptance-hyperbolic")
    return rep, time.perf_counter() - t0


@pytest.fixture(scope="module")
def flat_run(jac_flat, cos_data, family):
    _, _, phi, _ = family
    t0 = time.perf_counter()
    rep = asy.run_exhaustion(
        jac_flat, cos_data, [4.0, 8.0, 16.0], [("rel", 0.75)],
        (48, 48), phi, 0.5, scenario="acceptance-euclidean")
    return rep, time.perf_counter() - t0


def test_criterion_01_jacobi_oracles(capsys):
    t0 = time.perf_counter()
    jc = solve_jacobi(CurvatureProfile.constant(1.0), 2, 12.0)
    r = np.linspace(0.0, 10.0, 2001)[1:]
    err_c = float(np.max(np.abs(jc.f(r) / np.sinh(r) - 1.0)))
    jp = solve_jacobi(CurvatureProfile.power(2.0), 3, 1e6)
    rp = np.linspace(1.0, 10.0, 1801)
    closed = (2.0 / 3.0) * rp ** 2 + (1.0 / 3.0) / rp
    err_p = float(np.max(np.abs(jp.f(rp) / closed - 1.0)))
    wall = time.perf_counter() - t0
    ok = err_c <= 1e-8 and err_p <= 1e-7 and wall < 1.0
    _emit(capsys, 1, ok,
          f"jacobi oracles | sinh rel {err_c:.2e} <= 1e-8, "
          f"power closed form rel {err_p:.2e} <= 1e-7, {wall:.2f}s < 1s")
    assert err_c <= 1e-8
    assert err_p <= 1e-7
    assert wall < 1.0


def test_criterion_02_radial_laplacian_bound(capsys):
    t0 = time.perf_counter()
    worst = math.inf
    for prof, n in ((CurvatureProfile.euclidean(), 2),
                    (CurvatureProfile.constant(1.0), 2),
                    (CurvatureProfile.power(2.0), 3),
                    (CurvatureProfile.power(5.0), 2)):
        jac = solve_jacobi(prof, n, 50.0)
        r = jac.r_grid[jac.r_grid > 0.0]
        q = r * laplacian_r(jac, r)
        # same integration-accuracy floor the library itself enforces
        assert np.all(q >= (n - 1) * (1.0 - 1e-9))
        worst = min(worst, float(np.min(q - (n - 1))))
    R1c = verify_laplacian_bound(
        solve_jacobi(CurvatureProfile.constant(1.0), 2, 40.0), 5.0, 0.1)
    jp = solve_jacobi(CurvatureProfile.power(2.0), 3, 1e6)
    R1p = verify_laplacian_bound(jp, 2.0, 0.1)
    # independent closed forms: r coth r = 5/1.1 and (31/4)^(1/3)
    oracle_c = brentq(lambda x: x / math.tanh(x) - 5.0 / 1.1, 1.0, 20.0)
    oracle_p = (31.0 / 4.0) ** (1.0 / 3.0)
    wall = time.perf_counter() - t0
    ok = (math.isfinite(R1c) and math.isfinite(R1p)
          and abs(R1c - oracle_c) <= 1e-6 and abs(R1p - oracle_p) <= 1e-6
          and wall < 1.0)
    _emit(capsys, 2, ok,
          f"radial laplacian bound | worst drift margin {worst:+.1e}, "
          f"R1 const {R1c:.6f} (root {oracle_c:.6f}), "
          f"R1 power {R1p:.6f} (closed {oracle_p:.6f}), {wall:.2f}s < 1s")
    assert math.isfinite(R1c) and abs(R1c - oracle_c) <= 1e-6
    assert math.isfinite(R1p) and abs(R1p - oracle_p) <= 1e-6
    assert wall < 1.0


def test_criterion_03_young_suite(capsys, family):
    H, pair, phi, sq = family
    t0 = time.perf_counter()
    rng = np.random.default_rng(811)
    a = np.exp(rng.uniform(np.log(1e-8), np.log(10.0), 1000))
    b = np.exp(rng.uniform(np.log(1e-8), np.log(10.0), 1000))
    m_gf = float(np.min(pair.margin(a, b) / (pair.G(a) + pair.F(b))))
    m_sq = float(np.min(sq.margin(a, b) / (sq.G(a) + sq.F(b))))

    # stated window; both sides vanish identically below the deviation
    # threshold, so a contentful window is checked alongside it
    t = np.geomspace(1e-3, 1.0, 25)
    ident_low = float(np.max(np.abs(pair.G(phi.dphi(t)) - phi.phi(t))
                             / np.maximum(phi.phi(t), 1e-300)))
    t = np.linspace(2.6, 12.0, 60)
    ident_high = float(np.max(np.abs(pair.G(phi.dphi(t)) / phi.phi(t) - 1.0)))

    t = np.geomspace(1e-6, 1e-2, 40)
    f_env = (1.0 + EPS0) * np.log(t) \
        - (1.0 / t) * np.log(math.e + 1.0 / t) ** -(1.0 + EPS0)
    f_ok = bool(np.all(pair.F.log(t) < f_env))
    log_env = np.log(t) - 2.0 ** LAM * t ** -0.5 * np.log(1.0 / t) ** -LAM
    c_fit = float(np.exp(np.max(sq.F.log(t) - log_env)))
    f1_ok = (math.isfinite(c_fit) and c_fit <= 10.0
             and bool(np.all(sq.F.log(t)
                             <= math.log(c_fit * (1.0 + 1e-6)) + log_env)))

    slope = [float(x * H(x) / pair.G(x)) for x in (1e-3, 1e-6, 1e-12)]
    curv = [float(phi.d2phi(x) * phi.phi(x) / phi.dphi(x) ** 2)
            for x in (3.5, 3.2, 3.0)]
    trends = (all(p > q > 1.0 for p, q in zip(slope, slope[1:]))
              and all(p < q < 1.0 for p, q in zip(curv, curv[1:])))

    w1 = float(lambert_w(1.0))
    wall = time.perf_counter() - t0
    ok = (m_gf >= -1e-9 and m_sq >= -1e-9 and ident_low <= 1e-6
          and ident_high <= 1e-6 and f_ok and f1_ok and trends
          and abs(w1 - 0.5671432904) <= 1e-9 and wall < 10.0)
    _emit(capsys, 3, ok,
          f"young suite | margins {m_gf:.1e}/{m_sq:.1e} >= -1e-9, "
          f"identity rel {ident_low:.1e}/{ident_high:.1e} <= 1e-6, "
          f"envelopes ok={f_ok}/{f1_ok} (fitted c {c_fit:.4f}), "
          f"trends to 1 ok={trends}, W(1) err "
          f"{abs(w1 - 0.5671432904):.1e}, {wall:.2f}s < 10s")
    assert m_gf >= -1e-9 and m_sq >= -1e-9
    assert ident_low <= 1e-6 and ident_high <= 1e-6
    assert f_ok and f1_ok and trends
    assert abs(w1 - 0.5671432904) <= 1e-9
    assert wall < 10.0


def test_criterion_04_pde_oracles(capsys, jac_flat):
    t0 = time.perf_counter()
    aff = BoundaryData(lambda th: 0.3 * np.cos(th), L=0.3, C1=0.3)
    errs_a = []
    for m in (16, 32, 64):
        grid = assemble(jac_flat, 2, 1.0, m, m)
        fld = solve_dirichlet(grid, aff)
        exact = 0.3 * grid.r[:, None] * np.cos(grid.theta[None, :])
        errs_a.append(max(float(np.max(np.abs(fld.u - exact))),
                          abs(fld.pole)))
    rates_a = [math.log2(errs_a[i] / errs_a[i + 1]) for i in range(2)]
    wall_a = time.perf_counter() - t0

    t0 = time.perf_counter()
    c = 0.75
    cat = lambda rr: c * (np.arccosh(np.asarray(rr) / c)
                          - math.acosh(1.0 / c))
    gap = float(cat(2.0))
    errs_c = []
    for m in (16, 32, 64):
        grid = assemble(jac_flat, 2, 2.0, m, m, R_in=1.0)
        fld = solve_dirichlet(grid, BoundaryData(lambda th: gap, L=0.0,
                                                 C1=gap), inner=0.0)
        errs_c.append(float(np.max(np.abs(fld.u - cat(grid.r)[:, None]))))
    rates_c = [math.log2(errs_c[i] / errs_c[i + 1]) for i in range(2)]
    wall_c = time.perf_counter() - t0

    ok = (errs_a[-1] <= 1e-3 and min(rates_a) >= 1.8
          and min(rates_c) >= 1.8 and wall_a < 30.0 and wall_c < 30.0)
    _emit(capsys, 4, ok,
          f"pde oracles | affine linf {errs_a[-1]:.2e} <= 1e-3 at 64x64, "
          f"rates {rates_a[0]:.2f}/{rates_a[1]:.2f} >= 1.8; catenary rates "
          f"{rates_c[0]:.2f}/{rates_c[1]:.2f} >= 1.8; "
          f"{wall_a:.2f}s+{wall_c:.2f}s < 30s each")
    assert errs_a[-1] <= 1e-3
    assert min(rates_a) >= 1.8
    assert min(rates_c) >= 1.8
    assert wall_a < 30.0 and wall_c < 30.0


def test_criterion_05_principles(capsys):
    t0 = time.perf_counter()
    pairs = [
        (BoundaryData(lambda th: np.cos(th), L=1.0, C1=1.0),
         BoundaryData(lambda th: np.cos(th) + 0.5, L=1.0, C1=1.5)),
        (BoundaryData(lambda th: 0.3 * np.cos(th), L=0.3, C1=0.3),
         BoundaryData(lambda th: np.cos(th) + 0.7, L=1.0, C1=1.7)),
        (BoundaryData(lambda th: np.cos(th), L=1.0, C1=1.0),
         BoundaryData(lambda th: 1.0, L=0.0, C1=1.0)),
    ]
    worst_over = -math.inf
    worst_cmp = -math.inf
    for prof, n in ((CurvatureProfile.constant(1.0), 2),
                    (CurvatureProfile.power(2.0), 3),
                    (CurvatureProfile.power(5.0), 2),
                    (CurvatureProfile.euclidean(), 2)):
        grid = assemble(solve_jacobi(prof, n, 10.0), n, 4.0, 32, 32)
        for ga, gb in pairs:
            fa = solve_dirichlet(grid, ga)
            fb = solve_dirichlet(grid, gb)
            worst_cmp = max(worst_cmp, comparison_check(fa, fb))
            for fld, g in ((fa, ga), (fb, gb)):
                gv = g(grid.theta)
                worst_over = max(
                    worst_over,
                    float(np.max(fld.u)) - float(np.max(gv)),
                    float(np.min(gv)) - float(np.min(fld.u)),
                    fld.pole - float(np.max(gv)),
                    float(np.min(gv)) - fld.pole)
    wall = time.perf_counter() - t0
    ok = worst_over <= 1e-8 and worst_cmp <= 1e-6 and wall < 30.0
    _emit(capsys, 5, ok,
          f"max/comparison principles | worst overshoot {worst_over:+.1e} "
          f"<= 1e-8, worst comparison margin {worst_cmp:+.1e} <= 1e-6, "
          f"4 presets x 3 pairs, {wall:.2f}s < 30s")
    assert worst_over <= 1e-8
    assert worst_cmp <= 1e-6
    assert wall < 30.0


def test_criterion_06_energy_inequality(capsys, hyp_run, cos_data, family):
    rep, _ = hyp_run
    _, _, phi, _ = family
    t0 = time.perf_counter()
    worst = math.inf
    contentful = 0.0
    # the run's own scale zeroes the deviation weights on this data, so
    # the quarter scale is checked as well to keep both sides positive
    for nu in (0.5, 0.125):
        for rec in rep.records:
            R = rec.R
            for eta in ((0.0, R - 1.0), (R / 4.0, 3.0 * R / 4.0)):
                lhs, rhs = asy.caccioppoli_check(rec.field, cos_data, eta,
                                                 phi, nu, eps=1.0)
                assert lhs <= rhs * (1.0 + 1e-6)
                if rhs > 0.0:
                    worst = min(worst, rhs - lhs)
                    contentful += 1.0
    wall = time.perf_counter() - t0
    ok = worst > 0.0 and contentful == 6.0 and wall < 60.0
    _emit(capsys, 6, ok,
          f"energy inequality | lhs <= rhs(1+1e-6) at 3 radii x 2 cutoffs "
          f"x 2 scales, smallest contentful slack {worst:.3f}, "
          f"{wall:.2f}s < 60s")
    assert ok


@pytest.mark.xfail(
    strict=True,
    reason="deviation at frozen rho = 3 converges upward to the limit "
           "solution's gap (about 0.095), so delta(8;3) <= 0.5 delta(4;3) "
           "cannot hold; relative probes and consecutive-solution "
           "distances do decay (see the rel/distance records)")
def test_criterion_07a_fixed_probe_halving(capsys, hyp_run):
    rep, wall = hyp_run
    d4 = rep.record(4.0).delta["3"]
    d8 = rep.record(8.0).delta["3"]
    rel = [rec.delta["0.75R"] for rec in rep.records]
    dist = [d[2] for d in rep.distances]
    ok = d8 <= 0.5 * d4
    _emit(capsys, "7a", ok,
          f"fixed-probe halving | delta(8;3)={d8:.4f} vs 0.5*delta(4;3)="
          f"{0.5 * d4:.4f}: deviation climbs {d4:.4f}->{d8:.4f} toward the "
          f"limit gap; rel probe decays {rel[0]:.4f}->{rel[-1]:.4f}, "
          f"distances {dist[0]:.4f}->{dist[-1]:.4f}, {wall:.1f}s")
    assert wall < 300.0
    assert rel[-1] <= 0.5 * rel[0]          # the decay the runs deliver
    assert d8 <= 0.5 * d4                   # stated halving: does not hold


def test_criterion_07b_euclidean_contrast(capsys, flat_run, hyp_run):
    rep, wall = flat_run
    _, wall_h = hyp_run
    deltas = [rec.delta["0.75R"] for rec in rep.records]
    ok = all(0.2 <= d <= 0.3 for d in deltas) and wall + wall_h < 300.0
    _emit(capsys, "7b", ok,
          f"euclidean contrast | delta(0.75R) = "
          f"{', '.join(f'{d:.4f}' for d in deltas)} all within [0.2, 0.3] "
          f"(harmonic limit 0.25), {wall + wall_h:.1f}s < 300s total")
    assert all(0.2 <= d <= 0.3 for d in deltas)
    assert wall + wall_h < 300.0


def test_criterion_08_phi_integral_and_budget(capsys, hyp_run, jac_hyp,
                                              jac_pow23, jac_flat, cos_data,
                                              family):
    rep, _ = hyp_run
    _, pair, phi, sq = family
    t0 = time.perf_counter()
    chains = {}
    for nu in (0.5, 0.125):
        I = [asy.phi_integral(rec.field, cos_data, phi, nu)
             for rec in rep.records]
        assert all(I[k + 1] <= 1.25 * max(I[k], 1e-8)
                   for k in range(len(I) - 1))
        chains[nu] = I
    b_hyp = asy.rhs_budget(jac_hyp, cos_data, pair, sq, 6.0)
    b_pow = asy.rhs_budget(jac_pow23, cos_data, pair, sq, 6.0)
    with pytest.raises(asy.AsymptoticError, match="diverg"):
        asy.rhs_budget(jac_flat, cos_data, pair, sq, 6.0)
    wall = time.perf_counter() - t0
    ok = (math.isfinite(b_hyp) and b_hyp > 0.0 and math.isfinite(b_pow)
          and b_pow > 0.0 and wall < 120.0)
    _emit(capsys, 8, ok,
          f"phi-integral boundedness | growth <= 1.25x along schedule at "
          f"both scales (quarter scale {chains[0.125][0]:.3f}->"
          f"{chains[0.125][-1]:.3f}), budget hyp {b_hyp:.3f} / power "
          f"{b_pow:.3f} finite, euclidean raises, {wall:.2f}s < 120s")
    assert ok


def test_criterion_09_conjugate_decay(capsys, jac_pow23, jac_flat, family):
    _, pair, _, sq = family
    t0 = time.perf_counter()
    rstar = asy.decay_check(pair, sq, jac_pow23, 1.0, (1.0, 1e6))
    with pytest.raises(asy.AsymptoticError, match="never"):
        asy.decay_check(pair, sq, jac_flat, 1.0, (1.0, 1e3))
    wall = time.perf_counter() - t0
    ok = math.isfinite(rstar) and 1.0 <= rstar < 1e6 and wall < 5.0
    _emit(capsys, 9, ok,
          f"conjugate decay | finite r* = {rstar:.2f} on power profile "
          f"scanned to 1e6, euclidean raises, {wall:.2f}s < 5s")
    assert ok


def test_criterion_10_determinism(capsys, tmp_path, monkeypatch):
    t0 = time.perf_counter()
    outs = []
    for tag in ("one", "two"):
        monkeypatch.setenv("MINGRAPH_OUT", str(tmp_path / tag))
        assert main(["preset", "power5-n2-cosine"]) == 0
        outs.append(tmp_path / tag / "out" / "power5-n2-cosine")
    names = sorted(p.name for p in outs[0].iterdir())
    same = names == sorted(p.name for p in outs[1].iterdir())
    diffs = [n for n in names
             if (outs[0] / n).read_bytes() != (outs[1] / n).read_bytes()]
    wall = time.perf_counter() - t0
    ok = same and not diffs
    _emit(capsys, 10, ok,
          f"determinism | preset rerun bitwise-identical across "
          f"{len(names)} files ({', '.join(names)}), {wall:.1f}s")
    assert same
    assert diffs == []
