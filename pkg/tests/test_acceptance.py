"""Acceptance suite: one test per criterion, each at its stated tolerance.

Every test prints a single PASS line when it succeeds (run pytest -s to see
them). Randomness comes from the package's own 64-bit LCG so the values are
reproducible across platforms.
"""

import json
import math
import time

import numpy as np
import pytest

from phiharm import cli
from phiharm import cohomology as coh
from phiharm import groups as gr
from phiharm import nfunction as nfn
from phiharm import orlicz as orl
from phiharm import phi_laplacian as pl
from phiharm import solver as sv
from phiharm.rng import Lcg64

from oracles import dense_harmonic_p2, lp_norm


def lcg_array(rng: Lcg64, n: int, lo=-1.0, hi=1.0) -> np.ndarray:
    return np.array(rng.uniforms(n, lo, hi))


def test_criterion_01_norm_sandwich():
    start = time.monotonic()
    rng = Lcg64(1)
    vectors = []
    for _ in range(1000):
        n = 1 + (rng.next_u64() % 64)
        vectors.append(lcg_array(rng, int(n), -2.0, 2.0))
    nfs = [nfn.power(2), nfn.power(3), nfn.cosh_nf(), nfn.plog(2)]
    for nf in nfs:
        for values in vectors:
            gauge, orlicz, ok = orl.sandwich_check(
                nf, orl.finite_function(values), tol=1e-9)
            assert ok, (nf.spec_string, gauge, orlicz)
    elapsed = time.monotonic() - start
    assert elapsed < 10.0, f"runtime {elapsed:.1f}s exceeds 10s"
    print(f"\nACCEPTANCE 1 (norm sandwich, 1000 vectors x 4 N-functions, "
          f"{elapsed:.1f}s): PASS")


def test_criterion_02_lp_recovery():
    rng = Lcg64(2)
    for p in (1.5, 2.0, 3.0):
        nf = nfn.power_norm(p)
        for _ in range(100):
            n = 1 + (rng.next_u64() % 32)
            values = lcg_array(rng, int(n), -3.0, 3.0)
            got = orl.luxemburg_norm(nf, orl.finite_function(values))
            expect = lp_norm(values, p)
            assert got == pytest.approx(expect, rel=1e-8), (p, got, expect)
    print("\nACCEPTANCE 2 (Luxemburg recovers lp for p in {1.5, 2, 3}): PASS")


def test_criterion_03_young_inequality_numerical_conjugate():
    for nf in (nfn.cosh_nf(), nfn.plog(2)):
        psi = nfn.numerical_complementary(nf)
        a_grid = np.linspace(0.0, 3.0, 100)
        b_grid = np.linspace(0.0, nfn.eval_dphi(nf, 3.0), 100)
        min_gap = math.inf
        for a in a_grid:
            phi_a = nfn.eval_phi(nf, float(a))
            for b in b_grid:
                gap = phi_a + nfn.eval_phi(psi, float(b)) - a * b
                min_gap = min(min_gap, gap)
        assert min_gap >= -1e-9, (nf.spec_string, min_gap)
        eq_worst = max(
            abs(nfn.eval_phi(nf, float(a)) +
                nfn.eval_phi(psi, nfn.eval_dphi(nf, float(a))) -
                a * nfn.eval_dphi(nf, float(a)))
            for a in a_grid)
        assert eq_worst <= 1e-6, (nf.spec_string, eq_worst)
    print("\nACCEPTANCE 3 (Young gap >= -1e-9 on 100x100 grids; equality "
          "case <= 1e-6 with numerical conjugates): PASS")


def test_criterion_04_gateaux_identity():
    ball = gr.build_ball("free:2", 3)
    form = pl.DirichletForm(nfn.cosh_nf(), ball)
    rng = Lcg64(4)
    f = lcg_array(rng, ball.n_vertices, -0.04, 0.04)
    g = np.where(ball.interior,
                 lcg_array(rng, ball.n_vertices, -0.04, 0.04), 0.0)
    table = pl.gateaux_check(form, f, g, [1e-3, 1e-4, 1e-5])
    errs = [err for _, err in table]
    assert errs[0] / errs[1] >= 5.0, errs
    assert errs[1] / errs[2] >= 5.0, errs
    scale = 1.0 + abs(pl.pairing(form, f, g))
    assert errs[2] <= 1e-6 * scale, (errs[2], scale)
    print(f"\nACCEPTANCE 4 (derivative identity: errors {errs[0]:.2e} -> "
          f"{errs[1]:.2e} -> {errs[2]:.2e}): PASS")


def test_criterion_05_indicator_pairing_identity():
    cases = [("z:2", 5, nfn.cosh_nf()), ("free:2", 4, nfn.power(3))]
    rng = Lcg64(5)
    for spec, radius, nf in cases:
        ball = gr.build_ball(spec, radius)
        form = pl.DirichletForm(nf, ball)
        interior = ball.interior_indices()
        for _ in range(50):
            h = lcg_array(rng, ball.n_vertices)
            lap = pl.laplacian_interior(form, h)
            pair = pl.pairing_with_indicators(form, h)
            for x in interior:
                lhs = pair[x]
                rhs = lap[x]
                assert abs(lhs + 2.0 * rhs) <= 1e-12 * (1.0 + abs(rhs)), \
                    (spec, int(x), lhs, rhs)
    # spot check that the scattered values equal the literal pairing op
    delta = np.zeros(ball.n_vertices)
    delta[int(interior[0])] = 1.0
    assert pair[int(interior[0])] == pytest.approx(
        pl.pairing(form, h, delta), abs=1e-12)
    print("\nACCEPTANCE 5 (pairing against indicators = -2 Laplacian, 50 "
          "functions x all interior vertices on z:2@5 and free:2@4): PASS")


def _criterion6_cases():
    return [("z:1", 16), ("z:2", 8), ("free:2", 5)], \
           [nfn.power(2), nfn.power(3), nfn.cosh_nf()]


def test_criterion_06_decomposition():
    start = time.monotonic()
    cfg_a = sv.SolverConfig(tol_residual=1e-12)
    cfg_b = sv.SolverConfig(tol_residual=1e-12, init="copy_f")
    specs, nfs = _criterion6_cases()
    seed = 6
    for spec, radius in specs:
        ball = gr.build_ball(spec, radius)
        f = ball.function(lcg_array(Lcg64(seed), ball.n_vertices))
        seed += 1
        for nf in nfs:
            form = pl.DirichletForm(nf, ball)
            dec = sv.decompose(form, f, cfg_a)
            assert dec.converged and dec.residual <= 1e-8, \
                (spec, nf.spec_string, dec.residual)
            dev = sv.verify_uniqueness(form, f, cfg_a, cfg_b)
            assert dev <= 1e-6, (spec, nf.spec_string, dev)
            if nf.params.get("p") == 2.0 and nf.name == "power":
                oracle = dense_harmonic_p2(ball, f.values)
                assert np.max(np.abs(dec.h.values - oracle)) <= 1e-8, \
                    (spec, "dense oracle")
    # the 0/1 boundary on the z-ball returns the linear ramp for every nf
    ball = gr.build_ball("z:1", 16)
    bvals = np.zeros(ball.n_vertices)
    bvals[ball.index[(16,)]] = 1.0
    ramp = np.array([(x[0] + 16) / 32.0 for x in ball.elements])
    for nf in nfs:
        form = pl.DirichletForm(nf, ball)
        h = sv.harmonic_extension(form, ball.function(bvals), cfg_a)
        assert np.max(np.abs(h.values - ramp)) <= 1e-8, nf.spec_string
    elapsed = time.monotonic() - start
    assert elapsed < 120.0, f"runtime {elapsed:.1f}s exceeds 2 min"
    print(f"\nACCEPTANCE 6 (decomposition on 3 balls x 3 N-functions, "
          f"uniqueness, dense-solve oracle, ramps; {elapsed:.1f}s): PASS")


def test_criterion_07_strict_monotonicity():
    rng = Lcg64(7)
    cases = [("free:2", 3, nfn.cosh_nf(), 50), ("z:2", 3, nfn.power(3), 50)]
    for spec, radius, nf, count in cases:
        ball = gr.build_ball(spec, radius)
        form = pl.DirichletForm(nf, ball)
        for _ in range(count):
            f1 = lcg_array(rng, ball.n_vertices)
            f2 = lcg_array(rng, ball.n_vertices)
            d = f1 - f2
            gap = pl.pairing(form, f1, d) - pl.pairing(form, f2, d)
            assert gap > 0.0, (spec, nf.spec_string)
        f1 = lcg_array(rng, ball.n_vertices)
        f2 = f1 + 0.73
        d = f1 - f2
        gap = pl.pairing(form, f1, d) - pl.pairing(form, f2, d)
        scale = 1.0 + abs(pl.pairing(form, f1, d)) + abs(pl.pairing(form, f2, d))
        assert abs(gap) <= 1e-12 * scale
    print("\nACCEPTANCE 7 (strict monotonicity of the pairing, 100 pairs; "
          "equality on constant differences): PASS")


@pytest.fixture(scope="module")
def capacity_values():
    values = {}
    for nf in (nfn.power(2), nfn.cosh_nf()):
        for radius in (4, 8, 16, 32):
            values[("z:1", radius, nf.spec_string)] = \
                coh.capacity("z:1", radius, nf).value
        for radius in range(2, 8):
            values[("free:2", radius, nf.spec_string)] = \
                coh.capacity("free:2", radius, nf).value
    nf = nfn.power_norm(2)
    for radius in (4, 8, 16, 32):
        values[("z:1", radius, nf.spec_string)] = \
            coh.capacity("z:1", radius, nf).value
    nf = nfn.power(2)
    for radius in (1, 2, 3, 4):
        values[("lamplighter", radius, nf.spec_string)] = \
            coh.capacity("lamplighter", radius, nf).value
    return values


def test_criterion_08_capacity_oracle(capacity_values):
    for radius in (4, 8, 16, 32):
        got = capacity_values[("z:1", radius, "power_norm:p=2")]
        assert got == pytest.approx(4.0 / radius, abs=1e-6), radius
    for group, radii, nf in (
            ("z:1", (4, 8, 16, 32), "power:p=2"),
            ("z:1", (4, 8, 16, 32), "cosh"),
            ("z:1", (4, 8, 16, 32), "power_norm:p=2"),
            ("free:2", range(2, 8), "power:p=2"),
            ("free:2", range(2, 8), "cosh"),
            ("lamplighter", (1, 2, 3, 4), "power:p=2")):
        vals = [capacity_values[(group, r, nf)] for r in radii]
        for a, b in zip(vals, vals[1:]):
            assert b <= a + 1e-9, (group, nf, vals)
    print("\nACCEPTANCE 8 (capacity(z:1, R) = 4/R to 1e-6; monotone "
          "non-increasing for every tested group): PASS")


def test_criterion_09_dichotomy_trend(capacity_values):
    start = time.monotonic()
    for nf in ("power:p=2", "cosh"):
        z_ratio = capacity_values[("z:1", 32, nf)] / \
            capacity_values[("z:1", 4, nf)]
        f_ratio = capacity_values[("free:2", 7, nf)] / \
            capacity_values[("free:2", 2, nf)]
        assert z_ratio <= 0.2, (nf, z_ratio)
        assert f_ratio >= 0.5, (nf, f_ratio)
        cross_late = capacity_values[("z:1", 32, nf)] / \
            capacity_values[("free:2", 7, nf)]
        cross_early = capacity_values[("z:1", 4, nf)] / \
            capacity_values[("free:2", 2, nf)]
        assert cross_late < cross_early, (nf, cross_late, cross_early)
    elapsed = time.monotonic() - start
    assert elapsed < 180.0
    print("\nACCEPTANCE 9 (capacity decay on z:1 vs stabilization on free:2, "
          "power(2) and cosh): PASS")


def test_criterion_10_cocycle_suite():
    ball = gr.build_ball("free:2", 4)
    form = pl.DirichletForm(nfn.power(2), ball)
    rng = Lcg64(10)
    short = [ball.elements[i] for i in range(ball.n_vertices)
             if ball.depth[i] <= 2]
    worst = 0.0
    for _ in range(200):
        f = ball.function(lcg_array(rng, ball.n_vertices))
        b = coh.alpha(ball, f)
        g = short[rng.next_u64() % len(short)]
        h = short[rng.next_u64() % len(short)]
        worst = max(worst, coh.cocycle_check(b, g, h))
    assert worst <= 1e-12, worst

    v0 = np.where(ball.interior, lcg_array(rng, ball.n_vertices), 0.0)
    b0 = coh.alpha(ball, ball.function(v0))
    res = coh.coboundary_distance(b0, form, sv.SolverConfig(tol_residual=1e-12))
    assert res.modular_residual <= 1e-10, res.modular_residual
    assert res.norm_residual <= 1e-10, res.norm_residual

    f = ball.function(lcg_array(rng, ball.n_vertices))
    good = coh.alpha(ball, f)
    bad = coh.Cocycle(ball, {k: v.copy() for k, v in good.values.items()},
                      {k: m.copy() for k, m in good.masks.items()}, "explicit")
    bad.values["a"][ball.index["a"]] += 0.01
    violation = max(coh.cocycle_check(bad, g, h)
                    for g in short[:10] for h in short[:10])
    assert violation >= 1e-3, violation
    print(f"\nACCEPTANCE 10 (cocycle identity <= 1e-12 on 200 draws; exact "
          f"coboundary <= 1e-10; corrupted control {violation:.2e} >= 1e-3): "
          "PASS")


def test_criterion_11_determinism(tmp_path):
    # criterion-6-style decompose and criterion-9-style capacity cells,
    # re-run with identical configs and seeds: byte-identical JSON
    outputs = []
    for name in ("a", "b"):
        path = tmp_path / f"dec_{name}.json"
        assert cli.main(["decompose", "--group", "z:2", "--radius", "8",
                         "--nf", "cosh", "--boundary", "random",
                         "--seed", "42", "--tol-residual", "1e-12",
                         "--out", str(path), "--quiet"]) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]

    for nf in ("power:p=2", "cosh"):
        for group, radii in (("z:1", "4,32"), ("free:2", "2,7")):
            pair = []
            for name in ("a", "b"):
                path = tmp_path / f"cap_{group.replace(':', '')}_{nf[:4]}_{name}.json"
                assert cli.main(["experiment", "--kind", "capacity_trend",
                                 "--groups", group, "--radii", radii,
                                 "--nf", nf, "--seed", "0",
                                 "--out-json", str(path), "--quiet"]) == 0
                pair.append(path.read_bytes())
            assert pair[0] == pair[1]
            data = json.loads(pair[0])
            assert all(row["converged"] for row in data["rows"])
    print("\nACCEPTANCE 11 (repeated seeded runs byte-identical): PASS")
