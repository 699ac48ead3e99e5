"""Acceptance suite: every criterion at its stated budget and tolerance.

Each test prints one PASS/FAIL line (run pytest with -s to stream them).
The Monte Carlo criteria take tens of minutes combined at full budget.
"""

from fractions import Fraction

import numpy as np
import pytest

from percolab import connectivity as conn
from percolab import estimate as est
from percolab import explore as expl
from percolab import lattice as lat
from percolab import oracle as orc
from percolab.config import Color, config_from_bits, sample_config, trial_seed
from percolab.lattice import Arc

B, Y = Color.BLUE, Color.YELLOW

pytestmark = pytest.mark.acceptance


def report(num, ok, detail):
    print(f"ACCEPTANCE {num:>2}: {'PASS' if ok else 'FAIL'} - {detail}", flush=True)
    assert ok, f"criterion {num}: {detail}"


def test_01_duality_self_criticality():
    region = lat.build_region(lat.parallelogram(3, 3))
    xor_ok = True
    for m in range(512):
        lr, tb = conn.parallelogram_duality(config_from_bits(region, m))
        if lr == tb:
            xor_ok = False
            break
    p = orc.exact_event_probability(conn.parallelogram_crossing(3, 3, B, "lr"))
    report(1, xor_ok and p == Fraction(1, 2),
           f"P(blue LR on 3x3) = {p}, xor holds on all 512 configs: {xor_ok}")


def test_02_color_switching_3x6():
    eq = orc.color_switch_check(lat.parallelogram(3, 6), 2, (B, B), (B, Y))
    report(2, eq, "exact P(B,B) == P(B,Y) for 2 ordered crossings on 3x6 (2^18 configs)")


def test_03_menger_oracle_equivalence():
    region = lat.build_region(lat.parallelogram(4, 3))
    bad = 0
    for m in range(1 << 12):
        cfg = config_from_bits(region, m)
        if conn.max_disjoint_crossings(cfg, B, Arc.LEFT, Arc.RIGHT, 6) != \
                orc.max_disjoint_paths_bruteforce(cfg, B, Arc.LEFT, Arc.RIGHT):
            bad += 1
    semi = lat.build_region(lat.semi_annulus(1, 4.05))
    assert semi.n == 18
    bad2 = 0
    rng = np.random.RandomState(2024)
    for m in rng.randint(0, 1 << 18, size=10000):
        cfg = config_from_bits(semi, int(m))
        if conn.max_disjoint_crossings(cfg, B, Arc.INNER, Arc.OUTER, 9) != \
                orc.max_disjoint_paths_bruteforce(cfg, B, Arc.INNER, Arc.OUTER):
            bad2 += 1
    report(3, bad == 0 and bad2 == 0,
           f"flow==brute: 4096/4096 exhaustive ({bad} bad), 10^4 random 18-site ({bad2} bad)")


def test_04_nested_one_arm_equivalence():
    region = lat.build_region(lat.annulus(1, 3))
    assert region.n == 18
    ev = conn.ArmEvent(region.spec, conn.KIND_ONE_ARM)
    bad = 0
    for m in range(1 << 18):
        cfg = config_from_bits(region, m)
        if expl.one_arm_nested(cfg) != conn.eval_event(cfg, ev):
            bad += 1
    big = lat.build_region(lat.annulus(2, 16))
    ev2 = conn.ArmEvent(big.spec, conn.KIND_ONE_ARM)
    bad2 = 0
    for t in range(10000):
        cfg = sample_config(big, 0.5, trial_seed(77, t))
        if expl.one_arm_nested(cfg) != conn.eval_event(cfg, ev2):
            bad2 += 1
    report(4, bad == 0 and bad2 == 0,
           f"nested==clusters: 2^18 exhaustive ({bad} bad), 10^4 on Annulus(2,16) ({bad2} bad)")


def test_05_half_plane_one_arm():
    recs = est.sweep_scale(lambda R: conn.half_plane_arms(1, 4, R),
                           [16, 32, 64, 128, 256], 100000, 501)
    fit = est.fit_power_law(recs)
    ok = 0.283 <= fit.slope <= 0.383
    report(5, ok, f"G1 slope {fit.slope:.4f} +- {fit.stderr:.4f} in [0.283, 0.383], theory 1/3")


def test_06_half_plane_two_and_three_arms():
    recs2 = est.sweep_scale(lambda R: conn.half_plane_arms(2, 4, R),
                            [16, 32, 64, 128], 200000, 601)
    fit2 = est.fit_power_law(recs2)
    ok2 = 0.88 <= fit2.slope <= 1.12
    recs3 = est.sweep_scale(lambda R: conn.half_plane_arms(3, 4, R),
                            [16, 24, 32, 48], 1000000, 602)
    fit3 = est.fit_power_law(recs3)
    ok3 = 1.7 <= fit3.slope <= 2.3 and fit3.slope - 3 * fit3.stderr > 1
    report(6, ok2 and ok3,
           f"G2 slope {fit2.slope:.4f}+-{fit2.stderr:.4f} in [0.88,1.12]; "
           f"G3 slope {fit3.slope:.4f}+-{fit3.stderr:.4f} in [1.7,2.3], "
           f"slope-3se={fit3.slope - 3 * fit3.stderr:.3f} > 1")


def test_07_one_arm_exponent():
    recs = est.sweep_scale(conn.one_arm_event, [8, 16, 32, 64, 128, 256], 100000, 701)
    fit = est.fit_power_law(recs)
    ok = 0.079 <= fit.slope <= 0.129
    report(7, ok, f"one-arm slope {fit.slope:.4f} +- {fit.stderr:.4f} in [0.079, 0.129], theory 5/48")


def test_08_two_cluster_exponent():
    recs = est.sweep_scale(conn.two_clusters_event, [8, 16, 32, 64], 200000, 801)
    fit = est.fit_power_law(recs)
    ok = 1.10 <= fit.slope <= 1.40
    report(8, ok, f"two-cluster slope {fit.slope:.4f} +- {fit.stderr:.4f} in [1.10, 1.40], theory 5/4")


def test_09_plane_two_arm_polychromatic():
    recs = est.sweep_scale(lambda R: conn.polychromatic_arms(2, 2, R),
                           [8, 16, 32, 64, 128, 256], 100000, 901)
    fit = est.fit_power_law(recs)
    ok = 0.20 <= fit.slope <= 0.30
    report(9, ok, f"H2 slope {fit.slope:.4f} +- {fit.stderr:.4f} in [0.20, 0.30], theory 1/4")


def test_10_ep_containment():
    ep, poly, viol = est.ep_containment_trials(4, 64, (2, 3, 4), 10000, 1001)
    ok = viol == 0 and all(int(e) <= int(h) for e, h in zip(ep, poly))
    report(10, ok,
           f"ep=>H_j violations {viol}/10^4 on Annulus(4,64); "
           f"ep hits {list(map(int, ep))} <= H hits {list(map(int, poly))}")


def test_11_submultiplicativity():
    msgs = []
    ok = True
    for j in (1, 2):
        full, lo_h, hi_h, viol = est.window_containment_trials(4, 16, 64, j, 10000, 1100 + j)
        n = 10000
        p_full, p_lo, p_hi = full / n, lo_h / n, hi_h / n
        se = lambda p: (p * (1 - p) / n) ** 0.5
        prod = p_lo * p_hi
        prod_se = (se(p_lo) * p_hi) + (se(p_hi) * p_lo)
        bound = prod + 3 * (se(p_full) + prod_se)
        ok_j = viol == 0 and p_full <= bound
        ok = ok and ok_j
        msgs.append(f"j={j}: viol {viol}, p(4,64)={p_full:.4f} <= prod {prod:.4f} + 3se")
    report(11, ok, "; ".join(msgs))


def test_12_fkg():
    a = conn.parallelogram_crossing(4, 4, B, "lr")
    b = conn.parallelogram_crossing(4, 4, B, "tb")
    pa, pb, pab = orc.exact_pair_probabilities(a, b)
    ok = pab >= pa * pb
    report(12, ok, f"P(A&B) = {float(pab):.6f} >= P(A)P(B) = {float(pa * pb):.6f} on 16 sites (exact)")


def test_13_near_critical_exponents():
    recs = est.near_critical_sweep([0.53, 0.56, 0.60, 0.66, 0.72], 256, 20000, 1301)
    xs = [rec.p - 0.5 for rec in recs]

    def expfit(ys, usable):
        pts = [(x, y) for x, y, u in zip(xs, ys, usable) if y > 0 and u]
        slope, stderr, _, _ = est.wls_loglog([p[0] for p in pts], [p[1] for p in pts],
                                             [1.0] * len(pts))
        return -slope, stderr

    th, th_se = expfit([r.theta_hat for r in recs],
                       [min(r.theta_hits, r.trials - r.theta_hits) >= 20 for r in recs])
    ch, ch_se = expfit([r.chi_hat for r in recs], [r.finite_samples >= 20 for r in recs])
    xi, xi_se = expfit([r.xi_hat for r in recs], [r.finite_samples >= 20 for r in recs])
    ok_th = 0.08 <= th <= 0.20
    ok_ch = -2.9 <= ch <= -1.9
    ok_xi = -1.7 <= xi <= -1.0
    report(13, ok_th and ok_ch and ok_xi,
           f"theta {th:.3f} in [0.08,0.20] (5/36~0.139); chi {ch:.3f} in [-2.9,-1.9] "
           f"(-43/18~-2.389); xi {xi:.3f} in [-1.7,-1.0] (-4/3); finite-size proxy at L=256")


def test_14_determinism_across_workers(tmp_path):
    from percolab.cli import main

    outs = []
    for cmd in (["halfplane", "--j", "1", "--r", "4", "--R", "8,16,32",
                 "--trials", "2000", "--seed", "140"],
                ["onearm", "--R", "8,16,32", "--trials", "2000", "--seed", "141"],
                ["plane", "--j", "2", "--mode", "polychromatic", "--R", "8,16",
                 "--trials", "2000", "--seed", "142"],
                ["nearcrit", "--p", "0.6,0.7", "--L", "32", "--trials", "500",
                 "--seed", "143"]):
        pair = []
        for w, tag in ((1, "a"), (2, "b")):
            path = tmp_path / f"{cmd[0]}_{tag}.csv"
            rc = main(cmd + ["--workers", str(w), "--out", str(path)])
            assert rc == 0
            pair.append(path.read_bytes())
        outs.append(pair[0] == pair[1])
    report(14, all(outs), f"byte-identical CSV across worker counts for 4 commands: {outs}")


def test_15_fit_calibration():
    rng = np.random.RandomState(1500)
    trials = 200000
    Rs = [8, 16, 32, 64]
    good = 0
    for _ in range(100):
        recs = []
        for R in Rs:
            hits = rng.binomial(trials, R ** (-5 / 4))
            recs.append(est.EstimateRecord(
                event="synthetic", kind="annulus", j=0, r=1.0, R=float(R),
                trials=trials, hits=int(hits), p_hat=hits / trials,
                ci_lo=0.0, ci_hi=1.0, seed=0))
        fit = est.fit_power_law(recs)
        if abs(fit.slope - 1.25) <= 2 * fit.stderr:
            good += 1
    report(15, good >= 90, f"planted 5/4 recovered within 2se in {good}/100 repetitions")
