"""Exact-oracle self-test suite: fast deterministic checks of the core
identities, runnable from the command line."""

from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import connectivity as conn
from . import estimate as est
from . import explore as expl
from . import oracle as orc
from .config import Color, config_from_bits, sample_config, trial_seed
from .lattice import annulus, build_region, parallelogram


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _check_duality():
    region = build_region(parallelogram(3, 3))
    bad = 0
    for m in range(1 << region.n):
        lr, tb = conn.parallelogram_duality(config_from_bits(region, m))
        if lr == tb:
            bad += 1
    p = orc.exact_event_probability(conn.parallelogram_crossing(3, 3))
    ok = bad == 0 and p == Fraction(1, 2)
    return ok, f"xor violations {bad}/512, P(blue LR) = {p}"


def _check_color_switch():
    eq = orc.color_switch_check(
        parallelogram(3, 6), 2, (Color.BLUE, Color.BLUE), (Color.BLUE, Color.YELLOW)
    )
    return eq, "P(B,B) == P(B,Y) on 3x6" if eq else "sequence probabilities differ"


def _check_menger():
    region = build_region(parallelogram(4, 3))
    bad = 0
    for m in range(1 << region.n):
        cfg = config_from_bits(region, m)
        flow = conn.max_disjoint_crossings(cfg, Color.BLUE, conn.Arc.LEFT, conn.Arc.RIGHT, 6)
        brute = orc.max_disjoint_paths_bruteforce(cfg, Color.BLUE, conn.Arc.LEFT, conn.Arc.RIGHT)
        if flow != brute:
            bad += 1
    return bad == 0, f"flow vs brute mismatches {bad}/4096"


def _check_nested():
    region = build_region(annulus(1, 3))
    ev = conn.ArmEvent(region.spec, conn.KIND_ONE_ARM)
    bad = 0
    for m in range(1 << region.n):
        cfg = config_from_bits(region, m)
        if expl.one_arm_nested(cfg) != conn.eval_event(cfg, ev):
            bad += 1
    return bad == 0, f"nested vs cluster mismatches {bad}/2^18"


def _check_fkg():
    a = conn.parallelogram_crossing(4, 4, Color.BLUE, "lr")
    b = conn.parallelogram_crossing(4, 4, Color.BLUE, "tb")
    pa, pb, pab = orc.exact_pair_probabilities(a, b)
    ok = pab >= pa * pb
    return ok, f"P(A&B)={float(pab):.6f} vs P(A)P(B)={float(pa * pb):.6f}"


def _check_submultiplicativity():
    full, lo, hi, viol = est.window_containment_trials(4, 8, 16, 1, 2000, 42, workers=1)
    ok = viol == 0 and full <= min(lo, hi)
    return ok, f"hits full/lo/hi = {full}/{lo}/{hi}, violations {viol}"


def _check_ep_containment():
    ep, poly, viol = est.ep_containment_trials(2, 16, (2, 3), 2000, 42, workers=1)
    ok = viol == 0 and all(int(e) <= int(h) for e, h in zip(ep, poly))
    return ok, f"ep hits {list(map(int, ep))} <= H_j hits {list(map(int, poly))}, violations {viol}"


def _check_detectors():
    region = build_region(annulus(2, 16))
    ev = conn.ArmEvent(region.spec, conn.KIND_ONE_ARM)
    bad = 0
    for t in range(2000):
        cfg = sample_config(region, 0.5, trial_seed(42, t))
        if expl.one_arm_nested(cfg) != conn.eval_event(cfg, ev):
            bad += 1
    return bad == 0, f"detector mismatches {bad}/2000 on Annulus(2,16)"


_CHECKS = [
    ("duality_half", _check_duality),
    ("color_switching", _check_color_switch),
    ("menger_bruteforce", _check_menger),
    ("nested_one_arm", _check_nested),
    ("fkg_positive_association", _check_fkg),
    ("submultiplicativity", _check_submultiplicativity),
    ("ep_containment", _check_ep_containment),
    ("one_arm_detectors", _check_detectors),
]


def run_selftest(verbose: bool = True):
    """Run all checks; returns the list of CheckResult."""
    results = []
    for name, fn in _CHECKS:
        t0 = time.time()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crash is a failure, not an abort
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        dt = time.time() - t0
        results.append(CheckResult(name, bool(ok), detail, dt))
        if verbose:
            mark = "PASS" if ok else "FAIL"
            print(f"  {mark}  {name:28s} {dt:7.1f}s  {detail}")
    return results
