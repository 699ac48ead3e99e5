"""Monte Carlo trial engine, confidence intervals, and exponent fits.

Trial i of a run uses the configuration seed prf(master_seed, i), so hit
counts are identical for any worker count or chunking.  Worker processes
are forked and reduce per-chunk results in chunk order, which keeps float
accumulators byte-stable as well.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from ._rng import _prf, fill_uniforms
from .config import Color
from .connectivity import (
    KIND_ONE_ARM,
    ArmEvent,
    _eval_plan_kernel,
    _event_plan,
    _maxflow_kernel,
)
from .explore import _nested_kernel, _walk_kernel, _cached_flags, start_gate
from .lattice import Arc, annular_window, arc_sites, build_region, disc, semi_annulus

_CHUNK = 4096
_INV53 = 1.0 / (1 << 53)


def default_workers() -> int:
    env = os.environ.get("PERC_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# chunk kernels


@njit(cache=True)
def _chunk_static(
    n, nbr6, mode, want_blue, jk, src, dst_flag, dst_ids, mask,
    left, right_flag, bottom, bottom_flag, seq, p, master, lo, hi,
):
    blue = np.empty(n, np.bool_)
    hits = 0
    m = np.uint64(master)
    for t in range(lo, hi):
        tseed = _prf(m, np.uint64(t))
        for i in range(n):
            blue[i] = ((_prf(tseed, np.uint64(i)) >> np.uint64(11)) * _INV53) < p
        if _eval_plan_kernel(
            mode, want_blue, jk, blue, nbr6, src, dst_flag, dst_ids,
            mask, left, right_flag, bottom, bottom_flag, seq,
        ):
            hits += 1
    return hits


@njit(cache=True)
def _chunk_nested(
    n, nbr6, qs, rs, grid, qmin, rmin, W, H, lo2,
    inner_arc_flag, inner_adj_flag, p, master, lo, hi,
):
    blue = np.empty(n, np.bool_)
    hits = 0
    m = np.uint64(master)
    for t in range(lo, hi):
        tseed = _prf(m, np.uint64(t))
        for i in range(n):
            blue[i] = ((_prf(tseed, np.uint64(i)) >> np.uint64(11)) * _INV53) < p
        v = _nested_kernel(
            blue, nbr6, qs, rs, grid, qmin, rmin, W, H, lo2,
            inner_arc_flag, inner_adj_flag,
        )
        if v < 0:
            return -1
        hits += v
    return hits


@njit(cache=True)
def _chunk_ep_and_poly(
    n, nbr6, qs, rs, grid, qmin, rmin, W, H, lo2,
    gl_q, gl_r, gr_q, gr_r, src, dst_flag, js, p, master, lo, hi,
):
    """Per-trial: exploration crossings at disconnection, and the per-color
    disjoint-crossing counts; returns hit counts per j for the ep event and
    the polychromatic event, plus ep-not-poly violations."""
    blue = np.empty(n, np.bool_)
    mask = np.ones(n, np.uint8)
    touched = np.empty(n, np.uint8)
    rec = np.empty((1, 4), np.int32)
    rec_blue = np.empty(1, np.bool_)
    nj = js.size
    ep_hits = np.zeros(nj, np.int64)
    poly_hits = np.zeros(nj, np.int64)
    violations = 0
    jmax = 0
    for a in range(nj):
        if js[a] > jmax:
            jmax = js[a]
    m = np.uint64(master)
    for t in range(lo, hi):
        tseed = _prf(m, np.uint64(t))
        for i in range(n):
            blue[i] = ((_prf(tseed, np.uint64(i)) >> np.uint64(11)) * _INV53) < p
        status, crossings, _ = _walk_kernel(
            blue, mask, grid, qmin, rmin, W, H, lo2,
            gl_q, gl_r, gr_q, gr_r, False, touched, rec, rec_blue, 0,
        )
        if status != 2 and status != 3:  # must end at a disconnection
            return ep_hits, poly_hits, -1
        cap = jmax - 1 if jmax > 2 else 1
        mb = _maxflow_kernel(nbr6, blue, True, mask, src, dst_flag, cap)
        my = _maxflow_kernel(nbr6, blue, False, mask, src, dst_flag, cap)
        for a in range(nj):
            j = js[a]
            ep = crossings >= j
            poly = mb >= 1 and my >= 1 and mb + my >= j
            if ep:
                ep_hits[a] += 1
            if poly:
                poly_hits[a] += 1
            if ep and not poly:
                violations += 1
    return ep_hits, poly_hits, violations


@njit(cache=True)
def _chunk_windows(
    n, nbr6, j, src0, dstf0, mask0, src1, dstf1, mask1, src2, dstf2, mask2,
    p, master, lo, hi,
):
    """Shared-configuration flows on the full semi-annulus and two nested
    windows; counts hits and containment violations (full but not both)."""
    blue = np.empty(n, np.bool_)
    hits = np.zeros(3, np.int64)
    violations = 0
    m = np.uint64(master)
    for t in range(lo, hi):
        tseed = _prf(m, np.uint64(t))
        for i in range(n):
            blue[i] = ((_prf(tseed, np.uint64(i)) >> np.uint64(11)) * _INV53) < p
        full = _maxflow_kernel(nbr6, blue, True, mask0, src0, dstf0, j) >= j
        w1 = _maxflow_kernel(nbr6, blue, True, mask1, src1, dstf1, j) >= j
        w2 = _maxflow_kernel(nbr6, blue, True, mask2, src2, dstf2, j) >= j
        if full:
            hits[0] += 1
        if w1:
            hits[1] += 1
        if w2:
            hits[2] += 1
        if full and not (w1 and w2):
            violations += 1
    return hits, violations


@njit(cache=True)
def _chunk_nearcrit(n, nbr6, origin, outer_flag, r2f, ps, master, lo, hi):
    """Common-random-number sweep over p values; per p accumulates
    (theta hits, finite samples, sum N, sum N^2, sum M2, sum M2^2, sum N*M2)
    where N is the origin cluster size and M2 its squared-radius sum, both
    zero unless the origin is blue and counted only when the cluster avoids
    the boundary."""
    npv = ps.size
    theta = np.zeros(npv, np.int64)
    fin = np.zeros(npv, np.int64)
    s_n = np.zeros(npv, np.float64)
    s_nn = np.zeros(npv, np.float64)
    s_m = np.zeros(npv, np.float64)
    s_mm = np.zeros(npv, np.float64)
    s_nm = np.zeros(npv, np.float64)
    u = np.empty(n, np.float64)
    visited = np.zeros(n, np.int64)
    queue = np.empty(n, np.int32)
    stamp = 0
    m = np.uint64(master)
    for t in range(lo, hi):
        tseed = _prf(m, np.uint64(t))
        fill_uniforms(tseed, n, u)
        for ip in range(npv):
            p = ps[ip]
            if u[origin] >= p:
                continue  # origin yellow: empty cluster, contributes zeros
            stamp += 1
            visited[origin] = stamp
            queue[0] = origin
            head = 0
            tail = 1
            size = 0.0
            m2 = 0.0
            touched_boundary = False
            while head < tail:
                v = queue[head]
                head += 1
                if outer_flag[v]:
                    touched_boundary = True
                    break
                size += 1.0
                m2 += r2f[v]
                for k in range(6):
                    w = nbr6[v, k]
                    if w >= 0 and visited[w] != stamp and u[w] < p:
                        visited[w] = stamp
                        queue[tail] = w
                        tail += 1
            if touched_boundary:
                theta[ip] += 1
            else:
                fin[ip] += 1
                s_n[ip] += size
                s_nn[ip] += size * size
                s_m[ip] += m2
                s_mm[ip] += m2 * m2
                s_nm[ip] += size * m2
    return theta, fin, s_n, s_nn, s_m, s_mm, s_nm


# ---------------------------------------------------------------------------
# wilson interval and records


def wilson_ci(hits: int, trials: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if trials < 1 or not 0 <= hits <= trials:
        raise ValueError("need 0 <= hits <= trials, trials >= 1")
    if z <= 0:
        raise ValueError("z must be positive")
    phat = hits / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (phat + z2 / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z2 / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass
class EstimateRecord:
    event: str
    kind: str
    j: int
    r: float
    R: float
    trials: int
    hits: int
    p_hat: float
    ci_lo: float
    ci_hi: float
    seed: int
    L: float = 0.0
    p: float = 0.5

    @property
    def scale(self) -> float:
        return self.R


@dataclass
class ExponentFit:
    slope: float  # sign convention P ~ C * x^(-slope)
    stderr: float
    intercept: float
    chi2: float
    n_points: int
    records: list = field(default_factory=list)


@dataclass
class NearCriticalRecord:
    p: float
    L: float
    trials: int
    theta_hits: int
    theta_hat: float
    theta_ci: tuple
    chi_hat: float
    chi_ci: tuple
    xi_hat: float
    xi_ci: tuple
    finite_samples: int
    seed: int
    finite_size_proxy: bool = True


# ---------------------------------------------------------------------------
# trial running


def _chunks(trials: int):
    return [(lo, min(lo + _CHUNK, trials)) for lo in range(0, trials, _CHUNK)]


def _map_chunks(worker, args, trials, workers):
    spans = _chunks(trials)
    if workers <= 1 or len(spans) <= 1:
        return [worker(*args, lo, hi) for lo, hi in spans]
    import multiprocessing

    ctx = multiprocessing.get_context("fork")
    with ProcessPoolExecutor(max_workers=workers, mp_context=ctx) as pool:
        futs = [pool.submit(worker, *args, lo, hi) for lo, hi in spans]
        return [f.result() for f in futs]


def _static_chunk_worker(event: ArmEvent, p: float, master: int, lo: int, hi: int) -> int:
    region = build_region(event.spec)
    plan = _event_plan(event, region)
    return int(_chunk_static(region.n, region.nbr6, *plan, p, np.uint64(master), lo, hi))


def _nested_chunk_worker(event: ArmEvent, p: float, master: int, lo: int, hi: int) -> int:
    region = build_region(event.spec)
    inner_arc_flag, inner_adj_flag = _cached_flags(region)
    grid, qmin, rmin, W, H = region.grid
    hits = _chunk_nested(
        region.n, region.nbr6,
        region.qs.astype(np.int64), region.rs.astype(np.int64),
        grid, qmin, rmin, W, H, region.inner_cut2,
        inner_arc_flag, inner_adj_flag, p, np.uint64(master), lo, hi,
    )
    if hits < 0:
        raise RuntimeError("nested walk failed during trials")
    return int(hits)


def run_trials(
    event: ArmEvent,
    trials: int,
    master_seed: int,
    workers: int | None = None,
    p: float = 0.5,
    algorithm: str = "clusters",
) -> EstimateRecord:
    """Monte Carlo estimate of P[event] with a Wilson 95% interval.

    algorithm='nested' switches the one-arm detector to the nested
    exploration walk; both detectors give identical hits on identical seeds.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if workers is None:
        workers = default_workers()
    if algorithm not in ("clusters", "nested"):
        raise ValueError("algorithm must be 'clusters' or 'nested'")
    if algorithm == "nested" and event.kind != KIND_ONE_ARM:
        raise ValueError("the nested detector applies to one-arm events only")
    worker = _nested_chunk_worker if algorithm == "nested" else _static_chunk_worker
    hits = sum(_map_chunks(worker, (event, p, master_seed), trials, workers))
    lo, hi = wilson_ci(hits, trials)
    spec = event.spec
    return EstimateRecord(
        event=event.kind,
        kind=spec.kind,
        j=event.j,
        r=spec.r_inner,
        R=spec.r_outer,
        trials=trials,
        hits=hits,
        p_hat=hits / trials,
        ci_lo=lo,
        ci_hi=hi,
        seed=master_seed,
        p=p,
    )


def sweep_scale(event_fn, R_list, trials: int, master_seed: int, workers=None, **kw):
    """One record per R, with a distinct derived seed per scale."""
    R_list = list(R_list)
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R values must be strictly increasing")
    from ._rng import prf

    out = []
    for i, R in enumerate(R_list):
        out.append(run_trials(event_fn(R), trials, prf(master_seed, i), workers, **kw))
    return out


# ---------------------------------------------------------------------------
# weighted log-log fitting


def wls_loglog(xs, ys, weights):
    """Weighted least squares of log y on log x.

    Returns (slope, stderr, intercept, chi2) with the convention
    y ~ C * x^(-slope); weights are 1/Var(log y).
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    w = np.asarray(weights, float)
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    lx = np.log(xs)
    ly = np.log(ys)
    sw = w.sum()
    mx = (w * lx).sum() / sw
    my = (w * ly).sum() / sw
    sxx = (w * (lx - mx) ** 2).sum()
    sxy = (w * (lx - mx) * (ly - my)).sum()
    b = sxy / sxx
    a = my - b * mx
    resid = ly - (a + b * lx)
    chi2 = float((w * resid**2).sum())
    stderr = math.sqrt(1.0 / sxx)
    return float(-b), float(stderr), float(a), chi2


def fit_power_law(records, min_hits: int = 20) -> ExponentFit:
    """Fit P ~ C * R^(-slope) from estimate records.

    Only records with min_hits <= hits < trials enter the fit; the weight of
    a record is trials * p_hat / (1 - p_hat), the delta-method inverse
    variance of log p_hat.
    """
    usable = [rec for rec in records if min_hits <= rec.hits < rec.trials]
    if len(usable) < 3:
        detail = ", ".join(f"R={rec.R}: hits={rec.hits}/{rec.trials}" for rec in records)
        raise ValueError(f"need >= 3 usable records (hits >= {min_hits}); got: {detail}")
    xs = [rec.scale for rec in usable]
    ys = [rec.p_hat for rec in usable]
    ws = [rec.trials * rec.p_hat / (1.0 - rec.p_hat) for rec in usable]
    slope, stderr, intercept, chi2 = wls_loglog(xs, ys, ws)
    return ExponentFit(slope, stderr, intercept, chi2, len(usable), usable)


# ---------------------------------------------------------------------------
# near-critical sweeps


def _nearcrit_worker(L: float, ps: tuple, master: int, lo: int, hi: int):
    region = build_region(disc(L))
    origin = region.index[(0, 0)]
    outer_flag = np.zeros(region.n, np.uint8)
    outer_flag[arc_sites(region, Arc.OUTER)] = 1
    r2f = (
        region.qs.astype(np.float64) ** 2
        + region.qs.astype(np.float64) * region.rs
        + region.rs.astype(np.float64) ** 2
    )
    return _chunk_nearcrit(
        region.n, region.nbr6, origin, outer_flag, r2f,
        np.asarray(ps, np.float64), np.uint64(master), lo, hi,
    )


def near_critical_sweep(p_list, L: float, trials: int, master_seed: int, workers=None):
    """Per p: theta (origin cluster reaches the boundary of Disc(L)), and the
    finite-cluster proxies for chi and xi, with common random numbers across
    the p values within each trial."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if workers is None:
        workers = default_workers()
    ps = tuple(float(p) for p in p_list)
    parts = _map_chunks(_nearcrit_worker, (L, ps, master_seed), trials, workers)
    theta = sum(p[0] for p in parts)
    fin = sum(p[1] for p in parts)
    s_n = sum(p[2] for p in parts)
    s_nn = sum(p[3] for p in parts)
    s_m = sum(p[4] for p in parts)
    s_mm = sum(p[5] for p in parts)
    s_nm = sum(p[6] for p in parts)
    z = 1.96
    out = []
    for ip, p in enumerate(ps):
        th = int(theta[ip])
        chi = s_n[ip] / trials
        var_n = max(0.0, s_nn[ip] / trials - chi * chi)
        sem = math.sqrt(var_n / trials)
        chi_ci = (max(0.0, chi - z * sem), chi + z * sem)
        if s_n[ip] > 0:
            a = s_m[ip] / trials
            b = s_n[ip] / trials
            xi2 = a / b
            var_a = max(0.0, s_mm[ip] / trials - a * a)
            var_b = var_n
            cov = s_nm[ip] / trials - a * b
            var_ratio = (var_a - 2 * xi2 * cov + xi2 * xi2 * var_b) / (b * b * trials)
            sd = math.sqrt(max(0.0, var_ratio))
            xi = math.sqrt(xi2)
            xi_ci = (math.sqrt(max(0.0, xi2 - z * sd)), math.sqrt(xi2 + z * sd))
        else:
            xi = 0.0
            xi_ci = (0.0, 0.0)
        out.append(
            NearCriticalRecord(
                p=p,
                L=L,
                trials=trials,
                theta_hits=th,
                theta_hat=th / trials,
                theta_ci=wilson_ci(th, trials),
                chi_hat=chi,
                chi_ci=chi_ci,
                xi_hat=float(math.sqrt(s_m[ip] / s_n[ip])) if s_n[ip] > 0 else 0.0,
                xi_ci=xi_ci,
                finite_samples=int(fin[ip]),
                seed=master_seed,
            )
        )
    return out


# ---------------------------------------------------------------------------
# shared-configuration containment runs


def _ep_worker(r: float, R: float, js: tuple, master: int, lo: int, hi: int):
    from .lattice import annulus

    region = build_region(annulus(r, R))
    grid, qmin, rmin, W, H = region.grid
    (glq, glr), (grq, grr) = start_gate(region)
    src = arc_sites(region, Arc.INNER).astype(np.int32)
    dst_flag = np.zeros(region.n, np.uint8)
    dst_flag[arc_sites(region, Arc.OUTER)] = 1
    ep, poly, viol = _chunk_ep_and_poly(
        region.n, region.nbr6,
        region.qs.astype(np.int64), region.rs.astype(np.int64),
        grid, qmin, rmin, W, H, region.inner_cut2,
        glq, glr, grq, grr, src, dst_flag,
        np.asarray(js, np.int64), 0.5, np.uint64(master), lo, hi,
    )
    if np.any(np.asarray(viol) < 0):
        raise RuntimeError("ep walk failed")
    return ep, poly, viol


def ep_containment_trials(r: float, R: float, js, trials: int, master_seed: int, workers=None):
    """Shared-seed trials of the exploration crossing events and the
    polychromatic events; returns (ep_hits, poly_hits, violations) per j,
    violations counting trials where the ep event held but H_j did not."""
    if workers is None:
        workers = default_workers()
    js = tuple(int(j) for j in js)
    parts = _map_chunks(_ep_worker, (r, R, js, master_seed), trials, workers)
    ep = sum(p[0] for p in parts)
    poly = sum(p[1] for p in parts)
    viol = sum(int(p[2]) for p in parts)
    return ep, poly, viol


def _window_worker(r: float, rm: float, R: float, j: int, master: int, lo: int, hi: int):
    region = build_region(semi_annulus(r, R))
    src0 = arc_sites(region, Arc.INNER).astype(np.int32)
    dstf0 = np.zeros(region.n, np.uint8)
    dstf0[arc_sites(region, Arc.OUTER)] = 1
    mask0 = np.ones(region.n, np.uint8)
    m1, i1, o1 = annular_window(region, r, rm)
    m2, i2, o2 = annular_window(region, rm, R)
    def flag(ids):
        f = np.zeros(region.n, np.uint8)
        f[ids] = 1
        return f
    return _chunk_windows(
        region.n, region.nbr6, j,
        src0, dstf0, mask0,
        i1.astype(np.int32), flag(o1), m1.astype(np.uint8),
        i2.astype(np.int32), flag(o2), m2.astype(np.uint8),
        0.5, np.uint64(master), lo, hi,
    )


def window_containment_trials(
    r: float, r_mid: float, R: float, j: int, trials: int, master_seed: int, workers=None
):
    """Shared-configuration check that j disjoint crossings of the full
    semi-annulus restrict to j disjoint crossings of each nested window.
    Returns (hits_full, hits_lo, hits_hi, violations)."""
    if workers is None:
        workers = default_workers()
    parts = _map_chunks(_window_worker, (r, r_mid, R, j, master_seed), trials, workers)
    hits = sum(p[0] for p in parts)
    viol = sum(int(p[1]) for p in parts)
    return int(hits[0]), int(hits[1]), int(hits[2]), viol
