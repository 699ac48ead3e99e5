"""Cluster labeling, crossing counts, disjoint crossings, and arm events.

Crossings of an annular region are monochromatic site paths joining the
inner and outer boundary arcs; "j disjoint crossings" means pairwise
vertex-disjoint.  The maximum number of disjoint crossings of one color is
computed as a unit-vertex-capacity max flow (Menger), with augmenting-path
search capped at the requested count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .config import Color, Configuration
from .lattice import Arc, Region, RegionSpec, annular_window, annulus, arc_sites, build_region

# ---------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _uf_find(parent, v):
    r = v
    while parent[r] != r:
        r = parent[r]
    while parent[v] != r:
        nxt = parent[v]
        parent[v] = r
        v = nxt
    return r


@njit(cache=True)
def _label_kernel(nbr6, col):
    """Union-find labeling of col-sites; labels are the minimum site id of
    each cluster, -1 on other sites.  Returns (labels, cluster_count)."""
    n = col.size
    parent = np.empty(n, np.int32)
    size = np.ones(n, np.int32)
    for v in range(n):
        parent[v] = v
    for v in range(n):
        if not col[v]:
            continue
        for k in range(6):
            w = nbr6[v, k]
            if w > v and col[w]:
                rv = _uf_find(parent, v)
                rw = _uf_find(parent, w)
                if rv != rw:
                    if size[rv] < size[rw]:
                        rv, rw = rw, rv
                    parent[rw] = rv
                    size[rv] += size[rw]
    labels = np.full(n, -1, np.int32)
    minid = np.full(n, -1, np.int32)
    count = 0
    for v in range(n):
        if col[v]:
            r = _uf_find(parent, v)
            if minid[r] < 0:
                minid[r] = v  # first site in id order is the minimum
                count += 1
    for v in range(n):
        if col[v]:
            labels[v] = minid[_uf_find(parent, v)]
    return labels, count


@njit(cache=True)
def _crossing_count_kernel(labels, arc_a, arc_b):
    n = labels.size
    on_a = np.zeros(n, np.uint8)
    for i in range(arc_a.size):
        lab = labels[arc_a[i]]
        if lab >= 0:
            on_a[lab] = 1
    count = 0
    for i in range(arc_b.size):
        lab = labels[arc_b[i]]
        if lab >= 0 and on_a[lab] == 1:
            on_a[lab] = 2
            count += 1
    return count


@njit(cache=True)
def _reach_kernel(nbr6, blue, want_blue, mask, src, dst_flag):
    """True iff a want_blue-colored path inside mask joins src to dst."""
    n = blue.size
    visited = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int32)
    tail = 0
    for i in range(src.size):
        v = src[i]
        if mask[v] and blue[v] == want_blue and not visited[v]:
            if dst_flag[v]:
                return True
            visited[v] = 1
            queue[tail] = v
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for k in range(6):
            w = nbr6[v, k]
            if w >= 0 and mask[w] and blue[w] == want_blue and not visited[w]:
                if dst_flag[w]:
                    return True
                visited[w] = 1
                queue[tail] = w
                tail += 1
    return False


@njit(cache=True)
def _maxflow_kernel(nbr6, blue, want_blue, mask, src, dst_flag, cap):
    """Maximum number of vertex-disjoint want_blue paths src->dst in mask,
    stopping at cap.  States are (site, phase): phase 0 = entering the site,
    phase 1 = leaving it; residual moves implement unit vertex capacities."""
    n = blue.size
    succ = np.full(n, -2, np.int32)  # -2 no flow, -1 path terminal, else next site
    pred = np.full(n, -2, np.int32)  # -2 no flow, -1 path start, else previous site
    par = np.empty(2 * n, np.int32)
    ptype = np.empty(2 * n, np.uint8)
    visited = np.zeros(2 * n, np.uint8)
    queue = np.empty(2 * n, np.int32)
    add_u = np.empty(n + 2, np.int32)
    add_w = np.empty(n + 2, np.int32)
    rem_u = np.empty(n + 2, np.int32)
    rem_w = np.empty(n + 2, np.int32)
    flow = 0
    while flow < cap:
        for s in range(2 * n):
            visited[s] = 0
        head = 0
        tail = 0
        found = -1
        for i in range(src.size):
            a = src[i]
            if blue[a] == want_blue and mask[a] and pred[a] != -1:
                s = 2 * a
                if not visited[s]:
                    visited[s] = 1
                    ptype[s] = 9  # search start
                    queue[tail] = s
                    tail += 1
        while head < tail and found < 0:
            s = queue[head]
            head += 1
            v = s >> 1
            if s & 1:  # leaving v
                if dst_flag[v] and succ[v] != -1:
                    found = s
                    break
                for k in range(6):
                    w = nbr6[v, k]
                    if w >= 0 and blue[w] == want_blue and mask[w] and succ[v] != w:
                        t = 2 * w
                        if not visited[t]:
                            visited[t] = 1
                            par[t] = s
                            ptype[t] = 2  # add flow v->w
                            queue[tail] = t
                            tail += 1
                if succ[v] != -2:
                    t = 2 * v
                    if not visited[t]:
                        visited[t] = 1
                        par[t] = s
                        ptype[t] = 3
                        queue[tail] = t
                        tail += 1
            else:  # entering v
                if succ[v] == -2:
                    t = 2 * v + 1
                    if not visited[t]:
                        visited[t] = 1
                        par[t] = s
                        ptype[t] = 1
                        queue[tail] = t
                        tail += 1
                u = pred[v]
                if u >= 0:
                    t = 2 * u + 1
                    if not visited[t]:
                        visited[t] = 1
                        par[t] = s
                        ptype[t] = 4  # cancel flow u->v
                        queue[tail] = t
                        tail += 1
        if found < 0:
            break
        # walk the augmenting path back, collecting flow edits
        na = 0
        nr = 0
        s = found
        while ptype[s] != 9:
            pt = ptype[s]
            ps = par[s]
            if pt == 2:
                add_u[na] = ps >> 1
                add_w[na] = s >> 1
                na += 1
            elif pt == 4:
                rem_u[nr] = s >> 1
                rem_w[nr] = ps >> 1
                nr += 1
            s = ps
        start_site = s >> 1
        for i in range(nr):
            succ[rem_u[i]] = -2
            pred[rem_w[i]] = -2
        for i in range(na):
            succ[add_u[i]] = add_w[i]
            pred[add_w[i]] = add_u[i]
        pred[start_site] = -1
        succ[found >> 1] = -1
        flow += 1
    return flow


@njit(cache=True)
def _seq_kernel(nbr6, blue, left, right_flag, bottom, bottom_flag, seq):
    """True iff there are pairwise-disjoint left-right crossings with colors
    seq[0], seq[1], ... ordered bottom to top (seq entries: 1 blue, 0 yellow).

    Uses the lowest-crossing reduction: after finding that a seq[k]-colored
    crossing exists, everything at or below the lowest one (the fill of the
    bottom through other-colored cells, plus the seq[k]-colored cells touching
    that fill or the bottom) is removed before looking for the next color.
    """
    n = blue.size
    avail = np.ones(n, np.uint8)
    visited = np.empty(n, np.uint8)
    queue = np.empty(n, np.int32)
    for idx in range(seq.size):
        want = seq[idx] == 1
        if not _reach_kernel(nbr6, blue, want, avail, left, right_flag):
            return False
        if idx == seq.size - 1:
            return True
        # fill from the bottom arc through non-want cells
        for v in range(n):
            visited[v] = 0
        tail = 0
        for i in range(bottom.size):
            b = bottom[i]
            if avail[b] and blue[b] != want and not visited[b]:
                visited[b] = 1
                queue[tail] = b
                tail += 1
        head = 0
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(6):
                w = nbr6[v, k]
                if w >= 0 and avail[w] and blue[w] != want and not visited[w]:
                    visited[w] = 1
                    queue[tail] = w
                    tail += 1
        # drop the fill and the want-colored fence on it
        for v in range(n):
            if not avail[v]:
                continue
            if blue[v] != want:
                if visited[v]:
                    avail[v] = 0
            else:
                if bottom_flag[v]:
                    avail[v] = 0
                else:
                    for k in range(6):
                        w = nbr6[v, k]
                        if w >= 0 and visited[w]:
                            avail[v] = 0
                            break
    return True


# ---------------------------------------------------------------------------
# public operations


@dataclass
class ClusterLabels:
    color: Color
    labels: np.ndarray  # site id -> cluster label (min site id), -1 other color
    count: int


def _color_array(config: Configuration, color: Color):
    return config.blue if color is Color.BLUE else ~config.blue


def label_clusters(config: Configuration, color: Color) -> ClusterLabels:
    labels, count = _label_kernel(config.region.nbr6, _color_array(config, color))
    return ClusterLabels(color, labels, count)


def crossing_cluster_count(labels: ClusterLabels, region: Region, arc_a: Arc, arc_b: Arc) -> int:
    """Number of distinct clusters with a site on each arc."""
    a = arc_sites(region, arc_a).astype(np.int32)
    b = arc_sites(region, arc_b).astype(np.int32)
    return int(_crossing_count_kernel(labels.labels, a, b))


def _dst_flag(region: Region, ids) -> np.ndarray:
    flag = np.zeros(region.n, np.uint8)
    flag[ids] = 1
    return flag


def max_disjoint_crossings(
    config: Configuration, color: Color, arc_a: Arc, arc_b: Arc, cap: int
) -> int:
    """min(cap, max number of vertex-disjoint color paths from arc_a to arc_b)."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    region = config.region
    src = arc_sites(region, arc_a).astype(np.int32)
    dst = _dst_flag(region, arc_sites(region, arc_b))
    mask = np.ones(region.n, np.uint8)
    want = color is Color.BLUE
    return int(
        _maxflow_kernel(region.nbr6, config.blue, want, mask, src, dst, cap)
    )


# ---------------------------------------------------------------------------
# arm events

KIND_HALF_PLANE = "half_plane_blue"  # G_j on the semi-annulus
KIND_POLY = "polychromatic"  # H_j on the annulus
KIND_ONE_ARM = "one_arm"  # blue crossing cluster exists, Annulus(2, R)
KIND_TWO_CLUSTERS = "two_clusters"  # >= 2 disjoint blue crossing clusters
KIND_K_CLUSTERS = "k_blue_clusters"
KIND_CROSSING = "parallelogram_crossing"
KIND_SEQUENCE = "prescribed_sequence"  # ordered colored crossings, small regions


@dataclass(frozen=True)
class ArmEvent:
    spec: RegionSpec
    kind: str
    j: int = 0
    color: Color = Color.BLUE
    direction: str = "lr"
    colors: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.kind in (KIND_HALF_PLANE, KIND_K_CLUSTERS) and self.j < 1:
            raise ValueError("j must be >= 1")
        if self.kind == KIND_POLY and self.j < 2:
            raise ValueError("polychromatic events need j >= 2")


def half_plane_arms(j: int, r: float, R: float) -> ArmEvent:
    from .lattice import semi_annulus

    return ArmEvent(semi_annulus(r, R), KIND_HALF_PLANE, j=j)


def polychromatic_arms(j: int, r: float, R: float) -> ArmEvent:
    return ArmEvent(annulus(r, R), KIND_POLY, j=j)


def one_arm_event(R: float) -> ArmEvent:
    return ArmEvent(annulus(2.0, R), KIND_ONE_ARM)


def two_clusters_event(R: float) -> ArmEvent:
    return ArmEvent(annulus(2.0, R), KIND_TWO_CLUSTERS)


def k_blue_clusters(k: int, r: float, R: float) -> ArmEvent:
    return ArmEvent(annulus(r, R), KIND_K_CLUSTERS, j=k)


def parallelogram_crossing(width: int, height: int, color=Color.BLUE, direction="lr") -> ArmEvent:
    from .lattice import parallelogram

    if direction not in ("lr", "tb"):
        raise ValueError("direction must be 'lr' or 'tb'")
    return ArmEvent(parallelogram(width, height), KIND_CROSSING, color=color, direction=direction)


def prescribed_sequence(width: int, height: int, colors) -> ArmEvent:
    from .lattice import parallelogram

    return ArmEvent(parallelogram(width, height), KIND_SEQUENCE, colors=tuple(colors))


def _poly_verdict(region: Region, blue, j: int) -> bool:
    """H_j: j disjoint crossings, not all one color.  Different-color
    crossings are disjoint automatically, so the verdict is
    mB >= 1 and mY >= 1 and mB + mY >= j; capping both flows at j - 1
    leaves it unchanged."""
    src = arc_sites(region, Arc.INNER).astype(np.int32)
    dst = _dst_flag(region, arc_sites(region, Arc.OUTER))
    mask = np.ones(region.n, np.uint8)
    cap = max(1, j - 1)
    mb = _maxflow_kernel(region.nbr6, blue, True, mask, src, dst, cap)
    if mb == 0:
        return False
    my = _maxflow_kernel(region.nbr6, blue, False, mask, src, dst, cap)
    return my >= 1 and mb + my >= j


def eval_event(config: Configuration, event: ArmEvent) -> bool:
    """Evaluate a static arm event on a configuration of the matching region."""
    region = config.region
    if region.spec != event.spec:
        raise ValueError(f"configuration region {region.spec} != event region {event.spec}")
    blue = config.blue
    if event.kind == KIND_HALF_PLANE:
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = _dst_flag(region, arc_sites(region, Arc.OUTER))
        mask = np.ones(region.n, np.uint8)
        return (
            _maxflow_kernel(region.nbr6, blue, True, mask, src, dst, event.j) == event.j
        )
    if event.kind == KIND_POLY:
        return _poly_verdict(region, blue, event.j)
    if event.kind == KIND_ONE_ARM:
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = _dst_flag(region, arc_sites(region, Arc.OUTER))
        return bool(
            _reach_kernel(region.nbr6, blue, True, np.ones(region.n, np.uint8), src, dst)
        )
    if event.kind in (KIND_TWO_CLUSTERS, KIND_K_CLUSTERS):
        k = 2 if event.kind == KIND_TWO_CLUSTERS else event.j
        labels, _ = _label_kernel(region.nbr6, blue)
        a = arc_sites(region, Arc.INNER).astype(np.int32)
        b = arc_sites(region, Arc.OUTER).astype(np.int32)
        return _crossing_count_kernel(labels, a, b) >= k
    if event.kind == KIND_CROSSING:
        a, b = (Arc.LEFT, Arc.RIGHT) if event.direction == "lr" else (Arc.TOP, Arc.BOTTOM)
        src = arc_sites(region, a).astype(np.int32)
        dst = _dst_flag(region, arc_sites(region, b))
        want = event.color is Color.BLUE
        return bool(
            _reach_kernel(region.nbr6, blue, want, np.ones(region.n, np.uint8), src, dst)
        )
    if event.kind == KIND_SEQUENCE:
        left = arc_sites(region, Arc.LEFT).astype(np.int32)
        right = _dst_flag(region, arc_sites(region, Arc.RIGHT))
        bottom = arc_sites(region, Arc.BOTTOM).astype(np.int32)
        bottom_flag = _dst_flag(region, bottom)
        seq = np.array([1 if c is Color.BLUE else 0 for c in event.colors], np.int8)
        return bool(
            _seq_kernel(region.nbr6, blue, left, right, bottom, bottom_flag, seq)
        )
    raise ValueError(f"unknown event kind {event.kind!r}")


def parallelogram_duality(config: Configuration):
    """(blue left-right crossing, yellow top-bottom crossing); exactly one
    holds on the triangular lattice."""
    region = config.region
    if region.spec.kind != "parallelogram":
        raise ValueError("parallelogram_duality requires a parallelogram region")
    mask = np.ones(region.n, np.uint8)
    lr = bool(
        _reach_kernel(
            region.nbr6,
            config.blue,
            True,
            mask,
            arc_sites(region, Arc.LEFT).astype(np.int32),
            _dst_flag(region, arc_sites(region, Arc.RIGHT)),
        )
    )
    tb = bool(
        _reach_kernel(
            region.nbr6,
            config.blue,
            False,
            mask,
            arc_sites(region, Arc.TOP).astype(np.int32),
            _dst_flag(region, arc_sites(region, Arc.BOTTOM)),
        )
    )
    return lr, tb


# ---------------------------------------------------------------------------
# compiled event plans: a uniform array encoding shared by the exhaustive
# enumeration and Monte Carlo drivers

MODE_REACH = 0
MODE_FLOW = 1
MODE_POLY = 2
MODE_CLUSTERS = 3
MODE_SEQ = 4

_EMPTY_I32 = np.empty(0, np.int32)
_EMPTY_U8 = np.empty(0, np.uint8)
_EMPTY_I8 = np.empty(0, np.int8)


@njit(cache=True)
def _eval_plan_kernel(
    mode, want_blue, jk, blue, nbr6, src, dst_flag, dst_ids,
    mask, left, right_flag, bottom, bottom_flag, seq,
):
    if mode == MODE_REACH:
        return _reach_kernel(nbr6, blue, want_blue, mask, src, dst_flag)
    if mode == MODE_FLOW:
        return _maxflow_kernel(nbr6, blue, want_blue, mask, src, dst_flag, jk) >= jk
    if mode == MODE_POLY:
        cap = jk - 1 if jk > 2 else 1
        mb = _maxflow_kernel(nbr6, blue, True, mask, src, dst_flag, cap)
        if mb == 0:
            return False
        my = _maxflow_kernel(nbr6, blue, False, mask, src, dst_flag, cap)
        return my >= 1 and mb + my >= jk
    if mode == MODE_CLUSTERS:
        n = blue.size
        col = np.empty(n, np.bool_)
        for i in range(n):
            col[i] = blue[i] == want_blue
        labels, _ = _label_kernel(nbr6, col)
        return _crossing_count_kernel(labels, src, dst_ids) >= jk
    if mode == MODE_SEQ:
        return _seq_kernel(nbr6, blue, left, right_flag, bottom, bottom_flag, seq)
    return False


def _event_plan(event: ArmEvent, region: Region):
    """(mode, want_blue, jk, src, dst_flag, dst_ids, mask, left, right_flag,
    bottom, bottom_flag, seq) arrays for the plan-dispatch kernels."""
    if region.spec != event.spec:
        raise ValueError("event/region mismatch")
    full = np.ones(region.n, np.uint8)
    if event.kind == KIND_HALF_PLANE:
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = arc_sites(region, Arc.OUTER)
        return (MODE_FLOW, True, event.j, src, _dst_flag(region, dst),
                dst.astype(np.int32), full, _EMPTY_I32, _EMPTY_U8, _EMPTY_I32,
                _EMPTY_U8, _EMPTY_I8)
    if event.kind == KIND_POLY:
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = arc_sites(region, Arc.OUTER)
        return (MODE_POLY, True, event.j, src, _dst_flag(region, dst),
                dst.astype(np.int32), full, _EMPTY_I32, _EMPTY_U8, _EMPTY_I32,
                _EMPTY_U8, _EMPTY_I8)
    if event.kind == KIND_ONE_ARM:
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = arc_sites(region, Arc.OUTER)
        return (MODE_REACH, True, 1, src, _dst_flag(region, dst),
                dst.astype(np.int32), full, _EMPTY_I32, _EMPTY_U8, _EMPTY_I32,
                _EMPTY_U8, _EMPTY_I8)
    if event.kind in (KIND_TWO_CLUSTERS, KIND_K_CLUSTERS):
        k = 2 if event.kind == KIND_TWO_CLUSTERS else event.j
        src = arc_sites(region, Arc.INNER).astype(np.int32)
        dst = arc_sites(region, Arc.OUTER)
        return (MODE_CLUSTERS, True, k, src, _dst_flag(region, dst),
                dst.astype(np.int32), full, _EMPTY_I32, _EMPTY_U8, _EMPTY_I32,
                _EMPTY_U8, _EMPTY_I8)
    if event.kind == KIND_CROSSING:
        a, b = (Arc.LEFT, Arc.RIGHT) if event.direction == "lr" else (Arc.TOP, Arc.BOTTOM)
        src = arc_sites(region, a).astype(np.int32)
        dst = arc_sites(region, b)
        return (MODE_REACH, event.color is Color.BLUE, 1, src,
                _dst_flag(region, dst), dst.astype(np.int32), full,
                _EMPTY_I32, _EMPTY_U8, _EMPTY_I32, _EMPTY_U8, _EMPTY_I8)
    if event.kind == KIND_SEQUENCE:
        left = arc_sites(region, Arc.LEFT).astype(np.int32)
        right = _dst_flag(region, arc_sites(region, Arc.RIGHT))
        bottom = arc_sites(region, Arc.BOTTOM).astype(np.int32)
        seq = np.array([1 if c is Color.BLUE else 0 for c in event.colors], np.int8)
        return (MODE_SEQ, True, 1, _EMPTY_I32, _EMPTY_U8, _EMPTY_I32, full,
                left, right, bottom, _dst_flag(region, bottom), seq)
    raise ValueError(f"unknown event kind {event.kind!r}")


def window_crossings(
    config: Configuration, color: Color, r_lo: float, r_hi: float, cap: int
) -> int:
    """Disjoint crossings of the sub-annulus window r_lo..r_hi of an annular
    region, evaluated on this configuration's colors (for per-configuration
    nesting checks)."""
    region = config.region
    mask, inner, outer = annular_window(region, r_lo, r_hi)
    want = color is Color.BLUE
    return int(
        _maxflow_kernel(
            region.nbr6,
            config.blue,
            want,
            mask.astype(np.uint8),
            inner.astype(np.int32),
            _dst_flag(region, outer),
            cap,
        )
    )
