"""Interface exploration processes on the hexagon-cell picture.

The walk state is a directed honeycomb edge, encoded as the ordered pair
(L, R) of the two hexagon cells it separates: L on the left of the motion,
R on the right.  The invariant is blue on the left, yellow on the right.
With R - L = E[k] the cell ahead is w = L + E[k+1]; a blue probe turns the
walk right onto (w, R), a yellow probe turns it left onto (L, w).

Annulus walks color the excluded inner disc yellow, and color any cell
outside the active domain by a universal-cover cut: the cell's angular
position, unwound to the walk's current winding level, is compared against
the start meridian (below it reads blue, above it reads yellow).  The walk
ends when it first touches the inner disc, or at the disconnection time:
the first return to a honeycomb vertex a full winding (+-2pi) later.  An
anticlockwise loop is a blue circuit attached to the outer side; a
clockwise loop is a yellow circuit and excludes a blue arm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from numba import njit

from .config import Color, Configuration
from .connectivity import _reach_kernel
from .lattice import (
    SQRT3,
    Arc,
    NEIGHBOR_OFFSETS,
    Region,
    RegionError,
    arc_sites,
    norm2,
    position,
)

_TWO_PI = 2.0 * math.pi

# walk status codes
_HIT_INNER = 1
_DISC_CW = 2
_DISC_CCW = 3
_LOOP_CLOSED = 4  # interface returned to the start edge with no net winding
_NO_GATE = -2
_STEP_CAP = -3

_EQ = np.array([o[0] for o in NEIGHBOR_OFFSETS], np.int64)
_ER = np.array([o[1] for o in NEIGHBOR_OFFSETS], np.int64)


class WalkStatus(Enum):
    REACHED_TARGET = "reached_target"
    HIT_INNER_CIRCLE = "hit_inner_circle"
    DISCONNECTED = "disconnected"


class WindingVerdict(Enum):
    CLOCKWISE = "clockwise"
    ANTICLOCKWISE = "anticlockwise"
    NONE = "none"


@dataclass
class ExplorationPath:
    status: WalkStatus
    winding: WindingVerdict
    crossings: int
    steps: np.ndarray  # (m, 4) int32: Lq, Lr, Rq, Rr per step
    probe_blue: np.ndarray  # (m,) bool: color seen ahead at each step
    truncated: bool = False


@njit(cache=True, inline="always")
def _offset_index(dq, dr):
    if dq == 1 and dr == 0:
        return 0
    if dq == 0 and dr == 1:
        return 1
    if dq == -1 and dr == 1:
        return 2
    if dq == -1 and dr == 0:
        return 3
    if dq == 0 and dr == -1:
        return 4
    return 5  # (1, -1)


@njit(cache=True)
def _walk_kernel(
    blue,
    mask,
    grid,
    qmin,
    rmin,
    W,
    H,
    lo2,
    gate_lq,
    gate_lr,
    gate_rq,
    gate_rr,
    stop_at_inner,
    touched,
    rec,
    rec_blue,
    rec_cap,
):
    """One exploration walk.  Returns (status, crossings, steps).

    touched is filled with 1 at every active-domain cell the walk probes.
    rec/rec_blue record the first rec_cap steps when rec_cap > 0.
    """
    lq, lr, rq, rr = gate_lq, gate_lr, gate_rq, gate_rr
    k = _offset_index(rq - lq, rr - lr)
    wq = lq + _EQ[(k + 1) % 6]
    wr = lr + _ER[(k + 1) % 6]
    cx = (lq + rq + wq) + 0.5 * (lr + rr + wr)
    cy = (SQRT3 / 2.0) * (lr + rr + wr)
    theta = math.atan2(cy, cx)
    theta_start = theta
    stamped = np.zeros(W * H * 2, np.uint8)
    stamp = np.empty(W * H * 2, np.float64)
    crossings = 0
    last_inner = False  # walk starts on the outer side
    step_cap = 12 * W * H + 100
    for step in range(step_cap):
        if step > 0 and lq == gate_lq and lr == gate_lr and rq == gate_rq and rr == gate_rr:
            # the interface component through the gate is a closed
            # contractible curve (a winding return fires the stamp check
            # first); the caller recurses on the unexplored remainder
            return _LOOP_CLOSED, crossings, step
        k = _offset_index(rq - lq, rr - lr)
        wq = lq + _EQ[(k + 1) % 6]
        wr = lr + _ER[(k + 1) % 6]
        # head vertex = center of the face {L, R, w}
        sq = lq + rq + wq
        sr = lr + rr + wr
        fx = sq + 0.5 * sr
        fy = (SQRT3 / 2.0) * sr
        ang = math.atan2(fy, fx)
        d = ang - math.atan2(math.sin(theta), math.cos(theta))
        if d > math.pi:
            d -= _TWO_PI
        elif d < -math.pi:
            d += _TWO_PI
        theta += d
        # face key: sq mod 3 == 1 -> up triangle, == 2 -> down triangle
        m3 = sq % 3
        if m3 < 0:
            m3 += 3
        if m3 == 1:
            aq = (sq - 1) // 3
            ar = (sr - 1) // 3
            orient = 0
        else:
            aq = (sq - 2) // 3
            ar = (sr - 2) // 3
            orient = 1
        gq = aq - qmin
        gr = ar - rmin
        if gq < 0 or gq >= W or gr < 0 or gr >= H:
            return _STEP_CAP, crossings, step  # walked off the padded grid
        fidx = (gr * W + gq) * 2 + orient
        if stamped[fidx]:
            dd = theta - stamp[fidx]
            if dd > math.pi:
                return _DISC_CCW, crossings, step
            if dd < -math.pi:
                return _DISC_CW, crossings, step
        else:
            stamped[fidx] = 1
            stamp[fidx] = theta
        # probe the cell ahead
        pgq = wq - qmin
        pgr = wr - rmin
        if pgq < 0 or pgq >= W or pgr < 0 or pgr >= H:
            return _STEP_CAP, crossings, step
        rid = grid[pgr * W + pgq]
        if rid >= 0 and mask[rid]:
            col = blue[rid]
            touched[rid] = 1
        else:
            n2 = float(wq * wq + wq * wr + wr * wr)
            if n2 < lo2:
                # inner disc: always yellow
                if not last_inner:
                    crossings += 1
                    last_inner = True
                if stop_at_inner:
                    return _HIT_INNER, crossings, step
                col = False
            else:
                if last_inner:
                    crossings += 1
                    last_inner = False
                # the boundary curtain (cells touching the active domain)
                # carries the universal-cover cut coloring; anything beyond
                # reads yellow, which bounces the walk back toward the domain
                curtain = False
                for kk in range(6):
                    cq = wq + _EQ[kk] - qmin
                    cr = wr + _ER[kk] - rmin
                    if 0 <= cq < W and 0 <= cr < H:
                        crid = grid[cr * W + cq]
                        if crid >= 0 and mask[crid]:
                            curtain = True
                            break
                if curtain:
                    # cut rule: the cell's own angle, unwound to the walk's level
                    phi = math.atan2((SQRT3 / 2.0) * wr, wq + 0.5 * wr)
                    phi += _TWO_PI * round((theta - phi) / _TWO_PI)
                    col = phi < theta_start
                else:
                    col = False
        if rec_cap > 0 and step < rec_cap:
            rec[step, 0] = lq
            rec[step, 1] = lr
            rec[step, 2] = rq
            rec[step, 3] = rr
            rec_blue[step] = col
        if col:
            lq, lr = wq, wr
        else:
            rq, rr = wq, wr
    return _STEP_CAP, crossings, step_cap


@njit(cache=True)
def _gate_kernel(qs, rs, mask, grid, qmin, rmin, W, H, lo2, target):
    """Deterministic start gate: directed edge with both flanking cells
    outside the active domain (and not in the inner disc), cell ahead inside,
    head vertex nearest the target angle.  Returns (lq, lr, rq, rr, found)."""
    best = 1e18
    bu = -1
    bk = -1
    n = qs.size
    for u in range(n):
        if not mask[u]:
            continue
        uq = qs[u]
        ur = rs[u]
        for k in range(6):
            lq = uq - _EQ[(k + 1) % 6]
            lr = ur - _ER[(k + 1) % 6]
            rq = lq + _EQ[k]
            rr = lr + _ER[k]
            ok = True
            for pick in range(2):
                cq = lq if pick == 0 else rq
                cr = lr if pick == 0 else rr
                gq = cq - qmin
                gr = cr - rmin
                if 0 <= gq < W and 0 <= gr < H:
                    rid = grid[gr * W + gq]
                else:
                    rid = -1
                if rid >= 0 and mask[rid]:
                    ok = False
                    break
                if float(cq * cq + cq * cr + cr * cr) < lo2:
                    ok = False
                    break
            if not ok:
                continue
            sq = lq + rq + uq
            sr = lr + rr + ur
            ang = math.atan2((SQRT3 / 2.0) * sr, sq + 0.5 * sr)
            # the flanks must straddle the gate's own meridian so the cut
            # rule reproduces the blue-left/yellow-right start assignment
            # whenever they are probed again later
            phi_l = math.atan2((SQRT3 / 2.0) * lr, lq + 0.5 * lr)
            phi_r = math.atan2((SQRT3 / 2.0) * rr, rq + 0.5 * rr)
            dl = math.atan2(math.sin(phi_l - ang), math.cos(phi_l - ang))
            dr = math.atan2(math.sin(phi_r - ang), math.cos(phi_r - ang))
            if not (dl < 0.0 < dr):
                continue
            delta = abs(math.atan2(math.sin(ang - target), math.cos(ang - target)))
            score = delta * 1e9 + u * 10 + k * 1e-2
            if score < best:
                best = score
                bu = u
                bk = k
    if bu < 0:
        return 0, 0, 0, 0, False
    lq = qs[bu] - _EQ[(bk + 1) % 6]
    lr = rs[bu] - _ER[(bk + 1) % 6]
    return lq, lr, lq + _EQ[bk], lr + _ER[bk], True


@njit(cache=True)
def _nested_kernel(blue, nbr6, qs, rs, grid, qmin, rmin, W, H, lo2, inner_arc_flag, inner_adj_flag):
    """The nested one-arm algorithm; 1 = blue arm, 0 = none, <0 = failure."""
    n = blue.size
    mask = np.ones(n, np.uint8)
    touched = np.zeros(n, np.uint8)
    queue = np.empty(n, np.int32)
    rec = np.empty((1, 4), np.int32)
    rec_blue = np.empty(1, np.bool_)
    active = n
    while True:
        lq, lr, rq, rr, found = _gate_kernel(qs, rs, mask, grid, qmin, rmin, W, H, lo2, 0.0)
        if not found:
            return _NO_GATE
        for v in range(n):
            touched[v] = 0
        status, _, _ = _walk_kernel(
            blue, mask, grid, qmin, rmin, W, H, lo2,
            lq, lr, rq, rr, True, touched, rec, rec_blue, 0,
        )
        if status == _HIT_INNER:
            return 1
        if status == _DISC_CW:
            return 0
        if status != _DISC_CCW and status != _LOOP_CLOSED:
            return status  # error
        # anticlockwise circuit or contractible loop: the walk's blue trail is
        # attached to the outer side, so an inner-arc cell on it completes the
        # arm; otherwise dig into the unexplored part around the inner disc
        for v in range(n):
            if touched[v] and blue[v] and inner_arc_flag[v]:
                return 1
        # new domain: untouched cells still connected to the inner disc
        tail = 0
        for v in range(n):
            if mask[v] and not touched[v] and inner_adj_flag[v]:
                queue[tail] = v
                tail += 1
        if tail == 0:
            return 0
        newmask = np.zeros(n, np.uint8)
        for i in range(tail):
            newmask[queue[i]] = 1
        head = 0
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(6):
                w = nbr6[v, k]
                if w >= 0 and mask[w] and not touched[w] and not newmask[w]:
                    newmask[w] = 1
                    queue[tail] = w
                    tail += 1
        if tail >= active:
            return _STEP_CAP  # failed to shrink; should be impossible
        active = tail
        mask = newmask


# ---------------------------------------------------------------------------
# python wrappers


def _annulus_geometry(region: Region):
    if region.spec.kind != "annulus":
        raise RegionError(f"annulus walk requires an annulus region, got {region.spec.kind}")
    grid, qmin, rmin, W, H = region.grid
    return grid, qmin, rmin, W, H, region.inner_cut2


def _inner_flags(region: Region):
    """(inner_arc_flag, inner_adj_flag): arc membership, and adjacency to the
    excluded inner disc."""
    inner_arc = np.zeros(region.n, np.uint8)
    inner_arc[arc_sites(region, Arc.INNER)] = 1
    lo2 = region.inner_cut2
    qs = region.qs.astype(np.int64)
    rs = region.rs.astype(np.int64)
    adj = np.zeros(region.n, dtype=bool)
    for dq, dr in NEIGHBOR_OFFSETS:
        nq, nr = qs + dq, rs + dr
        adj |= (nq * nq + nq * nr + nr * nr) < lo2
    return inner_arc, adj.astype(np.uint8)


_REGION_FLAG_CACHE: dict = {}


def _cached_flags(region: Region):
    key = id(region)
    if key not in _REGION_FLAG_CACHE:
        _REGION_FLAG_CACHE[key] = _inner_flags(region)
    return _REGION_FLAG_CACHE[key]


def start_gate(region: Region, start_angle: float = 0.0):
    """The canonical outer-boundary start edge nearest the given angle."""
    grid, qmin, rmin, W, H, lo2 = _annulus_geometry(region)
    mask = np.ones(region.n, np.uint8)
    lq, lr, rq, rr, found = _gate_kernel(
        region.qs.astype(np.int64), region.rs.astype(np.int64),
        mask, grid, qmin, rmin, W, H, lo2, start_angle,
    )
    if not found:
        raise RegionError("no start gate on the outer boundary")
    return (int(lq), int(lr)), (int(rq), int(rr))


def annulus_exploration(
    config: Configuration,
    start_angle: float = 0.0,
    stop_at_inner: bool = True,
    record: bool = True,
) -> ExplorationPath:
    """Run the annulus walk from the outer boundary gate nearest start_angle.

    Terminates at the first touch of the inner disc (HIT_INNER_CIRCLE) or at
    the disconnection time with the loop's winding direction.  With
    stop_at_inner=False the walk continues through inner touches until
    disconnection, counting boundary-to-boundary crossings.
    """
    region = config.region
    grid, qmin, rmin, W, H, lo2 = _annulus_geometry(region)
    (lq, lr), (rq, rr) = start_gate(region, start_angle)
    mask = np.ones(region.n, np.uint8)
    touched = np.zeros(region.n, np.uint8)
    cap = min(12 * W * H + 100, 500000) if record else 0
    rec = np.zeros((max(cap, 1), 4), np.int32)
    rec_blue = np.zeros(max(cap, 1), np.bool_)
    status, crossings, steps = _walk_kernel(
        config.blue, mask, grid, qmin, rmin, W, H, lo2,
        lq, lr, rq, rr, stop_at_inner, touched, rec, rec_blue, cap,
    )
    if status == _LOOP_CLOSED:
        raise RuntimeError(
            "exploration interface closed a contractible loop at the outer gate"
        )
    if status == _STEP_CAP or status == _NO_GATE:
        raise RuntimeError("exploration walk failed to terminate")
    if status == _HIT_INNER:
        st, wv = WalkStatus.HIT_INNER_CIRCLE, WindingVerdict.NONE
    elif status == _DISC_CW:
        st, wv = WalkStatus.DISCONNECTED, WindingVerdict.CLOCKWISE
    else:
        st, wv = WalkStatus.DISCONNECTED, WindingVerdict.ANTICLOCKWISE
    m = min(steps, cap) if record else 0
    return ExplorationPath(
        st, wv, crossings, rec[:m].copy(), rec_blue[:m].copy(), truncated=steps > m
    )


def ep_crossing_event(config: Configuration, j: int) -> bool:
    """True iff the walk alternates between the boundary circles at least j
    times before its disconnection time.

    Each alternating boundary touch after the first pair exposes one more
    disjoint crossing, except that the final traversal retraces the far side
    of an arm already in the walk's hull; j touches therefore certify j
    disjoint crossings with both colors present, and the event is contained
    in the polychromatic j-crossing event configuration by configuration
    (checked exactly in the tests).  For j = 2 the event is exactly "the
    walk reaches the inner circle before disconnecting"."""
    if j < 2:
        raise ValueError("ep crossing events need j >= 2")
    region = config.region
    grid, qmin, rmin, W, H, lo2 = _annulus_geometry(region)
    (lq, lr), (rq, rr) = start_gate(region)
    mask = np.ones(region.n, np.uint8)
    touched = np.zeros(region.n, np.uint8)
    rec = np.empty((1, 4), np.int32)
    rec_blue = np.empty(1, np.bool_)
    status, crossings, _ = _walk_kernel(
        config.blue, mask, grid, qmin, rmin, W, H, lo2,
        lq, lr, rq, rr, False, touched, rec, rec_blue, 0,
    )
    if status not in (_DISC_CW, _DISC_CCW):
        raise RuntimeError("ep walk did not end at a disconnection")
    return crossings >= j


def one_arm_nested(config: Configuration) -> bool:
    """Nested-walk detector for a blue crossing of the annulus.

    Exactly equivalent to blue inner-arc/outer-arc connectivity when the
    inner radius is at most 2 (there every inner-arc cell borders the
    excluded disc); all one-arm events here use inner radius 2.
    """
    region = config.region
    grid, qmin, rmin, W, H, lo2 = _annulus_geometry(region)
    inner_arc_flag, inner_adj_flag = _cached_flags(region)
    verdict = _nested_kernel(
        config.blue, region.nbr6,
        region.qs.astype(np.int64), region.rs.astype(np.int64),
        grid, qmin, rmin, W, H, lo2, inner_arc_flag, inner_adj_flag,
    )
    if verdict < 0:
        raise RuntimeError(f"nested walk failed (code {verdict})")
    return bool(verdict)


# ---------------------------------------------------------------------------
# chordal exploration (simply connected domains, pure python)


def _face_key(a, b, c):
    return tuple(sorted((a, b, c)))


def _ahead(L, R):
    k = NEIGHBOR_OFFSETS.index((R[0] - L[0], R[1] - L[1]))
    dq, dr = NEIGHBOR_OFFSETS[(k + 1) % 6]
    return (L[0] + dq, L[1] + dr)


def boundary_trace(region: Region):
    """The domain's boundary cycle walked with the domain on the left.

    Returns a list of (face_key, ghost_cell) pairs: the honeycomb vertices of
    the boundary in cyclic order and the outside cell seen at each step.
    """
    index = region.index
    # start edge: lowest site with an outside neighbor, first outside offset
    start = None
    for i in range(region.n):
        u = region.site(i)
        for d in NEIGHBOR_OFFSETS:
            g = (u[0] + d[0], u[1] + d[1])
            if g not in index:
                # orient: domain cell on the left
                L, R = u, g
                if _ahead(L, R) is not None:
                    start = (L, R)
                    break
        if start:
            break
    if start is None:
        raise RegionError("region has no boundary")
    trace = []
    L, R = start
    for _ in range(24 * region.n + 24):
        w = _ahead(L, R)
        trace.append((_face_key(L, R, w), R if R not in index else L))
        col = w in index  # domain reads blue, outside reads yellow
        if col:
            L = w
        else:
            R = w
        if (L, R) == start:
            return trace
    raise RuntimeError("boundary trace did not close")


def boundary_vertex_near(region: Region, x: float, y: float):
    """The boundary honeycomb vertex nearest the plane point (x, y)."""
    best = None
    for fkey, _ in boundary_trace(region):
        px = sum(position(c)[0] for c in fkey) / 3.0
        py = sum(position(c)[1] for c in fkey) / 3.0
        d2 = (px - x) ** 2 + (py - y) ** 2
        if best is None or d2 < best[0] - 1e-12:
            best = (d2, fkey)
    return best[1]


def _chordal_setup(region: Region, a, b, ghost_color=None):
    """Virtual ghost colors and the start state for the walk from a to b.

    Unless a coloring is supplied, the ghosts from b forward to a along the
    boundary cycle read blue and the rest yellow; the walk leaves the
    blue/yellow junction nearest a with the blue side on its left.
    """
    trace = boundary_trace(region)
    faces = [f for f, _ in trace]
    if a not in faces or b not in faces:
        raise RegionError("a and b must be boundary vertices")
    if a == b:
        raise RegionError("a and b must differ")
    if ghost_color is None:
        ia, ib = faces.index(a), faces.index(b)
        m = len(trace)
        # the ghost recorded at a junction step flanks the junction on the
        # forward side, so the yellow arc runs from a through b inclusive
        # and the blue arc is the strict remainder
        ghost_color = {}
        i = ia
        while True:  # arc from a forward to b: yellow
            ghost_color.setdefault(trace[i][1], False)
            if i == ib:
                break
            i = (i + 1) % m
        i = (ib + 1) % m
        while i != ia:  # arc from b forward to a: blue
            ghost_color.setdefault(trace[i][1], True)
            i = (i + 1) % m
    # start state: the directed edge wedged between the two arcs (blue flank
    # left, yellow flank right, domain cell ahead) nearest the vertex a
    index = region.index
    ax = sum(position(c)[0] for c in a) / 3.0
    ay = sum(position(c)[1] for c in a) / 3.0
    best = None
    for i in range(region.n):
        u = region.site(i)
        for k, off in enumerate(NEIGHBOR_OFFSETS):
            dq1, dr1 = NEIGHBOR_OFFSETS[(k + 1) % 6]
            L = (u[0] - dq1, u[1] - dr1)
            R = (L[0] + off[0], L[1] + off[1])
            if L in index or R in index:
                continue
            if not (ghost_color.get(L) is True and ghost_color.get(R) is False):
                continue
            fx = (position(L)[0] + position(R)[0] + position(u)[0]) / 3.0
            fy = (position(L)[1] + position(R)[1] + position(u)[1]) / 3.0
            d2 = (fx - ax) ** 2 + (fy - ay) ** 2
            key = (d2, u, k)
            if best is None or key < best[0]:
                best = (key, (L, R))
    if best is None:
        raise RuntimeError("could not orient the start gate at a")
    return ghost_color, best[1]


def chordal_exploration(
    config: Configuration, a, b, ghost_groups=None, ghost_colors=None
) -> ExplorationPath:
    """Interface walk from boundary vertex a to boundary vertex b.

    The domain must be simply connected.  Boundary cells on one side of the
    (a, b) split read blue, on the other yellow; the walk separates the blue
    cluster attached to the blue side from the yellow cluster attached to
    the yellow side and ends at b.

    ghost_groups, if given, maps ghost cells to 'inner'/'outer'/'target':
    inner/outer touches alternate the crossing counter and a 'target' probe
    ends the walk early (used for the semi-annulus crossing count).
    ghost_colors overrides the boundary split with an explicit coloring.
    """
    region = config.region
    if region.spec.kind == "annulus":
        raise RegionError("chordal exploration requires a simply connected domain")
    ghost_color, (L, R) = _chordal_setup(region, a, b, ghost_colors)
    index = region.index
    steps = []
    probe = []
    crossings = 0
    last_inner = True  # counting starts from the inner junction
    visited = set()
    status = None
    for step in range(48 * region.n + 48):
        if (L, R) in visited:
            raise RuntimeError("chordal walk retraced a directed edge")
        visited.add((L, R))
        w = _ahead(L, R)
        fkey = _face_key(L, R, w)
        if fkey == b or (step > 0 and L not in index and R not in index):
            # reached b, or wedged between the two boundary arcs at their
            # far junction
            status = WalkStatus.REACHED_TARGET
            break
        if w in index:
            col = bool(config.blue[index[w]])
        else:
            if w not in ghost_color:
                raise RuntimeError(f"walk probed an uncolored ghost {w}")
            col = ghost_color[w]
            if ghost_groups is not None:
                g = ghost_groups.get(w)
                if g == "target":
                    status = WalkStatus.REACHED_TARGET
                    break
                if g == "inner" and not last_inner:
                    crossings += 1
                    last_inner = True
                elif g == "outer" and last_inner:
                    crossings += 1
                    last_inner = False
        steps.append((L[0], L[1], R[0], R[1]))
        probe.append(col)
        if col:
            L = w
        else:
            R = w
    if status is None:
        raise RuntimeError("chordal walk did not reach its target")
    return ExplorationPath(
        status,
        WindingVerdict.NONE,
        crossings,
        np.array(steps, np.int32).reshape(-1, 4),
        np.array(probe, bool),
    )


def semi_annulus_crossing_count(config: Configuration) -> int:
    """Crossings between the two semicircles made by the interface from the
    inner-right junction toward the outer-left one, before it first reaches
    the discrete interval on the negative real axis."""
    region = config.region
    if region.spec.kind != "semi_annulus":
        raise RegionError("semi_annulus_crossing_count requires a semi-annulus")
    r_in, r_out = region.spec.r_inner, region.spec.r_outer
    a = boundary_vertex_near(region, r_in, 0.0)
    b = boundary_vertex_near(region, -r_out, 0.0)
    lo2 = region.inner_cut2
    groups = {}
    for _, g in boundary_trace(region):
        if norm2(g) < lo2:
            groups[g] = "inner"
        elif position(g)[1] < 0.1:
            groups[g] = "target" if position(g)[0] < 0 else "side"
        else:
            groups[g] = "outer"
    # the boundary split is geometric here: inner semicircle and the
    # negative-axis interval read blue, the rest yellow
    colors = {g: grp in ("inner", "target") for g, grp in groups.items()}
    path = chordal_exploration(config, a, b, ghost_groups=groups, ghost_colors=colors)
    return path.crossings
