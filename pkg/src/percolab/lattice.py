"""Triangular-lattice geometry and region construction.

Sites live on the triangular lattice in axial coordinates (q, r) with
plane embedding position(q, r) = q*(1, 0) + r*(1/2, sqrt(3)/2), so nearest
neighbors sit at distance 1 and |position|^2 = q^2 + q*r + r^2 exactly.
Each site owns the hexagonal Voronoi cell of circumradius 1/sqrt(3).

Regions (disc, annulus, semi-annulus, parallelogram) are cut out of the
lattice with the convention that a hexagonal cell "meets" a circle of
radius rho iff rho - c <= |position| <= rho + c with c = 1/sqrt(3): every
cell meeting the inner circle belongs to an annular region, no cell meeting
the outer circle does.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np

SQRT3 = math.sqrt(3.0)
HEX_CIRCUMRADIUS = 1.0 / SQRT3

# the six neighbor offsets in counterclockwise order, starting at angle 0
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))


def position(site):
    """Plane embedding of an axial site (q, r)."""
    q, r = site
    return (q + 0.5 * r, (SQRT3 / 2.0) * r)


def neighbors(site):
    """The 6 lattice neighbors of a site, in counterclockwise order."""
    q, r = site
    return [(q + dq, r + dr) for dq, dr in NEIGHBOR_OFFSETS]


def norm2(site) -> int:
    """Squared distance of a site from the origin (an exact integer)."""
    q, r = site
    return q * q + q * r + r * r


class Arc(Enum):
    INNER = "inner"
    OUTER = "outer"
    LEFT = "left"
    RIGHT = "right"
    TOP = "top"
    BOTTOM = "bottom"


class RegionError(ValueError):
    pass


@dataclass(frozen=True)
class RegionSpec:
    """Shape of a region: one of disc, annulus, semi_annulus, parallelogram."""

    kind: str
    r_inner: float = 0.0
    r_outer: float = 0.0
    width: int = 0
    height: int = 0

    def __post_init__(self):
        if self.kind in ("annulus", "semi_annulus"):
            if not 0 < self.r_inner < self.r_outer:
                raise RegionError(
                    f"{self.kind} requires 0 < r < R, got r={self.r_inner}, R={self.r_outer}"
                )
        elif self.kind == "disc":
            if self.r_outer <= 0:
                raise RegionError(f"disc requires R > 0, got R={self.r_outer}")
        elif self.kind == "parallelogram":
            if self.width < 1 or self.height < 1:
                raise RegionError(
                    f"parallelogram requires width, height >= 1, got {self.width}x{self.height}"
                )
        else:
            raise RegionError(f"unknown region kind {self.kind!r}")

    @property
    def annular(self) -> bool:
        return self.kind in ("annulus", "semi_annulus")


def disc(radius) -> RegionSpec:
    return RegionSpec("disc", r_outer=float(radius))


def annulus(r, R) -> RegionSpec:
    return RegionSpec("annulus", r_inner=float(r), r_outer=float(R))


def semi_annulus(r, R) -> RegionSpec:
    return RegionSpec("semi_annulus", r_inner=float(r), r_outer=float(R))


def parallelogram(width, height) -> RegionSpec:
    return RegionSpec("parallelogram", width=int(width), height=int(height))


_ARCS_BY_KIND = {
    "disc": (Arc.OUTER,),
    "annulus": (Arc.INNER, Arc.OUTER),
    "semi_annulus": (Arc.INNER, Arc.OUTER, Arc.LEFT, Arc.RIGHT),
    "parallelogram": (Arc.LEFT, Arc.RIGHT, Arc.TOP, Arc.BOTTOM),
}


class Region:
    """An immutable finite piece of the lattice with labeled boundary arcs.

    sites are ordered lexicographically in (q, r); the dense id of a site is
    its index in that order.  Safe to share across workers.
    """

    def __init__(self, spec: RegionSpec, qs, rs, arcs):
        self.spec = spec
        self.qs = qs
        self.rs = rs
        self.n = len(qs)
        self.xs = qs + 0.5 * rs
        self.ys = (SQRT3 / 2.0) * rs
        self.arcs = arcs  # Arc -> sorted np.ndarray of site ids
        self._index = None
        self._nbr6 = None
        self._grid = None

    # -- basic lookups ------------------------------------------------------

    @property
    def index(self):
        """dict (q, r) -> dense site id."""
        if self._index is None:
            self._index = {
                (int(q), int(r)): i for i, (q, r) in enumerate(zip(self.qs, self.rs))
            }
        return self._index

    def site(self, i):
        return (int(self.qs[i]), int(self.rs[i]))

    def sites(self):
        return [self.site(i) for i in range(self.n)]

    @property
    def nbr6(self):
        """(n, 6) int32 array of neighbor site ids, -1 where the neighbor
        falls outside the region; column k is offset NEIGHBOR_OFFSETS[k]."""
        if self._nbr6 is None:
            grid, qmin, rmin, W, H = self.grid
            nbr = np.full((self.n, 6), -1, dtype=np.int32)
            for k, (dq, dr) in enumerate(NEIGHBOR_OFFSETS):
                gq = self.qs + (dq - qmin)
                gr = self.rs + (dr - rmin)
                ok = (gq >= 0) & (gq < W) & (gr >= 0) & (gr < H)
                idx = gr[ok] * W + gq[ok]
                nbr[ok, k] = grid[idx]
            self._nbr6 = nbr
        return self._nbr6

    @property
    def grid(self):
        """(grid_rid, qmin, rmin, W, H): dense (q,r) -> site id map, -1 outside.

        The grid covers the region's bounding box with a 6-cell pad so that
        exploration walks may probe outside the region (walks can sidestep a
        few cells into the virtual boundary zone near the cut meridian).
        """
        if self._grid is None:
            qmin = int(self.qs.min()) - 6
            qmax = int(self.qs.max()) + 6
            rmin = int(self.rs.min()) - 6
            rmax = int(self.rs.max()) + 6
            W = qmax - qmin + 1
            H = rmax - rmin + 1
            grid = np.full(W * H, -1, dtype=np.int32)
            grid[(self.rs - rmin) * W + (self.qs - qmin)] = np.arange(
                self.n, dtype=np.int32
            )
            self._grid = (grid, qmin, rmin, W, H)
        return self._grid

    @property
    def inner_cut2(self) -> float:
        """Squared radius below which a cell belongs to the excluded inner
        disc (annular kinds); -1 for kinds without an inner boundary."""
        if self.spec.annular:
            return (self.spec.r_inner - HEX_CIRCUMRADIUS) ** 2
        return -1.0

    def __repr__(self):
        return f"Region({self.spec}, n={self.n})"


def _radial_scan(spec: RegionSpec):
    """All sites of an annular/disc region, lexicographic in (q, r)."""
    R = spec.r_outer
    c = HEX_CIRCUMRADIUS
    hi2 = (R - c) ** 2
    lo2 = (spec.r_inner - c) ** 2 if spec.annular else -1.0
    mr = int(2.0 * R / SQRT3) + 2
    mq = int(R + mr / 2.0) + 2
    rlo = 1 if spec.kind == "semi_annulus" else -mr
    q, r = np.meshgrid(
        np.arange(-mq, mq + 1, dtype=np.int64),
        np.arange(rlo, mr + 1, dtype=np.int64),
        indexing="ij",
    )
    n2 = q * q + q * r + r * r
    keep = n2 < hi2
    if spec.annular:
        keep &= n2 >= lo2
    qs, rs = q[keep], r[keep]
    order = np.lexsort((rs, qs))
    return qs[order].astype(np.int32), rs[order].astype(np.int32)


@lru_cache(maxsize=64)
def build_region(spec: RegionSpec) -> Region:
    """Construct a region and its boundary arcs; deterministic for a spec."""
    c = HEX_CIRCUMRADIUS
    if spec.kind == "parallelogram":
        w, h = spec.width, spec.height
        q, r = np.meshgrid(
            np.arange(w, dtype=np.int64), np.arange(h, dtype=np.int64), indexing="ij"
        )
        qs, rs = q.ravel(), r.ravel()
        order = np.lexsort((rs, qs))
        qs, rs = qs[order].astype(np.int32), rs[order].astype(np.int32)
        ids = np.arange(len(qs), dtype=np.int64)
        arcs = {
            Arc.LEFT: ids[qs == 0],
            Arc.RIGHT: ids[qs == w - 1],
            Arc.BOTTOM: ids[rs == 0],
            Arc.TOP: ids[rs == h - 1],
        }
        return Region(spec, qs, rs, arcs)

    qs, rs = _radial_scan(spec)
    if len(qs) == 0:
        raise RegionError(f"region {spec} contains no sites")
    region = Region(spec, qs, rs, {})
    n2 = qs.astype(np.int64) ** 2 + qs.astype(np.int64) * rs + rs.astype(np.int64) ** 2
    hi2 = (spec.r_outer - c) ** 2
    ids = np.arange(region.n, dtype=np.int64)

    # outer arc: region sites with a lattice neighbor whose cell meets the
    # outer circle (equivalently any excluded neighbor at norm2 >= hi2)
    outer = np.zeros(region.n, dtype=bool)
    for dq, dr in NEIGHBOR_OFFSETS:
        nq = qs.astype(np.int64) + dq
        nr = rs.astype(np.int64) + dr
        outer |= (nq * nq + nq * nr + nr * nr) >= hi2
    arcs = {Arc.OUTER: ids[outer]}

    if spec.annular:
        arcs[Arc.INNER] = ids[n2 <= (spec.r_inner + c) ** 2]
    if spec.kind == "semi_annulus":
        # the discrete real-axis intervals: the first row above the axis,
        # split by the sign of the real part
        row1 = rs == 1
        arcs[Arc.LEFT] = ids[row1 & (region.xs < 0)]
        arcs[Arc.RIGHT] = ids[row1 & (region.xs > 0)]
    region.arcs = arcs
    return region


def arc_sites(region: Region, label: Arc):
    """Site ids of a boundary arc; raises if the arc is undefined for the kind."""
    if label not in _ARCS_BY_KIND[region.spec.kind]:
        raise RegionError(f"arc {label.value!r} undefined for {region.spec.kind}")
    return region.arcs[label]


def annular_window(region: Region, r_lo: float, r_hi: float):
    """Mask and arcs of the sub-annulus r_lo..r_hi inside an annular region.

    Returns (mask, inner_ids, outer_ids) using the same cell-inclusion rules
    as a standalone region with those radii, so events evaluated on the
    window of one configuration match the standalone region's law.
    """
    if not region.spec.annular:
        raise RegionError("annular_window requires an annular region")
    if not 0 < r_lo < r_hi <= region.spec.r_outer:
        raise RegionError(f"need 0 < r_lo < r_hi <= R, got {r_lo}, {r_hi}")
    c = HEX_CIRCUMRADIUS
    qs = region.qs.astype(np.int64)
    rs = region.rs.astype(np.int64)
    n2 = qs * qs + qs * rs + rs * rs
    lo2, hi2 = (r_lo - c) ** 2, (r_hi - c) ** 2
    mask = (n2 >= lo2) & (n2 < hi2)
    ids = np.arange(region.n, dtype=np.int64)
    inner = ids[mask & (n2 <= (r_lo + c) ** 2)]
    outer_flag = np.zeros(region.n, dtype=bool)
    for dq, dr in NEIGHBOR_OFFSETS:
        nq, nr = qs + dq, rs + dr
        outer_flag |= (nq * nq + nq * nr + nr * nr) >= hi2
    outer = ids[mask & outer_flag]
    return mask, inner, outer
