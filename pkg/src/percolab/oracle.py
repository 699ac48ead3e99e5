"""Exact probabilities by exhaustive enumeration on tiny regions.

All 2^n colorings of a region are enumerated in binary-counter order and an
event is evaluated on each; probabilities come out as exact rationals
(dyadic at p = 1/2).  The disjoint-path brute force here is an independent
check of the max-flow crossing counter: it enumerates path families
directly and never calls the flow code.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from numba import njit

from .config import Color, Configuration
from .connectivity import ArmEvent, _event_plan, _eval_plan_kernel
from .lattice import Arc, Region, RegionSpec, arc_sites, build_region

ENUMERATION_LIMIT = 24
SEQUENCE_LIMIT = 22
BRUTE_FORCE_LIMIT = 18


class OracleBudgetError(ValueError):
    pass


@njit(cache=True)
def _enum_kernel(
    n, nbr6, mode, want_blue, jk, src, dst_flag, dst_ids,
    mask, left, right_flag, bottom, bottom_flag, seq,
):
    """Hit counts of one event over all 2^n configurations, by blue count."""
    counts = np.zeros(n + 1, np.int64)
    blue = np.empty(n, np.bool_)
    for m in range(1 << n):
        pop = 0
        for i in range(n):
            b = (m >> i) & 1
            blue[i] = b == 1
            pop += b
        if _eval_plan_kernel(
            mode, want_blue, jk, blue, nbr6, src, dst_flag, dst_ids,
            mask, left, right_flag, bottom, bottom_flag, seq,
        ):
            counts[pop] += 1
    return counts


@njit(cache=True)
def _enum_pair_kernel(
    n, nbr6,
    mode_a, want_a, jk_a, src_a, dstf_a, dsti_a, mask_a, left_a, rflag_a, bot_a, bflag_a, seq_a,
    mode_b, want_b, jk_b, src_b, dstf_b, dsti_b, mask_b, left_b, rflag_b, bot_b, bflag_b, seq_b,
):
    """Joint hit counts (A, B, A and B) over all configurations, by blue count."""
    counts = np.zeros((3, n + 1), np.int64)
    blue = np.empty(n, np.bool_)
    for m in range(1 << n):
        pop = 0
        for i in range(n):
            b = (m >> i) & 1
            blue[i] = b == 1
            pop += b
        ha = _eval_plan_kernel(
            mode_a, want_a, jk_a, blue, nbr6, src_a, dstf_a, dsti_a,
            mask_a, left_a, rflag_a, bot_a, bflag_a, seq_a,
        )
        hb = _eval_plan_kernel(
            mode_b, want_b, jk_b, blue, nbr6, src_b, dstf_b, dsti_b,
            mask_b, left_b, rflag_b, bot_b, bflag_b, seq_b,
        )
        if ha:
            counts[0, pop] += 1
        if hb:
            counts[1, pop] += 1
        if ha and hb:
            counts[2, pop] += 1
    return counts


def _prob_from_counts(counts, n, p) -> Fraction:
    pf = Fraction(p)
    qf = 1 - pf
    total = Fraction(0)
    for k in range(n + 1):
        c = int(counts[k])
        if c:
            total += c * pf**k * qf ** (n - k)
    return total


def _check_budget(region: Region, limit: int):
    if region.n > limit:
        raise OracleBudgetError(
            f"region has {region.n} sites; enumeration budget is {limit}"
        )


def exact_event_probability(event: ArmEvent, p=Fraction(1, 2)) -> Fraction:
    """Exact probability of an arm event under iid site colors."""
    region = build_region(event.spec)
    _check_budget(region, ENUMERATION_LIMIT)
    plan = _event_plan(event, region)
    counts = _enum_kernel(region.n, region.nbr6, *plan)
    return _prob_from_counts(counts, region.n, p)


def exact_pair_probabilities(event_a: ArmEvent, event_b: ArmEvent, p=Fraction(1, 2)):
    """Exact (P(A), P(B), P(A and B)) for two events on the same region."""
    if event_a.spec != event_b.spec:
        raise ValueError("events must share a region")
    region = build_region(event_a.spec)
    _check_budget(region, ENUMERATION_LIMIT)
    plan_a = _event_plan(event_a, region)
    plan_b = _event_plan(event_b, region)
    counts = _enum_pair_kernel(region.n, region.nbr6, *plan_a, *plan_b)
    n = region.n
    return tuple(_prob_from_counts(counts[i], n, p) for i in range(3))


def color_switch_check(spec: RegionSpec, j: int, seq_a, seq_b, p=Fraction(1, 2)) -> bool:
    """Exact equality of the probabilities of j disjoint crossings with the
    two prescribed color sequences (ordered bottom to top)."""
    if len(seq_a) != j or len(seq_b) != j:
        raise ValueError("sequences must have length j")
    region = build_region(spec)
    _check_budget(region, SEQUENCE_LIMIT)
    from .connectivity import prescribed_sequence

    ea = ArmEvent(spec, "prescribed_sequence", colors=tuple(seq_a))
    eb = ArmEvent(spec, "prescribed_sequence", colors=tuple(seq_b))
    return exact_event_probability(ea, p) == exact_event_probability(eb, p)


# ---------------------------------------------------------------------------
# brute-force disjoint paths (independent of the flow kernels)


def max_disjoint_paths_bruteforce(config: Configuration, color: Color, arc_a: Arc, arc_b: Arc) -> int:
    """Maximum family of pairwise vertex-disjoint monochromatic paths from
    arc_a to arc_b, by exhaustive search over simple paths."""
    region = config.region
    if region.n > BRUTE_FORCE_LIMIT:
        raise OracleBudgetError(
            f"region has {region.n} sites; brute-force budget is {BRUTE_FORCE_LIMIT}"
        )
    want = color is Color.BLUE
    colored = [i for i in range(region.n) if bool(config.blue[i]) == want]
    colored_mask = 0
    for i in colored:
        colored_mask |= 1 << i
    nbr = region.nbr6
    srcs = [int(i) for i in arc_sites(region, arc_a)]
    dst_set = set(int(i) for i in arc_sites(region, arc_b))

    def paths_from(avail: int):
        """All simple colored paths src -> dst inside avail, as bitmasks."""
        out = []
        for s in srcs:
            if not (avail >> s) & 1:
                continue
            stack = [(s, 1 << s)]
            while stack:
                v, used = stack.pop()
                if v in dst_set:
                    out.append(used)
                    continue
                for k in range(6):
                    w = int(nbr[v, k])
                    if w >= 0 and (avail >> w) & 1 and not (used >> w) & 1:
                        stack.append((w, used | (1 << w)))
        return out

    memo = {}

    def best(avail: int) -> int:
        if avail in memo:
            return memo[avail]
        top = 0
        for pm in paths_from(avail):
            v = 1 + best(avail & ~pm)
            if v > top:
                top = v
        memo[avail] = top
        return top

    return best(colored_mask)
