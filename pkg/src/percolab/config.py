"""Percolation configurations: sampling, enumeration, and transforms.

A configuration colors each site of a region blue (open) or yellow (closed).
Colors come from a counter-based PRF of (seed, site id), so a configuration
is a pure function of (region, p, seed) independent of evaluation order.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from ._rng import fill_bernoulli, prf
from .lattice import Region


class Color(Enum):
    BLUE = "blue"
    YELLOW = "yellow"

    def swap(self) -> "Color":
        return Color.YELLOW if self is Color.BLUE else Color.BLUE


class Configuration:
    """Immutable coloring of a region; `blue[i]` is True iff site i is blue."""

    def __init__(self, region: Region, blue: np.ndarray, p: float, seed: int):
        if len(blue) != region.n:
            raise ValueError("color array length must match region size")
        blue = np.asarray(blue, dtype=bool)
        blue.setflags(write=False)
        self.region = region
        self.blue = blue
        self.p = p
        self.seed = seed

    def color(self, site) -> Color:
        return Color.BLUE if self.blue[self.region.index[site]] else Color.YELLOW

    def blue_count(self) -> int:
        return int(self.blue.sum())

    def __eq__(self, other):
        return (
            isinstance(other, Configuration)
            and self.region is other.region
            and bool(np.array_equal(self.blue, other.blue))
        )

    def __repr__(self):
        return (
            f"Configuration({self.region.spec}, p={self.p}, seed={self.seed}, "
            f"blue={self.blue_count()}/{self.region.n})"
        )


def sample_config(region: Region, p: float, seed: int) -> Configuration:
    """Color each site independently blue with probability p.

    Site i's color is a function of (seed, i) only; two samples with the
    same seed and nested p agree wherever the smaller-p one is blue.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    blue = np.empty(region.n, dtype=np.bool_)
    fill_bernoulli(np.uint64(seed & (2**64 - 1)), region.n, p, blue)
    return Configuration(region, blue, p, seed)


def trial_seed(master_seed: int, trial: int) -> int:
    """Per-trial configuration seed derived from a master seed."""
    return prf(master_seed, trial)


def complement(config: Configuration) -> Configuration:
    """Swap every color; p becomes 1 - p."""
    return Configuration(config.region, ~config.blue, 1.0 - config.p, config.seed)


def flip_site(config: Configuration, site) -> Configuration:
    """New configuration differing only at the given site."""
    if site not in config.region.index:
        raise ValueError(f"site {site} not in region")
    blue = config.blue.copy()
    blue[config.region.index[site]] ^= True
    return Configuration(config.region, blue, config.p, config.seed)


ENUMERATION_LIMIT = 24


def enumerate_configs(region: Region):
    """Yield all 2^n colorings of a small region in binary-counter order.

    Site i is blue in configuration m iff bit i of m is set; each carries
    p = 1/2 (uniform weight) and seed = m.
    """
    n = region.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(
            f"region has {n} sites; exhaustive enumeration is capped at "
            f"{ENUMERATION_LIMIT}"
        )
    bits = np.arange(n)
    for m in range(1 << n):
        blue = (m >> bits) & 1
        yield Configuration(region, blue.astype(bool), 0.5, m)


def config_from_bits(region: Region, m: int) -> Configuration:
    """The single enumeration configuration with blue mask m."""
    bits = np.arange(region.n)
    return Configuration(region, ((m >> bits) & 1).astype(bool), 0.5, m)


def dump_config(config: Configuration) -> str:
    """Stable debug dump: one line per site, 'q r B|Y', in site-id order."""
    lines = []
    for i in range(config.region.n):
        q, r = config.region.site(i)
        lines.append(f"{q} {r} {'B' if config.blue[i] else 'Y'}")
    return "\n".join(lines) + "\n"
