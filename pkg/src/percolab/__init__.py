"""percolab: a desk-scale laboratory for critical site percolation on the
triangular lattice — exact small-region oracles, Monte Carlo arm-event
estimation, interface exploration walks, and power-law exponent fits."""

from .lattice import (
    Arc,
    Region,
    RegionError,
    RegionSpec,
    annulus,
    arc_sites,
    build_region,
    disc,
    neighbors,
    parallelogram,
    position,
    semi_annulus,
)
from .config import (
    Color,
    Configuration,
    complement,
    dump_config,
    enumerate_configs,
    flip_site,
    sample_config,
)
from .connectivity import (
    ArmEvent,
    ClusterLabels,
    crossing_cluster_count,
    eval_event,
    half_plane_arms,
    k_blue_clusters,
    label_clusters,
    max_disjoint_crossings,
    one_arm_event,
    parallelogram_crossing,
    parallelogram_duality,
    polychromatic_arms,
    prescribed_sequence,
    two_clusters_event,
)
from .explore import (
    ExplorationPath,
    WalkStatus,
    WindingVerdict,
    annulus_exploration,
    boundary_vertex_near,
    chordal_exploration,
    ep_crossing_event,
    one_arm_nested,
    semi_annulus_crossing_count,
)

__version__ = "0.1.0"
