"""Convex-hull covers and the truncated-moment functionals that bound
expected suprema ``E sup_{t in T} <t, X>`` of canonical processes."""

from .distributions import (
    RandomFamily, Regularity, lp_norm_linear, moment_condition_check, sample_matrix,
    standard_family, tail_comparison, truncated_abs_mean,
)
from .estimate import Estimate
from .functionals import (
    FunctionalReport, b_sup, big_m, compare, little_m, solve, stable_ball_mean, tilde_m,
    truncation_curve,
)
from .geometry import (
    Ellipsoid, FinitePointSet, HullCover, IndexSet, L1Ball, L2Ball, LinearImageLq, LqBall,
    canonical_cover, containment_probe, haar_orthogonal, member_abs_hull, support,
)
from .constructions import (
    BlockDecomposition, PartitionTree, block_cover_b2, ellipsoid_blocks, ellipsoid_cover,
    extract_cover_from_partition, gamma_bruteforce, gamma_partition, lq_cover, lq_embed,
    rotation_cover_b2, separated_net,
)
from .experiments import ExperimentConfig, ExperimentReport, run

__version__ = "0.1.0"
