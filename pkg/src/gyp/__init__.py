"""Shannon, Renyi and Tsallis entropies and relative entropies, computed both
as integrals and as certified suprema of partition functionals."""

from .divergences import (
    OrderParam,
    divergence,
    entropy,
    kl_divergence,
    q_log,
    renyi_divergence,
    renyi_entropy,
    renyi_to_tsallis,
    shannon_entropy,
    tsallis_divergence,
    tsallis_entropy,
    tsallis_to_renyi,
)
from .engine import RefinementConfig, propose_splits, run_alpha_sweep, supremum_estimate
from .measures import (
    Cell,
    beta,
    cell_mass,
    check_absolute_continuity,
    density,
    discrete,
    rn_derivative,
    truncated_normal,
    uniform,
    validate_measure,
)
from .partitions import Partition, common_refinement, holder_cell_check, partition_stats, partition_value
from .quadrature import QuadratureConfig
from .simple_approx import induced_measure, quantize_rn_derivative, simple_divergence

__version__ = "0.1.0"
