"""Decompositions of symmetric alpha-stable and max-stable processes on finite spaces."""

from .core import (
    DEFAULT_TOL,
    CanonicalSpectralMeasure,
    FinitePointSpace,
    SpectralRep,
    canonicalize,
    check_alpha,
    disjoint_union,
    same_process,
    scale_functional,
    validate_rep,
)
from .decompose import (
    Partition,
    WeightFamily,
    common_component,
    complement_weights,
    has_independent_increments,
    independent_increments_rep,
    is_minimal,
    make_components,
    minimalize,
    ratio_partition,
    recover_weights,
    verify_decomposition,
)
from .maxstable import (
    MaxStableRep,
    alpha_power_transform,
    associate,
    build_max_flow_rep,
    deassociate,
    frechet_fdd_cdf,
    is_indecomposable_max,
    make_max_components,
    max_same_process,
    recover_max_weights,
    verify_max_decomposition,
)
from .simulate import (
    SampleMatrix,
    SimulationConfig,
    check_empirical_cdf,
    check_empirical_cf,
    sample_frechet,
    sample_sas,
)
from .stationary import (
    FlowAction,
    IndecomposabilityVerdict,
    StationaryProcessSpec,
    build_flow_rep,
    ergodic_decomposition,
    invariant_partition,
    is_indecomposable,
    is_stationary,
    mma_build,
    recover_stationary_weights,
    stationary_components,
)

__version__ = "0.1.0"
