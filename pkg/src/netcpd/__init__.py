"""Change-point detection and localization for sequences of random networks.

The pipeline: draw random candidate intervals, scan each with a two-sample
CUSUM inner product inside a recursive binary segmentation, then sharpen
each found change point by projecting onto a spectrally denoised CUSUM
direction.  Simulators and a seeded Monte Carlo harness reproduce the
detection phase transition and the localization rates the method attains.
"""

__version__ = "0.1.0"

from .binseg import (
    BinsegConfig,
    Detection,
    DetectionResult,
    binseg_detect,
    default_threshold,
    estimate_density,
)
from .cusum import (
    CusumGram,
    PrefixSums,
    cusum_inner_product,
    cusum_weights,
    matrix_cusum,
    scalar_cusum,
)
from .intervals import (
    IntervalSet,
    draw_intervals,
    flanking_event,
    flanking_probability_bound,
    flanking_sets,
    recommended_interval_count,
)
from .model import (
    SbmSpec,
    Scenario,
    SplitSample,
    generate_sequence,
    lecam_hard_instance,
    load_scenario,
    sample_adjacency,
    save_scenario,
    sbm_theta,
    scenario_digest,
    scenario_parameters,
    split_sample,
    two_block_swap_scenario,
)
from .refine import (
    RefineConfig,
    RefineResult,
    default_refine_params,
    local_refine,
)
from .usvt import SpectralError, usvt, usvt_error_bound

__all__ = [
    "__version__",
    "BinsegConfig",
    "CusumGram",
    "Detection",
    "DetectionResult",
    "IntervalSet",
    "PrefixSums",
    "RefineConfig",
    "RefineResult",
    "SbmSpec",
    "Scenario",
    "SpectralError",
    "SplitSample",
    "binseg_detect",
    "cusum_inner_product",
    "cusum_weights",
    "default_refine_params",
    "default_threshold",
    "draw_intervals",
    "estimate_density",
    "flanking_event",
    "flanking_probability_bound",
    "flanking_sets",
    "generate_sequence",
    "lecam_hard_instance",
    "load_scenario",
    "local_refine",
    "matrix_cusum",
    "recommended_interval_count",
    "sample_adjacency",
    "save_scenario",
    "sbm_theta",
    "scalar_cusum",
    "scenario_digest",
    "scenario_parameters",
    "split_sample",
    "two_block_swap_scenario",
    "usvt",
    "usvt_error_bound",
]
