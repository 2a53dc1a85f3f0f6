"""Break-date estimation with continuous-record confidence sets."""

from ._backend import BACKEND
from .core import (
    BreakdateError,
    DegenerateDesign,
    DegenerateDomain,
    InvalidData,
    InvalidSpec,
    ModelSpec,
    OlsFit,
    OutOfRange,
    TimeSeriesDataset,
    Underdetermined,
    Unsupported,
    WeakIdentification,
    build_design,
    ols_fit,
)
from .breakscan import (
    BreakEstimate,
    SsrProfile,
    estimate_given_break,
    scan_break,
    two_step_predictable,
)

from .plugin import PluginParams, compute_plugins, lrv_qs_prewhitened
from .limitsim import (
    LimitDraws,
    LimitSimConfig,
    argmax_cdf,
    argmax_quantile,
    simulate_general,
    simulate_stationary,
)
from .confsets import (
    ConfidenceSet,
    DensityEstimate,
    bai_confidence_interval,
    hdr_confidence_set,
    hdr_threshold,
    kde,
)
from .dgp import MODELS, DgpSpec, Sample, fractional_diff_coeffs, generate
from .mcharness import McCell, run_cell, sup_wald, sup_wald_critical_value

__version__ = "0.1.0"
