"""Success probability and area spectral efficiency of a vehicular network
modeled as a Cox process on a Poisson line process, with a Monte-Carlo
cross-check."""

from .analytic import (
    AseResult,
    NonUnimodalObjective,
    OptimalP,
    PcModel,
    ase,
    laplace_i0,
    laplace_i1,
    laplace_total,
    optimal_p,
    pc_limit_1d,
    pc_limit_2d,
    success_probability,
)
from .params import ConfigError, DivergentPathLoss, InvalidParameter, NetworkParams, load_config, validate
from .quadrature import QuadratureNonConvergence, QuadratureSpec, integrate_semi_infinite
from .simulate import EstimateRecord, estimate_pc, estimate_pc_thresholds

__version__ = "0.1.0"
