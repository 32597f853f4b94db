"""Average structural function estimation from stated and revealed choices.

The package covers three estimation regimes for a binary choice model with
an endogenous attribute:

* matched data (decisions and probability reports for the same people):
  point estimation by kernel regression plus the nonparametric bootstrap;
* unmatched data (decisions and reports in separate samples): sharp bounds
  from optimal-transport duality, tightened by an excluded covariate;
* inference on the bounds via a numerical directional-derivative bootstrap.

A simulation benchmark with closed-form oracles and a Monte Carlo coverage
harness round out the toolkit; the ``asfbounds`` command line exposes all
of it for batch runs.
"""

from .bounds import (
    BoundsResult,
    CellBounds,
    bounds_given_z,
    bounds_with_exclusion,
    moment_bounds_generic_h,
    objective_lower,
    objective_upper,
    optimize_scalar,
    two_point_closed_form,
)
from .config import AnalysisConfig, rng_stream
from .data import (
    MatchedDataset,
    MatchedObservation,
    RevealedDataset,
    RevealedObservation,
    StatedDataset,
    StatedObservation,
    load_matched_csv,
    load_revealed_csv,
    load_stated_csv,
    subsample,
)
from .density import DensityFunction, trapezoid_integrate
from .exceptions import (
    BoxBindingWarning,
    DataValidationError,
    DiscreteSuggestionWarning,
    EmptyRegionWarning,
    EstimationError,
    SmallCellWarning,
    ZeroVarianceError,
)
from .inference import (
    ConfidenceRegion,
    bootstrap_theta,
    confidence_region,
    estimate_theta,
    numerical_derivative,
)
from .kernels import (
    KernelFit,
    bandwidth_rule,
    conditional_mean_complement,
    count_density,
    epanechnikov,
    fit_kernel_density,
    kde_fit,
    nadaraya_watson,
)
from .matched import MatchedEstimate, bootstrap_matched, estimate_asf_matched
from .simulation import (
    DgpDraw,
    MonteCarloCell,
    MonteCarloPlan,
    MonteCarloReport,
    SimulationDraws,
    analytic_bounds,
    analytic_theta,
    normal_cdf,
    normal_quantile,
    run_monte_carlo,
    simulate_draws,
    simulate_sample,
    true_asf,
)
from .theta import ThetaCell, ThetaEstimate

__version__ = "0.1.0"

__all__ = [
    "AnalysisConfig",
    "BoundsResult",
    "BoxBindingWarning",
    "CellBounds",
    "ConfidenceRegion",
    "DataValidationError",
    "DensityFunction",
    "DgpDraw",
    "DiscreteSuggestionWarning",
    "EmptyRegionWarning",
    "EstimationError",
    "KernelFit",
    "MatchedDataset",
    "MatchedEstimate",
    "MatchedObservation",
    "MonteCarloCell",
    "MonteCarloPlan",
    "MonteCarloReport",
    "RevealedDataset",
    "RevealedObservation",
    "SimulationDraws",
    "SmallCellWarning",
    "StatedDataset",
    "StatedObservation",
    "ThetaCell",
    "ThetaEstimate",
    "ZeroVarianceError",
    "analytic_bounds",
    "analytic_theta",
    "bandwidth_rule",
    "bootstrap_matched",
    "bootstrap_theta",
    "bounds_given_z",
    "bounds_with_exclusion",
    "conditional_mean_complement",
    "confidence_region",
    "count_density",
    "epanechnikov",
    "estimate_asf_matched",
    "estimate_theta",
    "fit_kernel_density",
    "kde_fit",
    "load_matched_csv",
    "load_revealed_csv",
    "load_stated_csv",
    "moment_bounds_generic_h",
    "nadaraya_watson",
    "normal_cdf",
    "normal_quantile",
    "numerical_derivative",
    "objective_lower",
    "objective_upper",
    "optimize_scalar",
    "rng_stream",
    "run_monte_carlo",
    "simulate_draws",
    "simulate_sample",
    "subsample",
    "trapezoid_integrate",
    "true_asf",
    "two_point_closed_form",
]
