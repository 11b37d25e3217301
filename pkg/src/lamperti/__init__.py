"""Monte Carlo laboratory for random walks with asymptotically zero drift.

Simulates discrete-time processes on the half-line whose mean drift at
position x decays like rho * x**(-beta) with beta in [0, 1), and checks
the quantitative laws of that regime against large deterministic
ensembles: transience, growth of order t**(1/(1+beta)), the strong law
X_t / t**(1/(1+beta)) -> lambda(rho, beta), and the Gaussian fluctuation
law around it.
"""

__version__ = "0.1.0"

from .theory import (
    DriftParams,
    MomentParams,
    TheoremApplicability,
    applicability,
    bd_clt_std,
    clt_std,
    growth_exponent,
    lambda_const,
)
from .models import (
    BDChainParams,
    HalfLineWalkParams,
    HiddenStateParams,
    NoiseSpec,
    OscDriftParams,
    RdWalkParams,
    StepResult,
    bd_probs,
    bd_step,
    exact_drift_lyapunov,
    exact_drift_power,
    halfline_step,
    hidden_step,
    osc_step,
    rd_norm,
    rd_step,
)
from .engine import (
    EnsembleConfig,
    EnsembleResult,
    ResourceBudgetError,
    TrajectoryRecord,
    make_grid,
    run_ensemble,
    write_records_csv,
    write_transitions_csv,
)
from .estimators import (
    CheckResult,
    DriftFit,
    FitDegenerateError,
    bracket_check,
    clt_check,
    default_checks,
    doob_check,
    drift_fit_check,
    escape_exponent_check,
    fit_drift,
    lln_check,
    model_drift_params,
    model_sigma2,
    rd_norm_direction,
    run_checks,
    transience_check,
    upper_bound_check,
)
from .stats import EstimateCI, InsufficientDataError, ks_test, mean_ci, normal_cdf
from .rng import Stream, seed_stream

__all__ = [
    "__version__",
    "DriftParams",
    "MomentParams",
    "TheoremApplicability",
    "applicability",
    "bd_clt_std",
    "clt_std",
    "growth_exponent",
    "lambda_const",
    "BDChainParams",
    "HalfLineWalkParams",
    "HiddenStateParams",
    "NoiseSpec",
    "OscDriftParams",
    "RdWalkParams",
    "StepResult",
    "bd_probs",
    "bd_step",
    "exact_drift_lyapunov",
    "exact_drift_power",
    "halfline_step",
    "hidden_step",
    "osc_step",
    "rd_norm",
    "rd_step",
    "EnsembleConfig",
    "EnsembleResult",
    "ResourceBudgetError",
    "TrajectoryRecord",
    "make_grid",
    "run_ensemble",
    "write_records_csv",
    "write_transitions_csv",
    "CheckResult",
    "DriftFit",
    "FitDegenerateError",
    "bracket_check",
    "clt_check",
    "default_checks",
    "doob_check",
    "drift_fit_check",
    "escape_exponent_check",
    "fit_drift",
    "lln_check",
    "model_drift_params",
    "model_sigma2",
    "rd_norm_direction",
    "run_checks",
    "transience_check",
    "upper_bound_check",
    "EstimateCI",
    "InsufficientDataError",
    "ks_test",
    "mean_ci",
    "normal_cdf",
    "Stream",
    "seed_stream",
]
