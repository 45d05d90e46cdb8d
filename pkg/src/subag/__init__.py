"""Asymptotic risk of subagged regularized M-estimators.

Theory side: fixed-point solvers for the scalar systems that characterize
the risk of (ensembles of) convex regularized M-estimators under
proportional asymptotics.  Empirical side: a simulation engine that fits
the same estimators on subsamples and a consistent data-driven risk
estimator built from degrees of freedom.
"""

from .dof import DfReport, compute_df
from .errors import (
    ContractionUnavailableError,
    DegenerateCorrectionError,
    EnsembleFitError,
    InterpolationThresholdError,
    NoConvergenceError,
    PerfectRecoveryError,
)
from .fitting import (
    CD_BACKEND,
    EnsembleFit,
    FitOptions,
    FitResult,
    SubsampleSet,
    draw_subsamples,
    empirical_risk,
    ensemble_fit,
    fit,
    fit_interpolator,
)
from .models import (
    Dataset,
    Gaussian,
    GaussPointMass,
    PointMass,
    StudentT,
    TwoPointSparse,
    gen_data,
    load_dataset,
    save_dataset,
)
from .prox import (
    ElasticNet,
    Huber,
    Lasso,
    NoPenalty,
    Ridge,
    Square,
    env_prime,
    loss_grad,
    prox,
    prox_prime,
    soft_threshold,
)
from .quadrature import (
    IntegrationError,
    QuadratureConfig,
    expect_corr_pair,
    expect_noise_g,
    expect_theta_h,
    expect_theta_pair,
)
from .risk_estimator import EstReport, est_component, est_ensemble
from .systems import (
    CorrSolution,
    EnsembleConfig,
    LsqSolution,
    SystemSolution,
    ensemble_risk,
    eval_F_loss,
    eval_F_reg,
    homogeneous_risk,
    sign_pattern,
    solve_sys1a,
    solve_sys1b,
    solve_sys2,
    solve_sys3,
    solve_sys4,
    system1a_defect,
)

__version__ = "0.1.0"
