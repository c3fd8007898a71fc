"""Bayesian censored linear regression with AR(p) errors.

Estimation runs a Gibbs sampler whose data-augmentation step replaces each
censored observation with the mean of several truncated-normal draws from its
one-step conditional; a banded whitening transform gives the exact Gaussian
likelihood. Model checking and selection use leave-future-out jackknife
residuals, DIC, and WAIC evaluated on the augmented data.
"""

__version__ = "0.1.0"

from .assessment import (
    AssessmentReport,
    JackknifeResult,
    assess,
    dic,
    jackknife_residuals,
    pointwise_log_likelihood,
    predictive_moments,
    waic,
)
from .diagnostics import GewekeResult, acf, geweke, running_quantiles, write_trace_csv
from .distributions import (
    RngStream,
    Side,
    TruncatedNormalSpec,
    as_stream,
    norm_cdf,
    norm_pdf,
    sample_inverse_gamma,
    sample_multivariate_normal,
    sample_truncated_normal,
    truncated_normal_draws,
)
from .model import (
    ArCovariance,
    CensoredSeries,
    Direction,
    ParamDraw,
    QTransform,
    ar_autocovariance,
    build_q,
    complete_log_likelihood,
    intercept_design,
    stationary,
    transform_design,
    transform_series,
    validate_design,
    with_intercept,
)
from .sampler import (
    Chain,
    McmcConfig,
    ModelSpec,
    ParamSummary,
    augment_once,
    conditional_mean,
    draw_beta,
    draw_rho,
    draw_sigma2,
    fgls_init,
    hpd_interval,
    one_step_moments,
    posterior_summary,
    rho_log_target,
    run_gda_msm,
    yule_walker,
)
from .simstudy import (
    CENSOR_GRID,
    MODEL_PARAMS,
    RHO_GRID,
    SIZE_GRID,
    Scenario,
    load_scenarios,
    run_study,
    save_scenarios,
    simulate,
    study_markdown,
    table_grid,
)

__all__ = [name for name in dir() if not name.startswith("_")]
