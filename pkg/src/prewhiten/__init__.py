"""Spurious-correlation diagnostics for serially dependent time series.

Serial dependence inflates the sample cross-correlation of orthogonal (or
weakly correlated) stationary processes, which depresses the minimum
eigenvalue of the sample correlation matrix and with it the accuracy of
penalized regression. This package provides the closed-form finite-sample
density and tail probabilities of that spurious correlation for Gaussian
AR(1) pairs, Monte Carlo machinery to measure the effect in general designs,
and the remedy: regressions (OLS and l1-penalized) run on prewhitened
covariates, i.e. the residuals of per-series ARMA fits, together with a
rolling-window forecasting pipeline built on them.
"""

from .armafilter import ArmaFit, ArmaOrder, filter_panel, fit_ar, fit_arma, ljung_box, select_order
from .dgp import (
    ArmaDgpSpec,
    InnovationSpec,
    McConfig,
    ResponseDgpSpec,
    StationarityError,
    ar1_exact,
    arma_recursion,
    gen_arma_panel,
    gen_innovations,
    gen_response,
    rep_rng,
)
from .estimators import (
    CoFit,
    CoOptions,
    ConvergenceError,
    DynamicRegressionFit,
    HacOptions,
    LassoFit,
    ULassoFit,
    UOlsFit,
    build_prewhitened_design,
    cochrane_orcutt,
    coef_error,
    dynamic_regression,
    lambda_max,
    lasso_bic,
    lasso_cd,
    nw_adjust,
    nw_bandwidth,
    soft_threshold,
    u_lasso,
    u_ols,
)
from .statcore import (
    DegenerateVarianceError,
    RegressionFit,
    SeriesPanel,
    SingularDesignError,
    correlation_matrix,
    eigenvalues,
    max_offdiag_abs,
    min_eigenvalue,
    ols,
    sample_correlation,
    standardize,
    standardize_panel,
)
from .theory import (
    Ar1PairSpec,
    DensityGrid,
    corr_cdf,
    corr_density,
    density_grid,
    eigen_tail_lower_bound,
    gamma_params_v,
    lambda_lower_bound,
    limiting_tstat_variance,
    prs_error_bound,
    tail_prob,
    var_b,
)

__version__ = "0.1.0"
