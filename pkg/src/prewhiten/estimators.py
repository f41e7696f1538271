"""Regression estimators compared on serially dependent data.

Four ways of handling autocorrelation around a linear regression: HAC
(Newey-West) standard errors on top of plain least squares, Cochrane-Orcutt
feasible GLS, dynamic regression with lagged variables, and regression on
prewhitened covariates (residuals of per-column ARMA fits). On top of these,
an l1-penalized path solver (cyclic coordinate descent with soft
thresholding) with BIC tuning, and its prewhitened variant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .armafilter import filter_panel
from .statcore import (
    DegenerateVarianceError,
    RegressionFit,
    SeriesPanel,
    as_series,
    ols,
)

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is an optional accelerator
    _HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        return wrap


class ConvergenceError(RuntimeError):
    """An iterative estimator failed to converge."""


# ---------------------------------------------------------------------------
# HAC (Newey-West) adjustment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HacOptions:
    """Bartlett-kernel bandwidth; ``None`` applies m = round(0.75 T^(1/3))."""

    bandwidth: int | None = None


def nw_bandwidth(T: int) -> int:
    """Rule-of-thumb bandwidth, rounded to the nearest integer, at least 1."""
    return max(1, int(round(0.75 * T ** (1.0 / 3.0))))


def _partial_out(design: np.ndarray, j: int) -> np.ndarray:
    others = np.delete(design, j, axis=1)
    if others.shape[1] == 0:
        return design[:, j]
    coef, _, _, _ = np.linalg.lstsq(others, design[:, j], rcond=None)
    return design[:, j] - others @ coef

def _bartlett_factor(v: np.ndarray, m: int) -> float:
    denom = float(v @ v)
    if denom <= 0:
        return 1.0
    f = 1.0
    for j in range(1, m):
        rho_j = float(v[j:] @ v[:-j]) / denom
        f += 2.0 * (m - j) / m * rho_j
    return max(f, 1e-8)


def nw_adjust(fit: RegressionFit, X, opts: HacOptions = HacOptions()) -> RegressionFit:
    """Replace classical standard errors by autocorrelation-consistent ones.

    Point estimates are untouched. For each coefficient the remaining
    regressors are partialled out, and the variance takes the single-regressor
    sandwich form

        S^2 = (1/T) * [(1/(T-2)) sum x~_t^2 e_t^2] / [(1/T) sum x~_t^2]^2 * f,

    where f applies Bartlett weights (m-j)/m to the first m-1 autocorrelations
    of v_t = x~_t e_t. t-statistics are recomputed from the new errors.
    """
    design, _ = _ols_design(fit, X)
    T = design.shape[0]
    m = opts.bandwidth if opts.bandwidth is not None else nw_bandwidth(T)
    if m < 1:
        raise ValueError("bandwidth must be >= 1")
    if m >= T:
        raise ValueError(f"bandwidth {m} must be smaller than T = {T}")
    e = fit.residuals

    se_all = np.empty(design.shape[1])
    for j in range(design.shape[1]):
        x_t = _partial_out(design, j)
        v = x_t * e
        f_hat = _bartlett_factor(v, m)
        sxx = float(x_t @ x_t)
        s2 = (1.0 / T) * ((1.0 / (T - 2)) * float((x_t * e) @ (x_t * e))) / (sxx / T) ** 2 * f_hat
        se_all[j] = np.sqrt(s2)

    if fit.intercept_included:
        se_int, se = float(se_all[0]), se_all[1:]
    else:
        se_int, se = float("nan"), se_all
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, fit.coefficients / se, 0.0)
    return RegressionFit(
        coefficients=fit.coefficients.copy(),
        intercept=fit.intercept,
        residuals=fit.residuals,
        se_classical=se,
        t_stats=tstats,
        r_squared=fit.r_squared,
        fitted=fit.fitted,
        sigma2=fit.sigma2,
        df_resid=fit.df_resid,
        intercept_included=fit.intercept_included,
        se_intercept=se_int,
        names=fit.names,
    )


def _ols_design(fit: RegressionFit, X):
    values = X.values if isinstance(X, SeriesPanel) else np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != fit.residuals.shape[0]:
        raise ValueError("design rows do not match the fitted sample")
    if fit.intercept_included:
        design = np.column_stack([np.ones(values.shape[0]), values])
    else:
        design = values
    return design, values


# ---------------------------------------------------------------------------
# Cochrane-Orcutt
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CoOptions:
    """Stopping rule for the Cochrane-Orcutt iteration."""

    tol: float = 1e-6
    max_iter: int = 50


@dataclass
class CoFit:
    """Cochrane-Orcutt output.

    Slopes live on the original variable scale (quasi-differencing leaves
    them unchanged); the intercept is mapped back through 1/(1 - rho).
    Standard errors, t-statistics and R^2 come from the final transformed
    regression, which is the one with serially uncorrelated errors.
    """

    coefficients: np.ndarray
    intercept: float
    rho: float
    n_iter: int
    converged: bool
    residuals: np.ndarray = field(repr=False)
    transformed: RegressionFit = field(repr=False)

    @property
    def se_classical(self) -> np.ndarray:
        return self.transformed.se_classical

    @property
    def t_stats(self) -> np.ndarray:
        return self.transformed.t_stats

    @property
    def r_squared(self) -> float:
        return self.transformed.r_squared


def _lag1_autocorr(e: np.ndarray) -> float:
    denom = float(e @ e)
    if denom <= 0:
        return 0.0
    return float(e[1:] @ e[:-1]) / denom


def cochrane_orcutt(y, X, opts: CoOptions = CoOptions()) -> CoFit:
    """Iterative feasible GLS for a regression with AR(1) errors.

    Alternates between estimating the residual lag-1 autocorrelation and
    refitting on quasi-differenced data (from the second observation on,
    with no first-row rescue) until the autocorrelation estimate moves less
    than ``opts.tol`` or ``opts.max_iter`` transformations have been run.
    """
    y = as_series(y)
    values = X.values if isinstance(X, SeriesPanel) else np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if y.shape[0] < 10:
        raise ValueError("need at least 10 observations")

    fit = ols(y, values, intercept=True)
    beta = fit.coefficients
    alpha = fit.intercept
    tfit = fit
    rho = 0.0
    rho_prev = 0.0  # plain OLS is the rho = 0 member of the family
    n_iter = 0
    converged = False
    while n_iter < opts.max_iter:
        resid = y - alpha - values @ beta
        rho = _lag1_autocorr(resid)
        n_iter += 1
        if abs(rho) >= 1.0:
            raise ConvergenceError(f"autocorrelation estimate |{rho:.4f}| >= 1")
        if abs(rho - rho_prev) < opts.tol:
            converged = True
            break
        ys = y[1:] - rho * y[:-1]
        xs = values[1:] - rho * values[:-1]
        tfit = ols(ys, xs, intercept=True)
        beta = tfit.coefficients
        alpha = tfit.intercept / (1.0 - rho)
        rho_prev = rho
    residuals = y - alpha - values @ beta
    return CoFit(
        coefficients=beta,
        intercept=float(alpha),
        rho=float(rho),
        n_iter=n_iter,
        converged=converged,
        residuals=residuals,
        transformed=tfit,
    )


# ---------------------------------------------------------------------------
# dynamic regression
# ---------------------------------------------------------------------------


@dataclass
class DynamicRegressionFit:
    """Least squares on lagged response and lagged covariates.

    Design column order: y lags 1..p, then for each covariate its lags
    0..p. ``alpha`` extracts the lag-0 covariate coefficients.
    """

    fit: RegressionFit
    p: int
    n_covariates: int

    @property
    def alpha(self) -> np.ndarray:
        idx = [self.p + i * (self.p + 1) for i in range(self.n_covariates)]
        return self.fit.coefficients[idx]

    @property
    def alpha_t_stats(self) -> np.ndarray:
        idx = [self.p + i * (self.p + 1) for i in range(self.n_covariates)]
        return self.fit.t_stats[idx]

    @property
    def phi_y(self) -> np.ndarray:
        return self.fit.coefficients[: self.p]

    @property
    def r_squared(self) -> float:
        return self.fit.r_squared


def dynamic_regression(y, X, p: int) -> DynamicRegressionFit:
    """Regress y_t on p of its own lags and lags 0..p of every covariate.

    ``X`` is aligned so row t is the covariate vector entering the time-t
    equation; with ``p = 0`` this is plain least squares on that design.
    """
    y = as_series(y)
    values = X.values if isinstance(X, SeriesPanel) else np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if p < 0:
        raise ValueError("p must be >= 0")
    T, n = values.shape
    if y.shape[0] != T:
        raise ValueError("response and covariates have different lengths")
    cols = [y[p - l : T - l] for l in range(1, p + 1)]
    for i in range(n):
        for l in range(0, p + 1):
            cols.append(values[p - l : T - l, i])
    design = np.column_stack(cols) if cols else values[p:]
    fit = ols(y[p:], design, intercept=True)
    return DynamicRegressionFit(fit=fit, p=p, n_covariates=n)


# ---------------------------------------------------------------------------
# regression on prewhitened covariates
# ---------------------------------------------------------------------------


@dataclass
class PrewhitenedDesign:
    """Aligned design of y lags and lagged ARMA residuals."""

    response: np.ndarray
    design: np.ndarray
    y_lags: int
    n_covariates: int
    start: int
    arma_fits: list
    u_panel: SeriesPanel


def build_prewhitened_design(
    y,
    panel,
    y_lags: int = 1,
    p_max: int = 3,
    q_max: int = 0,
    x_lag: int = 1,
) -> PrewhitenedDesign:
    """Filter the panel and assemble [y lags | lagged residuals] rows.

    ``y`` and the panel are aligned in time (row t of each refers to time t);
    the design row for time t holds y_{t-1}..y_{t-y_lags} and the residual
    vector at t - x_lag.
    """
    y = as_series(y)
    values = panel.values if isinstance(panel, SeriesPanel) else np.asarray(panel, float)
    if values.ndim == 1:
        values = values[:, None]
    if y.shape[0] != values.shape[0]:
        raise ValueError("response and panel have different lengths")
    u_panel, fits = filter_panel(values, p_max=p_max, q_max=q_max)
    offset = max(f.offset for f in fits)  # residual row k is time k + offset
    T = y.shape[0]
    start = max(offset + x_lag, y_lags)
    if start >= T:
        raise ValueError("not enough observations after filtering and lagging")
    cols = [y[start - l : T - l] for l in range(1, y_lags + 1)]
    u = u_panel.values
    u_rows = u[start - x_lag - offset : T - x_lag - offset]
    for i in range(u.shape[1]):
        cols.append(u_rows[:, i])
    return PrewhitenedDesign(
        response=y[start:],
        design=np.column_stack(cols),
        y_lags=y_lags,
        n_covariates=u.shape[1],
        start=start,
        arma_fits=fits,
        u_panel=u_panel,
    )


@dataclass
class UOlsFit:
    """Least squares on the prewhitened working model."""

    fit: RegressionFit
    y_lags: int
    n_covariates: int
    arma_fits: list
    start: int

    @property
    def alpha(self) -> np.ndarray:
        return self.fit.coefficients[self.y_lags :]

    @property
    def alpha_t_stats(self) -> np.ndarray:
        return self.fit.t_stats[self.y_lags :]

    @property
    def phi_y(self) -> np.ndarray:
        return self.fit.coefficients[: self.y_lags]

    @property
    def r_squared(self) -> float:
        return self.fit.r_squared


def u_ols(
    y,
    panel,
    y_lags: int = 1,
    p_max: int = 3,
    q_max: int = 0,
    x_lag: int = 1,
) -> UOlsFit:
    """OLS of y_t on its own lags and the lagged prewhitened covariates."""
    d = build_prewhitened_design(y, panel, y_lags, p_max, q_max, x_lag)
    fit = ols(d.response, d.design, intercept=True)
    return UOlsFit(
        fit=fit,
        y_lags=d.y_lags,
        n_covariates=d.n_covariates,
        arma_fits=d.arma_fits,
        start=d.start,
    )


# ---------------------------------------------------------------------------
# l1-penalized regression: cyclic coordinate descent with soft thresholding
# ---------------------------------------------------------------------------


@njit(cache=True, nogil=True)
def _cd_sweeps(G, c, lam, beta, q, tol, max_sweeps):
    """Run cyclic coordinate-descent sweeps on the Gram system in place.

    G = Z'Z/T, c = Z'y/T, q = G @ beta maintained incrementally. Returns
    (sweeps_used, converged_flag).
    """
    p = G.shape[0]
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        max_delta = 0.0
        for j in range(p):
            gjj = G[j, j]
            if gjj <= 0.0:
                continue
            bj = beta[j]
            rho = c[j] - q[j] + gjj * bj
            az = abs(rho) - lam
            if az > 0.0:
                nb = (az if rho > 0.0 else -az) / gjj
            else:
                nb = 0.0
            d = nb - bj
            if d != 0.0:
                beta[j] = nb
                for k in range(p):
                    q[k] += G[k, j] * d
                ad = d if d > 0.0 else -d
                if ad > max_delta:
                    max_delta = ad
        if max_delta < tol:
            return sweeps, True
    return sweeps, False


def soft_threshold(z, t: float):
    """Elementwise sign(z) * max(|z| - t, 0)."""
    z = np.asarray(z, dtype=float)
    out = np.sign(z) * np.maximum(np.abs(z) - t, 0.0)
    return float(out) if out.ndim == 0 else out


def _standardize_for_cd(values: np.ndarray):
    """Center columns and scale them so that z_j'z_j = T exactly."""
    mu = values.mean(axis=0)
    centered = values - mu
    sd = np.sqrt(np.mean(centered**2, axis=0))
    if np.any(sd <= 0):
        raise DegenerateVarianceError("constant column in the penalized design")
    return centered / sd, mu, sd


@dataclass
class LassoFit:
    """Solution of (1/2T)||y - X b||^2 + lambda ||b||_1 at one penalty value.

    ``coefficients`` and ``intercept`` are on the original variable scale;
    ``coef_std`` is the minimizer in the internally standardized design where
    the optimality conditions are checked. Entries outside ``active_set`` are
    exactly zero.
    """

    lam: float
    coefficients: np.ndarray
    intercept: float
    active_set: tuple
    bic: float
    n_iter: int
    coef_std: np.ndarray = field(repr=False, default=None)
    rss: float = 0.0
    n_obs: int = 0

    @property
    def n_active(self) -> int:
        return len(self.active_set)

    def to_json_dict(self) -> dict:
        return {
            "lambda": float(self.lam),
            "intercept": float(self.intercept),
            "coefficients": [float(v) for v in self.coefficients],
            "active_set": [int(i) for i in self.active_set],
            "bic": float(self.bic),
            "n_iter": int(self.n_iter),
        }


def _prepare_cd(y, X, standardize: bool):
    y = as_series(y)
    values = X.values if isinstance(X, SeriesPanel) else np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if values.shape[0] != y.shape[0]:
        raise ValueError("response and design have different lengths")
    ybar = y.mean()
    yc = y - ybar
    if standardize:
        Z, mu, sd = _standardize_for_cd(values)
    else:
        Z = values
        mu = np.zeros(values.shape[1])
        sd = np.ones(values.shape[1])
    T = y.shape[0]
    G = (Z.T @ Z) / T
    c = (Z.T @ yc) / T
    return y, yc, ybar, Z, mu, sd, G, c


def _package_fit(lam, beta, sweeps, yc, ybar, Z, mu, sd) -> LassoFit:
    T = yc.shape[0]
    resid = yc - Z @ beta
    rss = float(resid @ resid)
    k = int(np.count_nonzero(beta))
    bic = T * np.log(max(rss, 1e-300) / T) + k * np.log(T)
    coef = beta / sd
    intercept = ybar - float(coef @ mu)
    return LassoFit(
        lam=float(lam),
        coefficients=coef,
        intercept=float(intercept),
        active_set=tuple(np.flatnonzero(beta).tolist()),
        bic=float(bic),
        n_iter=int(sweeps),
        coef_std=beta.copy(),
        rss=rss,
        n_obs=T,
    )


def lasso_cd(
    y,
    X,
    lam: float,
    tol: float = 1e-7,
    max_sweeps: int = 100000,
    standardize: bool = True,
) -> LassoFit:
    """Cyclic coordinate descent for the l1-penalized least-squares problem.

    The intercept is handled by centering and never penalized. The design is
    standardized internally (columns scaled to z'z = T) unless the caller
    guarantees that scaling; coefficients are reported on the original scale.
    Convergence means the largest coefficient move in a sweep fell below
    ``tol``; exceeding ``max_sweeps`` raises :class:`ConvergenceError`.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    y, yc, ybar, Z, mu, sd, G, c = _prepare_cd(y, X, standardize)
    beta = np.zeros(G.shape[0])
    q = np.zeros(G.shape[0])
    sweeps, converged = _cd_sweeps(G, c, float(lam), beta, q, float(tol), int(max_sweeps))
    if not converged:
        raise ConvergenceError(f"coordinate descent did not converge in {max_sweeps} sweeps")
    return _package_fit(lam, beta, sweeps, yc, ybar, Z, mu, sd)


def lambda_max(y, X, standardize: bool = True) -> float:
    """Smallest penalty for which the all-zero vector is the solution."""
    _, _, _, _, _, _, _, c = _prepare_cd(y, X, standardize)
    return float(np.abs(c).max())


def lasso_bic(
    y,
    X,
    n_lambdas: int = 100,
    lambda_min_ratio: float = 1e-3,
    tol: float = 1e-7,
    max_sweeps: int = 100000,
    standardize: bool = True,
) -> LassoFit:
    """Minimum-BIC fit along a warm-started geometric penalty path.

    The path runs over ``n_lambdas`` log-spaced values from lambda_max down
    to ``lambda_min_ratio * lambda_max``; BIC is T log(RSS/T) + k log T with
    k the number of nonzero coefficients, and exact ties go to the larger
    penalty.
    """
    y, yc, ybar, Z, mu, sd, G, c = _prepare_cd(y, X, standardize)
    lam_max = float(np.abs(c).max())
    if lam_max <= 0.0:
        beta = np.zeros(G.shape[0])
        return _package_fit(0.0, beta, 0, yc, ybar, Z, mu, sd)
    lams = np.geomspace(lam_max, lambda_min_ratio * lam_max, n_lambdas)
    beta = np.zeros(G.shape[0])
    q = np.zeros(G.shape[0])
    T = yc.shape[0]
    logT = np.log(T)
    best_bic = np.inf
    best = None
    for lam in lams:
        sweeps, converged = _cd_sweeps(G, c, float(lam), beta, q, float(tol), int(max_sweeps))
        if not converged:
            raise ConvergenceError(
                f"coordinate descent did not converge at lambda = {lam:.3e}"
            )
        resid = yc - Z @ beta
        rss = float(resid @ resid)
        k = int(np.count_nonzero(beta))
        bic = T * np.log(max(rss, 1e-300) / T) + k * logT
        if bic < best_bic:
            best_bic = bic
            best = _package_fit(lam, beta, sweeps, yc, ybar, Z, mu, sd)
    return best


@dataclass
class ULassoFit:
    """BIC-tuned l1 fit on the prewhitened working-model design."""

    lasso: LassoFit
    y_lags: int
    n_covariates: int
    arma_fits: list
    start: int

    @property
    def alpha(self) -> np.ndarray:
        return self.lasso.coefficients[self.y_lags :]

    @property
    def phi_y(self) -> np.ndarray:
        return self.lasso.coefficients[: self.y_lags]

    @property
    def n_selected_covariates(self) -> int:
        return int(np.count_nonzero(self.alpha))


def u_lasso(
    y,
    panel,
    y_lags: int = 1,
    p_max: int = 3,
    q_max: int = 0,
    x_lag: int = 1,
    n_lambdas: int = 100,
    lambda_min_ratio: float = 1e-3,
    penalize_y_lags: bool = True,
) -> ULassoFit:
    """BIC-tuned l1 regression on y lags plus lagged ARMA residuals.

    With ``penalize_y_lags=False`` the y-lag block is kept unpenalized by
    residualizing both response and covariate block on it first.
    """
    d = build_prewhitened_design(y, panel, y_lags, p_max, q_max, x_lag)
    if penalize_y_lags or d.y_lags == 0:
        fit = lasso_bic(d.response, d.design, n_lambdas, lambda_min_ratio)
        return ULassoFit(fit, d.y_lags, d.n_covariates, d.arma_fits, d.start)
    ylag_block = d.design[:, : d.y_lags]
    u_block = d.design[:, d.y_lags :]
    proj = ols(d.response, ylag_block, intercept=True)
    y_res = proj.residuals
    u_res = np.empty_like(u_block)
    for i in range(u_block.shape[1]):
        u_res[:, i] = ols(u_block[:, i], ylag_block, intercept=True).residuals
    fit = lasso_bic(y_res, u_res, n_lambdas, lambda_min_ratio)
    coef = np.concatenate([np.full(d.y_lags, np.nan), fit.coefficients])
    packaged = LassoFit(
        lam=fit.lam,
        coefficients=coef,
        intercept=fit.intercept,
        active_set=tuple(i + d.y_lags for i in fit.active_set),
        bic=fit.bic,
        n_iter=fit.n_iter,
        coef_std=fit.coef_std,
        rss=fit.rss,
        n_obs=fit.n_obs,
    )
    return ULassoFit(packaged, d.y_lags, d.n_covariates, d.arma_fits, d.start)


def coef_error(estimate, truth) -> float:
    """Euclidean norm of the coefficient estimation error."""
    a = np.asarray(estimate, dtype=float)
    b = np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))
