"""Monte Carlo experiment drivers.

Each driver maps a replication index to an independent random stream
(``default_rng((base_seed, rep))``), runs a kernel that returns a fixed-width
row of statistics, and aggregates the rows in replication order. Because each
replication owns its stream and aggregation order is fixed, summaries are
bit-identical no matter how many worker threads execute the kernels.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .dgp import (
    ArmaDgpSpec,
    InnovationSpec,
    McConfig,
    ResponseDgpSpec,
    ar1_exact,
    gen_arma_panel,
    gen_innovations,
    gen_response,
    rep_rng,
)
from .estimators import (
    CoOptions,
    HacOptions,
    build_prewhitened_design,
    cochrane_orcutt,
    coef_error,
    dynamic_regression,
    lasso_bic,
    nw_adjust,
    u_ols,
)
from .statcore import correlation_matrix, max_offdiag_abs, min_eigenvalue, ols, sample_correlation
from .theory import Ar1PairSpec, corr_cdf

__all__ = [
    "McSummary",
    "run_replications",
    "ks_distance",
    "mc_corr_density",
    "mc_eigen_stats",
    "mc_estimator_table",
    "mc_lasso_ratios",
    "mc_tstat_rates",
    "mc_b_stats",
    "estimator_table_rows",
    "ESTIMATOR_SCENARIOS",
    "TSTAT_METHODS",
]


@dataclass
class McSummary:
    """Replication statistics for one experiment configuration.

    ``scalars`` holds the headline numbers (means, standard deviations,
    rates), ``arrays`` the raw per-replication draws and histograms needed to
    redraw the corresponding figure.
    """

    name: str
    config: dict
    scalars: dict
    arrays: dict = field(default_factory=dict, repr=False)

    def to_csv(self, path) -> None:
        """Flat ``key,value`` rows, keys sorted, one row per scalar cell."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("key,value\n")
            for key in sorted(self.scalars):
                fh.write(f"{key},{_fmt(self.scalars[key])}\n")

    def to_json(self, path=None):
        payload = {
            "name": self.name,
            "config": self.config,
            "scalars": {k: float(v) for k, v in self.scalars.items()},
            "arrays": {k: np.asarray(v).tolist() for k, v in self.arrays.items()},
        }
        text = json.dumps(payload, sort_keys=True, indent=1)
        if path is None:
            return text
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        return None


def _fmt(v) -> str:
    return f"{float(v):.17g}"


def run_replications(config: McConfig, kernel, width: int) -> np.ndarray:
    """Evaluate ``kernel(rng, rep)`` for every replication.

    Returns an (replications, width) array filled in replication order. With
    ``config.threads > 1`` kernels run on a thread pool; each writes only its
    own row, so the result does not depend on scheduling.
    """
    out = np.empty((config.replications, width))

    def work(r: int) -> None:
        row = np.asarray(kernel(rep_rng(config.base_seed, r), r), dtype=float)
        out[r, :] = row

    if config.threads == 1:
        for r in range(config.replications):
            work(r)
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as ex:
            list(ex.map(work, range(config.replications)))
    return out


def ks_distance(draws: np.ndarray, spec: Ar1PairSpec) -> float:
    """One-sample Kolmogorov-Smirnov distance to the closed-form law."""
    x = np.sort(np.asarray(draws, dtype=float))
    n = x.shape[0]
    cdf = corr_cdf(x, spec)
    hi = np.arange(1, n + 1) / n - cdf
    lo = cdf - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


# ---------------------------------------------------------------------------
# sample-correlation density
# ---------------------------------------------------------------------------


def _panel_setup(config: McConfig, dgp: ArmaDgpSpec, innov: InnovationSpec):
    exact = dgp.is_pure_ar1 and innov.family == "gaussian"
    burn = 0 if exact else config.burn_in
    init = "stationary" if exact else "zeros"
    return burn, init


def mc_corr_density(
    config: McConfig,
    dgp: ArmaDgpSpec,
    innov: InnovationSpec = InnovationSpec(),
    bins: int = 101,
) -> McSummary:
    """Simulated density of the sample correlation of a two-column design.

    Gaussian pure-AR(1) designs start exactly from the stationary law;
    everything else burns in from zeros. When the design is an orthogonal
    Gaussian AR(1) pair, the Kolmogorov-Smirnov distance to the closed-form
    density is reported alongside the histogram.
    """
    if dgp.n != 2:
        raise ValueError("correlation-density experiment needs exactly 2 columns")
    burn, init = _panel_setup(config, dgp, innov)

    def kernel(rng, rep):
        u = gen_innovations(innov, config.T + burn, 2, rng)
        x = gen_arma_panel(dgp, u, burn_in=burn, init=init)
        return (sample_correlation(x[:, 0], x[:, 1]),)

    draws = run_replications(config, kernel, 1)[:, 0]
    edges = np.linspace(-1.0, 1.0, bins + 1)
    hist, _ = np.histogram(draws, bins=edges, density=True)
    scalars = {
        "mean": float(draws.mean()),
        "var": float(draws.var(ddof=1)),
        "sd": float(draws.std(ddof=1)),
    }
    orthogonal = innov.cross_corr is None or np.allclose(
        innov.cross_corr, np.eye(2)
    )
    if dgp.is_pure_ar1 and innov.family == "gaussian" and orthogonal:
        phis = [ar[0] if ar else 0.0 for ar, _ in dgp.columns]
        spec = Ar1PairSpec(phis[0], phis[1], config.T)
        scalars["ks_theory"] = ks_distance(draws, spec)
    return McSummary(
        name="corr_density",
        config={
            "replications": config.replications,
            "T": config.T,
            "base_seed": config.base_seed,
            "columns": dgp.columns,
            "family": innov.family,
        },
        scalars=scalars,
        arrays={"draws": draws, "hist_edges": edges, "hist_density": hist},
    )


# ---------------------------------------------------------------------------
# eigenvalue toy experiment
# ---------------------------------------------------------------------------


def mc_eigen_stats(config: McConfig, n: int, phi: float) -> McSummary:
    """Spread of max |off-diagonal| and min eigenvalue of an n-column AR(1) panel."""
    if n < 2:
        raise ValueError("need at least 2 columns")

    def kernel(rng, rep):
        u = rng.standard_normal((config.T, n))
        x = np.empty_like(u)
        for j in range(n):
            x[:, j] = ar1_exact(u[:, j], phi)
        c = correlation_matrix(x)
        return (max_offdiag_abs(c), min_eigenvalue(c))

    rows = run_replications(config, kernel, 2)
    scalars = {
        "max_offdiag.mean": float(rows[:, 0].mean()),
        "max_offdiag.sd": float(rows[:, 0].std(ddof=1)),
        "min_eigenvalue.mean": float(rows[:, 1].mean()),
        "min_eigenvalue.sd": float(rows[:, 1].std(ddof=1)),
    }
    return McSummary(
        name="eigen_stats",
        config={
            "replications": config.replications,
            "T": config.T,
            "base_seed": config.base_seed,
            "n": n,
            "phi": phi,
        },
        scalars=scalars,
        arrays={"max_offdiag": rows[:, 0], "min_eigenvalue": rows[:, 1]},
    )


# ---------------------------------------------------------------------------
# estimator comparison table
# ---------------------------------------------------------------------------

# Scenario designs: two covariates plus an autocorrelated regression error.
# 1: common AR(1) coefficient 0.7 everywhere (common factor restriction);
# 2: AR(1) coefficients 0.75 / 0.6 with an AR(1) 0.9 error;
# 3: ARMA(1,1) and AR(1) covariates with an AR(2) error.
ESTIMATOR_SCENARIOS = {
    1: {
        "x_cols": (((0.7,), ()), ((0.7,), ())),
        "err_ar": (0.7,),
        "dynreg_p": 1,
    },
    2: {
        "x_cols": (((0.75,), ()), ((0.6,), ())),
        "err_ar": (0.9,),
        "dynreg_p": 1,
    },
    3: {
        "x_cols": (((0.6,), (0.5,)), ((0.75,), ())),
        "err_ar": (0.6, 0.3),
        "dynreg_p": 2,
    },
}

_EST_METHODS = ("NW", "CO", "DynReg", "uOLS")
_EST_METRICS = ("err", "r2", "abs_a1", "abs_a2", "pval_a1", "pval_a2", "phi_y")


def _pvals(tstats) -> np.ndarray:
    return 2.0 * norm.sf(np.abs(np.asarray(tstats, dtype=float)))


def mc_estimator_table(
    config: McConfig,
    scenario: int,
    alpha=(1.0, 1.0),
    p_max: int = 3,
    q_max: int = 0,
) -> McSummary:
    """Coefficient error and fit of NW, CO, DynReg and prewhitened OLS.

    The response is y_t = alpha' x_{t-1} + e_t with scenario-specific
    covariate and error dynamics. Each method uses its own equation: NW
    projects on (y_{t-1}, x_{t-1}) and fixes only the standard errors; CO
    quasi-differences y on x_{t-1}; DynReg adds lags of everything; the
    prewhitened OLS replaces x lags by per-column AR residual lags.
    """
    if scenario not in ESTIMATOR_SCENARIOS:
        raise ValueError(f"unknown scenario {scenario}")
    sc = ESTIMATOR_SCENARIOS[scenario]
    x_dgp = ArmaDgpSpec(sc["x_cols"])
    alpha = np.asarray(alpha, dtype=float)
    resp = ResponseDgpSpec(alpha=alpha, lag=1, error_ar=sc["err_ar"], noise_sd=1.0)
    burn = 0 if x_dgp.is_pure_ar1 else config.burn_in
    init = "stationary" if x_dgp.is_pure_ar1 else "zeros"
    p_dyn = sc["dynreg_p"]

    def kernel(rng, rep):
        u = rng.standard_normal((config.T + burn, 2))
        x = gen_arma_panel(x_dgp, u, burn_in=burn, init=init)
        z = gen_response(resp, x, rng, burn_in=config.burn_in)
        # z[j] is the response one period after covariate row j
        n_rows = z.shape[0]
        xlag = x[:n_rows]

        out = []
        # NW: projection on lagged response and covariates, HAC errors
        design = np.column_stack([z[:-1], xlag[1:]])
        fit = ols(z[1:], design)
        fit_nw = nw_adjust(fit, design, HacOptions())
        a_hat = fit_nw.coefficients[1:]
        pv = _pvals(fit_nw.t_stats[1:])
        out += [
            coef_error(a_hat, alpha),
            fit_nw.r_squared,
            abs(a_hat[0] - alpha[0]),
            abs(a_hat[1] - alpha[1]),
            pv[0],
            pv[1],
            fit_nw.coefficients[0],
        ]
        # CO
        co = cochrane_orcutt(z, xlag, CoOptions())
        pv = _pvals(co.t_stats)
        out += [
            coef_error(co.coefficients, alpha),
            co.r_squared,
            abs(co.coefficients[0] - alpha[0]),
            abs(co.coefficients[1] - alpha[1]),
            pv[0],
            pv[1],
            np.nan,
        ]
        # DynReg
        dyn = dynamic_regression(z, xlag, p=p_dyn)
        a_hat = dyn.alpha
        pv = _pvals(dyn.alpha_t_stats)
        out += [
            coef_error(a_hat, alpha),
            dyn.r_squared,
            abs(a_hat[0] - alpha[0]),
            abs(a_hat[1] - alpha[1]),
            pv[0],
            pv[1],
            dyn.phi_y[0],
        ]
        # prewhitened OLS; x_lag=0 because rows of xlag already precede z by one
        uo = u_ols(z, xlag, y_lags=1, p_max=p_max, q_max=q_max, x_lag=0)
        a_hat = uo.alpha
        pv = _pvals(uo.alpha_t_stats)
        out += [
            coef_error(a_hat, alpha),
            uo.r_squared,
            abs(a_hat[0] - alpha[0]),
            abs(a_hat[1] - alpha[1]),
            pv[0],
            pv[1],
            uo.phi_y[0],
        ]
        # signed prewhitened-OLS coefficients, kept for bias diagnostics
        out += [a_hat[0], a_hat[1]]
        return out

    width = len(_EST_METHODS) * len(_EST_METRICS) + 2
    rows = run_replications(config, kernel, width)
    scalars = {}
    for mi, method in enumerate(_EST_METHODS):
        for ki, metric in enumerate(_EST_METRICS):
            col = rows[:, mi * len(_EST_METRICS) + ki]
            if np.all(np.isnan(col)):
                continue
            scalars[f"{method}.{metric}.ave"] = float(np.nanmean(col))
            scalars[f"{method}.{metric}.sd"] = float(np.nanstd(col, ddof=1))
    return McSummary(
        name="estimator_table",
        config={
            "replications": config.replications,
            "T": config.T,
            "base_seed": config.base_seed,
            "scenario": scenario,
        },
        scalars=scalars,
        arrays={"rows": rows[:, :-2], "alpha_uols": rows[:, -2:]},
    )


def estimator_table_rows(summary: McSummary):
    """Reshape an estimator-table summary into (metric, stat) x method rows."""
    header = ["metric", "stat"] + list(_EST_METHODS)
    rows = []
    for metric in _EST_METRICS:
        for stat in ("ave", "sd"):
            row = [metric, stat]
            for method in _EST_METHODS:
                row.append(summary.scalars.get(f"{method}.{metric}.{stat}", float("nan")))
            rows.append(row)
    return header, rows


# ---------------------------------------------------------------------------
# eigenvalue / coefficient-error ratios for the penalized fits
# ---------------------------------------------------------------------------


def mc_lasso_ratios(
    config: McConfig,
    n: int,
    phi: float,
    s: int = 10,
    p_max: int = 3,
    q_max: int = 0,
    support_restricted: bool | None = None,
) -> McSummary:
    """Prewhitening gains for the penalized fit in a sparse AR(1) design.

    Covariates are n AR(1) processes with common coefficient ``phi`` whose
    innovations have cross-correlation 0.3^|i-j|; the response loads on the
    first ``s`` with unit coefficients and carries an AR(1) error with the
    same phi. Reports the ratio of minimum eigenvalues (residual panel over
    raw panel, restricted to the active support when n exceeds the sample)
    and the ratio of coefficient errors of the BIC-tuned penalized fits.
    Both fits use their forecasting working model, one lag of the response
    plus the (raw or prewhitened) covariate block, everything penalized;
    errors are measured on the covariate-block coefficients.
    """
    idx = np.arange(n)
    cross = 0.3 ** np.abs(idx[:, None] - idx[None, :])
    innov = InnovationSpec(cross_corr=cross)
    alpha = np.concatenate([np.ones(s), np.zeros(n - s)])
    resp = ResponseDgpSpec(alpha=alpha, lag=1, error_ar=(phi,), noise_sd=1.0)
    if support_restricted is None:
        support_restricted = n >= config.T
    support = np.arange(s) if support_restricted else None

    def kernel(rng, rep):
        u = gen_innovations(innov, config.T, n, rng)
        x = np.empty_like(u)
        for j in range(n):
            x[:, j] = ar1_exact(u[:, j], phi)
        z = gen_response(resp, x, rng)
        xlag = x[: z.shape[0]]

        design_x = np.column_stack([z[:-1], xlag[1:]])
        fit_x = lasso_bic(z[1:], design_x)
        err_x = coef_error(fit_x.coefficients[1:], alpha)
        d = build_prewhitened_design(z, xlag, y_lags=1, p_max=p_max, q_max=q_max, x_lag=0)
        fit_u = lasso_bic(d.response, d.design)
        err_u = coef_error(fit_u.coefficients[1:], alpha)

        psi_x = min_eigenvalue(correlation_matrix(xlag), support)
        psi_u = min_eigenvalue(correlation_matrix(d.u_panel.values), support)
        n_sel_x = float(np.count_nonzero(fit_x.coefficients[1:]))
        n_sel_u = float(np.count_nonzero(fit_u.coefficients[1:]))
        return (
            psi_u / psi_x,
            err_u / err_x if err_x > 0 else np.nan,
            psi_x,
            psi_u,
            err_x,
            err_u,
            n_sel_x,
            n_sel_u,
        )

    rows = run_replications(config, kernel, 8)
    names = (
        "eigen_ratio",
        "err_ratio",
        "psi_x",
        "psi_u",
        "err_x",
        "err_u",
        "n_selected_x",
        "n_selected_u",
    )
    scalars = {}
    for i, nm in enumerate(names):
        scalars[f"{nm}.mean"] = float(np.nanmean(rows[:, i]))
        scalars[f"{nm}.sd"] = float(np.nanstd(rows[:, i], ddof=1))
    return McSummary(
        name="lasso_ratios",
        config={
            "replications": config.replications,
            "T": config.T,
            "base_seed": config.base_seed,
            "n": n,
            "phi": phi,
            "s": s,
            "support_restricted": bool(support_restricted),
        },
        scalars=scalars,
        arrays={"rows": rows},
    )


# ---------------------------------------------------------------------------
# spurious-regression t-statistic rates
# ---------------------------------------------------------------------------

TSTAT_METHODS = ("OLS", "NW", "CO", "DynReg", "uOLS")


def mc_tstat_rates(config: McConfig, phi: float, T: int | None = None) -> McSummary:
    """Rejection rates of |t| > 1.96 in the regression of one orthogonal
    AR(1) process on another, for five inference strategies."""
    T = config.T if T is None else int(T)

    def kernel(rng, rep):
        u = rng.standard_normal((T, 2))
        x1 = ar1_exact(u[:, 0], phi)
        x2 = ar1_exact(u[:, 1], phi)
        fit = ols(x2, x1)
        t_ols = fit.t_stats[0]
        t_nw = nw_adjust(fit, x1).t_stats[0]
        t_co = cochrane_orcutt(x2, x1).t_stats[0]
        t_dyn = dynamic_regression(x2, x1, p=1).alpha_t_stats[0]
        t_uols = u_ols(x2, x1, y_lags=1, p_max=3, q_max=0, x_lag=0).alpha_t_stats[0]
        return (t_ols, t_nw, t_co, t_dyn, t_uols)

    rows = run_replications(config, kernel, 5)
    rates = (np.abs(rows) > 1.96).mean(axis=0)
    scalars = {f"{m}.reject_rate": float(r) for m, r in zip(TSTAT_METHODS, rates)}
    return McSummary(
        name="tstat_rates",
        config={
            "replications": config.replications,
            "T": T,
            "base_seed": config.base_seed,
            "phi": phi,
        },
        scalars=scalars,
        arrays={"tstats": rows},
    )


# ---------------------------------------------------------------------------
# regression-slope distribution
# ---------------------------------------------------------------------------


def mc_b_stats(config: McConfig, phi1: float, phi2: float) -> McSummary:
    """Monte Carlo law of the bivariate slope and its variance estimators.

    Per replication: the slope b of column 2 on column 1, the classical OLS
    variance estimate, the HAC variance estimate, and the residual sum of
    squares of the slope regression.
    """

    def kernel(rng, rep):
        u = rng.standard_normal((config.T, 2))
        x1 = ar1_exact(u[:, 0], phi1)
        x2 = ar1_exact(u[:, 1], phi2)
        fit = ols(x2, x1)
        nw = nw_adjust(fit, x1)
        v = float(fit.residuals @ fit.residuals)
        return (fit.coefficients[0], fit.se_classical[0] ** 2, nw.se_classical[0] ** 2, v)

    rows = run_replications(config, kernel, 4)
    scalars = {
        "b.mean": float(rows[:, 0].mean()),
        "b.var": float(rows[:, 0].var(ddof=1)),
        "classical_var.mean": float(rows[:, 1].mean()),
        "nw_var.mean": float(rows[:, 2].mean()),
        "v.mean": float(rows[:, 3].mean()),
        "v.var": float(rows[:, 3].var(ddof=1)),
    }
    return McSummary(
        name="b_stats",
        config={
            "replications": config.replications,
            "T": config.T,
            "base_seed": config.base_seed,
            "phi1": phi1,
            "phi2": phi2,
        },
        scalars=scalars,
        arrays={"rows": rows},
    )
