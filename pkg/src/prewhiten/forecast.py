"""Rolling-window forecasting pipeline and forecast-accuracy tests.

Implements the macro-forecasting workflow: stationarity-inducing
transformations (codes 1-7), the h-step inflation-style target built from a
positive level series, direct h-step forecasts from a rolling estimation
window for an autoregressive benchmark and for penalized regressions on raw
or prewhitened covariates, the RMSFE, and a Diebold-Mariano comparison of two
forecast-error sequences.

All models are re-estimated from scratch inside each window: lag order and
penalty by BIC, ARMA filters refit per window. Nothing fitted at origin t
touches data after t, and the forecast target at origin t is only used once
it is realized (t + h inside the window of a later origin).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .armafilter import filter_panel
from .estimators import lasso_bic
from .statcore import SeriesPanel, as_series

__all__ = [
    "DataValidationError",
    "apply_tcode",
    "TargetTransform",
    "target_transform",
    "RollingConfig",
    "ForecastResult",
    "rolling_forecast",
    "rmsfe",
    "DmResult",
    "dm_test",
    "selection_stats",
]


class DataValidationError(ValueError):
    """Input data violates the documented format or a transformation domain."""


def apply_tcode(s, code: int) -> np.ndarray:
    """Apply stationarity transformation ``code`` (1-7) to a series.

    1 none; 2 first difference; 3 second difference; 4 log; 5 log first
    difference; 6 log second difference; 7 first difference of the gross
    growth rate x_t / x_{t-1} - 1. Codes 2/5 shorten the series by one
    observation, 3/6/7 by two. Log codes require strictly positive values.
    """
    x = as_series(s)
    code = int(code)
    if code not in range(1, 8):
        raise DataValidationError(f"unknown transformation code {code}")
    if code in (4, 5, 6) and np.any(x <= 0.0):
        raise DataValidationError(f"transformation code {code} requires positive values")
    if code == 1:
        return x.copy()
    if code == 2:
        return np.diff(x)
    if code == 3:
        return np.diff(x, n=2)
    if code == 4:
        return np.log(x)
    if code == 5:
        return np.diff(np.log(x))
    if code == 6:
        return np.diff(np.log(x), n=2)
    # code 7
    if np.any(x[:-1] == 0.0):
        raise DataValidationError("transformation code 7 requires nonzero values")
    return np.diff(x[1:] / x[:-1] - 1.0)


_TCODE_LOSS = {1: 0, 2: 1, 3: 2, 4: 0, 5: 1, 6: 2, 7: 2}


def tcode_loss(code: int) -> int:
    """Observations lost at the start of the series by ``apply_tcode``."""
    return _TCODE_LOSS[int(code)]


@dataclass(frozen=True)
class TargetTransform:
    """Aligned target / regressand pair for the price-level forecasting setup.

    ``regressand[j]`` is the annualized second log difference at time
    j + offset; ``target[j]`` is the h-step annualized average change in the
    first log difference measured from origin time j + offset (realized at
    time j + offset + h). ``target`` is exactly ``horizon`` entries shorter
    than ``regressand``.
    """

    target: np.ndarray
    regressand: np.ndarray
    offset: int
    horizon: int


def target_transform(level, h: int) -> TargetTransform:
    """Build the h-step-ahead target from a positive level series.

    target_t = (1200/h) log(L_{t+h}/L_t) - 1200 log(L_t/L_{t-1}) and the
    regressand is y_t = 1200 (log L_t - 2 log L_{t-1} + log L_{t-2}); both
    start at t = 2 (0-based) and the target stops h observations early.
    """
    x = as_series(level)
    if h < 1:
        raise ValueError("horizon must be >= 1")
    if x.shape[0] <= h + 2:
        raise ValueError(f"need more than h + 2 = {h + 2} observations")
    if np.any(x <= 0.0):
        raise DataValidationError("level series must be strictly positive")
    lx = np.log(x)
    y = 1200.0 * (lx[2:] - 2.0 * lx[1:-1] + lx[:-2])
    n = x.shape[0]
    t = np.arange(2, n - h)
    target = (1200.0 / h) * (lx[t + h] - lx[t]) - 1200.0 * (lx[t] - lx[t - 1])
    return TargetTransform(target=target, regressand=y, offset=2, horizon=int(h))


@dataclass(frozen=True)
class RollingConfig:
    """Rolling-window setup for the direct h-step forecasting exercise.

    ``window`` is a number of observations (the estimation span), ``horizon``
    the forecast step, ``y_lag_max`` the largest autoregressive lag
    considered by the per-window BIC, and ``p_max`` / ``q_max`` the ARMA grid
    used to refilter the covariates in every window.
    """

    window: int = 130
    horizon: int = 24
    y_lag_max: int = 12
    p_max: int = 3
    q_max: int = 0
    n_lambdas: int = 100
    lambda_min_ratio: float = 1e-3
    min_train: int = 20

    def __post_init__(self):
        if self.window < 10 or self.horizon < 1 or self.y_lag_max < 0:
            raise ValueError("invalid rolling configuration")


@dataclass
class ForecastResult:
    """Per-origin forecasts of one method over the evaluation span."""

    method: str
    origins: np.ndarray
    predictions: np.ndarray
    actuals: np.ndarray
    n_selected: np.ndarray | None = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (len(self.origins) == len(self.predictions) == len(self.actuals)):
            raise ValueError("origins, predictions and actuals must align")

    @property
    def errors(self) -> np.ndarray:
        return self.predictions - self.actuals


def _ar_lag_table(y: np.ndarray, max_lag: int) -> np.ndarray:
    """Column l-1 holds y_{t-l} for t = 0..len(y)-1 (NaN where unavailable)."""
    T = y.shape[0]
    out = np.full((T, max_lag), np.nan)
    for l in range(1, max_lag + 1):
        out[l:, l - 1] = y[:-l]
    return out


def _select_ar_lags(tgt: np.ndarray, lag_rows: np.ndarray, max_lag: int):
    """BIC choice of the autoregressive lag count for a direct regression.

    All candidates are compared on the same sample (rows where every
    candidate lag exists). Returns (p, intercept, coefficients).
    """
    n = tgt.shape[0]
    best = None
    for p in range(0, max_lag + 1):
        design = lag_rows[:, :p]
        dm = np.column_stack([np.ones(n), design])
        coef, _, rank, _ = np.linalg.lstsq(dm, tgt, rcond=None)
        if rank < dm.shape[1]:
            continue
        resid = tgt - dm @ coef
        rss = float(resid @ resid)
        bic = n * np.log(max(rss, 1e-300) / n) + (p + 1) * np.log(n)
        if best is None or bic < best[0]:
            best = (bic, p, coef)
    if best is None:
        raise ValueError("no autoregressive candidate could be fit")
    _, p, coef = best
    return p, float(coef[0]), coef[1:]


def rolling_forecast(y, panel=None, method: str = "AR", cfg: RollingConfig = RollingConfig(), target=None) -> ForecastResult:
    """Direct h-step forecasts from a rolling estimation window.

    Parameters
    ----------
    y : array_like
        Regressand series; row t of ``panel`` is observed at the same time
        as ``y[t]``.
    panel : SeriesPanel or ndarray, optional
        Covariates (required for the penalized methods).
    method : {"AR", "LASSO", "uLASSO"}
        Forecasting equation: autoregressive benchmark, penalized regression
        on the raw covariates, or penalized regression on per-window ARMA
        residuals. Both penalized designs carry the BIC-selected y lags.
    target : array_like, optional
        ``target[t]`` is the quantity to forecast from origin t (realized at
        t + horizon); defaults to ``y`` itself shifted h steps ahead. Must
        have length ``len(y) - horizon``.

    Returns
    -------
    ForecastResult
        One row per origin t in [window - 1, len(y) - 1 - horizon]; exactly
        T - window - horizon + 1 origins.
    """
    y = as_series(y)
    h = cfg.horizon
    T = y.shape[0]
    if method not in ("AR", "LASSO", "uLASSO"):
        raise ValueError(f"unknown method {method!r}")
    if target is None:
        target = y[h:]
    else:
        target = np.asarray(target, dtype=float)
        if target.shape[0] != T - h:
            raise ValueError(f"target must have length len(y) - horizon = {T - h}")
    values = None
    if method != "AR":
        if panel is None:
            raise ValueError(f"method {method} requires a covariate panel")
        values = panel.values if isinstance(panel, SeriesPanel) else np.asarray(panel, float)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != T:
            raise ValueError("panel and regressand have different lengths")

    first = cfg.window - 1
    last = T - 1 - h
    if first > last:
        raise ValueError("window plus horizon exceed the available sample")
    lag_table = _ar_lag_table(y, cfg.y_lag_max)

    origins, preds, actuals, counts = [], [], [], []
    for k in range(first, last + 1):
        w0 = k - cfg.window + 1
        tau_min = max(w0, cfg.y_lag_max)
        tau_max = k - h
        u_offset = 0
        u_values = None
        if method == "uLASSO":
            window_vals = values[w0 : k + 1]
            u_panel, fits = _filter_window(window_vals, cfg)
            u_offset = max(f.offset for f in fits)
            u_values = u_panel.values  # row r is time w0 + u_offset + r
            tau_min = max(tau_min, w0 + u_offset)
        if tau_max - tau_min + 1 < cfg.min_train:
            raise ValueError(
                f"window infeasible at origin {k}: only {tau_max - tau_min + 1} "
                f"training pairs (need {cfg.min_train})"
            )
        taus = np.arange(tau_min, tau_max + 1)
        tgt = target[taus]
        # the direct regression at tau uses (y_tau, .., y_{tau-p+1}), which
        # is row tau + 1 of the lag table
        ylags = lag_table[taus + 1]
        p_sel, a0, phis = _select_ar_lags(tgt, ylags, cfg.y_lag_max)
        if method == "AR":
            pred = a0 + float(phis @ lag_table[k + 1, :p_sel])
            n_sel = None
        else:
            if method == "LASSO":
                block = values[taus]
                block_k = values[k]
            else:
                block = u_values[taus - w0 - u_offset]
                block_k = u_values[k - w0 - u_offset]
            design = np.column_stack([block, ylags[:, :p_sel]]) if p_sel else block
            fit = lasso_bic(
                tgt,
                design,
                n_lambdas=cfg.n_lambdas,
                lambda_min_ratio=cfg.lambda_min_ratio,
            )
            x_new = np.concatenate([block_k, lag_table[k + 1, :p_sel]])
            pred = fit.intercept + float(fit.coefficients @ x_new)
            n_sel = int(np.count_nonzero(fit.coefficients[: block.shape[1]]))
        origins.append(k)
        preds.append(pred)
        actuals.append(target[k])
        counts.append(n_sel)

    return ForecastResult(
        method=method,
        origins=np.asarray(origins),
        predictions=np.asarray(preds),
        actuals=np.asarray(actuals),
        n_selected=None if method == "AR" else np.asarray(counts, dtype=float),
        config={
            "window": cfg.window,
            "horizon": cfg.horizon,
            "y_lag_max": cfg.y_lag_max,
            "p_max": cfg.p_max,
            "q_max": cfg.q_max,
        },
    )


def _filter_window(window_vals: np.ndarray, cfg: RollingConfig):
    return filter_panel(window_vals, p_max=cfg.p_max, q_max=cfg.q_max)


def rmsfe(result) -> float:
    """Root mean squared forecast error over the evaluation span."""
    if isinstance(result, ForecastResult):
        e = result.errors
    else:
        e = np.asarray(result, dtype=float)
    if e.size == 0:
        raise ValueError("empty evaluation set")
    return float(np.sqrt(np.mean(e * e)))


@dataclass(frozen=True)
class DmResult:
    """Diebold-Mariano comparison of two forecast-error sequences.

    The statistic is the scaled mean of d_t = e1_t^2 - e2_t^2; the one-sided
    p-value is P(Z > statistic), so a small p says the first sequence belongs
    to the significantly less accurate method (equivalently, the second
    method forecasts better).
    """

    statistic: float
    p_value_one_sided: float


def dm_test(errors1, errors2, h: int = 1) -> DmResult:
    """Equal-accuracy test on squared-error loss with Bartlett long-run variance.

    The long-run variance of the loss differential uses h - 1 Bartlett lags
    (the textbook choice for h-step forecasts). Identical error sequences
    return statistic 0 and p-value 0.5 by convention.
    """
    e1 = as_series(errors1, min_len=10)
    e2 = as_series(errors2, min_len=10)
    if e1.shape[0] != e2.shape[0]:
        raise ValueError("error sequences have different lengths")
    if h < 1:
        raise ValueError("h must be >= 1")
    d = e1 * e1 - e2 * e2
    n = d.shape[0]
    dbar = float(d.mean())
    dc = d - dbar
    gamma0 = float(dc @ dc) / n
    lrv = gamma0
    for l in range(1, h):
        if l >= n:
            break
        lrv += 2.0 * (1.0 - l / h) * float(dc[l:] @ dc[:-l]) / n
    if lrv <= 0.0:
        lrv = gamma0
    if lrv <= 0.0:
        if dbar == 0.0:
            return DmResult(statistic=0.0, p_value_one_sided=0.5)
        stat = np.inf if dbar > 0 else -np.inf
        return DmResult(statistic=float(stat), p_value_one_sided=float(norm.sf(stat)))
    stat = dbar / np.sqrt(lrv / n)
    return DmResult(statistic=float(stat), p_value_one_sided=float(norm.sf(stat)))


def selection_stats(lasso_result: ForecastResult, ulasso_result: ForecastResult) -> dict:
    """Mean/sd of per-origin selected-variable counts and their ratios.

    The reported ratios divide the prewhitened method's statistics by the raw
    method's, so values below one indicate the sparser model.
    """
    for r in (lasso_result, ulasso_result):
        if r.n_selected is None:
            raise ValueError(f"method {r.method} carries no selection counts")
    a = np.asarray(lasso_result.n_selected, dtype=float)
    b = np.asarray(ulasso_result.n_selected, dtype=float)
    out = {
        "lasso.mean": float(a.mean()),
        "lasso.sd": float(a.std(ddof=1)) if a.size > 1 else 0.0,
        "ulasso.mean": float(b.mean()),
        "ulasso.sd": float(b.std(ddof=1)) if b.size > 1 else 0.0,
    }
    out["ratio.mean"] = out["ulasso.mean"] / out["lasso.mean"] if out["lasso.mean"] else float("nan")
    out["ratio.sd"] = out["ulasso.sd"] / out["lasso.sd"] if out["lasso.sd"] else float("nan")
    return out
