"""Univariate AR/ARMA estimation, BIC order selection, residual extraction.

Estimation is conditional (zero presample residuals) rather than exact
likelihood: the downstream regressions only need residual series, and the
conditional sum of squares is accurate enough from a few dozen observations
up. AR models are fit by least squares on lagged values; mixed models start
from a long-autoregression residual proxy, take a least-squares step on
lagged values and lagged proxy residuals, and are then refined by a
derivative-free local minimization of the conditional sum of squares.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.signal import lfilter

from .dgp import _spectral_radius
from .statcore import DegenerateVarianceError, as_series, ols

__all__ = [
    "ArmaOrder",
    "ArmaFit",
    "fit_ar",
    "fit_arma",
    "select_order",
    "filter_panel",
    "ljung_box",
]

_STATIONARY_RADIUS = 0.999


@dataclass(frozen=True)
class ArmaOrder:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError("orders must be nonnegative")


@dataclass
class ArmaFit:
    """Fitted ARMA model and its residual series.

    ``residuals`` has length T - p and is aligned so that entry j corresponds
    to observation j + p of the input series (``offset`` = p). ``sigma2`` is
    RSS / (T - p - q - 1) and ``bic`` is T log(sigma2) + (p + q + 1) log T.
    """

    order: ArmaOrder
    ar: np.ndarray
    ma: np.ndarray
    intercept: float
    residuals: np.ndarray = field(repr=False)
    sigma2: float
    bic: float
    offset: int
    converged: bool = True
    stationary_adjusted: bool = False

    def to_json_dict(self) -> dict:
        return {
            "p": self.order.p,
            "q": self.order.q,
            "ar": [float(v) for v in self.ar],
            "ma": [float(v) for v in self.ma],
            "intercept": float(self.intercept),
            "sigma2": float(self.sigma2),
            "bic": float(self.bic),
            "converged": bool(self.converged),
            "stationary_adjusted": bool(self.stationary_adjusted),
        }


def _project_stationary(ar: np.ndarray) -> np.ndarray:
    """Shrink AR coefficients geometrically until the polynomial is stationary."""
    rho = _spectral_radius(ar)
    if rho < _STATIONARY_RADIUS:
        return ar
    s = _STATIONARY_RADIUS / rho
    return ar * s ** np.arange(1, ar.size + 1)


def _css_residuals(x: np.ndarray, intercept: float, ar: np.ndarray, ma: np.ndarray) -> np.ndarray:
    """Conditional residuals for t = p .. T-1 with zero presample errors."""
    p = ar.size
    z = x[p:] - intercept
    for l in range(1, p + 1):
        z = z - ar[l - 1] * x[p - l : x.shape[0] - l]
    if ma.size == 0:
        return z
    return lfilter([1.0], np.concatenate(([1.0], ma)), z)


def _finalize(x, order, ar, ma, intercept, converged, adjusted) -> ArmaFit:
    T = x.shape[0]
    resid = _css_residuals(x, intercept, ar, ma)
    rss = float(resid @ resid)
    df = T - order.p - order.q - 1
    if df <= 0:
        raise ValueError("series too short for the requested order")
    sigma2 = max(rss / df, 1e-300)
    bic = T * np.log(sigma2) + (order.p + order.q + 1) * np.log(T)
    return ArmaFit(
        order=order,
        ar=ar,
        ma=ma,
        intercept=float(intercept),
        residuals=resid,
        sigma2=float(sigma2),
        bic=float(bic),
        offset=order.p,
        converged=converged,
        stationary_adjusted=adjusted,
    )


def _lag_matrix(x: np.ndarray, p: int) -> np.ndarray:
    return np.column_stack([x[p - l : x.shape[0] - l] for l in range(1, p + 1)])


def fit_ar(x, p: int, intercept: bool = True) -> ArmaFit:
    """Least-squares AR(p) fit of ``x`` on its own first p lags.

    ``p = 0`` returns the mean-only fit whose residuals are the centered
    series. The fitted polynomial is forced back inside the unit circle (with
    a flag) in the rare explosive-estimate case so the result is always a
    stationary model.
    """
    x = as_series(x, min_len=max(2, p + 2))
    if p < 0:
        raise ValueError("p must be >= 0")
    T = x.shape[0]
    if T <= p + 1:
        raise ValueError(f"need T > p + 1, got T={T}, p={p}")
    order = ArmaOrder(p, 0)
    if p == 0:
        mu = x.mean() if intercept else 0.0
        return _finalize(x, order, np.empty(0), np.empty(0), mu, True, False)
    fit = ols(x[p:], _lag_matrix(x, p), intercept=intercept)
    ar = np.asarray(fit.coefficients, dtype=float)
    adjusted = _spectral_radius(ar) >= _STATIONARY_RADIUS
    if adjusted:
        ar = _project_stationary(ar)
    return _finalize(x, order, ar, np.empty(0), fit.intercept, True, adjusted)


def _long_ar_order(T: int) -> int:
    return max(1, min(int(np.ceil(10.0 * np.log10(T))), T // 4))


def _css_objective(x: np.ndarray, p: int, q: int):
    def objective(params):
        intercept = params[0]
        ar = params[1 : 1 + p]
        ma = params[1 + p :]
        if p and _spectral_radius(ar) >= _STATIONARY_RADIUS:
            return 1e12
        if q and _spectral_radius(-ma) >= _STATIONARY_RADIUS:
            # non-invertible MA makes the residual recursion unstable
            return 1e12
        e = _css_residuals(x, intercept, ar, ma)
        return float(e @ e)

    return objective


def fit_arma(x, order, intercept: bool = True) -> ArmaFit:
    """Two-stage ARMA(p, q) estimation with conditional-sum-of-squares polish.

    Stage one fits a long autoregression to proxy the innovations; stage two
    regresses the series on its own lags and lagged proxy residuals; stage
    three refines by Nelder-Mead on the conditional sum of squares. If the
    refinement fails to converge the stage-two estimates are returned with
    ``converged=False``.
    """
    if not isinstance(order, ArmaOrder):
        order = ArmaOrder(*order)
    p, q = order.p, order.q
    if q == 0:
        return fit_ar(x, p, intercept=intercept)
    x = as_series(x)
    T = x.shape[0]
    if T <= 2 * (p + q) + 10:
        raise ValueError(f"need T > 2(p+q) + 10, got T={T} for order ({p},{q})")

    L = _long_ar_order(T)
    proxy_fit = fit_ar(x, L, intercept=intercept)
    e_proxy = np.concatenate([np.zeros(L), proxy_fit.residuals])

    # proxy residuals only exist from t = L on, so the regression sample
    # starts where every lagged proxy residual is a real one
    start = max(p, L + q)
    if T - start <= p + q + 2:
        raise ValueError(f"series too short for order ({p},{q}) after proxy stage")
    cols = [x[start - l : T - l] for l in range(1, p + 1)]
    cols += [e_proxy[start - k : T - k] for k in range(1, q + 1)]
    hr = ols(x[start:], np.column_stack(cols), intercept=intercept)
    ar0 = np.asarray(hr.coefficients[:p], dtype=float)
    ma0 = np.asarray(hr.coefficients[p:], dtype=float)
    adjusted = False
    if p and _spectral_radius(ar0) >= _STATIONARY_RADIUS:
        ar0 = _project_stationary(ar0)
        adjusted = True
    if _spectral_radius(-ma0) >= _STATIONARY_RADIUS:
        ma0 = _project_stationary(-ma0) * -1.0
        adjusted = True

    x0 = np.concatenate(([hr.intercept if intercept else 0.0], ar0, ma0))
    objective = _css_objective(x, p, q)
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={"xatol": 1e-6, "fatol": 1e-10, "maxiter": 400 * (p + q + 1)},
    )
    if res.success and res.fun <= objective(x0):
        params = res.x
        converged = True
    else:
        params = x0
        converged = False
    intercept_hat = params[0] if intercept else 0.0
    ar = np.asarray(params[1 : 1 + p], dtype=float)
    ma = np.asarray(params[1 + p :], dtype=float)
    if p and _spectral_radius(ar) >= _STATIONARY_RADIUS:
        ar = _project_stationary(ar)
        adjusted = True
    return _finalize(x, order, ar, ma, intercept_hat, converged, adjusted)


def select_order(x, p_max: int, q_max: int, intercept: bool = True) -> ArmaFit:
    """Exhaustive BIC search over the (p, q) grid of orders.

    Returns the minimum-BIC fit; exact ties go to the smaller p + q, then the
    smaller q. Candidate orders that cannot be fit (series too short) are
    skipped; an error is raised only if every candidate fails.
    """
    if p_max < 0 or q_max < 0:
        raise ValueError("order maxima must be >= 0")
    best = None
    best_key = None
    failures = []
    for p in range(p_max + 1):
        for q in range(q_max + 1):
            try:
                fit = fit_arma(x, ArmaOrder(p, q), intercept=intercept)
            except (ValueError, np.linalg.LinAlgError) as exc:
                failures.append((p, q, exc))
                continue
            key = (fit.bic, p + q, q)
            if best_key is None or key < best_key:
                best, best_key = fit, key
    if best is None:
        raise ValueError(f"all candidate orders failed; last error: {failures[-1][2]}")
    return best


def filter_panel(panel, p_max: int = 3, q_max: int = 3, intercept: bool = True):
    """Replace every panel column by its selected-model residuals.

    Residual series start at different offsets (each loses its own p rows);
    the output panel drops rows so that all columns share the common sample
    starting at max_i p_i. Returns the residual panel and the list of fits.
    """
    from .statcore import SeriesPanel

    values = panel.values if isinstance(panel, SeriesPanel) else np.asarray(panel, float)
    names = panel.names if isinstance(panel, SeriesPanel) else tuple(
        f"x{i + 1}" for i in range(values.shape[1])
    )
    fits = []
    for j in range(values.shape[1]):
        if np.ptp(values[:, j]) == 0.0:
            raise DegenerateVarianceError(f"column {names[j]!r} is constant")
        try:
            fits.append(select_order(values[:, j], p_max, q_max, intercept=intercept))
        except Exception as exc:
            raise type(exc)(f"column {names[j]!r}: {exc}") from exc
    max_offset = max(f.offset for f in fits)
    cols = [f.residuals[max_offset - f.offset :] for f in fits]
    out = SeriesPanel(np.column_stack(cols), names)
    return out, fits


def ljung_box(x, lags: int = 10) -> float:
    """Portmanteau whiteness statistic T(T+2) sum_k r_k^2 / (T-k)."""
    x = as_series(x)
    T = x.shape[0]
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom <= 0:
        raise ValueError("constant series")
    stat = 0.0
    for k in range(1, lags + 1):
        r = float(xc[k:] @ xc[:-k]) / denom
        stat += r * r / (T - k)
    return T * (T + 2.0) * stat
