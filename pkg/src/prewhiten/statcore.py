"""Sample statistics and least squares for standardized time-series panels.

Everything in this module is a pure function of immutable inputs: series are
1-d float arrays, panels are thin wrappers around a T x n array, symmetric
matrices are plain (n, n) arrays that are symmetrized exactly on construction.
Variances and covariances use the T-1 divisor throughout, so a standardized
series has mean 0 and sum of squares T-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class DegenerateVarianceError(ValueError):
    """A series with (numerically) zero sample variance was passed where a
    non-constant one is required."""


class SingularDesignError(ValueError):
    """The regression design is rank deficient."""


def as_series(values, min_len: int = 2) -> np.ndarray:
    """Validate and return a 1-d float array of observations.

    Rejects non-finite entries eagerly: heavy-tailed simulations can overflow
    and must fail loudly rather than propagate NaN/inf into statistics.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"expected 1-d series, got shape {x.shape}")
    if x.shape[0] < min_len:
        raise ValueError(f"series too short: length {x.shape[0]} < {min_len}")
    if not np.all(np.isfinite(x)):
        raise ValueError("series contains non-finite entries")
    return x


@dataclass(frozen=True)
class SeriesPanel:
    """A rectangular T x n array of observations with column metadata.

    Parameters
    ----------
    values : ndarray, shape (T, n)
        Observations; all finite.
    names : tuple of str
        Unique column labels.
    tcodes : tuple of int, optional
        Per-column stationarity transformation codes (1-7), when known.
    """

    values: np.ndarray
    names: tuple = ()
    tcodes: tuple | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError(f"panel must be 2-d, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("panel contains non-finite entries")
        object.__setattr__(self, "values", v)
        names = tuple(self.names) if self.names else tuple(
            f"x{i + 1}" for i in range(v.shape[1])
        )
        if len(names) != v.shape[1]:
            raise ValueError("number of names does not match number of columns")
        if len(set(names)) != len(names):
            raise ValueError("column names must be unique")
        object.__setattr__(self, "names", names)
        if self.tcodes is not None:
            tc = tuple(int(c) for c in self.tcodes)
            if len(tc) != v.shape[1]:
                raise ValueError("number of tcodes does not match number of columns")
            object.__setattr__(self, "tcodes", tc)

    @property
    def n_obs(self) -> int:
        return self.values.shape[0]

    @property
    def n_series(self) -> int:
        return self.values.shape[1]

    def column(self, key) -> np.ndarray:
        """Return one column by integer position or by name."""
        if isinstance(key, str):
            key = self.names.index(key)
        return self.values[:, key]

    @classmethod
    def from_columns(cls, columns, names=None, tcodes=None) -> "SeriesPanel":
        cols = [as_series(c) for c in columns]
        lengths = {c.shape[0] for c in cols}
        if len(lengths) != 1:
            raise ValueError(f"columns have unequal lengths: {sorted(lengths)}")
        return cls(np.column_stack(cols), tuple(names) if names else (), tcodes)


def sym_matrix(m) -> np.ndarray:
    """Return ``m`` symmetrized exactly as 0.5 * (m + m')."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if not np.allclose(a, a.T, rtol=0.0, atol=1e-8 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    return 0.5 * (a + a.T)


def standardize(x) -> np.ndarray:
    """Center and scale a series to mean 0 and unit T-1 variance."""
    x = as_series(x)
    mu = x.mean()
    ss = np.sum((x - mu) ** 2)
    if ss <= 0.0 or ss < 1e-30 * x.shape[0]:
        raise DegenerateVarianceError("cannot standardize a constant series")
    sd = np.sqrt(ss / (x.shape[0] - 1))
    return (x - mu) / sd


def standardize_panel(panel: SeriesPanel) -> SeriesPanel:
    """Standardize every column of a panel (T-1 divisor)."""
    cols = [standardize(panel.values[:, j]) for j in range(panel.n_series)]
    return SeriesPanel(np.column_stack(cols), panel.names, panel.tcodes)


def sample_correlation(x, y) -> float:
    """Pearson sample correlation of two equal-length series.

    Raises
    ------
    DegenerateVarianceError
        If either series is constant.
    """
    x = as_series(x)
    y = as_series(y)
    if x.shape[0] != y.shape[0]:
        raise ValueError("series have different lengths")
    xc = x - x.mean()
    yc = y - y.mean()
    sxx = float(xc @ xc)
    syy = float(yc @ yc)
    if sxx <= 0.0 or syy <= 0.0:
        raise DegenerateVarianceError("correlation undefined for a constant series")
    r = float(xc @ yc) / np.sqrt(sxx * syy)
    # clamp roundoff excursions outside [-1, 1]
    return float(min(1.0, max(-1.0, r)))


def correlation_matrix(panel) -> np.ndarray:
    """Sample correlation matrix of the panel columns.

    Exactly symmetric with unit diagonal; entry (i, j) equals
    ``sample_correlation`` of columns i and j.
    """
    values = panel.values if isinstance(panel, SeriesPanel) else np.asarray(panel, float)
    if values.ndim != 2:
        raise ValueError("expected a panel or 2-d array")
    t = values.shape[0]
    z = np.empty_like(values)
    for j in range(values.shape[1]):
        z[:, j] = standardize(values[:, j])
    c = (z.T @ z) / (t - 1)
    c = 0.5 * (c + c.T)
    np.clip(c, -1.0, 1.0, out=c)
    np.fill_diagonal(c, 1.0)
    return c


def eigenvalues(m) -> np.ndarray:
    """All eigenvalues of a symmetric matrix, ascending."""
    return np.linalg.eigvalsh(sym_matrix(m))


def min_eigenvalue(m, support=None) -> float:
    """Smallest eigenvalue of a symmetric matrix or of a principal submatrix.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Symmetric matrix.
    support : sequence of int, optional
        Indices of the principal submatrix to restrict to (used when n > T
        makes the full matrix singular and only a sparse support is relevant).
    """
    a = sym_matrix(m)
    if support is not None:
        idx = np.asarray(list(support), dtype=int)
        if idx.size == 0:
            raise ValueError("support must be non-empty")
        if idx.size != np.unique(idx).size:
            raise ValueError("support indices must be distinct")
        if idx.min() < 0 or idx.max() >= a.shape[0]:
            raise ValueError("support index out of range")
        a = a[np.ix_(idx, idx)]
    return float(np.linalg.eigvalsh(a)[0])


def max_offdiag_abs(m) -> float:
    """Largest absolute off-diagonal entry of a symmetric matrix."""
    a = sym_matrix(m)
    n = a.shape[0]
    if n < 2:
        raise ValueError("matrix of order 1 has no off-diagonal entries")
    mask = ~np.eye(n, dtype=bool)
    return float(np.abs(a[mask]).max())


@dataclass
class RegressionFit:
    """Ordinary least squares output.

    ``coefficients`` holds the slope vector (intercept separate), classical
    standard errors come from sigma^2 (X'X)^-1, and ``r_squared`` is computed
    against the centered total sum of squares whenever an intercept is
    included.
    """

    coefficients: np.ndarray
    intercept: float
    residuals: np.ndarray
    se_classical: np.ndarray
    t_stats: np.ndarray
    r_squared: float
    fitted: np.ndarray = field(repr=False, default=None)
    sigma2: float = 0.0
    df_resid: int = 0
    intercept_included: bool = True
    se_intercept: float = float("nan")
    names: tuple = ()

    @property
    def n_obs(self) -> int:
        return self.residuals.shape[0]

    def to_json_dict(self) -> dict:
        return {
            "coefficients": [float(v) for v in self.coefficients],
            "intercept": float(self.intercept),
            "se": [float(v) for v in self.se_classical],
            "t_stats": [float(v) for v in self.t_stats],
            "r_squared": float(self.r_squared),
            "sigma2": float(self.sigma2),
            "df_resid": int(self.df_resid),
            "names": list(self.names),
        }


def _design_matrix(X, intercept: bool):
    if isinstance(X, SeriesPanel):
        values, names = X.values, X.names
    else:
        values = np.asarray(X, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        names = tuple(f"x{i + 1}" for i in range(values.shape[1]))
    if not np.all(np.isfinite(values)):
        raise ValueError("design contains non-finite entries")
    if intercept:
        design = np.column_stack([np.ones(values.shape[0]), values])
    else:
        design = values
    return design, values, names


def ols(y, X, intercept: bool = True) -> RegressionFit:
    """Least squares of ``y`` on the columns of ``X``.

    Solved through a rank-revealing QR factorization of the design, which is
    what keeps the fit usable under the near-collinearity this package
    studies. Rank deficiency raises ``SingularDesignError``.
    """
    y = as_series(y)
    design, values, names = _design_matrix(X, intercept)
    t, k = design.shape
    if y.shape[0] != t:
        raise ValueError("response and design have different lengths")
    if t <= k:
        raise ValueError(f"need more than {k} observations, got {t}")

    coef_all, _, rank, _ = scipy.linalg.lstsq(design, y, lapack_driver="gelsy")
    if rank < k:
        raise SingularDesignError(f"design has rank {rank} < {k} columns")

    fitted = design @ coef_all
    resid = y - fitted
    rss = float(resid @ resid)
    df = t - k
    sigma2 = rss / df
    xtx_inv = np.linalg.inv(design.T @ design)
    se_all = np.sqrt(sigma2 * np.diag(xtx_inv))

    if intercept:
        tss = float(np.sum((y - y.mean()) ** 2))
        coef, se = coef_all[1:], se_all[1:]
        se_int = float(se_all[0])
        b0 = float(coef_all[0])
    else:
        tss = float(y @ y)
        coef, se = coef_all, se_all
        se_int = float("nan")
        b0 = 0.0
    r2 = 1.0 - rss / tss if tss > 0 else 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tstats = np.where(se > 0, coef / se, 0.0)
    return RegressionFit(
        coefficients=coef,
        intercept=b0,
        residuals=resid,
        se_classical=se,
        t_stats=tstats,
        r_squared=float(r2),
        fitted=fitted,
        sigma2=sigma2,
        df_resid=df,
        intercept_included=intercept,
        se_intercept=se_int,
        names=names,
    )
