"""Finite-sample distribution theory for the correlation of AR(1) pairs.

Core objects: the closed-form density of the sample correlation coefficient
between two orthogonal stationary Gaussian AR(1) processes observed over a
finite window of length T, the matching tail probability, and the related
closed-form variances for the bivariate regression slope and its residual sum
of squares. The dependence enters only through the product of the two
autoregressive coefficients, written ``phi12`` below.

For ``phi12 = 0`` the density collapses to the classical null density of a
sample correlation from independent Gaussian draws,

    Gamma((T-1)/2) / (Gamma((T-2)/2) sqrt(pi)) * (1 - c^2)^((T-4)/2),

and for positive ``phi12`` its tails grow with the degree of serial
dependence, while negative ``phi12`` concentrates mass around zero. All
Gamma-function arithmetic runs in log space so large T does not overflow.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import stats
from scipy.special import gammaln

from .statcore import SeriesPanel, as_series

__all__ = [
    "Ar1PairSpec",
    "DensityGrid",
    "corr_density",
    "corr_cdf",
    "density_grid",
    "tail_prob",
    "eigen_tail_lower_bound",
    "var_b",
    "gamma_params_v",
    "limiting_tstat_variance",
    "prs_error_bound",
    "lambda_lower_bound",
]


@dataclass(frozen=True)
class Ar1PairSpec:
    """A stationary bivariate Gaussian AR(1) configuration.

    Attributes
    ----------
    phi1, phi2 : float
        Autoregressive coefficients, each strictly inside (-1, 1).
    T : int
        Sample length, at least 4 (the smallest T for which the density
        formula is defined; at T = 4 it is flat when ``phi12 = 0``).
    """

    phi1: float
    phi2: float
    T: int

    def __post_init__(self):
        if not (abs(self.phi1) < 1.0 and abs(self.phi2) < 1.0):
            raise ValueError("autoregressive coefficients must satisfy |phi| < 1")
        if int(self.T) != self.T or self.T < 4:
            raise ValueError("T must be an integer >= 4")
        object.__setattr__(self, "T", int(self.T))

    @property
    def phi12(self) -> float:
        return self.phi1 * self.phi2


def corr_density(c, spec: Ar1PairSpec):
    """Density of the sample correlation of an orthogonal Gaussian AR(1) pair.

    Parameters
    ----------
    c : float or array_like
        Evaluation points, each strictly inside (-1, 1).
    spec : Ar1PairSpec
        Pair configuration; only ``spec.phi12`` and ``spec.T`` matter.

    Returns
    -------
    float or ndarray
        Density values. The density is even in ``c`` and integrates to one.
    """
    c_arr = np.asarray(c, dtype=float)
    if np.any(np.abs(c_arr) >= 1.0):
        raise ValueError("correlation argument must lie strictly inside (-1, 1)")
    T = spec.T
    p = spec.phi12
    c2 = c_arr * c_arr
    # denominator 1 - p^2 + 2 c^2 p (p - 1) = (1 - p)(1 + p - 2 c^2 p) > 0
    denom = 1.0 - p * p + 2.0 * c2 * p * (p - 1.0)
    log_d = (
        gammaln((T - 1) / 2.0)
        - gammaln((T - 2) / 2.0)
        + np.log1p(-p)
        - 0.5 * np.log(np.pi)
        + 0.5 * (T - 4) * np.log1p(-c2)
        + 0.5 * (T - 2) * np.log1p(-p * p)
        - 0.5 * (T - 1) * np.log(denom)
    )
    out = np.exp(log_d)
    return float(out) if np.isscalar(c) or c_arr.ndim == 0 else out


def corr_cdf(c, spec: Ar1PairSpec):
    """Distribution function matching :func:`corr_density`.

    Uses the monotone map w = c / sqrt(1 - c^2): under the density above,
    sqrt(T-2) * w / sigma follows a Student t with T-2 degrees of freedom,
    where sigma^2 = (1 + phi12) / (1 - phi12). This closed form is exact and
    serves as an independent cross-check of the quadrature in
    :func:`tail_prob`.
    """
    c_arr = np.asarray(c, dtype=float)
    if np.any(np.abs(c_arr) > 1.0):
        raise ValueError("correlation argument must lie in [-1, 1]")
    T = spec.T
    sigma = np.sqrt((1.0 + spec.phi12) / (1.0 - spec.phi12))
    with np.errstate(divide="ignore"):
        w = np.where(
            np.abs(c_arr) < 1.0,
            c_arr / np.sqrt(np.clip(1.0 - c_arr * c_arr, 1e-300, None)),
            np.sign(c_arr) * np.inf,
        )
    out = stats.t.cdf(np.sqrt(T - 2) * w / sigma, df=T - 2)
    return float(out) if np.isscalar(c) or c_arr.ndim == 0 else out


@dataclass(frozen=True)
class DensityGrid:
    """Density evaluated on a strictly increasing grid inside (-1, 1)."""

    points: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        den = np.asarray(self.densities, dtype=float)
        if pts.shape != den.shape or pts.ndim != 1:
            raise ValueError("points and densities must be 1-d of equal length")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("grid points must be strictly increasing")
        if np.any(den < 0):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "densities", den)

    def to_csv(self, path) -> None:
        """Write a two-column ``c,density`` CSV (plot-ready)."""
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("c,density\n")
            for c, d in zip(self.points, self.densities):
                fh.write(f"{c:.17g},{d:.17g}\n")


def density_grid(spec: Ar1PairSpec, n_points: int = 5000) -> DensityGrid:
    """Evaluate :func:`corr_density` on a uniform open grid over (-1, 1).

    The grid places ``n_points`` equally spaced interior points, so the
    default 5000 reproduces a step of roughly 0.0004.
    """
    if n_points < 3:
        raise ValueError("need at least 3 grid points")
    k = np.arange(1, n_points + 1, dtype=float)
    pts = -1.0 + 2.0 * k / (n_points + 1)
    return DensityGrid(pts, corr_density(pts, spec))


_GL_NODES, _GL_WEIGHTS = leggauss(15)


def _gl_panel(f, a: float, b: float) -> float:
    h = 0.5 * (b - a)
    xm = 0.5 * (a + b)
    return h * float(np.dot(_GL_WEIGHTS, f(xm + h * _GL_NODES)))


def _adaptive_gl(f, a: float, b: float, tol: float, depth: int = 0) -> float:
    whole = _gl_panel(f, a, b)
    mid = 0.5 * (a + b)
    left = _gl_panel(f, a, mid)
    right = _gl_panel(f, mid, b)
    if abs(left + right - whole) <= tol or depth >= 48:
        return left + right
    return _adaptive_gl(f, a, mid, 0.5 * tol, depth + 1) + _adaptive_gl(
        f, mid, b, 0.5 * tol, depth + 1
    )


def tail_prob(tau: float, spec: Ar1PairSpec, tol: float = 1e-8) -> float:
    """Two-sided tail probability Pr{|c_hat| >= tau} under :func:`corr_density`.

    Evaluated as 2 * integral of the density over [tau, 1) by evenness, with
    adaptive composite Gauss-Legendre quadrature to absolute tolerance
    ``tol``. The Gauss nodes never touch the endpoint, so the
    (1 - c^2)^((T-4)/2) factor near 1 is handled by subdivision alone.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    if tau == 1.0:
        return 0.0
    f = lambda c: corr_density(c, spec)
    return 2.0 * _adaptive_gl(f, tau, 1.0, 0.5 * tol)


def eigen_tail_lower_bound(tau: float, spec: Ar1PairSpec, tol: float = 1e-8) -> float:
    """Lower bound on Pr{psi_min <= 1 - tau} for the pair's correlation matrix.

    For a 2 x 2 sample correlation matrix the minimum eigenvalue equals
    1 - |c_hat|, so the event {psi_min <= 1 - tau} contains {|c_hat| >= tau};
    the returned value is exactly :func:`tail_prob` and bounds the eigenvalue
    probability from below. With more than two columns the bound still holds
    for any single off-diagonal entry.
    """
    return tail_prob(tau, spec, tol=tol)


def var_b(spec: Ar1PairSpec) -> float:
    """Approximate finite-sample variance of the bivariate regression slope.

    Slope of the second series on the first, under orthogonality and
    stationarity:

        (1 - phi1^2 phi2^2)(1 - phi1^2)
        -------------------------------------------
        (T - 1)(1 - phi2^2)(1 - phi1 phi2)^2

    Note the asymmetry in (phi1, phi2): the regression direction matters for
    the slope even though it does not for the correlation coefficient.
    """
    p1, p2, T = spec.phi1, spec.phi2, spec.T
    num = (1.0 - p1 * p1 * p2 * p2) * (1.0 - p1 * p1)
    den = (T - 1) * (1.0 - p2 * p2) * (1.0 - p1 * p2) ** 2
    return num / den


def gamma_params_v(phi2: float, T: int) -> tuple:
    """Shape and scale of the Gamma law for the regression residual sum of squares.

    Returns ``(shape, scale) = ((T - 2) / 2, 2 / (1 - phi2^2))``, so the
    implied mean is (T - 2) / (1 - phi2^2); at phi2 = 0 this is a chi-square
    with T - 2 degrees of freedom. The quantity 2 / (1 - phi2^2) acts as the
    scale of the Gamma density (its reciprocal is the rate).
    """
    if not abs(phi2) < 1.0:
        raise ValueError("|phi2| must be < 1")
    if T < 4:
        raise ValueError("T must be >= 4")
    return ((T - 2) / 2.0, 2.0 / (1.0 - phi2 * phi2))


def limiting_tstat_variance(phi1: float, phi2: float) -> float:
    """Variance of the limiting law of the classical slope t-statistic.

    (1 - phi1^2 phi2^2) / (1 - phi1 phi2)^2: equal to 1 only when
    phi1 * phi2 = 0, above 1 for same-sign coefficients (spurious regression),
    and below 1 for opposite signs.
    """
    if not (abs(phi1) < 1.0 and abs(phi2) < 1.0):
        raise ValueError("|phi| must be < 1")
    p = phi1 * phi2
    return (1.0 - p * p) / (1.0 - p) ** 2


def prs_error_bound(lam: float, gamma: float, sparsity_s: int) -> float:
    """Coefficient-error bound 3 * lambda * sqrt(s) / gamma for an l1 penalty.

    ``gamma`` is the strong-convexity (minimum-eigenvalue) parameter of the
    quadratic loss and ``sparsity_s`` the active-set size; sqrt(s) is the
    compatibility constant of the l1 norm on an s-dimensional coordinate
    subspace.
    """
    if lam <= 0 or gamma <= 0:
        raise ValueError("lambda and gamma must be positive")
    s = int(sparsity_s)
    if s < 1:
        raise ValueError("sparsity must be a positive integer")
    return 3.0 * lam * np.sqrt(s) / gamma


def lambda_lower_bound(X, eps) -> float:
    """Smallest admissible l1 penalty, 2 * max_i |x_i' eps| / T.

    The max-magnitude coordinate of X'eps / T is the dual norm of the l1
    penalty evaluated at the score; any lambda at least twice that value puts
    the estimation error inside the bound of :func:`prs_error_bound`.
    """
    values = X.values if isinstance(X, SeriesPanel) else np.asarray(X, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    e = as_series(eps, min_len=1)
    if values.shape[0] != e.shape[0]:
        raise ValueError("panel and noise series have different lengths")
    t = values.shape[0]
    return 2.0 * float(np.abs(values.T @ e).max()) / t
