"""Data-generating processes for the Monte Carlo experiments.

Innovations are drawn per replication from a single documented stream: the
generator for replication ``r`` is ``numpy.random.default_rng((base_seed, r))``
and every kernel draws in a fixed order (covariate innovations first, response
noise second), so results are bit-reproducible regardless of how replications
are scheduled across workers.

ARMA columns are simulated with ``scipy.signal.lfilter`` from zero initial
conditions plus a burn-in, except pure AR(1) columns which can be started
exactly from their stationary law (first innovation scaled by
1/sqrt(1 - phi^2)), in which case no burn-in is needed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter


class StationarityError(ValueError):
    """The autoregressive polynomial has a root on or inside the unit circle."""


def rep_rng(base_seed: int, rep: int) -> np.random.Generator:
    """Generator for one replication, a pure function of (base_seed, rep)."""
    return np.random.default_rng((int(base_seed), int(rep)))


# ---------------------------------------------------------------------------
# innovations
# ---------------------------------------------------------------------------

_FAMILIES = ("gaussian", "laplace", "cauchy", "student_t", "uniform", "mixed")


@dataclass(frozen=True)
class InnovationSpec:
    """Distributional spec for the i.i.d. innovation vectors.

    ``family`` is one of gaussian, laplace, cauchy, student_t, uniform or
    mixed. Families with a finite variance are standardized to variance one
    (Cauchy, and Student t with df <= 2, have none and are drawn raw; uniform
    is drawn on the requested interval). ``cross_corr`` induces
    cross-sectional correlation through its lower Cholesky factor, and
    ``scale`` applies per-column multipliers afterwards.
    """

    family: str = "gaussian"
    df: float | None = None
    bounds: tuple | None = None
    components: tuple = ()
    cross_corr: np.ndarray | None = None
    scale: tuple | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown innovation family {self.family!r}")
        if self.family == "student_t" and (self.df is None or self.df <= 0):
            raise ValueError("student_t requires df > 0")
        if self.family == "uniform":
            if self.bounds is None or len(self.bounds) != 2 or self.bounds[0] >= self.bounds[1]:
                raise ValueError("uniform requires bounds (a, b) with a < b")
        if self.family == "mixed" and not self.components:
            raise ValueError("mixed requires one component spec per column")
        if self.cross_corr is not None:
            c = np.asarray(self.cross_corr, dtype=float)
            if c.ndim != 2 or c.shape[0] != c.shape[1]:
                raise ValueError("cross_corr must be square")
            if not np.allclose(np.diag(c), 1.0):
                raise ValueError("cross_corr must have unit diagonal")
            object.__setattr__(self, "cross_corr", c)

    @classmethod
    def mixed_of(cls, *families: "InnovationSpec") -> "InnovationSpec":
        return cls(family="mixed", components=tuple(families))


def _draw_column(spec: InnovationSpec, rng: np.random.Generator, size) -> np.ndarray:
    if spec.family == "gaussian":
        return rng.standard_normal(size)
    if spec.family == "laplace":
        # scale 1/sqrt(2) gives unit variance
        return rng.laplace(0.0, 1.0 / np.sqrt(2.0), size)
    if spec.family == "cauchy":
        return rng.standard_cauchy(size)
    if spec.family == "student_t":
        z = rng.standard_t(spec.df, size)
        if spec.df > 2:
            z *= np.sqrt((spec.df - 2.0) / spec.df)
        return z
    if spec.family == "uniform":
        a, b = spec.bounds
        return rng.uniform(a, b, size)
    raise ValueError(f"cannot draw from family {spec.family!r}")


def gen_innovations(spec: InnovationSpec, T: int, n: int, rng) -> np.ndarray:
    """Draw a T x n innovation matrix according to ``spec``.

    ``rng`` may be a Generator or anything acceptable to
    ``numpy.random.default_rng``. Mixed families draw column by column in
    column order; all other families draw the full matrix in one call.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    if spec.family == "mixed":
        if len(spec.components) != n:
            raise ValueError(
                f"mixed spec has {len(spec.components)} components for {n} columns"
            )
        u = np.column_stack([_draw_column(c, rng, T) for c in spec.components])
    else:
        u = _draw_column(spec, rng, (T, n))
    if spec.cross_corr is not None:
        if spec.cross_corr.shape[0] != n:
            raise ValueError("cross_corr order does not match number of columns")
        try:
            L = np.linalg.cholesky(spec.cross_corr)
        except np.linalg.LinAlgError as exc:
            raise ValueError("cross_corr is not positive definite") from exc
        u = u @ L.T
    if spec.scale is not None:
        if len(spec.scale) != n:
            raise ValueError("scale length does not match number of columns")
        u = u * np.asarray(spec.scale, dtype=float)
    return u


# ---------------------------------------------------------------------------
# ARMA panels
# ---------------------------------------------------------------------------


def _spectral_radius(ar) -> float:
    ar = np.asarray(ar, dtype=float)
    if ar.size == 0:
        return 0.0
    companion = np.zeros((ar.size, ar.size))
    companion[0, :] = ar
    if ar.size > 1:
        companion[1:, :-1] = np.eye(ar.size - 1)
    return float(np.abs(np.linalg.eigvals(companion)).max())


def check_stationary(ar, tol: float = 1e-8) -> None:
    """Raise :class:`StationarityError` unless the AR part is stationary."""
    rho = _spectral_radius(ar)
    if rho >= 1.0 - tol:
        raise StationarityError(
            f"autoregressive polynomial has spectral radius {rho:.6f} >= 1"
        )


@dataclass(frozen=True)
class ArmaDgpSpec:
    """Per-column ARMA coefficients defining a generative panel.

    ``columns`` is a sequence of (ar_coeffs, ma_coeffs) pairs. Stationarity of
    every AR polynomial is verified at construction.
    """

    columns: tuple

    def __post_init__(self):
        cols = tuple(
            (tuple(float(a) for a in ar), tuple(float(m) for m in ma))
            for ar, ma in self.columns
        )
        for ar, _ in cols:
            check_stationary(ar)
        object.__setattr__(self, "columns", cols)

    @property
    def n(self) -> int:
        return len(self.columns)

    @property
    def is_pure_ar1(self) -> bool:
        return all(len(ar) <= 1 and len(ma) == 0 for ar, ma in self.columns)

    @classmethod
    def ar1(cls, *phis: float) -> "ArmaDgpSpec":
        return cls(tuple(((float(p),), ()) for p in phis))


def arma_recursion(u: np.ndarray, ar, ma) -> np.ndarray:
    """Apply x_t = sum_l ar_l x_{t-l} + u_t + sum_k ma_k u_{t-k} from zeros."""
    b = np.concatenate(([1.0], np.asarray(ma, dtype=float)))
    a = np.concatenate(([1.0], -np.asarray(ar, dtype=float)))
    return lfilter(b, a, u)


def ar1_exact(u: np.ndarray, phi: float) -> np.ndarray:
    """AR(1) recursion started exactly from the stationary law.

    The first innovation is scaled by 1/sqrt(1 - phi^2) to serve as the
    stationary starting value; the joint law of the output is exactly that of
    a stationary AR(1) path.
    """
    if not abs(phi) < 1.0:
        raise StationarityError(f"|phi| = {abs(phi):.6f} >= 1")
    x0 = u[0] / np.sqrt(1.0 - phi * phi)
    if u.shape[0] == 1:
        return np.array([x0])
    rest, _ = lfilter([1.0], [1.0, -phi], u[1:], zi=np.array([phi * x0]))
    return np.concatenate(([x0], rest))


def gen_arma_panel(
    dgp: ArmaDgpSpec,
    innovations: np.ndarray,
    burn_in: int = 0,
    init: str = "zeros",
) -> np.ndarray:
    """Filter an innovation matrix into ARMA columns.

    Parameters
    ----------
    dgp : ArmaDgpSpec
        Per-column coefficients.
    innovations : ndarray, shape (T + burn_in, n)
        Innovation draws; the first ``burn_in`` output rows are discarded.
    burn_in : int
        Rows to drop after filtering from zero initial conditions.
    init : {"zeros", "stationary"}
        "stationary" draws pure AR(1) columns exactly from the stationary
        law (requires every column to be AR(1) or white noise and is the
        natural choice with ``burn_in=0``).
    """
    u = np.asarray(innovations, dtype=float)
    if u.ndim != 2 or u.shape[1] != dgp.n:
        raise ValueError("innovations shape does not match the DGP")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    if init not in ("zeros", "stationary"):
        raise ValueError("init must be 'zeros' or 'stationary'")
    if init == "stationary" and not dgp.is_pure_ar1:
        raise ValueError("exact stationary initialization requires pure AR(1) columns")
    out = np.empty_like(u)
    for j, (ar, ma) in enumerate(dgp.columns):
        if init == "stationary" and len(ar) == 1:
            out[:, j] = ar1_exact(u[:, j], ar[0])
        else:
            out[:, j] = arma_recursion(u[:, j], ar, ma)
    return out[burn_in:]


# ---------------------------------------------------------------------------
# response
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResponseDgpSpec:
    """Linear response on lagged covariates with ARMA noise.

    y_t = sum_i alpha_i x_{i, t-lag} + e_t, where e follows the ARMA recursion
    given by ``error_ar`` / ``error_ma`` driven by Gaussian noise with
    standard deviation ``noise_sd``.
    """

    alpha: np.ndarray
    lag: int = 1
    error_ar: tuple = ()
    error_ma: tuple = ()
    noise_sd: float = 1.0

    def __post_init__(self):
        a = np.asarray(self.alpha, dtype=float)
        if a.ndim != 1:
            raise ValueError("alpha must be a vector")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "error_ar", tuple(float(v) for v in self.error_ar))
        object.__setattr__(self, "error_ma", tuple(float(v) for v in self.error_ma))
        if self.lag < 0:
            raise ValueError("lag must be >= 0")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be >= 0")
        check_stationary(self.error_ar)


def gen_response(
    spec: ResponseDgpSpec,
    panel: np.ndarray,
    rng,
    burn_in: int = 1000,
) -> np.ndarray:
    """Generate the response aligned with its covariate rows.

    Returns an array ``y`` of length T - lag such that ``y[j]`` pairs with
    ``panel[j]`` (the covariate rows ``lag`` periods before the response);
    regress ``y`` on ``panel[:len(y)]`` to recover ``alpha``.
    """
    x = np.asarray(panel, dtype=float)
    T = x.shape[0]
    if spec.lag >= T:
        raise ValueError(f"lag {spec.lag} >= panel length {T}")
    if spec.alpha.shape[0] > x.shape[1]:
        raise ValueError("alpha has more entries than panel columns")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    pure_ar1 = len(spec.error_ar) <= 1 and len(spec.error_ma) == 0
    extra = 0 if pure_ar1 else burn_in
    omega = spec.noise_sd * rng.standard_normal(T + extra)
    if pure_ar1 and len(spec.error_ar) == 1:
        eps = ar1_exact(omega, spec.error_ar[0])
    else:
        eps = arma_recursion(omega, spec.error_ar, spec.error_ma)[extra:]

    signal = x[:, : spec.alpha.shape[0]] @ spec.alpha
    if spec.lag == 0:
        return signal + eps
    return signal[: T - spec.lag] + eps[spec.lag :]


@dataclass(frozen=True)
class McConfig:
    """Replication count, sample length, seed policy and worker count."""

    replications: int
    T: int
    base_seed: int = 0
    burn_in: int = 1000
    threads: int = 1

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("need at least one replication")
        if self.T < 4:
            raise ValueError("T must be >= 4")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
