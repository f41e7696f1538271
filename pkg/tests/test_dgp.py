import numpy as np
import pytest

from prewhiten.dgp import (
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
from prewhiten.statcore import sample_correlation


def lag1_autocorr(x):
    xc = x - x.mean()
    return float(xc[1:] @ xc[:-1]) / float(xc @ xc)


# ---------------------------------------------------------------------------
# innovations
# ---------------------------------------------------------------------------


def test_gaussian_orthogonality():
    # average sample correlation across replications stays near zero
    reps, T = 2000, 100
    acc = 0.0
    for r in range(reps):
        u = gen_innovations(InnovationSpec(), T, 2, rep_rng(1, r))
        acc += sample_correlation(u[:, 0], u[:, 1])
    assert abs(acc / reps) < 3.0 / np.sqrt(reps * T)


def test_cross_correlation_target():
    cross = np.array([[1.0, 0.8], [0.8, 1.0]])
    spec = InnovationSpec(cross_corr=cross)
    acc = 0.0
    reps = 200
    for r in range(reps):
        u = gen_innovations(spec, 1000, 2, rep_rng(2, r))
        acc += sample_correlation(u[:, 0], u[:, 1])
    assert acc / reps == pytest.approx(0.8, abs=0.02)


def test_laplace_unit_variance_and_kurtosis():
    u = gen_innovations(InnovationSpec(family="laplace"), 100000, 1, rep_rng(3, 0))[:, 0]
    assert u.var() == pytest.approx(1.0, abs=0.05)
    z = u - u.mean()
    excess_kurtosis = np.mean(z**4) / np.mean(z**2) ** 2 - 3.0
    assert excess_kurtosis == pytest.approx(3.0, abs=0.3)


def test_student_t_standardization():
    u = gen_innovations(InnovationSpec(family="student_t", df=8), 200000, 1, rep_rng(4, 0))[:, 0]
    assert u.var() == pytest.approx(1.0, abs=0.05)


def test_uniform_bounds_and_mixed():
    spec = InnovationSpec.mixed_of(
        InnovationSpec(family="student_t", df=1),
        InnovationSpec(family="uniform", bounds=(-4.0, 4.0)),
    )
    u = gen_innovations(spec, 5000, 2, rep_rng(5, 0))
    assert np.all(np.abs(u[:, 1]) <= 4.0)
    assert u[:, 1].var() == pytest.approx(16.0 / 3.0, rel=0.1)


def test_innovation_validation():
    with pytest.raises(ValueError):
        InnovationSpec(family="gamma")
    with pytest.raises(ValueError):
        InnovationSpec(family="student_t")
    with pytest.raises(ValueError):
        InnovationSpec(family="uniform", bounds=(2.0, 1.0))
    bad = np.array([[1.0, 2.0], [2.0, 1.0]])
    with pytest.raises(ValueError):
        gen_innovations(InnovationSpec(cross_corr=bad), 10, 2, rep_rng(0, 0))


# ---------------------------------------------------------------------------
# ARMA panels
# ---------------------------------------------------------------------------


def test_identity_filter():
    u = rep_rng(6, 0).standard_normal((50, 2))
    dgp = ArmaDgpSpec((((), ()), ((), ())))
    x = gen_arma_panel(dgp, u)
    assert np.array_equal(x, u)


def test_ar1_lag1_autocorrelation():
    u = rep_rng(7, 0).standard_normal(100000)
    x = ar1_exact(u, 0.9)
    assert lag1_autocorr(x) == pytest.approx(0.9, abs=0.01)


def test_ma1_autocorrelation():
    u = rep_rng(8, 0).standard_normal(100000)
    x = arma_recursion(u, (), (0.8,))
    assert lag1_autocorr(x) == pytest.approx(0.8 / 1.64, abs=0.01)


def test_stationary_init_variance():
    u = rep_rng(9, 0).standard_normal(100000)
    x = ar1_exact(u, 0.7)
    assert x.var() == pytest.approx(1.0 / (1.0 - 0.49), rel=0.02)


def test_explosive_rejected():
    with pytest.raises(StationarityError):
        ArmaDgpSpec((((1.01,), ()),))
    with pytest.raises(StationarityError):
        ArmaDgpSpec((((0.7, 0.7), ()),))  # sum >= 1 on the boundary


def test_near_boundary_accepted():
    # the mixed AR(2)+constraint designs sit close to the unit circle
    ArmaDgpSpec((((0.575, 0.575, -0.2), (0.0,)),))


def test_burn_in_and_shapes():
    u = rep_rng(10, 0).standard_normal((130, 2))
    dgp = ArmaDgpSpec((((0.5,), (0.3,)), ((0.2,), ())))
    x = gen_arma_panel(dgp, u, burn_in=30)
    assert x.shape == (100, 2)
    with pytest.raises(ValueError):
        gen_arma_panel(dgp, u, burn_in=30, init="stationary")


# ---------------------------------------------------------------------------
# response
# ---------------------------------------------------------------------------


def test_response_white_noise_when_alpha_zero():
    panel = rep_rng(11, 0).standard_normal((5000, 2))
    spec = ResponseDgpSpec(alpha=np.zeros(2), lag=1, error_ar=(), noise_sd=1.0)
    y = gen_response(spec, panel, rep_rng(11, 1))
    assert y.shape == (4999,)
    assert abs(lag1_autocorr(y)) < 0.05
    assert y.var() == pytest.approx(1.0, rel=0.1)


def test_response_deterministic_single_covariate():
    panel = np.arange(30.0)[:, None]
    spec = ResponseDgpSpec(alpha=np.array([1.0]), lag=1, error_ar=(), noise_sd=0.0)
    y = gen_response(spec, panel, rep_rng(12, 0))
    # y[j] pairs with panel row j: the lag is built into the alignment
    assert np.allclose(y, panel[:29, 0])


def test_response_validation():
    panel = np.ones((5, 2)) * np.arange(5)[:, None]
    spec = ResponseDgpSpec(alpha=np.ones(2), lag=5)
    with pytest.raises(ValueError):
        gen_response(spec, panel, rep_rng(0, 0))
    with pytest.raises(ValueError):
        gen_response(ResponseDgpSpec(alpha=np.ones(3)), panel, rep_rng(0, 0))


def test_product_normal_variance():
    # sample covariance of two independent standard normals: var ~ 1/(T-1)
    T, reps = 100, 5000
    vals = np.empty(reps)
    for r in range(reps):
        u = rep_rng(13, r).standard_normal((T, 2))
        vals[r] = np.sum((u[:, 0] - u[:, 0].mean()) * (u[:, 1] - u[:, 1].mean())) / (T - 1)
    assert vals.var() == pytest.approx(1.0 / (T - 1), rel=0.05)


# ---------------------------------------------------------------------------
# config and seed policy
# ---------------------------------------------------------------------------


def test_rep_rng_reproducible_and_distinct():
    a = rep_rng(42, 0).standard_normal(5)
    b = rep_rng(42, 0).standard_normal(5)
    c = rep_rng(42, 1).standard_normal(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_mcconfig_validation():
    with pytest.raises(ValueError):
        McConfig(replications=0, T=100)
    with pytest.raises(ValueError):
        McConfig(replications=10, T=2)
    with pytest.raises(ValueError):
        McConfig(replications=10, T=100, threads=0)
