import json

import numpy as np
import pytest

from prewhiten.dgp import ArmaDgpSpec, InnovationSpec, McConfig
from prewhiten.experiments import (
    TSTAT_METHODS,
    estimator_table_rows,
    ks_distance,
    mc_b_stats,
    mc_corr_density,
    mc_eigen_stats,
    mc_estimator_table,
    mc_lasso_ratios,
    mc_tstat_rates,
    run_replications,
)
from prewhiten.theory import Ar1PairSpec, corr_cdf, var_b


def test_run_replications_thread_invariance():
    def kernel(rng, rep):
        x = rng.standard_normal(100)
        return (x.mean(), x.std())

    single = run_replications(McConfig(replications=64, T=100, base_seed=5, threads=1), kernel, 2)
    eight = run_replications(McConfig(replications=64, T=100, base_seed=5, threads=8), kernel, 2)
    assert np.array_equal(single, eight)


def test_mc_corr_density_null_variance():
    cfg = McConfig(replications=2000, T=250, base_seed=1)
    s = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.0, 0.0))
    assert s.scalars["var"] == pytest.approx(1.0 / 249.0, rel=0.10)
    assert s.arrays["hist_density"].shape == (101,)
    # histogram integrates to one
    widths = np.diff(s.arrays["hist_edges"])
    assert float(s.arrays["hist_density"] @ widths) == pytest.approx(1.0, abs=1e-9)


def test_mc_corr_density_ks_for_moderate_dependence():
    cfg = McConfig(replications=2000, T=250, base_seed=2)
    s = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.3, 0.3))
    assert s.scalars["ks_theory"] < 0.05


def test_mc_corr_density_opposite_signs_concentrate():
    cfg = McConfig(replications=1500, T=100, base_seed=3)
    opp = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.9, -0.9))
    null = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.0, 0.0))
    assert opp.scalars["var"] < null.scalars["var"]


def test_ks_distance_detects_wrong_law():
    cfg = McConfig(replications=1000, T=100, base_seed=4)
    s = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.9, 0.9))
    wrong = ks_distance(s.arrays["draws"], Ar1PairSpec(0.0, 0.0, 100))
    right = ks_distance(s.arrays["draws"], Ar1PairSpec(0.9, 0.9, 100))
    assert wrong > 5 * right


def test_mc_corr_density_general_arma_laplace():
    # mixed AR(3) / ARMA(2,1) design with weakly cross-correlated Laplace
    # innovations: the spurious-correlation spread still grows with phi
    def design(phi):
        return ArmaDgpSpec(
            (
                ((phi + 0.1, phi + 0.1, -0.2), ()),
                ((phi, phi), (0.8,)),
            )
        )

    innov = InnovationSpec(family="laplace", cross_corr=np.array([[1.0, 0.2], [0.2, 1.0]]))
    cfg = McConfig(replications=400, T=100, base_seed=5, burn_in=1000)
    low = mc_corr_density(cfg, design(0.15), innov)
    high = mc_corr_density(cfg, design(0.475), innov)
    assert "ks_theory" not in low.scalars  # no closed form outside the Gaussian AR(1) pair
    assert high.scalars["sd"] > low.scalars["sd"]
    # population cross-correlation keeps the center near 0.2, not 0
    assert low.scalars["mean"] == pytest.approx(0.2, abs=0.1)


def test_mc_corr_density_requires_two_columns():
    with pytest.raises(ValueError):
        mc_corr_density(McConfig(replications=5, T=50, base_seed=0), ArmaDgpSpec.ar1(0.5))


def test_mc_eigen_stats_sanity_and_consistency():
    cfg = McConfig(replications=300, T=100, base_seed=6)
    s = mc_eigen_stats(cfg, n=10, phi=0.0)
    assert 0.0 < s.scalars["min_eigenvalue.mean"] < 1.0
    # n=2: max |offdiag| equals |c12|, so it matches the density experiment
    s2 = mc_eigen_stats(cfg, n=2, phi=0.6)
    d = mc_corr_density(cfg, ArmaDgpSpec.ar1(0.6, 0.6))
    assert s2.scalars["max_offdiag.mean"] == pytest.approx(
        np.abs(d.arrays["draws"]).mean(), abs=0.02
    )


def test_mc_eigen_stats_monotone_in_phi():
    cfg = McConfig(replications=300, T=100, base_seed=7)
    stats = [mc_eigen_stats(cfg, 10, phi) for phi in (0.0, 0.6, 0.95)]
    maxc = [s.scalars["max_offdiag.mean"] for s in stats]
    mine = [s.scalars["min_eigenvalue.mean"] for s in stats]
    assert maxc[0] < maxc[1] < maxc[2]
    assert mine[0] > mine[1] > mine[2]


def test_mc_b_stats_matches_theory():
    cfg = McConfig(replications=3000, T=100, base_seed=8)
    s = mc_b_stats(cfg, 0.6, 0.6)
    theory = var_b(Ar1PairSpec(0.6, 0.6, 100))
    assert s.scalars["b.var"] == pytest.approx(theory, rel=0.10)
    assert s.scalars["b.mean"] == pytest.approx(0.0, abs=0.01)


def test_mc_estimator_table_scenario2_shape_and_direction():
    cfg = McConfig(replications=60, T=100, base_seed=9)
    s = mc_estimator_table(cfg, 2)
    header, rows = estimator_table_rows(s)
    assert header[2:] == ["NW", "CO", "DynReg", "uOLS"]
    assert len(rows) == 14
    assert s.scalars["NW.err.ave"] > s.scalars["CO.err.ave"]
    assert s.scalars["DynReg.r2.ave"] > s.scalars["CO.r2.ave"]
    with pytest.raises(ValueError):
        mc_estimator_table(cfg, 4)


def test_mc_estimator_table_published_reference_cells():
    # reference values for the remaining scenarios at T=100; the scenario-3
    # fit statistics carry a systematic ~0.01 gap against the reference
    # (the stated DGP caps the dynamic-regression R^2 at 0.8927 in
    # population), hence the loose band
    cfg = McConfig(replications=300, T=100, base_seed=42)
    s2 = mc_estimator_table(cfg, 2)
    assert s2.scalars["uOLS.err.ave"] == pytest.approx(0.134, abs=0.02)
    s3 = mc_estimator_table(cfg, 3)
    assert s3.scalars["DynReg.r2.ave"] == pytest.approx(0.888, abs=0.02)
    assert s3.scalars["uOLS.r2.ave"] == pytest.approx(0.846, abs=0.02)
    assert s3.scalars["uOLS.err.ave"] == pytest.approx(0.148, abs=0.02)


def test_u_ols_unbiased_in_every_scenario():
    # replication means of the prewhitened-OLS coefficients stay within
    # three standard errors of the truth in all three designs
    reps = 150
    for scenario in (1, 2, 3):
        cfg = McConfig(replications=reps, T=100, base_seed=500 + scenario)
        s = mc_estimator_table(cfg, scenario)
        signed = s.arrays["alpha_uols"]
        for j in range(2):
            mean = signed[:, j].mean()
            se = signed[:, j].std(ddof=1) / np.sqrt(reps)
            assert abs(mean - 1.0) < 3.0 * se + 0.01, (scenario, j, mean, se)


def test_mc_tstat_rates_null_size():
    # reference rates at T=100 under independence; NW runs hot (~7%) in
    # small samples, the others sit at the nominal size
    cfg = McConfig(replications=800, T=100, base_seed=10)
    s = mc_tstat_rates(cfg, 0.0)
    reference = {"OLS": 0.054, "NW": 0.070, "CO": 0.058, "DynReg": 0.054, "uOLS": 0.054}
    for m in TSTAT_METHODS:
        assert s.scalars[f"{m}.reject_rate"] == pytest.approx(reference[m], abs=0.02)


def test_mc_lasso_ratios_no_dependence_near_one():
    cfg = McConfig(replications=60, T=100, base_seed=11)
    s = mc_lasso_ratios(cfg, n=50, phi=0.0)
    assert s.scalars["eigen_ratio.mean"] == pytest.approx(1.0, abs=0.1)
    assert s.scalars["err_ratio.mean"] == pytest.approx(1.0, abs=0.15)


def test_summary_serialization(tmp_path):
    cfg = McConfig(replications=50, T=80, base_seed=12)
    s = mc_eigen_stats(cfg, 5, 0.5)
    csv_path = tmp_path / "s.csv"
    json_path = tmp_path / "s.json"
    s.to_csv(csv_path)
    s.to_json(json_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "key,value"
    assert len(lines) == 1 + len(s.scalars)
    payload = json.loads(json_path.read_text())
    assert payload["name"] == "eigen_stats"
    assert len(payload["arrays"]["max_offdiag"]) == 50


def test_summary_deterministic_bytes(tmp_path):
    cfg1 = McConfig(replications=40, T=60, base_seed=13, threads=1)
    cfg8 = McConfig(replications=40, T=60, base_seed=13, threads=8)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    mc_eigen_stats(cfg1, 4, 0.6).to_csv(a)
    mc_eigen_stats(cfg8, 4, 0.6).to_csv(b)
    assert a.read_bytes() == b.read_bytes()
