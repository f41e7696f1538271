"""Rolling-window forecast comparison on a synthetic sparse panel.

Direct 12-step forecasts from a rolling 200-observation window, re-selecting
the autoregressive lag order, the penalty, and the per-column AR filters in
every window. The penalized regression on raw persistent covariates drags in
spurious selections; the prewhitened variant stays sparse and forecasts
better. The same machinery drives the `prewhiten forecast` command on a real
panel CSV.
"""

import numpy as np

from prewhiten import (
    InnovationSpec,
    ResponseDgpSpec,
    ar1_exact,
    gen_innovations,
    gen_response,
    rep_rng,
)
from prewhiten.forecast import RollingConfig, dm_test, rmsfe, rolling_forecast, selection_stats

N, T, PHI, H = 50, 400, 0.9, 12

rng = rep_rng(6, 0)
idx = np.arange(N)
innov = InnovationSpec(cross_corr=0.3 ** np.abs(idx[:, None] - idx[None, :]))
u = gen_innovations(innov, T, N, rng)
x = np.column_stack([ar1_exact(u[:, j], PHI) for j in range(N)])
alpha = np.concatenate([np.ones(10), np.zeros(N - 10)])
y = gen_response(ResponseDgpSpec(alpha=alpha, lag=1, error_ar=(PHI,)), x, rng)
xa = x[: y.shape[0]]

cfg = RollingConfig(window=200, horizon=H, y_lag_max=12, p_max=3, q_max=0)
results = {m: rolling_forecast(y, xa, m, cfg) for m in ("AR", "LASSO", "uLASSO")}

print(f"{len(results['AR'].origins)} forecast origins, horizon {H}\n")
for m, r in results.items():
    print(f"{m:>7}: RMSFE {rmsfe(r):.3f}")

print(f"\nRMSFE ratio uLASSO/LASSO: {rmsfe(results['uLASSO']) / rmsfe(results['LASSO']):.3f}")
dm = dm_test(results["LASSO"].errors, results["uLASSO"].errors, h=H)
print(f"Diebold-Mariano: statistic {dm.statistic:.2f}, one-sided p {dm.p_value_one_sided:.4f}")
print("(small p: the raw-covariate model forecasts significantly worse)")

sel = selection_stats(results["LASSO"], results["uLASSO"])
print(
    f"\nselected covariates per window: raw {sel['lasso.mean']:.1f} "
    f"(sd {sel['lasso.sd']:.1f}), prewhitened {sel['ulasso.mean']:.1f} "
    f"(sd {sel['ulasso.sd']:.1f}), ratio {sel['ratio.mean']:.3f}"
)
