"""
Significance testing and critical-difference diagrams
=====================================================

Pairwise tests compare two loss sequences; the rank pipeline compares many
models over many series and draws the critical-difference picture.
"""

import numpy as np

from forevalkit import (
    cd_diagram_data,
    diebold_mariano,
    friedman,
    ljung_box,
    nemenyi_cd,
    p_adjust,
    rank_models,
    render_cd_text,
    wilcoxon_rank_sum,
)

rng = np.random.default_rng(5)

# --- residual diagnostics -------------------------------------------------

white = rng.normal(0, 1, 400)
print("Ljung-Box on white noise: p =", round(ljung_box(white, lags=10).p_value, 3))
wavy = np.sin(np.arange(400) / 3) + rng.normal(0, 0.3, 400)
print("Ljung-Box on autocorrelated residuals: p =",
      f"{ljung_box(wavy, lags=10).p_value:.2e}")

# --- two models on the same actuals ---------------------------------------

loss_good = rng.normal(0, 1, 150) ** 2
loss_bad = rng.normal(0, 1.6, 150) ** 2
dm = diebold_mariano(loss_good, loss_bad, horizon=1)
print("\nDM statistic:", round(dm.statistic, 3), "p:", f"{dm.p_value:.4f}",
      "-> negative favours the first model")
wx = wilcoxon_rank_sum(loss_good, loss_bad)
print("Wilcoxon rank-sum p:", f"{wx.p_value:.4f}")

# --- many models over many series: ranks, omnibus test, post hoc ----------

n_series = 40
scores = {
    "alpha": rng.normal(1.0, 0.2, n_series),
    "beta": rng.normal(1.1, 0.2, n_series),
    "gamma": rng.normal(1.1, 0.2, n_series),
    "delta": rng.normal(1.8, 0.2, n_series),
}
table = rank_models(scores)  # lower score = better, rank 1 = best
fr = friedman(table)
print("\nFriedman chi2:", round(fr.statistic, 2), "p:", f"{fr.p_value:.2e}")

posthoc = nemenyi_cd(table, alpha=0.05, friedman_result=fr)
print("critical distance:", round(posthoc.critical_distance, 3))
print(render_cd_text(cd_diagram_data(posthoc)))

# --- pairwise p-values need a multiplicity correction ----------------------

raw = {}
models = list(scores)
for i, a in enumerate(models):
    for b in models[i + 1:]:
        raw[(a, b)] = wilcoxon_rank_sum(scores[a], scores[b]).p_value
adjusted = p_adjust(raw, method="holm", alpha=0.05)
for pair, p in adjusted.pairwise.items():
    print(f"{pair[0]:>6} vs {pair[1]:<6} adjusted p = {p:.4f}")
