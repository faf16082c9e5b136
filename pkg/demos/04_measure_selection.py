"""
Choosing measures and partitioning schemes for the data at hand
===============================================================

Characteristics are declared, not detected: say what the series look like
and what the evaluation must support, and the rule engine returns three
disjoint lists with a reason for every demotion.
"""

from forevalkit import (
    CharacteristicProfile,
    intermittency_hint,
    ljung_box,
    load_rule_table,
    recommend_measures,
    recommend_partitioning,
)

table = load_rule_table()
print("rule table v", table.version, "with", len(table.row_names()), "rows")

# --- intermittent demand ---------------------------------------------------

profile = CharacteristicProfile(intermittency=True)
rec = recommend_measures(profile, table)
print("\nintermittent demand -> recommended:", ", ".join(rec.recommended))
print("a few contraindications:")
for measure in ("MAE", "MAPE", "sMAPE"):
    print(f"  {measure}: {rec.contraindicated[measure]}")

# --- trending series with outliers, where outliers must be captured --------

profile = CharacteristicProfile(trend="exponential", outliers=True,
                                outlier_preference="capture")
rec = recommend_measures(profile, table)
print("\nexponential trend + capture outliers -> recommended:",
      ", ".join(rec.recommended))

# --- cross-series comparability demotes unscaled errors --------------------

profile = CharacteristicProfile(seasonality=True, need_cross_series_comparability=True)
rec = recommend_measures(profile, table)
print("\nseasonal + cross-series comparability -> RMSE is now cautioned:")
print("  ", rec.cautioned["RMSE"])

# --- partitioning advice ----------------------------------------------------

print("\nlong series:", recommend_partitioning(5000).scheme)
advice = recommend_partitioning(60, model_class="pure-AR")
print("short pure-AR series:", advice.scheme, "| checks:", advice.checks[0][:60], "...")

# with an actual residual check in hand the advice becomes definite
import numpy as np

rng = np.random.default_rng(0)
clean_residuals = rng.normal(0, 1, 60)
check = ljung_box(clean_residuals, lags=8)
print("after a passing residual check:",
      recommend_partitioning(60, "pure-AR", check).scheme)

# --- the zero-fraction hint is explicitly heuristic -------------------------

demand = rng.poisson(0.3, 200).astype(float)
print("\nzero-heavy example series -> intermittency hint:", intermittency_hint(demand))
