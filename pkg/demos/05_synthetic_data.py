"""
Seeded synthetic series and outlier injection
=============================================

Every generator is deterministic in its seed; independent streams derive
their seeds from a master seed so parallel experiments never collide.
"""

import numpy as np

from forevalkit import DgpSpec, OutlierInjection, derive_seed, generate, inject_outliers

# --- the taxonomy in one gallery -------------------------------------------

specs = [
    DgpSpec(kind="random-walk", length=300, seed=1),
    DgpSpec(kind="ar", length=300, seed=2, ar_coefficients=(-0.8,)),
    DgpSpec(kind="linear-trend", length=300, seed=3, trend_slope=0.5),
    DgpSpec(kind="exponential-trend", length=300, seed=4, trend_scale=10.0, trend_rate=0.02),
    DgpSpec(kind="seasonal", length=300, seed=5, level=20.0, amplitude=8.0, period=24),
    DgpSpec(kind="heteroscedastic", length=300, seed=6, level=50.0, sigma_end_factor=8.0),
    DgpSpec(kind="structural-break", length=300, seed=7, level=100.0,
            break_index=151, break_shift=-40.0),
    DgpSpec(kind="intermittent", length=300, seed=8, zero_probability=0.75, demand_rate=2.0),
]
for spec in specs:
    s = generate(spec)
    v = s.values
    print(f"{spec.kind:>17}: mean={v.mean():9.2f}  sd={v.std():8.2f} "
          f" zeros={int((v == 0).sum()):3d}")

# --- determinism ------------------------------------------------------------

a = generate(specs[0]).values
b = generate(specs[0]).values
print("\nsame spec, same bytes:", np.array_equal(a, b))

# --- derive distinct seeds for parallel streams ------------------------------

master = 20240917
stream_seeds = [derive_seed(master, i) for i in range(5)]
print("derived stream seeds:", stream_seeds)

# --- corrupting a series with outliers, reproducibly -------------------------

series = generate(DgpSpec(kind="linear-trend", length=100, seed=9, level=50.0,
                          trend_slope=1.0, noise_sd=1.0))
spiked, log = inject_outliers(
    series, OutlierInjection(indices=(25, 75), magnitude=6.0, direction="high"), seed=0)
for index, old, new in log:
    print(f"outlier at {index}: {old:.2f} -> {new:.2f}")
print("original untouched:", float(series.values[24]) == log[0][1])

# a rate-based injection picks positions from the seed
_, log = inject_outliers(series, OutlierInjection(rate=0.05, magnitude=3.0,
                                                  direction="both"), seed=4)
print("rate-based injection hit", len(log), "positions")

# --- composite: trend + seasonality + a break in one series ------------------

composite = DgpSpec(kind="composite", length=200, seed=10, level=100.0,
                    trend_slope=0.8, amplitude=12.0, period=24,
                    break_index=101, break_shift=-35.0, noise_sd=2.0)
v = generate(composite).values
print("\ncomposite first/second half means:",
      round(v[:100].mean(), 1), "/", round(v[100:].mean(), 1))
