"""Executable reproductions of known forecast-evaluation failure modes.

Each scenario constructs synthetic data on which a measure (or benchmark
choice) misbehaves in a documented way, and checks a qualitative predicate:
an ordering inversion, a bound, or a distortion direction. Verdicts are
deterministic under a fixed seed. Predicates are qualitative on purpose;
no exact figure values are asserted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, EvaluationFrame, TimeSeries, ValidationError, benchmark_frame
from .measures import evaluate
from .olsar import fit_ar, recursive_forecast
from .synth import DgpSpec, OutlierInjection, derive_seed, generate, inject_outliers

__all__ = ["Scenario", "ScenarioResult", "list_scenarios", "run_scenario", "run_all", "DEFAULT_SEED"]

DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class ScenarioResult:
    name: str
    passed: bool
    evidence: dict
    description: str


@dataclass(frozen=True)
class Scenario:
    name: str
    topic: str
    description: str
    run: callable


def _single_series_frame(sid, origin, actuals, forecasts_by_model) -> EvaluationFrame:
    h = len(actuals)
    return EvaluationFrame(
        [sid] * h,
        [origin] * h,
        list(range(1, h + 1)),
        actuals,
        {m: np.asarray(f, dtype=float) for m, f in forecasts_by_model.items()},
    )


def _scenario_naive_vs_ar(seed: int) -> ScenarioResult:
    """On random walks, the last-value forecast beats a level-trained autoregression."""
    n, h, reps, order = 1000, 10, 200, 5
    mse_naive, mse_ar = [], []
    for i in range(reps):
        series = generate(DgpSpec(kind="random-walk", length=n, seed=derive_seed(seed, i)))
        train = series.values[: n - h]
        actual = series.values[n - h:]
        naive = np.full(h, train[-1])
        fit = fit_ar(train, order)
        ar = recursive_forecast(fit, train, h)
        mse_naive.append(float(((actual - naive) ** 2).mean()))
        mse_ar.append(float(((actual - ar) ** 2).mean()))
    mean_naive, mean_ar = float(np.mean(mse_naive)), float(np.mean(mse_ar))
    return ScenarioResult(
        name="naive-beats-ar-on-random-walk",
        passed=mean_naive <= mean_ar,
        evidence={"replications": reps, "mean_mse_naive": mean_naive, "mean_mse_ar": mean_ar},
        description=_CATALOGUE["naive-beats-ar-on-random-walk"].description,
    )


def _scenario_mape_seasonal(seed: int) -> ScenarioResult:
    """Identical absolute misses get very different percentage weight at seasonal peaks."""
    series = generate(DgpSpec(kind="seasonal", length=48, seed=seed, level=100.0,
                              amplitude=90.0, period=12, noise_sd=1.0))
    origin, h = 36, 12
    actual = series.values[origin: origin + h]
    peak, trough = int(np.argmax(actual)), int(np.argmin(actual))
    miss = 8.0
    f_peak = actual.copy()
    f_peak[peak] -= miss
    f_trough = actual.copy()
    f_trough[trough] -= miss
    frame = _single_series_frame(series.id, origin, actual,
                                 {"peak-miss": f_peak, "trough-miss": f_trough})
    mae_p = evaluate("MAE", frame, model="peak-miss").value
    mae_t = evaluate("MAE", frame, model="trough-miss").value
    mape_p = evaluate("MAPE", frame, model="peak-miss").value
    mape_t = evaluate("MAPE", frame, model="trough-miss").value
    return ScenarioResult(
        name="percentage-errors-miss-seasonal-peaks",
        passed=(mae_p == mae_t) and (mape_p < mape_t),
        evidence={"mae_peak_miss": mae_p, "mae_trough_miss": mae_t,
                  "mape_peak_miss": mape_p, "mape_trough_miss": mape_t,
                  "peak_actual": float(actual[peak]), "trough_actual": float(actual[trough])},
        description=_CATALOGUE["percentage-errors-miss-seasonal-peaks"].description,
    )


def _rolling_one_step_frame(series: TimeSeries, start: int, deviation: float, model: str):
    """One-step rolling-origin frame with forecasts a fixed deviation off the actuals."""
    n = len(series)
    origins = list(range(start, n))
    actuals = [series.value_at(o + 1) for o in origins]
    forecasts = np.asarray(actuals) + deviation
    frame = EvaluationFrame(
        [series.id] * len(origins), origins, [1] * len(origins), actuals, {model: forecasts},
    )
    keys = list(zip([series.id] * len(origins), origins, [1] * len(origins)))
    return frame, keys


def _scenario_mrae_negative_ar(seed: int) -> ScenarioResult:
    """A worse model looks better under relative errors when the benchmark collapses."""
    rng = np.random.default_rng(seed)
    n, start = 260, 200
    t = np.arange(n)
    jumpy = TimeSeries(id="jumpy", values=100.0 + 15.0 * (-1.0) ** t + rng.normal(0, 1.0, n))
    calm = TimeSeries(id="calm", values=100.0 + rng.normal(0, 0.5, n))
    ds = Dataset((jumpy, calm))

    frame_a, keys_a = _rolling_one_step_frame(jumpy, start, 0.5, "model")
    frame_b, keys_b = _rolling_one_step_frame(calm, start, 0.3, "model")
    bench_a = benchmark_frame(ds, keys_a, kind="naive")
    bench_b = benchmark_frame(ds, keys_b, kind="naive")

    mae_a = evaluate("MAE", frame_a).value
    mae_b = evaluate("MAE", frame_b).value
    mrae_a = evaluate("MRAE", frame_a, benchmark=bench_a).value
    mrae_b = evaluate("MRAE", frame_b, benchmark=bench_b).value
    return ScenarioResult(
        name="relative-errors-reward-bad-benchmarks",
        passed=(mae_a > mae_b) and (mrae_a < mrae_b),
        evidence={"mae_jumpy_model": mae_a, "mae_calm_model": mae_b,
                  "mrae_jumpy_model": mrae_a, "mrae_calm_model": mrae_b},
        description=_CATALOGUE["relative-errors-reward-bad-benchmarks"].description,
    )


def _scenario_mrae_trend(seed: int) -> ScenarioResult:
    """Relative errors shrink on trends because the benchmark's errors explode."""
    trended = generate(DgpSpec(kind="linear-trend", length=120, seed=seed,
                               level=100.0, trend_slope=5.0, noise_sd=1.0,
                               series_id="trended"))
    flat = generate(DgpSpec(kind="linear-trend", length=120, seed=seed + 1,
                            level=100.0, trend_slope=0.0, noise_sd=1.0, series_id="flat"))
    ds = Dataset((trended, flat))
    origin, h = 100, 20

    results = {}
    for series in (trended, flat):
        actual = series.values[origin: origin + h]
        frame = _single_series_frame(series.id, origin, actual, {"model": actual - 2.0})
        keys = [(series.id, origin, k) for k in range(1, h + 1)]
        bench = benchmark_frame(ds, keys, kind="naive")
        results[series.id] = (
            evaluate("MAE", frame).value,
            evaluate("MRAE", frame, benchmark=bench).value,
        )
    mae_t, mrae_t = results["trended"]
    mae_f, mrae_f = results["flat"]
    return ScenarioResult(
        name="relative-errors-shrink-on-trends",
        passed=(abs(mae_t - mae_f) < 1e-9) and (mrae_t < 1.0 < mrae_f),
        evidence={"mae_trended": mae_t, "mae_flat": mae_f,
                  "mrae_trended": mrae_t, "mrae_flat": mrae_f},
        description=_CATALOGUE["relative-errors-shrink-on-trends"].description,
    )


def _scenario_log_exp_trend(seed: int) -> ScenarioResult:
    """Log errors damp large absolute misses at the high end of an exponential trend."""
    series = generate(DgpSpec(kind="exponential-trend", length=100, seed=seed,
                              trend_scale=100.0, trend_rate=0.05, noise_sd=0.0))
    origin, h = 80, 20
    actual = series.values[origin: origin + h]
    late = actual.copy()
    late[-1] -= 1000.0  # big absolute miss at a high level
    early = actual.copy()
    early[0] -= 500.0  # half the miss at a much lower level
    frame = _single_series_frame(series.id, origin, actual,
                                 {"late-big-miss": late, "early-small-miss": early})
    mae_late = evaluate("MAE", frame, model="late-big-miss").value
    mae_early = evaluate("MAE", frame, model="early-small-miss").value
    rmsle_late = evaluate("RMSLE", frame, model="late-big-miss").value
    rmsle_early = evaluate("RMSLE", frame, model="early-small-miss").value
    return ScenarioResult(
        name="log-errors-vanish-on-exponential-trends",
        passed=(mae_late > mae_early) and (rmsle_late < rmsle_early),
        evidence={"mae_late_big_miss": mae_late, "mae_early_small_miss": mae_early,
                  "rmsle_late_big_miss": rmsle_late, "rmsle_early_small_miss": rmsle_early},
        description=_CATALOGUE["log-errors-vanish-on-exponential-trends"].description,
    )


def _scenario_wape_break(seed: int) -> ScenarioResult:
    """The same miss weighs more under a per-series scale once a break shrinks the scale."""
    rng = np.random.default_rng(seed)
    h = 20
    base = 100.0 + rng.normal(0, 0.5, h)
    with_break = base.copy()
    with_break[10:] -= 80.0  # regime drop inside the horizon
    miss_at = 4
    f_break = with_break.copy()
    f_break[miss_at] -= 10.0
    f_flat = base.copy()
    f_flat[miss_at] -= 10.0

    frame_a = _single_series_frame("break", 100, with_break, {"model": f_break})
    frame_b = _single_series_frame("flat", 100, base, {"model": f_flat})
    wape_a = evaluate("WAPE", frame_a).value
    wape_b = evaluate("WAPE", frame_b).value
    return ScenarioResult(
        name="wape-inflates-after-horizon-break",
        passed=wape_a > wape_b,
        evidence={"wape_with_break": wape_a, "wape_without_break": wape_b,
                  "identical_error_at_step": miss_at + 1},
        description=_CATALOGUE["wape-inflates-after-horizon-break"].description,
    )


def _scenario_smae_break(seed: int) -> ScenarioResult:
    """In-sample scaling penalises a series whose training region has a level shift."""
    rng = np.random.default_rng(seed)
    train_break = np.concatenate([100.0 + rng.normal(0, 1, 50), 20.0 + rng.normal(0, 1, 50)])
    train_flat = 100.0 + rng.normal(0, 1, 100)
    actual = 20.0 + rng.normal(0, 1, 10)
    forecasts = actual + 5.0

    frame_a = _single_series_frame("break-in-sample", 100, actual, {"model": forecasts})
    frame_b = _single_series_frame("flat-in-sample", 100, actual, {"model": forecasts})
    smae_a = evaluate("sMAE", frame_a, train={"break-in-sample": train_break}).value
    smae_b = evaluate("sMAE", frame_b, train={"flat-in-sample": train_flat}).value
    return ScenarioResult(
        name="in-sample-scale-break-skews-smae",
        passed=smae_a > smae_b,
        evidence={"smae_break_in_training": smae_a, "smae_flat_training": smae_b,
                  "train_mean_break": float(train_break.mean()),
                  "train_mean_flat": float(train_flat.mean())},
        description=_CATALOGUE["in-sample-scale-break-skews-smae"].description,
    )


def _scenario_mase_break(seed: int) -> ScenarioResult:
    """A break at the origin yields MASE > 1 although the model beats the benchmark."""
    rng = np.random.default_rng(seed)
    train = 100.0 + rng.normal(0, 0.3, 100)
    actual = 20.0 + rng.normal(0, 1.0, 10)
    model = actual + 1.0
    naive = np.full(10, train[-1])

    frame = _single_series_frame("s", 100, actual, {"model": model})
    mase = evaluate("MASE", frame, train={"s": train}).value
    model_oos_mae = float(np.abs(actual - model).mean())
    naive_oos_mae = float(np.abs(actual - naive).mean())
    return ScenarioResult(
        name="break-at-origin-breaks-mase",
        passed=(mase > 1.0) and (model_oos_mae < naive_oos_mae),
        evidence={"mase": mase, "model_oos_mae": model_oos_mae, "naive_oos_mae": naive_oos_mae},
        description=_CATALOGUE["break-at-origin-breaks-mase"].description,
    )


def _scenario_corr_bias(seed: int) -> ScenarioResult:
    """Correlation is blind to constant bias: a shifted forecast correlates perfectly."""
    rng = np.random.default_rng(seed)
    series = generate(DgpSpec(kind="random-walk", length=50, seed=seed, level=50.0))
    origin, h = 30, 20
    actual = series.values[origin: origin + h]
    biased = actual + 10.0
    noisy = actual + rng.normal(0, 2.0, h)
    frame = _single_series_frame(series.id, origin, actual, {"biased": biased, "noisy": noisy})
    corr_biased = evaluate("CORR", frame, model="biased").value
    corr_noisy = evaluate("CORR", frame, model="noisy").value
    me_biased = evaluate("ME", frame, model="biased").value
    mae_biased = evaluate("MAE", frame, model="biased").value
    mae_noisy = evaluate("MAE", frame, model="noisy").value
    return ScenarioResult(
        name="corr-ignores-constant-bias",
        passed=(abs(corr_biased - 1.0) < 1e-12 and abs(me_biased + 10.0) < 1e-12
                and corr_biased > corr_noisy and mae_biased > mae_noisy),
        evidence={"corr_biased": corr_biased, "corr_noisy": corr_noisy,
                  "me_biased": me_biased, "mae_biased": mae_biased, "mae_noisy": mae_noisy},
        description=_CATALOGUE["corr-ignores-constant-bias"].description,
    )


def _scenario_gm_zero(seed: int) -> ScenarioResult:
    """One perfect step drags a geometric mean to zero regardless of the rest."""
    rng = np.random.default_rng(seed)
    actual = 50.0 + rng.normal(0, 5.0, 10)
    lucky = actual + 50.0
    lucky[0] = actual[0]  # one exact hit, terrible elsewhere
    steady = actual + 1.0
    frame = _single_series_frame("s", 10, actual, {"lucky": lucky, "steady": steady})
    gmae_lucky = evaluate("GMAE", frame, model="lucky")
    gmae_steady = evaluate("GMAE", frame, model="steady")
    mae_lucky = evaluate("MAE", frame, model="lucky").value
    mae_steady = evaluate("MAE", frame, model="steady").value
    return ScenarioResult(
        name="geometric-mean-collapses-on-one-perfect-hit",
        passed=(gmae_lucky.value == 0.0
                and "geometric-mean-zero-term" in gmae_lucky.flags
                and gmae_lucky.value < gmae_steady.value
                and mae_lucky > mae_steady),
        evidence={"gmae_lucky": gmae_lucky.value, "gmae_steady": gmae_steady.value,
                  "mae_lucky": mae_lucky, "mae_steady": mae_steady},
        description=_CATALOGUE["geometric-mean-collapses-on-one-perfect-hit"].description,
    )


def _scenario_intermittent(seed: int) -> ScenarioResult:
    """On intermittent demand, absolute errors reward the all-zero forecast; squared do not."""
    n, origin = 4000, 1000
    series = generate(DgpSpec(kind="intermittent", length=n, seed=seed,
                              zero_probability=0.8, demand_rate=2.0))
    actual = series.values[origin:]
    h = actual.size
    train_mean = float(series.values[:origin].mean())
    frame = _single_series_frame(series.id, origin, actual,
                                 {"all-zeros": np.zeros(h), "mean-rate": np.full(h, train_mean)})
    mae_zero = evaluate("MAE", frame, model="all-zeros").value
    mae_mean = evaluate("MAE", frame, model="mean-rate").value
    rmse_zero = evaluate("RMSE", frame, model="all-zeros").value
    rmse_mean = evaluate("RMSE", frame, model="mean-rate").value
    return ScenarioResult(
        name="absolute-errors-prefer-all-zero-forecasts-on-intermittent",
        passed=(mae_zero < mae_mean) and (rmse_mean < rmse_zero),
        evidence={"mae_all_zeros": mae_zero, "mae_mean_rate": mae_mean,
                  "rmse_all_zeros": rmse_zero, "rmse_mean_rate": rmse_mean,
                  "zero_fraction": float((actual == 0).mean())},
        description=_CATALOGUE["absolute-errors-prefer-all-zero-forecasts-on-intermittent"].description,
    )


def _scenario_outlier_origin(seed: int) -> ScenarioResult:
    """A low outlier at the origin inflates benchmark errors and deflates relative errors."""
    clean = generate(DgpSpec(kind="heteroscedastic", length=120, seed=seed,
                             level=100.0, noise_sd=2.0, series_id="clean"))
    origin, h = 100, 20
    spiked, log = inject_outliers(
        clean, OutlierInjection(indices=(origin,), magnitude=10.0, mode="multiply",
                                direction="low"), seed=seed)
    spiked = TimeSeries(id="spiked", values=spiked.values)
    ds = Dataset((clean, spiked))

    results = {}
    for series in (clean, spiked):
        actual = series.values[origin: origin + h]
        frame = _single_series_frame(series.id, origin, actual, {"model": actual + 3.0})
        keys = [(series.id, origin, k) for k in range(1, h + 1)]
        bench = benchmark_frame(ds, keys, kind="naive")
        results[series.id] = (
            evaluate("MAE", frame).value,
            evaluate("MRAE", frame, benchmark=bench).value,
        )
    mae_clean, mrae_clean = results["clean"]
    mae_spiked, mrae_spiked = results["spiked"]
    return ScenarioResult(
        name="outlier-at-origin-shrinks-relative-errors",
        passed=(abs(mae_clean - mae_spiked) < 1e-9) and (mrae_spiked < mrae_clean),
        evidence={"mae_clean": mae_clean, "mae_with_outlier": mae_spiked,
                  "mrae_clean": mrae_clean, "mrae_with_outlier": mrae_spiked,
                  "outlier": {"index": log[0][0], "old": log[0][1], "new": log[0][2]}},
        description=_CATALOGUE["outlier-at-origin-shrinks-relative-errors"].description,
    )


def _scenario_heteroscedastic(seed: int) -> ScenarioResult:
    """Percentage errors under-weight misses at wide-variance peaks of a series."""
    series = generate(DgpSpec(kind="heteroscedastic", length=200, seed=seed,
                              level=50.0, noise_sd=1.0, sigma_end_factor=15.0))
    origin, h = 100, 100
    actual = series.values[origin: origin + h]
    peak, trough = int(np.argmax(actual)), int(np.argmin(actual))
    miss = 4.0
    f_peak = actual.copy()
    f_peak[peak] -= miss
    f_trough = actual.copy()
    f_trough[trough] -= miss
    frame = _single_series_frame(series.id, origin, actual,
                                 {"peak-miss": f_peak, "trough-miss": f_trough})
    mae_p = evaluate("MAE", frame, model="peak-miss").value
    mae_t = evaluate("MAE", frame, model="trough-miss").value
    mape_p = evaluate("MAPE", frame, model="peak-miss").value
    mape_t = evaluate("MAPE", frame, model="trough-miss").value
    return ScenarioResult(
        name="percentage-errors-distort-heteroscedastic-extremes",
        passed=(mae_p == mae_t) and (mape_p < mape_t),
        evidence={"mape_peak_miss": mape_p, "mape_trough_miss": mape_t,
                  "peak_actual": float(actual[peak]), "trough_actual": float(actual[trough])},
        description=_CATALOGUE["percentage-errors-distort-heteroscedastic-extremes"].description,
    )


_CATALOGUE: dict[str, Scenario] = {}


def _register(name: str, topic: str, description: str, run) -> None:
    _CATALOGUE[name] = Scenario(name=name, topic=topic, description=description, run=run)


_register(
    "naive-beats-ar-on-random-walk", "unit-roots",
    "On seeded random walks the last-value forecast attains mean squared error no "
    "worse than an autoregression trained on levels; apparent wins over it are spurious.",
    _scenario_naive_vs_ar,
)
_register(
    "percentage-errors-miss-seasonal-peaks", "seasonality",
    "Two forecasts with identical absolute error, one missing the seasonal peak and one "
    "the trough, get opposite percentage-error verdicts: the peak miss is under-weighted.",
    _scenario_mape_seasonal,
)
_register(
    "relative-errors-reward-bad-benchmarks", "count-data",
    "On a rapidly alternating series the one-step benchmark collapses, so a model with "
    "higher absolute error scores a lower relative error than a better model on a calm series.",
    _scenario_mrae_negative_ar,
)
_register(
    "relative-errors-shrink-on-trends", "trends",
    "On a strongly trended series the fixed-origin benchmark errors grow with the horizon, "
    "deflating relative errors below 1 for a model identical to one on a flat series.",
    _scenario_mrae_trend,
)
_register(
    "log-errors-vanish-on-exponential-trends", "trends",
    "With an exponential trend, a twice-as-large absolute miss late in the horizon produces "
    "a smaller log error than a small early miss, inverting the absolute-error ordering.",
    _scenario_log_exp_trend,
)
_register(
    "wape-inflates-after-horizon-break", "structural-breaks",
    "A level drop inside the horizon shrinks the per-series scale, so the same miss at the "
    "same point counts for more than on a series without the break.",
    _scenario_wape_break,
)
_register(
    "in-sample-scale-break-skews-smae", "structural-breaks",
    "With identical test-region actuals and forecasts, in-sample mean scaling reports a "
    "higher error for the series whose training region contains a level shift.",
    _scenario_smae_break,
)
_register(
    "break-at-origin-breaks-mase", "structural-breaks",
    "A level shift at the forecast origin keeps the in-sample benchmark scale tiny, so the "
    "scaled error exceeds 1 even though the model clearly beats the benchmark out of sample.",
    _scenario_mase_break,
)
_register(
    "corr-ignores-constant-bias", "bias",
    "A forecast shifted by a constant correlates perfectly with the actuals, so a "
    "correlation score prefers a heavily biased model over a nearly unbiased one.",
    _scenario_corr_bias,
)
_register(
    "geometric-mean-collapses-on-one-perfect-hit", "aggregation",
    "A single zero error sends a geometric-mean measure to exactly zero, crowning a model "
    "that is far worse everywhere else.",
    _scenario_gm_zero,
)
_register(
    "absolute-errors-prefer-all-zero-forecasts-on-intermittent", "intermittency",
    "On a mostly-zero demand series, absolute errors reward forecasting constant zeros, "
    "while squared errors prefer the mean demand rate.",
    _scenario_intermittent,
)
_register(
    "outlier-at-origin-shrinks-relative-errors", "outliers",
    "A low outlier at the forecast origin wrecks the benchmark's holdout errors, so the "
    "model's relative errors collapse although its own errors are unchanged.",
    _scenario_outlier_origin,
)
_register(
    "percentage-errors-distort-heteroscedastic-extremes", "heteroscedasticity",
    "When late-series variance widens the range, identical misses at the high and low "
    "extremes get opposite percentage-error weight.",
    _scenario_heteroscedastic,
)


def list_scenarios() -> list[Scenario]:
    """Stable catalogue of registered scenarios."""
    return list(_CATALOGUE.values())


def run_scenario(name: str, seed: int = DEFAULT_SEED) -> ScenarioResult:
    try:
        scenario = _CATALOGUE[name]
    except KeyError:
        known = ", ".join(_CATALOGUE)
        raise ValidationError(f"unknown scenario {name!r}; known scenarios: {known}") from None
    return scenario.run(seed)


def run_all(seed: int = DEFAULT_SEED) -> list[ScenarioResult]:
    return [scenario.run(seed) for scenario in _CATALOGUE.values()]
