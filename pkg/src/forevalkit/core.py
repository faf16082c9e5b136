"""Domain types for series, forecasts and aligned evaluation data.

Conventions used throughout the package:

* Time positions are 1-based: a series of length T holds values y_1..y_T.
* The forecast origin is the position of the last known observation, so a
  forecast at horizon step k targets position origin + k.
* All types are immutable after construction and all operations are pure,
  so series can be processed in parallel without shared state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ForevalError",
    "ValidationError",
    "InsufficientHistoryError",
    "TimeSeries",
    "Dataset",
    "Forecaster",
    "EvaluationFrame",
    "EmbeddedMatrix",
    "naive_forecast",
    "seasonal_naive_forecast",
    "mean_forecast",
    "embed",
]


class ForevalError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ForevalError):
    """Input violates a documented invariant (domain error)."""


class InsufficientHistoryError(ValidationError):
    """The requested operation needs more observations than are available."""


@dataclass(frozen=True)
class TimeSeries:
    """A single univariate series with strictly increasing integer timestamps.

    ``frequency`` is the seasonal period m (e.g. 7 for daily data with a
    weekly pattern); it is optional and never inferred.
    """

    id: str
    values: np.ndarray
    timestamps: np.ndarray | None = None
    frequency: int | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise ValidationError(f"series {self.id!r}: values must be a non-empty 1-d sequence")
        if np.isnan(values).any():
            raise ValidationError(
                f"series {self.id!r}: missing values are rejected at ingestion"
            )
        if not np.isfinite(values).all():
            raise ValidationError(f"series {self.id!r}: values must be finite")
        if self.timestamps is None:
            ts = np.arange(1, values.size + 1, dtype=np.int64)
        else:
            ts = np.asarray(self.timestamps, dtype=np.int64)
            if ts.shape != values.shape:
                raise ValidationError(f"series {self.id!r}: timestamps/values length mismatch")
            if ts.size > 1 and not (np.diff(ts) > 0).all():
                raise ValidationError(f"series {self.id!r}: timestamps must be strictly increasing")
        if self.frequency is not None and self.frequency < 2:
            raise ValidationError(f"series {self.id!r}: frequency must be >= 2 when given")
        values.setflags(write=False)
        ts.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "timestamps", ts)

    def __len__(self) -> int:
        return self.values.size

    def value_at(self, position: int) -> float:
        """Value at 1-based position."""
        if not 1 <= position <= len(self):
            raise ValidationError(f"position {position} outside series {self.id!r} (length {len(self)})")
        return float(self.values[position - 1])

    def prefix(self, position: int) -> np.ndarray:
        """Values y_1..y_position (the training region for origin = position)."""
        if not 1 <= position <= len(self):
            raise ValidationError(f"position {position} outside series {self.id!r} (length {len(self)})")
        return self.values[:position]


@dataclass(frozen=True)
class Dataset:
    """A collection of series with unique ids."""

    series: tuple[TimeSeries, ...]

    def __post_init__(self):
        series = tuple(self.series)
        if not series:
            raise ValidationError("dataset must contain at least one series")
        ids = [s.id for s in series]
        if len(set(ids)) != len(ids):
            raise ValidationError("dataset series ids must be unique")
        object.__setattr__(self, "series", series)
        object.__setattr__(self, "_by_id", {s.id: s for s in series})

    def __iter__(self):
        return iter(self.series)

    def __len__(self) -> int:
        return len(self.series)

    def ids(self) -> list[str]:
        return [s.id for s in self.series]

    def __getitem__(self, series_id: str) -> TimeSeries:
        try:
            return self._by_id[series_id]
        except KeyError:
            raise KeyError(f"unknown series id {series_id!r}") from None


def naive_forecast(series: TimeSeries, origin: int, h: int) -> np.ndarray:
    """Repeat the last known observation over the horizon.

    Optimal for a random walk; the baseline every comparison should include.
    """
    if h < 1:
        raise ValidationError("horizon must be >= 1")
    if not 1 <= origin <= len(series):
        raise ValidationError(f"origin {origin} out of range for series {series.id!r}")
    return np.full(h, series.values[origin - 1], dtype=float)


def seasonal_naive_forecast(series: TimeSeries, origin: int, h: int, m: int) -> np.ndarray:
    """Repeat the value from one seasonal period earlier, per step.

    The forecast at step k is y at position origin + k - m*ceil(k/m); with
    m = 1 this degenerates to the naive forecast.
    """
    if h < 1:
        raise ValidationError("horizon must be >= 1")
    if m < 1:
        raise ValidationError("seasonal period must be >= 1")
    if not 1 <= origin <= len(series):
        raise ValidationError(f"origin {origin} out of range for series {series.id!r}")
    if origin < m:
        raise InsufficientHistoryError(
            f"seasonal naive needs at least one full period of history (origin {origin} < m {m})"
        )
    steps = np.arange(1, h + 1)
    positions = origin + steps - m * np.ceil(steps / m).astype(int)
    return series.values[positions - 1].astype(float)


def mean_forecast(series: TimeSeries, origin: int, h: int) -> np.ndarray:
    """Forecast the mean of the history up to the origin, repeated over the horizon.

    Uses only positions <= origin; nothing after the origin can change the output.
    """
    if h < 1:
        raise ValidationError("horizon must be >= 1")
    if not 1 <= origin <= len(series):
        raise ValidationError(f"origin {origin} out of range for series {series.id!r}")
    return np.full(h, float(series.values[:origin].mean()), dtype=float)


_BENCHMARK_KINDS = ("naive", "seasonal-naive", "mean", "external")


@dataclass(frozen=True)
class Forecaster:
    """A benchmark forecaster, or a tag for externally supplied forecasts.

    External forecasts enter the toolkit as data and are never fitted here;
    asking an ``external`` forecaster to predict is an error.
    """

    kind: str
    period: int | None = None

    def __post_init__(self):
        if self.kind not in _BENCHMARK_KINDS:
            raise ValidationError(f"unknown forecaster kind {self.kind!r}; expected one of {_BENCHMARK_KINDS}")
        if self.kind == "seasonal-naive" and (self.period is None or self.period < 1):
            raise ValidationError("seasonal-naive requires a positive seasonal period")

    def forecast(self, series: TimeSeries, origin: int, h: int) -> np.ndarray:
        if self.kind == "naive":
            return naive_forecast(series, origin, h)
        if self.kind == "seasonal-naive":
            m = self.period if self.period is not None else series.frequency
            if m is None:
                raise ValidationError("seasonal-naive requires a seasonal period")
            return seasonal_naive_forecast(series, origin, h, m)
        if self.kind == "mean":
            return mean_forecast(series, origin, h)
        raise ValidationError("external forecasts are read-only inputs and cannot be generated")


@dataclass(frozen=True)
class EmbeddedMatrix:
    """Lag-matrix form of a series for an autoregression of order p.

    Row i (1-based) holds y_i..y_{i+p-1} as predictors and y_{i+p} as the
    target, so a length-n series yields exactly n - p rows and every row is a
    window of p + 1 consecutive observations.
    """

    series_id: str
    order: int
    predictors: np.ndarray  # shape (n - p, p), row i-1 = y_i..y_{i+p-1}
    targets: np.ndarray  # shape (n - p,), row i-1 = y_{i+p}

    def __post_init__(self):
        self.predictors.setflags(write=False)
        self.targets.setflags(write=False)

    @property
    def n_rows(self) -> int:
        return self.targets.size

    def row_span(self, row: int) -> tuple[int, int]:
        """Original 1-based position range (start, end) covered by a row."""
        if not 1 <= row <= self.n_rows:
            raise ValidationError(f"row {row} out of range (1..{self.n_rows})")
        return row, row + self.order

    def reassemble(self) -> np.ndarray:
        """Reconstruct the original series values from the rows."""
        return np.concatenate([self.predictors[0], self.targets])


def embed(series: TimeSeries, p: int) -> EmbeddedMatrix:
    """Build the order-p embedded matrix of a series.

    Requires n > p >= 1 and returns n - p rows.
    """
    n = len(series)
    if p < 1:
        raise ValidationError("embedding order must be >= 1")
    if n <= p:
        raise InsufficientHistoryError(f"series length {n} must exceed embedding order {p}")
    v = series.values
    idx = np.arange(n - p)[:, None] + np.arange(p)[None, :]
    return EmbeddedMatrix(
        series_id=series.id,
        order=p,
        predictors=v[idx].copy(),
        targets=v[p:].copy(),
    )


class EvaluationFrame:
    """Aligned (actual, forecast) records keyed by (series, origin, step).

    The frame is dense: every key carries a forecast for every model, and the
    actual value for a key is stored once, so it cannot differ across models.
    This is the single source for every base error in the measures module.
    """

    def __init__(
        self,
        series_ids,
        origins,
        steps,
        actuals,
        forecasts: dict[str, np.ndarray],
    ):
        self.series_ids = np.asarray(series_ids, dtype=object)
        self.origins = np.asarray(origins, dtype=np.int64)
        self.steps = np.asarray(steps, dtype=np.int64)
        self.actuals = np.asarray(actuals, dtype=float)
        if not forecasts:
            raise ValidationError("evaluation frame needs at least one model")
        self.forecasts = {name: np.asarray(f, dtype=float) for name, f in forecasts.items()}

        n = self.actuals.size
        if n == 0:
            raise ValidationError("evaluation frame is empty")
        for arr in (self.series_ids, self.origins, self.steps):
            if arr.size != n:
                raise ValidationError("evaluation frame columns must have equal length")
        for name, f in self.forecasts.items():
            if f.size != n:
                raise ValidationError(f"model {name!r}: forecast column length mismatch")
        if (self.steps < 1).any():
            raise ValidationError("horizon steps must be >= 1")
        keys = list(zip(self.series_ids.tolist(), self.origins.tolist(), self.steps.tolist()))
        if len(set(keys)) != n:
            raise ValidationError("duplicate (series, origin, step) key in evaluation frame")

        for arr in (self.series_ids, self.origins, self.steps, self.actuals, *self.forecasts.values()):
            arr.setflags(write=False)

    @property
    def models(self) -> list[str]:
        return list(self.forecasts)

    @property
    def horizon(self) -> int:
        return int(self.steps.max())

    @property
    def n_rows(self) -> int:
        return self.actuals.size

    def unique_series(self) -> list[str]:
        seen: dict[str, None] = {}
        for sid in self.series_ids.tolist():
            seen.setdefault(sid, None)
        return list(seen)

    def model_column(self, model: str | None = None) -> np.ndarray:
        """Forecast column for a model; the model may be omitted if unambiguous."""
        if model is None:
            if len(self.forecasts) != 1:
                raise ValidationError(
                    f"frame has models {self.models}; specify which one to evaluate"
                )
            return next(iter(self.forecasts.values()))
        try:
            return self.forecasts[model]
        except KeyError:
            raise ValidationError(f"unknown model {model!r}; frame has {self.models}") from None

    def select_model(self, model: str) -> "EvaluationFrame":
        """Single-model view of this frame (used to pass benchmarks around)."""
        return EvaluationFrame(
            self.series_ids, self.origins, self.steps, self.actuals,
            {model: self.model_column(model)},
        )

    def series_mask(self, series_id: str) -> np.ndarray:
        return self.series_ids == series_id

    def align_benchmark(self, benchmark: "EvaluationFrame") -> np.ndarray:
        """Benchmark forecast column re-ordered to this frame's keys.

        The benchmark frame must hold exactly one model and cover every key.
        """
        if len(benchmark.forecasts) != 1:
            raise ValidationError("benchmark frame must carry exactly one model")
        col = next(iter(benchmark.forecasts.values()))
        index = {
            (sid, int(o), int(k)): i
            for i, (sid, o, k) in enumerate(
                zip(benchmark.series_ids.tolist(), benchmark.origins, benchmark.steps)
            )
        }
        out = np.empty(self.n_rows, dtype=float)
        for i, (sid, o, k) in enumerate(zip(self.series_ids.tolist(), self.origins, self.steps)):
            j = index.get((sid, int(o), int(k)))
            if j is None:
                raise ValidationError(f"benchmark frame is missing key ({sid!r}, {int(o)}, {int(k)})")
            out[i] = col[j]
        return out


def frame_from_records(records, models: list[str] | None = None) -> EvaluationFrame:
    """Build a frame from (series_id, origin, step, actual, {model: forecast}) tuples."""
    records = list(records)
    if not records:
        raise ValidationError("no evaluation records")
    if models is None:
        models = sorted({m for *_, fc in records for m in fc})
    cols: dict[str, list[float]] = {m: [] for m in models}
    sids, origins, steps, actuals = [], [], [], []
    for sid, origin, step, actual, fc in records:
        sids.append(sid)
        origins.append(origin)
        steps.append(step)
        actuals.append(actual)
        for m in models:
            if m not in fc:
                raise ValidationError(f"record ({sid!r}, {origin}, {step}) lacks forecast for model {m!r}")
            cols[m].append(fc[m])
    return EvaluationFrame(sids, origins, steps, actuals, {m: np.array(v) for m, v in cols.items()})


def benchmark_frame(
    dataset: Dataset,
    keys,
    kind: str = "naive",
    period: int | None = None,
    name: str | None = None,
) -> EvaluationFrame:
    """Generate benchmark forecasts for the given (series, origin, step) keys.

    Forecasts are produced per origin from the series prefix only, so no
    information after the origin leaks into the benchmark.
    """
    fc = Forecaster(kind=kind, period=period)
    name = name or kind
    by_origin: dict[tuple[str, int], list[int]] = {}
    keys = list(keys)
    for sid, origin, step in keys:
        by_origin.setdefault((sid, int(origin)), []).append(int(step))
    values: dict[tuple[str, int, int], float] = {}
    for (sid, origin), steps in by_origin.items():
        h = max(steps)
        f = fc.forecast(dataset[sid], origin, h)
        for k in steps:
            values[(sid, origin, k)] = float(f[k - 1])
    sids = [k[0] for k in keys]
    origins = [k[1] for k in keys]
    steps = [k[2] for k in keys]
    actuals = [dataset[sid].value_at(int(o) + int(k)) for sid, o, k in keys]
    col = np.array([values[(sid, int(o), int(k))] for sid, o, k in keys])
    return EvaluationFrame(sids, origins, steps, actuals, {name: col})
