"""Summarising operators, model ranking, and count-based scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from ..core import ValidationError
from .engine import WeightVector

__all__ = [
    "summarize",
    "RankTable",
    "rank_models",
    "percentage_better",
    "critical_event_percentage",
]

_OPS = ("mean", "median", "geometric-mean")


def _apply(values: np.ndarray, op: str, weights: np.ndarray | None = None) -> float:
    if op not in _OPS:
        raise ValidationError(f"unknown operator {op!r}; expected one of {_OPS}")
    if values.size == 0:
        raise ValidationError("cannot summarise an empty collection")
    if op == "geometric-mean" and (values < 0).any():
        raise ValidationError("geometric mean is undefined over negative values")
    if weights is None:
        if op == "mean":
            return float(values.mean())
        if op == "median":
            return float(np.median(values))
        if (values == 0).any():
            return 0.0
        return float(np.exp(np.log(values).mean()))
    if weights.shape != values.shape:
        raise ValidationError("weights must match the summarised axis length")
    if op == "mean":
        return float((weights * values).sum() / weights.sum())
    if op == "median":
        order = np.argsort(values)
        cum = np.cumsum(weights[order])
        return float(values[order][np.searchsorted(cum, cum[-1] / 2.0)])
    if (values == 0).any():
        return 0.0
    return float(np.exp((weights * np.log(values)).sum() / weights.sum()))


def summarize(
    values: dict,
    order: str = "horizon-then-series",
    op_horizon: str = "mean",
    op_series: str = "mean",
    weights: WeightVector | None = None,
) -> float:
    """Summarise per-(series, step) values in a declared order.

    ``values`` maps series_id -> per-step value sequence. ``order`` is one of
    ``horizon-then-series`` (summarise each series over its horizon first),
    ``series-then-horizon`` (summarise across series per step first; requires
    equal horizon lengths) or ``pooled`` (one flat pass over all values).
    Weights apply at their declared axis.
    """
    if not values:
        raise ValidationError("no values to summarise")
    arrays = {sid: np.asarray(v, dtype=float) for sid, v in values.items()}
    if any(a.size == 0 for a in arrays.values()):
        raise ValidationError("empty per-series value sequence")

    step_w = series_w = None
    if weights is not None:
        if weights.axis == "series":
            try:
                series_w = np.array([weights.weights[sid] for sid in arrays], dtype=float)
            except KeyError as exc:
                raise ValidationError(f"no weight for series {exc.args[0]!r}") from None
        else:
            step_w = weights

    if order == "pooled":
        flat, flat_w = [], []
        for sid, a in arrays.items():
            flat.append(a)
            if step_w is not None:
                flat_w.append(np.array([step_w.weights.get(k + 1, None) for k in range(a.size)], dtype=float))
                if np.isnan(flat_w[-1]).any():
                    raise ValidationError("step weights must cover every horizon step")
            elif series_w is not None:
                flat_w.append(np.full(a.size, weights.weights[sid], dtype=float))
        w = np.concatenate(flat_w) if flat_w else None
        return _apply(np.concatenate(flat), op_horizon, w)

    if order == "horizon-then-series":
        per_series = []
        for sid, a in arrays.items():
            w = None
            if step_w is not None:
                w = np.array([step_w.weights.get(k + 1, np.nan) for k in range(a.size)], dtype=float)
                if np.isnan(w).any():
                    raise ValidationError("step weights must cover every horizon step")
            per_series.append(_apply(a, op_horizon, w))
        return _apply(np.asarray(per_series), op_series, series_w)

    if order == "series-then-horizon":
        lengths = {a.size for a in arrays.values()}
        if len(lengths) != 1:
            raise ValidationError("series-then-horizon needs equal horizon lengths")
        mat = np.vstack(list(arrays.values()))  # series x steps
        per_step = np.array([_apply(mat[:, j], op_series, series_w) for j in range(mat.shape[1])])
        w = None
        if step_w is not None:
            w = np.array([step_w.weights.get(k + 1, np.nan) for k in range(per_step.size)], dtype=float)
            if np.isnan(w).any():
                raise ValidationError("step weights must cover every horizon step")
        return _apply(per_step, op_horizon, w)

    raise ValidationError(
        f"unknown aggregation order {order!r}; expected horizon-then-series, series-then-horizon or pooled"
    )


@dataclass(frozen=True)
class RankTable:
    """Per-series model ranks (1 = best) with average-rank tie handling."""

    models: tuple[str, ...]
    series_ids: tuple
    ranks: np.ndarray  # shape (n_series, n_models)

    def __post_init__(self):
        self.ranks.setflags(write=False)

    @property
    def n_series(self) -> int:
        return self.ranks.shape[0]

    @property
    def n_models(self) -> int:
        return self.ranks.shape[1]

    @property
    def mean_ranks(self) -> dict:
        means = self.ranks.mean(axis=0)
        return {m: float(v) for m, v in zip(self.models, means)}


def rank_models(per_series_scores: dict, ascending: bool = True) -> RankTable:
    """Rank models per series from aligned score collections.

    ``per_series_scores`` maps model -> score sequence over the same series
    in the same order. ``ascending=True`` means lower scores are better
    (rank 1); pass ``False`` for goodness scores. Ties get average ranks.
    """
    if len(per_series_scores) < 2:
        raise ValidationError("ranking needs at least two models")
    models = tuple(per_series_scores)
    arrays = [np.asarray(per_series_scores[m], dtype=float) for m in models]
    n = arrays[0].size
    if n == 0:
        raise ValidationError("ranking needs at least one series")
    if any(a.size != n for a in arrays):
        raise ValidationError("all models must be scored on the same series")
    mat = np.column_stack(arrays)
    if np.isnan(mat).any():
        raise ValidationError("cannot rank undefined (NaN) scores")
    signed = mat if ascending else -mat
    ranks = np.vstack([rankdata(signed[i], method="average") for i in range(n)])
    return RankTable(models=models, series_ids=tuple(range(1, n + 1)), ranks=ranks)


def percentage_better(values, benchmark_values) -> float:
    """Share (in percent) of aligned items where the measure beats the benchmark's."""
    v = np.asarray(values, dtype=float)
    b = np.asarray(benchmark_values, dtype=float)
    if v.size == 0 or v.shape != b.shape:
        raise ValidationError("percentage-better needs non-empty aligned value collections")
    return float(100.0 * (v < b).mean())


def critical_event_percentage(values, margin: float) -> float:
    """Share (in percent) of items whose error exceeds the margin."""
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValidationError("critical-event percentage needs a non-empty value collection")
    return float(100.0 * (v > margin).mean())
