"""Evaluation engine for all registered error measures.

``evaluate`` computes one measure for one model over an evaluation frame.
It handles the undefined-value policy, per-series scale factors computed
strictly from supplied train values, benchmark alignment, and weighting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import EvaluationFrame, ValidationError
from .registry import UndefinedPolicy, spec_for

__all__ = ["MeasureResult", "UndefinedValueError", "WeightVector", "evaluate"]

_GM_ZERO_FLAG = "geometric-mean-zero-term"
_ZERO_SCALE_FLAG = "zero-scale"
_WINSORISED_FLAG = "winsorised-denominator"
_UNDEFINED_FLAG = "undefined-terms"


class UndefinedValueError(ValidationError):
    """Raised when undefined terms occur under the ``error`` policy."""


@dataclass(frozen=True)
class WeightVector:
    """Non-negative weights attached to series ids or horizon steps."""

    axis: str  # "series" | "step"
    weights: dict

    def __post_init__(self):
        if self.axis not in ("series", "step"):
            raise ValidationError("weight axis must be 'series' or 'step'")
        vals = list(self.weights.values())
        if not vals:
            raise ValidationError("weight vector is empty")
        if any(w < 0 for w in vals):
            raise ValidationError("weights must be non-negative")
        if sum(vals) <= 0:
            raise ValidationError("weights must not all be zero")

    def per_row(self, frame: EvaluationFrame) -> np.ndarray:
        if self.axis == "series":
            keys = frame.series_ids.tolist()
        else:
            keys = frame.steps.tolist()
        try:
            return np.array([self.weights[k] for k in keys], dtype=float)
        except KeyError as exc:
            raise ValidationError(f"no weight for {self.axis} {exc.args[0]!r}") from None


@dataclass(frozen=True)
class MeasureResult:
    """Computed measure value plus undefined-term diagnostics."""

    name: str
    model: str | None
    value: float
    n_used: int
    n_undefined: int
    per_series: dict | None = None
    flags: tuple[str, ...] = ()

    @property
    def defined(self) -> bool:
        return self.value == self.value  # not NaN


def _resolve_policy(policy) -> str:
    try:
        return UndefinedPolicy.parse(policy)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def _dedupe(flags: list[str]) -> tuple[str, ...]:
    return tuple(dict.fromkeys(flags))


def _summarise(terms: np.ndarray, op: str, flags: list[str]) -> float:
    """Apply a summarising operator to defined terms."""
    if op == "mean":
        return float(terms.mean())
    if op == "median":
        return float(np.median(terms))
    if op == "geometric-mean":
        a = np.abs(terms)
        if (a == 0).any():
            flags.append(_GM_ZERO_FLAG)
            return 0.0
        return float(np.exp(np.mean(np.log(a))))
    raise ValidationError(f"unknown summariser {op!r}")


def _finish(
    name: str,
    model: str | None,
    terms: np.ndarray,
    defined: np.ndarray,
    op: str,
    policy: str,
    flags: list[str],
    sqrt_after: bool = False,
    per_series: dict | None = None,
) -> MeasureResult:
    """Aggregate terms under a policy and assemble the result."""
    total = terms.size
    n_undef = int(total - defined.sum())
    if n_undef:
        flags.append(_UNDEFINED_FLAG)
        if policy == UndefinedPolicy.ERROR:
            raise UndefinedValueError(
                f"{name}: {n_undef} of {total} terms are undefined"
            )
    n_used = total - n_undef
    if (policy == UndefinedPolicy.PROPAGATE and n_undef) or n_used == 0:
        if n_used == 0 and not n_undef:
            flags.append("empty-input")
        return MeasureResult(name, model, float("nan"), n_used, n_undef, per_series, _dedupe(flags))
    value = _summarise(terms[defined], op, flags)
    if sqrt_after:
        value = math.sqrt(value)
    return MeasureResult(name, model, float(value), n_used, n_undef, per_series, _dedupe(flags))


def _series_groups(frame: EvaluationFrame) -> list[tuple[str, np.ndarray]]:
    """(series_id, row index array) in first-appearance order."""
    order: dict[str, list[int]] = {}
    for i, sid in enumerate(frame.series_ids.tolist()):
        order.setdefault(sid, []).append(i)
    return [(sid, np.array(rows)) for sid, rows in order.items()]


def _train_scale(name: str, train, sid: str, kind: str, constants: dict) -> float:
    """In-sample scale for one series, from its train values only.

    ``kind`` is ``mean`` (mean of the train values), ``naive-mae`` (mean
    absolute one-step benchmark error in-sample) or ``naive-mse`` (mean
    squared version). The benchmark differences are lag-1 by default, lag-m
    when a seasonal period is configured, and pooled over lags 1..h in the
    multi-step scale mode.
    """
    if train is None or sid not in train:
        raise ValidationError(f"{name}: no train values supplied for series {sid!r}")
    values = np.asarray(train[sid], dtype=float)
    if kind == "mean":
        if values.size < 1:
            raise ValidationError(f"{name}: empty train values for series {sid!r}")
        return float(values.mean())
    m = constants.get("seasonal_period") or 1
    if constants.get("scale_mode", "one-step") == "multi-step":
        h = constants.get("multistep_h")
        if not h or h < 1:
            raise ValidationError(f"{name}: multi-step scale mode needs multistep_h >= 1")
        lags = range(1, h + 1)
    else:
        lags = (m,)
    diffs = []
    for lag in lags:
        if values.size < lag + 1:
            raise ValidationError(
                f"{name}: series {sid!r} train length {values.size} too short for lag {lag} scaling"
            )
        diffs.append(values[lag:] - values[:-lag])
    d = np.concatenate(diffs)
    if kind == "naive-mae":
        return float(np.abs(d).mean())
    if kind == "naive-mse":
        return float((d * d).mean())
    raise ValidationError(f"unknown scale kind {kind!r}")


def _resolve_benchmark(frame: EvaluationFrame, benchmark, model: str | None) -> np.ndarray:
    """Benchmark forecast column aligned to the frame's keys."""
    if benchmark is None:
        raise ValidationError("this measure needs a benchmark (model name or benchmark frame)")
    if isinstance(benchmark, EvaluationFrame):
        return frame.align_benchmark(benchmark)
    if isinstance(benchmark, str):
        if benchmark == model:
            raise ValidationError("benchmark must differ from the evaluated model")
        return frame.model_column(benchmark)
    raise ValidationError("benchmark must be a model name or an EvaluationFrame")


def _resolve_weights(frame: EvaluationFrame, weights) -> np.ndarray:
    if weights is None:
        return np.ones(frame.n_rows)
    if isinstance(weights, WeightVector):
        return weights.per_row(frame)
    w = np.asarray(weights, dtype=float)
    if w.shape != (frame.n_rows,):
        raise ValidationError("per-row weights must match the number of frame rows")
    if (w < 0).any() or w.sum() <= 0:
        raise ValidationError("weights must be non-negative and not all zero")
    return w


def _rate_terms(frame: EvaluationFrame, yhat: np.ndarray) -> np.ndarray:
    """Rate-based base error: forecast minus the running mean of the actuals.

    The running mean is taken over the evaluation window of each
    (series, origin) pair, in horizon-step order.
    """
    c = np.empty(frame.n_rows)
    groups: dict[tuple, list[int]] = {}
    for i, (sid, o) in enumerate(zip(frame.series_ids.tolist(), frame.origins.tolist())):
        groups.setdefault((sid, o), []).append(i)
    for rows in groups.values():
        rows = sorted(rows, key=lambda i: frame.steps[i])
        idx = np.array(rows)
        y = frame.actuals[idx]
        cummean = np.cumsum(y) / np.arange(1, y.size + 1)
        c[idx] = yhat[idx] - cummean
    return c


def _pearson(y: np.ndarray, f: np.ndarray) -> float:
    dy = y - y.mean()
    df = f - f.mean()
    den = math.sqrt(float(dy @ dy) * float(df @ df))
    return float(dy @ df) / den


def evaluate(
    name: str,
    frame: EvaluationFrame,
    *,
    model: str | None = None,
    benchmark=None,
    train: dict | None = None,
    weights=None,
    policy: str = UndefinedPolicy.PROPAGATE,
    constants: dict | None = None,
    series_summary: str = "mean",
    breakdown: bool = False,
) -> MeasureResult:
    """Evaluate one measure for one model on an evaluation frame.

    Parameters
    ----------
    name : registered measure name (see ``measure_names()``).
    frame : aligned evaluation data.
    model : model to evaluate; optional when the frame has exactly one.
    benchmark : model name in the frame, or a single-model frame, for
        benchmark-relative measures.
    train : mapping series_id -> in-sample values, for measures whose scale
        is computed from the training region only.
    weights : WeightVector or per-row array, for weighted measures.
    policy : undefined-value policy (propagate | skip | error).
    constants : overrides for the measure's constants (epsilon, clamp, ...).
    series_summary : operator combining per-series values of per-series
        measures (mean | median | geometric-mean).
    breakdown : additionally compute the measure per series.
    """
    spec = spec_for(name)
    policy = _resolve_policy(policy)
    consts = dict(spec.constants)
    if constants:
        unknown = set(constants) - set(consts)
        if unknown:
            allowed = sorted(consts) if consts else "none"
            raise ValidationError(
                f"{name}: unknown constants {sorted(unknown)}; allowed: {allowed}"
            )
        consts.update(constants)

    model_name = model if model is not None else (frame.models[0] if len(frame.models) == 1 else None)
    y = frame.actuals
    yhat = frame.model_column(model)
    e = y - yhat
    flags: list[str] = []

    result = _dispatch(
        spec, frame, y, yhat, e, model_name, benchmark, train, weights,
        policy, consts, series_summary, flags,
    )

    if breakdown and result.per_series is None:
        per_series = {}
        for sid, rows in _series_groups(frame):
            sub = EvaluationFrame(
                frame.series_ids[rows], frame.origins[rows], frame.steps[rows],
                frame.actuals[rows],
                {m: c[rows] for m, c in frame.forecasts.items()},
            )
            # a benchmark frame needs no subsetting: alignment is by key lookup
            sub_train = {sid: train[sid]} if (train and sid in train) else train
            r = evaluate(
                name, sub, model=model, benchmark=benchmark, train=sub_train,
                weights=_resolve_weights(frame, weights)[rows] if weights is not None else None,
                policy=UndefinedPolicy.SKIP if policy == UndefinedPolicy.ERROR else policy,
                constants=constants, series_summary=series_summary,
            )
            per_series[sid] = r.value
        result = MeasureResult(
            result.name, result.model, result.value, result.n_used,
            result.n_undefined, per_series, result.flags,
        )
    return result


def _dispatch(spec, frame, y, yhat, e, model_name, benchmark, train, weights,
              policy, consts, series_summary, flags) -> MeasureResult:
    name = spec.name

    # ---- pooled step-level term measures ---------------------------------
    if name in ("ME", "MSE", "RMSE", "ErrorStd", "MAE", "MdAE", "RMdSE", "GMAE", "GRMSE"):
        defined = np.ones(e.size, dtype=bool)
        if name == "ME":
            return _finish(name, model_name, e, defined, "mean", policy, flags)
        if name in ("MSE",):
            return _finish(name, model_name, e * e, defined, "mean", policy, flags)
        if name in ("RMSE", "ErrorStd"):
            return _finish(name, model_name, e * e, defined, "mean", policy, flags, sqrt_after=True)
        if name == "MAE":
            return _finish(name, model_name, np.abs(e), defined, "mean", policy, flags)
        if name == "MdAE":
            return _finish(name, model_name, np.abs(e), defined, "median", policy, flags)
        if name == "RMdSE":
            return _finish(name, model_name, e * e, defined, "median", policy, flags, sqrt_after=True)
        if name == "GMAE":
            return _finish(name, model_name, np.abs(e), defined, "geometric-mean", policy, flags)
        if name == "GRMSE":
            return _finish(name, model_name, e * e, defined, "geometric-mean", policy, flags, sqrt_after=True)

    if name in ("MAPE", "MdAPE", "RMSPE", "RMdSPE"):
        defined = y != 0
        p = np.zeros_like(e)
        np.divide(100.0 * e, y, out=p, where=defined)
        terms = p * p if spec.square_or_abs == "squared" else np.abs(p)
        op = "median" if name in ("MdAPE", "RMdSPE") else "mean"
        return _finish(name, model_name, terms, defined, op, policy, flags,
                       sqrt_after=name in ("RMSPE", "RMdSPE"))

    if name in ("sMAPE", "sMdAPE"):
        den = np.abs(y) + np.abs(yhat)
        defined = den != 0
        terms = np.zeros_like(e)
        np.divide(200.0 * np.abs(e), den, out=terms, where=defined)
        # |y - f| <= |y| + |f| bounds every term by 200; clip the one-ulp
        # rounding spill that occurs when y and f have opposite signs
        np.minimum(terms, 200.0, out=terms)
        op = "median" if name == "sMdAPE" else "mean"
        return _finish(name, model_name, terms, defined, op, policy, flags)

    if name == "msMAPE":
        eps, thr = consts["epsilon"], consts["threshold"]
        den = np.maximum(np.abs(y) + np.abs(yhat) + eps, thr + eps)
        if (np.abs(y) + np.abs(yhat) <= thr).any():
            flags.append(_WINSORISED_FLAG)
        terms = 200.0 * np.abs(e) / den
        return _finish(name, model_name, terms, np.ones(e.size, dtype=bool), "mean", policy, flags)

    if name == "MAAPE":
        defined = ~((y == 0) & (e == 0))
        terms = np.zeros_like(e)
        nonzero_y = y != 0
        np.divide(np.abs(e), np.abs(y), out=terms, where=nonzero_y)
        terms = np.arctan(terms)
        terms[(y == 0) & (e != 0)] = math.pi / 2.0
        return _finish(name, model_name, terms, defined, "mean", policy, flags)

    # ---- per-series ratio measures ----------------------------------------
    if name in ("WAPE", "sWAPE", "WRMSPE", "RTAE"):
        groups = _series_groups(frame)
        vals = np.empty(len(groups))
        defined = np.ones(len(groups), dtype=bool)
        per_series = {}
        for j, (sid, rows) in enumerate(groups):
            ys, es, fs = y[rows], e[rows], yhat[rows]
            if name == "WAPE":
                num, den = np.abs(es).sum(), np.abs(ys).sum()
            elif name == "sWAPE":
                num, den = np.abs(es).sum(), (np.abs(ys) + np.abs(fs)).sum()
            elif name == "WRMSPE":
                num, den = (es * es).sum(), np.abs(ys).sum()
            else:  # RTAE
                num = np.abs(es).mean()
                raw_den = np.abs(ys).mean()
                den = max(consts["clamp"], raw_den)
                if raw_den < consts["clamp"]:
                    flags.append(_WINSORISED_FLAG)
            if den == 0:
                defined[j] = False
                flags.append(_ZERO_SCALE_FLAG)
                per_series[sid] = float("nan")
                continue
            v = num / den
            if name == "WRMSPE":
                v = math.sqrt(v)
            vals[j] = v
            per_series[sid] = float(v)
        return _finish(name, model_name, vals, defined, series_summary, policy, flags,
                       per_series=per_series)

    if name in ("sME", "sMSE", "sMAE"):
        terms = np.empty(e.size)
        defined = np.ones(e.size, dtype=bool)
        for sid, rows in _series_groups(frame):
            scale = _train_scale(name, train, sid, "mean", consts)
            if scale == 0:
                defined[rows] = False
                flags.append(_ZERO_SCALE_FLAG)
                continue
            if name == "sME":
                terms[rows] = e[rows] / scale
            elif name == "sMSE":
                terms[rows] = (e[rows] / scale) ** 2
            else:
                terms[rows] = np.abs(e[rows]) / scale
        return _finish(name, model_name, terms, defined, "mean", policy, flags)

    if name in ("ND", "NRMSE"):
        den = np.abs(y).sum() if name == "ND" else np.abs(y).mean()
        defined = np.full(e.size, den != 0)
        if den == 0:
            flags.append(_ZERO_SCALE_FLAG)
            return _finish(name, model_name, e, defined, "mean", policy, flags)
        if name == "ND":
            value = np.abs(e).sum() / den
        else:
            value = math.sqrt((e * e).mean()) / den
        return MeasureResult(name, model_name, float(value), e.size, 0, None, _dedupe(flags))

    # ---- benchmark-relative -------------------------------------------------
    if name in ("MRAE", "MdRAE", "RMRSE", "GMRAE", "RGRMSE"):
        e_b = y - _resolve_benchmark(frame, benchmark, model_name)
        defined = e_b != 0
        r = np.zeros_like(e)
        np.divide(e, e_b, out=r, where=defined)
        terms = r * r if spec.square_or_abs == "squared" else np.abs(r)
        op = {"MRAE": "mean", "MdRAE": "median", "RMRSE": "mean",
              "GMRAE": "geometric-mean", "RGRMSE": "geometric-mean"}[name]
        return _finish(name, model_name, terms, defined, op, policy, flags,
                       sqrt_after=name in ("RMRSE", "RGRMSE"))

    if name in ("RelMAE", "RelMSE", "RelRMSE"):
        yhat_b = _resolve_benchmark(frame, benchmark, model_name)
        e_b = y - yhat_b
        groups = _series_groups(frame)
        vals = np.empty(len(groups))
        defined = np.ones(len(groups), dtype=bool)
        per_series = {}
        for j, (sid, rows) in enumerate(groups):
            if spec.square_or_abs == "squared":
                num, den = (e[rows] ** 2).mean(), (e_b[rows] ** 2).mean()
            else:
                num, den = np.abs(e[rows]).mean(), np.abs(e_b[rows]).mean()
            if den == 0:
                defined[j] = False
                flags.append(_ZERO_SCALE_FLAG)
                per_series[sid] = float("nan")
                continue
            v = num / den
            if name == "RelRMSE":
                v = math.sqrt(v)
            vals[j] = v
            per_series[sid] = float(v)
        return _finish(name, model_name, vals, defined, series_summary, policy, flags,
                       per_series=per_series)

    if name == "RSE":
        ybar = y.mean()
        den = ((y - ybar) ** 2).sum()
        defined = np.full(e.size, den != 0)
        if den == 0:
            flags.append(_ZERO_SCALE_FLAG)
            return _finish(name, model_name, e, defined, "mean", policy, flags)
        value = math.sqrt((e * e).sum()) / math.sqrt(den)
        return MeasureResult(name, model_name, float(value), e.size, 0, None, _dedupe(flags))

    if name == "AvgRelMAE":
        yhat_b = _resolve_benchmark(frame, benchmark, model_name)
        e_b = y - yhat_b
        groups = _series_groups(frame)
        ratios = np.empty(len(groups))
        lengths = np.empty(len(groups))
        defined = np.ones(len(groups), dtype=bool)
        per_series = {}
        for j, (sid, rows) in enumerate(groups):
            num, den = np.abs(e[rows]).mean(), np.abs(e_b[rows]).mean()
            lengths[j] = rows.size
            if den == 0:
                defined[j] = False
                flags.append(_ZERO_SCALE_FLAG)
                per_series[sid] = float("nan")
                continue
            ratios[j] = num / den
            per_series[sid] = float(ratios[j])
        total = len(groups)
        n_undef = int(total - defined.sum())
        if n_undef:
            flags.append(_UNDEFINED_FLAG)
            if policy == UndefinedPolicy.ERROR:
                raise UndefinedValueError(f"{name}: {n_undef} of {total} series ratios are undefined")
            if policy == UndefinedPolicy.PROPAGATE:
                return MeasureResult(name, model_name, float("nan"), total - n_undef,
                                     n_undef, per_series, _dedupe(flags))
        rr, hh = ratios[defined], lengths[defined]
        if rr.size == 0:
            return MeasureResult(name, model_name, float("nan"), 0, n_undef, per_series, _dedupe(flags))
        if (rr == 0).any():
            flags.append(_GM_ZERO_FLAG)
            value = 0.0
        else:
            value = float(np.exp((hh * np.log(rr)).sum() / hh.sum()))
        return MeasureResult(name, model_name, value, total - n_undef, n_undef,
                             per_series, _dedupe(flags))

    if name in ("MASE", "MdASE", "RMSSE"):
        kind = "naive-mse" if name == "RMSSE" else "naive-mae"
        terms = np.empty(e.size)
        defined = np.ones(e.size, dtype=bool)
        for sid, rows in _series_groups(frame):
            scale = _train_scale(name, train, sid, kind, consts)
            if scale == 0:
                defined[rows] = False
                flags.append(_ZERO_SCALE_FLAG)
                continue
            if name == "RMSSE":
                terms[rows] = e[rows] ** 2 / scale
            else:
                terms[rows] = np.abs(e[rows]) / scale
        op = "median" if name == "MdASE" else "mean"
        return _finish(name, model_name, terms, defined, op, policy, flags,
                       sqrt_after=name == "RMSSE")

    # ---- transformations -------------------------------------------------
    if name in ("RMSLE", "NWRMSLE"):
        if (y < 0).any() or (yhat < 0).any():
            raise ValidationError(f"{name}: negative actuals or forecasts are outside the measure's domain")
        l = np.log1p(y) - np.log1p(yhat)
        if name == "RMSLE":
            return _finish(name, model_name, l * l, np.ones(l.size, dtype=bool),
                           "mean", policy, flags, sqrt_after=True)
        w = _resolve_weights(frame, weights)
        value = math.sqrt(float((w * l * l).sum() / w.sum()))
        return MeasureResult(name, model_name, value, l.size, 0, None, _dedupe(flags))

    # ---- other -------------------------------------------------------------
    if name in ("MSR", "MAR"):
        c = _rate_terms(frame, yhat)
        terms = c * c if name == "MSR" else np.abs(c)
        return _finish(name, model_name, terms, np.ones(c.size, dtype=bool), "mean", policy, flags)

    if name == "WMAE":
        w = _resolve_weights(frame, weights)
        value = float((w * np.abs(e)).sum() / w.sum())
        return MeasureResult(name, model_name, value, e.size, 0, None, _dedupe(flags))

    if name == "CORR":
        groups = _series_groups(frame)
        vals = np.empty(len(groups))
        defined = np.ones(len(groups), dtype=bool)
        per_series = {}
        for j, (sid, rows) in enumerate(groups):
            ys, fs = y[rows], yhat[rows]
            if rows.size < 2 or np.ptp(ys) == 0 or np.ptp(fs) == 0:
                defined[j] = False
                flags.append("zero-variance")
                per_series[sid] = float("nan")
                continue
            vals[j] = _pearson(ys, fs)
            per_series[sid] = float(vals[j])
        return _finish(name, model_name, vals, defined, series_summary, policy, flags,
                       per_series=per_series)

    raise ValidationError(f"measure {name!r} is registered but not implemented")  # pragma: no cover
