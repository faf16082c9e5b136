"""Minimal least-squares autoregression.

This exists to drive the pitfall scenarios and the partitioning validation
harness (they need a fit-and-predict counterpart to the trivial benchmarks);
it is deliberately bare and is not a forecasting-model offering.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import InsufficientHistoryError

__all__ = ["ArFit", "fit_ar", "one_step_predictions", "recursive_forecast"]


@dataclass(frozen=True)
class ArFit:
    """OLS coefficients for y_t ~ intercept + sum_j coef_j * y_{t-j}."""

    order: int
    intercept: float
    coefficients: np.ndarray  # coef_1 (lag 1) .. coef_p (lag p)

    def design_row(self, history: np.ndarray) -> np.ndarray:
        return history[-self.order:][::-1]


def _design(values: np.ndarray, p: int, intercept: bool) -> tuple[np.ndarray, np.ndarray]:
    n = values.size
    if n <= p:
        raise InsufficientHistoryError(f"need more than {p} observations to fit an AR({p})")
    rows = n - p
    X = np.empty((rows, p))
    for j in range(1, p + 1):
        X[:, j - 1] = values[p - j:n - j]
    if intercept:
        X = np.column_stack([np.ones(rows), X])
    return X, values[p:]


def fit_ar(values, p: int, intercept: bool = True) -> ArFit:
    """Fit an order-p autoregression on levels by ordinary least squares."""
    v = np.asarray(values, dtype=float)
    X, y = _design(v, p, intercept)
    beta, *_ = np.linalg.lstsq(X, y, rcond=None)
    if intercept:
        return ArFit(order=p, intercept=float(beta[0]), coefficients=beta[1:].copy())
    return ArFit(order=p, intercept=0.0, coefficients=beta.copy())


def one_step_predictions(fit: ArFit, values) -> np.ndarray:
    """One-step-ahead predictions for positions p+1..n using true lags."""
    v = np.asarray(values, dtype=float)
    X, _ = _design(v, fit.order, intercept=False)
    return fit.intercept + X @ fit.coefficients


def recursive_forecast(fit: ArFit, history, h: int) -> np.ndarray:
    """h-step forecast feeding predictions back in as lags."""
    buf = list(np.asarray(history, dtype=float)[-fit.order:])
    if len(buf) < fit.order:
        raise InsufficientHistoryError(f"need {fit.order} history values, got {len(buf)}")
    out = np.empty(h)
    for i in range(h):
        lags = np.array(buf[-fit.order:][::-1])
        nxt = fit.intercept + float(fit.coefficients @ lags)
        out[i] = nxt
        buf.append(nxt)
    return out
