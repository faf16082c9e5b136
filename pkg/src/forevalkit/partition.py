"""Temporal and randomised data-partitioning schemes with leakage guards.

Temporal schemes (fixed origin, rolling origin) index into a series of
length n; randomised schemes (k-fold, blocked) index into the rows of an
embedded matrix. All indices are 1-based. Folds expose indices only: the
retrain policy for models is the caller's concern, and scaling factors for
scaled measures must be computed from a fold's train indices only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np

from .core import EmbeddedMatrix, InsufficientHistoryError, ValidationError

__all__ = [
    "SplitSpec",
    "Fold",
    "LeakageReport",
    "fixed_origin_split",
    "rolling_origin_splits",
    "kfold_splits",
    "blocked_splits",
    "leakage_check",
    "splits_for_series",
]

_SCHEMES = ("fixed-origin", "rolling-origin", "kfold", "blocked")
_WINDOWS = ("expanding", "rolling")


@dataclass(frozen=True)
class SplitSpec:
    """Declarative description of a partitioning scheme.

    ``stride`` lets rolling-origin evaluation skip origins. A
    ``window_length`` together with ``window="expanding"`` selects the hybrid
    setup that expands until the window is full and then rolls.
    """

    scheme: str
    initial_train: int | None = None
    horizon: int = 1
    stride: int = 1
    window: str = "expanding"
    window_length: int | None = None
    k: int | None = None
    gap: int = 0
    shuffle_seed: int | None = None

    def __post_init__(self):
        if self.scheme not in _SCHEMES:
            raise ValidationError(f"unknown scheme {self.scheme!r}; expected one of {_SCHEMES}")
        if self.horizon < 1:
            raise ValidationError("horizon must be >= 1")
        if self.stride < 1:
            raise ValidationError("stride must be >= 1")
        if self.window not in _WINDOWS:
            raise ValidationError(f"window must be one of {_WINDOWS}")
        if self.window == "rolling" and (self.window_length is None or self.window_length < 1):
            raise ValidationError("rolling window requires window_length >= 1")
        if self.scheme in ("fixed-origin", "rolling-origin") and (
            self.initial_train is None or self.initial_train < 1
        ):
            raise ValidationError(f"{self.scheme} requires initial_train >= 1")
        if self.scheme == "kfold" and (self.k is None or self.k < 2):
            raise ValidationError("kfold requires k >= 2")
        if self.scheme == "blocked" and (self.k is None or self.k < 1):
            raise ValidationError("blocked requires k >= 1")
        if self.gap < 0:
            raise ValidationError("gap must be >= 0")

    def to_json(self) -> str:
        return json.dumps({k: v for k, v in asdict(self).items() if v is not None}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "SplitSpec":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValidationError("split spec JSON must be an object")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ValidationError(f"bad split spec: {exc}") from None


@dataclass(frozen=True)
class Fold:
    """One train/test partition. ``origin`` is set for temporal schemes only."""

    train_indices: np.ndarray
    test_indices: np.ndarray
    origin: int | None = None

    def __post_init__(self):
        train = np.asarray(self.train_indices, dtype=np.int64)
        test = np.asarray(self.test_indices, dtype=np.int64)
        train.setflags(write=False)
        test.setflags(write=False)
        object.__setattr__(self, "train_indices", train)
        object.__setattr__(self, "test_indices", test)

    @property
    def train_size(self) -> int:
        return self.train_indices.size

    @property
    def test_size(self) -> int:
        return self.test_indices.size


def fixed_origin_split(series_length: int, train: int, h: int) -> Fold:
    """Single holdout at the end of the series: train 1..T, test T+1..T+h."""
    if train < 1:
        raise ValidationError("train length must be >= 1")
    if h < 1:
        raise ValidationError("horizon must be >= 1")
    if train + h > series_length:
        raise InsufficientHistoryError(
            f"train {train} + horizon {h} exceeds series length {series_length}"
        )
    return Fold(
        train_indices=np.arange(1, train + 1),
        test_indices=np.arange(train + 1, train + h + 1),
        origin=train,
    )


def rolling_origin_splits(series_length: int, spec: SplitSpec) -> list[Fold]:
    """Folds with the origin rolling forward by ``stride`` while a full horizon fits.

    Fold j has origin initial_train + (j-1)*stride and test origin+1..origin+h.
    Expanding windows train on 1..origin; rolling windows keep the last
    window_length points; an expanding window with window_length set expands
    first and then rolls. Partial tails (origins where the horizon no longer
    fits) are dropped.
    """
    if spec.scheme != "rolling-origin":
        raise ValidationError(f"expected a rolling-origin spec, got {spec.scheme!r}")
    t0, h = spec.initial_train, spec.horizon
    if t0 + h > series_length:
        raise InsufficientHistoryError(
            f"initial_train {t0} + horizon {h} exceeds series length {series_length}"
        )
    if spec.window == "rolling" and spec.window_length > t0:
        raise ValidationError("rolling window_length cannot exceed initial_train")
    folds = []
    origin = t0
    while origin + h <= series_length:
        if spec.window == "rolling":
            start = origin - spec.window_length + 1
        elif spec.window_length is not None:  # hybrid: expand, then roll
            start = max(1, origin - spec.window_length + 1)
        else:
            start = 1
        folds.append(Fold(
            train_indices=np.arange(start, origin + 1),
            test_indices=np.arange(origin + 1, origin + h + 1),
            origin=origin,
        ))
        origin += spec.stride
    return folds


def kfold_splits(matrix: EmbeddedMatrix, k: int, seed: int) -> list[Fold]:
    """Shuffled k-fold partition of embedded-matrix rows.

    The shuffle is deterministic in ``seed``; test sets are near-equal sized,
    pairwise disjoint and jointly cover every row. k equal to the row count
    gives leave-one-out.
    """
    n = matrix.n_rows
    if k < 2:
        raise ValidationError("kfold requires k >= 2")
    if k > n:
        raise ValidationError(f"k {k} exceeds row count {n}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n) + 1  # 1-based row indices
    folds = []
    for chunk in np.array_split(perm, k):
        test = np.sort(chunk)
        mask = np.ones(n + 1, dtype=bool)
        mask[0] = False
        mask[test] = False
        folds.append(Fold(train_indices=np.flatnonzero(mask), test_indices=test, origin=None))
    return folds


def blocked_splits(matrix: EmbeddedMatrix, k: int, gap: int = 0) -> list[Fold]:
    """Contiguous, unshuffled test blocks in original row order.

    ``gap`` rows adjacent to each side of the test block are discarded from
    the train set (non-dependent variant); blocks touching a series end trim
    only on the inward side.
    """
    n = matrix.n_rows
    if k < 1:
        raise ValidationError("blocked requires k >= 1")
    if gap < 0:
        raise ValidationError("gap must be >= 0")
    if k > n:
        raise ValidationError(f"k {k} exceeds row count {n}")
    bounds = np.linspace(0, n, k + 1).astype(int)
    folds = []
    for i in range(k):
        lo, hi = bounds[i] + 1, bounds[i + 1]  # 1-based inclusive block
        if hi < lo:
            raise ValidationError(f"blocked split geometry infeasible for k={k}, n={n}")
        test = np.arange(lo, hi + 1)
        cut_lo = max(1, lo - gap)
        cut_hi = min(n, hi + gap)
        train = np.concatenate([np.arange(1, cut_lo), np.arange(cut_hi + 1, n + 1)])
        if k > 1 and train.size == 0:
            raise ValidationError(
                f"blocked split geometry infeasible: gap {gap} leaves no training rows "
                f"for the block at {lo}..{hi}"
            )
        folds.append(Fold(train_indices=train, test_indices=test, origin=None))
    return folds


@dataclass(frozen=True)
class LeakageReport:
    passed: bool
    violations: tuple[str, ...]


def leakage_check(fold: Fold, scheme: str) -> LeakageReport:
    """Diagnose train/test leakage for a fold under its scheme's rules.

    Every scheme fails on a non-empty train/test intersection. Temporal
    schemes additionally fail if any train index reaches past the start of
    the test region; randomised schemes permit future rows in train by
    design (valid for pure autoregressive setups).
    """
    if scheme not in _SCHEMES:
        raise ValidationError(f"unknown scheme {scheme!r}")
    violations = []
    overlap = np.intersect1d(fold.train_indices, fold.test_indices)
    if overlap.size:
        violations.append(f"train/test overlap at indices {overlap.tolist()}")
    if scheme in ("fixed-origin", "rolling-origin") and fold.train_size and fold.test_size:
        t_max = int(fold.train_indices.max())
        s_min = int(fold.test_indices.min())
        if t_max >= s_min:
            violations.append(
                f"temporal order violated: max(train)={t_max} >= min(test)={s_min}"
            )
    return LeakageReport(passed=not violations, violations=tuple(violations))


def splits_for_series(series_length: int, spec: SplitSpec) -> list[Fold]:
    """Apply a temporal split spec to one series (fixed or rolling origin)."""
    if spec.scheme == "fixed-origin":
        return [fixed_origin_split(series_length, spec.initial_train, spec.horizon)]
    if spec.scheme == "rolling-origin":
        return rolling_origin_splits(series_length, spec)
    raise ValidationError(
        f"{spec.scheme!r} splits operate on an embedded matrix, not a raw series; "
        "supply an embedding order p"
    )
