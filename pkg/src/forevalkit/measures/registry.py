"""Registry of point-forecast error measures.

Each entry declares, once, everything the engine needs to evaluate a
measure: the base error it is built on, whether terms are squared, absolute
or signed, the scope at which a scale is computed, the summarising
operators, what extra inputs it needs, and its default constants. The
mapping from name to formula fields is bijective: a name fully determines
the computation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import ValidationError

__all__ = ["MeasureSpec", "REGISTRY", "measure_names", "spec_for", "UndefinedPolicy"]


class UndefinedPolicy:
    """How undefined base-error terms (zero denominators) are handled.

    * ``propagate`` (default): the result value is undefined (NaN) and the
      diagnostics say how many terms were undefined. Silently dropping
      zero-denominator terms estimates neither the mean nor the median, so
      dropping must be asked for explicitly.
    * ``skip``: undefined terms are dropped and counted.
    * ``error``: undefined terms raise.
    """

    PROPAGATE = "propagate"
    SKIP = "skip"
    ERROR = "error"

    _ALIASES = {"propagate": PROPAGATE, "skip": SKIP, "skip-and-count": SKIP, "error": ERROR}

    @classmethod
    def parse(cls, value: str) -> str:
        try:
            return cls._ALIASES[value]
        except KeyError:
            raise ValueError(
                f"unknown undefined-value policy {value!r}; expected propagate, skip or error"
            ) from None


@dataclass(frozen=True)
class MeasureSpec:
    """Declarative description of one error measure."""

    name: str
    family: str  # scale-dependent | percentage | aggregate-scaled | relative-error | relative-measure | scaled | transform | other
    base: str  # raw-e | percentage-p | symmetric-percentage | modified-symmetric | arctan | relative-r | scaled-q | scaled-squared-q | log-l | rate-c | in-sample-scaled
    square_or_abs: str  # squared | absolute | signed
    scale_scope: str  # none | actual-per-step | actual-per-series-oos | actual-per-series-in-sample | actual-all-series-oos | benchmark-per-step | benchmark-per-series | benchmark-in-sample
    summariser: str  # mean | median | geometric-mean | ratio-of-sums
    term_level: str = "step"  # step | series | pooled-ratio
    needs_train: bool = False
    needs_benchmark: bool = False
    needs_weights: bool = False
    higher_is_better: bool = False
    constants: dict = field(default_factory=dict)


_SPECS = [
    # --- scale-dependent -------------------------------------------------
    MeasureSpec("ME", "scale-dependent", "raw-e", "signed", "none", "mean"),
    MeasureSpec("ErrorStd", "scale-dependent", "raw-e", "squared", "none", "mean"),
    MeasureSpec("MSE", "scale-dependent", "raw-e", "squared", "none", "mean"),
    MeasureSpec("RMSE", "scale-dependent", "raw-e", "squared", "none", "mean"),
    MeasureSpec("MAE", "scale-dependent", "raw-e", "absolute", "none", "mean"),
    MeasureSpec("MdAE", "scale-dependent", "raw-e", "absolute", "none", "median"),
    MeasureSpec("RMdSE", "scale-dependent", "raw-e", "squared", "none", "median"),
    MeasureSpec("GMAE", "scale-dependent", "raw-e", "absolute", "none", "geometric-mean"),
    MeasureSpec("GRMSE", "scale-dependent", "raw-e", "squared", "none", "geometric-mean"),
    # --- percentage, per-step scaling ------------------------------------
    MeasureSpec("MAPE", "percentage", "percentage-p", "absolute", "actual-per-step", "mean"),
    MeasureSpec("MdAPE", "percentage", "percentage-p", "absolute", "actual-per-step", "median"),
    MeasureSpec("RMSPE", "percentage", "percentage-p", "squared", "actual-per-step", "mean"),
    MeasureSpec("RMdSPE", "percentage", "percentage-p", "squared", "actual-per-step", "median"),
    MeasureSpec("sMAPE", "percentage", "symmetric-percentage", "absolute", "actual-per-step", "mean"),
    MeasureSpec("sMdAPE", "percentage", "symmetric-percentage", "absolute", "actual-per-step", "median"),
    MeasureSpec(
        "msMAPE", "percentage", "modified-symmetric", "absolute", "actual-per-step", "mean",
        constants={"epsilon": 0.1, "threshold": 0.5},
    ),
    MeasureSpec("MAAPE", "percentage", "arctan", "absolute", "actual-per-step", "mean"),
    # --- aggregate actual-value scaling ----------------------------------
    MeasureSpec("WAPE", "aggregate-scaled", "raw-e", "absolute", "actual-per-series-oos", "ratio-of-sums", term_level="series"),
    MeasureSpec("sWAPE", "aggregate-scaled", "raw-e", "absolute", "actual-per-series-oos", "ratio-of-sums", term_level="series"),
    MeasureSpec("WRMSPE", "aggregate-scaled", "raw-e", "squared", "actual-per-series-oos", "ratio-of-sums", term_level="series"),
    MeasureSpec(
        "RTAE", "aggregate-scaled", "raw-e", "absolute", "actual-per-series-oos", "ratio-of-sums",
        term_level="series", constants={"clamp": 1.0},
    ),
    MeasureSpec("sME", "aggregate-scaled", "in-sample-scaled", "signed", "actual-per-series-in-sample", "mean", needs_train=True),
    MeasureSpec("sMSE", "aggregate-scaled", "in-sample-scaled", "squared", "actual-per-series-in-sample", "mean", needs_train=True),
    MeasureSpec("sMAE", "aggregate-scaled", "in-sample-scaled", "absolute", "actual-per-series-in-sample", "mean", needs_train=True),
    MeasureSpec("ND", "aggregate-scaled", "raw-e", "absolute", "actual-all-series-oos", "ratio-of-sums", term_level="pooled-ratio"),
    MeasureSpec("NRMSE", "aggregate-scaled", "raw-e", "squared", "actual-all-series-oos", "ratio-of-sums", term_level="pooled-ratio"),
    # --- relative errors (benchmark per step) -----------------------------
    MeasureSpec("MRAE", "relative-error", "relative-r", "absolute", "benchmark-per-step", "mean", needs_benchmark=True),
    MeasureSpec("MdRAE", "relative-error", "relative-r", "absolute", "benchmark-per-step", "median", needs_benchmark=True),
    MeasureSpec("RMRSE", "relative-error", "relative-r", "squared", "benchmark-per-step", "mean", needs_benchmark=True),
    MeasureSpec("GMRAE", "relative-error", "relative-r", "absolute", "benchmark-per-step", "geometric-mean", needs_benchmark=True),
    MeasureSpec("RGRMSE", "relative-error", "relative-r", "squared", "benchmark-per-step", "geometric-mean", needs_benchmark=True),
    # --- relative measures (benchmark per series) --------------------------
    MeasureSpec("RelMAE", "relative-measure", "raw-e", "absolute", "benchmark-per-series", "mean", term_level="series", needs_benchmark=True),
    MeasureSpec("RelMSE", "relative-measure", "raw-e", "squared", "benchmark-per-series", "mean", term_level="series", needs_benchmark=True),
    MeasureSpec("RelRMSE", "relative-measure", "raw-e", "squared", "benchmark-per-series", "mean", term_level="series", needs_benchmark=True),
    MeasureSpec("RSE", "relative-measure", "raw-e", "squared", "actual-all-series-oos", "ratio-of-sums", term_level="pooled-ratio"),
    MeasureSpec("AvgRelMAE", "relative-measure", "raw-e", "absolute", "benchmark-per-series", "geometric-mean", term_level="series", needs_benchmark=True),
    # --- scaled errors (in-sample benchmark scaling) -----------------------
    MeasureSpec(
        "MASE", "scaled", "scaled-q", "absolute", "benchmark-in-sample", "mean",
        needs_train=True, constants={"seasonal_period": None, "scale_mode": "one-step", "multistep_h": None},
    ),
    MeasureSpec(
        "MdASE", "scaled", "scaled-q", "absolute", "benchmark-in-sample", "median",
        needs_train=True, constants={"seasonal_period": None, "scale_mode": "one-step", "multistep_h": None},
    ),
    MeasureSpec(
        "RMSSE", "scaled", "scaled-squared-q", "squared", "benchmark-in-sample", "mean",
        needs_train=True, constants={"seasonal_period": None, "scale_mode": "one-step", "multistep_h": None},
    ),
    # --- transformations ---------------------------------------------------
    MeasureSpec("RMSLE", "transform", "log-l", "squared", "none", "mean"),
    MeasureSpec("NWRMSLE", "transform", "log-l", "squared", "none", "ratio-of-sums", term_level="pooled-ratio", needs_weights=True),
    # --- other ---------------------------------------------------------------
    MeasureSpec("MSR", "other", "rate-c", "squared", "none", "mean"),
    MeasureSpec("MAR", "other", "rate-c", "absolute", "none", "mean"),
    MeasureSpec("WMAE", "other", "raw-e", "absolute", "none", "ratio-of-sums", term_level="pooled-ratio", needs_weights=True),
    MeasureSpec("CORR", "other", "raw-e", "signed", "none", "mean", term_level="series", higher_is_better=True),
]

REGISTRY: dict[str, MeasureSpec] = {s.name: s for s in _SPECS}
if len(REGISTRY) != len(_SPECS):
    raise AssertionError("duplicate measure name in registry")


def measure_names() -> list[str]:
    return list(REGISTRY)


def spec_for(name: str) -> MeasureSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        raise ValidationError(
            f"unknown measure {name!r}; known: {', '.join(REGISTRY)}"
        ) from None
