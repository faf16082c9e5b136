"""Point-forecast error measures: registry, engine, and rank/count scores."""

from .engine import MeasureResult, UndefinedValueError, WeightVector, evaluate
from .ranking import (
    RankTable,
    critical_event_percentage,
    percentage_better,
    rank_models,
    summarize,
)
from .registry import REGISTRY, MeasureSpec, UndefinedPolicy, measure_names, spec_for

__all__ = [
    "REGISTRY",
    "MeasureSpec",
    "MeasureResult",
    "RankTable",
    "UndefinedPolicy",
    "UndefinedValueError",
    "WeightVector",
    "critical_event_percentage",
    "evaluate",
    "measure_names",
    "percentage_better",
    "rank_models",
    "spec_for",
    "summarize",
]
