"""Social-media sentiment, lead-lag search and LSTM price forecasting."""

import json as _json

from ._core import (
    DECISION_THRESHOLD,
    SentilagError,
    SentimentModel,
    classify_user,
    confusion,
    day_value,
    default_keywords,
    featurize,
    ingest_labels,
    metrics,
    mse,
    pearson,
    search_lag,
    train_classifier,
    train_lstm,
)


def run_pipeline(config, **overrides):
    """Run every stage for both groups and return the comparison report.

    Keyword arguments override config keys, e.g. ``run_pipeline(path, seed=3)``.
    On failure ``SentilagError.args`` is ``(message, exit_code)``.
    """
    from ._core import _run_pipeline

    return _json.loads(_run_pipeline(str(config), {k: str(v) for k, v in overrides.items()}))


__all__ = [
    "DECISION_THRESHOLD",
    "SentilagError",
    "SentimentModel",
    "classify_user",
    "confusion",
    "day_value",
    "default_keywords",
    "featurize",
    "ingest_labels",
    "metrics",
    "mse",
    "pearson",
    "run_pipeline",
    "search_lag",
    "train_classifier",
    "train_lstm",
]
