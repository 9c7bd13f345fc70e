"""TFDCR feature selection and drift-adaptive SVM spam filtering."""

from ._spamfilter import (
    Document,
    Label,
    SpamfilterError,
    classify,
    config_dump,
    evaluate,
    preprocess,
    run_experiment,
    select_features,
    stem,
    synth_drift,
    tfdcr_weight,
    tokenize,
)

__all__ = [
    "Document",
    "Label",
    "SpamfilterError",
    "classify",
    "config_dump",
    "evaluate",
    "preprocess",
    "run_experiment",
    "select_features",
    "stem",
    "synth_drift",
    "tfdcr_weight",
    "tokenize",
]
