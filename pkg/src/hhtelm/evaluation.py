"""Classification scoring and stratified cross-validation.

Metrics follow the clinical convention with ``positivity`` as the positive
class: sensitivity = tp/(tp+fn), selectivity = tn/(tn+fp), accuracy =
(tp+tn)/total, all as percentages. A metric whose denominator is zero is
reported as undefined (None), never clamped to 0 or 100.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataio import CLASS_NAMES, LABEL_POSITIVITY
from .elm import TrainConfig, deep_elm_predict, deep_elm_train
from .errors import (
    DegenerateLabels,
    InsufficientClassMembers,
    InvalidConfig,
    InvalidLabel,
    ShapeMismatch,
)

_METRIC_FIELDS = ("selectivity", "sensitivity", "accuracy")


@dataclass(frozen=True)
class ContingencyTable:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidConfig("contingency counts must be >= 0")


@dataclass(frozen=True)
class MetricsReport:
    """Percentages; None marks a metric whose denominator was zero."""

    selectivity: float | None
    sensitivity: float | None
    accuracy: float | None


@dataclass
class CvReport:
    """Cross-validation outcome: per-fold metrics plus aggregates.

    ``fold_assignments`` maps every trial to its held-out fold and
    ``predictions`` holds the label each trial received when tested.
    """

    folds: list
    mean: MetricsReport
    std: MetricsReport
    fold_assignments: np.ndarray
    predictions: np.ndarray
    seed: int
    k: int
    config: dict

    def to_dict(self):
        return {
            "format": "cv-report",
            "version": 1,
            "seed": int(self.seed),
            "k": int(self.k),
            "config": self.config,
            "fold_assignments": [int(f) for f in self.fold_assignments],
            "predictions": [str(p) for p in self.predictions],
            "folds": [_metrics_to_dict(f) for f in self.folds],
            "mean": _metrics_to_dict(self.mean),
            "std": _metrics_to_dict(self.std),
        }

    @classmethod
    def from_dict(cls, payload):
        return cls(
            folds=[_metrics_from_dict(f) for f in payload["folds"]],
            mean=_metrics_from_dict(payload["mean"]),
            std=_metrics_from_dict(payload["std"]),
            fold_assignments=np.array(payload["fold_assignments"], dtype=int),
            predictions=np.array(payload["predictions"]),
            seed=int(payload["seed"]),
            k=int(payload["k"]),
            config=payload["config"],
        )


def _metrics_to_dict(report):
    return {name: getattr(report, name) for name in _METRIC_FIELDS}


def _metrics_from_dict(payload):
    return MetricsReport(**{name: payload[name] for name in _METRIC_FIELDS})


def contingency(predicted, actual):
    """Tally a 2x2 contingency table, positivity counted as positive."""
    predicted = np.asarray(predicted)
    actual = np.asarray(actual)
    if predicted.shape != actual.shape or predicted.ndim != 1:
        raise ShapeMismatch("predicted and actual must be 1-D and the same length")
    if predicted.size == 0:
        raise ShapeMismatch("need at least one prediction")
    for name, arr in (("predicted", predicted), ("actual", actual)):
        unknown = sorted(set(arr.tolist()) - set(CLASS_NAMES))
        if unknown:
            raise InvalidLabel(f"{name} contains unknown labels {unknown}")
    pos_pred = predicted == LABEL_POSITIVITY
    pos_actual = actual == LABEL_POSITIVITY
    return ContingencyTable(
        tp=int(np.sum(pos_pred & pos_actual)),
        fp=int(np.sum(pos_pred & ~pos_actual)),
        tn=int(np.sum(~pos_pred & ~pos_actual)),
        fn=int(np.sum(~pos_pred & pos_actual)),
    )


def metrics(table):
    """Percent metrics from a contingency table.

    Numerators are multiplied by 100 before the division so integer-exact
    cases (e.g. 45 of 50) come out as exact floats.
    """
    total = table.tp + table.fp + table.tn + table.fn
    if total < 1:
        raise InvalidConfig("contingency table is empty")

    def rate(numerator, denominator):
        return (100.0 * numerator) / denominator if denominator > 0 else None

    return MetricsReport(
        selectivity=rate(table.tn, table.tn + table.fp),
        sensitivity=rate(table.tp, table.tp + table.fn),
        accuracy=rate(table.tp + table.tn, total),
    )


def stratified_kfold(labels, k, seed):
    """Assign every item to one of k folds, stratified by label.

    Each class is shuffled with the seeded generator and dealt round-robin;
    the deal offset carries over between classes so total fold sizes match
    the ceil/floor partition of n exactly. Per-class fold counts differ by
    at most one.

    Returns
    -------
    ndarray of int
        Fold index (0..k-1) per item.
    """
    labels = np.asarray(labels)
    if labels.ndim != 1 or labels.size < 1:
        raise ShapeMismatch("labels must be a non-empty 1-D sequence")
    if k < 2:
        raise InvalidConfig("k must be >= 2")
    rng = np.random.default_rng(seed)
    assignment = np.empty(labels.size, dtype=int)
    offset = 0
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise InsufficientClassMembers(
                f"class {cls!r} has {members.size} members but k={k}"
            )
        order = rng.permutation(members)
        assignment[order] = (np.arange(members.size) + offset) % k
        offset = (offset + members.size) % k
    return assignment


def balance_train_set(train_indices, labels, seed):
    """Subsample majority classes so every class matches the minority count.

    Selection within a class is a seeded draw without replacement; the
    result is sorted, so an already-balanced input comes back unchanged.
    """
    train_indices = np.asarray(train_indices, dtype=int)
    labels = np.asarray(labels)
    if train_indices.ndim != 1 or train_indices.size < 1:
        raise ShapeMismatch("train_indices must be a non-empty 1-D sequence")
    subset = labels[train_indices]
    classes = np.unique(subset)
    if classes.size < len(CLASS_NAMES):
        missing = sorted(set(CLASS_NAMES) - set(classes.tolist()))
        raise DegenerateLabels(f"training subset is missing class(es) {missing}")
    per_class = [train_indices[subset == cls] for cls in classes]
    floor = min(members.size for members in per_class)
    rng = np.random.default_rng(seed)
    kept = [
        members if members.size == floor else rng.choice(members, size=floor, replace=False)
        for members in per_class
    ]
    return np.sort(np.concatenate(kept))


def _aggregate(folds, reducer):
    values = {}
    for name in _METRIC_FIELDS:
        defined = [getattr(f, name) for f in folds if getattr(f, name) is not None]
        values[name] = float(reducer(defined)) if defined else None
    return MetricsReport(**values)


def cross_validate(features, labels, train_config, k=5, seed=0):
    """Stratified k-fold evaluation of the deep model.

    Parameters
    ----------
    features : ndarray, shape (n, d)
    labels : sequence of str
    train_config : TrainConfig
    k : int
    seed : int
        Drives the fold assignment and the per-fold balancing draws; the
        model seed comes from ``train_config``.

    Returns
    -------
    CvReport

    Each fold's training portion is balanced (majority subsampled), the
    model is fit on those rows only, and the held-out rows are scored.
    Normalization happens inside the model fit, so nothing leaks from the
    held-out fold.
    """
    features = np.asarray(features, dtype=float)
    labels = np.asarray(labels)
    if not isinstance(train_config, TrainConfig):
        raise InvalidConfig("train_config must be a TrainConfig")
    if features.ndim != 2 or features.shape[0] != labels.size:
        raise ShapeMismatch("features must be 2-D with one row per label")
    assignment = stratified_kfold(labels, k, seed)
    balance_seeds = np.random.SeedSequence(seed).spawn(k)
    predictions = np.empty(labels.size, dtype=labels.dtype)
    folds = []
    for fold in range(k):
        held_out = assignment == fold
        train_idx = np.flatnonzero(~held_out)
        test_idx = np.flatnonzero(held_out)
        balanced = balance_train_set(train_idx, labels, balance_seeds[fold])
        model = deep_elm_train(features[balanced], labels[balanced], train_config)
        fold_pred, _ = deep_elm_predict(model, features[test_idx])
        predictions[test_idx] = fold_pred
        folds.append(metrics(contingency(fold_pred, labels[test_idx])))
    config_echo = {
        "layer_sizes": list(train_config.layer_sizes),
        "kernel": train_config.kernel.variant,
        "ridge": train_config.kernel.ridge,
        "activation": train_config.activation,
        "model_seed": int(train_config.seed),
        "k": int(k),
        "cv_seed": int(seed),
    }
    return CvReport(
        folds=folds,
        mean=_aggregate(folds, np.mean),
        std=_aggregate(folds, np.std),
        fold_assignments=assignment,
        predictions=predictions,
        seed=seed,
        k=k,
        config=config_echo,
    )
