"""Evaluation metrics: accuracy, mean/std aggregation, ROC curves and AUC."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError


@dataclass
class RocCurve:
    """(FPR, TPR) points from threshold +inf down to -inf, plus trapezoid AUC."""

    points: list[tuple[float, float]]
    auc: float


@dataclass
class RunSummary:
    accuracy_mean: float      # percent
    accuracy_std: float       # percent, population std
    final_loss_mean: float
    auc: float


def accuracy(predictions: Sequence[int], truth: Sequence[int]) -> float:
    predictions = np.asarray(predictions)
    truth = np.asarray(truth)
    if predictions.shape != truth.shape or predictions.size == 0:
        raise ConfigError("predictions and truth must be equal-length and nonempty")
    return 100.0 * float(np.mean(predictions == truth))


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Arithmetic mean and population standard deviation (divide by N).

    Values are summed in sorted order so the result is independent of the
    order runs happened to finish in.
    """
    values = np.sort(np.asarray(values, dtype=np.float64))
    if values.size == 0:
        raise ConfigError("mean_std needs at least one value")
    mean = float(np.mean(values))
    return mean, float(np.sqrt(np.mean(np.sort((values - mean) ** 2))))


def roc_auc(scores: Sequence[float], truth: Sequence[int]) -> RocCurve:
    """Threshold sweep over distinct scores (ties grouped into single steps);
    AUC by trapezoidal integration, which matches the Mann-Whitney statistic
    with half credit for ties."""
    scores = np.asarray(scores, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.int64)
    if scores.shape != truth.shape:
        raise ConfigError("scores and truth must have equal length")
    n_pos = int(np.sum(truth == 1))
    n_neg = int(np.sum(truth == 0))
    if n_pos == 0 or n_neg == 0:
        raise ConfigError("ROC needs both classes present in truth")

    order = np.argsort(-scores, kind="stable")
    points = [(0.0, 0.0)]
    auc = 0.0
    tp = fp = 0
    i = 0
    n = scores.shape[0]
    while i < n:
        j = i
        while j < n and scores[order[j]] == scores[order[i]]:
            if truth[order[j]] == 1:
                tp += 1
            else:
                fp += 1
            j += 1
        fpr, tpr = fp / n_neg, tp / n_pos
        prev_fpr, prev_tpr = points[-1]
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0
        points.append((fpr, tpr))
        i = j
    return RocCurve(points, auc)


def summarize_runs(accuracies: Sequence[float], final_losses: Sequence[float],
                   auc: float) -> RunSummary:
    acc_mean, acc_std = mean_std(accuracies)
    loss_mean, _ = mean_std(final_losses)
    return RunSummary(acc_mean, acc_std, loss_mean, auc)
