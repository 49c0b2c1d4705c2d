import numpy as np
import pytest

from aecqtl import ConfigError, accuracy, mean_std, roc_auc
from aecqtl.metrics import summarize_runs


def test_accuracy_reference_values():
    assert accuracy([1, 0, 1], [1, 0, 1]) == 100.0
    assert accuracy([1, 0, 1, 0], [1, 0, 0, 1]) == 50.0
    preds = np.zeros(128, dtype=int)
    truth = np.zeros(128, dtype=int)
    truth[123:] = 1
    assert accuracy(preds, truth) == 96.09375


def test_accuracy_rejects_empty_or_mismatched():
    with pytest.raises(ConfigError):
        accuracy([], [])
    with pytest.raises(ConfigError):
        accuracy([1], [1, 0])


def test_mean_std_reference_values():
    assert mean_std([5.0, 5.0, 5.0]) == (5.0, 0.0)
    assert mean_std([0.0, 10.0]) == (5.0, 5.0)


def test_mean_std_matches_two_pass_oracle():
    rng = np.random.default_rng(3)
    values = rng.uniform(80, 100, 5)
    mean, std = mean_std(values)
    oracle_mean = sum(values) / len(values)
    oracle_std = np.sqrt(sum((v - oracle_mean) ** 2 for v in values) / len(values))
    assert abs(mean - oracle_mean) < 1e-12
    assert abs(std - oracle_std) < 1e-12


def test_mean_std_rejects_empty():
    with pytest.raises(ConfigError):
        mean_std([])


def test_roc_perfect_separation():
    curve = roc_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0])
    assert curve.auc == 1.0
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)


def test_roc_fully_anti_separating():
    curve = roc_auc([0.1, 0.2, 0.8, 0.9], [1, 1, 0, 0])
    assert curve.auc == 0.0


def test_roc_monotone_points():
    rng = np.random.default_rng(7)
    scores = rng.uniform(0, 1, 40)
    truth = rng.integers(0, 2, 40)
    truth[0], truth[1] = 0, 1
    curve = roc_auc(scores, truth)
    fprs = [p[0] for p in curve.points]
    tprs = [p[1] for p in curve.points]
    assert fprs == sorted(fprs)
    assert tprs == sorted(tprs)
    assert curve.points[0] == (0.0, 0.0)
    assert curve.points[-1] == (1.0, 1.0)


def _mann_whitney(scores, truth):
    """Brute-force pairwise statistic: wins + half credit for ties."""
    pos = [s for s, t in zip(scores, truth) if t == 1]
    neg = [s for s, t in zip(scores, truth) if t == 0]
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def test_roc_auc_matches_mann_whitney_oracle():
    rng = np.random.default_rng(11)
    for trial in range(50):
        n = int(rng.integers(4, 40))
        # quantized scores force plenty of ties
        scores = np.round(rng.uniform(0, 1, n), 1)
        truth = rng.integers(0, 2, n)
        truth[0], truth[1] = 0, 1
        curve = roc_auc(scores, truth)
        assert abs(curve.auc - _mann_whitney(scores, truth)) < 1e-12, trial


def test_roc_handles_all_tied_scores():
    curve = roc_auc([0.5, 0.5, 0.5, 0.5], [1, 0, 1, 0])
    assert abs(curve.auc - 0.5) < 1e-12
    assert curve.points == [(0.0, 0.0), (1.0, 1.0)]


def test_roc_rejects_single_class_truth():
    with pytest.raises(ConfigError):
        roc_auc([0.1, 0.9], [1, 1])


def test_summarize_runs():
    summary = summarize_runs([90.0, 100.0], [0.2, 0.4], auc=0.95)
    assert summary.accuracy_mean == 95.0
    assert summary.accuracy_std == 5.0
    assert abs(summary.final_loss_mean - 0.3) < 1e-15
    assert summary.auc == 0.95


def test_aggregation_is_order_independent():
    values = [91.2, 95.5, 88.3, 99.0, 93.1]
    assert mean_std(values) == mean_std(list(reversed(values)))
