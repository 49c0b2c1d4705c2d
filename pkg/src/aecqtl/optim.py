"""Adam with step decay and the seeded mini-batch training loop.

Determinism contract: (seed, configs, data) fully determine every parameter
trajectory. One generator drives initialization and the per-epoch shuffles;
batches are consecutive chunks of the shuffled order; gradients reduce in
fixed order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import FeatureSet
from .errors import ConfigError, TrainingError
from .grad import batch_gradient
from .metrics import accuracy
from .model import ModelConfig, ModelParams, forward


@dataclass
class AdamState:
    m: np.ndarray
    v: np.ndarray
    t: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def init(cls, dim: int, beta1: float = 0.9, beta2: float = 0.999,
             eps: float = 1e-8) -> "AdamState":
        return cls(np.zeros(dim), np.zeros(dim), 0, beta1, beta2, eps)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 20
    batch_size: int = 4
    lr0: float = 0.01
    decay_every: int = 10
    decay_factor: float = 0.1
    seed: int = 1
    repeats: int = 5

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.lr0 <= 0:
            raise ConfigError(f"lr0 must be positive, got {self.lr0}")
        if not 0 < self.decay_factor <= 1:
            raise ConfigError(f"decay_factor must be in (0, 1], got {self.decay_factor}")
        if self.decay_every < 1:
            raise ConfigError(f"decay_every must be >= 1, got {self.decay_every}")
        if self.repeats < 1:
            raise ConfigError(f"repeats must be >= 1, got {self.repeats}")


def lr_at(config: TrainConfig, epoch: int) -> float:
    """lr0 * decay_factor^floor((epoch-1)/decay_every), epoch 1-based."""
    if epoch < 1:
        raise ConfigError(f"epoch is 1-based, got {epoch}")
    return config.lr0 * config.decay_factor ** ((epoch - 1) // config.decay_every)


def adam_step(state: AdamState, params_flat: np.ndarray, grads_flat: np.ndarray,
              lr: float) -> tuple[np.ndarray, AdamState]:
    """One Adam update, in place on params_flat."""
    if params_flat.shape != grads_flat.shape:
        raise ConfigError(f"shape mismatch: params {params_flat.shape} vs grads {grads_flat.shape}")
    if not np.all(np.isfinite(grads_flat)):
        raise TrainingError("non-finite gradient entries; training aborted")
    state.t += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads_flat
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads_flat ** 2
    m_hat = state.m / (1.0 - state.beta1 ** state.t)
    v_hat = state.v / (1.0 - state.beta2 ** state.t)
    params_flat -= lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return params_flat, state


def init_params(config: ModelConfig, rng: np.random.Generator) -> tuple[ModelParams, np.ndarray]:
    """Fresh parameters as views into one flat vector (so in-place optimizer
    updates propagate). theta ~ U(0, 2pi); W, b ~ U(-1/sqrt(m), 1/sqrt(m))
    with m the measured-qubit count."""
    n_slots = config.num_slots
    n_meas = len(config.measured_qubits)
    n_cls = config.num_classes
    flat = np.empty(n_slots + n_cls * n_meas + n_cls)
    theta = flat[:n_slots]
    W = flat[n_slots:n_slots + n_cls * n_meas].reshape(n_cls, n_meas)
    b = flat[n_slots + n_cls * n_meas:]
    theta[:] = rng.uniform(0.0, 2.0 * np.pi, n_slots)
    bound = 1.0 / np.sqrt(n_meas)
    W[:] = rng.uniform(-bound, bound, (n_cls, n_meas))
    b[:] = rng.uniform(-bound, bound, n_cls)
    return ModelParams(theta, W, b), flat


def flatten_grads(bundle) -> np.ndarray:
    return np.concatenate([bundle.d_theta, bundle.d_W.ravel(), bundle.d_b])


@dataclass
class EpochRecord:
    epoch: int
    mean_train_loss: float
    test_accuracy: float


@dataclass
class RunResult:
    seed: int
    params: ModelParams
    curve: list[EpochRecord]
    test_scores: np.ndarray       # P(class 1) per test sample (binary)
    test_predictions: np.ndarray
    adam_steps: int

    @property
    def final_test_accuracy(self) -> float:
        return self.curve[-1].test_accuracy

    @property
    def final_train_loss(self) -> float:
        return self.curve[-1].mean_train_loss


def _check_data(config: ModelConfig, dataset: FeatureSet, name: str) -> None:
    if len(dataset) == 0:
        raise ConfigError(f"{name} dataset is empty")
    if dataset.dim != config.feature_dim:
        raise ConfigError(f"{name} dataset dim {dataset.dim} != model feature_dim {config.feature_dim}")


def _evaluate(config: ModelConfig, params: ModelParams, dataset: FeatureSet):
    preds = np.empty(len(dataset), dtype=np.int64)
    scores = np.empty(len(dataset))
    for i in range(len(dataset)):
        trace = forward(config, params, dataset.features[i])
        preds[i] = trace.predicted
        scores[i] = trace.probabilities[1] if config.num_classes == 2 else trace.probabilities[-1]
    return preds, scores


def train(config: ModelConfig, train_set: FeatureSet, test_set: FeatureSet,
          tcfg: TrainConfig, seed: int | None = None) -> RunResult:
    """One seeded run: shuffle/partition per epoch, Adam per batch, recording
    mean train loss and test accuracy per epoch."""
    _check_data(config, train_set, "train")
    _check_data(config, test_set, "test")
    run_seed = tcfg.seed if seed is None else seed
    rng = np.random.default_rng(run_seed)
    params, flat = init_params(config, rng)
    adam = AdamState.init(flat.shape[0])
    n = len(train_set)
    curve: list[EpochRecord] = []
    preds = scores = None
    for epoch in range(1, tcfg.epochs + 1):
        lr = lr_at(tcfg, epoch)
        order = rng.permutation(n)
        loss_sum = 0.0
        for start in range(0, n, tcfg.batch_size):
            idx = order[start:start + tcfg.batch_size]
            batch = [(train_set.features[i], int(train_set.labels[i])) for i in idx]
            bundle = batch_gradient(config, params, batch)
            if not np.isfinite(bundle.loss):
                raise TrainingError(f"non-finite loss at epoch {epoch}; training aborted")
            adam_step(adam, flat, flatten_grads(bundle), lr)
            loss_sum += bundle.loss * len(idx)
        preds, scores = _evaluate(config, params, test_set)
        curve.append(EpochRecord(epoch, loss_sum / n, accuracy(preds, test_set.labels)))
    return RunResult(run_seed, params, curve, scores, preds, adam.t)


def run_repeats(config: ModelConfig, train_set: FeatureSet, test_set: FeatureSet,
                tcfg: TrainConfig) -> list[RunResult]:
    """Independent runs with seeds tcfg.seed + 0 .. tcfg.seed + repeats - 1."""
    return [train(config, train_set, test_set, tcfg, seed=tcfg.seed + r)
            for r in range(tcfg.repeats)]
