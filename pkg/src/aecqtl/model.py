"""Hybrid forward pass: feature vector -> amplitude encoding -> PQC ->
Pauli-Z expectations -> linear head -> softmax probabilities."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _engine
from .circuits import (Circuit, ModelKind, ParamLayout, PoolingPlan,
                       build_pooling_plan, build_tlqcnn, build_tlqnn, param_count)
from .errors import ConfigError
from .statevector import amplitude_encode


def n_qubits_for_dim(feature_dim: int) -> int:
    """Minimal register size: 2^(n-1) < feature_dim <= 2^n."""
    if feature_dim < 2:
        raise ConfigError(f"feature_dim must be >= 2, got {feature_dim}")
    return max(1, math.ceil(math.log2(feature_dim)))


@dataclass(frozen=True)
class ModelConfig:
    kind: ModelKind
    n_qubits: int
    layers: int
    feature_dim: int
    num_classes: int = 2

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if self.layers < 1:
            raise ConfigError(f"layers must be >= 1, got {self.layers}")
        if self.num_classes < 2:
            raise ConfigError(f"num_classes must be >= 2, got {self.num_classes}")
        lo = 1 << (self.n_qubits - 1)
        hi = 1 << self.n_qubits
        if not lo < self.feature_dim <= hi:
            raise ConfigError(
                f"feature_dim {self.feature_dim} needs {n_qubits_for_dim(self.feature_dim)} "
                f"qubits, config says {self.n_qubits}")
        min_q = 2 if self.kind is ModelKind.TLQNN else 3
        if self.n_qubits < min_q:
            raise ConfigError(f"{self.kind.value} needs at least {min_q} qubits")

    @property
    def measured_qubits(self) -> tuple[int, ...]:
        if self.kind is ModelKind.TLQNN:
            return tuple(range(self.n_qubits))
        return build_pooling_plan(self.n_qubits).retained

    @property
    def num_slots(self) -> int:
        return param_count(self.kind, self.n_qubits, self.layers)[0]

    @property
    def num_classical(self) -> int:
        return param_count(self.kind, self.n_qubits, self.layers, self.num_classes)[1]


@dataclass
class ModelParams:
    """Trainable state: quantum angles theta, head weights W, head bias b."""

    theta: np.ndarray
    W: np.ndarray
    b: np.ndarray

    def copy(self) -> "ModelParams":
        return ModelParams(self.theta.copy(), self.W.copy(), self.b.copy())


@dataclass
class ForwardTrace:
    expectations: np.ndarray
    logits: np.ndarray
    probabilities: np.ndarray
    predicted: int


def build(config: ModelConfig) -> tuple[Circuit, ParamLayout, PoolingPlan | None]:
    if config.kind is ModelKind.TLQNN:
        circuit, layout = build_tlqnn(config.n_qubits, config.layers)
        return circuit, layout, None
    return build_tlqcnn(config.n_qubits, config.layers)


_compiled_cache: dict[tuple, _engine.CompiledCircuit] = {}


def compiled(config: ModelConfig) -> _engine.CompiledCircuit:
    key = (config.kind, config.n_qubits, config.layers)
    hit = _compiled_cache.get(key)
    if hit is None:
        circuit, _, _ = build(config)
        hit = _engine.compile_circuit(circuit, config.measured_qubits)
        _compiled_cache[key] = hit
    return hit


def check_params(config: ModelConfig, params: ModelParams) -> None:
    m = len(config.measured_qubits)
    if params.theta.shape != (config.num_slots,):
        raise ConfigError(f"theta has shape {params.theta.shape}, expected ({config.num_slots},)")
    if params.W.shape != (config.num_classes, m):
        raise ConfigError(f"W has shape {params.W.shape}, expected ({config.num_classes}, {m})")
    if params.b.shape != (config.num_classes,):
        raise ConfigError(f"b has shape {params.b.shape}, expected ({config.num_classes},)")
    for name, arr in (("theta", params.theta), ("W", params.W), ("b", params.b)):
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"non-finite entries in {name}")


def softmax(z: np.ndarray) -> np.ndarray:
    e = np.exp(z - np.max(z))
    return e / np.sum(e)


def head_logits(params: ModelParams, m: np.ndarray) -> np.ndarray:
    """The classical head: a bare affine map, no nonlinearity."""
    return params.W @ m + params.b


def forward(config: ModelConfig, params: ModelParams, x: np.ndarray) -> ForwardTrace:
    check_params(config, params)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (config.feature_dim,):
        raise ConfigError(f"feature vector has shape {x.shape}, expected ({config.feature_dim},)")
    psi0 = amplitude_encode(x, config.n_qubits).amplitudes
    m = compiled(config).expectations(params.theta, psi0)
    z = head_logits(params, m)
    p = softmax(z)
    return ForwardTrace(m, z, p, int(np.argmax(p)))


def predict(config: ModelConfig, params: ModelParams, x: np.ndarray) -> int:
    """argmax class; np.argmax breaks ties toward the lower index."""
    return forward(config, params, x).predicted
