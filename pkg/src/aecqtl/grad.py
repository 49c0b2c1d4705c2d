"""Exact gradients: analytic backprop through the softmax/cross-entropy head,
the parameter-shift rule for quantum angles, and a finite-difference oracle."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _engine, model
from .circuits import Circuit
from .errors import ConfigError
from .model import ForwardTrace, ModelConfig, ModelParams
from .statevector import amplitude_encode

PROB_FLOOR = 1e-12


@dataclass
class GradientBundle:
    loss: float
    d_theta: np.ndarray
    d_W: np.ndarray
    d_b: np.ndarray


def ce_loss(p: np.ndarray, y: int) -> float:
    """Cross entropy -ln p_y, floored at PROB_FLOOR to stay finite."""
    if not 0 <= y < len(p):
        raise ConfigError(f"label {y} out of range for {len(p)} classes")
    return float(-np.log(max(float(p[y]), PROB_FLOOR)))


def backward_classical(trace: ForwardTrace, y: int, params: ModelParams):
    """Analytic head gradients; returns (d_W, d_b, d_m) with g = p - onehot(y)."""
    g = trace.probabilities.copy()
    g[y] -= 1.0
    d_b = g
    d_W = np.outer(g, trace.expectations)
    d_m = params.W.T @ g
    return d_W, d_b, d_m


def circuit_shift_grad(circuit: Circuit, theta: np.ndarray, psi0: np.ndarray,
                       measured: Sequence[int], d_m: np.ndarray) -> np.ndarray:
    """Bare shift rule on an arbitrary circuit (compiled ad hoc; for small cases)."""
    compiled = _engine.compile_circuit(circuit, tuple(measured))
    return _combine_shifts(compiled, theta, psi0, d_m)


def _combine_shifts(compiled: _engine.CompiledCircuit, theta: np.ndarray,
                    psi0: np.ndarray, d_m: np.ndarray) -> np.ndarray:
    pairs = compiled.shift_pairs(np.asarray(theta, dtype=np.float64), psi0)
    # d<Z>/d(angle) = (plus - minus)/2; slot_scale maps back to slot space
    return compiled.slot_scale * (((pairs[:, 0, :] - pairs[:, 1, :]) @ d_m) * 0.5)


def param_shift_grad(config: ModelConfig, params: ModelParams, x: np.ndarray,
                     y: int, d_m: np.ndarray) -> np.ndarray:
    """d(loss)/d(theta) by the +-pi/2 shift rule; 2 * num_slots circuit runs."""
    psi0 = amplitude_encode(np.asarray(x, dtype=np.float64), config.n_qubits).amplitudes
    return _combine_shifts(model.compiled(config), params.theta, psi0, d_m)


def sample_gradient(config: ModelConfig, params: ModelParams,
                    x: np.ndarray, y: int) -> GradientBundle:
    trace = model.forward(config, params, x)
    loss = ce_loss(trace.probabilities, y)
    d_W, d_b, d_m = backward_classical(trace, y, params)
    d_theta = param_shift_grad(config, params, x, y, d_m)
    return GradientBundle(loss, d_theta, d_W, d_b)


def batch_gradient(config: ModelConfig, params: ModelParams,
                   batch: Sequence[tuple[np.ndarray, int]]) -> GradientBundle:
    """Arithmetic mean of per-sample bundles (fixed summation order)."""
    if len(batch) == 0:
        raise ConfigError("batch_gradient needs a nonempty batch")
    total: GradientBundle | None = None
    for x, y in batch:
        g = sample_gradient(config, params, x, y)
        if total is None:
            total = g
        else:
            total.loss += g.loss
            total.d_theta += g.d_theta
            total.d_W += g.d_W
            total.d_b += g.d_b
    k = float(len(batch))
    total.loss /= k
    total.d_theta /= k
    total.d_W /= k
    total.d_b /= k
    return total


def _loss_at(config: ModelConfig, params: ModelParams, x: np.ndarray, y: int) -> float:
    return ce_loss(model.forward(config, params, x).probabilities, y)


def fd_grad(config: ModelConfig, params: ModelParams, x: np.ndarray, y: int,
            h: float = 1e-5) -> GradientBundle:
    """Central finite differences of the scalar loss over every parameter."""
    if h <= 0:
        raise ConfigError(f"step h must be positive, got {h}")
    work = params.copy()
    loss = _loss_at(config, work, x, y)

    def central(arr: np.ndarray, idx) -> float:
        orig = arr[idx]
        arr[idx] = orig + h
        up = _loss_at(config, work, x, y)
        arr[idx] = orig - h
        down = _loss_at(config, work, x, y)
        arr[idx] = orig
        return (up - down) / (2.0 * h)

    d_theta = np.array([central(work.theta, i) for i in range(work.theta.shape[0])])
    d_W = np.empty_like(work.W)
    for r in range(work.W.shape[0]):
        for c in range(work.W.shape[1]):
            d_W[r, c] = central(work.W, (r, c))
    d_b = np.array([central(work.b, i) for i in range(work.b.shape[0])])
    return GradientBundle(loss, d_theta, d_W, d_b)


def bundle_deviation(a: GradientBundle, b: GradientBundle,
                     softening: float = 1e-3) -> tuple[float, str]:
    """Max softened relative deviation between two bundles and its location.

    dev = |x - y| / (max(|x|, |y|) + softening), so dev < tol means
    |x - y| < tol * max(|x|, |y|) + tol * softening; at tol = 1e-5 the
    default softening reproduces the 1e-8 absolute floor.
    """
    worst = -1.0
    where = ""
    for name, x, y in (("theta", a.d_theta, b.d_theta),
                       ("W", a.d_W.ravel(), b.d_W.ravel()),
                       ("b", a.d_b, b.d_b)):
        if x.size == 0:
            continue
        dev = np.abs(x - y) / (np.maximum(np.abs(x), np.abs(y)) + softening)
        i = int(np.argmax(dev))
        if dev[i] > worst:
            worst = float(dev[i])
            where = f"{name}[{i}]"
    return max(worst, 0.0), where


def evaluation_count() -> int:
    return _engine.evaluation_count()


def reset_evaluation_count() -> None:
    _engine.reset_evaluation_count()
