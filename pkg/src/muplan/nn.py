"""Minimal dense-network numerics: layers, losses, Adam, gradient clipping.

Parameters live in flat name->array dicts; forward helpers return caches
that the matching backward helpers consume, accumulating gradients into a
dict of the same shape. Everything is float64 so finite-difference gradient
checks are meaningful.
"""
from __future__ import annotations

import numpy as np


def init_uniform(rng: np.random.Generator, out_dim: int, in_dim: int) -> np.ndarray:
    """Uniform fan-in scaled weight matrix."""
    bound = 1.0 / np.sqrt(in_dim)
    return rng.uniform(-bound, bound, size=(out_dim, in_dim))


def linear_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray):
    return x @ w.T + b, x


def linear_backward(dout: np.ndarray, cache_x: np.ndarray, w: np.ndarray,
                    grads: dict, w_name: str, b_name: str) -> np.ndarray:
    grads[w_name] += dout.T @ cache_x
    grads[b_name] += dout.sum(axis=0)
    return dout @ w


def tanh_forward(x: np.ndarray):
    y = np.tanh(x)
    return y, y


def tanh_backward(dout: np.ndarray, cache_y: np.ndarray) -> np.ndarray:
    return dout * (1.0 - cache_y * cache_y)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def cross_entropy(logits: np.ndarray, target_probs: np.ndarray):
    """Summed cross-entropy over the batch; returns (loss, dlogits)."""
    log_probs = log_softmax(logits)
    loss = -float((target_probs * log_probs).sum())
    dlogits = softmax(logits) - target_probs
    return loss, dlogits


def _softplus(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0) + np.log1p(np.exp(-np.abs(x)))


def sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    exp_x = np.exp(x[~pos])
    out[~pos] = exp_x / (1.0 + exp_x)
    return out


def binary_cross_entropy(logits: np.ndarray, targets: np.ndarray):
    """Summed elementwise BCE with logits; returns (loss, dlogits)."""
    loss = float((_softplus(logits) - targets * logits).sum())
    dlogits = sigmoid(logits) - targets
    return loss, dlogits


def l2_penalty(params: dict) -> float:
    return float(sum(np.sum(v * v) for v in params.values()))


def zeros_like_params(params: dict) -> dict:
    return {name: np.zeros_like(value) for name, value in params.items()}


def global_norm(grads: dict) -> float:
    return float(np.sqrt(sum(np.sum(g * g) for g in grads.values())))


def clip_global_norm(grads: dict, max_norm: float) -> float:
    """Scale gradients in place so the global norm is at most ``max_norm``."""
    norm = global_norm(grads)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for g in grads.values():
            g *= scale
    return norm


class Adam:
    """Adaptive-moment optimizer over a parameter dict."""

    def __init__(self, params: dict, learning_rate: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self._m = zeros_like_params(params)
        self._v = zeros_like_params(params)

    def step(self, params: dict, grads: dict) -> None:
        self.step_count += 1
        correction1 = 1.0 - self.beta1 ** self.step_count
        correction2 = 1.0 - self.beta2 ** self.step_count
        for name, g in grads.items():
            m = self._m[name]
            v = self._v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            m_hat = m / correction1
            v_hat = v / correction2
            params[name] -= self.learning_rate * m_hat / (np.sqrt(v_hat) + self.eps)
