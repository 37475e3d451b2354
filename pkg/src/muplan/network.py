"""Learned model: encoder, action-conditional dynamics, policy/value heads,
and an optional observation-reconstruction head.

All components are small dense networks over float64 parameter dicts. The
training loss sums, over an unrolled action sequence, cross-entropy terms for
reward/value (two-hot categorical targets) and policy, plus elementwise
binary cross-entropy for reconstruction and an L2 penalty. Gradients are
computed by hand-written reverse-mode passes and are validated against
finite differences in the test suite.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import nn
from .replay import TrainingBatch
from .support import CategoricalSupport, categorical_to_scalar, scalar_to_categorical


@dataclass(frozen=True)
class ModelOutput:
    """Result of one model application: reward, next state, policy, value."""

    reward: float
    state: object
    policy: np.ndarray
    value: float


@dataclass(frozen=True)
class LossBreakdown:
    """Weighted loss terms; ``total`` is their exact sum."""

    reward: float
    value: float
    policy: float
    reconstruction: float
    l2: float

    @property
    def total(self) -> float:
        return self.reward + self.value + self.policy + self.reconstruction + self.l2


class LearnedModel:
    """Value-equivalent model over a fixed-size hidden vector."""

    def __init__(self, obs_shape: tuple[int, ...], n_actions: int,
                 hidden_dim: int, support: CategoricalSupport,
                 rng: np.random.Generator | None = None,
                 params: dict | None = None):
        self.obs_shape = tuple(obs_shape)
        self.obs_dim = int(np.prod(obs_shape))
        self.n_actions = n_actions
        self.hidden_dim = hidden_dim
        self.support = support
        if params is not None:
            self.params = params
        else:
            self.params = self._init_params(rng or np.random.default_rng())

    def _init_params(self, rng: np.random.Generator) -> dict:
        h, d, a, s = self.hidden_dim, self.obs_dim, self.n_actions, self.support.count
        params = {
            "enc.l1.W": nn.init_uniform(rng, h, d), "enc.l1.b": np.zeros(h),
            "enc.l2.W": nn.init_uniform(rng, h, h), "enc.l2.b": np.zeros(h),
            "dyn.l1.W": nn.init_uniform(rng, h, h + a), "dyn.l1.b": np.zeros(h),
            "dyn.l2.W": nn.init_uniform(rng, h, h), "dyn.l2.b": np.zeros(h),
            "rew.h.W": nn.init_uniform(rng, h, h), "rew.h.b": np.zeros(h),
            "rew.o.W": np.zeros((s, h)), "rew.o.b": np.zeros(s),
            "pol.h.W": nn.init_uniform(rng, h, h), "pol.h.b": np.zeros(h),
            "pol.o.W": np.zeros((a, h)), "pol.o.b": np.zeros(a),
            "val.h.W": nn.init_uniform(rng, h, h), "val.h.b": np.zeros(h),
            "val.o.W": np.zeros((s, h)), "val.o.b": np.zeros(s),
            "rec.h.W": nn.init_uniform(rng, h, h), "rec.h.b": np.zeros(h),
            "rec.o.W": nn.init_uniform(rng, d, h), "rec.o.b": np.zeros(d),
        }
        return params

    def snapshot(self) -> "LearnedModel":
        """Copy of the model with detached parameters (for actors)."""
        return LearnedModel(self.obs_shape, self.n_actions, self.hidden_dim,
                            self.support,
                            params={k: v.copy() for k, v in self.params.items()})

    # -- forward building blocks ----------------------------------------

    def _mlp2_forward(self, x: np.ndarray, prefix: str):
        p = self.params
        z1, x_in = nn.linear_forward(x, p[f"{prefix}.l1.W"], p[f"{prefix}.l1.b"])
        a1, _ = nn.tanh_forward(z1)
        z2, _ = nn.linear_forward(a1, p[f"{prefix}.l2.W"], p[f"{prefix}.l2.b"])
        out, _ = nn.tanh_forward(z2)
        return out, (prefix, x_in, a1, out)

    def _mlp2_backward(self, dout: np.ndarray, cache, grads: dict) -> np.ndarray:
        prefix, x_in, a1, out = cache
        d = nn.tanh_backward(dout, out)
        d = nn.linear_backward(d, a1, self.params[f"{prefix}.l2.W"], grads,
                               f"{prefix}.l2.W", f"{prefix}.l2.b")
        d = nn.tanh_backward(d, a1)
        return nn.linear_backward(d, x_in, self.params[f"{prefix}.l1.W"], grads,
                                  f"{prefix}.l1.W", f"{prefix}.l1.b")

    def _head_forward(self, state: np.ndarray, prefix: str):
        p = self.params
        zh, _ = nn.linear_forward(state, p[f"{prefix}.h.W"], p[f"{prefix}.h.b"])
        hidden, _ = nn.tanh_forward(zh)
        logits, _ = nn.linear_forward(hidden, p[f"{prefix}.o.W"], p[f"{prefix}.o.b"])
        return logits, (prefix, state, hidden)

    def _head_backward(self, dlogits: np.ndarray, cache, grads: dict) -> np.ndarray:
        prefix, state, hidden = cache
        d = nn.linear_backward(dlogits, hidden, self.params[f"{prefix}.o.W"], grads,
                               f"{prefix}.o.W", f"{prefix}.o.b")
        d = nn.tanh_backward(d, hidden)
        return nn.linear_backward(d, state, self.params[f"{prefix}.h.W"], grads,
                                  f"{prefix}.h.W", f"{prefix}.h.b")

    def _encode(self, obs_flat: np.ndarray):
        return self._mlp2_forward(obs_flat, "enc")

    def _dynamics(self, state: np.ndarray, actions: np.ndarray):
        onehot = np.zeros((state.shape[0], self.n_actions))
        onehot[np.arange(state.shape[0]), actions] = 1.0
        x = np.concatenate([state, onehot], axis=1)
        next_state, cache = self._mlp2_forward(x, "dyn")
        return next_state, cache

    def _dynamics_backward(self, dnext: np.ndarray, cache, grads: dict) -> np.ndarray:
        dx = self._mlp2_backward(dnext, cache, grads)
        return dx[:, :self.hidden_dim]

    # -- inference -------------------------------------------------------

    def _flatten_obs(self, observations: np.ndarray) -> np.ndarray:
        observations = np.asarray(observations, dtype=np.float64)
        if observations.shape == self.obs_shape:
            observations = observations[None]
        elif observations.shape[1:] != self.obs_shape:
            raise ValueError(
                f"observation shape {observations.shape} does not match {self.obs_shape}")
        return observations.reshape(observations.shape[0], self.obs_dim)

    def initial_inference(self, observation: np.ndarray):
        """Encode an observation; returns (hidden state, policy, value)."""
        flat = self._flatten_obs(observation)
        state, _ = self._encode(flat)
        policy_logits, _ = self._head_forward(state, "pol")
        value_logits, _ = self._head_forward(state, "val")
        policy = nn.softmax(policy_logits)[0]
        value = categorical_to_scalar(nn.softmax(value_logits)[0], self.support)
        return state[0], policy, value

    def recurrent_inference(self, state: np.ndarray, action: int) -> ModelOutput:
        """One imagined step from ``state`` under ``action``."""
        if not 0 <= action < self.n_actions:
            raise ValueError(f"invalid action {action}")
        state = np.asarray(state, dtype=np.float64)[None]
        next_state, _ = self._dynamics(state, np.array([action]))
        reward_logits, _ = self._head_forward(next_state, "rew")
        policy_logits, _ = self._head_forward(next_state, "pol")
        value_logits, _ = self._head_forward(next_state, "val")
        reward = categorical_to_scalar(nn.softmax(reward_logits)[0], self.support)
        policy = nn.softmax(policy_logits)[0]
        value = categorical_to_scalar(nn.softmax(value_logits)[0], self.support)
        return ModelOutput(reward=reward, state=next_state[0], policy=policy, value=value)

    def reconstruct(self, state: np.ndarray) -> np.ndarray:
        """Per-cell observation probabilities decoded from a hidden state."""
        state = np.asarray(state, dtype=np.float64)[None]
        logits, _ = self._head_forward(state, "rec")
        return nn.sigmoid(logits)[0].reshape(self.obs_shape)

    # -- training loss ----------------------------------------------------

    def loss_and_gradients(self, batch: TrainingBatch, weights, want_grads: bool = True):
        """Unrolled loss over a batch; sums over samples and unroll steps.

        ``weights`` is (reward, value, policy, reconstruction, l2). Returns
        (LossBreakdown, grads) where grads is None if ``want_grads`` is False.
        Raises on any non-finite loss term, naming the term and step.
        """
        w_r, w_v, w_p, w_rec, w_l2 = weights
        unroll_k = batch.unroll_k
        obs = self._flatten_obs(batch.observations)
        batch_size = obs.shape[0]

        state, enc_cache = self._encode(obs)
        dyn_caches = []
        head_caches = {"pol": [], "val": [], "rew": [None], "rec": []}
        dlogit_caches = {"pol": [], "val": [], "rew": [None], "rec": []}
        raw = {"pol": 0.0, "val": 0.0, "rew": 0.0, "rec": 0.0}

        obs_targets = None
        if w_rec > 0:
            obs_targets = np.asarray(batch.observation_targets, dtype=np.float64)
            obs_targets = obs_targets.reshape(batch_size, unroll_k + 1, self.obs_dim)

        def check(term: str, value: float, k: int) -> float:
            if not np.isfinite(value):
                raise ValueError(f"non-finite {term} loss at unroll step {k}")
            return value

        for k in range(unroll_k + 1):
            if w_p > 0:
                logits, cache = self._head_forward(state, "pol")
                loss, dlogits = nn.cross_entropy(logits, batch.policy_targets[:, k])
                raw["pol"] += check("policy", loss, k)
                head_caches["pol"].append(cache)
                dlogit_caches["pol"].append(dlogits)
            if w_v > 0:
                logits, cache = self._head_forward(state, "val")
                targets = scalar_to_categorical(batch.value_targets[:, k], self.support)
                loss, dlogits = nn.cross_entropy(logits, targets)
                raw["val"] += check("value", loss, k)
                head_caches["val"].append(cache)
                dlogit_caches["val"].append(dlogits)
            if w_rec > 0:
                logits, cache = self._head_forward(state, "rec")
                loss, dlogits = nn.binary_cross_entropy(logits, obs_targets[:, k])
                raw["rec"] += check("reconstruction", loss, k)
                head_caches["rec"].append(cache)
                dlogit_caches["rec"].append(dlogits)
            if k < unroll_k:
                state, dyn_cache = self._dynamics(state, batch.actions[:, k])
                dyn_caches.append(dyn_cache)
                if w_r > 0:
                    logits, cache = self._head_forward(state, "rew")
                    targets = scalar_to_categorical(batch.reward_targets[:, k + 1],
                                                    self.support)
                    loss, dlogits = nn.cross_entropy(logits, targets)
                    raw["rew"] += check("reward", loss, k + 1)
                    head_caches["rew"].append(cache)
                    dlogit_caches["rew"].append(dlogits)

        l2 = w_l2 * nn.l2_penalty(self.params) if w_l2 > 0 else 0.0
        breakdown = LossBreakdown(
            reward=w_r * raw["rew"], value=w_v * raw["val"], policy=w_p * raw["pol"],
            reconstruction=w_rec * raw["rec"], l2=check("l2", l2, 0))
        if not want_grads:
            return breakdown, None

        grads = nn.zeros_like_params(self.params)
        d_state = None
        for k in range(unroll_k, -1, -1):
            d = np.zeros((batch_size, self.hidden_dim))
            if w_p > 0:
                d += self._head_backward(w_p * dlogit_caches["pol"][k],
                                         head_caches["pol"][k], grads)
            if w_v > 0:
                d += self._head_backward(w_v * dlogit_caches["val"][k],
                                         head_caches["val"][k], grads)
            if w_rec > 0:
                d += self._head_backward(w_rec * dlogit_caches["rec"][k],
                                         head_caches["rec"][k], grads)
            if w_r > 0 and k >= 1:
                d += self._head_backward(w_r * dlogit_caches["rew"][k],
                                         head_caches["rew"][k], grads)
            if k < unroll_k:
                d += self._dynamics_backward(d_state, dyn_caches[k], grads)
            d_state = d
        self._mlp2_backward(d_state, enc_cache, grads)
        if w_l2 > 0:
            for name, value in self.params.items():
                grads[name] += 2.0 * w_l2 * value
        return breakdown, grads


def save_checkpoint(model: LearnedModel, path) -> None:
    """Write parameters plus model geometry as a shape-tagged array container."""
    meta = {
        "_meta.obs_shape": np.array(model.obs_shape, dtype=np.int64),
        "_meta.n_actions": np.array(model.n_actions, dtype=np.int64),
        "_meta.hidden_dim": np.array(model.hidden_dim, dtype=np.int64),
        "_meta.support": np.array([model.support.v_min, model.support.v_max,
                                   model.support.count]),
    }
    with open(path, "wb") as fh:
        np.savez(fh, **meta, **model.params)


def load_checkpoint(path) -> LearnedModel:
    """Rebuild a model from a checkpoint; rejects shape mismatches."""
    with np.load(path) as data:
        arrays = {name: data[name] for name in data.files}
    try:
        obs_shape = tuple(int(v) for v in arrays.pop("_meta.obs_shape"))
        n_actions = int(arrays.pop("_meta.n_actions"))
        hidden_dim = int(arrays.pop("_meta.hidden_dim"))
        v_min, v_max, count = arrays.pop("_meta.support")
    except KeyError as exc:
        raise ValueError(f"checkpoint is missing metadata entry {exc}") from exc
    support = CategoricalSupport(float(v_min), float(v_max), int(count))
    model = LearnedModel(obs_shape, n_actions, hidden_dim, support,
                         rng=np.random.default_rng(0))
    expected = {name: value.shape for name, value in model.params.items()}
    if set(arrays) != set(expected):
        missing = set(expected) ^ set(arrays)
        raise ValueError(f"checkpoint parameter names do not match: {sorted(missing)}")
    for name, value in arrays.items():
        if value.shape != expected[name]:
            raise ValueError(
                f"checkpoint shape mismatch for {name}: {value.shape} != {expected[name]}")
    model.params = {name: np.asarray(value, dtype=np.float64) for name, value in arrays.items()}
    return model
