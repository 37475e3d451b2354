"""Episode replay buffer and training-target construction.

The buffer stores whole episodes and evicts the oldest ones once the total
step count exceeds capacity. Sampling draws (episode, offset) uniformly over
all stored steps and assembles fixed-length unroll targets; positions past
the episode end are absorbed (terminal observation repeated, zero reward,
uniform policy, zero value).
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np


class ReplayNotReady(RuntimeError):
    """Raised when sampling before the buffer holds ``min_replay`` steps."""


@dataclass(frozen=True)
class TrajectoryStep:
    """One actor step: observation, action taken, reward received, and the
    search-derived learning targets computed before acting."""

    observation: np.ndarray
    action: int
    env_reward: float
    policy_target: np.ndarray
    value_estimate: float

    def __post_init__(self):
        total = float(np.sum(self.policy_target))
        if abs(total - 1.0) > 1e-9 or np.any(np.asarray(self.policy_target) < 0):
            raise ValueError(f"policy_target must be a distribution, sums to {total}")


@dataclass
class TrainingBatch:
    """Stacked unroll targets for a sampled batch.

    Index ``k`` of the (K+1)-long target arrays aligns with the model state
    after unrolling ``k`` of the stored actions. ``reward_targets[:, 0]`` is
    a placeholder: no reward is predicted before the first unrolled action.
    """

    observations: np.ndarray  # (B, *obs_shape)
    actions: np.ndarray  # (B, K) int64
    reward_targets: np.ndarray  # (B, K+1)
    policy_targets: np.ndarray  # (B, K+1, A)
    value_targets: np.ndarray  # (B, K+1)
    observation_targets: np.ndarray  # (B, K+1, *obs_shape)

    @property
    def size(self) -> int:
        return self.observations.shape[0]

    @property
    def unroll_k(self) -> int:
        return self.actions.shape[1]


def compute_value_target(rewards, bootstrap_values, t: int, n: int, gamma: float) -> float:
    """n-step bootstrapped discounted return for step ``t``.

    ``rewards[i]`` is the reward received after the action at step ``i``;
    ``bootstrap_values[i]`` is the search value estimate at step ``i``.
    Episodes shorter than ``t + n`` truncate the sum at the terminal step and
    drop the bootstrap term.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    length = len(rewards)
    if not 0 <= t < length:
        raise IndexError(f"t={t} outside episode of length {length}")
    target = 0.0
    horizon = min(n, length - t)
    for i in range(horizon):
        target += (gamma ** i) * float(rewards[t + i])
    if t + n < len(bootstrap_values):
        target += (gamma ** n) * float(bootstrap_values[t + n])
    return target


class ReplayBuffer:
    """Circular episode store, safe for concurrent insert and sample."""

    def __init__(self, capacity_steps: int, min_replay: int):
        if capacity_steps < 1 or min_replay < 1:
            raise ValueError("capacity and min_replay must be positive")
        self.capacity_steps = capacity_steps
        self.min_replay = min_replay
        self._episodes: list[list[TrajectoryStep]] = []
        self._total_steps = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        with self._lock:
            return self._total_steps

    @property
    def num_episodes(self) -> int:
        with self._lock:
            return len(self._episodes)

    @property
    def ready(self) -> bool:
        with self._lock:
            return self._total_steps >= self.min_replay

    def insert(self, trajectory: list[TrajectoryStep]) -> None:
        if not trajectory:
            raise ValueError("cannot insert an empty trajectory")
        with self._lock:
            self._episodes.append(list(trajectory))
            self._total_steps += len(trajectory)
            while self._total_steps > self.capacity_steps and len(self._episodes) > 1:
                evicted = self._episodes.pop(0)
                self._total_steps -= len(evicted)

    def sample_batch(self, batch_size: int, rng: np.random.Generator,
                     unroll_k: int, n_step: int, gamma: float) -> TrainingBatch:
        """Uniformly sample ``batch_size`` (episode, offset) starts."""
        with self._lock:
            if self._total_steps < self.min_replay:
                raise ReplayNotReady(
                    f"buffer holds {self._total_steps} < min_replay {self.min_replay} steps")
            episodes = list(self._episodes)
        lengths = np.array([len(ep) for ep in episodes])
        cumulative = np.cumsum(lengths)
        flat = rng.integers(0, cumulative[-1], size=batch_size)
        samples = []
        for idx in flat:
            ep_idx = int(np.searchsorted(cumulative, idx, side="right"))
            offset = int(idx - (cumulative[ep_idx - 1] if ep_idx else 0))
            samples.append(make_unroll_targets(episodes[ep_idx], offset, unroll_k, n_step, gamma))
        return TrainingBatch(
            observations=np.stack([s[0] for s in samples]),
            actions=np.stack([s[1] for s in samples]),
            reward_targets=np.stack([s[2] for s in samples]),
            policy_targets=np.stack([s[3] for s in samples]),
            value_targets=np.stack([s[4] for s in samples]),
            observation_targets=np.stack([s[5] for s in samples]),
        )


def make_unroll_targets(episode: list[TrajectoryStep], t: int, unroll_k: int,
                        n_step: int, gamma: float):
    """Targets for one sample starting at offset ``t``.

    Positions past the episode end repeat the final observation with zero
    reward, uniform policy, and zero value; padded actions are 0.
    """
    length = len(episode)
    n_actions = len(episode[0].policy_target)
    rewards = [step.env_reward for step in episode]
    values = [step.value_estimate for step in episode]

    actions = np.zeros(unroll_k, dtype=np.int64)
    reward_targets = np.zeros(unroll_k + 1)
    policy_targets = np.zeros((unroll_k + 1, n_actions))
    value_targets = np.zeros(unroll_k + 1)
    obs_targets = np.zeros((unroll_k + 1,) + episode[0].observation.shape,
                           dtype=episode[0].observation.dtype)

    for k in range(unroll_k):
        actions[k] = episode[t + k].action if t + k < length else 0
    for k in range(unroll_k + 1):
        if k >= 1:
            reward_targets[k] = rewards[t + k - 1] if t + k - 1 < length else 0.0
        if t + k < length:
            policy_targets[k] = episode[t + k].policy_target
            value_targets[k] = compute_value_target(rewards, values, t + k, n_step, gamma)
            obs_targets[k] = episode[t + k].observation
        else:
            policy_targets[k] = 1.0 / n_actions
            value_targets[k] = 0.0
            obs_targets[k] = episode[length - 1].observation
    return (episode[t].observation, actions, reward_targets, policy_targets,
            value_targets, obs_targets)
