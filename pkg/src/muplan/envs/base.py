"""Common environment interface: stepping, cloning, reseeding."""
from __future__ import annotations

import abc
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class EnvStepResult:
    observation: np.ndarray
    reward: float
    terminal: bool


class Environment(abc.ABC):
    """Seeded, clonable environment.

    Clones are fully independent deep copies carrying their own RNG stream,
    so a clone can serve as a perfect transition model while the original
    keeps running.
    """

    n_actions: int
    observation_shape: tuple[int, ...]

    @abc.abstractmethod
    def reset(self, seed: int | None = None) -> np.ndarray:
        """Start a fresh episode, optionally reseeding the RNG stream."""

    @abc.abstractmethod
    def step(self, action: int) -> EnvStepResult:
        """Advance one step; raises on invalid actions or finished episodes."""

    @abc.abstractmethod
    def clone(self) -> "Environment":
        """Independent deep copy, including RNG state."""

    @abc.abstractmethod
    def reseed(self, seed: int) -> None:
        """Replace the RNG stream (used by the simulator-model wrapper)."""

    @abc.abstractmethod
    def current_observation(self) -> np.ndarray:
        """Observation of the current state without advancing."""

    @property
    @abc.abstractmethod
    def terminal(self) -> bool:
        """Whether the current episode has ended."""
