"""ChainWorld: a deterministic corridor of cells with one terminal reward.

The agent starts at cell 0 and moves left/right; reaching the rightmost cell
pays 1 and ends the episode. The optimal value has a closed form, which makes
this the oracle environment for search and learning sanity checks.
"""
from __future__ import annotations

import copy

import numpy as np

from .base import Environment, EnvStepResult

LEFT = 0
RIGHT = 1


class ChainWorld(Environment):
    n_actions = 2

    def __init__(self, cells: int = 10, max_steps: int = 50, seed: int | None = None):
        if cells < 2:
            raise ValueError("need at least 2 cells")
        self.cells = cells
        self.max_steps = max_steps
        self.observation_shape = (cells,)
        self._rng = np.random.default_rng(seed)
        self._position = 0
        self._steps = 0
        self._terminal = False

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.reseed(seed)
        self._position = 0
        self._steps = 0
        self._terminal = False
        return self.current_observation()

    def step(self, action: int) -> EnvStepResult:
        if action not in (LEFT, RIGHT):
            raise ValueError(f"invalid action {action}")
        if self._terminal:
            raise RuntimeError("episode already finished")
        if action == RIGHT:
            self._position = min(self._position + 1, self.cells - 1)
        else:
            self._position = max(self._position - 1, 0)
        reward = 0.0
        self._steps += 1
        if self._position == self.cells - 1:
            reward = 1.0
            self._terminal = True
        elif self._steps >= self.max_steps:
            self._terminal = True
        return EnvStepResult(self.current_observation(), reward, self._terminal)

    def clone(self) -> "ChainWorld":
        return copy.deepcopy(self)

    def reseed(self, seed: int) -> None:
        self._rng = np.random.default_rng(seed)

    def current_observation(self) -> np.ndarray:
        obs = np.zeros(self.cells, dtype=np.float32)
        obs[self._position] = 1.0
        return obs

    @property
    def terminal(self) -> bool:
        return self._terminal

    @property
    def position(self) -> int:
        return self._position

    def optimal_value(self, gamma: float, position: int = 0) -> float:
        """Discounted return of always moving right from ``position``."""
        steps_to_goal = self.cells - 1 - position
        if steps_to_goal <= 0:
            return 0.0
        return gamma ** (steps_to_goal - 1)

    def optimal_return(self) -> float:
        """Undiscounted episode return of the optimal policy."""
        return 1.0
