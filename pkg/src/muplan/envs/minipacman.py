"""Minipacman: food collection in a maze with epsilon-greedy chasing ghosts.

Observations are six binary planes (walls, food, pills, agent, inedible
ghosts, edible ghosts). Eating a pill makes ghosts edible for a fixed number
of steps; clearing all food advances the level, which regenerates food and
increases the ghost count according to the episode's (g0, g_delta) schedule.
"""
from __future__ import annotations

import copy
from collections import deque

import numpy as np

from .base import Environment, EnvStepResult
from .maze import (HEIGHT, NUM_PILLS, WIDTH, Maze, generate_maze, ghost_count,
                   sample_ghost_schedule)

# no-op, up, down, left, right
ACTIONS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))
NUM_PLANES = 6


class MinipacmanEnv(Environment):
    n_actions = len(ACTIONS)
    observation_shape = (NUM_PLANES, HEIGHT, WIDTH)

    def __init__(self, maze_source: list[Maze] | None = None,
                 max_steps: int = 600, ghost_epsilon: float = 0.25,
                 edible_steps: int = 20, food_reward: float = 1.0,
                 pill_reward: float = 2.0, ghost_reward: float = 5.0,
                 wall_remove_prob: float = 0.3, seed: int | None = None):
        self.maze_source = maze_source
        self.max_steps = max_steps
        self.ghost_epsilon = ghost_epsilon
        self.edible_steps = edible_steps
        self.food_reward = food_reward
        self.pill_reward = pill_reward
        self.ghost_reward = ghost_reward
        self.wall_remove_prob = wall_remove_prob
        self._rng = np.random.default_rng(seed)

        self.maze: Maze | None = None
        self._corridors: list[tuple[int, int]] = []
        self._adjacency: dict[tuple[int, int], list[tuple[int, int]]] = {}
        self.agent = (0, 0)
        self.ghosts: list[tuple[int, int]] = []
        self.edible_timers: list[int] = []
        self.food: set[tuple[int, int]] = set()
        self.pills: set[tuple[int, int]] = set()
        self.level = 1
        self.g0 = 1
        self.g_delta = 0.5
        self._steps = 0
        self._terminal = True

    # -- episode setup -------------------------------------------------

    def reset(self, seed: int | None = None) -> np.ndarray:
        if seed is not None:
            self.reseed(seed)
        if self.maze_source is None:
            self.maze = generate_maze(self._rng, self.wall_remove_prob)
        else:
            self.maze = self.maze_source[int(self._rng.integers(len(self.maze_source)))]
        self._corridors = self.maze.corridor_cells
        self._adjacency = {cell: self.maze.neighbors(cell) for cell in self._corridors}
        if self.maze.ghost_schedule is not None:
            self.g0, self.g_delta = self.maze.ghost_schedule
        else:
            self.g0, self.g_delta = sample_ghost_schedule(self._rng)
        self.level = 1
        self._steps = 0
        self._terminal = False
        self.agent = self._random_cell()
        self.ghosts = []
        self.edible_timers = []
        for _ in range(ghost_count(self.g0, self.g_delta, self.level)):
            self.ghosts.append(self._random_cell(exclude={self.agent}))
            self.edible_timers.append(0)
        self._lay_out_items()
        return self.current_observation()

    def _random_cell(self, exclude: set | None = None) -> tuple[int, int]:
        while True:
            cell = self._corridors[int(self._rng.integers(len(self._corridors)))]
            if not exclude or cell not in exclude:
                return cell

    def _lay_out_items(self) -> None:
        candidates = [c for c in self._corridors if c != self.agent]
        picks = self._rng.choice(len(candidates), size=NUM_PILLS, replace=False)
        self.pills = {candidates[int(i)] for i in picks}
        self.food = {c for c in candidates if c not in self.pills}

    # -- stepping ------------------------------------------------------

    def step(self, action: int) -> EnvStepResult:
        if not 0 <= action < self.n_actions:
            raise ValueError(f"invalid action {action}")
        if self._terminal:
            raise RuntimeError("episode already finished")
        reward = 0.0

        dr, dc = ACTIONS[action]
        target = (self.agent[0] + dr, self.agent[1] + dc)
        if self.maze.is_corridor(target):
            self.agent = target

        if self.agent in self.food:
            self.food.discard(self.agent)
            reward += self.food_reward
        if self.agent in self.pills:
            self.pills.discard(self.agent)
            reward += self.pill_reward
            self.edible_timers = [self.edible_steps] * len(self.ghosts)

        reward, died = self._resolve_contacts(reward)
        if not died:
            self._move_ghosts()
            reward, died = self._resolve_contacts(reward)

        self.edible_timers = [max(0, t - 1) for t in self.edible_timers]
        self._steps += 1

        if died:
            self._terminal = True
        elif not self.food:
            self._advance_level()
        if self._steps >= self.max_steps:
            self._terminal = True
        return EnvStepResult(self.current_observation(), reward, self._terminal)

    def _resolve_contacts(self, reward: float) -> tuple[float, bool]:
        for i, pos in enumerate(self.ghosts):
            if pos != self.agent:
                continue
            if self.edible_timers[i] > 0:
                reward += self.ghost_reward
                self.ghosts[i] = self._random_cell(exclude={self.agent})
                self.edible_timers[i] = 0
            else:
                return reward, True
        return reward, False

    def _move_ghosts(self) -> None:
        distances = self._distance_field(self.agent)
        for i, pos in enumerate(self.ghosts):
            options = self._adjacency[pos]
            if not options:
                continue
            if self._rng.random() < self.ghost_epsilon:
                self.ghosts[i] = options[int(self._rng.integers(len(options)))]
            else:
                self.ghosts[i] = min(options, key=lambda c: distances[c])

    def _distance_field(self, source: tuple[int, int]) -> dict:
        distances = {source: 0}
        queue = deque([source])
        while queue:
            cell = queue.popleft()
            for nxt in self._adjacency[cell]:
                if nxt not in distances:
                    distances[nxt] = distances[cell] + 1
                    queue.append(nxt)
        return distances

    def _advance_level(self) -> None:
        self.level += 1
        want = ghost_count(self.g0, self.g_delta, self.level)
        while len(self.ghosts) < want:
            self.ghosts.append(self._random_cell(exclude={self.agent}))
            self.edible_timers.append(0)
        self.edible_timers = [0] * len(self.ghosts)
        self._lay_out_items()

    # -- views ---------------------------------------------------------

    def current_observation(self) -> np.ndarray:
        obs = np.zeros(self.observation_shape, dtype=np.float32)
        obs[0] = self.maze.grid
        for r, c in self.food:
            obs[1, r, c] = 1.0
        for r, c in self.pills:
            obs[2, r, c] = 1.0
        obs[3][self.agent] = 1.0
        for (r, c), timer in zip(self.ghosts, self.edible_timers):
            obs[5 if timer > 0 else 4, r, c] = 1.0
        return obs

    def clone(self) -> "MinipacmanEnv":
        return copy.deepcopy(self)

    def reseed(self, seed: int) -> None:
        self._rng = np.random.default_rng(seed)

    @property
    def terminal(self) -> bool:
        return self._terminal
