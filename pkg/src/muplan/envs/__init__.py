"""Environments: procedural Minipacman and the ChainWorld oracle."""
from .base import Environment, EnvStepResult
from .chainworld import ChainWorld
from .maze import (Maze, default_maze, from_ascii, generate_maze, ghost_count,
                   is_connected, maze_pool, sample_ghost_schedule, to_ascii)
from .minipacman import ACTIONS, MinipacmanEnv

__all__ = [
    "ACTIONS", "ChainWorld", "Environment", "EnvStepResult", "Maze",
    "MinipacmanEnv", "default_maze", "from_ascii", "generate_maze",
    "ghost_count", "is_connected", "maze_pool", "sample_ghost_schedule",
    "to_ascii",
]


def make_env(cfg, seed: int | None = None) -> Environment:
    """Build the configured environment (AgentConfig-shaped ``cfg``)."""
    from .maze import maze_pool as build_pool

    if cfg.env == "chainworld":
        return ChainWorld(cells=cfg.chain_cells, max_steps=cfg.max_episode_steps, seed=seed)
    if cfg.env == "minipacman":
        pool = None
        if cfg.maze_pool > 0:
            pool = build_pool(cfg.maze_pool, cfg.maze_pool_seed, cfg.wall_remove_prob)
        return MinipacmanEnv(
            maze_source=pool,
            max_steps=cfg.max_episode_steps,
            ghost_epsilon=cfg.ghost_epsilon,
            edible_steps=cfg.edible_steps,
            food_reward=cfg.food_reward,
            pill_reward=cfg.pill_reward,
            ghost_reward=cfg.ghost_reward,
            wall_remove_prob=cfg.wall_remove_prob,
            seed=seed,
        )
    raise ValueError(f"unknown env {cfg.env!r}")
