"""Agent configuration: planning/learning knobs, variant presets, file round-trip.

A config is a flat key=value text file; every key maps 1:1 onto an
``AgentConfig`` field and onto a CLI flag. Unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import hashlib
from dataclasses import dataclass

VARIANT_NAMES = ("one_step", "learn", "data", "learn_data", "learn_data_eval")
TARGET_STYLES = ("visit_count", "mpo")
ENV_NAMES = ("chainworld", "minipacman")

# Sentinel spelling of "unbounded" in config files / CLI flags.
INF_TOKENS = ("inf", "none", "unbounded")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"config key '{key}': {message}")


@dataclass(frozen=True)
class VariantPreset:
    """One row of the ablation table: where search is used and how deep.

    ``learn_d_tree`` is the tree depth of the search that produces learning
    targets (1 or None for unbounded). ``act_train``/``act_eval`` choose the
    action source ('prior' samples the policy network, 'search' uses the
    full-depth search policy). ``unroll_k`` is the training unroll length.
    """

    learn_d_tree: int | None
    act_train: str
    act_eval: str
    unroll_k: int


VARIANTS: dict[str, VariantPreset] = {
    "one_step": VariantPreset(1, "prior", "prior", 1),
    "learn": VariantPreset(None, "prior", "prior", 5),
    "data": VariantPreset(1, "search", "prior", 5),
    "learn_data": VariantPreset(None, "search", "prior", 5),
    "learn_data_eval": VariantPreset(None, "search", "search", 5),
}


@dataclass
class AgentConfig:
    """Every knob of the agent, environment, and training loop."""

    # Environment
    env: str = "minipacman"
    chain_cells: int = 10
    max_episode_steps: int = 600
    ghost_epsilon: float = 0.25
    edible_steps: int = 20
    food_reward: float = 1.0
    pill_reward: float = 2.0
    ghost_reward: float = 5.0
    maze_pool: int = 0  # 0 = unlimited procedural mazes
    maze_pool_seed: int = 0
    wall_remove_prob: float = 0.3

    # Search
    d_tree: int | None = None  # None = unbounded
    d_uct: int | None = None
    budget: int = 10
    c1: float = 1.25
    c2: float = 19652.0
    gamma: float = 0.97
    dirichlet_alpha: float = 0.3
    exploration_fraction: float = 0.25
    target_style: str = "visit_count"
    mpo_tau: float = 0.1

    # Temperature schedule
    temp_initial: float = 1.0
    temp_decay_rate: float = 0.95
    temp_decay_every: int = 5000

    # Targets / model
    n_step: int = 10
    unroll_k: int = 5
    variant: str = "learn_data_eval"
    hidden_dim: int = 64
    support_min: float = -5.0
    support_max: float = 25.0
    support_bins: int = 21
    # (reward, value, policy, reconstruction, l2) weights
    loss_weights: tuple[float, float, float, float, float] = (1.0, 0.3, 1.0, 0.0, 1e-4)

    # Training loop
    learning_rate: float = 1e-3
    batch_size: int = 32
    replay_capacity: int = 100_000
    min_replay: int = 1_000
    samples_per_insert: float = 0.25
    learner_steps: int = 2_000
    sync_every: int = 500
    grad_clip_norm: float = 5.0
    log_every: int = 200
    eval_episodes: int = 10

    def preset(self) -> VariantPreset:
        return VARIANTS[self.variant]

    def resolved(self) -> "AgentConfig":
        """Apply variant coercions and validate; returns a new config."""
        cfg = dataclasses.replace(self)
        if cfg.variant in VARIANTS:
            cfg.unroll_k = VARIANTS[cfg.variant].unroll_k
        if cfg.variant == "one_step":
            cfg.d_tree = 1
        if cfg.d_tree is not None and (cfg.d_uct is None or cfg.d_uct > cfg.d_tree):
            cfg.d_uct = cfg.d_tree
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if self.env not in ENV_NAMES:
            raise ConfigError("env", f"must be one of {ENV_NAMES}")
        if self.variant not in VARIANT_NAMES:
            raise ConfigError("variant", f"must be one of {VARIANT_NAMES}")
        if self.target_style not in TARGET_STYLES:
            raise ConfigError("target_style", f"must be one of {TARGET_STYLES}")
        if self.d_tree is not None and self.d_tree < 1:
            raise ConfigError("d_tree", "must be a positive integer or inf")
        if self.d_uct is not None and self.d_uct < 0:
            raise ConfigError("d_uct", "must be a non-negative integer or inf")
        if self.d_uct is not None and self.d_tree is None:
            pass  # finite uct depth under unbounded tree depth is fine
        elif self.d_uct is None and self.d_tree is not None:
            raise ConfigError("d_uct", "cannot be unbounded when d_tree is finite")
        elif self.d_uct is not None and self.d_tree is not None and self.d_uct > self.d_tree:
            raise ConfigError("d_uct", f"must not exceed d_tree ({self.d_tree})")
        if self.budget < 1:
            raise ConfigError("budget", "must be >= 1")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma", "must lie in [0, 1]")
        if self.c1 <= 0 or self.c2 <= 0:
            raise ConfigError("c1", "c1 and c2 must be positive")
        if self.dirichlet_alpha <= 0:
            raise ConfigError("dirichlet_alpha", "must be positive")
        if not 0.0 <= self.exploration_fraction <= 1.0:
            raise ConfigError("exploration_fraction", "must lie in [0, 1]")
        if self.temp_initial <= 0:
            raise ConfigError("temp_initial", "must be positive")
        if not 0.0 < self.temp_decay_rate <= 1.0:
            raise ConfigError("temp_decay_rate", "must lie in (0, 1]")
        if self.temp_decay_every < 1:
            raise ConfigError("temp_decay_every", "must be a positive step count")
        if self.n_step < 1:
            raise ConfigError("n_step", "must be >= 1")
        if self.unroll_k < 1:
            raise ConfigError("unroll_k", "must be >= 1")
        if self.variant == "one_step" and (self.d_tree != 1 or self.unroll_k != 1):
            raise ConfigError("variant", "one_step forces d_tree=1 and unroll_k=1")
        if self.mpo_tau <= 0:
            raise ConfigError("mpo_tau", "must be positive")
        if len(self.loss_weights) != 5 or any(w < 0 for w in self.loss_weights):
            raise ConfigError("loss_weights", "needs 5 non-negative weights")
        if self.support_bins < 2:
            raise ConfigError("support_bins", "needs at least 2 bins")
        if self.support_min >= self.support_max:
            raise ConfigError("support_min", "support range must be non-empty")
        if self.target_style == "visit_count" and self.d_uct == 0:
            raise ConfigError("target_style", "d_uct=0 leaves visit counts uninformative; use mpo")
        for key in ("batch_size", "replay_capacity", "min_replay", "sync_every",
                    "log_every", "eval_episodes", "hidden_dim", "chain_cells",
                    "max_episode_steps", "edible_steps"):
            if getattr(self, key) < 1:
                raise ConfigError(key, "must be >= 1")
        if self.learner_steps < 0:
            raise ConfigError("learner_steps", "must be >= 0")
        if self.samples_per_insert <= 0:
            raise ConfigError("samples_per_insert", "must be positive")
        if self.maze_pool < 0:
            raise ConfigError("maze_pool", "must be >= 0 (0 = unlimited)")


_FIELDS = {f.name: f for f in dataclasses.fields(AgentConfig)}


def _format_value(name: str, value) -> str:
    if value is None:
        return "inf"
    if name == "loss_weights":
        return ",".join(repr(float(w)) for w in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_value(name: str, text: str):
    field = _FIELDS[name]
    text = text.strip()
    if name in ("d_tree", "d_uct"):
        return None if text.lower() in INF_TOKENS else int(text)
    if name == "loss_weights":
        parts = [p for p in text.split(",") if p.strip()]
        if len(parts) != 5:
            raise ConfigError(name, "expected 5 comma-separated weights")
        return tuple(float(p) for p in parts)
    if field.type in ("int", "int | None"):
        return int(text)
    if field.type == "float":
        return float(text)
    return text


def to_text(cfg: AgentConfig) -> str:
    lines = [f"{f.name} = {_format_value(f.name, getattr(cfg, f.name))}"
             for f in dataclasses.fields(AgentConfig)]
    return "\n".join(lines) + "\n"


def from_text(text: str, base: AgentConfig | None = None) -> AgentConfig:
    """Parse a flat key=value config; unknown keys raise ConfigError."""
    cfg = dataclasses.replace(base) if base is not None else AgentConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        try:
            setattr(cfg, key, _parse_value(key, value))
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(key, str(exc)) from exc
    return cfg


def load(path) -> AgentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return from_text(fh.read())


def save(cfg: AgentConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(to_text(cfg))


def apply_overrides(cfg: AgentConfig, overrides: dict[str, str]) -> AgentConfig:
    """Apply string-valued overrides (CLI flags) onto a config."""
    cfg = dataclasses.replace(cfg)
    for key, value in overrides.items():
        if key not in _FIELDS:
            raise ConfigError(key, "unknown key")
        setattr(cfg, key, _parse_value(key, value))
    return cfg


def config_hash(cfg: AgentConfig) -> str:
    """Stable short hash identifying a resolved configuration."""
    return hashlib.sha256(to_text(cfg).encode()).hexdigest()[:12]


def chainworld_defaults() -> AgentConfig:
    """Desk-scale defaults tuned for the 10-cell chain environment."""
    return AgentConfig(
        env="chainworld",
        budget=8,
        gamma=0.97,
        n_step=10,
        hidden_dim=32,
        support_min=-1.0,
        support_max=2.0,
        support_bins=21,
        max_episode_steps=50,
        batch_size=32,
        replay_capacity=50_000,
        min_replay=500,
        samples_per_insert=16.0,
        learner_steps=20_000,
        log_every=500,
    )


def minipacman_defaults() -> AgentConfig:
    """Desk-scale defaults for procedural Minipacman."""
    return AgentConfig(env="minipacman", budget=10)


def defaults_for_env(env: str) -> AgentConfig:
    if env == "chainworld":
        return chainworld_defaults()
    if env == "minipacman":
        return minipacman_defaults()
    raise ConfigError("env", f"must be one of {ENV_NAMES}")
