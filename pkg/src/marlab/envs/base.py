"""Shared environment contract for the cooperative tasks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DecPomdpSpec:
    n_agents: int
    state_dim: int
    obs_dim: int
    n_actions: int
    max_episode_len: int
    gamma: float

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("discount must lie in [0, 1)")
        if self.max_episode_len < 1:
            raise ValueError("max_episode_len must be >= 1")


@dataclass
class EnvStep:
    next_state: np.ndarray
    observations: list
    reward: float
    terminated: bool
    available_actions: np.ndarray  # [n_agents, n_actions] bool


def make_env(name, gamma, options=None):
    """Instantiate an environment by config name."""
    from .lava_path import LavaPath
    from .spread import Spread

    options = options or {}
    if name == "lava_path":
        return LavaPath(gamma=gamma,
                        mask_other_position=options.get("partial_obs", False))
    if name == "spread":
        return Spread(gamma=gamma,
                      n_agents=options.get("n_agents", 2),
                      grid_size=options.get("grid_size", 5),
                      horizon=options.get("horizon", 25))
    raise ValueError(f"unknown environment {name!r}")
