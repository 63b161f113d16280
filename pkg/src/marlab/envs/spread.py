"""Grid coverage task with dense distance-based rewards.

Agents and an equal number of fixed targets are scattered on a small
grid. Each step the team is paid the negative sum, over targets, of the
Manhattan distance to the nearest agent, so full coverage scores 0 per
step. Episodes run a fixed horizon.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError
from .base import DecPomdpSpec, EnvStep

DELTAS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))


class Spread:
    n_actions = 5

    def __init__(self, gamma=0.99, n_agents=2, grid_size=5, horizon=25):
        if n_agents < 1:
            raise ValueError("need at least one agent")
        if grid_size * grid_size < 2 * n_agents:
            raise ValueError("grid too small for distinct agent/target cells")
        self.n_agents = n_agents
        self.grid_size = grid_size
        self.horizon = horizon
        self.spec = DecPomdpSpec(
            n_agents=n_agents,
            state_dim=4 * n_agents + 1,
            obs_dim=2 * n_agents + 2 * n_agents,
            n_actions=5,
            max_episode_len=horizon,
            gamma=gamma,
        )
        self._pos = None
        self._targets = None
        self._t = 0

    def reset(self, seed=None):
        rng = np.random.default_rng(seed)
        cells = rng.choice(self.grid_size * self.grid_size,
                           size=2 * self.n_agents, replace=False)
        coords = [np.array(divmod(int(c), self.grid_size)) for c in cells]
        self._pos = coords[: self.n_agents]
        self._targets = coords[self.n_agents:]
        self._t = 0
        return self.state(), self.observations()

    def step(self, joint_action):
        if self._pos is None:
            raise ContractError("step() before reset()")
        masks = self.available_actions()
        for i, a in enumerate(joint_action):
            a = int(a)
            if not 0 <= a < 5 or not masks[i, a]:
                raise ContractError(f"agent {i}: invalid action {a}")
            self._pos[i] = self._pos[i] + DELTAS[a]
        self._t += 1
        reward = -float(self._distance_sum())
        terminated = self._t >= self.horizon
        return EnvStep(
            next_state=self.state(),
            observations=self.observations(),
            reward=reward,
            terminated=terminated,
            available_actions=self.available_actions(),
        )

    def _distance_sum(self):
        total = 0
        for t in self._targets:
            total += min(int(abs(p - t).sum()) for p in self._pos)
        return total

    def state(self):
        scale = self.grid_size - 1
        flat = [c / scale for p in self._pos for c in p]
        flat += [c / scale for t in self._targets for c in t]
        flat.append(self._t / self.horizon)
        return np.array(flat)

    def observations(self):
        scale = self.grid_size - 1
        obs = []
        for i in range(self.n_agents):
            parts = [self._pos[i] / scale]
            parts += [self._pos[j] / scale for j in range(self.n_agents) if j != i]
            parts += [t / scale for t in self._targets]
            obs.append(np.concatenate(parts))
        return obs

    def available_actions(self):
        masks = np.zeros((self.n_agents, 5), dtype=bool)
        for i, pos in enumerate(self._pos):
            for a, d in enumerate(DELTAS):
                target = pos + d
                masks[i, a] = (0 <= target[0] < self.grid_size) and \
                              (0 <= target[1] < self.grid_size)
        return masks

    @staticmethod
    def episode_success(last_step):
        return last_step.reward == 0.0
