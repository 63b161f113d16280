"""Two-agent lava-crossing gridworld.

A 7x7 grid with a lava band across the middle row broken by two safe
corridors. The agents start on opposite sides and must swap ends within
60 steps. Both reaching their goals pays +40 and ends the episode;
stepping into lava pays -10 and ends it; running out the clock pays the
negative sum of Manhattan distances to the goals (clamped to [-40, 0]).
Moves that would leave the grid are masked out. Two agents moving into
the same cell, or trying to swap cells, both stay put.
"""

from __future__ import annotations

import numpy as np

from ..errors import ContractError
from .base import DecPomdpSpec, EnvStep

GRID = 7
LAVA_ROW = 3
CORRIDOR_COLS = (1, 5)
MAX_STEPS = 60
# actions: stay, up, down, left, right
DELTAS = ((0, 0), (-1, 0), (1, 0), (0, -1), (0, 1))

STARTS = ((0, 3), (6, 3))
GOALS = ((6, 3), (0, 3))


def _is_lava(cell):
    return cell[0] == LAVA_ROW and cell[1] not in CORRIDOR_COLS


class LavaPath:
    n_agents = 2
    n_actions = 5

    def __init__(self, gamma=0.99, mask_other_position=False):
        self.mask_other_position = mask_other_position
        self.spec = DecPomdpSpec(
            n_agents=2,
            state_dim=5,
            obs_dim=6,
            n_actions=5,
            max_episode_len=MAX_STEPS,
            gamma=gamma,
        )
        self._pos = None
        self._t = 0

    # -- core API -------------------------------------------------------------

    def reset(self, seed=None):
        # starts are fixed; the seed argument keeps the interface uniform
        self._pos = [np.array(s) for s in STARTS]
        self._t = 0
        return self.state(), self.observations()

    def step(self, joint_action):
        if self._pos is None:
            raise ContractError("step() before reset()")
        masks = self.available_actions()
        proposed = []
        for i, a in enumerate(joint_action):
            a = int(a)
            if not 0 <= a < 5 or not masks[i, a]:
                raise ContractError(f"agent {i}: invalid action {a}")
            proposed.append(self._pos[i] + DELTAS[a])

        # same-cell and swap-through collisions cancel both moves
        if np.array_equal(proposed[0], proposed[1]):
            proposed = [self._pos[0], self._pos[1]]
        elif (np.array_equal(proposed[0], self._pos[1])
              and np.array_equal(proposed[1], self._pos[0])):
            proposed = [self._pos[0], self._pos[1]]

        self._pos = [np.array(p) for p in proposed]
        self._t += 1

        reward, terminated = 0.0, False
        if any(_is_lava(p) for p in self._pos):
            reward, terminated = -10.0, True
        elif all(np.array_equal(p, np.array(g)) for p, g in zip(self._pos, GOALS)):
            reward, terminated = 40.0, True
        elif self._t >= MAX_STEPS:
            dist = sum(int(abs(p - np.array(g)).sum())
                       for p, g in zip(self._pos, GOALS))
            reward, terminated = -float(min(40, max(0, dist))), True

        return EnvStep(
            next_state=self.state(),
            observations=self.observations(),
            reward=reward,
            terminated=terminated,
            available_actions=self.available_actions(),
        )

    # -- views ------------------------------------------------------------------

    def state(self):
        flat = [c / (GRID - 1) for p in self._pos for c in p]
        flat.append(self._t / MAX_STEPS)
        return np.array(flat)

    def observations(self):
        obs = []
        scale = GRID - 1
        for i in range(2):
            own = self._pos[i] / scale
            other = self._pos[1 - i] / scale
            if self.mask_other_position:
                other = np.zeros(2)
            goal_off = (np.array(GOALS[i]) - self._pos[i]) / scale
            obs.append(np.concatenate([own, other, goal_off]))
        return obs

    def available_actions(self):
        masks = np.zeros((2, 5), dtype=bool)
        for i, pos in enumerate(self._pos):
            for a, d in enumerate(DELTAS):
                target = pos + d
                masks[i, a] = (0 <= target[0] < GRID) and (0 <= target[1] < GRID)
        return masks

    @staticmethod
    def episode_success(last_step):
        return last_step.reward == 40.0
