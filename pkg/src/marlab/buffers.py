"""Episodic dual replay buffers with a per-transition lambda cache.

Two ring stores share incoming trajectories: a large slow-refreshing
off-policy store and a small fast-refreshing on-policy store. Cached
lambda values stay pinned between target-network synchronizations and
are wiped (or, optionally, literally zeroed) when the cache is cleared.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, EmptyStoreError


@dataclass
class Transition:
    state: np.ndarray
    observations: list
    actions: np.ndarray
    reward: float
    terminated: bool
    avail_actions: np.ndarray
    # per-agent probability of the chosen action under the behavior policy;
    # consumed by the retrace / importance-sampling target modes
    behavior_probs: np.ndarray | None = None

    def __post_init__(self):
        if not np.isfinite(self.reward):
            raise ContractError("transition reward must be finite")
        for i, a in enumerate(np.atleast_1d(self.actions)):
            if not self.avail_actions[i, int(a)]:
                raise ContractError(f"agent {i}: stored action violates its mask")


@dataclass
class Trajectory:
    transitions: list
    episode_id: int
    birth_step: int = 0

    def __post_init__(self):
        if not self.transitions:
            raise ContractError("trajectory must be non-empty")
        terminal_flags = [t.terminated for t in self.transitions]
        if any(terminal_flags[:-1]):
            raise ContractError("terminal transition must be last")

    def __len__(self):
        return len(self.transitions)

    @property
    def terminated(self):
        return self.transitions[-1].terminated

    def rewards(self):
        return np.array([t.reward for t in self.transitions])


class DualBuffer:
    """Paired trajectory stores plus the lambda cache.

    ``dual_insert`` stores each trajectory in both rings; ``cascade``
    stores into the on-policy ring and demotes whatever it evicts into
    the off-policy ring.
    """

    def __init__(self, capacity_off, capacity_on, insertion_mode="dual_insert",
                 cache_mode="clear"):
        if capacity_off < 1 or capacity_on < 1:
            raise ValueError("capacities must be positive")
        if insertion_mode not in ("dual_insert", "cascade"):
            raise ValueError(f"unknown insertion mode {insertion_mode!r}")
        if cache_mode not in ("clear", "reset_to_zero"):
            raise ValueError(f"unknown cache mode {cache_mode!r}")
        self.capacity_off = capacity_off
        self.capacity_on = capacity_on
        self.insertion_mode = insertion_mode
        self.cache_mode = cache_mode
        self.off = deque()
        self.on = deque()
        self._cache = {}  # episode_id -> {step: lambda}

    # -- insertion ---------------------------------------------------------

    def insert(self, trajectory):
        if self.insertion_mode == "dual_insert":
            self._push(self.off, trajectory, self.capacity_off)
            self._push(self.on, trajectory, self.capacity_on)
        else:
            evicted = self._push(self.on, trajectory, self.capacity_on)
            if evicted is not None:
                self._push(self.off, evicted, self.capacity_off)

    def _push(self, store, trajectory, capacity):
        store.append(trajectory)
        evicted = None
        if len(store) > capacity:
            evicted = store.popleft()
            self._drop_cache_if_gone(evicted.episode_id)
        return evicted

    def _drop_cache_if_gone(self, episode_id):
        for store in (self.off, self.on):
            for traj in store:
                if traj.episode_id == episode_id:
                    return
        self._cache.pop(episode_id, None)

    # -- sampling -------------------------------------------------------------

    def store(self, which):
        if which == "off":
            return self.off
        if which == "on":
            return self.on
        raise ValueError(f"unknown store {which!r}")

    def ready(self, which, minimum=1):
        return len(self.store(which)) >= minimum

    def sample_batch(self, which, batch_size, rng):
        store = self.store(which)
        if not store:
            raise EmptyStoreError(f"{which}-policy store is empty")
        idx = rng.integers(0, len(store), size=batch_size)
        return [store[i] for i in idx]

    # -- lambda cache ----------------------------------------------------------

    def lambda_cache_get(self, episode_id, step):
        return self._cache.get(episode_id, {}).get(step)

    def lambda_cache_put(self, episode_id, step, value):
        if not 0.0 < value < 1.0:
            raise ContractError("cached lambda must lie in (0, 1)")
        if not self._is_resident(episode_id):
            raise ContractError("cache keys must reference resident trajectories")
        self._cache.setdefault(episode_id, {})[step] = float(value)

    def _is_resident(self, episode_id):
        return any(traj.episode_id == episode_id
                   for store in (self.off, self.on) for traj in store)

    def clear_cache(self):
        if self.cache_mode == "reset_to_zero":
            # literal reading: keep the keys, pin every entry at 0.0
            for entries in self._cache.values():
                for step in entries:
                    entries[step] = 0.0
        else:
            self._cache.clear()

    def cache_size(self):
        return sum(len(v) for v in self._cache.values())
