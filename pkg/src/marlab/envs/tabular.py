"""Exact finite MDPs for operator-level verification.

These never touch function approximation: policy values are obtained by
solving the Bellman linear system directly, so downstream certificates
can be held to 1e-9 tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError

_STOCHASTIC_TOL = 1e-12


@dataclass
class TabularMdp:
    transitions: np.ndarray  # P[s, a, s'], each row sums to 1
    rewards: np.ndarray      # r[s, a]
    gamma: float

    def __post_init__(self):
        self.transitions = np.asarray(self.transitions, dtype=np.float64)
        self.rewards = np.asarray(self.rewards, dtype=np.float64)
        if self.transitions.ndim != 3 or self.rewards.ndim != 2:
            raise ContractError("transitions must be [S,A,S'] and rewards [S,A]")
        s, a, s2 = self.transitions.shape
        if s != s2 or self.rewards.shape != (s, a):
            raise ContractError("inconsistent MDP table shapes")
        row_sums = self.transitions.sum(axis=2)
        if np.max(np.abs(row_sums - 1.0)) > _STOCHASTIC_TOL:
            raise ContractError("transition rows must sum to 1")
        if not np.all(np.isfinite(self.rewards)):
            raise ContractError("rewards must be finite")
        if not 0.0 <= self.gamma < 1.0:
            raise ContractError("gamma must lie in [0, 1)")

    @property
    def n_states(self):
        return self.transitions.shape[0]

    @property
    def n_actions(self):
        return self.transitions.shape[1]


def random_tabular_mdp(seed, n_states, n_joint_actions, gamma):
    """Random MDP with Dirichlet(1) transition rows and U(-1,1) rewards."""
    if n_states < 2 or n_joint_actions < 2:
        raise ContractError("need at least 2 states and 2 joint actions")
    rng = np.random.default_rng(seed)
    raw = rng.exponential(1.0, size=(n_states, n_joint_actions, n_states))
    transitions = raw / raw.sum(axis=2, keepdims=True)
    rewards = rng.uniform(-1.0, 1.0, size=(n_states, n_joint_actions))
    return TabularMdp(transitions=transitions, rewards=rewards, gamma=gamma)


def random_policy(rng, n_states, n_actions, min_prob=0.0):
    """Random row-stochastic policy; min_prob > 0 keeps full support."""
    raw = rng.exponential(1.0, size=(n_states, n_actions)) + min_prob
    return raw / raw.sum(axis=1, keepdims=True)


def state_transition_matrix(mdp, policy):
    """P_pi[s, s'] = sum_a policy[s, a] P[s, a, s']."""
    return np.einsum("sa,sat->st", policy, mdp.transitions)


def exact_q(mdp, policy):
    """Solve (I - gamma P^pi) Q = r exactly in the state-action space."""
    s, a = mdp.n_states, mdp.n_actions
    n = s * a
    # P^pi[(s,a),(s',a')] = P(s'|s,a) pi(a'|s')
    p_pi = np.einsum("sat,tb->satb", mdp.transitions, policy).reshape(n, n)
    q = np.linalg.solve(np.eye(n) - mdp.gamma * p_pi, mdp.rewards.reshape(n))
    return q.reshape(s, a)


def bellman_residual(mdp, policy, q):
    """Max |Q - (r + gamma P E_pi Q)| over all state-action pairs."""
    ev = np.einsum("tb,tb->t", policy, q)
    backed = mdp.rewards + mdp.gamma * np.einsum("sat,t->sa", mdp.transitions, ev)
    return float(np.max(np.abs(q - backed)))


def stationary_distribution(p_state):
    """Stationary distribution of a row-stochastic state transition matrix."""
    n = p_state.shape[0]
    # solve d^T P = d^T with the normalization constraint appended
    a = np.vstack([p_state.T - np.eye(n), np.ones(n)])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    d, *_ = np.linalg.lstsq(a, b, rcond=None)
    d = np.clip(d, 0.0, None)
    return d / d.sum()
