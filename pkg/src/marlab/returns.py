"""Return targets and exact operator certificates.

The target builders work on plain reward / bootstrap arrays so the same
code serves both deep learners and tabular tests. The operator section
evaluates the general return-based operator on finite MDPs in closed
form (a linear solve, no sampling, no truncation error) and certifies
its fixed point and gamma-contraction, plus the linear-TD stability
matrix whose positive definiteness holds on-policy but can fail
off-policy.

Conventions:
  * next_max_q[t] is the bootstrap value for the state entered by step t
    (0 when that step ends the episode; the tail value when a trajectory
    is cut at the horizon).
  * Trace coefficients are aligned to trajectory steps with c[0] = 1 by
    convention. A coefficient gates credit flowing INTO its own step, so
    when coefficients drive the target recursion the mixing weight for
    step t is c[t + 1].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .envs.tabular import exact_q, state_transition_matrix
from .errors import ContractError


# ---------------------------------------------------------------------------
# elementary targets
# ---------------------------------------------------------------------------

def td0_target(reward, next_max_q, terminated, gamma):
    """One-step bootstrapped target r + gamma * max_a' Q(s', a')."""
    if terminated:
        return float(reward)
    return float(reward + gamma * next_max_q)


def mc_return(rewards, gamma, terminated=True):
    """Discounted reward-to-go for every step of a terminated trajectory."""
    if not terminated:
        raise ContractError("Monte-Carlo returns require a terminated trajectory")
    rewards = np.asarray(rewards, dtype=np.float64)
    out = np.empty_like(rewards)
    acc = 0.0
    for t in range(len(rewards) - 1, -1, -1):
        acc = rewards[t] + gamma * acc
        out[t] = acc
    return out


def lambda_targets(rewards, lam, next_max_q, gamma, terminated=True):
    """Backward recursion T_t = r_t + gamma*(lam_t*T_{t+1} + (1-lam_t)*M_t).

    ``lam`` may be a constant or a per-step array; ``next_max_q[t]`` is the
    bootstrap M_t for the state entered by step t. For a terminated
    trajectory the final entry of ``next_max_q`` must be 0, making the last
    target exactly its reward; a horizon-cut trajectory instead carries the
    tail bootstrap there, which feeds both branches of the recursion.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    next_max_q = np.asarray(next_max_q, dtype=np.float64)
    n = len(rewards)
    lam = np.broadcast_to(np.asarray(lam, dtype=np.float64), (n,))
    if np.any(lam < 0.0) or np.any(lam > 1.0):
        raise ContractError("lambda values must lie in [0, 1]")
    if next_max_q.shape != (n,):
        raise ContractError("next_max_q must align with the trajectory")
    if terminated and next_max_q[-1] != 0.0:
        raise ContractError("terminal step must carry a zero bootstrap")
    out = np.empty(n)
    following = next_max_q[-1]  # value of the tail beyond the last step
    for t in range(n - 1, -1, -1):
        out[t] = rewards[t] + gamma * (
            lam[t] * following + (1.0 - lam[t]) * next_max_q[t]
        )
        following = out[t]
    return out


def nstep_mixture_oracle(rewards, lam, next_max_q, gamma, terminated=True):
    """Targets as the exponentially weighted sum of n-step returns.

    T_t = (1-lam) * sum_{n=1}^{N-1} lam^(n-1) G_t^(n) + lam^(N-1) G_t^(N),
    the final partial return absorbing all remaining weight. Independent of
    the recursive construction; used purely as its oracle.
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    next_max_q = np.asarray(next_max_q, dtype=np.float64)
    if not 0.0 <= lam <= 1.0:
        raise ContractError("lambda must lie in [0, 1]")
    n_steps = len(rewards)
    if terminated and next_max_q[-1] != 0.0:
        raise ContractError("terminal step must carry a zero bootstrap")
    out = np.empty(n_steps)
    for t in range(n_steps):
        horizon = n_steps - t
        partial = 0.0
        discount = 1.0
        total = 0.0
        for n in range(1, horizon + 1):
            partial += discount * rewards[t + n - 1]
            discount *= gamma
            g_n = partial + discount * next_max_q[t + n - 1]
            if n < horizon:
                total += (1.0 - lam) * lam ** (n - 1) * g_n
            else:
                total += lam ** (n - 1) * g_n
        out[t] = total
    return out


# ---------------------------------------------------------------------------
# trace coefficients
# ---------------------------------------------------------------------------

@dataclass
class TraceCoeffs:
    values: np.ndarray
    kind: str

    KINDS = ("fixed_lambda", "atd", "retrace", "importance_sampling")

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.kind not in self.KINDS:
            raise ContractError(f"unknown trace kind {self.kind!r}")
        if self.values.ndim != 1 or len(self.values) == 0:
            raise ContractError("coefficients must be a non-empty vector")
        if self.values[0] != 1.0:
            raise ContractError("c_0 must equal 1 by convention")
        if not np.all(np.isfinite(self.values)) or np.any(self.values < 0.0):
            raise ContractError("coefficients must be finite and non-negative")

    def __len__(self):
        return len(self.values)


@dataclass
class PolicyPair:
    target: np.ndarray    # pi[s, a]
    behavior: np.ndarray  # mu[s, a]

    def __post_init__(self):
        self.target = np.asarray(self.target, dtype=np.float64)
        self.behavior = np.asarray(self.behavior, dtype=np.float64)
        for name, p in (("target", self.target), ("behavior", self.behavior)):
            if np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-9 or np.any(p < 0.0):
                raise ContractError(f"{name} policy rows must be distributions")
        if np.any((self.target > 0.0) & (self.behavior == 0.0)):
            raise ContractError("behavior must cover the target policy's support")


def _trajectory_ratios(pair, states, actions):
    ratios = np.empty(len(states))
    for t, (s, a) in enumerate(zip(states, actions)):
        mu = pair.behavior[s, a]
        if mu == 0.0:
            raise ContractError("behavior probability is zero on a taken action")
        ratios[t] = pair.target[s, a] / mu
    return ratios


def retrace_coeffs(pair, states, actions, lam):
    """c_t = lam * min(1, pi/mu) along the trajectory, c_0 = 1."""
    ratios = _trajectory_ratios(pair, states, actions)
    values = lam * np.minimum(1.0, ratios)
    values[0] = 1.0
    return TraceCoeffs(values=values, kind="retrace")


def is_coeffs(pair, states, actions, clip=1.0):
    """Clipped importance-sampling traces c_t = min(clip, pi/mu), c_0 = 1."""
    ratios = _trajectory_ratios(pair, states, actions)
    values = np.minimum(clip, ratios)
    values[0] = 1.0
    return TraceCoeffs(values=values, kind="importance_sampling")


def coeff_targets(rewards, coeffs, next_max_q, gamma, terminated=True):
    """Targets driven by trace coefficients.

    The mixing weight for step t is c[t+1] (traces gate the flow into their
    own step); the unused final weight defaults to 0 so a terminated tail
    contributes nothing beyond its bootstrap.
    """
    if not isinstance(coeffs, TraceCoeffs):
        raise ContractError("coeff_targets requires TraceCoeffs")
    n = len(rewards)
    if len(coeffs) != n:
        raise ContractError("coefficients must align with the trajectory")
    mixing = np.zeros(n)
    mixing[:-1] = np.clip(coeffs.values[1:], 0.0, 1.0)
    return lambda_targets(rewards, mixing, next_max_q, gamma, terminated)


# ---------------------------------------------------------------------------
# the general return-based operator, evaluated exactly
# ---------------------------------------------------------------------------

def _validate_coeff_table(mdp, pair, coeff_table):
    coeff_table = np.asarray(coeff_table, dtype=np.float64)
    if coeff_table.shape != (mdp.n_states, mdp.n_actions):
        raise ContractError("coefficient table must be [S, A]")
    if np.any(coeff_table < 0.0):
        raise ContractError("coefficients must be non-negative")
    support = pair.behavior > 0.0
    ratio = np.zeros_like(coeff_table)
    ratio[support] = pair.target[support] / pair.behavior[support]
    if np.any(coeff_table[support] > ratio[support] + 1e-12):
        raise ContractError("coefficients exceed pi/mu; certificate refuses")
    return coeff_table


def apply_r_operator(mdp, pair, coeff_table, q):
    """Exact expectation of the return-based operator on a finite MDP.

    RQ = Q + (I - gamma*M)^(-1) delta with delta the target-policy Bellman
    residual and M[(s,a),(s',a')] = P(s'|s,a) mu(a'|s') c(s',a'). The trace
    at the start of a trajectory is fixed at 1, which the unit initial mass
    encodes. Requires 0 <= c <= pi/mu, which keeps M substochastic.
    """
    coeff_table = _validate_coeff_table(mdp, pair, coeff_table)
    q = np.asarray(q, dtype=np.float64)
    s, a = mdp.n_states, mdp.n_actions
    if q.shape != (s, a):
        raise ContractError("Q must be [S, A]")
    ev_q = np.einsum("tb,tb->t", pair.target, q)
    delta = mdp.rewards + mdp.gamma * mdp.transitions @ ev_q - q
    weighted = pair.behavior * coeff_table  # [s', a'] arrival weight
    m = np.einsum("sat,tb->satb", mdp.transitions, weighted).reshape(s * a, s * a)
    total = np.linalg.solve(np.eye(s * a) - mdp.gamma * m, delta.reshape(s * a))
    return q + total.reshape(s, a)


def contraction_certificate(mdp, pair, coeff_table, trials, rng, scale=5.0):
    """Check ||RQ - Q^pi||_inf <= gamma ||Q - Q^pi||_inf on random Q.

    Returns (holds, worst_ratio); worst_ratio is the largest observed
    contraction factor, 0 when every trial already sat at the fixed point.
    """
    q_pi = exact_q(mdp, pair.target)
    worst = 0.0
    holds = True
    for _ in range(trials):
        q = q_pi + rng.uniform(-scale, scale, size=q_pi.shape)
        gap = np.max(np.abs(q - q_pi))
        if gap == 0.0:
            continue
        image_gap = np.max(np.abs(apply_r_operator(mdp, pair, coeff_table, q) - q_pi))
        ratio = image_gap / gap
        worst = max(worst, ratio)
        if image_gap > mdp.gamma * gap + 1e-9:
            holds = False
    return holds, worst


def fixed_point_gap(mdp, pair, coeff_table):
    """||R Q^pi - Q^pi||_inf, which the theory pins at zero."""
    q_pi = exact_q(mdp, pair.target)
    return float(np.max(np.abs(apply_r_operator(mdp, pair, coeff_table, q_pi) - q_pi)))


# ---------------------------------------------------------------------------
# linear-TD stability matrix
# ---------------------------------------------------------------------------

def stability_matrix(mdp, features, behavior_dist, target_policy, gamma=None):
    """A = Psi^T D (I - gamma P_pi) Psi and the eigenvalues of its symmetric part.

    D carries the behavior state distribution on its diagonal and P_pi is the
    state chain induced by the target policy. The iteration is stable when
    the symmetric part is positive definite; matching distributions (on
    policy) guarantee that, mismatched ones need not.
    """
    features = np.asarray(features, dtype=np.float64)
    behavior_dist = np.asarray(behavior_dist, dtype=np.float64)
    gamma = mdp.gamma if gamma is None else gamma
    n = mdp.n_states
    if features.ndim != 2 or features.shape[0] != n:
        raise ContractError("features must be [n_states, k]")
    if np.linalg.matrix_rank(features) < features.shape[1]:
        raise ContractError("feature matrix must have full column rank")
    if abs(behavior_dist.sum() - 1.0) > 1e-9 or np.any(behavior_dist < 0.0):
        raise ContractError("behavior distribution must be a probability vector")
    p_pi = state_transition_matrix(mdp, target_policy)
    a = features.T @ np.diag(behavior_dist) @ (np.eye(n) - gamma * p_pi) @ features
    sym_eigs = np.linalg.eigvalsh((a + a.T) / 2.0)
    return a, sym_eigs
