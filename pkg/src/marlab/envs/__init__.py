from .base import DecPomdpSpec, EnvStep, make_env
from .lava_path import LavaPath
from .spread import Spread
from .tabular import (
    TabularMdp,
    bellman_residual,
    exact_q,
    random_policy,
    random_tabular_mdp,
    state_transition_matrix,
    stationary_distribution,
)

__all__ = [
    "DecPomdpSpec", "EnvStep", "make_env", "LavaPath", "Spread",
    "TabularMdp", "random_tabular_mdp", "random_policy", "exact_q",
    "bellman_residual", "state_transition_matrix", "stationary_distribution",
]
