from .tensor import Tensor, concat, no_grad, stack
from .layers import ACTIVATIONS, Dense, GRUCell, Sequential, collect_params
from .optim import Adam, RMSprop, make_optimizer
from .gradcheck import grad_check, numeric_gradient

__all__ = [
    "Tensor", "concat", "stack", "no_grad",
    "ACTIVATIONS", "Dense", "GRUCell", "Sequential", "collect_params",
    "Adam", "RMSprop", "make_optimizer",
    "grad_check", "numeric_gradient",
]
