"""Averaged functions, zero placement and direct simulation for piecewise
perturbations of the holomorphic center ``z' = i(z^2 - 1)/2``."""
from .closed import eval_M1, eval_N1, m1_function, n1_function
from .designer import design, realize, verify_configuration
from .perturbation import MelnikovParams, PerturbationSpec, melnikov_params, reflect

__version__ = "0.1.0"

__all__ = [
    "MelnikovParams", "PerturbationSpec", "design", "eval_M1", "eval_N1", "m1_function",
    "melnikov_params", "n1_function", "realize", "reflect", "verify_configuration",
]
