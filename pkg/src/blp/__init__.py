"""Exact rational solvers for bilevel linear programs."""
from .errors import BlpError
from .instance import BlpInstance, fixture_t1, fixture_t2, load_instance, validate_a1
from .optimistic import solve_optimistic
from .pessimistic import solve_pessimistic
from .specialcase import solve_minmax, solve_minmin
from .valuefn import build_pwl, eval_phi_direct

__all__ = [
    "BlpError", "BlpInstance", "build_pwl", "eval_phi_direct", "fixture_t1", "fixture_t2",
    "load_instance", "solve_minmax", "solve_minmin", "solve_optimistic", "solve_pessimistic",
    "validate_a1",
]
__version__ = "0.1.0"
