"""Unambiguous measurements: state discrimination, comparison and identification, coherent-state
optics, channel tests and comparison of observables."""
from .operators import Povm, default_tol, validate_povm
from .usd import UsdProblem, idp_optimal, idp_success

__all__ = ["Povm", "UsdProblem", "default_tol", "idp_optimal", "idp_success", "validate_povm"]
