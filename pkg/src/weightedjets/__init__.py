"""Exact weighted jet and symbol computations for constant-coefficient
operators on graded nilpotent Lie algebras."""

from __future__ import annotations

from .checks import ConsistencyError, Ledger
from .exactlin import GaussianRational, Matrix, Subspace, kernel_basis, parse_scalar
from .gla import GradedLieAlgebra, builtin, from_description, validate
from .jetmodel import equation_tower, rewrite_first_order, spencer_kernel_check
from .oracle import bch_product, polynomial_solutions
from .weightedsym import OperatorSpec, finite_type, make_operator, principal_symbol, symbol_space

__version__ = "0.1.0"

__all__ = [
    "ConsistencyError",
    "Ledger",
    "GaussianRational",
    "Matrix",
    "Subspace",
    "kernel_basis",
    "parse_scalar",
    "GradedLieAlgebra",
    "builtin",
    "from_description",
    "validate",
    "equation_tower",
    "rewrite_first_order",
    "spencer_kernel_check",
    "bch_product",
    "polynomial_solutions",
    "OperatorSpec",
    "finite_type",
    "make_operator",
    "principal_symbol",
    "symbol_space",
]
