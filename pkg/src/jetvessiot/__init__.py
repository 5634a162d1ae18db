"""Involution analysis and Vessiot connections for PDE systems on jet bundles."""

from .expr import Expr, Var, ExprError
from .jet import Chart, VectorField, lie_bracket, contact_field, formal_derivative
from .system import ReducedCNF, ImplicitSystem, validate, make_first_order

__all__ = ["Expr", "Var", "ExprError", "Chart", "VectorField", "lie_bracket", "contact_field",
           "formal_derivative", "ReducedCNF", "ImplicitSystem", "validate", "make_first_order"]
