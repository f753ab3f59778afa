"""Exact solvers for budget-constrained set-valued prediction."""
