"""Riemann Z(t) on the critical line from the erfc-smoothed Dirichlet series."""

from .evaluator import EvaluationReport, ExpansionParams, cutoff, evaluate, expansion_params

__all__ = ["EvaluationReport", "ExpansionParams", "cutoff", "evaluate", "expansion_params"]
