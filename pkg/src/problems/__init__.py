"""
问题实例模块
"""

from .objectives import LocalObjective, ObjectiveStack
from .oracle import StochasticSubgradientOracle, stochastic_subgradient, subgradient
from .composite import CompositeProblem, dist_to_solution, evaluate_F
from .reference import certify_reference, solve_reference
from .benchmarks import BENCHMARK_PROBLEMS, build_benchmark, build_problem, generate_objectives

__all__ = [
    'LocalObjective',
    'ObjectiveStack',
    'StochasticSubgradientOracle',
    'subgradient',
    'stochastic_subgradient',
    'CompositeProblem',
    'evaluate_F',
    'dist_to_solution',
    'solve_reference',
    'certify_reference',
    'BENCHMARK_PROBLEMS',
    'build_benchmark',
    'build_problem',
    'generate_objectives',
]
