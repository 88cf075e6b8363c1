from .convex import ConvexProblem, LogSumExp, to_convex_form
from .posynomial import (
    Monomial, Posynomial, PosynomialProduct, as_posynomial, condense, evaluate, monomial_sum_square,
)
from .problem import GpProblem
from .sca import ScaResult, ScaSettings, run_sca
from .solver import INFEASIBLE, NOT_CONVERGED, OPTIMAL, ConvexSolution, SolverSettings, solve_convex

__all__ = [
    'Monomial', 'Posynomial', 'PosynomialProduct', 'as_posynomial', 'evaluate', 'condense',
    'monomial_sum_square', 'GpProblem', 'ConvexProblem', 'LogSumExp', 'to_convex_form',
    'SolverSettings', 'ConvexSolution', 'solve_convex', 'OPTIMAL', 'NOT_CONVERGED', 'INFEASIBLE',
    'ScaSettings', 'ScaResult', 'run_sca',
]
