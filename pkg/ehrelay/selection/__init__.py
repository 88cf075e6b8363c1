from .base import ALL_INFEASIBLE, OK, ProblemContext, SelectionResult, steady_iteration
from .bb import BbNode, BbSettings, bb_optimize, energy_screen, solve_relaxation, utility_bound
from .bpso import BpsoSettings, SwarmState, bpso_optimize, sigmoid
from .exhaustive import EXHAUSTIVE_MAX_CELLS, exhaustive_optimize

__all__ = [
    'ProblemContext', 'SelectionResult', 'steady_iteration', 'OK', 'ALL_INFEASIBLE',
    'BpsoSettings', 'SwarmState', 'bpso_optimize', 'sigmoid',
    'BbSettings', 'BbNode', 'bb_optimize', 'utility_bound', 'energy_screen', 'solve_relaxation',
    'exhaustive_optimize', 'EXHAUSTIVE_MAX_CELLS',
]
