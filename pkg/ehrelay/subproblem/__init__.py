from .builder import (
    GAMMA_MIN, ContinuousMode, SubproblemFormulation, beta_var, build_max_min, build_max_sum,
    build_relaxation, idle_var, power_var, selection_var, with_gamma,
)
from .coefficients import EnergyCoefficients, SnrCoefficients, energy_coefficients, snr_coefficients
from .solve import (
    ContinuousSolution, UtilityReport, decision_from_point, initial_point, point_from_decision,
    solve_continuous, true_utility,
)

__all__ = [
    'EnergyCoefficients', 'SnrCoefficients', 'energy_coefficients', 'snr_coefficients',
    'ContinuousMode', 'SubproblemFormulation', 'build_max_sum', 'build_max_min', 'build_relaxation',
    'with_gamma', 'beta_var', 'power_var', 'selection_var', 'idle_var', 'GAMMA_MIN',
    'UtilityReport', 'ContinuousSolution', 'true_utility', 'initial_point', 'point_from_decision',
    'decision_from_point', 'solve_continuous',
]
