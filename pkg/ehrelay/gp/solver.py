"""Interior-point solution of a convexified GP with ``cvxopt.solvers.cp``."""
import logging
import math
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np
from cvxopt import matrix, solvers

from .convex import ConvexProblem

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
NOT_CONVERGED = "not_converged"
INFEASIBLE = "infeasible"


@dataclass
class SolverSettings:
    abstol: float = 1e-9
    reltol: float = 1e-9
    feastol: float = 1e-9
    max_iterations: int = 100
    # Added to the Hessian so all-affine problems keep a nonsingular KKT system.
    regularization: float = 1e-8
    # Largest log-space constraint value accepted as feasible.
    feasibility_tol: float = 1e-7

    def cvxopt_options(self) -> dict:
        return {
            'show_progress': False,
            'abstol': self.abstol,
            'reltol': self.reltol,
            'feastol': self.feastol,
            'maxiters': self.max_iterations,
        }


@dataclass
class ConvexSolution:
    status: str
    point: Dict[str, float]
    log_objective: float
    iterations: int = 0
    kkt_residual: float = 0.0
    max_violation: float = 0.0

    @property
    def converged(self) -> bool:
        return self.status == OPTIMAL

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE

    @property
    def objective(self) -> float:
        """Objective in the original (not logarithmic) scale."""
        return math.exp(self.log_objective)


def _violation(problem: ConvexProblem, t: np.ndarray) -> float:
    worst = 0.0
    if problem.m:
        worst = max(worst, float(np.max(problem.constraint_values(t))))
    if problem.A_eq.size:
        worst = max(worst, float(np.max(np.abs(problem.A_eq @ t - problem.b_eq))))
    return worst


def _kkt_residual(problem: ConvexProblem, t: np.ndarray, sol: dict) -> float:
    grad = problem.objective_gradient(t)
    stationarity = grad.copy()
    complementarity = 0.0
    if problem.m and sol.get('znl') is not None:
        znl = np.array(sol['znl']).ravel()
        stationarity += problem.constraint_jacobian(t).T @ znl
        complementarity = float(np.max(np.abs(znl * problem.constraint_values(t))))
    if problem.A_eq.size and sol.get('y') is not None:
        stationarity += problem.A_eq.T @ np.array(sol['y']).ravel()
    scale = max(1.0, float(np.max(np.abs(grad))) if grad.size else 1.0)
    return max(float(np.max(np.abs(stationarity))) / scale if stationarity.size else 0.0, complementarity)


def _run_cp(problem: ConvexProblem, t0: np.ndarray, settings: SolverSettings, regularization: float):
    n, m = problem.n, problem.m
    counter = {'newton': 0}

    def F(x=None, z=None):
        if x is None:
            return m, matrix(t0.reshape(-1, 1))
        t = np.array(x).ravel()
        f = np.empty(m + 1)
        Df = np.empty((m + 1, n))
        f[0] = problem.objective_value(t) - problem.objective_offset
        Df[0] = problem.objective_gradient(t)
        for i, c in enumerate(problem.constraints, start=1):
            f[i] = c.value(t)
            Df[i] = c.gradient(t)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(Df))):
            return None
        if z is None:
            return matrix(f.reshape(-1, 1)), matrix(Df)
        counter['newton'] += 1
        w = np.array(z).ravel()
        H = w[0] * problem.objective_hessian(t) + regularization * np.eye(n)
        for i, c in enumerate(problem.constraints, start=1):
            if not c.is_affine:
                H += w[i] * c.hessian(t)
        return matrix(f.reshape(-1, 1)), matrix(Df), matrix(H)

    kwargs = {}
    if problem.A_eq.size:
        kwargs = {'A': matrix(problem.A_eq), 'b': matrix(problem.b_eq.reshape(-1, 1))}
    sol = solvers.cp(F, options=settings.cvxopt_options(), **kwargs)
    return sol, counter['newton']


def solve_convex(problem: ConvexProblem, start: Optional[Mapping[str, float]] = None,
                 settings: Optional[SolverSettings] = None) -> ConvexSolution:
    """Minimize the convexified GP starting from the positive assignment ``start``.

    The start point does not need to be feasible. The returned status is
    ``"optimal"`` when the interior-point method converged to a feasible point,
    ``"not_converged"`` when it stopped at the iteration cap on a (nearly) feasible
    point, and ``"infeasible"`` otherwise.
    """
    settings = settings or SolverSettings()
    t0 = problem.to_log(start or {})

    if problem.constant_violations:
        logger.debug("infeasible constant constraints: %s", problem.constant_violations)
        return ConvexSolution(INFEASIBLE, problem.to_point(t0), problem.objective_value(t0),
                              max_violation=float('inf'))
    if problem.n == 0:
        return ConvexSolution(OPTIMAL, {}, problem.objective_offset)

    sol, iterations = None, 0
    for regularization in (settings.regularization, settings.regularization * 1e3):
        try:
            sol, iterations = _run_cp(problem, t0, settings, regularization)
            break
        except (ArithmeticError, ValueError) as exc:
            logger.debug("cvxopt failed with regularization %g: %s", regularization, exc)
    if sol is None:
        logger.warning("interior-point solver failed; keeping the start point")
        violation = _violation(problem, t0)
        status = NOT_CONVERGED if violation <= settings.feasibility_tol else INFEASIBLE
        return ConvexSolution(status, problem.to_point(t0), problem.objective_value(t0), max_violation=violation)

    t = np.array(sol['x']).ravel()
    violation = _violation(problem, t)
    kkt = _kkt_residual(problem, t, sol)
    if sol['status'] == 'optimal' and violation <= settings.feasibility_tol:
        status = OPTIMAL
    elif violation <= 10 * settings.feasibility_tol:
        status = NOT_CONVERGED
        logger.warning("interior-point solver stopped after %d iterations (status %s, kkt %.2e)",
                       iterations, sol['status'], kkt)
    else:
        status = INFEASIBLE
        logger.debug("no feasible point found (max violation %.3e)", violation)
    return ConvexSolution(status, problem.to_point(t), problem.objective_value(t),
                          iterations=iterations, kkt_residual=kkt, max_violation=violation)
