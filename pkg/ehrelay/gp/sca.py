# ehrelay/gp/sca.py
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional

from ..errors import DomainError, InfeasibleStartError
from .convex import to_convex_form
from .posynomial import Assignment
from .problem import GpProblem
from .solver import INFEASIBLE, SolverSettings, solve_convex

logger = logging.getLogger(__name__)

Builder = Callable[[Mapping[str, float]], GpProblem]


@dataclass
class ScaSettings:
    """Successive convex approximation controls.

    Attributes:
        tolerance: Stop once an iteration improves the utility (``-log`` of the
            minimized objective) by no more than this amount. ``inf`` returns the
            initial point untouched.
        max_iterations: Cap on the number of GP solves.
        initial_point: Optional starting assignment; callers supply a default when
            this is ``None``.
        solver: Settings of the inner interior-point solver.
    """
    tolerance: float = 1e-4
    max_iterations: int = 30
    initial_point: Optional[Dict[str, float]] = None
    solver: SolverSettings = field(default_factory=SolverSettings)

    def __post_init__(self):
        if not self.tolerance > 0:
            raise DomainError(f"SCA tolerance must be positive, got {self.tolerance}")
        if self.max_iterations < 1:
            raise DomainError("SCA needs at least one iteration")


@dataclass
class ScaResult:
    """Outcome of :func:`run_sca`.

    ``objective_trace[0]`` is the log-objective at the initial point; each further
    entry is the optimum of an accepted GP. ``utility_trace`` is its negation and
    ``iterates`` holds the matching points, starting with the initial one.
    """
    point: Dict[str, float]
    objective_trace: List[float]
    iterations: int
    solves: int
    converged: bool
    iterates: List[Dict[str, float]] = field(default_factory=list)

    @property
    def utility_trace(self) -> List[float]:
        return [-v for v in self.objective_trace]

    @property
    def log_objective(self) -> float:
        return self.objective_trace[-1]


def _log_objective(problem: GpProblem, z: Assignment) -> float:
    return math.fsum(math.log(f.evaluate(z)) for f in problem.objective_factors())


def run_sca(build: Builder, settings: ScaSettings, initial_point: Optional[Assignment] = None) -> ScaResult:
    """Solve a sequence of condensed GPs, each built around the previous solution.

    ``build(z_ref)`` must return a GP whose constraints are tight or conservative
    approximations around ``z_ref``. A step is accepted only when it improves the
    utility by more than ``settings.tolerance``; the run stops at the first step
    that does not, at an infeasible GP, or after ``settings.max_iterations`` solves.

    Raises:
        InfeasibleStartError: the initial point violates a constraint of the first GP.
    """
    z = dict(initial_point if initial_point is not None else (settings.initial_point or {}))
    problem = build(z)
    violated = problem.first_violated(z, tol=1e-6)
    if violated is not None:
        raise InfeasibleStartError(violated)

    trace = [_log_objective(problem, z)]
    iterates = [z]
    if math.isinf(settings.tolerance):
        return ScaResult(point=z, objective_trace=trace, iterations=0, solves=0, converged=True, iterates=iterates)

    accepted, converged = 0, False
    for solve in range(1, settings.max_iterations + 1):
        if solve > 1:
            problem = build(z)
        solution = solve_convex(to_convex_form(problem), start=z, settings=settings.solver)
        if solution.status == INFEASIBLE:
            logger.warning("SCA surrogate %d infeasible; keeping the previous iterate", solve)
            break
        improvement = trace[-1] - solution.log_objective
        logger.debug("SCA iteration %d: log objective %.9g (improvement %.3g, %s)",
                     solve, solution.log_objective, improvement, solution.status)
        if improvement <= settings.tolerance:
            converged = True
            break
        z = {**z, **solution.point}
        trace.append(solution.log_objective)
        iterates.append(z)
        accepted += 1
    else:
        logger.debug("SCA reached the iteration cap (%d)", settings.max_iterations)
    return ScaResult(point=z, objective_trace=trace, iterations=accepted, solves=solve, converged=converged,
                     iterates=iterates)
