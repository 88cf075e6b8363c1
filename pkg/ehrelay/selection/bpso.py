# ehrelay/selection/bpso.py
"""Binary particle swarm search over relay-selection matrices."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.special import expit

from ..errors import DomainError
from ..model.decision import SelectionMatrix
from ..model.rate import UtilityKind
from .base import ProblemContext, SelectionResult, make_result

logger = logging.getLogger(__name__)


@dataclass
class BpsoSettings:
    """Swarm parameters.

    Attributes:
        particle_count: Number of particles ``T``.
        max_iterations: Number of velocity/position updates ``I``.
        inertia_start, inertia_end: Inertia weight falls linearly between these over
            the run.
        velocity_clamp: Velocities are clipped to ``[-clamp, clamp]``.
        stall_window: Stop after this many iterations without a better global best;
            ``None`` disables early stopping.
        seed: Seed of the swarm's random generator.
    """
    particle_count: int = 10
    max_iterations: int = 100
    inertia_start: float = 0.9
    inertia_end: float = 0.2
    velocity_clamp: float = 6.0
    stall_window: Optional[int] = 15
    seed: Optional[int] = None

    def __post_init__(self):
        if self.particle_count < 1 or self.max_iterations < 1:
            raise DomainError("BPSO needs at least one particle and one iteration")
        if not (0.0 <= self.inertia_end <= 1.0 and 0.0 <= self.inertia_start <= 1.0):
            raise DomainError("inertia weights must lie in [0, 1]")

    def inertia(self, iteration: int) -> float:
        """Inertia weight of update ``iteration`` (1-based)."""
        step = (self.inertia_start - self.inertia_end) / self.max_iterations
        return self.inertia_start - iteration * step


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    local_best: np.ndarray
    local_utility: np.ndarray
    global_best: np.ndarray
    global_utility: float
    history: List[float] = field(default_factory=list)


def sigmoid(x):
    """Logistic function mapping a velocity to a bit-flip probability."""
    return expit(x)


def _initial_positions(rng: np.random.Generator, T: int, L: int, B: int) -> np.ndarray:
    positions = rng.integers(0, 2, size=(T, L, B), dtype=np.int8)
    positions[0] = 1
    if T > 1:
        positions[1] = 0
    return positions


def bpso_optimize(context: ProblemContext, kind, settings: Optional[BpsoSettings] = None) -> SelectionResult:
    """Search selection matrices with a binary particle swarm.

    Each particle is scored by solving its continuous subproblem and evaluating the
    exact utility; infeasible particles score ``-inf`` but keep moving. The all-ones
    and all-zeros matrices are part of the initial swarm (the all-zeros matrix is
    scored separately for single-particle swarms).
    """
    kind = UtilityKind.parse(kind)
    settings = settings or BpsoSettings()
    rng = np.random.default_rng(settings.seed)
    L, B = context.shape
    T = settings.particle_count
    gp_iterations: List[int] = []

    def score(position: np.ndarray):
        solution = context.evaluate(SelectionMatrix(position), kind)
        gp_iterations.append(solution.gp_iterations)
        return solution.utility

    positions = _initial_positions(rng, T, L, B)
    utilities = np.array([score(p) for p in positions])
    best = int(np.argmax(utilities))
    state = SwarmState(
        positions=positions,
        velocities=np.zeros((T, L, B)),
        local_best=positions.copy(),
        local_utility=utilities.copy(),
        global_best=positions[best].copy(),
        global_utility=float(utilities[best]),
    )
    if T == 1:
        zeros = np.zeros((L, B), dtype=np.int8)
        fallback = score(zeros)
        if fallback > state.global_utility:
            state.global_best, state.global_utility = zeros, fallback
    state.history.append(state.global_utility)

    stall, iteration = 0, 0
    for iteration in range(1, settings.max_iterations + 1):
        omega = settings.inertia(iteration)
        psi1, psi2 = rng.uniform(0.0, 2.0, size=2)
        state.velocities = (omega * state.velocities
                            + psi1 * (state.local_best - state.positions)
                            + psi2 * (state.global_best[None] - state.positions))
        np.clip(state.velocities, -settings.velocity_clamp, settings.velocity_clamp, out=state.velocities)
        flips = rng.random(state.positions.shape)
        state.positions = (flips < sigmoid(state.velocities)).astype(np.int8)

        improved = False
        for k in range(T):
            value = score(state.positions[k])
            if value > state.local_utility[k]:
                state.local_utility[k] = value
                state.local_best[k] = state.positions[k]
            if value > state.global_utility:
                state.global_utility = value
                state.global_best = state.positions[k].copy()
                improved = True
        state.history.append(state.global_utility)
        logger.debug("BPSO iteration %d: inertia %.3f, best %.6g", iteration, omega, state.global_utility)

        stall = 0 if improved else stall + 1
        if settings.stall_window is not None and stall >= settings.stall_window:
            logger.debug("BPSO stalled for %d iterations; stopping", stall)
            break

    selection = SelectionMatrix(state.global_best)
    solution = context.evaluate(selection, kind)
    if not solution.feasible:
        logger.warning("BPSO found no feasible selection")
    return make_result(selection, solution, state.history, iterations=iteration,
                       gp_iterations=gp_iterations, evaluations=context.evaluations)
