# ehrelay/selection/base.py
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..gp import ScaSettings
from ..model.channel import ChannelSet, RenewableTrace
from ..model.decision import ContinuousDecision, SelectionMatrix
from ..model.params import SystemParams
from ..model.rate import UtilityKind
from ..subproblem import ContinuousMode, ContinuousSolution, solve_continuous

logger = logging.getLogger(__name__)

OK = "ok"
ALL_INFEASIBLE = "all-infeasible"


@dataclass
class ProblemContext:
    """Everything an outer search needs to score a selection matrix.

    Scores are cached per (utility, selection) so repeated particles or tree leaves
    are solved once.
    """
    channels: ChannelSet
    renewable: RenewableTrace
    params: SystemParams
    sca: ScaSettings = field(default_factory=ScaSettings)
    mode: ContinuousMode = field(default_factory=ContinuousMode)
    _cache: Dict[Tuple[str, int], ContinuousSolution] = field(default_factory=dict, repr=False)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.params.L, self.params.B

    @property
    def evaluations(self) -> int:
        """Number of distinct selections solved so far."""
        return len(self._cache)

    def evaluate(self, selection: SelectionMatrix, kind) -> ContinuousSolution:
        kind = UtilityKind.parse(kind)
        key = (kind.value, selection.to_int())
        if key not in self._cache:
            logger.debug("solving selection %d (%s)", key[1], kind.value)
            self._cache[key] = solve_continuous(selection, self.channels, self.renewable, self.params,
                                                kind, self.sca, self.mode)
        return self._cache[key]


@dataclass
class SelectionResult:
    """Best selection found by an outer search.

    Attributes:
        utility: Exact-gain utility of the best selection, ``-inf`` when nothing
            feasible was found (``status == "all-infeasible"``).
        trace: Best utility after each outer iteration (BPSO iteration, tree leaf or
            enumerated candidate); non-decreasing.
        iterations: Outer iterations performed.
        gp_iterations: SCA iterations of every scored candidate, in scoring order.
        steady_iteration: First outer iteration whose best equals the final best.
        evaluations: Distinct selections solved.
        nodes: Tree nodes visited (branch-and-bound only).
    """
    selection: SelectionMatrix
    decision: ContinuousDecision
    utility: float
    feasible: bool
    trace: List[float] = field(default_factory=list)
    iterations: int = 0
    gp_iterations: List[int] = field(default_factory=list)
    steady_iteration: int = 0
    evaluations: int = 0
    nodes: int = 0
    solution: Optional[ContinuousSolution] = None

    @property
    def status(self) -> str:
        return OK if self.feasible else ALL_INFEASIBLE

    @property
    def gp_iterations_mean(self) -> float:
        return float(np.mean(self.gp_iterations)) if self.gp_iterations else 0.0


def steady_iteration(trace: List[float]) -> int:
    """Index of the first entry of a non-decreasing ``trace`` equal to its last entry."""
    if not trace:
        return 0
    final = trace[-1]
    for i, value in enumerate(trace):
        if value >= final:
            return i
    return len(trace) - 1


def make_result(selection: SelectionMatrix, solution: ContinuousSolution, trace: List[float],
                iterations: int, gp_iterations: List[int], evaluations: int, nodes: int = 0) -> SelectionResult:
    return SelectionResult(
        selection=selection,
        decision=solution.decision,
        utility=solution.utility,
        feasible=solution.feasible,
        trace=list(trace),
        iterations=iterations,
        gp_iterations=list(gp_iterations),
        steady_iteration=steady_iteration(trace),
        evaluations=evaluations,
        nodes=nodes,
        solution=solution,
    )
