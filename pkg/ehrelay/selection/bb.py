# ehrelay/selection/bb.py
"""Depth-first branch-and-bound over the entries of the selection matrix.

Nodes are pruned with two certified tests, so a full search returns the same
utility as exhaustive enumeration with the same inner solver:

* a Cauchy-Schwarz bound on the exact SNR of every completion, built from the
  relay power budget and the channels of the relays that may still be active;
* an optimistic battery ledger (cheapest consumption, richest harvest) that proves
  a partial assignment infeasible.

The continuous relaxation (selection entries as variables in [0, 1]) orders the
branching. A binary root relaxation ends the search unless
``BbSettings.stop_at_binary_root`` is off, in which case it only seeds the incumbent.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..errors import DomainError, GuardError, InfeasibleStartError
from ..gp import run_sca
from ..model.decision import SelectionMatrix
from ..model.rate import UtilityKind
from ..subproblem import SubproblemFormulation, beta_var, idle_var, power_var, selection_var, with_gamma
from .base import ProblemContext, SelectionResult, make_result

logger = logging.getLogger(__name__)

Cell = Tuple[int, int]


@dataclass
class BbSettings:
    """Branch-and-bound controls.

    Attributes:
        max_cells: Refuse instances with more than this many selection entries.
        use_relaxation: Solve the root relaxation to order the branching.
        relax_every_node: Also solve the relaxation at every inner node to choose
            which child to explore first and to seed incumbents.
        stop_at_binary_root: Return the root relaxation at once when it comes out
            binary and feasible. With ``False`` the tree is still searched and only
            certified pruning ends it.
        tolerance: Relative slack of the pruning test.
    """
    max_cells: int = 24
    use_relaxation: bool = True
    relax_every_node: bool = False
    stop_at_binary_root: bool = True
    tolerance: float = 1e-9


@dataclass
class BbNode:
    fixed: Dict[Cell, int] = field(default_factory=dict)
    bound: float = float('inf')
    depth: int = 0

    def pattern(self, shape: Tuple[int, int]) -> np.ndarray:
        pattern = np.full(shape, np.nan)
        for (l, b), value in self.fixed.items():
            pattern[l, b] = value
        return pattern


def utility_bound(context: ProblemContext, pattern: np.ndarray, kind) -> float:
    """Upper bound on the exact utility of every completion of ``pattern``.

    With ``V`` the summed squared channel of the relays that may be active and ``E``
    the squared sum of ``sqrt(Pr_max |h_1|^2 |h_2|^2 / S)`` over the same relays,
    the SNR at each terminal is at most ``P_other / N0 * E V / (E + V)``.
    """
    kind = UtilityKind.parse(kind)
    params, ch = context.params, context.channels
    maybe = ~(pattern == 0)
    S = ch.received_power(params)
    safe = np.where(S > 0, S, 1.0)
    cross = np.where(S > 0, params.Pr_max * ch.g1 * ch.g2 / safe, 0.0)
    E = np.sum(np.where(maybe, np.sqrt(cross), 0.0), axis=0) ** 2
    rates = np.zeros((params.B, 2))
    for q in (0, 1):
        V = np.sum(np.where(maybe, ch.terminal_gain(1 - q), 0.0), axis=0)
        with np.errstate(invalid='ignore', divide='ignore'):
            harmonic = np.where(E + V > 0, E * V / (E + V), 0.0)
        snr = params.terminal_power(1 - q) / params.N0 * harmonic
        rates[:, q] = params.W * (params.T_c / 2.0) * np.log2(1.0 + snr)
    return float(rates.sum()) if kind is UtilityKind.MAX_SUM else float(rates.min())


def energy_screen(context: ProblemContext, pattern: np.ndarray, tol: float = 1e-9) -> bool:
    """``False`` when no completion of ``pattern`` can keep every battery feasible."""
    params, ch = context.params, context.channels
    half = params.T_c / 2.0
    terminal_rf = params.eta_RF * ch.received_power(params) * half
    renewable = params.eta_RE * context.renewable.phi * params.T_c
    relay_rf = params.eta_RF * ch.grr * half * params.Pr_max
    maybe = ~(pattern == 0)
    L, B = pattern.shape
    for l in range(L):
        ceiling = params.initial_charge[l]
        for b in range(B):
            cheapest = params.a0 * params.T_c + (params.a_r * half if maybe[l, b] else params.a_r * params.T_c)
            if cheapest + params.E_leak > ceiling + tol * max(1.0, abs(ceiling)):
                return False
            richest = terminal_rf[l, b] + renewable[l, b]
            if pattern[l, b] != 1:
                others = maybe[:, b].copy()
                others[l] = False
                richest += float(np.sum(relay_rf[l, others, b]))
            ceiling = min(ceiling + richest, params.Es_max) - cheapest - params.E_leak
    return True


def solve_relaxation(context: ProblemContext, pattern: np.ndarray, kind) -> Optional[np.ndarray]:
    """Continuous relaxation of the free (NaN) entries of ``pattern``.

    Returns ``pattern`` with the free entries replaced by their relaxed values, or
    ``None`` when no feasible starting point is found.
    """
    params = context.params
    formulation = SubproblemFormulation(pattern, context.channels, context.renewable, params, context.mode)
    L, B = pattern.shape
    for beta0 in (0.5, 1.0):
        z0 = {}
        for l in range(L):
            for b in range(B):
                if np.isnan(pattern[l, b]):
                    z0[selection_var(l, b)] = 0.5
                    z0[idle_var(l, b)] = 0.5
                if formulation.candidate(l, b):
                    z0[beta_var(l, b)] = beta0
                    z0[power_var(l, b)] = 1e-3 * params.Pr_max
        if formulation.check_reference(z0) is None:
            break
    else:
        return None
    try:
        if UtilityKind.parse(kind) is UtilityKind.MAX_MIN:
            z0 = with_gamma(formulation, z0)
        sca = run_sca(lambda z: formulation.build(kind, z), context.sca, initial_point=z0)
    except (InfeasibleStartError, DomainError) as exc:
        logger.debug("relaxation skipped: %s", exc)
        return None
    relaxed = pattern.copy()
    for l, b in formulation.free_cells():
        relaxed[l, b] = min(1.0, sca.point[selection_var(l, b)])
    return relaxed


def bb_optimize(context: ProblemContext, kind, settings: Optional[BbSettings] = None) -> SelectionResult:
    """Branch-and-bound search for the best selection matrix.

    Raises:
        GuardError: ``L * B`` exceeds ``settings.max_cells``.
    """
    kind = UtilityKind.parse(kind)
    settings = settings or BbSettings()
    L, B = context.shape
    cells = L * B
    if cells > settings.max_cells:
        raise GuardError(f"branch-and-bound over {cells} cells exceeds the limit of {settings.max_cells}",
                         cells, settings.max_cells)

    order: List[Cell] = [(l, b) for l in range(L) for b in range(B)]
    root = BbNode()
    relaxed = solve_relaxation(context, root.pattern((L, B)), kind) if settings.use_relaxation else None
    if relaxed is not None:
        order.sort(key=lambda c: (abs(relaxed[c] - 0.5), c))

    gp_iterations: List[int] = []
    trace: List[float] = []
    incumbent_sel = SelectionMatrix.zeros(L, B)
    incumbent = context.evaluate(incumbent_sel, kind)
    gp_iterations.append(incumbent.gp_iterations)

    def offer(selection: SelectionMatrix):
        nonlocal incumbent_sel, incumbent
        solution = context.evaluate(selection, kind)
        gp_iterations.append(solution.gp_iterations)
        better = solution.utility > incumbent.utility
        tie = solution.utility == incumbent.utility and selection.to_int() < incumbent_sel.to_int()
        if better or (tie and solution.feasible):
            incumbent_sel, incumbent = selection, solution
        trace.append(incumbent.utility)

    def rounded(values: Optional[np.ndarray]) -> Optional[SelectionMatrix]:
        if values is None or not np.all(np.minimum(values, 1 - values) < 1e-4):
            return None
        return SelectionMatrix(np.round(values).astype(np.int8))

    root_binary = rounded(relaxed)
    if root_binary is not None:
        offer(root_binary)
        if settings.stop_at_binary_root and context.evaluate(root_binary, kind).feasible:
            logger.debug("root relaxation is binary, stopping at the root")
            return make_result(incumbent_sel, incumbent, trace, iterations=1, gp_iterations=gp_iterations,
                               evaluations=context.evaluations, nodes=1)

    stack = [root]
    nodes = 0
    while stack:
        node = stack.pop()
        nodes += 1
        pattern = node.pattern((L, B))
        if not energy_screen(context, pattern):
            continue
        node.bound = utility_bound(context, pattern, kind)
        if incumbent.feasible:
            slack = settings.tolerance * max(1.0, abs(incumbent.utility))
            if node.bound <= incumbent.utility + slack:
                continue
        if node.depth == cells:
            offer(SelectionMatrix(pattern.astype(np.int8)))
            continue

        prefer = 1
        if settings.relax_every_node and node.depth > 0:
            local = solve_relaxation(context, pattern, kind)
            candidate = rounded(local)
            if candidate is not None:
                offer(candidate)
            if local is not None:
                prefer = int(round(local[order[node.depth]]))
        elif relaxed is not None:
            prefer = int(round(relaxed[order[node.depth]]))
        cell = order[node.depth]
        for value in (1 - prefer, prefer):
            stack.append(BbNode({**node.fixed, cell: value}, node.bound, node.depth + 1))

    logger.debug("branch-and-bound visited %d nodes, best %.6g", nodes, incumbent.utility)
    return make_result(incumbent_sel, incumbent, trace or [incumbent.utility], iterations=nodes,
                       gp_iterations=gp_iterations, evaluations=context.evaluations, nodes=nodes)
