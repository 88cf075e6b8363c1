# ehrelay/subproblem/solve.py
import logging
from dataclasses import dataclass
from typing import Dict, Mapping, Optional

import numpy as np

from ..errors import InfeasibleStartError
from ..gp import ScaResult, ScaSettings, run_sca
from ..model.channel import ChannelSet, RenewableTrace
from ..model.decision import ContinuousDecision
from ..model.energy import (
    EnergyLedger, SelectionLike, Verdict, _eps_array, check_feasible, consumption_matrix,
    harvest_components, roll_ledger,
)
from ..model.params import SystemParams
from ..model.rate import RateResult, UtilityKind, snr_and_rate, utility
from .builder import ContinuousMode, SubproblemFormulation, beta_var, power_var, with_gamma

logger = logging.getLogger(__name__)

OUTPUT_SNAP = 1e-8
START_POWER_FLOOR = 1e-6  # fraction of Pr_max


@dataclass(frozen=True)
class UtilityReport:
    """Exact-gain utility of a complete solution together with its feasibility verdict."""
    utility: float
    verdict: Verdict
    rates: RateResult
    ledger: EnergyLedger

    @property
    def feasible(self) -> bool:
        return self.verdict.feasible


def true_utility(eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet, re: RenewableTrace,
                 params: SystemParams, kind) -> UtilityReport:
    """Score a solution with the exact amplification gain (noise included).

    Infeasible solutions still get a utility for diagnostics; callers decide how to
    rank them.
    """
    rates = snr_and_rate(eps, dec, ch, params)
    return UtilityReport(
        utility=utility(rates, kind),
        verdict=check_feasible(eps, dec, ch, re, params),
        rates=rates,
        ledger=roll_ledger(eps, dec, ch, re, params),
    )


@dataclass
class ContinuousSolution:
    decision: ContinuousDecision
    report: UtilityReport
    sca: Optional[ScaResult] = None

    @property
    def feasible(self) -> bool:
        return self.report.feasible

    @property
    def utility(self) -> float:
        """Reported utility, ``-inf`` for infeasible solutions."""
        return self.report.utility if self.feasible else float('-inf')

    @property
    def gp_iterations(self) -> int:
        return self.sca.iterations if self.sca is not None else 0


def point_from_decision(dec: ContinuousDecision, eps: SelectionLike, params: SystemParams,
                        mode: ContinuousMode = ContinuousMode()) -> Dict[str, float]:
    """GP variable assignment of the active entries of ``dec``, pushed inside the positive domain."""
    e = _eps_array(eps)
    point = {}
    for l, b in np.argwhere(e == 1):
        if mode.fixed_beta is None:
            point[beta_var(l, b)] = float(np.clip(dec.beta[l, b], START_POWER_FLOOR, 1.0))
        if not mode.fixed_power:
            point[power_var(l, b)] = float(np.clip(dec.p_r[l, b], START_POWER_FLOOR * params.Pr_max, params.Pr_max))
    return point


def decision_from_point(point: Mapping[str, float], eps: SelectionLike, params: SystemParams,
                        mode: ContinuousMode = ContinuousMode()) -> ContinuousDecision:
    """Map a GP assignment back to ``(beta, p_r)``; idle entries are 0, tiny values snap to 0."""
    e = _eps_array(eps)
    beta = np.zeros(e.shape)
    p_r = np.zeros(e.shape)
    for l, b in np.argwhere(e == 1):
        beta[l, b] = mode.fixed_beta if mode.fixed_beta is not None else point[beta_var(l, b)]
        p_r[l, b] = params.Pr_max if mode.fixed_power else point[power_var(l, b)]
    beta = np.clip(beta, 0.0, 1.0)
    p_r = np.clip(p_r, 0.0, params.Pr_max)
    beta[beta < OUTPUT_SNAP] = 0.0
    p_r[p_r < OUTPUT_SNAP] = 0.0
    return ContinuousDecision(beta, p_r)


def _greedy_decision(e: np.ndarray, beta0: float, ch: ChannelSet, re: RenewableTrace,
                     params: SystemParams, mode: ContinuousMode) -> ContinuousDecision:
    """Power each active relay with half of what its battery can afford, slot by slot."""
    L, B = e.shape
    half = params.T_c / 2.0
    beta = np.where(e == 1, beta0, 0.0)
    p_r = np.zeros((L, B))
    stored = params.initial_charge.copy()
    for b in range(B):
        for l in np.flatnonzero(e[:, b]):
            if mode.fixed_power:
                p_r[l, b] = params.Pr_max
                continue
            spare = stored[l] - params.E_leak - params.a0 * params.T_c - params.a_r * half
            affordable = spare / (params.a_t * half) if params.a_t > 0 else params.Pr_max
            p_r[l, b] = np.clip(0.5 * affordable, START_POWER_FLOOR * params.Pr_max, params.Pr_max / 2.0)
        dec = ContinuousDecision(beta, p_r)
        rf, renewable = harvest_components(e, dec, ch, re, params)
        spent = consumption_matrix(e, dec, params)
        stored = stored + rf[:, b] + renewable[:, b] - spent[:, b] - params.E_leak
    return ContinuousDecision(beta, p_r)


def initial_point(eps: SelectionLike, ch: ChannelSet, re: RenewableTrace, params: SystemParams,
                  mode: ContinuousMode = ContinuousMode()) -> Optional[Dict[str, float]]:
    """Feasible starting assignment for SCA, or ``None`` when none of the heuristics works.

    Tries ``beta = 0.5`` first, then ``beta = 1`` (least RF harvest) and ``beta = 0.1``
    (most RF harvest), each with battery-aware greedy powers.
    """
    e = _eps_array(eps)
    candidates = [mode.fixed_beta] if mode.fixed_beta is not None else [0.5, 1.0, 0.1]
    for beta0 in candidates:
        dec = _greedy_decision(e, beta0, ch, re, params, mode)
        if check_feasible(e, dec, ch, re, params):
            return point_from_decision(dec, e, params, mode)
    return None


def solve_continuous(eps: SelectionLike, ch: ChannelSet, re: RenewableTrace, params: SystemParams, kind,
                     settings: Optional[ScaSettings] = None,
                     mode: ContinuousMode = ContinuousMode()) -> ContinuousSolution:
    """Optimize ``beta`` and ``p_r`` for a fixed selection by SCA and score the result exactly.

    Selections without active relays, max-min selections with a silent slot and
    selections without a feasible starting point are scored without running SCA.
    The better (by exact utility) of the starting point and the SCA result is returned.
    """
    kind = UtilityKind.parse(kind)
    settings = settings or ScaSettings()
    e = _eps_array(eps)
    L, B = e.shape

    if not e.any() or params.Pr_max <= 0:
        dec = ContinuousDecision.zeros(L, B)
        return ContinuousSolution(dec, true_utility(e, dec, ch, re, params, kind))

    z0 = settings.initial_point or initial_point(e, ch, re, params, mode)
    if z0 is None:
        dec = _greedy_decision(e, mode.fixed_beta or 0.5, ch, re, params, mode)
        logger.debug("no feasible start for selection %s", e.astype(int).tolist())
        return ContinuousSolution(dec, true_utility(e, dec, ch, re, params, kind))

    start = decision_from_point(z0, e, params, mode)
    start_report = true_utility(e, start, ch, re, params, kind)
    if kind is UtilityKind.MAX_MIN and np.any(e.sum(axis=0) == 0):
        return ContinuousSolution(start, start_report)

    formulation = SubproblemFormulation(e, ch, re, params, mode)
    try:
        if kind is UtilityKind.MAX_MIN:
            z0 = with_gamma(formulation, z0)
        sca = run_sca(lambda z: formulation.build(kind, z), settings, initial_point=z0)
    except InfeasibleStartError as exc:
        logger.debug("SCA refused its start point: %s", exc)
        return ContinuousSolution(start, start_report)

    dec = decision_from_point(sca.point, e, params, mode)
    report = true_utility(e, dec, ch, re, params, kind)
    if start_report.feasible and (not report.feasible or start_report.utility > report.utility):
        if not report.feasible:
            logger.warning("SCA result violates %s; falling back to the start point", report.verdict.violation)
        return ContinuousSolution(start, start_report, sca)
    return ContinuousSolution(dec, report, sca)
