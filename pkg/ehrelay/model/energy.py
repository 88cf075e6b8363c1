# ehrelay/model/energy.py
"""Harvest-store-use energy bookkeeping of the relays and the feasibility check
of a complete candidate solution."""
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .channel import ChannelSet, RenewableTrace
from .decision import ContinuousDecision, SelectionMatrix
from .params import SystemParams

SelectionLike = Union[SelectionMatrix, np.ndarray]

ENERGY_CONSUMPTION = "energy_consumption"
STORAGE_CAPACITY = "storage_capacity"
PEAK_POWER = "peak_power"
SPLIT_RATIO = "split_ratio"
SELECTION_BINARY = "selection_binary"


def _eps_array(eps: SelectionLike) -> np.ndarray:
    if isinstance(eps, SelectionMatrix):
        return eps.eps.astype(float)
    return np.asarray(eps, dtype=float)


@dataclass(frozen=True)
class Violation:
    """First violated constraint found by :func:`check_feasible`.

    ``excess`` is how far the left-hand side exceeds its bound (J, W or unitless).
    """
    constraint: str
    relay: Optional[int] = None
    slot: Optional[int] = None
    excess: float = 0.0

    def __str__(self):
        where = []
        if self.relay is not None:
            where.append(f"relay {self.relay}")
        if self.slot is not None:
            where.append(f"slot {self.slot}")
        location = f" at {', '.join(where)}" if where else ""
        return f"{self.constraint}{location} (excess {self.excess:.3g})"


@dataclass(frozen=True)
class Verdict:
    violation: Optional[Violation] = None

    @property
    def feasible(self) -> bool:
        return self.violation is None

    def __bool__(self):
        return self.feasible


FEASIBLE = Verdict()


@dataclass(frozen=True)
class EnergyLedger:
    """Per-relay energy flows (J).

    ``stored`` has ``B + 1`` columns; column 0 holds the initial charge. The RF and
    renewable parts of ``harvested`` are kept separately for reporting.
    """
    harvested: np.ndarray
    consumed: np.ndarray
    stored: np.ndarray
    harvested_rf: np.ndarray
    harvested_re: np.ndarray

    @property
    def rf_total(self) -> float:
        return float(self.harvested_rf.sum())

    @property
    def re_total(self) -> float:
        return float(self.harvested_re.sum())


def harvest_components(eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet,
                       re: RenewableTrace, params: SystemParams) -> Tuple[np.ndarray, np.ndarray]:
    """RF and renewable harvested energy of every relay and slot, each ``(L, B)``.

    A selected relay keeps ``1 - beta`` of the terminal signal for harvesting; an idle
    relay harvests all of it plus the broadcast of the selected relays.
    """
    e = _eps_array(eps)
    half = params.T_c / 2.0
    from_terminals = params.eta_RF * ch.received_power(params) * half
    from_relays = params.eta_RF * np.einsum('ljb,jb->lb', ch.grr, e * dec.p_r) * half
    rf = e * (1.0 - dec.beta) * from_terminals + (1.0 - e) * (from_terminals + from_relays)
    renewable = params.eta_RE * re.phi * params.T_c
    return rf, renewable


def consumption_matrix(eps: SelectionLike, dec: ContinuousDecision, params: SystemParams) -> np.ndarray:
    e = _eps_array(eps)
    half = params.T_c / 2.0
    return params.a0 * params.T_c + e * (params.a_r + params.a_t * dec.p_r) * half + (1.0 - e) * params.a_r * params.T_c


def harvested_energy(l: int, b: int, eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet,
                     re: RenewableTrace, params: SystemParams) -> float:
    """Energy (J) harvested by relay ``l`` during slot ``b``."""
    rf, renewable = harvest_components(eps, dec, ch, re, params)
    return float(rf[l, b] + renewable[l, b])


def consumed_energy(l: int, b: int, eps: SelectionLike, dec: ContinuousDecision, params: SystemParams) -> float:
    """Energy (J) spent by relay ``l`` during slot ``b``."""
    return float(consumption_matrix(eps, dec, params)[l, b])


def roll_ledger(eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet,
                re: RenewableTrace, params: SystemParams) -> EnergyLedger:
    """Run the battery recurrence from ``B_init`` without clamping."""
    rf, renewable = harvest_components(eps, dec, ch, re, params)
    harvested = rf + renewable
    consumed = consumption_matrix(eps, dec, params)
    L, B = harvested.shape
    stored = np.empty((L, B + 1))
    stored[:, 0] = params.initial_charge
    for b in range(B):
        stored[:, b + 1] = stored[:, b] + harvested[:, b] - consumed[:, b] - params.E_leak
    return EnergyLedger(harvested=harvested, consumed=consumed, stored=stored,
                        harvested_rf=rf, harvested_re=renewable)


def _first_breach(excess: np.ndarray, constraint: str) -> Optional[Violation]:
    """First ``(l, b)`` in slot-major order with positive ``excess``."""
    breach = np.argwhere(excess.T > 0)
    if breach.size == 0:
        return None
    b, l = breach[0]
    return Violation(constraint, relay=int(l), slot=int(b), excess=float(excess[l, b]))


def check_feasible(eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet, re: RenewableTrace,
                   params: SystemParams, tol: float = 1e-9) -> Verdict:
    """Check a candidate solution against every constraint of the problem.

    Box constraints (selection binary, split ratio in [0, 1], power in [0, Pr_max]) are
    checked first, then the battery constraints slot by slot: a relay must hold enough
    energy to cover its consumption and leakage, and the battery may not overflow when
    the harvest of the slot arrives.

    Args:
        tol: Absolute slack, scaled by the bound when the bound exceeds 1.

    Returns:
        ``Verdict`` whose ``violation`` names the first violated constraint, or ``None``.
    """
    e = _eps_array(eps)

    def slack(bound):
        return tol * np.maximum(1.0, np.abs(bound))

    excess = np.where((e == 0) | (e == 1), 0.0, np.minimum(np.abs(e), np.abs(1 - e)))
    violation = _first_breach(excess, SELECTION_BINARY)
    if violation is None:
        beta = dec.beta
        excess = np.maximum(-beta - tol, beta - 1.0 - tol)
        violation = _first_breach(excess, SPLIT_RATIO)
    if violation is None:
        p = dec.p_r
        excess = np.maximum(-p - tol * params.Pr_max, p - params.Pr_max * (1.0 + tol))
        violation = _first_breach(excess, PEAK_POWER)
    if violation is not None:
        return Verdict(violation)

    ledger = roll_ledger(e, dec, ch, re, params)
    before = ledger.stored[:, :-1]
    L, B = e.shape
    for b in range(B):
        for l in range(L):
            need = ledger.consumed[l, b] + params.E_leak
            if need > before[l, b] + slack(before[l, b]):
                return Verdict(Violation(ENERGY_CONSUMPTION, l, b, float(need - before[l, b])))
            fill = before[l, b] + ledger.harvested[l, b]
            if fill > params.Es_max + slack(params.Es_max):
                return Verdict(Violation(STORAGE_CAPACITY, l, b, float(fill - params.Es_max)))
    return FEASIBLE
