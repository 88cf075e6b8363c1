# ehrelay/subproblem/builder.py
"""GP subproblems of the continuous decision for a given relay-selection pattern.

A pattern is an ``(L, B)`` float array with entries 0 (idle), 1 (active) or NaN
(selection left free as a continuous variable in [0, 1], used by the
branch-and-bound relaxation). Binary patterns give the subproblems solved for a
fixed :class:`~ehrelay.model.SelectionMatrix`.
"""
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from ..errors import DomainError, InfeasibleStartError
from ..gp import GpProblem, Monomial, Posynomial, PosynomialProduct, condense, monomial_sum_square
from ..model.channel import ChannelSet, RenewableTrace
from ..model.decision import SelectionMatrix
from ..model.energy import (
    ENERGY_CONSUMPTION, PEAK_POWER, SPLIT_RATIO, STORAGE_CAPACITY, SelectionLike, Violation,
)
from ..model.params import SystemParams
from ..model.rate import UtilityKind
from .coefficients import snr_coefficients

logger = logging.getLogger(__name__)

VARIABLE_FLOOR = 1e-9
CONSTRAINT_MARGIN = 1e-8
GAMMA_MIN = "gamma_min"
SNR_FLOOR = "snr_floor"
SELECTION_SUM = "selection_sum"


def beta_var(l: int, b: int) -> str:
    return f"beta[{l},{b}]"


def power_var(l: int, b: int) -> str:
    return f"p[{l},{b}]"


def selection_var(l: int, b: int) -> str:
    return f"eps[{l},{b}]"


def idle_var(l: int, b: int) -> str:
    return f"epsbar[{l},{b}]"


@dataclass(frozen=True)
class ContinuousMode:
    """Which continuous decisions are optimized.

    Attributes:
        fixed_beta: Constant power-splitting ratio of every active relay (``1.0``
            turns RF harvesting off at active relays). ``None`` optimizes it.
        fixed_power: Active relays transmit at ``Pr_max``; only ``beta`` is optimized.
    """
    fixed_beta: Optional[float] = None
    fixed_power: bool = False

    def __post_init__(self):
        if self.fixed_beta is not None and not 0.0 < self.fixed_beta <= 1.0:
            raise DomainError(f"fixed beta must lie in (0, 1], got {self.fixed_beta}")


def _pattern(eps) -> np.ndarray:
    if isinstance(eps, SelectionMatrix):
        return eps.eps.astype(float)
    return np.array(eps, dtype=float)


class SubproblemFormulation:
    """Monomial building blocks shared by the max-sum, max-min and relaxed GPs."""

    def __init__(self, pattern, ch: ChannelSet, re: RenewableTrace, params: SystemParams,
                 mode: ContinuousMode = ContinuousMode()):
        self.pattern = _pattern(pattern)
        if self.pattern.shape != (params.L, params.B):
            raise DomainError(f"selection pattern shape {self.pattern.shape} does not match ({params.L}, {params.B})")
        self.params = params
        self.mode = mode
        half = params.T_c / 2.0
        self.terminal_rf = params.eta_RF * ch.received_power(params) * half
        self.renewable = params.eta_RE * re.phi * params.T_c
        self.relay_rf = params.eta_RF * ch.grr * half
        coeffs = snr_coefficients(np.ones(self.pattern.shape), ch, params)
        self.delta1, self.delta2 = coeffs.delta1, coeffs.delta2

        L, B = self.pattern.shape
        self.sel: List[List[Monomial]] = [[None] * B for _ in range(L)]
        self.idle: List[List[Monomial]] = [[None] * B for _ in range(L)]
        self.beta: List[List[Optional[Monomial]]] = [[None] * B for _ in range(L)]
        self.power: List[List[Optional[Monomial]]] = [[None] * B for _ in range(L)]
        for l in range(L):
            for b in range(B):
                state = self.pattern[l, b]
                if np.isnan(state):
                    self.sel[l][b] = Monomial.var(selection_var(l, b))
                    self.idle[l][b] = Monomial.var(idle_var(l, b))
                elif state == 1:
                    self.sel[l][b], self.idle[l][b] = Monomial(1.0), Monomial(0.0)
                elif state == 0:
                    self.sel[l][b], self.idle[l][b] = Monomial(0.0), Monomial(1.0)
                    continue
                else:
                    raise DomainError(f"selection pattern entry {state} is neither 0, 1 nor free")
                self.beta[l][b] = (Monomial(mode.fixed_beta) if mode.fixed_beta is not None
                                   else Monomial.var(beta_var(l, b)))
                self.power[l][b] = (Monomial(params.Pr_max) if mode.fixed_power
                                    else Monomial.var(power_var(l, b)))

    @property
    def shape(self) -> Tuple[int, int]:
        return self.pattern.shape

    def candidate(self, l: int, b: int) -> bool:
        """Whether relay ``l`` may be active in slot ``b``."""
        return self.power[l][b] is not None

    def free_cells(self) -> List[Tuple[int, int]]:
        return [tuple(int(i) for i in ix) for ix in np.argwhere(np.isnan(self.pattern))]

    # -- energy ---------------------------------------------------------------

    def consumption_terms(self, l: int, t: int) -> List[Monomial]:
        """Energy spent in slot ``t`` including leakage."""
        p = self.params
        terms = [Monomial(p.a0 * p.T_c + p.E_leak), self.idle[l][t] * (p.a_r * p.T_c)]
        if self.candidate(l, t):
            terms.append(self.sel[l][t] * (p.a_r * p.T_c / 2.0))
            terms.append(self.sel[l][t] * self.power[l][t] * (p.a_t * p.T_c / 2.0))
        return terms

    def rf_loss_terms(self, l: int, t: int) -> List[Monomial]:
        """Terminal RF energy diverted to the information path in slot ``t``."""
        if not self.candidate(l, t):
            return []
        return [self.sel[l][t] * self.beta[l][t] * self.terminal_rf[l, t]]

    def harvest_terms(self, l: int, t: int) -> List[Monomial]:
        """Harvest in slot ``t`` before subtracting :meth:`rf_loss_terms`."""
        terms = [Monomial(self.terminal_rf[l, t] + self.renewable[l, t])]
        idle = self.idle[l][t]
        if idle.coeff == 0:
            return terms
        for j in range(self.shape[0]):
            if j != l and self.candidate(j, t) and self.relay_rf[l, j, t] > 0:
                terms.append(idle * self.sel[j][t] * self.power[j][t] * self.relay_rf[l, j, t])
        return terms

    def energy_ratios(self, l: int, b: int) -> Dict[str, Tuple[Posynomial, Posynomial]]:
        """Numerator and denominator posynomials of both battery constraints at ``(l, b)``."""
        charge = Monomial(self.params.initial_charge[l])
        spent = [t for s in range(b + 1) for t in self.consumption_terms(l, s)]
        spent_before = [t for s in range(b) for t in self.consumption_terms(l, s)]
        loss = [t for s in range(b + 1) for t in self.rf_loss_terms(l, s)]
        loss_before = [t for s in range(b) for t in self.rf_loss_terms(l, s)]
        income = [t for s in range(b + 1) for t in self.harvest_terms(l, s)]
        income_before = [t for s in range(b) for t in self.harvest_terms(l, s)]
        return {
            ENERGY_CONSUMPTION: (Posynomial.of(spent + loss_before), Posynomial.of([charge] + income_before)),
            STORAGE_CAPACITY: (Posynomial.of([charge] + income),
                               Posynomial.of([Monomial(self.params.Es_max)] + spent_before + loss)),
        }

    # -- SNR --------------------------------------------------------------------

    def snr_parts(self, b: int, q: int) -> Tuple[Posynomial, Optional[Posynomial]]:
        """``(f, s)`` with noise-neglected SNR ``s / (N0 f)`` at terminal ``q`` in slot ``b``.

        ``s`` is ``None`` when no relay can be active in the slot.
        """
        L = self.shape[0]
        f_terms = [Monomial(1.0)]
        coeffs, amplitudes = [], []
        for l in range(L):
            if not self.candidate(l, b):
                continue
            sel, beta, power = self.sel[l][b], self.beta[l][b], self.power[l][b]
            if self.delta1[l, b, q] > 0:
                f_terms.append(sel * power * beta ** -1 * self.delta1[l, b, q])
            coeffs.append(np.sqrt(self.params.terminal_power(1 - q)) * self.delta2[l, b, q])
            amplitudes.append(sel * power ** 0.5)
        s = monomial_sum_square(coeffs, amplitudes) if coeffs else None
        if s is not None and s.is_constant and s.terms[0].coeff == 0:
            s = None
        return Posynomial.of(f_terms), s

    def noise_neglected_snr(self, z: Mapping[str, float]) -> np.ndarray:
        B = self.shape[1]
        out = np.zeros((B, 2))
        for b in range(B):
            for q in (0, 1):
                f, s = self.snr_parts(b, q)
                if s is not None:
                    out[b, q] = s.evaluate(z) / (self.params.N0 * f.evaluate(z))
        return out

    # -- problem assembly ---------------------------------------------------------

    def variables(self) -> List[str]:
        names = []
        L, B = self.shape
        for l in range(L):
            for b in range(B):
                if np.isnan(self.pattern[l, b]):
                    names += [selection_var(l, b), idle_var(l, b)]
                if self.candidate(l, b):
                    if self.mode.fixed_beta is None:
                        names.append(beta_var(l, b))
                    if not self.mode.fixed_power:
                        names.append(power_var(l, b))
        return names

    def check_reference(self, z: Mapping[str, float], tol: float = 1e-9) -> Optional[Violation]:
        """First true (unapproximated) constraint violated at ``z``, if any."""
        L, B = self.shape
        for l in range(L):
            for b in range(B):
                if not self.candidate(l, b):
                    continue
                beta, power = self.beta[l][b].evaluate(z), self.power[l][b].evaluate(z)
                if beta > 1.0 + tol:
                    return Violation(SPLIT_RATIO, l, b, beta - 1.0)
                if power > self.params.Pr_max * (1.0 + tol):
                    return Violation(PEAK_POWER, l, b, power - self.params.Pr_max)
                if np.isnan(self.pattern[l, b]):
                    total = z[selection_var(l, b)] + z[idle_var(l, b)]
                    if abs(total - 1.0) > 1e-6:
                        return Violation(SELECTION_SUM, l, b, total - 1.0)
        for b in range(B):
            for l in range(L):
                for name, (num, den) in self.energy_ratios(l, b).items():
                    n, d = num.evaluate(z), den.evaluate(z)
                    if n > d + tol * max(1.0, abs(d)):
                        return Violation(name, l, b, n - d)
        return None

    def constraints(self, z_ref: Mapping[str, float]) -> Tuple[List[Posynomial], List[str], List[Monomial]]:
        """Condensed battery constraints, box constraints and variable floors."""
        violation = self.check_reference(z_ref)
        if violation is not None:
            raise InfeasibleStartError(violation)

        L, B = self.shape
        scale = 1.0 + CONSTRAINT_MARGIN
        ineq, labels = [], []
        for l in range(L):
            for b in range(B):
                for name, (num, den) in self.energy_ratios(l, b).items():
                    if num.is_constant and den.is_constant:
                        continue
                    ineq.append(num * scale / condense(den, z_ref))
                    labels.append(f"{name}[{l},{b}]")
        for l in range(L):
            for b in range(B):
                if not self.candidate(l, b):
                    continue
                if not self.mode.fixed_power:
                    ineq.append(Posynomial((self.power[l][b] / self.params.Pr_max,)))
                    labels.append(f"{PEAK_POWER}[{l},{b}]")
                if self.mode.fixed_beta is None:
                    ineq.append(Posynomial((self.beta[l][b],)))
                    labels.append(f"{SPLIT_RATIO}[{l},{b}]")
                if np.isnan(self.pattern[l, b]):
                    both = Posynomial((self.sel[l][b], self.idle[l][b]))
                    ineq.append(both)
                    labels.append(f"{SELECTION_SUM}[{l},{b}]")
                    ineq.append(Posynomial((condense(both, z_ref) ** -1,)))
                    labels.append(f"{SELECTION_SUM}_floor[{l},{b}]")
        bounds = [Monomial(VARIABLE_FLOOR, {name: -1.0}) for name in self.variables()]
        return ineq, labels, bounds

    def max_sum_objective(self, z_ref: Mapping[str, float]) -> PosynomialProduct:
        factors = []
        B = self.shape[1]
        for b in range(B):
            for q in (0, 1):
                f, s = self.snr_parts(b, q)
                if s is None:
                    continue
                g = Posynomial.of(list(f.terms) + list((s / self.params.N0).terms))
                factors.append(f / condense(g, z_ref))
        return PosynomialProduct(tuple(factors))

    def max_min_constraints(self, z_ref: Mapping[str, float]) -> Tuple[List[Posynomial], List[str]]:
        ineq, labels = [], []
        B = self.shape[1]
        gamma = Monomial.var(GAMMA_MIN)
        for b in range(B):
            for q in (0, 1):
                f, s = self.snr_parts(b, q)
                if s is None:
                    raise InfeasibleStartError(Violation(SNR_FLOOR, slot=b, excess=float('inf')))
                ineq.append(f * gamma * (self.params.N0 * (1.0 + CONSTRAINT_MARGIN)) / condense(s, z_ref))
                labels.append(f"{SNR_FLOOR}[{b},{q}]")
        return ineq, labels

    def build(self, kind, z_ref: Mapping[str, float]) -> GpProblem:
        kind = UtilityKind.parse(kind)
        ineq, labels, bounds = self.constraints(z_ref)
        logger.debug("%s subproblem: %d variables, %d battery and box constraints",
                     kind.value, len(self.variables()), len(ineq))
        if kind is UtilityKind.MAX_SUM:
            return GpProblem(self.max_sum_objective(z_ref), ineq, [], bounds, labels)

        z_ref = with_gamma(self, z_ref)
        snr_ineq, snr_labels = self.max_min_constraints(z_ref)
        for label, c in zip(snr_labels, snr_ineq):
            if c.evaluate(z_ref) > 1.0 + 1e-6:
                raise InfeasibleStartError(Violation(SNR_FLOOR, excess=c.evaluate(z_ref) - 1.0))
        bounds.append(Monomial(VARIABLE_FLOOR, {GAMMA_MIN: -1.0}))
        return GpProblem(Monomial(1.0, {GAMMA_MIN: -1.0}), snr_ineq + ineq, [], bounds, snr_labels + labels)


def with_gamma(formulation: SubproblemFormulation, z: Mapping[str, float]) -> Dict[str, float]:
    """``z`` with ``gamma_min`` set to the worst noise-neglected SNR when absent."""
    z = dict(z)
    if GAMMA_MIN not in z:
        worst = float(np.min(formulation.noise_neglected_snr(z)))
        if not worst > 0:
            raise InfeasibleStartError(Violation(SNR_FLOOR, excess=float('inf')))
        z[GAMMA_MIN] = worst
    return z


def build_max_sum(eps: SelectionLike, ch: ChannelSet, re: RenewableTrace, params: SystemParams,
                  z_ref: Mapping[str, float], mode: ContinuousMode = ContinuousMode()) -> GpProblem:
    """Condensed max-sum subproblem around ``z_ref`` for a fixed selection.

    The objective is the product over slots and terminals of ``1 / (1 + SNR)`` with
    the noise-neglected gain; minimizing it maximizes the sum rate.
    """
    return SubproblemFormulation(eps, ch, re, params, mode).build("max-sum", z_ref)


def build_max_min(eps: SelectionLike, ch: ChannelSet, re: RenewableTrace, params: SystemParams,
                  z_ref: Mapping[str, float], mode: ContinuousMode = ContinuousMode()) -> GpProblem:
    """Condensed max-min subproblem around ``z_ref``: maximize ``gamma_min`` below every SNR."""
    return SubproblemFormulation(eps, ch, re, params, mode).build("max-min", z_ref)


def build_relaxation(pattern: np.ndarray, ch: ChannelSet, re: RenewableTrace, params: SystemParams,
                     z_ref: Mapping[str, float], kind, mode: ContinuousMode = ContinuousMode()) -> GpProblem:
    """Subproblem with NaN entries of ``pattern`` relaxed to selection variables in [0, 1]."""
    return SubproblemFormulation(pattern, ch, re, params, mode).build(kind, z_ref)
