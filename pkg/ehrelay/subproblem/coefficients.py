# ehrelay/subproblem/coefficients.py
"""Closed-form coefficients that make energy and SNR expressions affine in the
selection variables and monomial in the continuous ones.

With ``X = eta_RF S T_c / 2`` (RF energy reaching a relay from the terminals):

* harvested ``E^h = -zeta1 beta + zeta2 sum_j P_j |h_lj|^2 + zeta3``
* consumed  ``E^c = theta1 P + theta2``

and the noise-neglected SNR at terminal ``q`` is
``P_qbar (sum_l delta2 sqrt(P_l))^2 / (N0 (1 + sum_l delta1 P_l / beta_l))``.
All coefficients accept fractional selections, giving convex combinations of the
idle and active coefficient sets.
"""
from dataclasses import dataclass

import numpy as np

from ..model.channel import ChannelSet, RenewableTrace
from ..model.energy import SelectionLike, _eps_array
from ..model.params import SystemParams


@dataclass(frozen=True)
class EnergyCoefficients:
    zeta1: np.ndarray
    zeta2: np.ndarray
    zeta3: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray

    def harvested(self, beta: np.ndarray, relay_input: np.ndarray) -> np.ndarray:
        """Harvested energy given ``beta`` and ``sum_j P_j |h_lj|^2`` for every relay."""
        return -self.zeta1 * beta + self.zeta2 * relay_input + self.zeta3

    def consumed(self, p_r: np.ndarray) -> np.ndarray:
        return self.theta1 * p_r + self.theta2


@dataclass(frozen=True)
class SnrCoefficients:
    """``delta1[l, b, q]`` and ``delta2[l, b, q]``; zero for idle relays."""
    delta1: np.ndarray
    delta2: np.ndarray


def energy_coefficients(eps: SelectionLike, ch: ChannelSet, re: RenewableTrace,
                        params: SystemParams) -> EnergyCoefficients:
    e = _eps_array(eps)
    half = params.T_c / 2.0
    terminal_rf = params.eta_RF * ch.received_power(params) * half
    return EnergyCoefficients(
        zeta1=e * terminal_rf,
        zeta2=(1.0 - e) * params.eta_RF * half * np.ones_like(e),
        zeta3=terminal_rf + params.eta_RE * re.phi * params.T_c,
        theta1=e * params.a_t * half,
        theta2=params.a0 * params.T_c + e * params.a_r * half + (1.0 - e) * params.a_r * params.T_c,
    )


def snr_coefficients(eps: SelectionLike, ch: ChannelSet, params: SystemParams) -> SnrCoefficients:
    e = _eps_array(eps)
    S = ch.received_power(params)
    positive = S > 0
    safe = np.where(positive, S, 1.0)
    delta1 = np.zeros(e.shape + (2,))
    delta2 = np.zeros(e.shape + (2,))
    cross = np.abs(ch.h1r) * np.abs(ch.h2r)
    for q in (0, 1):
        delta1[..., q] = np.where(positive, e * ch.terminal_gain(q) / safe, 0.0)
        delta2[..., q] = np.where(positive, e * cross / np.sqrt(safe), 0.0)
    return SnrCoefficients(delta1=delta1, delta2=delta2)
