from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from ..errors import DomainError
from .channel import ChannelSet
from .decision import ContinuousDecision
from .energy import SelectionLike, _eps_array
from .params import SystemParams


class UtilityKind(str, Enum):
    MAX_SUM = "max-sum"
    MAX_MIN = "max-min"

    @classmethod
    def parse(cls, value: Union[str, 'UtilityKind']) -> 'UtilityKind':
        try:
            return cls(value)
        except ValueError:
            raise DomainError(f"unknown utility {value!r}; expected one of {[k.value for k in cls]}") from None


@dataclass(frozen=True)
class RateResult:
    """Per-slot link quality.

    Attributes:
        snr: ``(B, 2)`` linear SNR at terminal S1 (column 0) and S2 (column 1).
        rate: ``(B, 2)`` bits delivered per slot.
        gain: ``(L, B)`` amplification gains of the relays (0 for idle relays).
    """
    snr: np.ndarray
    rate: np.ndarray
    gain: np.ndarray


def gain_matrix(dec: ContinuousDecision, ch: ChannelSet, params: SystemParams,
                neglect_noise: bool = False, eps: Optional[SelectionLike] = None) -> np.ndarray:
    """Amplification gain ``sqrt(P / (beta S + N0))`` of every relay, ``(L, B)``.

    Entries with ``eps == 0`` are zero and skip the domain check.
    """
    active = np.ones(dec.beta.shape, dtype=bool) if eps is None else _eps_array(eps) != 0
    denom = dec.beta * ch.received_power(params) + (0.0 if neglect_noise else params.N0)
    if np.any(denom[active] <= 0):
        raise DomainError("amplification gain needs a positive denominator (beta * S + N0)")
    gain = np.zeros(dec.beta.shape)
    gain[active] = np.sqrt(dec.p_r[active] / denom[active])
    return gain


def amplification_gain(l: int, b: int, dec: ContinuousDecision, ch: ChannelSet, params: SystemParams,
                       neglect_noise: bool = False) -> float:
    """Gain applied by relay ``l`` in slot ``b``; ``neglect_noise`` drops ``N0`` from the denominator."""
    denom = dec.beta[l, b] * (params.P_1 * ch.g1[l, b] + params.P_2 * ch.g2[l, b])
    if not neglect_noise:
        denom += params.N0
    if denom <= 0:
        raise DomainError(f"amplification gain of relay {l} in slot {b} has denominator {denom}")
    return float(np.sqrt(dec.p_r[l, b] / denom))


def snr_and_rate(eps: SelectionLike, dec: ContinuousDecision, ch: ChannelSet, params: SystemParams,
                 neglect_noise: bool = False) -> RateResult:
    """SNR and rate at both terminals after self-interference cancellation.

    The useful signal at terminal ``q`` is the coherent sum of the relayed signal of
    the opposite terminal; the noise is the terminal noise plus the relay noise
    amplified by every active relay.
    """
    e = _eps_array(eps)
    w = gain_matrix(dec, ch, params, neglect_noise=neglect_noise, eps=e)
    amplitude = np.sum(e * w * np.sqrt(np.clip(dec.beta, 0.0, None)) * np.abs(ch.h1r) * np.abs(ch.h2r), axis=0)
    snr = np.empty((e.shape[1], 2))
    for q in (0, 1):
        other_power = params.terminal_power(1 - q)
        noise = params.N0 * (1.0 + np.sum(e * w ** 2 * ch.terminal_gain(q), axis=0))
        snr[:, q] = other_power * amplitude ** 2 / noise
    rate = params.W * (params.T_c / 2.0) * np.log2(1.0 + snr)
    return RateResult(snr=snr, rate=rate, gain=w)


def utility(rates: Union[RateResult, np.ndarray, list], kind: Union[str, UtilityKind]) -> float:
    """Network utility: total rate (max-sum) or worst slot/terminal rate (max-min)."""
    kind = UtilityKind.parse(kind)
    values = np.asarray(rates.rate if isinstance(rates, RateResult) else rates, dtype=float)
    if values.size == 0:
        return 0.0
    if kind is UtilityKind.MAX_SUM:
        return float(values.sum())
    return float(values.min())
