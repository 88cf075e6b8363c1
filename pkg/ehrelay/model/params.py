# ehrelay/model/params.py
from dataclasses import dataclass, replace
from typing import Optional, Tuple

import numpy as np

from ..errors import ConfigError
from ..utils.units import dbm_to_watt

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SystemParams:
    """Physical and protocol constants of the two-way relay network, SI units.

    Defaults reproduce the reference scenario: 3 relays, 8 slots of 175 ms,
    2 MHz bandwidth at 2.45 GHz, 0 dBm terminals and relay budget, -141 dBm noise.

    Attributes:
        L: Number of relays.
        B: Number of time slots.
        T_c: Slot length (s). Each slot splits evenly into a multiple-access and
            a broadcast phase.
        W: Bandwidth (Hz).
        f: Carrier frequency (Hz).
        C: Speed of light (m/s).
        P_1, P_2: Terminal transmit powers (W).
        Pr_max: Per-relay transmit power budget (W).
        Es_max: Battery capacity of every relay (J).
        E_leak: Battery leakage per slot (J).
        a0: Relay circuit offset power (W).
        a_t: Transmit power scale of the relay power amplifier.
        a_r: Relay receive-chain power (W).
        eta_RF, eta_RE: RF and renewable conversion efficiencies.
        N0: Noise variance at the terminals (W).
        nu: Path-loss exponent.
        PL_LoS: Additional path loss (dB).
        rician_K: Rician K-factor (dB); ``inf`` gives a pure line-of-sight channel.
        D: Distance between the terminals (m).
        B_init: Initial battery charge per relay (J). ``None`` means half of ``Es_max``.
        re_mean, re_var: Mean (W) and variance of the untruncated renewable power.
        re_low, re_high: Truncation interval of the renewable power (W).
    """
    L: int = 3
    B: int = 8
    T_c: float = 0.175
    W: float = 2e6
    f: float = 2.45e9
    C: float = SPEED_OF_LIGHT
    P_1: float = 1e-3
    P_2: float = 1e-3
    Pr_max: float = 1e-3
    Es_max: float = 5.0
    E_leak: float = 0.01
    a0: float = 1.2
    a_t: float = 4e-3
    a_r: float = 1.2e-3
    eta_RF: float = 0.4
    eta_RE: float = 0.3
    N0: float = float(dbm_to_watt(-141.0))
    nu: float = 2.0
    PL_LoS: float = 0.0
    rician_K: float = 7.78
    D: float = 50.0
    B_init: Optional[Tuple[float, ...]] = None
    re_mean: float = 2.0
    re_var: float = 0.25
    re_low: float = 0.0
    re_high: float = 2.4

    def __post_init__(self):
        if int(self.L) != self.L or self.L < 1:
            raise ConfigError(f"relay count must be a positive integer, got {self.L}")
        if int(self.B) != self.B or self.B < 1:
            raise ConfigError(f"slot count must be a positive integer, got {self.B}")
        if self.T_c <= 0 or self.W <= 0:
            raise ConfigError("slot length and bandwidth must be positive")
        if self.f <= 0 or self.C <= 0 or self.D <= 0:
            raise ConfigError("carrier frequency, speed of light and terminal distance must be positive")
        for name in ('P_1', 'P_2', 'Pr_max', 'Es_max', 'E_leak', 'a0', 'a_t', 'a_r', 'N0', 're_var'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative, got {getattr(self, name)}")
        for name in ('eta_RF', 'eta_RE'):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {getattr(self, name)}")

        if self.B_init is None:
            charge = (self.Es_max / 2.0,) * int(self.L)
        else:
            charge = tuple(float(x) for x in np.broadcast_to(np.asarray(self.B_init, dtype=float), (int(self.L),)))
        if any(x < 0 for x in charge):
            raise ConfigError("initial battery charge must be nonnegative")
        object.__setattr__(self, 'B_init', charge)
        object.__setattr__(self, 'L', int(self.L))
        object.__setattr__(self, 'B', int(self.B))

    @property
    def initial_charge(self) -> np.ndarray:
        """``B_init`` as a float array of length ``L``."""
        return np.asarray(self.B_init, dtype=float)

    @property
    def cells(self) -> int:
        """Number of entries of a selection matrix (``L * B``)."""
        return self.L * self.B

    def terminal_power(self, q: int) -> float:
        """Transmit power of terminal ``q`` (0 or 1)."""
        return self.P_1 if q == 0 else self.P_2

    def with_updates(self, **changes) -> 'SystemParams':
        """Copy with some fields replaced; ``B_init`` resets to its default when ``L`` changes."""
        if 'L' in changes and 'B_init' not in changes and changes['L'] != self.L:
            changes['B_init'] = None
        return replace(self, **changes)
