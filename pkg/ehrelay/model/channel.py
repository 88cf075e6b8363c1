# ehrelay/model/channel.py
from dataclasses import dataclass

import numpy as np
from scipy import stats

from ..errors import ConfigError
from ..utils.units import db_to_linear
from .geometry import Geometry, path_loss_db
from .params import SystemParams


def _frozen(arr, dtype) -> np.ndarray:
    out = np.array(arr, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChannelSet:
    """Complex channel gains, constant within a slot.

    Attributes:
        h1r: ``(L, B)`` gains between terminal S1 and each relay.
        h2r: ``(L, B)`` gains between terminal S2 and each relay.
        hrr: ``(L, L, B)`` relay-to-relay gains, reciprocal, diagonal zero.
    """
    h1r: np.ndarray
    h2r: np.ndarray
    hrr: np.ndarray

    def __post_init__(self):
        h1r = _frozen(self.h1r, complex)
        h2r = _frozen(self.h2r, complex)
        hrr = _frozen(self.hrr, complex)
        if h1r.shape != h2r.shape or h1r.ndim != 2:
            raise ConfigError(f"terminal gains must share an (L, B) shape, got {h1r.shape} and {h2r.shape}")
        L, B = h1r.shape
        if hrr.shape != (L, L, B):
            raise ConfigError(f"relay gains must have shape {(L, L, B)}, got {hrr.shape}")
        if not (np.all(np.isfinite(h1r)) and np.all(np.isfinite(h2r)) and np.all(np.isfinite(hrr))):
            raise ConfigError("channel gains must be finite")
        object.__setattr__(self, 'h1r', h1r)
        object.__setattr__(self, 'h2r', h2r)
        object.__setattr__(self, 'hrr', hrr)

    @property
    def shape(self):
        return self.h1r.shape

    @property
    def g1(self) -> np.ndarray:
        """``|h1r|^2``."""
        return np.abs(self.h1r) ** 2

    @property
    def g2(self) -> np.ndarray:
        """``|h2r|^2``."""
        return np.abs(self.h2r) ** 2

    @property
    def grr(self) -> np.ndarray:
        """``|hrr|^2`` with a zero diagonal."""
        g = np.abs(self.hrr) ** 2
        idx = np.arange(g.shape[0])
        g[idx, idx, :] = 0.0
        return g

    def terminal_gain(self, q: int) -> np.ndarray:
        """``|h_q|^2`` for terminal ``q`` (0 or 1)."""
        return self.g1 if q == 0 else self.g2

    def received_power(self, params: SystemParams) -> np.ndarray:
        """Total RF power ``P_1 |h1r|^2 + P_2 |h2r|^2`` reaching each relay, ``(L, B)``."""
        return params.P_1 * self.g1 + params.P_2 * self.g2


@dataclass(frozen=True)
class RenewableTrace:
    """Renewable power ``phi`` available at each relay and slot, ``(L, B)`` in W."""
    phi: np.ndarray

    def __post_init__(self):
        phi = _frozen(self.phi, float)
        if phi.ndim != 2 or np.any(phi < 0) or not np.all(np.isfinite(phi)):
            raise ConfigError("renewable trace must be a finite nonnegative (L, B) array")
        object.__setattr__(self, 'phi', phi)


def _rician(rng: np.random.Generator, k_db: float, size) -> np.ndarray:
    """Unit mean power Rician fading with a uniformly random line-of-sight phase."""
    los_phase = rng.uniform(0.0, 2.0 * np.pi, size)
    scatter = (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / np.sqrt(2.0)
    if np.isposinf(k_db):
        return np.exp(1j * los_phase)
    k = db_to_linear(k_db)
    return np.sqrt(k / (k + 1.0)) * np.exp(1j * los_phase) + np.sqrt(1.0 / (k + 1.0)) * scatter


def sample_channels(params: SystemParams, geom: Geometry, seed=None) -> ChannelSet:
    """Draw Rician fading gains scaled by the path loss of every link.

    Every link and slot is independent; the relay-to-relay matrix is reciprocal.
    Draws happen in a fixed order so a seed fully determines the result.
    """
    rng = np.random.default_rng(seed)
    L, B = params.L, params.B
    if geom.relay_count != L:
        raise ConfigError(f"geometry holds {geom.relay_count} relays, parameters expect {L}")

    def attenuation(distance):
        return 1.0 / np.sqrt(db_to_linear(path_loss_db(distance, params)))

    d1 = np.array([geom.distance("S1", l) for l in range(L)])
    d2 = np.array([geom.distance("S2", l) for l in range(L)])
    h1r = _rician(rng, params.rician_K, (L, B)) * attenuation(d1)[:, None]
    h2r = _rician(rng, params.rician_K, (L, B)) * attenuation(d2)[:, None]

    hrr = np.zeros((L, L, B), dtype=complex)
    fading = _rician(rng, params.rician_K, (L, L, B))
    for l in range(L):
        for j in range(l + 1, L):
            link = fading[l, j] * attenuation(geom.distance(l, j))
            hrr[l, j] = link
            hrr[j, l] = link
    return ChannelSet(h1r=h1r, h2r=h2r, hrr=hrr)


def sample_renewable(params: SystemParams, seed=None) -> RenewableTrace:
    """I.i.d. truncated-normal renewable power draws for every relay and slot."""
    lo, hi = params.re_low, params.re_high
    if lo < 0:
        raise ConfigError(f"renewable truncation interval must start at or above 0, got {lo}")
    if hi <= lo:
        raise ConfigError(f"renewable truncation interval is empty: [{lo}, {hi}]")
    shape = (params.L, params.B)
    if params.re_var == 0:
        return RenewableTrace(phi=np.full(shape, float(np.clip(params.re_mean, lo, hi))))

    rng = np.random.default_rng(seed)
    sigma = np.sqrt(params.re_var)
    a, b = (lo - params.re_mean) / sigma, (hi - params.re_mean) / sigma
    phi = stats.truncnorm.rvs(a, b, loc=params.re_mean, scale=sigma, size=shape, random_state=rng)
    return RenewableTrace(phi=np.clip(phi, lo, hi))
