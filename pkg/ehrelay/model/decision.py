from dataclasses import dataclass
from typing import List

import numpy as np

from ..errors import DomainError


@dataclass(frozen=True)
class SelectionMatrix:
    """Binary relay activation ``eps[l, b]`` (1 when relay ``l`` forwards in slot ``b``)."""
    eps: np.ndarray

    def __post_init__(self):
        eps = np.array(self.eps)
        if eps.ndim != 2:
            raise DomainError(f"selection matrix must be 2-D, got shape {eps.shape}")
        if not np.all((eps == 0) | (eps == 1)):
            raise DomainError("selection matrix entries must be 0 or 1")
        eps = eps.astype(np.int8)
        eps.setflags(write=False)
        object.__setattr__(self, 'eps', eps)

    @property
    def shape(self):
        return self.eps.shape

    def selected(self, b: int) -> List[int]:
        """Relays active in slot ``b``."""
        return [int(l) for l in np.flatnonzero(self.eps[:, b])]

    def silent_slots(self) -> List[int]:
        """Slots in which no relay is active."""
        return [int(b) for b in np.flatnonzero(self.eps.sum(axis=0) == 0)]

    def to_int(self) -> int:
        """Row-major binary encoding; entry ``(0, 0)`` is the most significant bit."""
        code = 0
        for bit in self.eps.ravel():
            code = (code << 1) | int(bit)
        return code

    @classmethod
    def from_int(cls, code: int, L: int, B: int) -> 'SelectionMatrix':
        n = L * B
        if not 0 <= code < (1 << n):
            raise DomainError(f"code {code} does not fit a {L}x{B} selection matrix")
        bits = [(code >> (n - 1 - k)) & 1 for k in range(n)]
        return cls(np.array(bits, dtype=np.int8).reshape(L, B))

    @classmethod
    def zeros(cls, L: int, B: int) -> 'SelectionMatrix':
        return cls(np.zeros((L, B), dtype=np.int8))

    @classmethod
    def ones(cls, L: int, B: int) -> 'SelectionMatrix':
        return cls(np.ones((L, B), dtype=np.int8))


@dataclass(frozen=True)
class ContinuousDecision:
    """Power-splitting ratios ``beta`` and relay transmit powers ``p_r`` (W), each ``(L, B)``.

    Box bounds are not enforced here; :func:`ehrelay.model.check_feasible` reports them.
    """
    beta: np.ndarray
    p_r: np.ndarray

    def __post_init__(self):
        beta = np.array(self.beta, dtype=float)
        p_r = np.array(self.p_r, dtype=float)
        if beta.shape != p_r.shape or beta.ndim != 2:
            raise DomainError(f"beta and p_r must share an (L, B) shape, got {beta.shape} and {p_r.shape}")
        if not (np.all(np.isfinite(beta)) and np.all(np.isfinite(p_r))):
            raise DomainError("continuous decision must be finite")
        beta.setflags(write=False)
        p_r.setflags(write=False)
        object.__setattr__(self, 'beta', beta)
        object.__setattr__(self, 'p_r', p_r)

    @classmethod
    def zeros(cls, L: int, B: int) -> 'ContinuousDecision':
        return cls(np.zeros((L, B)), np.zeros((L, B)))
