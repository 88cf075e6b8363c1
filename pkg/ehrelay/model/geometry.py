from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ConfigError, DomainError
from .params import SystemParams

Node = Union[str, int]
"""A network node: ``"S1"`` or ``"S2"`` for the terminals, an int for a relay index."""

TERMINALS = ("S1", "S2")


@dataclass(frozen=True)
class Geometry:
    """Node positions in the plane (m).

    The terminals sit at the two ends of a diameter of length ``D`` centered on
    the origin; relays lie inside that circle.
    """
    relay_positions: np.ndarray
    terminal_positions: np.ndarray

    def __post_init__(self):
        relays = np.array(self.relay_positions, dtype=float).reshape(-1, 2)
        terminals = np.array(self.terminal_positions, dtype=float).reshape(2, 2)
        radius = np.linalg.norm(terminals[1] - terminals[0]) / 2.0
        center = terminals.mean(axis=0)
        if np.any(np.linalg.norm(relays - center, axis=1) > radius * (1 + 1e-12)):
            raise ConfigError("relays must lie inside the circle spanned by the terminals")
        relays.setflags(write=False)
        terminals.setflags(write=False)
        object.__setattr__(self, 'relay_positions', relays)
        object.__setattr__(self, 'terminal_positions', terminals)

    @property
    def relay_count(self) -> int:
        return self.relay_positions.shape[0]

    def position(self, node: Node) -> np.ndarray:
        if isinstance(node, str):
            try:
                return self.terminal_positions[TERMINALS.index(node)]
            except ValueError:
                raise DomainError(f"unknown terminal {node!r}") from None
        return self.relay_positions[node]

    def distance(self, u: Node, v: Node) -> float:
        return float(np.linalg.norm(self.position(u) - self.position(v)))


def path_loss_db(distance, params: SystemParams):
    """Free-space style path loss ``10 nu log10(4 pi d f / C) + PL_LoS`` (dB).

    Accepts scalar or array distances; any nonpositive distance raises ``DomainError``.
    """
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise DomainError("path loss needs a strictly positive distance")
    return (10.0 * params.nu * np.log10(4.0 * np.pi * d * params.f / params.C) + params.PL_LoS)[()]


def path_loss(u: Node, v: Node, params: SystemParams, geom: Geometry) -> float:
    """Path loss (dB) between two nodes of ``geom``."""
    return float(path_loss_db(geom.distance(u, v), params))


def sample_geometry(params: SystemParams, seed=None) -> Geometry:
    """Place ``L`` relays uniformly over the disk of diameter ``D``.

    Positions are drawn on the unit disk and scaled, so a common seed yields
    proportional layouts across a distance sweep.
    """
    rng = np.random.default_rng(seed)
    radius = np.sqrt(rng.random(params.L))
    angle = 2.0 * np.pi * rng.random(params.L)
    unit = np.column_stack([radius * np.cos(angle), radius * np.sin(angle)])
    half = params.D / 2.0
    return Geometry(
        relay_positions=unit * half,
        terminal_positions=np.array([[-half, 0.0], [half, 0.0]]),
    )
