import numpy as np
import pytest

from ehrelay.model import (
    ChannelSet, RenewableTrace, SystemParams, sample_channels, sample_geometry, sample_renewable,
)


def make_instance(L=2, B=2, seed=3, **changes):
    """Seeded ``(params, channels, renewable)`` triple."""
    params = SystemParams(L=L, B=B, **changes)
    geometry = sample_geometry(params, seed)
    channels = sample_channels(params, geometry, seed + 1)
    renewable = sample_renewable(params, seed + 2)
    return params, channels, renewable


def flat_channels(L, B, h1=1e-4, h2=1e-4, hrr=1e-4):
    """Channels with the same real gain on every link of the same kind."""
    relay = np.full((L, L, B), hrr, dtype=complex)
    idx = np.arange(L)
    relay[idx, idx, :] = 0.0
    return ChannelSet(np.full((L, B), h1, dtype=complex), np.full((L, B), h2, dtype=complex), relay)


def constant_renewable(L, B, phi=2.0):
    return RenewableTrace(np.full((L, B), phi))


@pytest.fixture
def instance():
    return make_instance
