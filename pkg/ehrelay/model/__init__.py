from .channel import ChannelSet, RenewableTrace, sample_channels, sample_renewable
from .decision import ContinuousDecision, SelectionMatrix
from .energy import (
    ENERGY_CONSUMPTION, PEAK_POWER, SELECTION_BINARY, SPLIT_RATIO, STORAGE_CAPACITY,
    EnergyLedger, Verdict, Violation, check_feasible, consumed_energy, consumption_matrix,
    harvest_components, harvested_energy, roll_ledger,
)
from .geometry import Geometry, path_loss, path_loss_db, sample_geometry
from .params import SPEED_OF_LIGHT, SystemParams
from .rate import RateResult, UtilityKind, amplification_gain, gain_matrix, snr_and_rate, utility

__all__ = [
    'SystemParams', 'SPEED_OF_LIGHT',
    'Geometry', 'path_loss', 'path_loss_db', 'sample_geometry',
    'ChannelSet', 'RenewableTrace', 'sample_channels', 'sample_renewable',
    'SelectionMatrix', 'ContinuousDecision',
    'EnergyLedger', 'Verdict', 'Violation', 'harvest_components', 'consumption_matrix',
    'harvested_energy', 'consumed_energy', 'roll_ledger', 'check_feasible',
    'ENERGY_CONSUMPTION', 'STORAGE_CAPACITY', 'PEAK_POWER', 'SPLIT_RATIO', 'SELECTION_BINARY',
    'RateResult', 'UtilityKind', 'amplification_gain', 'gain_matrix', 'snr_and_rate', 'utility',
]
