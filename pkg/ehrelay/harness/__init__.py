from .events import EventDispatcher, SweepEvent, TrialEvent
from .experiment import (
    METRICS, ExperimentConfig, ExperimentResult, SolverKind, SummaryRow, SweepAxis, TrialRecord,
    run_experiment, run_trial, summarize, trial_seed,
)
from .results import CSV_COLUMNS, emit_results, load_results

__all__ = [
    'ExperimentConfig', 'ExperimentResult', 'TrialRecord', 'SummaryRow', 'SweepAxis', 'SolverKind',
    'METRICS', 'run_experiment', 'run_trial', 'summarize', 'trial_seed',
    'emit_results', 'load_results', 'CSV_COLUMNS',
    'EventDispatcher', 'TrialEvent', 'SweepEvent',
]
