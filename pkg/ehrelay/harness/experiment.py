# ehrelay/harness/experiment.py
"""Seeded Monte Carlo experiments over a one-dimensional parameter sweep."""
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..config import resolve_workers
from ..errors import ConfigError, GuardError
from ..gp import ScaSettings
from ..model import SystemParams, UtilityKind, sample_channels, sample_geometry, sample_renewable
from ..selection import (
    BbSettings, BpsoSettings, ProblemContext, SelectionResult, bb_optimize, bpso_optimize, exhaustive_optimize,
)
from ..subproblem import ContinuousMode
from ..utils.units import dbm_to_watt
from .events import EventDispatcher, SweepEvent, TrialEvent

logger = logging.getLogger(__name__)


class SweepAxis(str, Enum):
    NONE = "none"
    PS_DBM = "ps_dbm"
    PR_DBM = "pr_dbm"
    DISTANCE = "distance"


class SolverKind(str, Enum):
    BPSO = "bpso"
    BB = "bb"
    EXHAUSTIVE = "exhaustive"


METRICS = ("utility", "sum_rate", "min_slot_rate", "rf_harvest_J", "re_harvest_J",
           "solver_iters", "steady_iter", "gp_iters_mean", "wall_ms")


def _parse_enum(enum, value, what):
    try:
        return enum(value)
    except ValueError:
        raise ConfigError(f"unknown {what} {value!r}; expected one of {[m.value for m in enum]}") from None


@dataclass
class ExperimentConfig:
    """One experiment: a sweep axis, the solver to run and how many seeded trials per point.

    ``sweep_values`` are in dBm for the power axes and in m for the distance axis;
    they must be sorted ascending and are ignored (and must be empty) for ``"none"``.
    ``wall_ms`` is only measured with ``record_wall_time``; otherwise it is 0 and
    reruns of the same configuration emit byte-identical files.
    """
    system: SystemParams = field(default_factory=SystemParams)
    sweep_axis: Union[SweepAxis, str] = SweepAxis.NONE
    sweep_values: Tuple[float, ...] = ()
    kind: Union[UtilityKind, str] = UtilityKind.MAX_SUM
    solver: Union[SolverKind, str] = SolverKind.BPSO
    trials: int = 200
    seed: int = 0
    output: Optional[str] = None
    formats: Tuple[str, ...] = ("csv", "json")
    workers: int = 1
    record_wall_time: bool = False
    mode: ContinuousMode = field(default_factory=ContinuousMode)
    sca: ScaSettings = field(default_factory=ScaSettings)
    bpso: BpsoSettings = field(default_factory=BpsoSettings)
    bb: BbSettings = field(default_factory=BbSettings)

    def __post_init__(self):
        self.sweep_axis = _parse_enum(SweepAxis, self.sweep_axis, "sweep axis")
        self.solver = _parse_enum(SolverKind, self.solver, "solver")
        try:
            self.kind = UtilityKind.parse(self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.sweep_values = tuple(float(v) for v in self.sweep_values)
        if self.trials < 1:
            raise ConfigError(f"trial count must be at least 1, got {self.trials}")
        if self.sweep_axis is SweepAxis.NONE:
            if self.sweep_values:
                raise ConfigError("sweep values given without a sweep axis")
        else:
            if not self.sweep_values:
                raise ConfigError(f"sweep axis {self.sweep_axis.value} needs at least one value")
            if list(self.sweep_values) != sorted(self.sweep_values):
                raise ConfigError(f"sweep values must be sorted ascending, got {list(self.sweep_values)}")
        for fmt in self.formats:
            if fmt not in ("csv", "json", "msgpack"):
                raise ConfigError(f"unknown output format {fmt!r}")

    def grid(self) -> List[Optional[float]]:
        return [None] if self.sweep_axis is SweepAxis.NONE else list(self.sweep_values)

    def params_for(self, value: Optional[float]) -> SystemParams:
        """System parameters at one point of the sweep."""
        if value is None or self.sweep_axis is SweepAxis.NONE:
            return self.system
        if self.sweep_axis is SweepAxis.PS_DBM:
            power = float(dbm_to_watt(value))
            return self.system.with_updates(P_1=power, P_2=power)
        if self.sweep_axis is SweepAxis.PR_DBM:
            return self.system.with_updates(Pr_max=float(dbm_to_watt(value)))
        return self.system.with_updates(D=float(value))


@dataclass
class TrialRecord:
    """Outcome of one seeded trial. Rates are bits per slot, energies J, times ms.

    ``utility`` is NaN when the solver found no feasible selection.
    """
    sweep_index: int
    sweep_value: Optional[float]
    trial: int
    seed: int
    utility: float
    feasible: bool
    min_slot_rate: float
    sum_rate: float
    rf_harvest_J: float
    re_harvest_J: float
    solver_iters: int
    steady_iter: int
    gp_iters_mean: float
    evaluations: int
    wall_ms: float
    rates: List[List[float]] = field(default_factory=list)
    selection: List[List[int]] = field(default_factory=list)
    beta: List[List[float]] = field(default_factory=list)
    p_r: List[List[float]] = field(default_factory=list)
    relay_positions: List[List[float]] = field(default_factory=list)
    trace: List[Optional[float]] = field(default_factory=list)


@dataclass
class SummaryRow:
    sweep_index: int
    sweep_value: Optional[float]
    metric: str
    mean: float
    stderr: float
    count: int


@dataclass
class ExperimentResult:
    records: List[TrialRecord]
    summary: List[SummaryRow]


def trial_seed(base_seed: int, trial: int) -> int:
    return int(base_seed) ^ int(trial)


def _solve(config: ExperimentConfig, context: ProblemContext, swarm_seed: int) -> SelectionResult:
    if config.solver is SolverKind.BPSO:
        return bpso_optimize(context, config.kind, replace(config.bpso, seed=swarm_seed))
    if config.solver is SolverKind.BB:
        return bb_optimize(context, config.kind, config.bb)
    return exhaustive_optimize(context, config.kind)


def run_trial(config: ExperimentConfig, sweep_index: int, trial: int) -> TrialRecord:
    """Sample one network realization and run the configured outer solver on it.

    The trial seed is the base seed XOR the trial index, so every sweep value sees
    the same channel, renewable and swarm randomness for a given trial.
    """
    value = config.grid()[sweep_index]
    seed = trial_seed(config.seed, trial)
    geometry_seq, channel_seq, renewable_seq, swarm_seq = np.random.SeedSequence(seed).spawn(4)
    params = config.params_for(value)
    geometry = sample_geometry(params, geometry_seq)
    channels = sample_channels(params, geometry, channel_seq)
    renewable = sample_renewable(params, renewable_seq)
    context = ProblemContext(channels, renewable, params, config.sca, config.mode)

    started = time.perf_counter()
    try:
        result = _solve(config, context, int(swarm_seq.generate_state(1)[0]))
    except GuardError as exc:
        raise GuardError(f"{exc} (sweep value {value})", exc.cells, exc.limit) from exc
    wall_ms = (time.perf_counter() - started) * 1e3 if config.record_wall_time else 0.0

    report = result.solution.report
    rates = report.rates.rate
    feasible = result.feasible
    return TrialRecord(
        sweep_index=sweep_index,
        sweep_value=value,
        trial=trial,
        seed=seed,
        utility=result.utility if feasible else float('nan'),
        feasible=feasible,
        min_slot_rate=float(rates.min()),
        sum_rate=float(rates.sum()),
        rf_harvest_J=report.ledger.rf_total,
        re_harvest_J=report.ledger.re_total,
        solver_iters=result.iterations,
        steady_iter=result.steady_iteration,
        gp_iters_mean=result.gp_iterations_mean,
        evaluations=result.evaluations,
        wall_ms=wall_ms,
        rates=rates.tolist(),
        selection=result.selection.eps.astype(int).tolist(),
        beta=result.decision.beta.tolist(),
        p_r=result.decision.p_r.tolist(),
        relay_positions=geometry.relay_positions.tolist(),
        trace=[v if math.isfinite(v) else None for v in result.trace],
    )


def summarize(records: Sequence[TrialRecord]) -> List[SummaryRow]:
    """Mean and standard error of every metric per sweep value; NaN utilities are skipped."""
    frame = pd.DataFrame([{'sweep_index': r.sweep_index, **{m: getattr(r, m) for m in METRICS}}
                          for r in records])
    values = {r.sweep_index: r.sweep_value for r in records}
    rows = []
    for sweep_index, group in frame.groupby('sweep_index', sort=True):
        for metric in METRICS:
            column = group[metric].astype(float).dropna()
            count = int(column.size)
            mean = float(column.mean()) if count else float('nan')
            stderr = float(column.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
            rows.append(SummaryRow(int(sweep_index), values[sweep_index], metric, mean, stderr, count))
    return rows


def run_experiment(config: ExperimentConfig, events: Optional[EventDispatcher] = None) -> ExperimentResult:
    """Run every (sweep value, trial) pair and aggregate the records.

    Trials run in a process pool when more than one worker is configured (or set
    through ``TWR_EH_WORKERS``); records are ordered by (sweep index, trial index)
    regardless of completion order.
    """
    grid = config.grid()
    jobs = [(i, t) for i in range(len(grid)) for t in range(config.trials)]
    workers = resolve_workers(config.workers)
    logger.info("running %d trials over %d sweep values with %d worker(s)", len(jobs), len(grid), workers)

    records: List[TrialRecord] = []

    def done(record: TrialRecord):
        records.append(record)
        if events is not None:
            events.trigger('trial', TrialEvent(record.sweep_index, record.sweep_value, record.trial,
                                               len(records), len(jobs), record))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(run_trial, config, i, t) for i, t in jobs]
            for future in as_completed(futures):
                done(future.result())
    else:
        for i, t in jobs:
            done(run_trial(config, i, t))

    records.sort(key=lambda r: (r.sweep_index, r.trial))
    summary = summarize(records)
    if events is not None:
        for i, value in enumerate(grid):
            events.trigger('sweep', SweepEvent(i, value, [row for row in summary if row.sweep_index == i]))
    infeasible = sum(not r.feasible for r in records)
    if infeasible:
        logger.warning("%d of %d trials found no feasible selection", infeasible, len(records))
    return ExperimentResult(records, summary)
