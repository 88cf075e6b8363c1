"""Persistence of experiment records: CSV tables, JSON, msgpack snapshots and plot data."""
import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import pandas as pd

from ..errors import ConfigError, EhRelayError
from ..utils.parse import as_list, decode_msgpack, encode_msgpack
from .experiment import METRICS, SummaryRow, TrialRecord

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["sweep_value", "trial", "seed", "utility", "min_slot_rate", "sum_rate",
               "rf_harvest_J", "re_harvest_J", "solver_iters", "wall_ms"]
PLOT_COLUMNS = ["sweep_value", "mean", "stderr"]

PathLike = Union[str, Path]


def _write(path: Path, payload: Union[str, bytes]) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        if isinstance(payload, bytes):
            path.write_bytes(payload)
        else:
            path.write_text(payload, encoding='utf-8')
    except OSError as exc:
        raise ConfigError(f"cannot write results to {path}: {exc}") from exc
    return path


def records_frame(records: Sequence[TrialRecord]) -> pd.DataFrame:
    return pd.DataFrame([{c: getattr(r, c) for c in CSV_COLUMNS} for r in records], columns=CSV_COLUMNS)


def plot_frame(summary: Sequence[SummaryRow], metric: str) -> pd.DataFrame:
    rows = [{"sweep_value": s.sweep_value, "mean": s.mean, "stderr": s.stderr}
            for s in summary if s.metric == metric]
    return pd.DataFrame(rows, columns=PLOT_COLUMNS)


def _snapshot(records: Sequence[TrialRecord], summary: Sequence[SummaryRow]) -> Dict[str, Any]:
    return {
        "records": [as_list(asdict(r)) for r in records],
        "summary": [as_list(asdict(s)) for s in summary],
    }


def emit_results(records: Sequence[TrialRecord], summary: Sequence[SummaryRow], path: PathLike,
                 fmt: str = "csv") -> List[Path]:
    """Write ``records`` and ``summary`` next to ``path`` (its suffix is replaced).

    ``csv`` writes the record table plus one ``<stem>_<metric>.dat`` plot-data file per
    metric; ``json`` and ``msgpack`` write a single snapshot with full records.

    Returns:
        The paths written.

    Raises:
        ConfigError: the destination is not writable.
    """
    if not records:
        raise EhRelayError("no records to emit")
    base = Path(path)
    if fmt == "csv":
        written = [_write(base.with_suffix(".csv"), records_frame(records).to_csv(index=False))]
        for metric in METRICS:
            target = base.with_name(f"{base.stem}_{metric}.dat")
            written.append(_write(target, plot_frame(summary, metric).to_csv(index=False)))
    elif fmt == "json":
        text = json.dumps(_snapshot(records, summary), sort_keys=True, indent=1)
        written = [_write(base.with_suffix(".json"), text + "\n")]
    elif fmt == "msgpack":
        written = [_write(base.with_suffix(".msgpack"), encode_msgpack(_snapshot(records, summary)))]
    else:
        raise ConfigError(f"unknown output format {fmt!r}")
    logger.info("wrote %s", ", ".join(str(p) for p in written))
    return written


def load_results(path: PathLike) -> Union[pd.DataFrame, Dict[str, Any]]:
    """Read back a file written by :func:`emit_results`.

    CSV files come back as a ``DataFrame`` parsed with round-trip float precision;
    JSON and msgpack snapshots as ``{"records": [...], "summary": [...]}``.
    """
    path = Path(path)
    if path.suffix in (".csv", ".dat"):
        return pd.read_csv(path, float_precision="round_trip")
    if path.suffix == ".json":
        return json.loads(path.read_text(encoding='utf-8'))
    if path.suffix == ".msgpack":
        return decode_msgpack(path.read_bytes())
    raise ConfigError(f"unrecognised results file {path}")
