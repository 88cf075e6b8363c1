# ehrelay/config.py
import copy
import logging
import os
from importlib import resources
from typing import Any, Dict, Iterable, Optional

import tomli

from .errors import ConfigError
from .gp import ScaSettings, SolverSettings
from .model.params import SystemParams
from .selection import BbSettings, BpsoSettings
from .subproblem import ContinuousMode
from .utils.units import dbm_to_watt

logger = logging.getLogger(__name__)

PROJECT_CONFIG = '.ehrelay.toml'
WORKERS_ENV = 'TWR_EH_WORKERS'


def merge_configs(user_config: Dict[str, Any], default_config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Recursively merge user config with default config, ensuring all default fields are present.
    User config values override default values.
    """
    result = copy.deepcopy(default_config)

    if not user_config:
        return result

    for key, value in user_config.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_configs(value, result[key])
        else:
            result[key] = value

    return result


def _read_toml(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'rb') as f:
            return tomli.load(f)
    except tomli.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {path}: {exc}") from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc


def load_config(config_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Load configuration from a TOML file merged over the bundled defaults.

    Args:
        config_path: Path to the configuration file. If None, looks for .ehrelay.toml in the
                     current directory, then falls back to the default bundled configuration.

    Returns:
        Dictionary containing the configuration merged with defaults

    Raises:
        ConfigError: an explicit path does not exist or does not parse.
    """
    default_config = get_default_config()

    if config_path is not None:
        if not os.path.exists(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        logger.info("loading config from %s", config_path)
        return merge_configs(_read_toml(config_path), default_config)

    if os.path.exists(PROJECT_CONFIG):
        logger.info("loading config from project directory")
        return merge_configs(_read_toml(PROJECT_CONFIG), default_config)

    logger.debug("no user config found, using defaults")
    return default_config


def get_default_config() -> Dict[str, Any]:
    """Return the default configuration by loading from default_config.toml."""
    text = resources.files('ehrelay').joinpath('default_config.toml').read_text(encoding='utf-8')
    return tomli.loads(text)


def apply_overrides(config: Dict[str, Any], overrides: Iterable[str]) -> Dict[str, Any]:
    """Apply ``section.key=value`` overrides; values are parsed as TOML (bare words as strings)."""
    result = copy.deepcopy(config)
    for item in overrides:
        key, sep, raw = item.partition('=')
        if not sep or not key.strip():
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        try:
            value = tomli.loads(f"v = {raw.strip()}")['v']
        except tomli.TOMLDecodeError:
            value = raw.strip()
        *sections, leaf = [part.strip() for part in key.split('.')]
        table = result
        for section in sections:
            table = table.setdefault(section, {})
            if not isinstance(table, dict):
                raise ConfigError(f"{key} does not name a table entry")
        table[leaf] = value
    return result


def resolve_workers(configured: int) -> int:
    """Worker count, with the ``TWR_EH_WORKERS`` environment variable taking precedence."""
    raw = os.environ.get(WORKERS_ENV)
    if raw is None or raw.strip() == '':
        return max(1, int(configured))
    try:
        workers = int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if workers < 1:
        raise ConfigError(f"{WORKERS_ENV} must be at least 1, got {workers}")
    return workers


def system_params_from_config(config: Dict[str, Any]) -> SystemParams:
    """Build :class:`~ehrelay.model.SystemParams` (SI units) from the ``[system]`` and ``[renewable]`` tables."""
    try:
        s, r = config['system'], config['renewable']
        charge = s.get('initial_charge_j', [])
        if isinstance(charge, (int, float)):
            charge = [charge]
        return SystemParams(
            L=s['relays'],
            B=s['slots'],
            T_c=float(s['tc_ms']) / 1e3,
            W=float(s['bandwidth_hz']),
            f=float(s['carrier_hz']),
            P_1=float(dbm_to_watt(s['ps_dbm'])),
            P_2=float(dbm_to_watt(s['ps_dbm'])),
            Pr_max=float(dbm_to_watt(s['pr_max_dbm'])),
            Es_max=float(s['storage_j']),
            E_leak=float(s['leakage_mj']) / 1e3,
            a0=float(s['a0_w']),
            a_t=float(s['a_t']),
            a_r=float(s['ar_mw']) / 1e3,
            eta_RF=float(s['eta_rf']),
            eta_RE=float(s['eta_re']),
            N0=float(dbm_to_watt(s['noise_dbm'])),
            nu=float(s['pathloss_exponent']),
            PL_LoS=float(s['pathloss_los_db']),
            rician_K=float(s['rician_k_db']),
            D=float(s['distance_m']),
            B_init=tuple(float(x) for x in charge) or None,
            re_mean=float(r['mean_w']),
            re_var=float(r['variance']),
            re_low=float(r['low_w']),
            re_high=float(r['high_w']),
        )
    except KeyError as exc:
        raise ConfigError(f"missing configuration key {exc}") from None
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid system configuration: {exc}") from None


def experiment_config_from_config(config: Dict[str, Any]):
    """Build the :class:`~ehrelay.harness.ExperimentConfig` described by ``config``."""
    from .harness.experiment import ExperimentConfig

    params = system_params_from_config(config)
    try:
        c, sca, swarm, bb, exp = (config['continuous'], config['sca'], config['bpso'],
                                  config['bb'], config['experiment'])
        beta = c.get('beta', 'optimized')
        power = c.get('power', 'optimized')
        if power not in ('optimized', 'max'):
            raise ConfigError(f"continuous.power must be 'optimized' or 'max', got {power!r}")
        stall = int(swarm['stall_window'])
        return ExperimentConfig(
            system=params,
            sweep_axis=exp['sweep'],
            sweep_values=tuple(float(v) for v in exp['values']),
            kind=exp['utility'],
            solver=exp['solver'],
            trials=int(exp['trials']),
            seed=int(exp['seed']),
            output=exp.get('output') or None,
            formats=tuple(exp['formats']),
            workers=int(exp['workers']),
            record_wall_time=bool(exp['record_wall_time']),
            mode=ContinuousMode(fixed_beta=None if beta == 'optimized' else float(beta),
                                fixed_power=power == 'max'),
            sca=ScaSettings(tolerance=float(sca['tolerance']), max_iterations=int(sca['max_iterations']),
                            solver=SolverSettings(max_iterations=int(sca['solver_max_iterations']))),
            bpso=BpsoSettings(particle_count=int(swarm['particles']), max_iterations=int(swarm['iterations']),
                              inertia_start=float(swarm['inertia_start']), inertia_end=float(swarm['inertia_end']),
                              velocity_clamp=float(swarm['velocity_clamp']), stall_window=stall or None),
            bb=BbSettings(max_cells=int(bb['max_cells']), use_relaxation=bool(bb['use_relaxation']),
                          relax_every_node=bool(bb['relax_every_node']),
                          stop_at_binary_root=bool(bb['stop_at_binary_root'])),
        )
    except KeyError as exc:
        raise ConfigError(f"missing configuration key {exc}") from None
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid experiment configuration: {exc}") from None
