"""Power and gain unit conversions.

All functions accept scalars or numpy arrays and return the same kind.
"""
import numpy as np


def dbm_to_watt(dbm):
    """Power in dBm to W: ``10 ** ((dbm - 30) / 10)``."""
    return np.power(10.0, (np.asarray(dbm, dtype=float) - 30.0) / 10.0)[()]


def watt_to_dbm(watt):
    """Power in W to dBm; raises on nonpositive input through numpy's log."""
    return (10.0 * np.log10(np.asarray(watt, dtype=float)) + 30.0)[()]


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0)[()]


def linear_to_db(linear):
    return (10.0 * np.log10(np.asarray(linear, dtype=float)))[()]
