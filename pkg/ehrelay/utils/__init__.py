from .parse import as_list, decode_msgpack, encode_msgpack, parse_grid
from .units import db_to_linear, dbm_to_watt, linear_to_db, watt_to_dbm

__all__ = [
    'as_list', 'encode_msgpack', 'decode_msgpack', 'parse_grid',
    'dbm_to_watt', 'watt_to_dbm', 'db_to_linear', 'linear_to_db',
]
