# ehrelay/__init__.py
from .errors import ConfigError, DomainError, EhRelayError, GuardError, InfeasibleStartError

__version__ = '0.1.0'
__all__ = ['EhRelayError', 'ConfigError', 'DomainError', 'GuardError', 'InfeasibleStartError']
