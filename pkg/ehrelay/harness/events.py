import logging
import time
from dataclasses import dataclass, field
from functools import wraps
from typing import Any, Callable, Dict, List, Optional

logger = logging.getLogger(__name__)

# Event payloads, dataclasses for dot-access notation


@dataclass
class TrialEvent:
    """Progress information emitted after every finished trial."""
    sweep_index: int
    sweep_value: Optional[float]
    trial: int
    completed: int
    total: int
    record: Any = None


@dataclass
class SweepEvent:
    """Emitted once all trials of a sweep value are finished."""
    sweep_index: int
    sweep_value: Optional[float]
    summary: List[Any] = field(default_factory=list)


class EventDispatcher:
    """Event dispatcher used for experiment progress callbacks."""

    def __init__(self):
        self._callbacks: Dict[str, List[Callable]] = {
            'trial': [],
            'sweep': [],
        }
        self._throttle_timestamps: Dict[str, float] = {}

    def _create_throttled_decorator(self, event_name: str, throttle: Optional[int] = None):
        """Helper method to create a throttled decorator for any event."""
        def decorator(func: Callable[[Any], Any]) -> Callable[[Any], Any]:
            if throttle is not None and throttle > 0:
                @wraps(func)
                def throttled_func(*args, **kwargs):
                    current_time = time.monotonic() * 1000
                    func_id = f"{event_name}_{func.__name__}_{id(func)}"

                    last_call = self._throttle_timestamps.get(func_id)
                    if last_call is None or current_time - last_call >= throttle:
                        self._throttle_timestamps[func_id] = current_time
                        return func(*args, **kwargs)
                    return None

                self._callbacks.setdefault(event_name, []).append(throttled_func)
            else:
                self._callbacks.setdefault(event_name, []).append(func)
            return func
        return decorator

    def trial(self, throttle: Optional[int] = None) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
        """The `trial` event fires whenever a Monte Carlo trial finishes.

        Args:
            throttle (int, optional): Throttle interval in milliseconds. If provided,
                the callback will only be called at most once per throttle interval.

        Example usage:
        ```python
        events = EventDispatcher()

        @events.trial(throttle=500)
        def progress(event):
            print(f"{event.completed}/{event.total} trials done")

        run_experiment(config, events=events)
        ```
        `event` is a `TrialEvent` holding `sweep_index`, `sweep_value`, `trial`,
        `completed`, `total` and the finished `record`.
        """
        return self._create_throttled_decorator('trial', throttle)

    def sweep(self) -> Callable[[Callable[..., Any]], Callable[..., Any]]:
        """The `sweep` event fires once per sweep value with its `SweepEvent` summary rows."""
        return self._create_throttled_decorator('sweep', None)

    def trigger(self, event: str, payload: Any) -> None:
        """Trigger all callbacks for a given event name; callback errors are logged, not raised."""
        for cb in self._callbacks.get(event, []):
            try:
                cb(payload)
            except Exception:
                logger.exception("error in %s callback %r", event, cb)
