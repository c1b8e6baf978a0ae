import logging
import threading
from typing import Callable, Final, TypeAlias
from concurrent.futures import ThreadPoolExecutor

logger = logging.getLogger(__name__)

EventCallback: TypeAlias = Callable[[object], None]

WORKER_THREAD_NAME_PREFIX: Final[str] = "CompWorker"

global_executor = ThreadPoolExecutor(max_workers=4, thread_name_prefix=WORKER_THREAD_NAME_PREFIX)


class EngineError(Exception):
    """Base class for every error the inference engine raises on purpose."""


class ConfigError(EngineError):
    pass


class EventBus:
    def __init__(self) -> None:
        self._subscribers: dict[str, list[EventCallback]] = {}
        self._lock = threading.Lock()

    def subscribe(self, event_type: str, callback: EventCallback) -> None:
        with self._lock:
            self._subscribers.setdefault(event_type, []).append(callback)

    def publish(self, event_type: str, data: object = None, threaded: bool = False) -> None:
        with self._lock:
            callbacks = self._subscribers.get(event_type, [])[:]
        for callback in callbacks:
            if threaded:
                global_executor.submit(self._safe_call, callback, data, event_type)
            else:
                self._safe_call(callback, data, event_type)

    def _safe_call(self, callback: EventCallback, data: object, event_type: str) -> None:
        try:
            callback(data)
        except Exception:
            logger.exception("Subscriber failed while handling '%s'", event_type)
