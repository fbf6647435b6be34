"""
Memoisation of solved spectra and error triples.

Turning-point searches for the three error metrics revisit the same (N, R)
points; solving an N = 8000 spectrum costs seconds, so results are kept in a
bounded LRU store shared by every thread of a sweep.
"""

import logging
import threading
from functools import wraps
from typing import Any, Callable, Hashable

from cachetools import LRUCache
from cachetools.keys import hashkey


class SpectrumCache:
    """
    LRU store keyed by hashable call signatures (thread-safe).
    """

    def __init__(self, max_entries: int = 128):
        self._cache = LRUCache(maxsize=max_entries)
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0
        self.logger = logging.getLogger("SpectrumCache")

    def get_or_compute(self, key: Hashable, compute: Callable[[], Any]) -> Any:
        with self._lock:
            if key in self._cache:
                self.hits += 1
                return self._cache[key]
            self.misses += 1

        # Computed outside the lock so that sweep threads do not serialise.
        value = compute()
        with self._lock:
            self._cache[key] = value
        self.logger.debug(f"Cached result for {key!r} ({len(self._cache)} entries)")
        return value

    def clear(self):
        with self._lock:
            self._cache.clear()
            self.hits = 0
            self.misses = 0

    def __len__(self) -> int:
        with self._lock:
            return len(self._cache)


SPECTRUM_CACHE = SpectrumCache()


def cached_spectrum(fn):
    """
    Memoises a pure function in SPECTRUM_CACHE. Arguments must be hashable.
    """

    @wraps(fn)
    def wrapper(*args, **kwargs):
        key = (fn.__qualname__,) + hashkey(*args, **kwargs)
        return SPECTRUM_CACHE.get_or_compute(key, lambda: fn(*args, **kwargs))

    wrapper.uncached = fn
    return wrapper
