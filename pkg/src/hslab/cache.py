"""Memoisation of expensive deterministic integrals."""

from __future__ import annotations

import hashlib
import threading
from collections.abc import Callable, Hashable
from dataclasses import dataclass, replace
from typing import Any, TypeVar

from cachetools import LRUCache

T = TypeVar("T")


@dataclass
class CacheStats:
    """Cache statistics."""

    hits: int = 0
    misses: int = 0
    evictions: int = 0
    size: int = 0
    max_size: int = 256

    @property
    def hit_rate(self) -> float:
        """Calculate cache hit rate."""
        total = self.hits + self.misses
        if total == 0:
            return 0.0
        return self.hits / total

    def to_dict(self) -> dict[str, Any]:
        """Convert stats to dictionary."""
        return {
            "hits": self.hits,
            "misses": self.misses,
            "evictions": self.evictions,
            "size": self.size,
            "max_size": self.max_size,
            "hit_rate": self.hit_rate,
        }


class CacheKeyGenerator:
    """Builds exact cache keys from numeric arguments.

    Floats are keyed by their hex representation so that two arguments share a
    key only when they are bit-identical.
    """

    def __init__(self, prefix: str = ""):
        self.prefix = prefix

    @staticmethod
    def _component(value: Any) -> str:
        if isinstance(value, float):
            return value.hex()
        if isinstance(value, tuple | list):
            return "(" + ",".join(CacheKeyGenerator._component(v) for v in value) + ")"
        return repr(value)

    def generate_key(self, *args: Any, **kwargs: Any) -> str:
        """Generate a key for a call signature."""
        parts = [self._component(a) for a in args]
        parts.extend(f"{k}={self._component(v)}" for k, v in sorted(kwargs.items()))
        digest = hashlib.sha256("|".join(parts).encode()).hexdigest()[:16]
        return f"{self.prefix}:{digest}" if self.prefix else digest


class _CountingLRU(LRUCache):  # type: ignore[type-arg]
    def __init__(self, maxsize: int, stats: CacheStats):
        super().__init__(maxsize=maxsize)
        self._stats = stats

    def popitem(self) -> tuple[Hashable, Any]:
        item = super().popitem()
        self._stats.evictions += 1
        return item  # type: ignore[no-any-return]


class ResultCache:
    """Thread-safe LRU cache for values that are pure functions of their key."""

    def __init__(self, max_size: int = 256, prefix: str = ""):
        """Initialize cache.

        Args:
            max_size: Maximum number of entries
            prefix: Key namespace
        """
        self.max_size = max_size
        self.keys = CacheKeyGenerator(prefix)
        self._stats = CacheStats(max_size=max_size)
        self._storage = _CountingLRU(max_size, self._stats)
        self._lock = threading.Lock()

    def get(self, key: str) -> Any | None:
        """Get a value from the cache."""
        with self._lock:
            if key in self._storage:
                self._stats.hits += 1
                return self._storage[key]
            self._stats.misses += 1
            return None

    def set(self, key: str, value: Any) -> None:
        """Store a value."""
        with self._lock:
            self._storage[key] = value
            self._stats.size = len(self._storage)

    def get_or_compute(self, key: str, compute: Callable[[], T]) -> T:
        """Return the cached value for ``key``, computing it on a miss.

        The computation runs outside the lock; concurrent misses may compute
        the same value twice, which is harmless for pure functions.
        """
        cached = self.get(key)
        if cached is not None:
            return cached  # type: ignore[no-any-return]
        value = compute()
        self.set(key, value)
        return value

    def clear(self) -> None:
        """Clear all entries from the cache."""
        with self._lock:
            self._storage.clear()
            self._stats.size = 0

    def get_stats(self) -> CacheStats:
        """Get a snapshot of cache statistics."""
        with self._lock:
            self._stats.size = len(self._storage)
            return replace(self._stats)
