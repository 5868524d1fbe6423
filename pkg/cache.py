"""
Caching utilities for deterministic, expensive objects
"""

import functools
import logging
import time
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Hashable, Optional, Tuple

from config import settings

logger = logging.getLogger(__name__)

_MISSING = object()


@dataclass
class CacheEntry:
    value: Any
    expires_at: Optional[float] = None
    hits: int = 0

    def expired(self, now: Optional[float] = None) -> bool:
        return self.expires_at is not None and (now or time.monotonic()) > self.expires_at


class CacheManager:
    """In-process cache with optional TTL and hit statistics.

    Values are stored by reference. Only immutable objects (fields, designs)
    are cached, so handing out the same instance to several callers is safe.
    Keys are tuples whose first item is a namespace such as ``"gf"``.
    """

    def __init__(self, default_ttl: int = 0):
        self._entries: Dict[Hashable, CacheEntry] = {}
        self._default_ttl = default_ttl
        self._hits = 0
        self._misses = 0

    @staticmethod
    def make_key(namespace: str, *args, **kwargs) -> Tuple:
        return (namespace, args, tuple(sorted(kwargs.items())))

    def set(self, key: Hashable, value: Any, ttl: Optional[int] = None) -> None:
        """Store a value; a ttl of 0 keeps it until cleared."""
        ttl = self._default_ttl if ttl is None else ttl
        expires_at = time.monotonic() + ttl if ttl > 0 else None
        self._entries[key] = CacheEntry(value, expires_at)
        logger.debug(f"Cache set: {key!r} (TTL: {ttl or 'none'})")

    def get(self, key: Hashable, default: Any = None) -> Any:
        entry = self._entries.get(key)
        if entry is not None and entry.expired():
            del self._entries[key]
            logger.debug(f"Cache expired: {key!r}")
            entry = None
        if entry is None:
            self._misses += 1
            return default
        entry.hits += 1
        self._hits += 1
        return entry.value

    def delete(self, key: Hashable) -> bool:
        return self._entries.pop(key, None) is not None

    def clear(self) -> None:
        """Drop every entry and reset the counters."""
        self._entries.clear()
        self._hits = self._misses = 0
        logger.debug("Cache cleared")

    def cleanup_expired(self) -> int:
        now = time.monotonic()
        stale = [key for key, entry in self._entries.items() if entry.expired(now)]
        for key in stale:
            del self._entries[key]
        if stale:
            logger.debug(f"Dropped {len(stale)} expired cache entries")
        return len(stale)

    def get_stats(self) -> Dict[str, Any]:
        now = time.monotonic()
        expired = sum(entry.expired(now) for entry in self._entries.values())
        lookups = self._hits + self._misses
        namespaces = Counter(key[0] for key in self._entries if isinstance(key, tuple) and key)
        return {
            "total_entries": len(self._entries),
            "active_entries": len(self._entries) - expired,
            "expired_entries": expired,
            "hits": self._hits,
            "misses": self._misses,
            "hit_rate": self._hits / lookups if lookups else 0.0,
            "namespaces": dict(namespaces),
        }


class CacheDecorator:
    """Memoise a function in a CacheManager, keyed by its arguments."""

    def __init__(self, cache_manager: CacheManager, ttl: Optional[int] = None, key_prefix: str = ""):
        self.cache_manager = cache_manager
        self.ttl = ttl
        self.key_prefix = key_prefix

    def __call__(self, func):
        namespace = self.key_prefix or f"{func.__module__}.{func.__qualname__}"

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            key = CacheManager.make_key(namespace, *args, **kwargs)
            result = self.cache_manager.get(key, _MISSING)
            if result is _MISSING:
                result = func(*args, **kwargs)
                self.cache_manager.set(key, result, self.ttl)
            return result

        wrapper.cache_manager = self.cache_manager
        return wrapper


# Global cache manager instance
cache_manager = CacheManager(default_ttl=settings.CACHE_TTL)


def cached(ttl: Optional[int] = None, key_prefix: str = ""):
    """Memoise in the global cache under ``key_prefix`` (default: the qualified name)."""
    return CacheDecorator(cache_manager, ttl, key_prefix)
