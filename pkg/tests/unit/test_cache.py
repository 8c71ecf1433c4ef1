"""Unit tests for the result cache."""

import threading

from hslab.cache import CacheKeyGenerator, CacheStats, ResultCache


class TestCacheKeyGenerator:
    """Test exact cache keys."""

    def test_bit_identical_floats_share_keys(self):
        """Test that equal floats give equal keys."""
        keys = CacheKeyGenerator("oracle")
        assert keys.generate_key(2.0, 0.5) == keys.generate_key(2.0, 0.5)
        assert keys.generate_key(2.0, 0.5).startswith("oracle:")

    def test_nearby_floats_differ(self):
        """Test that floats one ulp apart get different keys."""
        keys = CacheKeyGenerator()
        assert keys.generate_key(0.1 + 0.2) != keys.generate_key(0.3)

    def test_keyword_order(self):
        """Test that keyword order does not matter."""
        keys = CacheKeyGenerator()
        assert keys.generate_key(a=1.0, b=(1.0, 2.0)) == keys.generate_key(
            b=(1.0, 2.0), a=1.0
        )


class TestResultCache:
    """Test the LRU result cache."""

    def test_basic_operations(self):
        """Test get, set and statistics."""
        cache = ResultCache(max_size=10)
        assert cache.get("key1") is None

        cache.set("key1", 1.5)
        assert cache.get("key1") == 1.5

        stats = cache.get_stats()
        assert stats.hits == 1
        assert stats.misses == 1
        assert stats.size == 1
        assert stats.hit_rate == 0.5

    def test_lru_eviction(self):
        """Test that the least recently used entry is evicted."""
        cache = ResultCache(max_size=3)
        for key in ("key1", "key2", "key3"):
            cache.set(key, key)
        cache.get("key1")
        cache.get("key3")
        cache.set("key4", "key4")

        assert cache.get("key2") is None
        assert cache.get("key1") == "key1"
        stats = cache.get_stats()
        assert stats.evictions == 1
        assert stats.size == 3

    def test_get_or_compute(self):
        """Test that a hit skips the computation."""
        cache = ResultCache()
        calls = []

        def compute():
            calls.append(1)
            return 42.0

        assert cache.get_or_compute("k", compute) == 42.0
        assert cache.get_or_compute("k", compute) == 42.0
        assert len(calls) == 1

    def test_clear(self):
        """Test clearing the cache."""
        cache = ResultCache()
        cache.set("k", 1.0)
        cache.clear()
        assert cache.get("k") is None
        assert cache.get_stats().size == 0

    def test_stats_are_snapshots(self):
        """Test that statistics do not change after they are taken."""
        cache = ResultCache()
        stats = cache.get_stats()
        cache.get("missing")
        assert stats.misses == 0

    def test_concurrent_access(self):
        """Test that concurrent writers keep the size bounded."""
        cache = ResultCache(max_size=50)

        def writer(offset):
            for i in range(100):
                cache.set(f"{offset}-{i}", i)

        threads = [threading.Thread(target=writer, args=(n,)) for n in range(4)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join()
        stats = cache.get_stats()
        assert stats.size == 50
        assert stats.evictions == 350


class TestCacheStats:
    """Test cache statistics."""

    def test_hit_rate_without_lookups(self):
        """Test a zero hit rate on an unused cache."""
        assert CacheStats().hit_rate == 0.0

    def test_to_dict(self):
        """Test the dictionary form."""
        data = CacheStats(hits=3, misses=1, max_size=8).to_dict()
        assert data["hit_rate"] == 0.75
        assert data["max_size"] == 8
