"""Segmented drive cache: lookup, prefetch directives, write policies, LRU."""

from __future__ import annotations

import pytest

from iostack import Ack, CacheFull, DiskCacheConfig, Lookup, ReadPrefetch, UnexpectedFill, WritePolicy
from iostack.diskcache import LocalPatternDetector, SegmentedCache

BLOCK_SECTORS = 128  # one 64KB block


def cfg(**overrides) -> DiskCacheConfig:
    values = dict(
        total_bytes=1024 * 1024,
        segment_count=4,
        segment_bytes=256 * 1024,
        read_prefetch=ReadPrefetch.NONE,
    )
    values.update(overrides)
    return DiskCacheConfig(**values)


def fill(cache: SegmentedCache, lba: int, sectors: int, local: bool = False) -> None:
    cache.expect_fill(lba, sectors)
    cache.on_media_data(lba, sectors, local=local)


class TestReadLookup:
    def test_cold_miss_no_prefetch_under_none(self):
        cache = SegmentedCache(cfg())
        kind, missing, directives = cache.read_lookup(1000, 8)
        assert kind is Lookup.MISS
        assert missing == [(1000, 8)]
        assert directives == []

    def test_hit_after_fill(self):
        cache = SegmentedCache(cfg())
        fill(cache, 0, 256)
        kind, missing, _ = cache.read_lookup(0, 256)
        assert kind is Lookup.HIT and not missing

    def test_partial_returns_missing_tail(self):
        cache = SegmentedCache(cfg())
        fill(cache, 0, 100)
        kind, missing, _ = cache.read_lookup(0, 150)
        assert kind is Lookup.PARTIAL
        assert missing == [(100, 50)]

    def test_sequential_fill_directive_on_continuation(self):
        cache = SegmentedCache(cfg(read_prefetch=ReadPrefetch.SEQUENTIAL_FILL))
        cache.read_lookup(0, 128)
        _, _, directives = cache.read_lookup(128, 128)
        assert len(directives) == 1
        d = directives[0]
        assert d.kind == "fill"
        assert d.lba == 256
        assert d.sectors == cache.config.segment_sectors

    def test_zero_sector_fill_rejected(self):
        cache = SegmentedCache(cfg())
        with pytest.raises(UnexpectedFill):
            cache.on_media_data(0, 0)

    def test_unmatched_fill_rejected(self):
        cache = SegmentedCache(cfg())
        with pytest.raises(UnexpectedFill):
            cache.on_media_data(0, 64)


class TestLocalPattern:
    def test_detector_fires_on_a_b_a_adjacent(self):
        det = LocalPatternDetector(radius_sectors=512)
        assert not det.observe(3 * BLOCK_SECTORS, BLOCK_SECTORS)  # A = block 3
        assert not det.observe(8 * BLOCK_SECTORS, BLOCK_SECTORS)  # B = block 8, gap 4 blocks
        assert det.observe(4 * BLOCK_SECTORS, BLOCK_SECTORS)  # A+adjacent fires

    def test_detector_ignores_pure_sequential(self):
        det = LocalPatternDetector(radius_sectors=512)
        fired = [det.observe(i * BLOCK_SECTORS, BLOCK_SECTORS) for i in range(6)]
        assert not any(fired)

    def test_detector_respects_radius(self):
        det = LocalPatternDetector(radius_sectors=512)
        det.observe(0, BLOCK_SECTORS)
        det.observe(6 * BLOCK_SECTORS, BLOCK_SECTORS)  # gap 5 blocks > radius
        assert not det.observe(BLOCK_SECTORS, BLOCK_SECTORS)

    def test_local_directive_from_third_request_start(self):
        cache = SegmentedCache(
            cfg(
                total_bytes=8 * 1024 * 1024,
                segment_count=16,
                segment_bytes=512 * 1024,
                read_prefetch=ReadPrefetch.LOCAL_512K,
            )
        )
        cache.read_lookup(3 * BLOCK_SECTORS, BLOCK_SECTORS)
        cache.read_lookup(8 * BLOCK_SECTORS, BLOCK_SECTORS)
        _, _, directives = cache.read_lookup(4 * BLOCK_SECTORS, BLOCK_SECTORS)
        local = [d for d in directives if d.kind == "local"]
        assert len(local) == 1
        assert local[0].lba == 4 * BLOCK_SECTORS
        assert local[0].sectors == 1024  # 512KB
        assert cache.local_prefetch_count == 1


class TestWrites:
    def test_write_back_acks_now(self):
        cache = SegmentedCache(cfg())
        ack, actions = cache.write_accept(0, 128, {s: 1 for s in range(128)})
        assert ack is Ack.ACK_NOW and actions == []
        assert cache.dirty_records == 1

    def test_write_through_acks_after_media(self):
        cache = SegmentedCache(cfg(write_policy=WritePolicy.WRITE_THROUGH))
        ack, actions = cache.write_accept(0, 128, {s: 1 for s in range(128)})
        assert ack is Ack.ACK_AFTER_MEDIA
        assert actions == [(0, 128, {s: 1 for s in range(128)})]
        assert cache.dirty_records == 0

    def test_forced_media_overrides_write_back(self):
        cache = SegmentedCache(cfg())
        ack, actions = cache.write_accept(0, 128, None, force_media=True)
        assert ack is Ack.ACK_AFTER_MEDIA and len(actions) == 1

    def test_destage_preserves_write_order_per_segment(self):
        cache = SegmentedCache(cfg())
        cache.write_accept(0, 64, {s: 1 for s in range(64)})
        cache.write_accept(64, 64, {s: 2 for s in range(64, 128)})
        first = cache.destage_next()
        second = cache.destage_next()
        assert first[0] == 0 and second[0] == 64
        assert cache.destage_next() is None

    def test_cache_full_without_destage(self):
        config = cfg(background_destage=False, segment_count=2, segment_bytes=64 * 1024, total_bytes=128 * 1024)
        cache = SegmentedCache(config)
        step = config.segment_sectors
        cache.write_accept(0, 8, {0: 0})
        cache.write_accept(10 * step, 8, {10 * step: 1})
        with pytest.raises(CacheFull):
            cache.write_accept(20 * step, 8, {20 * step: 2})

    def test_defer_when_destage_enabled(self):
        config = cfg(segment_count=2, segment_bytes=64 * 1024, total_bytes=128 * 1024)
        cache = SegmentedCache(config)
        step = config.segment_sectors
        cache.write_accept(0, 8, {0: 0})
        cache.write_accept(10 * step, 8, {10 * step: 1})
        ack, _ = cache.write_accept(20 * step, 8, {20 * step: 2})
        assert ack is Ack.DEFER


class TestCoherence:
    def test_read_after_write_hits_cached_data(self):
        cache = SegmentedCache(cfg())
        cache.write_accept(100, 64, {s: 9 for s in range(100, 164)})
        kind, missing, _ = cache.read_lookup(100, 64)
        assert kind is Lookup.HIT and not missing

    def test_read_after_destaged_write_still_hits(self):
        cache = SegmentedCache(cfg())
        cache.write_accept(100, 64, {s: 9 for s in range(100, 164)})
        cache.destage_next()
        kind, _, _ = cache.read_lookup(100, 64)
        assert kind is Lookup.HIT


class TestReplacement:
    def test_prefetch_lands_in_lru_victim(self):
        # Reference LRU oracle: victim is the least recently touched clean
        # segment.
        cache = SegmentedCache(cfg(segment_count=2, segment_bytes=64 * 1024, total_bytes=128 * 1024))
        step = cache.config.segment_sectors
        fill(cache, 0 * step * 10, 8)          # segment A
        fill(cache, 10 * step, 8)              # segment B
        cache.read_lookup(0, 8)                # touch A: B becomes LRU
        fill(cache, 20 * step, 8)              # must evict B
        assert cache.resident(0, 8)
        assert not cache.resident(10 * step, 8)
        assert cache.resident(20 * step, 8)

    def test_sliding_window_on_long_sequential_fill(self):
        cache = SegmentedCache(cfg(segment_count=2, segment_bytes=64 * 1024, total_bytes=128 * 1024))
        capacity = cache.config.segment_sectors
        fill(cache, 0, capacity)
        fill(cache, capacity, capacity // 2)  # extends and slides
        assert cache.resident(capacity, capacity // 2)
        assert not cache.resident(0, 1)

    def test_capacity_invariant(self):
        cache = SegmentedCache(cfg())
        for i in range(20):
            fill(cache, i * 1000, 128)
            assert cache.valid_bytes <= cache.config.total_bytes


class TestRepositionPenalty:
    def test_penalty_after_draining_local_prefetch_in_128k_slices(self):
        cache = SegmentedCache(
            cfg(
                total_bytes=8 * 1024 * 1024,
                segment_count=16,
                segment_bytes=512 * 1024,
                read_prefetch=ReadPrefetch.LOCAL_512K,
                reposition_penalty=True,
            )
        )
        fill(cache, 0, 1024, local=True)  # one 512KB local prefetch
        for i in range(4):  # drain it in 4 x 128KB hits
            kind, _, _ = cache.read_lookup(i * 256, 256)
            assert kind is Lookup.HIT
        assert cache.take_penalty_rotations() == 1
        assert cache.take_penalty_rotations() == 0

    def test_no_penalty_when_disabled(self):
        cache = SegmentedCache(
            cfg(
                total_bytes=8 * 1024 * 1024,
                segment_count=16,
                segment_bytes=512 * 1024,
                read_prefetch=ReadPrefetch.LOCAL_512K,
            )
        )
        fill(cache, 0, 1024, local=True)
        for i in range(4):
            cache.read_lookup(i * 256, 256)
        assert cache.take_penalty_rotations() == 0
