"""Segmented on-drive cache with configurable prefetch and write policies.

Policies form a small library of observed drive behaviors: plain segment
caching, sequential fill-ahead, and a quirk seen on one tested drive that
prefetches 512KB whenever two nearby blocks are requested back to back
around a sequential continuation.  Write-back drives acknowledge into a
segment and destage in the background; write-through drives acknowledge
only after media completion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum


class CacheFull(Exception):
    """All segments dirty while background destage is disabled."""


class UnexpectedFill(Exception):
    """Media data arrived that no outstanding fill or prefetch asked for."""


class ReadPrefetch(Enum):
    NONE = "NONE"
    SEQUENTIAL_FILL = "SEQUENTIAL_FILL"
    #: Sequential fill plus the local-pattern 512KB prefetch quirk.
    LOCAL_512K = "LOCAL_512K"


class WritePolicy(Enum):
    WRITE_BACK = "WRITE_BACK"
    WRITE_THROUGH = "WRITE_THROUGH"


class Lookup(Enum):
    HIT = "HIT"
    PARTIAL = "PARTIAL"
    MISS = "MISS"


class Ack(Enum):
    ACK_NOW = "ACK_NOW"
    ACK_AFTER_MEDIA = "ACK_AFTER_MEDIA"
    DEFER = "DEFER"


@dataclass(frozen=True)
class DiskCacheConfig:
    total_bytes: int = 8 * 1024 * 1024
    segment_count: int = 16
    segment_bytes: int = 512 * 1024
    read_prefetch: ReadPrefetch = ReadPrefetch.SEQUENTIAL_FILL
    prefetch_block_bytes: int = 524_288
    write_policy: WritePolicy = WritePolicy.WRITE_BACK
    #: Two requests count as "local" when the second starts within this many
    #: sectors of the first one's end (the observed pattern gap is four
    #: 64KB blocks).
    locality_radius_sectors: int = 512
    #: Media ops used to fill ahead of a sequential stream.
    fill_chunk_sectors: int = 128
    #: Lose one revolution after draining a 512KB prefetch in 128KB slices.
    reposition_penalty: bool = False
    background_destage: bool = True
    sector_bytes: int = 512

    def __post_init__(self) -> None:
        if self.segment_count * self.segment_bytes > self.total_bytes:
            raise ValueError("segments exceed total cache size")
        if self.read_prefetch is not ReadPrefetch.NONE and self.prefetch_block_bytes <= 0:
            raise ValueError("prefetch_block_bytes must be positive when prefetch is enabled")

    @property
    def segment_sectors(self) -> int:
        return self.segment_bytes // self.sector_bytes

    @property
    def prefetch_block_sectors(self) -> int:
        return self.prefetch_block_bytes // self.sector_bytes


@dataclass
class Segment:
    """One contiguous staging region; the unit of replacement."""

    start: int = 0  # valid run [start, end) in absolute sectors
    end: int = 0
    capacity: int = 0
    last_touch: int = 0
    #: Pending write records in arrival order: (seq, lba, sectors, tags).
    write_queue: list[tuple[int, int, int, dict[int, int]]] = field(default_factory=list)
    local_prefetch: bool = False
    consumed_by_128k: int = 0

    @property
    def dirty(self) -> bool:
        return bool(self.write_queue)

    def covers(self, lba: int, sectors: int) -> bool:
        return self.start <= lba and lba + sectors <= self.end

    def overlaps(self, lba: int, sectors: int) -> bool:
        return lba < self.end and self.start < lba + sectors


@dataclass
class PrefetchDirective:
    lba: int
    sectors: int
    kind: str  # "fill" or "local"


@dataclass
class LocalPatternDetector:
    """Sliding window over the last three request extents.

    Fires on the shape A, B, A-adjacent: the third request continues the
    first one exactly while the middle one sits nearby on the platter.
    """

    radius_sectors: int
    window: list[tuple[int, int]] = field(default_factory=list)

    def observe(self, lba: int, sectors: int) -> bool:
        self.window.append((lba, sectors))
        if len(self.window) > 3:
            self.window.pop(0)
        if len(self.window) < 3:
            return False
        (a, a_len), (b, _), (c, _) = self.window
        return c == a + a_len and b != c and abs(b - (a + a_len)) <= self.radius_sectors


class SegmentedCache:
    """Drive cache state machine, independent of the event engine."""

    def __init__(self, config: DiskCacheConfig):
        self.config = config
        self.segments = [
            Segment(capacity=config.segment_sectors) for _ in range(config.segment_count)
        ]
        self.detector = LocalPatternDetector(config.locality_radius_sectors)
        self._touch_seq = 0
        self._write_seq = 0
        self._outstanding_fills: list[tuple[int, int]] = []
        self.seq_last_end: int | None = None
        self.fill_frontier = 0
        self.local_prefetch_count = 0
        self._penalty_pending = 0

    # -- bookkeeping ----------------------------------------------------------

    def _touch(self, segment: Segment) -> None:
        self._touch_seq += 1
        segment.last_touch = self._touch_seq

    def _segment_for(self, lba: int, sectors: int) -> Segment | None:
        for seg in self.segments:
            if seg.end > seg.start and (seg.overlaps(lba, sectors) or seg.end == lba):
                return seg
        return None

    def _allocate(self) -> Segment | None:
        """LRU-clean victim, or None when every segment is dirty."""

        clean = [(s.last_touch, i, s) for i, s in enumerate(self.segments) if not s.dirty]
        if not clean:
            return None
        victim = min(clean)[2]
        victim.start = victim.end = 0
        victim.local_prefetch = False
        victim.consumed_by_128k = 0
        return victim

    def resident(self, lba: int, sectors: int) -> bool:
        return any(s.covers(lba, sectors) for s in self.segments if s.end > s.start)

    def missing_runs(self, lba: int, sectors: int) -> list[tuple[int, int]]:
        runs: list[tuple[int, int]] = []
        cursor = lba
        end = lba + sectors
        while cursor < end:
            holder = next(
                (s for s in self.segments if s.end > s.start and s.start <= cursor < s.end),
                None,
            )
            if holder is None:
                run_end = cursor + 1
                while run_end < end and not any(
                    s.start <= run_end < s.end for s in self.segments if s.end > s.start
                ):
                    run_end += 1
                runs.append((cursor, run_end - cursor))
                cursor = run_end
            else:
                cursor = min(end, holder.end)
        return runs

    # -- reads -----------------------------------------------------------------

    def read_lookup(
        self, lba: int, sectors: int
    ) -> tuple[Lookup, list[tuple[int, int]], list[PrefetchDirective]]:
        """Classify a host read and emit any prefetch directives.

        Returns (classification, missing media runs, directives).  The
        caller is responsible for issuing the media reads and feeding
        completions back through :meth:`expect_fill` / :meth:`on_media_data`.
        """

        if sectors <= 0:
            raise ValueError("sectors must be positive")
        cfg = self.config
        missing = self.missing_runs(lba, sectors)
        if not missing:
            classification = Lookup.HIT
            holder = self._segment_for(lba, sectors)
            if holder is not None:
                self._touch(holder)
                if holder.local_prefetch and sectors * cfg.sector_bytes == 131_072:
                    holder.consumed_by_128k += sectors
                    if (
                        cfg.reposition_penalty
                        and holder.consumed_by_128k >= cfg.prefetch_block_sectors
                    ):
                        self._penalty_pending += 1
                        holder.consumed_by_128k = 0
        elif len(missing) == 1 and missing[0] == (lba, sectors):
            classification = Lookup.MISS
        else:
            classification = Lookup.PARTIAL

        directives: list[PrefetchDirective] = []
        sequential = self.seq_last_end is not None and lba == self.seq_last_end
        if cfg.read_prefetch is not ReadPrefetch.NONE and sequential:
            target = lba + sectors + cfg.segment_sectors
            frontier = max(self.fill_frontier, lba + sectors)
            if target > frontier:
                directives.append(PrefetchDirective(frontier, target - frontier, "fill"))
                self.fill_frontier = target
        elif not sequential:
            self.fill_frontier = 0
        if cfg.read_prefetch is ReadPrefetch.LOCAL_512K and self.detector.observe(lba, sectors):
            directives.append(PrefetchDirective(lba, cfg.prefetch_block_sectors, "local"))
            self.local_prefetch_count += 1
        self.seq_last_end = lba + sectors
        return classification, missing, directives

    def take_penalty_rotations(self) -> int:
        """Rotations of repositioning penalty owed to the next media op."""

        owed = self._penalty_pending
        self._penalty_pending = 0
        return owed

    # -- fills -------------------------------------------------------------------

    def expect_fill(self, lba: int, sectors: int) -> None:
        self._outstanding_fills.append((lba, sectors))

    def on_media_data(self, lba: int, sectors: int, local: bool = False) -> None:
        """A fill or prefetch read completed; stage the data in a segment."""

        if sectors <= 0 or (lba, sectors) not in self._outstanding_fills:
            raise UnexpectedFill(f"no outstanding fill for [{lba}, {lba + sectors})")
        self._outstanding_fills.remove((lba, sectors))
        self.insert_clean(lba, sectors, local=local)

    def insert_clean(self, lba: int, sectors: int, local: bool = False) -> None:
        seg = self._segment_for(lba, sectors)
        if seg is None:
            seg = self._allocate()
            if seg is None:
                return  # every segment dirty: serve uncached, cache nothing
            seg.start = seg.end = lba
        seg.end = max(seg.end, lba + sectors)
        # The active segment slides forward over a long sequential stream.
        if seg.end - seg.start > seg.capacity:
            seg.start = seg.end - seg.capacity
        if local:
            seg.local_prefetch = True
            seg.consumed_by_128k = 0
        self._touch(seg)

    # -- writes -----------------------------------------------------------------

    def write_accept(
        self, lba: int, sectors: int, tags: dict[int, int] | None, force_media: bool = False
    ) -> tuple[Ack, list[tuple[int, int, dict[int, int] | None]]]:
        """Accept a host write; returns (ack, media writes to issue now).

        Write-back acknowledges once the data sits in a segment and leaves
        destaging to :meth:`destage_next`; write-through (or a forced-media
        write) returns the media action and acknowledges on its completion.
        """

        if sectors <= 0:
            raise ValueError("sectors must be positive")
        cfg = self.config
        if cfg.write_policy is WritePolicy.WRITE_THROUGH or force_media:
            self.insert_clean_for_write(lba, sectors)
            return Ack.ACK_AFTER_MEDIA, [(lba, sectors, tags)]

        seg = self._segment_for(lba, sectors)
        if seg is None:
            seg = self._allocate()
            if seg is None:
                if not cfg.background_destage:
                    raise CacheFull("all segments dirty and background destage is disabled")
                return Ack.DEFER, []
            seg.start = seg.end = lba
        seg.end = max(seg.end, lba + sectors)
        if seg.end - seg.start > seg.capacity:
            seg.start = seg.end - seg.capacity
        self._write_seq += 1
        seg.write_queue.append((self._write_seq, lba, sectors, dict(tags or {})))
        self._touch(seg)
        return Ack.ACK_NOW, []

    def insert_clean_for_write(self, lba: int, sectors: int) -> None:
        # Written-through data stays readable from the cache afterwards.
        seg = self._segment_for(lba, sectors)
        if seg is not None and not seg.dirty:
            seg.end = max(seg.end, lba + sectors)
            if seg.end - seg.start > seg.capacity:
                seg.start = seg.end - seg.capacity
            self._touch(seg)

    def destage_next(self) -> tuple[int, int, dict[int, int]] | None:
        """Globally oldest pending write record.

        Global arrival order keeps overlapping writes staged in different
        segments from reaching the media out of order (and trivially
        preserves per-segment write order).
        """

        dirty = [s for s in self.segments if s.dirty]
        if not dirty:
            return None
        seg = min(dirty, key=lambda s: s.write_queue[0][0])
        _, lba, sectors, tags = seg.write_queue.pop(0)
        return lba, sectors, tags

    @property
    def dirty_records(self) -> int:
        return sum(len(s.write_queue) for s in self.segments)

    @property
    def valid_bytes(self) -> int:
        return sum((s.end - s.start) * self.config.sector_bytes for s in self.segments)
