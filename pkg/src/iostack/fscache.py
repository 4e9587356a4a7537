"""File-system cache model: quantization, read-ahead and write-flush regimes.

All cache-mediated traffic moves in 64KB blocks inside 256KB per-file views.
Reads follow one of two speculative algorithms depending on access mode and
request size; writes fall into a progressive regime (cache only, drained
continuously) or a periodic one (part cache, part direct to disk, bulk
flush when the working set fills).  The planner here is pure: it turns one
request plus cache state into an ordered list of intents that the replay
stage executes on the event engine.

Cache state is keyed by absolute disk position rather than in-file offsets:
captured traces report per-run relative displacements, so the disk address
is the one coordinate that stays consistent between real and synthetic
workloads.
"""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .requests import AccessMode, CanonicalRequest, Op

BLOCK_BYTES = 65_536
VIEW_BYTES = 262_144

# io purposes
DEMAND = "demand"
PREFETCH = "prefetch"
PASSTHROUGH = "passthrough"
APP_DIRECT = "app-direct"
FLUSH = "flush"
WT_DATA = "wt-data"
METADATA = "metadata"

APP_ACTOR = "app"
SYSTEM_ACTOR = "system"


class WriteRegime(Enum):
    PROGRESSIVE = "PROGRESSIVE"
    PERIODIC = "PERIODIC"


@dataclass(frozen=True)
class FsCacheConfig:
    block_bytes: int = BLOCK_BYTES
    view_bytes: int = VIEW_BYTES
    #: Sequential requests needed before read-ahead engages.
    readahead_trigger: int = 3
    #: Prefetch may run this many request-sizes past the last demand.
    readahead_window_factor: int = 2
    working_set_bytes: int = 8 * 1024 * 1024
    #: Dirty data may grow to working_set - reserve before the bulk flush.
    #: 6MB leaves a 2MB flush threshold, which reproduces the observed
    #: flush cadence of one bulk flush per 7-8 large requests at an 8MB
    #: working set.
    reserve_constant_bytes: int = 6 * 1024 * 1024
    #: Sizes written progressively: everything at or below this bound...
    progressive_max_bytes: int = 98_304
    #: ...plus these two exact sizes.
    progressive_exact_sizes: tuple[int, ...] = (131_072, 262_144)
    #: Observed block accounting that deviates from ceil(size/64KB).
    periodic_block_overrides: tuple[tuple[int, int], ...] = ((327_680, 6),)
    fastio_hit_cost_us: int = 10
    miss_path_cost_us: int = 50
    memcopy_bytes_per_us: int = 2048
    cache_capacity_bytes: int = 128 * 1024 * 1024
    metadata_write_bytes: int = 4096
    metadata_disk_addr: int = 0
    open_close_cost_us: int = 0
    sector_bytes: int = 512

    def __post_init__(self) -> None:
        if self.block_bytes <= 0 or self.view_bytes % self.block_bytes:
            raise ValueError("block size must divide the view size")
        for name in (
            "readahead_trigger",
            "readahead_window_factor",
            "working_set_bytes",
            "memcopy_bytes_per_us",
            "cache_capacity_bytes",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.reserve_constant_bytes < self.working_set_bytes:
            raise ValueError("reserve must be smaller than the working set")

    @property
    def flush_threshold_bytes(self) -> int:
        return self.working_set_bytes - self.reserve_constant_bytes

    @property
    def slots_per_view(self) -> int:
        return self.view_bytes // self.block_bytes

    def copy_us(self, nbytes: int) -> int:
        return -(-nbytes // self.memcopy_bytes_per_us) if nbytes else 0


def split_into_blocks(
    offset_bytes: int, length_bytes: int, block_bytes: int = BLOCK_BYTES
) -> list[tuple[int, int]]:
    """Cover [offset, offset+length) with whole, aligned cache blocks.

    A sub-block request still yields one full block; a request straddling a
    boundary yields every block it touches.
    """

    if length_bytes < 0:
        raise ValueError("length must be >= 0")
    if length_bytes == 0:
        return []
    first = offset_bytes - offset_bytes % block_bytes
    end = offset_bytes + length_bytes
    last = end + (-end % block_bytes)
    return [(start, block_bytes) for start in range(first, last, block_bytes)]


def classify_write_regime(size_bytes: int, config: FsCacheConfig) -> WriteRegime:
    """Progressive for small requests and the two exact larger sizes."""

    if size_bytes <= 0:
        raise ValueError("size must be positive")
    if size_bytes <= config.progressive_max_bytes or size_bytes in config.progressive_exact_sizes:
        return WriteRegime.PROGRESSIVE
    return WriteRegime.PERIODIC


def periodic_block_count(size_bytes: int, config: FsCacheConfig) -> int:
    for size, blocks in config.periodic_block_overrides:
        if size == size_bytes:
            return blocks
    return -(-size_bytes // config.block_bytes)


def periodic_split(block_count: int, period_position: int) -> tuple[int, int]:
    """(cache blocks, direct-to-disk blocks) at one period position.

    Splits march from an even cache/disk division to all-cache over a
    period of floor(n/2)+1 requests: for 6-block requests the sequence is
    3/3, 4/2, 5/1, 6/0.
    """

    cached = -(-block_count // 2) + period_position
    return cached, block_count - cached


def periodic_period_length(block_count: int) -> int:
    return block_count // 2 + 1


@dataclass
class IoIntent:
    """One disk-bound operation the planner wants issued, in list order."""

    write: bool
    disk_addr: int
    nbytes: int
    purpose: str
    actor: str
    required: bool
    force_media: bool = False
    block_key: tuple[int, int] | None = None
    sector_tags: dict[int, int] | None = None


@dataclass
class Plan:
    """Outcome of planning one request against the cache state."""

    ios: list[IoIntent] = field(default_factory=list)
    wait_blocks: list[tuple[int, int]] = field(default_factory=list)
    copy_bytes: int = 0
    hit: bool = False
    metadata_after_data: bool = False
    clipped_bytes: int = 0
    kick_progressive: bool = False

    @property
    def required_ios(self) -> list[IoIntent]:
        return [io for io in self.ios if io.required]


@dataclass
class View:
    """Minimum cache allocation for a file: four 64KB block slots."""

    file_id: int
    base_addr: int
    resident: set[int] = field(default_factory=set)
    dirty: set[int] = field(default_factory=set)


@dataclass
class ReadStream:
    """Per-file sequential detection shared by both read algorithms."""

    last_end: int = -1
    sequential_count: int = 0
    prefetch_cursor: int = 0

    @property
    def active(self) -> bool:
        return self.sequential_count > 0


@dataclass
class WriteStream:
    period_position: int = 0
    block_count: int = 0


class FsCache:
    """Mutable cache state plus pure per-request planning."""

    def __init__(self, config: FsCacheConfig, file_extents: dict[int, int] | None = None):
        self.config = config
        self.extents: dict[int, int] = dict(file_extents or {})
        self.views: OrderedDict[tuple[int, int], View] = OrderedDict()
        self.inflight: set[tuple[int, int]] = set()
        self.read_streams: dict[int, ReadStream] = {}
        self.write_streams: dict[int, WriteStream] = {}
        #: Dirty block queue in first-write order; values map sector -> tag.
        self.dirty_blocks: OrderedDict[tuple[int, int], dict[int, int]] = OrderedDict()
        self.dirty_accounted_bytes = 0
        self.resident_bytes = 0
        self.flush_ordinals: list[int] = []
        self.write_splits: list[tuple[int, int, int]] = []
        self.clipped_requests = 0

    # -- residency ----------------------------------------------------------

    def _view_of(self, file_id: int, block_addr: int) -> tuple[tuple[int, int], int]:
        base = block_addr - block_addr % self.config.view_bytes
        slot = (block_addr - base) // self.config.block_bytes
        return (file_id, base), slot

    def _touch(self, key: tuple[int, int]) -> View:
        view = self.views.get(key)
        if view is None:
            view = View(file_id=key[0], base_addr=key[1])
            self.views[key] = view
        else:
            self.views.move_to_end(key)
        return view

    def block_resident(self, file_id: int, block_addr: int) -> bool:
        key, slot = self._view_of(file_id, block_addr)
        view = self.views.get(key)
        return view is not None and slot in view.resident

    def block_inflight(self, file_id: int, block_addr: int) -> bool:
        return (file_id, block_addr) in self.inflight

    def mark_resident(self, file_id: int, block_addr: int, dirty: bool = False) -> None:
        key, slot = self._view_of(file_id, block_addr)
        view = self._touch(key)
        if slot not in view.resident:
            view.resident.add(slot)
            self.resident_bytes += self.config.block_bytes
        if dirty:
            view.dirty.add(slot)
        self._evict_to_capacity()

    def on_block_loaded(self, block_key: tuple[int, int]) -> None:
        """A demand or prefetch load finished; the block is now servable."""

        self.inflight.discard(block_key)
        self.mark_resident(*block_key)

    def _evict_to_capacity(self) -> None:
        # Clean views go first, oldest first; dirty or loading views are pinned.
        for key in list(self.views):
            if self.resident_bytes <= self.config.cache_capacity_bytes:
                break
            view = self.views[key]
            if view.dirty:
                continue
            if any(
                (view.file_id, view.base_addr + s * self.config.block_bytes) in self.inflight
                for s in range(self.config.slots_per_view)
            ):
                continue
            self.resident_bytes -= len(view.resident) * self.config.block_bytes
            del self.views[key]

    def resident_block_count(self) -> int:
        return sum(len(v.resident) for v in self.views.values())

    # -- reads ---------------------------------------------------------------

    def _uses_block_readahead(self, req: CanonicalRequest) -> bool:
        """Sequential-style 64KB read-ahead vs the dual-actor window algorithm.

        Sequential mode with exact block multiples keeps the simple block
        read-ahead; every other cached read at or below one block does too.
        Larger normal-mode requests (and sequential requests of awkward
        sizes, whose behavior tracks normal mode) use the window algorithm.
        """

        if req.mode is AccessMode.SEQUENTIAL:
            return req.length_bytes % self.config.block_bytes == 0
        return req.length_bytes <= self.config.block_bytes

    def _classify_blocks(
        self, file_id: int, blocks: list[tuple[int, int]]
    ) -> tuple[list[int], list[tuple[int, int]]]:
        missing: list[int] = []
        waiting: list[tuple[int, int]] = []
        for addr, _ in blocks:
            if self.block_resident(file_id, addr):
                continue
            if self.block_inflight(file_id, addr):
                waiting.append((file_id, addr))
            else:
                missing.append(addr)
        return missing, waiting

    def _read_io(self, file_id: int, addr: int, purpose: str, actor: str, required: bool) -> IoIntent:
        key = (file_id, addr)
        self.inflight.add(key)
        return IoIntent(
            write=False,
            disk_addr=addr,
            nbytes=self.config.block_bytes,
            purpose=purpose,
            actor=actor,
            required=required,
            block_key=key,
        )

    def on_read(self, req: CanonicalRequest) -> Plan:
        if req.op is not Op.READ:
            raise ValueError("on_read requires a READ request")
        cfg = self.config
        if req.mode is AccessMode.NO_BUFFER:
            # The cache manager is bypassed outright: one disk request of
            # the original size, no cache state touched.
            return Plan(
                ios=[
                    IoIntent(
                        write=False,
                        disk_addr=req.disk_byte_addr,
                        nbytes=req.length_bytes,
                        purpose=PASSTHROUGH,
                        actor=APP_ACTOR,
                        required=True,
                    )
                ]
            )

        eof = self.extents.get(req.file_id, req.disk_byte_addr + req.length_bytes)
        start, end = req.disk_byte_addr, req.disk_byte_addr + req.length_bytes
        plan = Plan(copy_bytes=max(0, min(end, eof) - start))
        if plan.copy_bytes < req.length_bytes:
            plan.clipped_bytes = req.length_bytes - plan.copy_bytes
            self.clipped_requests += 1

        blocks = [
            (addr, size)
            for addr, size in split_into_blocks(start, req.length_bytes, cfg.block_bytes)
            if addr < eof
        ]
        stream = self.read_streams.setdefault(req.file_id, ReadStream())
        continuation = start == stream.last_end
        missing, waiting = self._classify_blocks(req.file_id, blocks)
        plan.wait_blocks = waiting

        if self._uses_block_readahead(req):
            stream.sequential_count = stream.sequential_count + 1 if continuation else 1
            if not continuation:
                stream.prefetch_cursor = end
            demand_ios = [
                self._read_io(req.file_id, addr, DEMAND, SYSTEM_ACTOR, True) for addr in missing
            ]
            prefetch_ios = []
            if stream.sequential_count >= cfg.readahead_trigger and req.length_bytes:
                window_end = min(end + cfg.readahead_window_factor * req.length_bytes, eof)
                cursor = max(stream.prefetch_cursor, end)
                cursor -= cursor % cfg.block_bytes
                for addr in range(cursor, window_end, cfg.block_bytes):
                    if not self.block_resident(req.file_id, addr) and not self.block_inflight(
                        req.file_id, addr
                    ):
                        prefetch_ios.append(
                            self._read_io(req.file_id, addr, PREFETCH, SYSTEM_ACTOR, False)
                        )
                stream.prefetch_cursor = max(cursor, window_end)
            plan.ios = demand_ios + prefetch_ios
        else:
            # Window algorithm: the first request of a stream is loaded by
            # the system process; on each sequential continuation the system
            # leapfrogs one request-size window ahead while the application
            # process fills the current one, the two interleaving at the
            # disk with the system's blocks leading.
            if continuation:
                demand_ios = [
                    self._read_io(req.file_id, addr, DEMAND, APP_ACTOR, True) for addr in missing
                ]
                prefetch_ios = []
                for addr, _ in split_into_blocks(end, req.length_bytes, cfg.block_bytes):
                    if addr < eof and not self.block_resident(
                        req.file_id, addr
                    ) and not self.block_inflight(req.file_id, addr):
                        prefetch_ios.append(
                            self._read_io(req.file_id, addr, PREFETCH, SYSTEM_ACTOR, False)
                        )
                plan.ios = _interleave(prefetch_ios, demand_ios)
            else:
                plan.ios = [
                    self._read_io(req.file_id, addr, DEMAND, SYSTEM_ACTOR, True) for addr in missing
                ]
            stream.sequential_count = stream.sequential_count + 1 if continuation else 1

        stream.last_end = end
        plan.hit = not plan.required_ios and not plan.wait_blocks
        return plan

    # -- writes ---------------------------------------------------------------

    def _dirty_sectors(self, file_id: int, start: int, nbytes: int, tag: int) -> None:
        cfg = self.config
        for addr, _ in split_into_blocks(start, nbytes, cfg.block_bytes):
            key = (file_id, addr)
            sectors = self.dirty_blocks.setdefault(key, {})
            lo = max(start, addr) // cfg.sector_bytes
            hi = -(-min(start + nbytes, addr + cfg.block_bytes) // cfg.sector_bytes)
            for sector in range(lo, hi):
                sectors[sector] = tag
            self.mark_resident(file_id, addr, dirty=True)

    def _write_run_ios(
        self,
        file_id: int,
        start: int,
        nbytes: int,
        tag: int,
        purpose: str,
        actor: str,
        required: bool,
        force_media: bool = False,
    ) -> list[IoIntent]:
        """Quantize a write range into per-block media write intents."""

        cfg = self.config
        ios = []
        for addr, _ in split_into_blocks(start, nbytes, cfg.block_bytes):
            lo = max(start, addr)
            hi = min(start + nbytes, addr + cfg.block_bytes)
            tags = {s: tag for s in range(lo // cfg.sector_bytes, -(-hi // cfg.sector_bytes))}
            ios.append(
                IoIntent(
                    write=True,
                    disk_addr=lo,
                    nbytes=hi - lo,
                    purpose=purpose,
                    actor=actor,
                    required=required,
                    force_media=force_media,
                    sector_tags=tags,
                )
            )
        return ios

    def _direct_write_ios(
        self, file_id: int, start: int, nbytes: int, tag: int
    ) -> list[IoIntent]:
        """Per-block direct disk writes for the uncached part of a request.

        Sectors that are currently dirty in the cache are updated there
        instead, so a later flush can never land stale data over a newer
        direct write.
        """

        cfg = self.config
        ios = []
        for addr, _ in split_into_blocks(start, nbytes, cfg.block_bytes):
            lo = max(start, addr)
            hi = min(start + nbytes, addr + cfg.block_bytes)
            dirty = self.dirty_blocks.get((file_id, addr))
            tags: dict[int, int] = {}
            for sector in range(lo // cfg.sector_bytes, -(-hi // cfg.sector_bytes)):
                if dirty is not None and sector in dirty:
                    dirty[sector] = tag
                else:
                    tags[sector] = tag
            for run_start, run_tags in _contiguous_runs(tags):
                ios.append(
                    IoIntent(
                        write=True,
                        disk_addr=run_start * cfg.sector_bytes,
                        nbytes=len(run_tags) * cfg.sector_bytes,
                        purpose=APP_DIRECT,
                        actor=APP_ACTOR,
                        required=True,
                        sector_tags=run_tags,
                    )
                )
        return ios

    def on_write(self, req: CanonicalRequest, tag: int) -> Plan:
        if req.op is not Op.WRITE:
            raise ValueError("on_write requires a WRITE request")
        cfg = self.config
        if req.mode is AccessMode.NO_BUFFER:
            return Plan(
                ios=[
                    IoIntent(
                        write=True,
                        disk_addr=req.disk_byte_addr,
                        nbytes=req.length_bytes,
                        purpose=PASSTHROUGH,
                        actor=APP_ACTOR,
                        required=True,
                        sector_tags={
                            s: tag
                            for s in range(
                                req.disk_byte_addr // cfg.sector_bytes,
                                -(-(req.disk_byte_addr + req.length_bytes) // cfg.sector_bytes),
                            )
                        },
                    )
                ]
            )

        start, length = req.disk_byte_addr, req.length_bytes
        if req.mode is AccessMode.WRITE_THROUGH:
            # Copy to cache block by block, push the data through to media,
            # then update the file's metadata before admitting the next
            # request.
            for addr, _ in split_into_blocks(start, length, cfg.block_bytes):
                self.mark_resident(req.file_id, addr)
            plan = Plan(copy_bytes=length, metadata_after_data=True)
            plan.ios = self._write_run_ios(
                req.file_id, start, length, tag, WT_DATA, APP_ACTOR, True, force_media=True
            )
            return plan

        regime = classify_write_regime(length, cfg)
        n = periodic_block_count(length, cfg)
        stream = self.write_streams.setdefault(req.file_id, WriteStream())
        plan = Plan()
        if regime is WriteRegime.PROGRESSIVE:
            cached_blocks, direct_blocks = n, 0
            cache_bytes, direct_bytes = length, 0
            plan.kick_progressive = True
        else:
            if stream.block_count != n:
                stream.block_count = n
                stream.period_position = 0
            cached_blocks, direct_blocks = periodic_split(n, stream.period_position)
            stream.period_position = (stream.period_position + 1) % periodic_period_length(n)
            cache_bytes = min(cached_blocks * cfg.block_bytes, length)
            direct_bytes = length - cache_bytes

        self.write_splits.append((tag, cached_blocks, direct_blocks))
        plan.copy_bytes = cache_bytes
        if cache_bytes:
            self._dirty_sectors(req.file_id, start, cache_bytes, tag)
            # Dirty growth is accounted in whole blocks, matching the
            # observed flush cadence rather than raw byte counts.
            self.dirty_accounted_bytes += cached_blocks * cfg.block_bytes
        if direct_bytes:
            plan.ios.extend(
                self._direct_write_ios(req.file_id, start + cache_bytes, direct_bytes, tag)
            )
        if (
            regime is WriteRegime.PERIODIC
            and self.dirty_accounted_bytes >= cfg.flush_threshold_bytes
        ):
            plan.ios.extend(self.flush_all())
            self.flush_ordinals.append(tag)
        return plan

    # -- flushing ---------------------------------------------------------------

    def _flush_block(self, key: tuple[int, int], sectors: dict[int, int]) -> list[IoIntent]:
        cfg = self.config
        file_id, addr = key
        view_key, slot = self._view_of(file_id, addr)
        view = self.views.get(view_key)
        if view is not None:
            view.dirty.discard(slot)
        ios = []
        for run_start, run_tags in _contiguous_runs(sectors):
            ios.append(
                IoIntent(
                    write=True,
                    disk_addr=run_start * cfg.sector_bytes,
                    nbytes=len(run_tags) * cfg.sector_bytes,
                    purpose=FLUSH,
                    actor=SYSTEM_ACTOR,
                    required=False,
                    sector_tags=run_tags,
                )
            )
        return ios

    def flush_all(self) -> list[IoIntent]:
        """Drain the whole dirty set in first-write order."""

        ios = []
        while self.dirty_blocks:
            key, sectors = self.dirty_blocks.popitem(last=False)
            ios.extend(self._flush_block(key, sectors))
        self.dirty_accounted_bytes = 0
        return ios

    def next_progressive_flush(self) -> list[IoIntent]:
        """One 64KB block for the continuous destage chain, oldest first."""

        if not self.dirty_blocks:
            self.dirty_accounted_bytes = 0
            return []
        key, sectors = self.dirty_blocks.popitem(last=False)
        self.dirty_accounted_bytes = max(
            0, self.dirty_accounted_bytes - self.config.block_bytes
        )
        return self._flush_block(key, sectors)

    @property
    def dirty_bytes(self) -> int:
        return self.dirty_accounted_bytes

    def metadata_io(self, tag: int) -> IoIntent:
        cfg = self.config
        return IoIntent(
            write=True,
            disk_addr=cfg.metadata_disk_addr,
            nbytes=cfg.metadata_write_bytes,
            purpose=METADATA,
            actor=SYSTEM_ACTOR,
            required=True,
            force_media=True,
            sector_tags=None,
        )


def _interleave(first: list, second: list) -> list:
    """Alternate two lists starting with the first; leftovers keep order."""

    out = []
    for a, b in zip(first, second):
        out.append(a)
        out.append(b)
    longer = first if len(first) > len(second) else second
    out.extend(longer[min(len(first), len(second)):])
    return out


def _contiguous_runs(sectors: dict[int, int]) -> Iterator[tuple[int, dict[int, int]]]:
    """Split a sector->tag map into contiguous runs (keys sorted)."""

    run_start = None
    run: dict[int, int] = {}
    prev = None
    for sector in sorted(sectors):
        if prev is not None and sector == prev + 1:
            run[sector] = sectors[sector]
        else:
            if run_start is not None:
                yield run_start, run
            run_start = sector
            run = {sector: sectors[sector]}
        prev = sector
    if run_start is not None:
        yield run_start, run
