"""Replay orchestration: the five stack stages wired onto the event engine.

One replay is one single-threaded engine run.  The application stage paces
requests (closed loop, open loop, or closed loop with a measured-response
tolerance), the file-system cache stage executes planner intents, the
scheduler orders pending disk work, the drive cache stages data, and the
disk stage serializes media operations against the mechanical model while
maintaining a per-sector provenance image for conservation checks.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

from . import fscache as fsc
from .diskcache import Ack, DiskCacheConfig, PrefetchDirective, SegmentedCache
from .disk import DiskGeometry, HeadState, SeekProfile, cylinder_of_byte, service
from .engine import Simulator, SimEvent, StageId, EventLog
from .fscache import FsCache, FsCacheConfig, IoIntent
from .requests import CanonicalRequest, Op, Origin, RequestRecord, Summary
from .scheduler import PendingQueue, Policy


class ReplayMode(Enum):
    CLOSED_LOOP = "CLOSED_LOOP"
    OPEN_LOOP_TIMED = "OPEN_LOOP_TIMED"


@dataclass(frozen=True)
class ReplayPolicy:
    mode: ReplayMode = ReplayMode.CLOSED_LOOP
    tolerance_us: int = 0
    #: Measured per-request response times, keyed by request ordinal.
    baseline_us: dict[int, int] | None = None

    def __post_init__(self) -> None:
        if self.tolerance_us < 0:
            raise ValueError("tolerance_us must be >= 0")


@dataclass(frozen=True)
class StackConfig:
    geometry: DiskGeometry
    seek: SeekProfile
    fs: FsCacheConfig = field(default_factory=FsCacheConfig)
    cache: DiskCacheConfig = field(default_factory=DiskCacheConfig)
    scheduler_policy: Policy = Policy.FCFS
    include_system_requests: bool = False


# -- message payloads ---------------------------------------------------------


@dataclass
class RequestMsg:
    kind = "request"
    request_id: int
    request: CanonicalRequest

    def detail(self) -> str:
        r = self.request
        return (
            f"req={self.request_id} op={r.op.value} mode={r.mode.value} "
            f"addr={r.disk_byte_addr} bytes={r.length_bytes}"
        )


@dataclass
class RequestDoneMsg:
    kind = "request-done"
    request_id: int

    def detail(self) -> str:
        return f"req={self.request_id}"


@dataclass
class IoMsg:
    kind = "io"
    io_id: int
    intent: IoIntent
    request_id: int | None

    def detail(self) -> str:
        i = self.intent
        op = "write" if i.write else "read"
        req = self.request_id if self.request_id is not None else "-"
        return (
            f"io={self.io_id} op={op} addr={i.disk_addr} bytes={i.nbytes} "
            f"purpose={i.purpose} actor={i.actor} req={req}"
        )


@dataclass
class IoDoneMsg:
    kind = "io-done"
    io_id: int
    intent: IoIntent
    request_id: int | None

    def detail(self) -> str:
        return f"io={self.io_id} purpose={self.intent.purpose}"


@dataclass
class MediaMsg:
    kind = "media"
    media_id: int
    write: bool
    lba: int
    sectors: int
    purpose: str
    reply: tuple
    sector_tags: dict[int, int] | None = None
    penalty_rotations: int = 0

    def detail(self) -> str:
        op = "write" if self.write else "read"
        return f"media={self.media_id} op={op} lba={self.lba} sectors={self.sectors} purpose={self.purpose}"


@dataclass
class MediaDoneMsg:
    kind = "media-done"
    media_id: int
    write: bool
    lba: int
    sectors: int
    purpose: str
    reply: tuple

    def detail(self) -> str:
        return f"media={self.media_id} lba={self.lba} sectors={self.sectors} purpose={self.purpose}"


@dataclass
class MediaFinishMsg:
    kind = "media-finish"
    media_id: int

    def detail(self) -> str:
        return f"media={self.media_id}"


@dataclass
class FlushTickMsg:
    kind = "flush-tick"

    def detail(self) -> str:
        return "progressive"


@dataclass
class DrainMsg:
    kind = "drain"

    def detail(self) -> str:
        return "end-of-stream"


# -- stages -------------------------------------------------------------------


class AppStage:
    """Issues requests per the replay policy and records their latencies."""

    def __init__(self, requests: list[CanonicalRequest], policy: ReplayPolicy):
        self.requests = requests
        self.policy = policy
        self.issue_times: dict[int, int] = {}
        self.records: list[RequestRecord] = []
        self.completed = 0
        self.drained = False

    def start(self, sim: Simulator) -> None:
        if not self.requests:
            return
        if self.policy.mode is ReplayMode.OPEN_LOOP_TIMED:
            for i, r in enumerate(self.requests):
                sim.schedule(StageId.APP, RequestMsg(i, r), at_us=r.issue_time_us)
        else:
            sim.schedule(StageId.APP, RequestMsg(0, self.requests[0]), at_us=self.requests[0].issue_time_us)

    def handle(self, sim: Simulator, event: SimEvent) -> None:
        msg = event.payload
        if msg.kind == "request":
            self.issue_times[msg.request_id] = sim.now()
            sim.schedule(StageId.FS_CACHE, msg)
        elif msg.kind == "request-done":
            rid = msg.request_id
            r = self.requests[rid]
            issue = self.issue_times[rid]
            self.records.append(
                RequestRecord(
                    request_id=rid,
                    issue_us=issue,
                    complete_us=sim.now(),
                    bytes=r.length_bytes,
                    op=r.op,
                    mode=r.mode,
                    origin=r.origin,
                )
            )
            self.completed += 1
            if self.policy.mode is ReplayMode.CLOSED_LOOP and rid + 1 < len(self.requests):
                nxt = rid + 1
                at = self._next_issue_time(rid, issue, sim.now())
                sim.schedule(StageId.APP, RequestMsg(nxt, self.requests[nxt]), at_us=max(at, sim.now()))
            if self.completed == len(self.requests) and not self.drained:
                self.drained = True
                sim.schedule(StageId.FS_CACHE, DrainMsg())

    def _next_issue_time(self, rid: int, issue_us: int, complete_us: int) -> int:
        """Closed-loop pacing with the measured-response tolerance.

        The trace gap is honored when positive.  When a measured response
        time is supplied and it disagrees with the simulated one by less
        than the tolerance, the next issue snaps to the simulated
        completion (plus any think time beyond the measured response), so a
        small early finish cannot manufacture a near-full extra rotation.
        """

        gap = self.requests[rid + 1].issue_time_us - self.requests[rid].issue_time_us
        baseline = self.policy.baseline_us or {}
        if rid in baseline:
            measured = baseline[rid]
            simulated = complete_us - issue_us
            think = max(0, gap - measured)
            if abs(measured - simulated) < self.policy.tolerance_us:
                return complete_us + think
            return max(complete_us, issue_us + max(gap, measured))
        return max(complete_us, issue_us + gap)


@dataclass
class _PendingRequest:
    request_id: int
    required_ios: set[int] = field(default_factory=set)
    wait_blocks: set[tuple[int, int]] = field(default_factory=set)
    copy_us: int = 0
    metadata_after_data: bool = False
    passthrough: bool = False
    metadata_issued: bool = False


class FsStage:
    """Executes file-system cache plans and tracks request completion."""

    def __init__(self, sim: Simulator, fs: FsCache):
        self.sim = sim
        self.fs = fs
        self.pending: dict[int, _PendingRequest] = {}
        self.block_waiters: dict[tuple[int, int], list[int]] = {}
        self.io_owner: dict[int, int] = {}
        self.deferred: list[RequestMsg] = []
        self.wt_gate: int | None = None
        self.progressive_running = False
        self._io_seq = 0

    def _issue(self, intent: IoIntent, request_id: int | None, at_us: int) -> int:
        self._io_seq += 1
        io = IoMsg(self._io_seq, intent, request_id)
        self.sim.schedule(StageId.SCHEDULER, io, at_us=at_us)
        return self._io_seq

    def handle(self, sim: Simulator, event: SimEvent) -> None:
        msg = event.payload
        if msg.kind == "request":
            if self.wt_gate is not None:
                self.deferred.append(msg)
            else:
                self._admit(msg)
        elif msg.kind == "io-done":
            self._io_done(msg)
        elif msg.kind == "flush-tick":
            self._progressive_step()
        elif msg.kind == "drain":
            for intent in self.fs.flush_all():
                self._issue(intent, None, sim.now())

    # -- request admission ----------------------------------------------------

    def _admit(self, msg: RequestMsg) -> None:
        req, rid = msg.request, msg.request_id
        cfg = self.fs.config
        now = self.sim.now()
        if req.op in (Op.OPEN, Op.CLOSE):
            if req.op is Op.OPEN:
                # Fresh handle: speculation state restarts.
                self.fs.read_streams.pop(req.file_id, None)
                self.fs.write_streams.pop(req.file_id, None)
            self._complete(rid, at_us=now + cfg.open_close_cost_us)
            return
        if req.length_bytes == 0:
            self._complete(rid, at_us=now + cfg.fastio_hit_cost_us)
            return

        plan = self.fs.on_read(req) if req.op is Op.READ else self.fs.on_write(req, rid)
        pending = _PendingRequest(
            request_id=rid,
            wait_blocks=set(plan.wait_blocks),
            metadata_after_data=plan.metadata_after_data,
            passthrough=any(io.purpose == fsc.PASSTHROUGH for io in plan.ios),
        )
        for key in pending.wait_blocks:
            self.block_waiters.setdefault(key, []).append(rid)
        if not pending.passthrough:
            pending.copy_us = cfg.copy_us(plan.copy_bytes)

        if plan.hit and not plan.ios:
            self._complete(rid, at_us=now + cfg.fastio_hit_cost_us + pending.copy_us)
            return

        issue_at = now + (cfg.miss_path_cost_us if (plan.required_ios or pending.passthrough) else 0)
        for intent in plan.ios:
            io_id = self._issue(intent, rid if intent.required else None, issue_at)
            if intent.required:
                pending.required_ios.add(io_id)
                self.io_owner[io_id] = rid
        if plan.metadata_after_data:
            self.wt_gate = rid
        self.pending[rid] = pending
        if plan.kick_progressive and not self.progressive_running:
            self.progressive_running = True
            self.sim.schedule(StageId.FS_CACHE, FlushTickMsg())
        if not pending.required_ios and not pending.wait_blocks and not plan.metadata_after_data:
            # Only optional ios (prefetch/flush): serve from cache now.
            del self.pending[rid]
            self._complete(rid, at_us=now + self.fs.config.fastio_hit_cost_us + pending.copy_us)

    def _complete(self, request_id: int, at_us: int) -> None:
        self.sim.schedule(StageId.APP, RequestDoneMsg(request_id), at_us=at_us)

    # -- io completions ----------------------------------------------------------

    def _io_done(self, msg: IoDoneMsg) -> None:
        intent = msg.intent
        if intent.block_key is not None:
            self.fs.on_block_loaded(intent.block_key)
            for rid in self.block_waiters.pop(intent.block_key, []):
                pending = self.pending.get(rid)
                if pending is not None:
                    pending.wait_blocks.discard(intent.block_key)
                    self._maybe_finish(pending)
        if intent.purpose == fsc.FLUSH and self.progressive_running:
            self.sim.schedule(StageId.FS_CACHE, FlushTickMsg())
        rid = self.io_owner.pop(msg.io_id, None)
        if rid is not None:
            pending = self.pending.get(rid)
            if pending is not None:
                pending.required_ios.discard(msg.io_id)
                self._maybe_finish(pending)

    def _maybe_finish(self, pending: _PendingRequest) -> None:
        if pending.required_ios or pending.wait_blocks:
            return
        rid = pending.request_id
        if pending.metadata_after_data and not pending.metadata_issued:
            pending.metadata_issued = True
            intent = self.fs.metadata_io(rid)
            io_id = self._issue(intent, rid, self.sim.now())
            pending.required_ios.add(io_id)
            self.io_owner[io_id] = rid
            return
        del self.pending[rid]
        extra = 0 if pending.passthrough else pending.copy_us
        self._complete(rid, at_us=self.sim.now() + extra)
        if self.wt_gate == rid:
            self.wt_gate = None
            deferred, self.deferred = self.deferred, []
            for msg in deferred:
                if self.wt_gate is None:
                    self._admit(msg)
                else:
                    self.deferred.append(msg)

    def _progressive_step(self) -> None:
        ios = self.fs.next_progressive_flush()
        if not ios:
            self.progressive_running = False
            return
        for intent in ios:
            self._issue(intent, None, self.sim.now())


class SchedulerStage:
    """Holds disk-bound work and dispatches one request at a time per policy."""

    def __init__(self, sim: Simulator, policy: Policy, geometry: DiskGeometry):
        self.sim = sim
        self.queue = PendingQueue(policy=policy, max_cylinder=geometry.cylinders - 1)
        self.geometry = geometry
        self.by_id: dict[int, IoMsg] = {}
        self.inflight: int | None = None

    def handle(self, sim: Simulator, event: SimEvent) -> None:
        msg = event.payload
        if msg.kind == "io":
            self.by_id[msg.io_id] = msg
            self.queue.enqueue(msg.io_id, cylinder_of_byte(msg.intent.disk_addr, self.geometry))
            self._dispatch()
        elif msg.kind == "io-done":
            self.inflight = None
            sim.schedule(StageId.FS_CACHE, msg)
            self._dispatch()

    def _dispatch(self) -> None:
        if self.inflight is not None:
            return
        io_id = self.queue.next()
        if io_id is None:
            return
        self.inflight = io_id
        self.sim.schedule(StageId.DISK_CACHE, self.by_id.pop(io_id))


@dataclass
class _HostRead:
    io: IoMsg
    needed: list[tuple[int, int]]


class DiskCacheStage:
    """Drive cache: segment staging, prefetch chains, write acks, destage."""

    def __init__(self, sim: Simulator, cache: SegmentedCache, geometry: DiskGeometry):
        self.sim = sim
        self.cache = cache
        self.geometry = geometry
        self.host_reads: dict[int, _HostRead] = {}
        self.host_writes: dict[int, tuple[IoMsg, int]] = {}
        self.deferred_writes: list[IoMsg] = []
        self.fill_ranges: list[tuple[int, int]] = []  # [start, end) sector ranges to fill
        self.fill_inflight: set[tuple[int, int]] = set()
        self.destage_inflight = False
        self._fill_chunk_outstanding = False
        self._media_seq = 0

    # -- media plumbing ---------------------------------------------------------

    def _media(
        self,
        write: bool,
        lba: int,
        sectors: int,
        purpose: str,
        reply: tuple,
        tags: dict[int, int] | None = None,
    ) -> None:
        self._media_seq += 1
        self.sim.schedule(
            StageId.DISK,
            MediaMsg(
                media_id=self._media_seq,
                write=write,
                lba=lba,
                sectors=sectors,
                purpose=purpose,
                reply=reply,
                sector_tags=tags,
                penalty_rotations=self.cache.take_penalty_rotations(),
            ),
        )

    def _sectors(self, intent: IoIntent) -> tuple[int, int]:
        sb = self.cache.config.sector_bytes
        lba = intent.disk_addr // sb
        end = -(-(intent.disk_addr + intent.nbytes) // sb)
        return lba, max(1, end - lba)

    def handle(self, sim: Simulator, event: SimEvent) -> None:
        msg = event.payload
        if msg.kind == "io":
            if msg.intent.write:
                self._host_write(msg)
            else:
                self._host_read(msg)
        elif msg.kind == "media-done":
            self._media_done(msg)

    # -- reads --------------------------------------------------------------------

    def _host_read(self, msg: IoMsg) -> None:
        lba, sectors = self._sectors(msg.intent)
        _, missing, directives = self.cache.read_lookup(lba, sectors)
        # The host's own media reads go first so the media keeps ascending
        # LBA order; fill-ahead chunks (which sit beyond the request) queue
        # after them.
        needed = []
        for run_lba, run_sectors in missing:
            needed.append((run_lba, run_sectors))
            if not self._covered_by_fill(run_lba, run_sectors):
                self.cache.expect_fill(run_lba, run_sectors)
                self._media(False, run_lba, run_sectors, "host-fill", ("host", msg.io_id))
        self._apply_directives(directives)
        if needed:
            self.host_reads[msg.io_id] = _HostRead(msg, needed)
        else:
            self._reply_done(msg)

    def _covered_by_fill(self, lba: int, sectors: int) -> bool:
        """Whether in-flight plus queued fills will cover the run entirely."""

        intervals = sorted(list(self.fill_inflight) + [r for r in self.fill_ranges if r[1] > r[0]])
        cursor = lba
        for start, end in intervals:
            if start > cursor:
                break
            cursor = max(cursor, end)
            if cursor >= lba + sectors:
                return True
        return cursor >= lba + sectors

    def _apply_directives(self, directives: list[PrefetchDirective]) -> None:
        limit = self.geometry.usable_sectors
        for d in directives:
            end = min(d.lba + d.sectors, limit)
            if end <= d.lba:
                continue
            if d.kind == "local":
                self.cache.expect_fill(d.lba, end - d.lba)
                self.fill_inflight.add((d.lba, end))
                self._media(False, d.lba, end - d.lba, "local-prefetch", ("prefetch", True))
            else:
                self.fill_ranges.append((d.lba, end))
                self._next_fill_chunk()

    def _next_fill_chunk(self) -> None:
        if self._fill_chunk_outstanding:
            return
        chunk = self.cache.config.fill_chunk_sectors
        while self.fill_ranges:
            start, end = self.fill_ranges[0]
            if start >= end:
                self.fill_ranges.pop(0)
                continue
            take = min(chunk, end - start)
            self.fill_ranges[0] = (start + take, end)
            self.cache.expect_fill(start, take)
            self.fill_inflight.add((start, start + take))
            self._fill_chunk_outstanding = True
            self._media(False, start, take, "fill-chunk", ("prefetch", False))
            return

    def _reply_done(self, msg: IoMsg) -> None:
        self.sim.schedule(StageId.SCHEDULER, IoDoneMsg(msg.io_id, msg.intent, msg.request_id))

    # -- writes --------------------------------------------------------------------

    def _host_write(self, msg: IoMsg) -> None:
        lba, sectors = self._sectors(msg.intent)
        ack, media_actions = self.cache.write_accept(
            lba, sectors, msg.intent.sector_tags, force_media=msg.intent.force_media
        )
        if ack is Ack.ACK_NOW:
            self._reply_done(msg)
            self._kick_destage()
        elif ack is Ack.ACK_AFTER_MEDIA:
            outstanding = len(media_actions)
            self.host_writes[msg.io_id] = (msg, outstanding)
            for run_lba, run_sectors, tags in media_actions:
                self._media(
                    True, run_lba, run_sectors, msg.intent.purpose, ("host-write", msg.io_id), tags
                )
        else:  # DEFER: every segment dirty, wait for a destage to free one
            self.deferred_writes.append(msg)
            self._kick_destage()

    def _kick_destage(self) -> None:
        if self.destage_inflight or not self.cache.config.background_destage:
            return
        record = self.cache.destage_next()
        if record is None:
            return
        lba, sectors, tags = record
        self.destage_inflight = True
        self._media(True, lba, sectors, "destage", ("destage",), tags)

    # -- media completions ------------------------------------------------------------

    def _media_done(self, msg: MediaDoneMsg) -> None:
        reply = msg.reply
        if reply[0] == "host":
            self.cache.on_media_data(msg.lba, msg.sectors)
            # The host's own media read IS the delivery; it must not depend
            # on the data still being resident (a long transfer can slide
            # out of its staging segment before the request finishes).
            entry = self.host_reads.get(reply[1])
            if entry is not None and (msg.lba, msg.sectors) in entry.needed:
                entry.needed.remove((msg.lba, msg.sectors))
            self._settle_host_reads()
        elif reply[0] == "prefetch":
            local = reply[1]
            self.cache.on_media_data(msg.lba, msg.sectors, local=local)
            self.fill_inflight.discard((msg.lba, msg.lba + msg.sectors))
            if not local:
                self._fill_chunk_outstanding = False
                self._next_fill_chunk()
            self._settle_host_reads()
        elif reply[0] == "host-write":
            io_id = reply[1]
            held, outstanding = self.host_writes[io_id]
            if outstanding <= 1:
                del self.host_writes[io_id]
                self._reply_done(held)
            else:
                self.host_writes[io_id] = (held, outstanding - 1)
        elif reply[0] == "destage":
            self.destage_inflight = False
            self._kick_destage()
            if self.deferred_writes:
                retry, self.deferred_writes = self.deferred_writes, []
                for m in retry:
                    self._host_write(m)

    def _settle_host_reads(self) -> None:
        for io_id in list(self.host_reads):
            entry = self.host_reads[io_id]
            entry.needed = [
                run for run in entry.needed if not self.cache.resident(run[0], run[1])
            ]
            if not entry.needed:
                del self.host_reads[io_id]
                self._reply_done(entry.io)


class DiskStage:
    """Serial media execution against the mechanical model."""

    def __init__(
        self,
        sim: Simulator,
        geometry: DiskGeometry,
        seek: SeekProfile,
        head: HeadState | None = None,
    ):
        self.sim = sim
        self.geometry = geometry
        self.seek = seek
        self.head = head or HeadState()
        self.queue: list[MediaMsg] = []
        self.busy = False
        self.active: MediaMsg | None = None
        self.data_image: dict[int, int] = {}
        self.metadata_writes = 0
        self.media_busy_us = 0

    def handle(self, sim: Simulator, event: SimEvent) -> None:
        msg = event.payload
        if msg.kind == "media":
            self.queue.append(msg)
            if not self.busy:
                self._start_next()
        elif msg.kind == "media-finish":
            self._finish()

    def _start_next(self) -> None:
        if not self.queue:
            self.busy = False
            return
        msg = self.queue.pop(0)
        delay, new_head = service(
            msg.lba,
            msg.sectors,
            self.head,
            self.geometry,
            self.seek,
            arrival_us=self.sim.now(),
            write=msg.write,
        )
        if msg.penalty_rotations:
            delay += msg.penalty_rotations * self.geometry.rotation_period_us
        delay_us = max(1, round(delay))
        # Re-anchor the head clock on the integer event time so a
        # contiguous follow-up op sees its target sector exactly under the
        # head instead of a hair behind it (which would cost a phantom
        # revolution).
        self.head = replace(new_head, time_us=float(self.sim.now() + delay_us))
        self.busy = True
        self.active = msg
        self.media_busy_us += delay_us
        self.sim.schedule_after(StageId.DISK, MediaFinishMsg(msg.media_id), delay_us)

    def _finish(self) -> None:
        msg = self.active
        assert msg is not None
        if msg.write:
            if msg.purpose == fsc.METADATA or msg.sector_tags is None:
                self.metadata_writes += 1
            else:
                for sector, tag in msg.sector_tags.items():
                    self.data_image[sector] = tag
        self.sim.schedule(
            StageId.DISK_CACHE,
            MediaDoneMsg(msg.media_id, msg.write, msg.lba, msg.sectors, msg.purpose, msg.reply),
        )
        self.active = None
        self._start_next()


# -- top-level entry -------------------------------------------------------------


@dataclass
class ReplayResult:
    records: list[RequestRecord]
    summary: Summary
    event_log: EventLog
    effective_requests: list[CanonicalRequest]
    fs: FsCache
    disk_cache: SegmentedCache
    media_image: dict[int, int]
    metadata_writes: int
    clipped_requests: int


class ConfigurationError(ValueError):
    pass


class TraceReplayError(ValueError):
    pass


def file_extents(requests: list[CanonicalRequest]) -> dict[int, int]:
    """Known end-of-file per file, in disk-address space, from the trace."""

    extents: dict[int, int] = {}
    for r in requests:
        if r.op in (Op.READ, Op.WRITE):
            end = r.disk_byte_addr + r.length_bytes
            extents[r.file_id] = max(extents.get(r.file_id, 0), end)
    return extents


def reference_media_image(
    requests: list[CanonicalRequest], sector_bytes: int = 512
) -> dict[int, int]:
    """Apply the stream's writes in order, directly: the conservation oracle."""

    image: dict[int, int] = {}
    for ordinal, r in enumerate(requests):
        if r.op is Op.WRITE and r.length_bytes:
            first = r.disk_byte_addr // sector_bytes
            last = -(-(r.disk_byte_addr + r.length_bytes) // sector_bytes)
            for sector in range(first, last):
                image[sector] = ordinal
    return image


def replay(
    requests: list[CanonicalRequest],
    stack: StackConfig,
    policy: ReplayPolicy = ReplayPolicy(),
) -> ReplayResult:
    """Run one full-stack simulation of the request stream."""

    if not requests:
        raise TraceReplayError("cannot replay an empty trace")
    effective = [
        r
        for r in requests
        if stack.include_system_requests or r.origin is Origin.APP
    ]
    if not effective:
        raise TraceReplayError("no application-origin requests to replay")
    capacity = stack.geometry.usable_bytes
    for r in effective:
        if r.op in (Op.READ, Op.WRITE) and r.disk_byte_addr + r.length_bytes > capacity:
            raise TraceReplayError(
                f"request at disk byte {r.disk_byte_addr} (+{r.length_bytes}) exceeds the "
                f"configured disk capacity of {capacity} bytes"
            )

    sim = Simulator()
    fs = FsCache(stack.fs, file_extents(effective))
    cache = SegmentedCache(stack.cache)
    app = AppStage(effective, policy)
    fs_stage = FsStage(sim, fs)
    sched_stage = SchedulerStage(sim, stack.scheduler_policy, stack.geometry)
    cache_stage = DiskCacheStage(sim, cache, stack.geometry)
    disk_stage = DiskStage(sim, stack.geometry, stack.seek)

    sim.register(StageId.APP, app.handle)
    sim.register(StageId.FS_CACHE, fs_stage.handle)
    sim.register(StageId.SCHEDULER, sched_stage.handle)
    sim.register(StageId.DISK_CACHE, cache_stage.handle)
    sim.register(StageId.DISK, disk_stage.handle)

    app.start(sim)
    log = sim.run()
    records = sorted(app.records, key=lambda r: r.request_id)
    return ReplayResult(
        records=records,
        summary=Summary.from_records(records),
        event_log=log,
        effective_requests=effective,
        fs=fs,
        disk_cache=cache,
        media_image=disk_stage.data_image,
        metadata_writes=disk_stage.metadata_writes,
        clipped_requests=fs.clipped_requests,
    )
