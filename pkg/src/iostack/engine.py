"""Deterministic discrete-event core.

A single integer-microsecond clock and one ordered queue deliver messages
between the stack stages.  Ties at equal timestamps break by global
scheduling sequence, which pins down the one detail message-passing
frameworks usually leave implicit and makes whole runs replayable
byte-for-byte.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Protocol


class StageId(Enum):
    APP = "APP"
    FS_CACHE = "FS_CACHE"
    SCHEDULER = "SCHEDULER"
    DISK_CACHE = "DISK_CACHE"
    DISK = "DISK"


#: Request path in stack order; completions travel the reverse way.
STAGE_ORDER = (
    StageId.APP,
    StageId.FS_CACHE,
    StageId.SCHEDULER,
    StageId.DISK_CACHE,
    StageId.DISK,
)


def next_down(stage: StageId) -> StageId:
    return STAGE_ORDER[STAGE_ORDER.index(stage) + 1]


def next_up(stage: StageId) -> StageId:
    return STAGE_ORDER[STAGE_ORDER.index(stage) - 1]


class PastEvent(Exception):
    """An event was scheduled before the current clock."""


class UnknownStage(Exception):
    """A message targets a stage that was never registered."""


class StageFault(Exception):
    """Wraps a stage handler error together with the offending event."""

    def __init__(self, event: "SimEvent", original: BaseException):
        super().__init__(f"stage {event.target.value} failed on {event.describe()}: {original!r}")
        self.event = event
        self.original = original


class Payload(Protocol):
    kind: str

    def detail(self) -> str: ...


@dataclass(frozen=True)
class SimEvent:
    fire_at_us: int
    seq: int
    target: StageId
    payload: Payload

    def describe(self) -> str:
        return f"t={self.fire_at_us} stage={self.target.value} kind={self.payload.kind} {self.payload.detail()}"


@dataclass
class EventLog:
    """Ordered record of every dispatched event, exportable as text."""

    entries: list[SimEvent] = field(default_factory=list)

    def append(self, event: SimEvent) -> None:
        self.entries.append(event)

    def to_text(self) -> str:
        return "".join(e.describe() + "\n" for e in self.entries)

    def filter(self, stage: StageId | None = None, kind: str | None = None) -> list[SimEvent]:
        return [
            e
            for e in self.entries
            if (stage is None or e.target is stage) and (kind is None or e.payload.kind == kind)
        ]

    def __len__(self) -> int:
        return len(self.entries)


Handler = Callable[["Simulator", SimEvent], None]


class Simulator:
    """Single-threaded event loop shared by all stages of one run."""

    def __init__(self) -> None:
        self._queue: list[tuple[int, int, SimEvent]] = []
        self._handlers: dict[StageId, Handler] = {}
        self._clock = 0
        self._seq = 0
        self.log = EventLog()

    def now(self) -> int:
        return self._clock

    def register(self, stage: StageId, handler: Handler) -> None:
        self._handlers[stage] = handler

    def schedule(self, target: StageId, payload: Payload, at_us: int | None = None) -> SimEvent:
        """Enqueue a message; events at equal times dispatch in scheduling order."""

        fire_at = self._clock if at_us is None else at_us
        if fire_at < self._clock:
            raise PastEvent(f"cannot schedule at t={fire_at} when clock is t={self._clock}")
        if target not in self._handlers:
            raise UnknownStage(f"no handler registered for stage {target.value}")
        event = SimEvent(fire_at, self._seq, target, payload)
        self._seq += 1
        heapq.heappush(self._queue, (fire_at, event.seq, event))
        return event

    def schedule_after(self, target: StageId, payload: Payload, delay_us: int) -> SimEvent:
        return self.schedule(target, payload, self._clock + delay_us)

    def run(self, until_us: int | None = None) -> EventLog:
        """Dispatch events in order until the queue empties or the horizon passes."""

        while self._queue:
            fire_at, _, event = self._queue[0]
            if until_us is not None and fire_at > until_us:
                break
            heapq.heappop(self._queue)
            self._clock = fire_at
            self.log.append(event)
            handler = self._handlers[event.target]
            try:
                handler(self, event)
            except Exception as exc:
                raise StageFault(event, exc) from exc
        return self.log
