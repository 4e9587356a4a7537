"""Shared request model used by every layer of the simulated stack."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class Op(enum.Enum):
    OPEN = "OPEN"
    READ = "READ"
    WRITE = "WRITE"
    CLOSE = "CLOSE"


class AccessMode(enum.Enum):
    """File access mode fixed at open time and sticky until close."""

    NORMAL = "NORMAL"
    SEQUENTIAL = "SEQUENTIAL"
    NO_BUFFER = "NO_BUFFER"
    WRITE_THROUGH = "WRITE_THROUGH"


class Origin(enum.Enum):
    APP = "APP"
    SYSTEM = "SYSTEM"


@dataclass(frozen=True)
class CanonicalRequest:
    """One normalized I/O request, the unit every stage of the stack consumes.

    ``disk_byte_addr`` is the absolute on-disk position of the request
    (cluster number times cluster size plus the in-file offset for
    trace-derived requests); ``file_offset_bytes`` stays file-relative so
    cache views can be indexed per file.
    """

    issue_time_us: int
    origin: Origin
    op: Op
    file_id: int
    file_offset_bytes: int
    length_bytes: int
    disk_byte_addr: int
    mode: AccessMode = AccessMode.NORMAL

    def __post_init__(self) -> None:
        if self.issue_time_us < 0:
            raise ValueError("issue_time_us must be >= 0")
        if self.file_offset_bytes < 0 or self.length_bytes < 0:
            raise ValueError("offset and length must be >= 0")
        if self.disk_byte_addr < 0:
            raise ValueError("disk_byte_addr must be >= 0")

    @property
    def end_offset(self) -> int:
        return self.file_offset_bytes + self.length_bytes


@dataclass
class RequestRecord:
    """Per-request outcome of a replay run."""

    request_id: int
    issue_us: int
    complete_us: int
    bytes: int
    op: Op
    mode: AccessMode
    origin: Origin

    def __post_init__(self) -> None:
        if self.complete_us < self.issue_us:
            raise ValueError("complete_us must be >= issue_us")

    @property
    def latency_us(self) -> int:
        return self.complete_us - self.issue_us


@dataclass
class Summary:
    """Aggregate metrics over the application-origin requests of one run."""

    total_requests: int = 0
    total_bytes: int = 0
    total_response_us: int = 0
    first_issue_us: int = 0
    last_complete_us: int = 0
    per_mode: dict = field(default_factory=dict)

    @property
    def makespan_us(self) -> int:
        return self.last_complete_us - self.first_issue_us

    @property
    def throughput_bytes_per_s(self) -> float:
        if self.makespan_us <= 0:
            return 0.0
        return self.total_bytes * 1_000_000 / self.makespan_us

    @classmethod
    def from_records(cls, records: list[RequestRecord]) -> "Summary":
        app = [r for r in records if r.origin is Origin.APP]
        s = cls()
        if not app:
            return s
        s.total_requests = len(app)
        s.total_bytes = sum(r.bytes for r in app)
        s.total_response_us = sum(r.latency_us for r in app)
        s.first_issue_us = min(r.issue_us for r in app)
        s.last_complete_us = max(r.complete_us for r in app)
        for r in app:
            bucket = s.per_mode.setdefault(
                r.mode.value, {"requests": 0, "bytes": 0, "response_us": 0}
            )
            bucket["requests"] += 1
            bucket["bytes"] += r.bytes
            bucket["response_us"] += r.latency_us
        return s
