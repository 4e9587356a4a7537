"""Filemon-style trace ingestion.

Parses the tracer's text records, repairs the known defects of that format
(relative displacements instead of logical disk addresses, OS helper-process
requests mixed into the application stream), and emits canonical requests.
Also defines the line-oriented canonical trace format shared by real and
synthetic workloads.
"""

from __future__ import annotations

import io
import re
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import IO, Iterable, Sequence

from .requests import AccessMode, CanonicalRequest, Op, Origin

CANONICAL_FORMAT_VERSION = 1

#: Processes whose I/O is OS housekeeping, not application workload.
DEFAULT_SYSTEM_PROCESSES = ("csrss.exe", "explorer.exe")


class TraceError(Exception):
    """Base class for trace ingestion failures."""


class MalformedLine(TraceError):
    pass


class UnknownOp(TraceError):
    pass


class BadTime(TraceError):
    pass


class CanonicalFormatError(TraceError):
    pass


class OpenFlag(Enum):
    """Open-time option tokens that matter to the cache model."""

    NO_BUFFER = "NoBuffer"
    WRITE_THROUGH = "WriteThrough"
    SEQUENTIAL_SCAN = "SequentialScan"
    OPEN_IF = "OpenIf"


_FLAG_TOKENS = {f.value: f for f in OpenFlag}

_TIME_RE = re.compile(r"^(\d{1,2}):(\d{1,2}):(\d{1,2})(?:\.(\d{1,6}))?$")
_IO_DETAIL_RE = re.compile(r"LCN:\s*(\d+)\s+Offset:\s*(\d+)\s+Length:\s*(\d+)")
# Records are tab-delimited; some captures use runs of spaces instead.  A
# single space never separates fields, so paths with spaces survive.
_FIELD_SPLIT_RE = re.compile(r"\t+| {2,}")


@dataclass
class RawTraceLine:
    seq: int
    wallclock_us: int
    process_name: str
    pid: int
    op: Op
    path: str
    lcn: int | None = None
    offset_bytes: int | None = None
    length_bytes: int | None = None
    flags: frozenset[OpenFlag] = frozenset()
    status: str = ""


@dataclass
class TraceDefectReport:
    """Accounting of every repair applied while normalizing a trace.

    Totality: every input line is either emitted as a CanonicalRequest or
    listed in ``dropped_lines``.
    """

    dropped_lines: list[tuple[int, str]] = field(default_factory=list)
    system_requests_tagged: int = 0
    address_rewrites: int = 0


def _parse_wallclock(token: str, where: str) -> int:
    m = _TIME_RE.match(token)
    if not m:
        raise BadTime(f"{where}: unparseable timestamp {token!r}")
    hours, minutes, seconds = int(m.group(1)), int(m.group(2)), int(m.group(3))
    if hours > 23 or minutes > 59 or seconds > 59:
        raise BadTime(f"{where}: timestamp field out of range in {token!r}")
    frac = (m.group(4) or "").ljust(6, "0")
    return (hours * 3600 + minutes * 60 + seconds) * 1_000_000 + int(frac)


def parse_trace_line(line: str, *, byte_offset: int | None = None) -> RawTraceLine:
    """Parse one Filemon record into its raw fields.

    The tracer prints hours and minutes without leading zeros, so one- and
    two-digit fields are both accepted.  Raises :class:`MalformedLine`,
    :class:`UnknownOp` or :class:`BadTime`; each error names the offending
    seq (or the byte offset when no seq could be read).
    """

    where = f"byte offset {byte_offset}" if byte_offset is not None else "line"
    fields = [f for f in _FIELD_SPLIT_RE.split(line.strip()) if f]
    if len(fields) < 5:
        raise MalformedLine(f"{where}: expected seq/time/process/op/path, got {len(fields)} fields")
    try:
        seq = int(fields[0])
    except ValueError:
        raise MalformedLine(f"{where}: missing or non-numeric seq {fields[0]!r}") from None
    where = f"seq {seq}"

    wallclock_us = _parse_wallclock(fields[1], where)

    proc = fields[2]
    name, colon, pid_text = proc.rpartition(":")
    if not colon or not pid_text.isdigit():
        raise MalformedLine(f"{where}: process field {proc!r} is not name:pid")
    pid = int(pid_text)

    op_token = fields[3].upper()
    try:
        op = Op(op_token)
    except ValueError:
        raise UnknownOp(f"{where}: unknown operation {fields[3]!r}") from None

    path = fields[4]
    trailer = " ".join(fields[5:])

    lcn = offset = length = None
    if op in (Op.READ, Op.WRITE):
        detail = _IO_DETAIL_RE.search(trailer)
        if not detail:
            raise MalformedLine(f"{where}: {op.value} line without LCN/Offset/Length")
        lcn, offset, length = (int(g) for g in detail.groups())

    flags = frozenset(
        _FLAG_TOKENS[tok] for tok in trailer.replace(":", " ").split() if tok in _FLAG_TOKENS
    )
    status = trailer.split()[0] if trailer and not trailer.startswith("LCN:") else ""

    return RawTraceLine(
        seq=seq,
        wallclock_us=wallclock_us,
        process_name=name,
        pid=pid,
        op=op,
        path=path,
        lcn=lcn,
        offset_bytes=offset,
        length_bytes=length,
        flags=flags,
        status=status,
    )


def parse_trace_text(text: str) -> tuple[list[RawTraceLine], list[tuple[int, str]]]:
    """Parse a whole trace body, collecting per-line failures instead of raising.

    Returns the parsed lines plus (identifier, reason) pairs for rejected
    lines, where the identifier is the seq when one could be read and the
    1-based line number otherwise.
    """

    parsed: list[RawTraceLine] = []
    dropped: list[tuple[int, str]] = []
    offset = 0
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if stripped and not stripped.startswith("#"):
            try:
                parsed.append(parse_trace_line(line, byte_offset=offset))
            except TraceError as exc:
                first = stripped.split()[0]
                ident = int(first) if first.isdigit() else lineno
                dropped.append((ident, f"{type(exc).__name__}: {exc}"))
        offset += len(line) + 1
    return parsed, dropped


def _mode_from_flags(flags: frozenset[OpenFlag]) -> AccessMode:
    # NoBuffer dominates: it disables the cache outright, the other flags
    # only tune it.
    if OpenFlag.NO_BUFFER in flags:
        return AccessMode.NO_BUFFER
    if OpenFlag.WRITE_THROUGH in flags:
        return AccessMode.WRITE_THROUGH
    if OpenFlag.SEQUENTIAL_SCAN in flags:
        return AccessMode.SEQUENTIAL
    return AccessMode.NORMAL


def normalize(
    lines: Sequence[RawTraceLine],
    cluster_size_bytes: int = 4096,
    system_processes: Iterable[str] = DEFAULT_SYSTEM_PROCESSES,
) -> tuple[list[CanonicalRequest], TraceDefectReport]:
    """Turn raw tracer lines into canonical requests, repairing known defects.

    Logical disk addresses are reconstructed from cluster number and
    displacement; the open-time access mode is propagated to every
    READ/WRITE of the session; lines issued by deny-listed helper processes
    are tagged ``origin=SYSTEM`` so replay can exclude them.  Session
    teardown (CLOSE) keeps the application origin: once a helper's opens and
    I/O are excluded its close is inert.  READ/WRITE lines with no prior
    OPEN are dropped and reported as OrphanIO.
    """

    if cluster_size_bytes < 512 or cluster_size_bytes & (cluster_size_bytes - 1):
        raise ValueError("cluster_size_bytes must be a power of two >= 512")
    deny = set(system_processes)
    report = TraceDefectReport()
    requests: list[CanonicalRequest] = []
    file_ids: dict[str, int] = {}
    sessions: dict[tuple[int, int], AccessMode] = {}
    last_time = -1

    for line in lines:
        if line.wallclock_us < last_time:
            raise BadTime(
                f"seq {line.seq}: wallclock went backwards (midnight rollover unsupported)"
            )
        last_time = line.wallclock_us

        file_id = file_ids.setdefault(line.path, len(file_ids))
        session_key = (line.pid, file_id)

        if line.op is Op.OPEN:
            mode = _mode_from_flags(line.flags)
            sessions[session_key] = mode
        elif line.op is Op.CLOSE:
            mode = sessions.pop(session_key, AccessMode.NORMAL)
        else:
            if session_key not in sessions:
                report.dropped_lines.append((line.seq, "OrphanIO"))
                continue
            mode = sessions[session_key]

        origin = Origin.APP
        if line.process_name in deny and line.op is not Op.CLOSE:
            origin = Origin.SYSTEM
            report.system_requests_tagged += 1

        offset = line.offset_bytes or 0
        if line.lcn is not None:
            disk_addr = line.lcn * cluster_size_bytes + offset
            report.address_rewrites += 1
        else:
            disk_addr = 0

        requests.append(
            CanonicalRequest(
                issue_time_us=line.wallclock_us,
                origin=origin,
                op=line.op,
                file_id=file_id,
                file_offset_bytes=offset,
                length_bytes=line.length_bytes or 0,
                disk_byte_addr=disk_addr,
                mode=mode,
            )
        )
    return requests, report


def ingest_text(
    text: str,
    cluster_size_bytes: int = 4096,
    system_processes: Iterable[str] = DEFAULT_SYSTEM_PROCESSES,
) -> tuple[list[CanonicalRequest], TraceDefectReport]:
    """Parse and normalize a trace body in one step, merging drop reports."""

    lines, parse_drops = parse_trace_text(text)
    requests, report = normalize(lines, cluster_size_bytes, system_processes)
    report.dropped_lines = parse_drops + report.dropped_lines
    return requests, report


def write_canonical(
    requests: Iterable[CanonicalRequest],
    sink: str | Path | IO[str],
    cluster_size_bytes: int = 4096,
) -> int:
    """Write requests in the canonical trace format; returns bytes written.

    The format is line oriented (one request per line, fixed field order)
    with a header carrying the format version and cluster size, so traces
    diff cleanly in tests.
    """

    out = io.StringIO()
    out.write(f"#iostack-trace v{CANONICAL_FORMAT_VERSION} cluster_bytes={cluster_size_bytes}\n")
    out.write("#issue_us origin op file_id offset_bytes length_bytes disk_byte_addr mode\n")
    for r in requests:
        out.write(
            f"{r.issue_time_us} {r.origin.value} {r.op.value} {r.file_id} "
            f"{r.file_offset_bytes} {r.length_bytes} {r.disk_byte_addr} {r.mode.value}\n"
        )
    data = out.getvalue()
    if isinstance(sink, (str, Path)):
        Path(sink).write_text(data, encoding="utf-8")
    else:
        sink.write(data)
    return len(data.encode("utf-8"))


def read_canonical(source: str | Path | IO[str]) -> list[CanonicalRequest]:
    """Read a canonical trace; exact inverse of :func:`write_canonical`."""

    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    lines = text.splitlines()
    if not lines or not lines[0].startswith("#iostack-trace v"):
        raise CanonicalFormatError("missing canonical trace header")
    version = lines[0].split()[1].removeprefix("v")
    if version != str(CANONICAL_FORMAT_VERSION):
        raise CanonicalFormatError(
            f"unsupported canonical trace version {version!r} "
            f"(expected {CANONICAL_FORMAT_VERSION})"
        )
    requests = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 8:
            raise CanonicalFormatError(f"line {lineno}: expected 8 fields, got {len(parts)}")
        requests.append(
            CanonicalRequest(
                issue_time_us=int(parts[0]),
                origin=Origin(parts[1]),
                op=Op(parts[2]),
                file_id=int(parts[3]),
                file_offset_bytes=int(parts[4]),
                length_bytes=int(parts[5]),
                disk_byte_addr=int(parts[6]),
                mode=AccessMode(parts[7]),
            )
        )
    return requests
