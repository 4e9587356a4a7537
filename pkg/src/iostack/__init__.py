"""Trace-driven discrete-event simulator of a PC storage stack.

The stack mirrors the request path of a desktop OS: application process,
file-system cache (64KB quantization, mode-specific read-ahead, progressive
and periodic write flushing, write-through with metadata updates), host I/O
scheduler, segmented drive cache, and a zoned mechanical disk.  Real traces
captured with a Filemon-style tracer and synthetic generated workloads
share one canonical request format and one replay path.
"""

from .config import ConfigError, RunSpec, load_config
from .diskcache import (
    Ack,
    CacheFull,
    DiskCacheConfig,
    Lookup,
    ReadPrefetch,
    SegmentedCache,
    UnexpectedFill,
    WritePolicy,
)
from .disk import (
    DiskGeometry,
    HeadState,
    Mapping,
    OutOfRange,
    SeekProfile,
    Zone,
    cylinder_of_byte,
    lba_to_phys,
    rotational_wait,
    seek_time,
    service,
)
from .engine import EventLog, PastEvent, SimEvent, Simulator, StageFault, StageId
from .fscache import (
    FsCache,
    FsCacheConfig,
    WriteRegime,
    classify_write_regime,
    split_into_blocks,
)
from .profiles import PROFILES, DriveProfile, drive_profile
from .replay import (
    ReplayMode,
    ReplayPolicy,
    ReplayResult,
    StackConfig,
    TraceReplayError,
    file_extents,
    reference_media_image,
    replay,
)
from .reports import ZeroBaseline, emit_reports, error_percent, load_baseline, write_baseline
from .requests import AccessMode, CanonicalRequest, Op, Origin, RequestRecord, Summary
from .scheduler import Direction, DuplicateRequest, PendingQueue, Policy
from .trace import (
    BadTime,
    CanonicalFormatError,
    MalformedLine,
    RawTraceLine,
    TraceDefectReport,
    TraceError,
    UnknownOp,
    ingest_text,
    normalize,
    parse_trace_line,
    parse_trace_text,
    read_canonical,
    write_canonical,
)
from .workload import DistKind, DistSpec, GeneratorSpec, InvalidParams, aligned_choices, generate, sample

__version__ = "0.1.0"

__all__ = [
    "AccessMode",
    "Ack",
    "BadTime",
    "CacheFull",
    "CanonicalFormatError",
    "CanonicalRequest",
    "ConfigError",
    "Direction",
    "DiskCacheConfig",
    "DiskGeometry",
    "DistKind",
    "DistSpec",
    "DriveProfile",
    "DuplicateRequest",
    "EventLog",
    "FsCache",
    "FsCacheConfig",
    "GeneratorSpec",
    "HeadState",
    "InvalidParams",
    "Lookup",
    "MalformedLine",
    "Mapping",
    "Op",
    "Origin",
    "OutOfRange",
    "PROFILES",
    "PastEvent",
    "PendingQueue",
    "Policy",
    "RawTraceLine",
    "ReadPrefetch",
    "ReplayMode",
    "ReplayPolicy",
    "ReplayResult",
    "RequestRecord",
    "RunSpec",
    "SeekProfile",
    "SegmentedCache",
    "SimEvent",
    "Simulator",
    "StackConfig",
    "StageFault",
    "StageId",
    "Summary",
    "TraceDefectReport",
    "TraceError",
    "TraceReplayError",
    "UnexpectedFill",
    "UnknownOp",
    "WritePolicy",
    "WriteRegime",
    "ZeroBaseline",
    "Zone",
    "aligned_choices",
    "classify_write_regime",
    "cylinder_of_byte",
    "drive_profile",
    "emit_reports",
    "error_percent",
    "file_extents",
    "generate",
    "ingest_text",
    "lba_to_phys",
    "load_baseline",
    "load_config",
    "normalize",
    "parse_trace_line",
    "parse_trace_text",
    "read_canonical",
    "reference_media_image",
    "replay",
    "rotational_wait",
    "sample",
    "seek_time",
    "service",
    "split_into_blocks",
    "write_baseline",
    "write_canonical",
]
