"""Command-line entry point: replay a trace or a generated workload.

    simulate --config sim.ini --trace capture.txt --output out/
    simulate --config sim.ini --generate --output out/ --seed 7 --dump-events
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from .config import ConfigError, RunSpec, load_config
from .replay import ReplayMode, TraceReplayError, replay
from .reports import emit_reports, load_baseline
from .trace import TraceError, ingest_text, read_canonical
from .workload import generate


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Trace-driven storage stack simulator: replay real or synthetic I/O "
        "against a configurable cache/scheduler/disk model.",
    )
    p.add_argument("--config", required=True, help="INI configuration file")
    source = p.add_mutually_exclusive_group()
    source.add_argument("--trace", help="trace file (tracer text or canonical format)")
    source.add_argument(
        "--generate", action="store_true", help="generate the workload from [workload] sections"
    )
    p.add_argument("--output", required=True, help="report output directory")
    p.add_argument("--seed", type=int, help="override the seed of every generator")
    p.add_argument("--replay", choices=["closed", "open"], help="override the replay mode")
    p.add_argument("--baseline", help="measured per-request latency file")
    p.add_argument("--tolerance-us", type=int, help="closed-loop response-time tolerance")
    p.add_argument("--dump-events", action="store_true", help="also write the event log")
    return p


def _load_requests(args, spec: RunSpec):
    if args.generate or (args.trace is None and spec.workloads and spec.trace_path is None):
        if not spec.workloads:
            raise ConfigError("workload: --generate requires at least one [workload] section")
        requests = []
        for i, w in enumerate(spec.workloads):
            if args.seed is not None:
                w = dataclasses.replace(w, seed=args.seed + i)
            requests.extend(generate(w))
        requests.sort(key=lambda r: r.issue_time_us)
        return requests, None
    path = args.trace or spec.trace_path
    if path is None:
        raise ConfigError("trace.path: no trace given (use --trace or --generate)")
    text = Path(path).read_text(encoding="utf-8")
    if text.startswith("#iostack-trace"):
        return read_canonical(path), None
    requests, report = ingest_text(text, spec.cluster_bytes, spec.system_processes)
    return requests, report


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        spec = load_config(Path(args.config).read_text(encoding="utf-8"))
        policy = spec.policy
        if args.replay is not None:
            mode = ReplayMode.CLOSED_LOOP if args.replay == "closed" else ReplayMode.OPEN_LOOP_TIMED
            policy = dataclasses.replace(policy, mode=mode)
        if args.tolerance_us is not None:
            policy = dataclasses.replace(policy, tolerance_us=args.tolerance_us)
        baseline_path = args.baseline or spec.baseline_path
        if baseline_path:
            policy = dataclasses.replace(policy, baseline_us=load_baseline(baseline_path))

        requests, defect_report = _load_requests(args, spec)
        result = replay(requests, spec.stack, policy)
        files = emit_reports(
            result.records,
            result.summary,
            args.output,
            effective_config=spec.echo,
            event_log=result.event_log if args.dump_events else None,
        )
    except (ConfigError, TraceError, TraceReplayError, OSError) as exc:
        print(f"simulate: error: {exc}", file=sys.stderr)
        return 2

    if defect_report is not None and defect_report.dropped_lines:
        for ident, reason in defect_report.dropped_lines:
            print(f"simulate: dropped line {ident}: {reason}", file=sys.stderr)
    s = result.summary
    print(f"requests={s.total_requests} bytes={s.total_bytes}")
    print(f"total_response_us={s.total_response_us}")
    print(f"throughput_bytes_per_s={s.throughput_bytes_per_s:.0f}")
    if result.clipped_requests:
        print(f"clipped_requests={result.clipped_requests}")
    for path in files:
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
