"""End-to-end command line runs."""

from __future__ import annotations

from pathlib import Path

from iostack.cli import main

from conftest import SAMPLE_TRACE

CONFIG = """
[disk]
profile = fujitsu_man3184mp

[workload]
count = 5
seed = 42
mode = NO_BUFFER
size_bytes = constant:65536
inter_arrival_us = constant:0
address = sequential
"""


def write_config(tmp_path: Path, body: str = CONFIG) -> Path:
    path = tmp_path / "sim.ini"
    path.write_text(body)
    return path


class TestCli:
    def test_generate_run_writes_reports(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        code = main(["--config", str(cfg), "--generate", "--output", str(out)])
        assert code == 0
        assert (out / "requests.csv").exists()
        assert (out / "summary.txt").exists()
        assert not (out / "events.log").exists()
        stdout = capsys.readouterr().out
        assert "requests=7" in stdout  # OPEN + 5 reads + CLOSE

    def test_dump_events(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["--config", str(cfg), "--generate", "--output", str(out), "--dump-events"]) == 0
        assert (out / "events.log").read_text().startswith("#iostack-events")

    def test_trace_run_from_tracer_text(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        trace = tmp_path / "capture.txt"
        trace.write_text(SAMPLE_TRACE)
        out = tmp_path / "out"
        code = main(["--config", str(cfg), "--trace", str(trace), "--output", str(out)])
        assert code == 0
        stdout = capsys.readouterr().out
        # 7 application-origin records replayed (system helpers excluded).
        assert "requests=7" in stdout

    def test_canonical_trace_autodetected(self, tmp_path):
        from iostack import ingest_text, write_canonical

        requests, _ = ingest_text(SAMPLE_TRACE)
        canon = tmp_path / "canon.txt"
        write_canonical(requests, canon)
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["--config", str(cfg), "--trace", str(canon), "--output", str(out)]) == 0

    def test_config_error_exit_code(self, tmp_path, capsys):
        cfg = write_config(tmp_path, "[disk]\nprofile = nope\n")
        code = main(["--config", str(cfg), "--generate", "--output", str(tmp_path / "o")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_seed_override_changes_stream(self, tmp_path):
        cfg = write_config(
            tmp_path,
            CONFIG.replace("constant:65536", "uniform:512:262144").replace(
                "constant:0", "exponential:100"
            ),
        )
        out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
        main(["--config", str(cfg), "--generate", "--output", str(out_a), "--seed", "1"])
        main(["--config", str(cfg), "--generate", "--output", str(out_b), "--seed", "2"])
        main(["--config", str(cfg), "--generate", "--output", str(out_c), "--seed", "1"])
        a, b, c = ((p / "requests.csv").read_text() for p in (out_a, out_b, out_c))
        assert a == c
        assert a != b

    def test_replay_mode_override(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(
            ["--config", str(cfg), "--generate", "--output", str(out), "--replay", "open"]
        ) == 0

    def test_tolerance_and_baseline_flags(self, tmp_path):
        from iostack import write_baseline

        base = tmp_path / "base.txt"
        write_baseline({1: 10_000}, base)
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        code = main(
            [
                "--config", str(cfg), "--generate", "--output", str(out),
                "--baseline", str(base), "--tolerance-us", "500",
            ]
        )
        assert code == 0
