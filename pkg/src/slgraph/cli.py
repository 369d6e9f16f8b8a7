"""Command-line surface: validate graphs, replay streams, generate fixtures.

Exit codes: 0 success, 2 graph validation failure, 3 I/O or parse failure,
4 stream error (unsorted input or a record for a nonexistent edge).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, TextIO

from .engine import (
    InferenceConfig,
    StreamError,
    StreamRecord,
    evaluate_stream,
    parse_stream_record,
)
from .graph import (
    AssessmentGraph,
    GraphFormatError,
    GraphValidationError,
    load_graph,
)
from . import scenario

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_STREAM = 4


class _CliFailure(Exception):
    def __init__(self, status: int, message: str):
        super().__init__(message)
        self.status = status


@dataclass(frozen=True)
class RunConfig:
    """Everything one inference run needs."""

    graph_path: str
    stream_path: str
    output_path: str
    plot_export: str | None = None
    emit_provenance: bool = False
    stale_after: float = 10.0
    prior_weight: float = 2.0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except _CliFailure as failure:
        print(f"error: {failure}", file=sys.stderr)
        return failure.status


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slgraph",
        description="Assessment-graph inference over subjective-logic opinion streams.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    validate = commands.add_parser("validate", help="check a graph file, one violation per line")
    validate.add_argument("graph", help="graph JSON file")
    validate.set_defaults(handler=_cmd_validate)

    infer = commands.add_parser("infer", help="replay an assessment stream into a trace stream")
    infer.add_argument("--graph", required=True, help="graph JSON file")
    infer.add_argument("--stream", required=True, help="assessment JSONL file ('-' for stdin)")
    infer.add_argument("--out", required=True, help="trace JSONL file ('-' for stdout)")
    infer.add_argument("--plot-export", metavar="DIR",
                       help="also write per-node series CSV (t, node, b, d, u, P)")
    infer.add_argument("--provenance", action="store_true",
                       help="include the fused terms per node in each trace line")
    infer.add_argument("--stale", type=float, default=10.0, metavar="N",
                       help="age in stream time units after which a held assessment expires"
                            " (default 10)")
    infer.add_argument("--prior-weight", type=float, default=2.0, metavar="W",
                       help="prior weight for evidence-form opinions (default 2)")
    infer.set_defaults(handler=_cmd_infer)

    gen = commands.add_parser("gen-example", help="write the bundled demo graph and stream")
    gen.add_argument("directory", help="output directory (created if missing)")
    gen.set_defaults(handler=_cmd_gen_example)
    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    graph = _load_graph(args.graph)
    violations = graph.validate()
    if violations:
        for violation in violations:
            print(violation)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


def _cmd_infer(args: argparse.Namespace) -> int:
    return run_inference(
        RunConfig(
            graph_path=args.graph,
            stream_path=args.stream,
            output_path=args.out,
            plot_export=args.plot_export,
            emit_provenance=args.provenance,
            stale_after=args.stale,
            prior_weight=args.prior_weight,
        )
    )


def run_inference(run: RunConfig) -> int:
    graph = _load_graph(run.graph_path)
    try:
        graph.finalize()
    except GraphValidationError as exc:
        for violation in exc.violations:
            print(violation, file=sys.stderr)
        return EXIT_INVALID
    try:
        config = InferenceConfig(stale_after=run.stale_after, prior_weight=run.prior_weight)
    except ValueError as exc:
        raise _CliFailure(EXIT_STREAM, str(exc)) from None
    rows: list[tuple] = []
    try:
        with _open_in(run.stream_path) as stream_in, _open_out(run.output_path) as trace_out:
            records = _read_records(stream_in)
            for trace in evaluate_stream(graph, records, config):
                trace_out.write(trace.to_json_line(run.emit_provenance) + "\n")
                if run.plot_export:
                    for name in sorted(trace.resolved):
                        op = trace.resolved[name]
                        rows.append(
                            (trace.timestamp, name, op.belief, op.disbelief,
                             op.uncertainty, op.projected_probability)
                        )
    except StreamError as exc:
        raise _CliFailure(EXIT_STREAM, str(exc)) from None
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None
    if run.plot_export:
        _write_plot_csv(Path(run.plot_export), rows)
    return EXIT_OK


def _cmd_gen_example(args: argparse.Namespace) -> int:
    try:
        graph_path, stream_path = scenario.write_demo(args.directory)
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None
    print(graph_path)
    print(stream_path)
    return EXIT_OK


def _load_graph(path: str) -> AssessmentGraph:
    try:
        return load_graph(path)
    except GraphFormatError as exc:
        raise _CliFailure(EXIT_IO, f"{path}: {exc}") from None
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None


def _read_records(handle: TextIO) -> Iterator[StreamRecord]:
    for line_no, line in enumerate(handle, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _CliFailure(EXIT_IO, f"stream line {line_no}: invalid JSON: {exc.msg}") from None
        yield parse_stream_record(obj, line_no)


class _StdStream:
    """Context manager around a standard stream that must stay open."""

    def __init__(self, handle: TextIO):
        self._handle = handle

    def __enter__(self) -> TextIO:
        return self._handle

    def __exit__(self, *exc_info: object) -> None:
        self._handle.flush()


def _open_in(path: str):
    if path == "-":
        return _StdStream(sys.stdin)
    try:
        return open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None


def _open_out(path: str):
    if path == "-":
        return _StdStream(sys.stdout)
    try:
        return open(path, "w", encoding="utf-8")
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None


def _write_plot_csv(directory: Path, rows: list[tuple]) -> None:
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with (directory / "series.csv").open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["t", "node", "b", "d", "u", "P"])
            writer.writerows(rows)
    except OSError as exc:
        raise _CliFailure(EXIT_IO, str(exc)) from None


if __name__ == "__main__":
    sys.exit(main())
