#!/usr/bin/env python3
"""Generate the demo fixtures, replay them, and summarize the regimes.

Writes graph.json / stream.jsonl / trace.jsonl / plots/series.csv into the
chosen directory and prints how the overall opinion moves when the stream
switches regime halfway through.
"""

import argparse
import statistics
import sys

from slgraph import InferenceConfig, evaluate_stream
from slgraph.cli import main as cli_main
from slgraph.scenario import demo_graph, demo_stream, write_demo


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dir", default="demo", help="output directory (default ./demo)")
    parser.add_argument("--steps", type=int, default=1000)
    args = parser.parse_args()

    graph_path, stream_path = write_demo(args.dir, args.steps)
    status = cli_main(
        [
            "infer",
            "--graph", str(graph_path),
            "--stream", str(stream_path),
            "--out", f"{args.dir}/trace.jsonl",
            "--plot-export", f"{args.dir}/plots",
        ]
    )
    if status != 0:
        return status

    switch = args.steps // 2
    overall = [
        (trace.timestamp, trace.overall)
        for trace in evaluate_stream(demo_graph(), demo_stream(args.steps), InferenceConfig())
    ]
    before = [op.projected_probability for t, op in overall if t < switch]
    after = [op.projected_probability for t, op in overall if t >= switch]
    print(f"wrote {graph_path}, {stream_path}, {args.dir}/trace.jsonl, {args.dir}/plots/series.csv")
    print(f"overall projected probability, t < {switch}: "
          f"mean {statistics.fmean(before):.4f} (n={len(before)})")
    print(f"overall projected probability, t >= {switch}: "
          f"mean {statistics.fmean(after):.4f} (n={len(after)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
