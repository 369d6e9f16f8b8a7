"""Bundled demonstration scenario.

A small driving-stack shaped system: a grid map, a localization module and a
lanelet map feeding a trajectory planner, with four monitors.  The map
alignment monitor compares the lanelet map against the grid map and so
depends on both the grid map and the localization; the map quality monitor
judges the map in isolation but still needs the localization.  The planner
is the only component whose output leaves the system, so the sink depends on
it alone.

The synthetic stream switches regime halfway:

* the overall assessor's referral trust in the planner monitor jumps from a
  projected probability of 0.2 to 0.95 (the discounted planner assessment
  goes from heavily suppressed to nearly verbatim),
* the grid-map expert statement degrades from (0.9, 0.05, 0.05) to
  (0.3, 0.3, 0.4), dragging down the dependency term of the map alignment
  monitor,

while the two concurrent lanelet-map assessments run throughout with small
deterministic wobbles so their fusion stays visibly sharper than either
input.
"""

from __future__ import annotations

import math
from pathlib import Path

from .graph import OVERALL_NAME, AssessmentGraph, NodeKind, save_graph
from .opinions import Opinion
from .operators import and_shaped_table
from .engine import StreamRecord

GRID_MAP = "grid_map"
LOCALIZATION = "localization"
LANELET_MAP = "lanelet_map"
PLANNER = "planner"
LOC_MONITOR = "localization_monitor"
ALIGN_MONITOR = "map_alignment_monitor"
QUALITY_MONITOR = "map_quality_monitor"
PLANNER_MONITOR = "planner_monitor"

GRAPH_FILE = "graph.json"
STREAM_FILE = "stream.jsonl"

#: Regime values the acceptance scenario is pinned to.
LOW_PLANNER_TRUST = Opinion(0.1, 0.7, 0.2)    # projects to 0.2
HIGH_PLANNER_TRUST = Opinion(0.9, 0.0, 0.1)   # projects to 0.95
HEALTHY_GRID_MAP = Opinion(0.9, 0.05, 0.05)
DEGRADED_GRID_MAP = Opinion(0.3, 0.3, 0.4)
PLANNER_ASSESSMENT = Opinion(0.9, 0.05, 0.05)


def demo_graph() -> AssessmentGraph:
    """The demonstration topology, finalized and ready for inference."""
    g = AssessmentGraph()
    for name in (GRID_MAP, LOCALIZATION, LANELET_MAP, PLANNER):
        g.add_node(name, NodeKind.FUNCTIONAL)
    for name in (LOC_MONITOR, ALIGN_MONITOR, QUALITY_MONITOR, PLANNER_MONITOR):
        g.add_node(name, NodeKind.ASSESSMENT)

    g.add_dependency(LOCALIZATION, PLANNER)
    g.add_dependency(LANELET_MAP, PLANNER)
    g.add_dependency(GRID_MAP, ALIGN_MONITOR)
    g.add_dependency(LOCALIZATION, ALIGN_MONITOR)
    g.add_dependency(LOCALIZATION, QUALITY_MONITOR)

    g.add_functional_trust(LOC_MONITOR, LOCALIZATION)
    g.add_functional_trust(ALIGN_MONITOR, LANELET_MAP)
    g.add_functional_trust(QUALITY_MONITOR, LANELET_MAP)
    g.add_functional_trust(PLANNER_MONITOR, PLANNER)
    # The grid map has no dedicated monitor; the overall assessor states its
    # functionality directly through the stream.
    g.add_functional_trust(OVERALL_NAME, GRID_MAP)

    g.add_referral_trust(LOC_MONITOR, Opinion(0.95, 0.0, 0.05))
    # Non-dogmatic trust so the monitors' own dependency terms carry weight.
    g.add_referral_trust(ALIGN_MONITOR, Opinion(0.9, 0.0, 0.1))
    g.add_referral_trust(QUALITY_MONITOR, Opinion(0.9, 0.0, 0.1))
    # Placeholder; the stream overrides this from the first step on.
    g.add_referral_trust(PLANNER_MONITOR, Opinion(0.5, 0.3, 0.2))

    g.set_conditional_table(PLANNER, and_shaped_table((LANELET_MAP, LOCALIZATION)))
    g.set_conditional_table(ALIGN_MONITOR, and_shaped_table((GRID_MAP, LOCALIZATION)))
    g.set_conditional_table(QUALITY_MONITOR, and_shaped_table((LOCALIZATION,)))
    g.set_conditional_table("Z", and_shaped_table((PLANNER,)))
    return g.finalize()


def demo_stream(steps: int = 1000) -> list[StreamRecord]:
    """Synthetic assessment stream; the regime switches at ``steps // 2``."""
    switch = steps // 2
    records: list[StreamRecord] = []
    for t in range(steps):
        wobble = 0.02 * math.sin(2.0 * math.pi * t / 97.0)
        records.append(
            StreamRecord(t, OVERALL_NAME, GRID_MAP,
                         HEALTHY_GRID_MAP if t < switch else DEGRADED_GRID_MAP)
        )
        records.append(
            StreamRecord(t, OVERALL_NAME, PLANNER_MONITOR,
                         LOW_PLANNER_TRUST if t < switch else HIGH_PLANNER_TRUST)
        )
        records.append(
            StreamRecord(t, LOC_MONITOR, LOCALIZATION,
                         Opinion(0.85 + wobble, 0.05, 0.10 - wobble))
        )
        records.append(
            StreamRecord(
                t, ALIGN_MONITOR, LANELET_MAP,
                Opinion(0.70 + 0.02 * math.sin(2.0 * math.pi * t / 61.0), 0.10,
                        0.20 - 0.02 * math.sin(2.0 * math.pi * t / 61.0)),
            )
        )
        records.append(
            StreamRecord(
                t, QUALITY_MONITOR, LANELET_MAP,
                Opinion(0.65 + 0.02 * math.cos(2.0 * math.pi * t / 53.0), 0.10,
                        0.25 - 0.02 * math.cos(2.0 * math.pi * t / 53.0)),
            )
        )
        records.append(StreamRecord(t, PLANNER_MONITOR, PLANNER, PLANNER_ASSESSMENT))
    return records


def write_demo(directory: str | Path, steps: int = 1000) -> tuple[Path, Path]:
    """Write the demo graph and stream files into ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    graph_path = directory / GRAPH_FILE
    stream_path = directory / STREAM_FILE
    save_graph(demo_graph(), graph_path)
    with stream_path.open("w", encoding="utf-8") as handle:
        for record in demo_stream(steps):
            handle.write(record.to_json_line() + "\n")
    return graph_path, stream_path
