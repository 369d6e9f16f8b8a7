"""Acceptance gate: one test per release criterion, at pinned tolerances.

Every test prints one `ACCEPTANCE nn PASS/FAIL` line (run with `-s` or
check the captured output).  Fuzzed criteria use seeded generators so runs
are reproducible.
"""

import copy
import json
import random
import time

from slgraph import (
    AssessmentGraph,
    AssessmentSnapshot,
    ConditionalTable,
    Evidence,
    InferenceConfig,
    NodeKind,
    Opinion,
    StreamRecord,
    and_shaped_table,
    cumulative_fuse,
    cumulative_unfuse,
    decay,
    deduce,
    evaluate_snapshot,
    evaluate_stream,
    from_evidence,
    multiply_joint,
    planner_assess,
    to_evidence,
    trust_discount,
    TrajectoryClassification,
)
from slgraph.cli import main
from slgraph.scenario import demo_graph, demo_stream

CONFIG = InferenceConfig()
FUZZ_CASES = 10_000


def report(num, label, failures):
    __tracebackhide__ = True
    status = "PASS" if not failures else "FAIL"
    print(f"ACCEPTANCE {num:02d} {status} - {label}")
    assert not failures, f"criterion {num} ({label}): first failures: {failures[:5]}"


def random_opinion(rng, min_uncertainty=0.0, base_rate=None):
    belief = rng.uniform(0.0, 1.0 - min_uncertainty)
    disbelief = rng.uniform(0.0, 1.0 - min_uncertainty - belief)
    a = rng.random() if base_rate is None else base_rate
    return Opinion(belief, disbelief, 1.0 - belief - disbelief, a)


def close(a, b, tol):
    return all(abs(x - y) <= tol for x, y in zip(a.as_tuple(), b.as_tuple()))


def test_01_operator_identity_suite():
    rng = random.Random(101)
    failures = []
    started = time.perf_counter()
    for _ in range(FUZZ_CASES):
        op = random_opinion(rng)
        if not close(trust_discount(Opinion(1, 0, 0, 0.5), op), op, 1e-9):
            failures.append(("discount-identity", op))
        if not close(cumulative_fuse(op, Opinion.vacuous(op.base_rate)), op, 1e-9):
            failures.append(("fuse-identity", op))
        soft = random_opinion(rng, min_uncertainty=1e-5)
        other = random_opinion(rng, min_uncertainty=1e-5, base_rate=soft.base_rate)
        recovered = cumulative_unfuse(cumulative_fuse(soft, other), other)
        if not close(recovered, soft, 1e-9):
            failures.append(("unfuse-identity", soft, other))
        if not close(decay(soft, 1.0), soft, 1e-9):
            failures.append(("decay-identity", soft))
    elapsed = time.perf_counter() - started
    if elapsed >= 10.0:
        failures.append(("runtime", elapsed))
    report(1, f"operator identities, 4 x {FUZZ_CASES} fuzzed at 1e-9 in {elapsed:.1f}s",
           failures)


def test_02_fusion_equals_evidence_addition():
    rng = random.Random(202)
    failures = []
    for _ in range(FUZZ_CASES):
        base_rate = rng.random()
        first = random_opinion(rng, min_uncertainty=1e-5, base_rate=base_rate)
        second = random_opinion(rng, min_uncertainty=1e-5, base_rate=base_rate)
        first_ev = to_evidence(first, 2.0)
        second_ev = to_evidence(second, 2.0)
        expected = from_evidence(
            Evidence(first_ev.positive + second_ev.positive,
                     first_ev.negative + second_ev.negative, 2.0, base_rate)
        )
        if not close(cumulative_fuse(first, second), expected, 1e-9):
            failures.append((first, second))
    report(2, f"cumulative fusion == evidence addition, {FUZZ_CASES} fuzzed at 1e-9",
           failures)


def test_03_fusion_algebra():
    rng = random.Random(303)
    failures = []
    for _ in range(FUZZ_CASES):
        a = random_opinion(rng)
        b = random_opinion(rng)
        if not close(cumulative_fuse(a, b), cumulative_fuse(b, a), 1e-9):
            failures.append(("commutativity", a, b))
        na = random_opinion(rng, min_uncertainty=1e-5)
        nb = random_opinion(rng, min_uncertainty=1e-5)
        nc = random_opinion(rng, min_uncertainty=1e-5)
        left = cumulative_fuse(cumulative_fuse(na, nb), nc)
        right = cumulative_fuse(na, cumulative_fuse(nb, nc))
        if not close(left, right, 1e-9):
            failures.append(("associativity", na, nb, nc))
        if 0 < a.uncertainty < 1 and 0 < b.uncertainty < 1:
            fused = cumulative_fuse(a, b)
            if fused.uncertainty > min(a.uncertainty, b.uncertainty) + 1e-12:
                failures.append(("sharpening", a, b))
    report(3, f"fusion commutative/associative at 1e-9, sharpens, {FUZZ_CASES} fuzzed",
           failures)


def test_04_deduction_forced_cases_and_total_probability():
    rng = random.Random(404)
    failures = []

    conditional = Opinion(0.62, 0.2, 0.18, 0.35)
    joint = multiply_joint([Opinion(0.5, 0.3, 0.2, 0.7), Opinion(0.1, 0.6, 0.3, 0.4)])
    table = ConditionalTable(("p0", "p1"), (conditional,) * 4)
    if not close(deduce(joint, table), conditional, 1e-12):
        failures.append("identical-conditionals")

    dogmatic = multiply_joint([Opinion(1, 0, 0, 0.5)])
    table = ConditionalTable(
        ("p0",), (Opinion(0.9, 0.05, 0.05, 0.5), Opinion(0.1, 0.85, 0.05, 0.5))
    )
    result = deduce(dogmatic, table)
    if result.as_tuple() != (0.9, 0.05, 0.05, 0.5) and not close(
        result, Opinion(0.9, 0.05, 0.05, 0.5), 1e-15
    ):
        failures.append(("dogmatic-parent", result))

    vacuous = multiply_joint([Opinion.vacuous(0.5)])
    opposed = ConditionalTable(("p0",), (Opinion(1, 0, 0, 0.5), Opinion(0, 1, 0, 0.5)))
    if not close(deduce(vacuous, opposed), Opinion.vacuous(0.5), 1e-12):
        failures.append("vacuous-parent-opposed-conditionals")

    for _ in range(FUZZ_CASES):
        parents = [random_opinion(rng) for _ in range(rng.randint(1, 3))]
        joint = multiply_joint(parents)
        rows = tuple(random_opinion(rng) for _ in range(joint.domain_size))
        table = ConditionalTable(tuple(f"p{i}" for i in range(len(parents))), rows)
        result = deduce(joint, table)
        expected = sum(
            joint.projected(k) * rows[k].projected_probability
            for k in range(joint.domain_size)
        )
        if abs(result.projected_probability - expected) > 1e-9:
            failures.append(("total-probability", parents, rows))
    report(4, f"deduction forced cases exact, total probability on {FUZZ_CASES} fuzzed at 1e-9",
           failures)


def test_05_planner_assessor_exactness():
    failures = []
    worked = [
        (TrajectoryClassification(2, frozenset(), 0.2), Opinion(0.8, 0.0, 0.2)),
        (TrajectoryClassification(2, frozenset({1}), 0.0), Opinion(2 / 3, 1 / 3, 0.0)),
        (TrajectoryClassification(3, frozenset({0, 1, 2}), 0.0), Opinion(0.0, 1.0, 0.0)),
    ]
    for classification, expected in worked:
        if not close(planner_assess(classification), expected, 1e-12):
            failures.append(("worked", classification))
    rng = random.Random(505)
    for _ in range(1000):
        n = rng.randint(1, 80)
        flagged = frozenset(i for i in range(n) if rng.random() < 0.4)
        u = rng.random()
        op = planner_assess(TrajectoryClassification(n, flagged, u))
        if abs(op.belief + op.disbelief + op.uncertainty - 1.0) > 1e-12:
            failures.append(("additivity", n, flagged, u))
    report(5, "planner assessor worked examples at 1e-12, additivity on 1000 partitions",
           failures)


def _demo_traces(steps=1000):
    return list(
        evaluate_stream(demo_graph(), demo_stream(steps), CONFIG)
    )


def test_06_trust_switch_scenario():
    failures = []
    records = demo_stream(1000)
    inputs = {}
    for record in records:
        if (record.source, record.target) == ("planner_monitor", "planner"):
            inputs[record.timestamp] = record.opinion.belief
    for trace in _demo_traces(1000):
        discounted = trace.provenance["planner"].assessors["planner_monitor"].belief
        stated = inputs[trace.timestamp]
        if trace.timestamp < 500:
            if not discounted < 0.25 * stated:
                failures.append((trace.timestamp, discounted, stated))
        else:
            if not abs(discounted - stated) <= 0.06:
                failures.append((trace.timestamp, discounted, stated))
    report(6, "trust switch: discounted belief < 0.25x input before, within 0.06 after",
           failures)


def test_07_dependency_degradation_scenario():
    failures = []
    before_belief, before_uncertainty = [], []
    after_belief, after_uncertainty = [], []
    for trace in _demo_traces(1000):
        term = trace.provenance["map_alignment_monitor"].dependency
        if trace.timestamp < 500:
            before_belief.append(term.belief)
            before_uncertainty.append(term.uncertainty)
        else:
            after_belief.append(term.belief)
            after_uncertainty.append(term.uncertainty)
    if not max(after_belief) < min(before_belief):
        failures.append(("belief", max(after_belief), min(before_belief)))
    if not min(after_uncertainty) > max(before_uncertainty):
        failures.append(("uncertainty", min(after_uncertainty), max(before_uncertainty)))
    report(7, "degraded dependency strictly lowers deduced belief, raises uncertainty",
           failures)


def test_08_planner_assessment_drives_overall():
    failures = []
    graph = demo_graph()
    live = {
        (r.source, r.target): r.opinion for r in demo_stream(2) if r.timestamp == 0
    }  # healthy-regime snapshot
    baseline = evaluate_snapshot(graph, AssessmentSnapshot(0, live), CONFIG)

    lowered = dict(live)
    lowered[("planner_monitor", "planner")] = Opinion(0.2, 0.75, 0.05)
    dipped = evaluate_snapshot(graph, AssessmentSnapshot(0, lowered), CONFIG)
    if not (
        dipped.overall.projected_probability < baseline.overall.projected_probability
    ):
        failures.append(("not-lower", dipped.overall, baseline.overall))

    restored = evaluate_snapshot(graph, AssessmentSnapshot(0, dict(live)), CONFIG)
    if restored.resolved != baseline.resolved:
        failures.append("not-bit-identical-after-restore")
    report(8, "lower planner assessment lowers overall; restoring restores bit-exactly",
           failures)


def _performance_graph():
    """Six functional components in a diamond-and-chain layout."""
    g = AssessmentGraph()
    for name in ("camera", "lidar", "tracking", "localization", "planner", "controller"):
        g.add_node(name, NodeKind.FUNCTIONAL)
    for name in ("camera_monitor", "tracking_monitor", "planner_monitor"):
        g.add_node(name, NodeKind.ASSESSMENT)
    g.add_dependency("camera", "tracking")
    g.add_dependency("lidar", "tracking")
    g.add_dependency("tracking", "planner")
    g.add_dependency("localization", "planner")
    g.add_dependency("planner", "controller")
    g.add_dependency("lidar", "tracking_monitor")
    g.add_functional_trust("camera_monitor", "camera")
    g.add_functional_trust("tracking_monitor", "tracking")
    g.add_functional_trust("planner_monitor", "planner")
    g.add_functional_trust("A", "localization")
    g.add_referral_trust("tracking_monitor", Opinion(0.9, 0.0, 0.1))
    g.set_conditional_table("tracking", and_shaped_table(("camera", "lidar")))
    g.set_conditional_table("planner", and_shaped_table(("localization", "tracking")))
    g.set_conditional_table("controller", and_shaped_table(("planner",)))
    g.set_conditional_table("tracking_monitor", and_shaped_table(("lidar",)))
    g.set_conditional_table("Z", and_shaped_table(("controller",)))
    return g


def _performance_stream(steps=1000):
    rng = random.Random(909)
    records = []
    edges = [
        ("camera_monitor", "camera"),
        ("tracking_monitor", "tracking"),
        ("planner_monitor", "planner"),
        ("A", "localization"),
    ]
    for t in range(steps):
        for source, target in edges:
            belief = 0.55 + 0.35 * rng.random()
            disbelief = rng.uniform(0.0, 0.9 - belief)
            records.append(
                StreamRecord(t, source, target,
                             Opinion(belief, disbelief, 1.0 - belief - disbelief))
            )
    return records


def test_09_end_to_end_determinism_and_performance(tmp_path):
    failures = []
    graph_path = tmp_path / "graph.json"
    stream_path = tmp_path / "stream.jsonl"
    from slgraph import save_graph

    save_graph(_performance_graph(), graph_path)
    with stream_path.open("w") as handle:
        for record in _performance_stream(1000):
            handle.write(record.to_json_line() + "\n")

    durations = []
    outputs = []
    for run in range(2):
        out = tmp_path / f"trace-{run}.jsonl"
        started = time.perf_counter()
        status = main(
            ["infer", "--graph", str(graph_path), "--stream", str(stream_path),
             "--out", str(out), "--provenance"]
        )
        durations.append(time.perf_counter() - started)
        if status != 0:
            failures.append(("exit", status))
        outputs.append(out.read_bytes())
    if outputs[0] != outputs[1]:
        failures.append("outputs-differ")
    if len(outputs[0].splitlines()) != 1000:
        failures.append(("trace-lines", len(outputs[0].splitlines())))
    if min(durations) >= 1.0:
        failures.append(("runtime", durations))
    report(
        9,
        f"6-component scenario, 1000 steps in {min(durations):.2f}s, byte-identical",
        failures,
    )


def _corpus():
    """Crafted invalid graph documents and the violation each must raise."""
    base = demo_graph().to_dict()

    def variant(mutate):
        doc = copy.deepcopy(base)
        mutate(doc)
        return doc

    def table(parent):
        return {
            "parents": [parent],
            "rows": [
                {"b": 0.9, "d": 0.05, "u": 0.05, "a": 0.5},
                {"b": 0.05, "d": 0.9, "u": 0.05, "a": 0.5},
            ],
        }

    def cycle(doc):
        doc["nodes"].append({"name": "relay", "kind": "functional"})
        doc["dependencies"] += [["grid_map", "relay"], ["relay", "grid_map"]]
        doc["conditional_tables"]["relay"] = table("grid_map")
        doc["conditional_tables"]["grid_map"] = table("relay")

    def am_dependency(doc):
        doc["dependencies"].append(["localization_monitor", "grid_map"])
        doc["conditional_tables"]["grid_map"] = table("localization_monitor")

    def table_too_small(doc):
        doc["conditional_tables"]["planner"]["rows"] = \
            doc["conditional_tables"]["planner"]["rows"][:2]

    def table_wrong_parents(doc):
        doc["conditional_tables"]["planner"]["parents"] = ["grid_map", "localization"]

    def table_missing(doc):
        del doc["conditional_tables"]["planner"]

    def sink_unreachable(doc):
        doc["dependencies"].remove(["planner", "Z"])

    def duplicate_trust(doc):
        doc["functional_trust"].append(["planner_monitor", "planner"])

    def unknown_node(doc):
        doc["functional_trust"].append(["ghost", "planner"])

    def referral_missing(doc):
        del doc["referral_trust"]["planner_monitor"]

    def referral_on_functional(doc):
        doc["referral_trust"]["planner"] = {"b": 1.0, "d": 0.0, "u": 0.0, "a": 0.5}

    def trust_from_functional(doc):
        doc["functional_trust"].append(["grid_map", "planner"])

    def trust_into_sink(doc):
        doc["functional_trust"].append(["planner_monitor", "Z"])

    def dependency_into_overall(doc):
        doc["dependencies"].append(["planner_monitor", "A"])
        doc["conditional_tables"]["A"] = table("planner_monitor")

    def misnamed_artificial(doc):
        doc["nodes"].append({"name": "root", "kind": "overall_assessment"})

    def resolution_cycle(doc):
        doc["dependencies"].append(["planner", "planner_monitor"])
        doc["conditional_tables"]["planner_monitor"] = table("planner")

    return [
        ("dependency cycle", variant(cycle), "cycle"),
        ("monitor feeds functional node", variant(am_dependency), "am-dependency"),
        ("conditional table too small", variant(table_too_small), "table-size"),
        ("table conditions on wrong parents", variant(table_wrong_parents), "table-parents"),
        ("conditional table missing", variant(table_missing), "missing-table"),
        ("sink not fed by terminal node", variant(sink_unreachable), "missing-z-edge"),
        ("duplicate functional-trust edge", variant(duplicate_trust), "duplicate-edge"),
        ("edge references unknown node", variant(unknown_node), "unknown-node"),
        ("assessment without referral trust", variant(referral_missing),
         "missing-referral-trust"),
        ("referral trust on functional node", variant(referral_on_functional),
         "referral-target"),
        ("functional node emits trust", variant(trust_from_functional), "trust-source"),
        ("trust edge into the sink", variant(trust_into_sink), "trust-target"),
        ("dependency into overall assessor", variant(dependency_into_overall),
         "dependency-target"),
        ("misnamed artificial node", variant(misnamed_artificial), "artificial-node"),
        ("trust/dependency resolution loop", variant(resolution_cycle),
         "resolution-cycle"),
    ]


def test_10_validator_corpus():
    failures = []
    corpus = _corpus()
    if len(corpus) < 10:
        failures.append(("corpus-size", len(corpus)))
    for label, doc, expected in corpus:
        codes = [v.code for v in AssessmentGraph.from_dict(doc).validate()]
        if codes != [expected]:
            failures.append((label, expected, codes))
    if demo_graph().validate():
        failures.append("clean-fixture-flagged")
    report(10, f"{len(corpus)} crafted invalid graphs each yield exactly the named violation",
           failures)
