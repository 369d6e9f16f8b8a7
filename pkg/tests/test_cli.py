"""Command-line contract: exit codes, outputs, determinism, oracle replay."""

import json

import pytest

from slgraph.cli import main
from slgraph.scenario import demo_graph, demo_stream, write_demo

from scenario_oracle import compose_demo


@pytest.fixture(scope="module")
def fixture_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp("fixtures")
    write_demo(directory, steps=60)
    return directory


def run_infer(fixture_dir, tmp_path, *extra):
    out = tmp_path / "trace.jsonl"
    status = main(
        [
            "infer",
            "--graph", str(fixture_dir / "graph.json"),
            "--stream", str(fixture_dir / "stream.jsonl"),
            "--out", str(out),
            *extra,
        ]
    )
    return status, out


class TestValidateCommand:
    def test_bundled_fixture_is_valid(self, fixture_dir, capsys):
        assert main(["validate", str(fixture_dir / "graph.json")]) == 0
        assert capsys.readouterr().out.strip() == "OK"

    def test_missing_table_reports_violation(self, fixture_dir, tmp_path, capsys):
        doc = json.loads((fixture_dir / "graph.json").read_text())
        del doc["conditional_tables"]["planner"]
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(doc))
        assert main(["validate", str(path)]) == 2
        out = capsys.readouterr().out.strip().splitlines()
        assert len(out) == 1 and "missing-table" in out[0]

    def test_malformed_document(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["validate", str(path)]) == 3
        assert "line 1" in capsys.readouterr().err

    def test_unreadable_file(self, tmp_path, capsys):
        assert main(["validate", str(tmp_path / "missing.json")]) == 3


class TestInferCommand:
    def test_replay_succeeds(self, fixture_dir, tmp_path):
        status, out = run_infer(fixture_dir, tmp_path)
        assert status == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 60
        first = json.loads(lines[0])
        assert set(first) == {"t", "nodes", "overall"}
        assert set(first["nodes"]) == set(demo_graph().nodes)

    def test_provenance_flag(self, fixture_dir, tmp_path):
        status, out = run_infer(fixture_dir, tmp_path, "--provenance")
        assert status == 0
        first = json.loads(out.read_text().splitlines()[0])
        assert "provenance" in first
        assert "assessors" in first["provenance"]["planner"]

    def test_byte_identical_across_runs(self, fixture_dir, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        _, first = run_infer(fixture_dir, tmp_path / "a", "--provenance")
        _, second = run_infer(fixture_dir, tmp_path / "b", "--provenance")
        assert first.read_bytes() == second.read_bytes()

    def test_plot_export_row_count(self, fixture_dir, tmp_path):
        status, _ = run_infer(
            fixture_dir, tmp_path, "--plot-export", str(tmp_path / "plots")
        )
        assert status == 0
        rows = (tmp_path / "plots" / "series.csv").read_text().splitlines()
        node_count = len(demo_graph().nodes)
        assert rows[0] == "t,node,b,d,u,P"
        assert len(rows) - 1 == 60 * node_count

    def test_empty_stream(self, fixture_dir, tmp_path):
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        out = tmp_path / "trace.jsonl"
        status = main(
            ["infer", "--graph", str(fixture_dir / "graph.json"),
             "--stream", str(empty), "--out", str(out)]
        )
        assert status == 0
        assert out.read_text() == ""

    def test_unsorted_stream(self, fixture_dir, tmp_path, capsys):
        lines = (fixture_dir / "stream.jsonl").read_text().splitlines()
        shuffled = tmp_path / "unsorted.jsonl"
        shuffled.write_text("\n".join([lines[10], lines[0]]) + "\n")
        out = tmp_path / "trace.jsonl"
        status = main(
            ["infer", "--graph", str(fixture_dir / "graph.json"),
             "--stream", str(shuffled), "--out", str(out)]
        )
        assert status == 4
        assert "line 2" in capsys.readouterr().err

    def test_unknown_edge(self, fixture_dir, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            '{"t":0,"source":"planner","target":"grid_map","b":0.5,"d":0.25,"u":0.25,"a":0.5}\n'
        )
        out = tmp_path / "trace.jsonl"
        status = main(
            ["infer", "--graph", str(fixture_dir / "graph.json"),
             "--stream", str(bad), "--out", str(out)]
        )
        assert status == 4
        assert "line 1" in capsys.readouterr().err

    def test_invalid_stream_json(self, fixture_dir, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text("{broken\n")
        out = tmp_path / "trace.jsonl"
        status = main(
            ["infer", "--graph", str(fixture_dir / "graph.json"),
             "--stream", str(bad), "--out", str(out)]
        )
        assert status == 3

    def test_stale_flag_expires_held_assessments(self, fixture_dir, tmp_path):
        gappy = tmp_path / "gappy.jsonl"
        gappy.write_text(
            '{"t":0,"source":"localization_monitor","target":"localization",'
            '"b":0.8,"d":0.1,"u":0.1,"a":0.5}\n'
            '{"t":20,"source":"planner_monitor","target":"planner",'
            '"b":0.9,"d":0.05,"u":0.05,"a":0.5}\n'
        )

        def localization_at_20(stale):
            out = tmp_path / f"trace-{stale}.jsonl"
            status = main(
                ["infer", "--graph", str(fixture_dir / "graph.json"),
                 "--stream", str(gappy), "--out", str(out), "--stale", stale]
            )
            assert status == 0
            last = json.loads(out.read_text().splitlines()[-1])
            return last["nodes"]["localization"]

        # default horizon of 10: the t=0 assessment has expired by t=20 and
        # the vacuous stand-in leaves the node with no usable evidence
        assert localization_at_20("10")["u"] == 1.0
        assert localization_at_20("30")["b"] > 0.7

    def test_incomplete_graph_fails_validation(self, fixture_dir, tmp_path, capsys):
        doc = json.loads((fixture_dir / "graph.json").read_text())
        del doc["conditional_tables"]["Z"]
        path = tmp_path / "incomplete.json"
        path.write_text(json.dumps(doc))
        out = tmp_path / "trace.jsonl"
        status = main(
            ["infer", "--graph", str(path),
             "--stream", str(fixture_dir / "stream.jsonl"), "--out", str(out)]
        )
        assert status == 2
        assert "missing-table" in capsys.readouterr().err


class TestGenExampleCommand:
    def test_generates_valid_fixtures(self, tmp_path, capsys):
        assert main(["gen-example", str(tmp_path / "out")]) == 0
        printed = capsys.readouterr().out.splitlines()
        assert len(printed) == 2
        assert main(["validate", str(tmp_path / "out" / "graph.json")]) == 0

    def test_stream_covers_both_regimes(self, tmp_path):
        main(["gen-example", str(tmp_path / "out")])
        lines = (tmp_path / "out" / "stream.jsonl").read_text().splitlines()
        times = {json.loads(line)["t"] for line in lines}
        assert min(times) == 0 and max(times) == 999

    def test_unwritable_directory(self, tmp_path, capsys):
        blocker = tmp_path / "blocker"
        blocker.write_text("a file, not a directory")
        assert main(["gen-example", str(blocker / "sub")]) == 3


class TestOracleReplay:
    def test_trace_matches_hand_composition(self, fixture_dir, tmp_path):
        status, out = run_infer(fixture_dir, tmp_path)
        assert status == 0
        graph = demo_graph()
        records = demo_stream(60)
        by_time = {}
        for record in records:
            by_time.setdefault(record.timestamp, {})[
                (record.source, record.target)
            ] = record.opinion
        traces = [json.loads(line) for line in out.read_text().splitlines()]
        assert len(traces) == 60
        for trace in traces[::7]:  # sample across both regimes
            expected = compose_demo(graph, by_time[trace["t"]])
            assert set(trace["nodes"]) == set(expected)
            for name, opinion in expected.items():
                got = trace["nodes"][name]
                assert got["b"] == pytest.approx(opinion.belief, abs=1e-9), name
                assert got["d"] == pytest.approx(opinion.disbelief, abs=1e-9), name
                assert got["u"] == pytest.approx(opinion.uncertainty, abs=1e-9), name
                assert got["a"] == pytest.approx(opinion.base_rate, abs=1e-9), name
