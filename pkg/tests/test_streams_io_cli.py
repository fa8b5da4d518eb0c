import json
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from fracround import ONE
from fracround.cli import main
from fracround.errors import InputError, ParameterError, PromiseViolation
from fracround.io import format_graph, format_stream, parse_graph, parse_stream
from fracround.streams import gen_decremental, gen_recourse_path, gen_stream


def test_recourse_path_shape():
    s = gen_recourse_path("1/4", steps=8)
    assert s.graph.m == 18
    assert all(w == ONE // 2 for _, w in s.initial.items())
    first, last = s.events[0][0], s.events[1][0]
    assert s.events[:4] == [(first, 0), (last, 0), (first, ONE // 2), (last, ONE // 2)]
    with pytest.raises(ParameterError):
        gen_recourse_path("2/7")


def test_decremental_stream_deletes_every_edge_once():
    s = gen_decremental(3, n=30, p=0.2)
    assert sorted(e for e, _ in s.events) == sorted(s.graph.edges())
    assert all(w == 0 for _, w in s.events)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["random-bip", "heavy-light"]))
def test_generated_streams_keep_promises(seed, kind):
    s = gen_stream(kind, seed, n=16, steps=60)
    delta = s.meta["delta"] if kind == "random-bip" else None
    for x in s.replay(delta):
        assert x.cache_consistent()


def test_replay_detects_overload():
    s = gen_recourse_path("1/4", steps=0)
    s.events = [(0, ONE)]
    with pytest.raises(PromiseViolation):
        list(s.replay())


def test_graph_round_trip():
    s = gen_stream("random-bip", 7, n=12, steps=20)
    text = format_graph(s.graph, s.initial)
    g, x, rounded = parse_graph(text)
    assert rounded == [] and format_graph(g, x) == text
    s2 = parse_stream(format_stream(s), g, x)
    assert s2.events == s.events and s2.meta["seed"] == "7"


def test_parse_errors_and_rounding():
    with pytest.raises(InputError):
        parse_graph("e 0 1 1/2\n")
    with pytest.raises(InputError):
        parse_graph("n 3 bipartite\ne 0 1 1/2\ne 1 2 1/2\ne 0 2 1/4\n")
    g, x, rounded = parse_graph("n 2 general\ne 0 1 0.1\n")
    assert len(rounded) == 1 and rounded[0]["edge"] == [0, 1]
    with pytest.raises(InputError):
        parse_stream("d 0 5\n", g, x)


@pytest.fixture
def files(tmp_path):
    g, st_ = tmp_path / "g.txt", tmp_path / "s.txt"
    assert main(["gen", "random-bip", "--seed", "3", "--n", "16", "--steps", "80",
                 "--graph-out", str(g), "--out", str(st_)]) == 0
    return g, st_


def test_cli_runs_are_byte_identical(files, tmp_path):
    g, s = files
    for cmd in (["round-dyn", str(g), str(s), "--mode", "slow"],
                ["pipeline", str(g), str(s), "--backend", "rand", "--seed", "5"],
                ["round-static", str(g)]):
        outs = []
        for k in range(2):
            out = tmp_path / f"m{k}.csv"
            assert main(cmd + ["--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert outs[0].startswith(b"# fracround-metrics v1")


def test_cli_json_and_summary(files, tmp_path):
    g, s = files
    out, summ = tmp_path / "m.json", tmp_path / "s.json"
    assert main(["round-dyn", str(g), str(s), "--format", "json", "--out", str(out), "--summary", str(summ)]) == 0
    data = json.loads(out.read_text())
    assert data["rows"] and json.loads(summ.read_text())


def test_cli_decremental(tmp_path):
    g, s = tmp_path / "g.txt", tmp_path / "s.txt"
    assert main(["gen", "decremental", "--seed", "1", "--n", "20", "--graph-out", str(g), "--out", str(s)]) == 0
    out = tmp_path / "m.csv"
    assert main(["decremental", str(g), str(s), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[1] == "step,phase,mu,matching,recourse_cum"


def test_cli_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n 2 general\ne 0 0 1\n")
    assert main(["round-static", str(bad)]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_sampler_test_and_module_entry(tmp_path):
    out = tmp_path / "m.json"
    assert main(["sampler-test", "--samples", "2000", "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["summary"]
    r = subprocess.run([sys.executable, "-m", "fracround", "--help"], capture_output=True, text=True)
    assert r.returncode == 0 and "round-dyn" in r.stdout
