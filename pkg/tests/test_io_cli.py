import hashlib
import json
import os
import subprocess
import sys

import pytest

from graph_mend import io
from graph_mend.cli import main
from graph_mend.conditions import conj
from graph_mend.dot import graph_to_dot, type_graph_to_dot
from graph_mend.graph import Graph
from graph_mend.repair import SynthesisOptions, synthesize_legit
from graph_mend.samples import (PL_TOK_TK, TWO_CONTAINERS, at_most_one_container, every_place_has_token,
                                lone_place_graph, no_parallel_tok, parallel_tok)

from fixture_constraints import legit_constraints


def test_type_graph_round_trip(petri):
    assert io.type_graph_from_json(io.type_graph_to_json(petri)) == petri


@pytest.mark.parametrize("g", [Graph.EMPTY, PL_TOK_TK, TWO_CONTAINERS, parallel_tok(3)])
def test_graph_round_trip(g):
    assert io.graph_from_json(json.loads(io.dumps(io.graph_to_json(g)))) == g


@pytest.mark.parametrize("name, d", legit_constraints())
def test_condition_round_trip(name, d):
    assert io.condition_from_json(json.loads(io.dumps(io.condition_to_json(d)))) == d


def test_program_round_trip(petri):
    plan = synthesize_legit(conj(Graph.EMPTY, [at_most_one_container(), every_place_has_token()]),
                            SynthesisOptions(tg=petri))
    doc = json.loads(io.dumps(io.program_file(plan.program, plan.condition, plan.provenance)))
    assert io.load_program(doc) == plan.program


def test_format_errors():
    with pytest.raises(io.FormatError):
        io.graph_from_json({"nodes": [{"id": "a"}], "edges": []})
    with pytest.raises(io.FormatError):
        io.condition_from_json({"kind": "maybe"})
    with pytest.raises(io.FormatError):
        io.graph_from_json({"nodes": [{"id": "a", "type": "A"}], "edges": [{"id": "e", "src": "a",
                                                                           "tgt": "b", "type": "t"}]})


def test_dot_rendering(petri):
    text = type_graph_to_dot(petri)
    assert 'arrowtail=diamond' in text
    assert text.count("pt_src / pl_out") + text.count("pl_out / pt_src") == 1
    g = Graph({"a": "PTArc", "p": "Pl"}, {"s": ("a", "p", "pt_src"), "o": ("p", "a", "pl_out")})
    assert graph_to_dot(g, petri).count("->") == 1


@pytest.fixture
def files(tmp_path, petri):
    paths = {}

    def put(name, obj):
        p = tmp_path / name
        io.write_json(p, obj)
        paths[name] = str(p)

    put("tg", io.type_graph_to_json(petri))
    put("par", io.graph_to_json(parallel_tok(3)))
    put("lone", io.graph_to_json(lone_place_graph()))
    put("two", io.graph_to_json(TWO_CONTAINERS))
    put("ok", io.graph_to_json(PL_TOK_TK))
    put("nopar", io.condition_to_json(no_parallel_tok()))
    put("conj", io.condition_to_json(conj(Graph.EMPTY, [at_most_one_container(), every_place_has_token()])))
    put("anchored", {"kind": "true", "anchor": io.graph_to_json(PL_TOK_TK)})
    bad = tmp_path / "bad"
    bad.write_text("{")
    paths["bad"] = str(bad)
    paths["dir"] = tmp_path
    return paths


def test_cli_validate(files):
    assert main(["validate", files["tg"]]) == 0
    assert main(["validate", files["tg"], files["two"]]) == 1
    assert main(["validate", files["bad"]]) == 2


def test_cli_validate_report(files, capsys):
    main(["validate", files["tg"], files["two"]])
    report = json.loads(capsys.readouterr().out)
    assert report["emf"][0]["kind"] == "one-container"
    assert report["emf"][0]["items"] == ["e", "f"]


def test_cli_check(files):
    assert main(["check", files["tg"], files["ok"], files["nopar"]]) == 0
    assert main(["check", files["tg"], files["par"], files["nopar"]]) == 1
    assert main(["check", files["tg"], files["ok"], files["anchored"]]) == 2
    assert main(["check", files["tg"], files["bad"], files["nopar"]]) == 2


def test_cli_repair(files, capsys):
    out = str(files["dir"] / "out.json")
    dot = str(files["dir"] / "out.dot")
    assert main(["repair", files["tg"], files["par"], "--constraint", files["nopar"], "--out", out,
                 "--dot", dot]) == 0
    g = io.graph_from_json(io.read_json(out))
    assert len(g.edges) == 1
    assert main(["check", files["tg"], out, files["nopar"]]) == 0
    assert "digraph" in open(dot).read()


def test_cli_repair_is_stable_on_satisfying_input(files, capsys):
    assert main(["repair", files["tg"], files["ok"], "--constraint", files["conj"]]) == 0
    assert capsys.readouterr().out == io.dumps(io.graph_to_json(PL_TOK_TK))


def test_cli_synthesize_and_run_program(files, capsys):
    prog = str(files["dir"] / "prog.json")
    assert main(["synthesize", files["tg"], files["conj"], "--out", prog, "--trace"]) == 0
    assert "conjunction" in capsys.readouterr().err
    assert main(["repair", files["tg"], files["lone"], "--program", prog, "--all"]) == 0
    results = json.loads(capsys.readouterr().out)
    assert len(results) == 1 and {n["id"] for n in results[0]["nodes"]} == {"p2", "t"}


def test_cli_synthesize_emfk(files, capsys):
    assert main(["synthesize", files["tg"], "--emfk", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["emfk"]["preserves_node_count"] is True


def test_cli_not_legit(files, tmp_path):
    d = {"kind": "not", "sub": {"kind": "and", "subs": [
        {"kind": "exists", "inclusion": {"domain": io.graph_to_json(Graph.EMPTY),
                                         "codomain": {"nodes": [{"id": "p", "type": "Pl"}], "edges": []}}},
        {"kind": "exists", "inclusion": {"domain": io.graph_to_json(Graph.EMPTY),
                                         "codomain": {"nodes": [{"id": "t", "type": "Tk"}], "edges": []}}}]}}
    p = tmp_path / "nl.json"
    p.write_text(json.dumps(d))
    assert main(["synthesize", files["tg"], str(p)]) == 1


def test_cli_complete(files, capsys):
    assert main(["complete", files["tg"], files["two"]]) == 0
    g = io.graph_from_json(json.loads(capsys.readouterr().out))
    assert len(g.edges) == 1


def test_cli_budget_from_environment(files, monkeypatch, capsys):
    monkeypatch.setenv("GRAPH_MEND_MAX_STEPS", "1")
    assert main(["repair", files["tg"], files["par"], "--constraint", files["nopar"]]) == 1
    assert "budget" in capsys.readouterr().err


def test_cli_usage_errors(files):
    assert main([]) == 2
    assert main(["repair", files["tg"], files["par"]]) == 2
    assert main(["check", files["tg"], str(files["dir"] / "missing.json"), files["nopar"]]) == 2


def test_entry_point_runs(files):
    r = subprocess.run([sys.executable, "-m", "graph_mend.cli", "check", files["tg"], files["ok"], files["nopar"]],
                       capture_output=True, text=True, env={**os.environ})
    assert r.returncode == 0 and json.loads(r.stdout) == {"satisfied": True}


def test_emfk_program_matches_pinned_digest(fixtures_dir, tmp_path):
    # the program file is large; its digest was recorded once and is pinned here
    out = tmp_path / "p.json"
    assert main(["synthesize", str(fixtures_dir / "petri.typegraph.json"), "--emfk", "2", "--out", str(out)]) == 0
    pinned = (fixtures_dir / "petri.emfk2.program.sha256").read_text().strip()
    assert hashlib.sha256(out.read_bytes()).hexdigest() == pinned


def test_fixture_files_round_trip(fixtures_dir):
    for p in sorted(fixtures_dir.glob("*.json")):
        doc = io.read_json(p)
        if p.name.endswith(".typegraph.json"):
            back = io.type_graph_to_json(io.type_graph_from_json(doc))
        elif p.name.endswith(".graph.json"):
            back = io.graph_to_json(io.graph_from_json(doc))
        elif p.name.endswith(".constraint.json"):
            back = io.condition_to_json(io.condition_from_json(doc))
        else:
            back = dict(doc, program=io.program_to_json(io.load_program(doc)))
        assert io.dumps(back) == p.read_text(), p.name
