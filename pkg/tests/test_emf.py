import random

from hypothesis import given, settings, strategies as st

from graph_mend.conditions import PlainRule, as_exists_basic, as_forall, as_not_exists, classify, satisfies_constraint
from graph_mend.corpus import enumerate_graphs, random_graph
from graph_mend.emf import (completion_plan, emf_complete, emfk_repair_program, generate_emfk, is_emf_model_graph,
                            node_count_invariant_check)
from graph_mend.graph import Graph, TypeGraph, is_isomorphic
from graph_mend.programs import Rule, RuleStep, execute
from graph_mend.repair import RepairPlan, synthesize_legit
from graph_mend.samples import (PARALLEL_TOK, PL, PL_TOK_TK, TWO_CONTAINERS, every_place_has_token,
                                lone_place_graph, no_parallel_tok, petri_type_graph)

import oracle

EMPTY = Graph.EMPTY
PETRI = petri_type_graph()
CYCLIC = TypeGraph.build(["A"], [("c", "A", "A")], containment=["c"])


def test_tags_are_negative_or_universal():
    s = generate_emfk(PETRI, 2)
    for tag, c in s.instances:
        cls = classify(c)
        assert cls.universal if tag == "all-opposites" else cls.negative


def test_no_containment_gives_no_container_or_cycle_instances():
    tg = TypeGraph.build(["N"], [("E", "N", "N")])
    s = generate_emfk(tg, 3)
    assert s.by_tag("one-container") == [] and s.by_tag("no-cycle") == []


def test_petri_instances():
    s = generate_emfk(PETRI, 2)
    assert any(is_isomorphic(as_not_exists(c), PARALLEL_TOK) for c in s.by_tag("no-parallel"))
    # one universal instance per ordered opposite pair
    assert len(s.by_tag("all-opposites")) == 8
    assert s.by_tag("no-cycle") == []
    arc = Graph({"a": "TPArc", "b": "Tr"}, {"e": ("a", "b", "tp_src")})
    back = Graph({"a": "TPArc", "b": "Tr"}, {"e": ("a", "b", "tp_src"), "r": ("b", "a", "tr_out")})
    shapes = [as_forall(c) for c in s.by_tag("all-opposites")]
    assert any(is_isomorphic(c, arc) and is_isomorphic(as_exists_basic(sub), back) for c, sub in shapes)


def test_cycle_instances_cover_short_cycles():
    s = generate_emfk(CYCLIC, 3)
    assert len(s.by_tag("no-cycle")) == 3
    ring = Graph({"x": "A", "y": "A"}, {"1": ("x", "y", "c"), "2": ("y", "x", "c")})
    assert any(not satisfies_constraint(ring, c) for c in s.by_tag("no-cycle"))


def test_bounded_cycles_match_full_acyclicity_up_to_k():
    s = generate_emfk(CYCLIC, 3)
    for g in enumerate_graphs(CYCLIC, 3, 3):
        bounded = all(satisfies_constraint(g, c) for c in s.by_tag("no-cycle"))
        assert bounded == (not oracle.contains_cycle(g, CYCLIC.containment))


def test_is_emf_model_graph():
    assert is_emf_model_graph(EMPTY, PETRI) == []
    (v,) = is_emf_model_graph(TWO_CONTAINERS, PETRI)
    assert v.kind == "one-container" and v.items == ("e", "f")
    assert {x.kind for x in is_emf_model_graph(PARALLEL_TOK, PETRI)} == {"one-container", "no-parallel"}
    g = Graph({"x": "A", "y": "A", "z": "A"}, {"1": ("x", "y", "c"), "2": ("y", "z", "c"), "3": ("z", "x", "c")})
    assert "no-cycle" in {x.kind for x in is_emf_model_graph(g, CYCLIC)}
    arc = Graph({"a": "PTArc", "p": "Pl"}, {"s": ("a", "p", "pt_src")})
    assert [x.kind for x in is_emf_model_graph(arc, PETRI)] == ["all-opposites"]


def test_completion_plan_keeps_the_node_count():
    assert node_count_invariant_check(completion_plan(PETRI, 3))


def test_node_count_check_on_single_rules():
    assert node_count_invariant_check(synthesize_legit(no_parallel_tok()))
    add_tk = RepairPlan(EMPTY, RuleStep(Rule.make("t", PlainRule(PL, PL, PL_TOK_TK))), None)
    assert not node_count_invariant_check(add_tk)


def test_repair_program_with_kept_instances():
    kept = [no_parallel_tok()]
    plan = emfk_repair_program(PETRI, 2, kept, [every_place_has_token()])
    out = execute(plan.program, lone_place_graph()).graph
    assert oracle.sat_constraint(out, every_place_has_token())
    assert oracle.sat_constraint(out, no_parallel_tok())
    empty = emfk_repair_program(PETRI, 2, kept, [])
    assert execute(empty.program, PARALLEL_TOK).graph == PARALLEL_TOK


def test_complete_examples():
    assert emf_complete(EMPTY, PETRI) == EMPTY
    g = Graph({"p": "Pl", "q": "Pl", "t": "Tk", "a": "PTArc"},
              {"e": ("p", "t", "tok"), "f": ("q", "t", "tok"), "s": ("a", "p", "pt_src")})
    h = emf_complete(g, PETRI)
    assert is_emf_model_graph(h, PETRI) == [] and oracle.emf_ok(h, PETRI)
    ok = Graph({"p": "Pl", "t": "Tk"}, {"e": ("p", "t", "tok")})
    assert emf_complete(ok, PETRI) == ok


graphs = st.integers(0, 10**6).map(lambda s: random_graph(PETRI, random.Random(s), 6, 10))


@settings(max_examples=100, deadline=None)
@given(graphs)
def test_completion_yields_model_graphs(g):
    h = emf_complete(g, PETRI)
    assert oracle.emf_ok(h, PETRI)
    assert set(h.nodes) == set(g.nodes)
    if oracle.emf_ok(g, PETRI):
        assert h == g


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_completion_breaks_containment_cycles(seed):
    g = random_graph(CYCLIC, random.Random(seed), 5, 7)
    h = emf_complete(g, CYCLIC)
    assert oracle.emf_ok(h, CYCLIC)
