import random

import pytest
from hypothesis import given, settings, strategies as st

from graph_mend.conditions import And, Not, PlainRule, TrueC, conj, disj, exists, not_exists
from graph_mend.corpus import random_graph
from graph_mend.graph import Graph, GraphError, is_isomorphic
from graph_mend.programs import Alap, Choice, ExecStats, Rule, RuleStep, Try, execute, execute_all, iter_steps
from graph_mend.repair import (NoEstablishedSequentialization, NotLegit, NotProper, RepairPlan,
                               SynthesisOptions, check_preserving_bounded, find_sequentialization,
                               make_preserving, preservation_condition, repairing_set_absence,
                               repairing_set_exists, synthesize_disjunction, synthesize_legit, synthesize_proper)
from graph_mend.samples import (N1, N1_LOOP, PARALLEL_TOK, PL, PL_TK, PL_TOK_TK, TWO_CONTAINERS,
                                at_most_one_container, edge_has_third_node, every_place_has_token,
                                lone_place_graph, no_parallel_tok, node_has_loop, node_has_successor,
                                parallel_tok, petri_type_graph, plain_type_graph)

import oracle
from fixture_constraints import legit_constraints

EMPTY = Graph.EMPTY
PETRI = petri_type_graph()


def test_exists_repairing_set_for_place_token():
    r1, r2 = repairing_set_exists(PL, PL_TOK_TK)
    assert r1.lhs == PL and r1.rhs == PL_TOK_TK
    assert r2.lhs == PL_TK and r2.rhs == PL_TOK_TK
    assert r1.ac == not_exists(PL, PL_TK)
    assert isinstance(r2.ac, And) and len(r2.ac.subs) == 2
    assert not_exists(PL_TK, PL_TOK_TK) in r2.ac.subs


def test_exists_repairing_set_needs_real_inclusion():
    with pytest.raises(GraphError):
        repairing_set_exists(PL, PL)


def test_absence_repairing_set_deletes_one_edge():
    rules = repairing_set_absence(EMPTY, PARALLEL_TOK)
    # the two edges are swapped by an automorphism, so one rule remains
    assert len(rules) == 1
    p = rules[0].plain
    assert len(p.lhs.edges) == 2 and len(p.interface.edges) == 1 and p.interface.nodes == p.lhs.nodes


def test_absence_repairing_set_without_new_edges_deletes_a_node():
    rules = repairing_set_absence(PL, PL_TK)
    assert len(rules) == 1 and rules[0].plain.interface == PL


def test_absence_repairing_set_for_shared_token():
    rules = repairing_set_absence(EMPTY, TWO_CONTAINERS)
    assert len(rules) == 1
    assert all(len(r.plain.rhs.nodes) == 3 for r in rules)


@pytest.mark.parametrize("n", [2, 4, 6])
def test_parallel_edge_plan(n):
    plan = synthesize_legit(no_parallel_tok())
    assert isinstance(plan.program, Alap)
    stats = ExecStats()
    out = execute(plan.program, parallel_tok(n), stats=stats)
    assert len(out.graph.edges) == 1
    assert stats.alap_iterations == n - 1


def test_universal_plan_repairs_lone_place():
    plan = synthesize_legit(every_place_has_token())
    assert isinstance(plan.program, Alap)
    out = execute(plan.program, lone_place_graph())
    assert oracle.sat_constraint(out.graph, every_place_has_token())


def test_proper_rejects_non_proper():
    d = Not(EMPTY, And(EMPTY, (exists(EMPTY, PL), exists(EMPTY, Graph({"t": "Tk"})))))
    with pytest.raises(NotProper):
        synthesize_proper(d)
    with pytest.raises(NotLegit):
        synthesize_legit(d)


def test_true_gives_skip():
    plan = synthesize_legit(TrueC(EMPTY))
    assert execute(plan.program, PL).graph == PL


def test_nested_exists_uses_guarded_try():
    d = exists(EMPTY, PL, not_exists(PL, PL_TOK_TK))
    plan = synthesize_legit(d)
    assert isinstance(plan.program, Try)
    g = Graph({"p": "Pl", "t": "Tk"}, {"e": ("p", "t", "tok")})
    assert oracle.sat_constraint(execute(plan.program, g).graph, d)
    # already satisfied: nothing changes even though a marked place exists
    g2 = Graph({"p": "Pl", "q": "Pl", "t": "Tk"}, {"e": ("p", "t", "tok")})
    assert all(r.graph == g2 for r in execute_all(plan.program, g2).results)


def test_disjunction_builds_a_choice():
    ds = [exists(EMPTY, PL), not_exists(EMPTY, Graph({"t": "Tk"}))]
    plan = synthesize_disjunction(ds, [synthesize_legit(d) for d in ds])
    assert isinstance(plan.program, Try)
    assert isinstance(plan.program.body.parts[1], Choice)
    single = synthesize_disjunction(ds[:1], [synthesize_legit(ds[0])])
    assert single.program == synthesize_legit(ds[0]).program


def test_disjunction_is_stable():
    d = disj(EMPTY, [exists(EMPTY, Graph({"n": "PN"})), not_exists(EMPTY, PL)])
    g = Graph({"n": "PN", "p": "Pl"})
    plan = synthesize_legit(d)
    assert [r.graph for r in execute_all(plan.program, g).results] == [g]
    res = execute_all(plan.program, PL).results
    assert sorted(sorted(r.graph.nodes.values()) for r in res) == [[], ["PN", "Pl"]]


def test_preservation_condition_shortcuts():
    (r,) = repairing_set_absence(EMPTY, PARALLEL_TOK)
    assert isinstance(preservation_condition(r, no_parallel_tok()), TrueC)
    r1, r2 = repairing_set_exists(PL, PL_TOK_TK)
    # adding a tok edge can give a token a second container
    assert not isinstance(preservation_condition(r2, at_most_one_container()), TrueC)
    assert isinstance(preservation_condition(r1, exists(EMPTY, PL)), TrueC)


def test_make_preserving_blocks_violating_steps():
    plan = make_preserving(synthesize_legit(every_place_has_token()), at_most_one_container())
    res = check_preserving_bounded(plan, at_most_one_container(), PETRI, 3, 2)
    assert res.preserved


def test_conjunctive_example_deletes_the_lone_place():
    d = conj(EMPTY, [at_most_one_container(), every_place_has_token()])
    plan = synthesize_legit(d, SynthesisOptions(tg=PETRI))
    ex = execute_all(plan.program, lone_place_graph())
    assert len(ex.results) == 1
    out = ex.results[0].graph
    assert set(out.nodes) == {"p2", "t"}
    assert oracle.sat_constraint(out, d)


def test_loop_and_successor_ordering():
    tg = plain_type_graph()
    p_loop, p_succ = synthesize_legit(node_has_loop()), synthesize_legit(node_has_successor())
    bad = check_preserving_bounded(p_succ, node_has_loop(), tg, 2, 2)
    assert not bad.preserved and len(bad.before.nodes) <= 2
    assert is_isomorphic(bad.before, N1_LOOP)
    assert check_preserving_bounded(p_loop, node_has_successor(), tg, 2, 2).preserved
    seq = find_sequentialization([node_has_successor(), node_has_loop()], [p_succ, p_loop],
                                 SynthesisOptions(tg=tg))
    assert [c for c, _ in seq.items] == [node_has_successor(), node_has_loop()]


def test_pair_without_sequentialization():
    tg = plain_type_graph()
    d1, d2 = node_has_successor(), edge_has_third_node()
    p1, p2 = synthesize_legit(d1), synthesize_legit(d2)
    c12 = check_preserving_bounded(p1, d2, tg, 2, 2)
    c21 = check_preserving_bounded(p2, d1, tg, 2, 2)
    assert not c12.preserved and is_isomorphic(c12.before, N1)
    assert not c21.preserved and len(c21.before.nodes) == 2
    with pytest.raises(NoEstablishedSequentialization):
        synthesize_legit(conj(EMPTY, [d1, d2]), SynthesisOptions(tg=tg))


def test_rule_names_are_unique_within_a_plan():
    plan = synthesize_legit(legit_constraints()[-3][1], SynthesisOptions(tg=PETRI))
    names = [s.rule.name for s in iter_steps(plan.program)]
    assert len(names) == len(set(names))


def test_plan_records_provenance():
    plan = synthesize_legit(every_place_has_token())
    assert isinstance(plan, RepairPlan)
    assert plan.provenance and "stable" in plan.guarantees


constraints = st.sampled_from(legit_constraints())
graphs = st.integers(0, 10**6).map(
    lambda s: random_graph(PETRI, random.Random(s), 5, 7, node_types=["Pl", "Tk", "PN", "PTArc"]))


@settings(max_examples=80, deadline=None)
@given(constraints, graphs)
def test_repair_results_satisfy_the_constraint(named, g):
    _, d = named
    plan = synthesize_legit(d, SynthesisOptions(tg=PETRI))
    ex = execute_all(plan.program, g)
    assert ex.results
    for r in ex.results:
        assert oracle.sat_constraint(r.graph, d)
    if oracle.sat_constraint(g, d):
        assert all(oracle.is_iso(r.graph, g) for r in ex.results)


def test_identity_rules_are_ignored_by_the_falsifier():
    plan = RepairPlan(TrueC(EMPTY), RuleStep(Rule.make("id", PlainRule.identity(PL))), None)
    assert check_preserving_bounded(plan, no_parallel_tok(), PETRI, 2, 2).preserved
