"""EMF well-formedness: bounded constraint sets, direct checks, completion."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from itertools import combinations_with_replacement

from .conditions import Condition, classify, conj, exists, forall, not_exists
from .graph import Graph, TypeGraph, Violation, containment_pairs, invariant, is_isomorphic
from .programs import Skip, execute, iter_steps
from .repair import RepairPlan, Sequentialization, SynthesisOptions, _Synth, compose_conjunction

TAGS = ("one-container", "no-cycle", "no-parallel", "all-opposites")
EMPTY = Graph.EMPTY


@dataclass(frozen=True)
class EmfkConstraintSet:
    k: int
    instances: tuple[tuple[str, Condition], ...]

    def by_tag(self, tag: str) -> list[Condition]:
        return [c for t, c in self.instances if t == tag]

    def conditions(self) -> list[Condition]:
        return [c for _, c in self.instances]


def _partitions(items: list[str]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _quotients(g: Graph) -> list[Graph]:
    """``g`` and every graph obtained by merging same-typed nodes, up to isomorphism."""
    out: list[Graph] = []
    for part in _partitions(list(g.nodes)):
        if any(len({g.nodes[v] for v in block}) > 1 for block in part):
            continue
        rep = {v: block[0] for block in part for v in block}
        h = Graph({block[0]: g.nodes[block[0]] for block in part},
                  {e: (rep[x.src], rep[x.tgt], x.type) for e, x in g.edges.items()})
        if not any(invariant(h) == invariant(o) and is_isomorphic(h, o) for o in out):
            out.append(h)
    return out


def _tag1(tg: TypeGraph) -> list[Condition]:
    by_target: dict[str, list[str]] = defaultdict(list)
    for et in sorted(tg.containment):
        by_target[tg.edge_types[et].tgt].append(et)
    out = []
    for target, ets in sorted(by_target.items()):
        for t1, t2 in combinations_with_replacement(ets, 2):
            g = Graph({"x": target, "s1": tg.edge_types[t1].src, "s2": tg.edge_types[t2].src},
                      {"e1": ("s1", "x", t1), "e2": ("s2", "x", t2)})
            for q in _quotients(g):
                # same type and same source is a parallel pair, left to the no-parallel schema
                if t1 == t2 and q.edges["e1"].src == q.edges["e2"].src:
                    continue
                out.append(not_exists(EMPTY, q))
    return out


def _tag2(tg: TypeGraph, k: int) -> list[Condition]:
    cont = sorted(tg.containment)
    out, seen = [], set()

    def walk(path: list[str]):
        n = len(path)
        if n and tg.edge_types[path[-1]].tgt == tg.edge_types[path[0]].src:
            key = min(tuple(path[i:] + path[:i]) for i in range(n))
            if key not in seen:
                seen.add(key)
                nodes = {f"c{i}": tg.edge_types[et].src for i, et in enumerate(path)}
                edges = {f"k{i}": (f"c{i}", f"c{(i + 1) % n}", et) for i, et in enumerate(path)}
                out.append(not_exists(EMPTY, Graph(nodes, edges)))
        if n == k:
            return
        for et in cont:
            if not n or tg.edge_types[et].src == tg.edge_types[path[-1]].tgt:
                walk(path + [et])

    walk([])
    return out


def _tag3(tg: TypeGraph) -> list[Condition]:
    out = []
    for et, x in tg.edge_types.items():
        g = Graph({"s": x.src, "t": x.tgt}, {"e1": ("s", "t", et), "e2": ("s", "t", et)})
        out.extend(not_exists(EMPTY, q) for q in _quotients(g))
    return out


def _tag4(tg: TypeGraph) -> list[Condition]:
    out = []
    for t1, t2 in tg.opposites:
        x = tg.edge_types[t1]
        for c in _quotients(Graph({"a": x.src, "b": x.tgt}, {"e": ("a", "b", t1)})):
            s, t = c.edges["e"].src, c.edges["e"].tgt
            out.append(forall(EMPTY, c, exists(c, c.union(Graph(c.nodes, {"r": (t, s, t2)})))))
    return out


def generate_emfk(tg: TypeGraph, k: int) -> EmfkConstraintSet:
    """All instances of the four bounded EMF schemas over ``tg``."""
    if k < 1:
        raise ValueError("k must be positive")
    inst = [("one-container", c) for c in _tag1(tg)]
    inst += [("no-cycle", c) for c in _tag2(tg, k)]
    inst += [("no-parallel", c) for c in _tag3(tg)]
    inst += [("all-opposites", c) for c in _tag4(tg)]
    return EmfkConstraintSet(k, tuple(inst))


def is_emf_model_graph(g: Graph, tg: TypeGraph) -> list[Violation]:
    """Check the four EMF conditions directly; an empty list means ``g`` is a model graph.

    Acyclicity uses the full containment closure, not a length bound.
    """
    out: list[Violation] = []
    incoming: dict[str, list[str]] = defaultdict(list)
    for e, x in g.edges.items():
        if x.type in tg.containment:
            incoming[x.tgt].append(e)
    for v, es in sorted(incoming.items()):
        if len(es) > 1:
            out.append(Violation("one-container", tuple(sorted(es)), f"{v} has {len(es)} containers"))
    for v, w in sorted(containment_pairs(g, tg)):
        if v == w:
            out.append(Violation("no-cycle", (v,), f"{v} contains itself"))
    par: dict[tuple, list[str]] = defaultdict(list)
    for e, x in g.edges.items():
        par[x].append(e)
    for x, es in sorted(par.items()):
        if len(es) > 1:
            out.append(Violation("no-parallel", tuple(sorted(es)), f"parallel {x.type} edges {x.src}->{x.tgt}"))
    for e, x in g.edges.items():
        opp = tg.opposite_of(x.type)
        if opp is not None and not g.index.par.get((x.tgt, x.src, opp)):
            out.append(Violation("all-opposites", (e,), f"{e} lacks a reverse {opp} edge"))
    return out


def emfk_repair_program(tg: TypeGraph, k: int, emfk1: list[Condition] | None = None,
                        emfk2: list[Condition] | None = None) -> RepairPlan:
    """Repair ``emfk2`` while keeping ``emfk1``: negatives first, then the universals.

    With both sets omitted, ``emfk2`` is the whole bounded set, which gives
    the completion program.
    """
    emfk1 = list(emfk1 or [])
    emfk2 = list(generate_emfk(tg, k).conditions() if emfk2 is None else emfk2)
    for c in emfk1:
        if not classify(c).negative:
            raise ValueError(f"kept instance must be negative: {c!r}")
    negs, unis = [], []
    for c in emfk2:
        cls = classify(c)
        if cls.negative:
            negs.append(c)
        elif cls.universal:
            unis.append(c)
        else:
            raise ValueError(f"instance must be negative or universal: {c!r}")
    opts = SynthesisOptions(tg=tg)
    synth = _Synth(opts)
    plans = [synth.plan(c) for c in negs + unis]
    conds = negs + unis
    if not unis:
        kind, split = "negative", len(negs)
    else:
        kind, split = "mixed-case-3", len(negs)
    if kind == "mixed-case-3" and emfk1:
        # the kept instances count as already repaired negatives
        conds = emfk1 + conds
        plans = [RepairPlan(c, _skip_plan(c), classify(c)) for c in emfk1] + plans
        split += len(emfk1)
    if not conds:
        return RepairPlan(_conj(conds), Skip(), classify(_conj(conds)), ("empty instance set",),
                          frozenset({"stable", "terminating"}))
    seq = Sequentialization(tuple(zip(conds, plans)), kind, split)
    return compose_conjunction(seq, opts, names=synth.names, condition=_conj(conds))


def _skip_plan(c: Condition):
    return Skip(c.anchor, "kept")


def _conj(cs: list[Condition]) -> Condition:
    return conj(EMPTY, cs)


def node_count_invariant_check(plan: RepairPlan) -> bool:
    """True iff no rule of the plan creates or deletes nodes."""
    for s in iter_steps(plan.program):
        p = s.rule.plain
        if set(p.lhs.nodes) != set(p.interface.nodes) or set(p.rhs.nodes) != set(p.interface.nodes):
            return False
    return True


_PLANS: dict[tuple[TypeGraph, int], RepairPlan] = {}


def completion_plan(tg: TypeGraph, k: int) -> RepairPlan:
    key = (tg, k)
    if key not in _PLANS:
        _PLANS[key] = emfk_repair_program(tg, k)
    return _PLANS[key]


def emf_complete(g: Graph, tg: TypeGraph, seed: int = 0, max_steps: int | None = None) -> Graph:
    """Complete ``g`` to an EMF model graph with the bounded completion program for ``k = |V|``."""
    plan = completion_plan(tg, max(1, len(g.nodes)))
    kw = {} if max_steps is None else {"max_steps": max_steps}
    return execute(plan.program, g, seed=seed, **kw).graph
