"""Rules with interfaces, direct transformations and graph programs.

A program runs on a :class:`LocatedGraph`, a graph together with the
current marking ``g: X -> G``.  Every run produces triples ``(lg, i)``
where ``i`` is the partial map from the input interface to the output
interface (ids only).
"""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Sequence

from .conditions import (Condition, PlainRule, TrueC, conj, satisfies_maps)
from .graph import Graph, GraphError, Morphism, find_isomorphism, invariant, match_maps


class ProgramError(RuntimeError):
    pass


class InterfaceMismatch(ProgramError):
    pass


class StepBudgetExceeded(ProgramError):
    def __init__(self, max_steps: int, trace: Sequence[str]):
        super().__init__(f"step budget of {max_steps} exceeded")
        self.max_steps = max_steps
        self.trace = list(trace)


DEFAULT_MAX_STEPS = 10_000


# -- partial interface maps ---------------------------------------------------

@dataclass(frozen=True)
class PartialMap:
    nodes: Mapping[str, str]
    edges: Mapping[str, str]

    @classmethod
    def identity(cls, g: Graph) -> PartialMap:
        return cls({v: v for v in g.nodes}, {e: e for e in g.edges})

    def then(self, other: PartialMap) -> PartialMap:
        """``other ∘ self`` as relational composition."""
        return PartialMap({k: other.nodes[v] for k, v in self.nodes.items() if v in other.nodes},
                          {k: other.edges[v] for k, v in self.edges.items() if v in other.edges})

    def is_total_on(self, g: Graph) -> bool:
        return all(v in self.nodes for v in g.nodes) and all(e in self.edges for e in g.edges)

    def key(self) -> tuple:
        return tuple(sorted(self.nodes.items())), tuple(sorted(self.edges.items()))

    def __hash__(self) -> int:
        return hash(self.key())

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PartialMap) and self.key() == other.key()


# -- rules ----------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    """``⟨x, p, ac, y⟩``: plain rule with interfaces and a left application condition."""

    name: str
    plain: PlainRule
    x: Morphism
    y: Morphism
    ac: Condition

    def __post_init__(self):
        if self.x.codomain != self.plain.lhs:
            raise GraphError(f"rule {self.name}: left interface must map into the left-hand side")
        if self.y.codomain != self.plain.rhs:
            raise GraphError(f"rule {self.name}: right interface must map into the right-hand side")
        if self.ac.anchor != self.plain.lhs:
            raise GraphError(f"rule {self.name}: application condition must be over the left-hand side")
        for m in (self.x, self.y):
            bad = m.check()
            if bad:
                raise GraphError(f"rule {self.name}: interface morphism invalid ({bad[0]})")

    @classmethod
    def make(cls, name: str, plain: PlainRule, x: Morphism | None = None,
             y: Morphism | None = None, ac: Condition | None = None) -> Rule:
        return cls(name, plain,
                   x if x is not None else Morphism.empty(plain.lhs),
                   y if y is not None else Morphism.empty(plain.rhs),
                   ac if ac is not None else TrueC(plain.lhs))

    @property
    def lhs(self) -> Graph:
        return self.plain.lhs

    @property
    def rhs(self) -> Graph:
        return self.plain.rhs

    @property
    def input(self) -> Graph:
        return self.x.domain

    @property
    def output(self) -> Graph:
        return self.y.domain

    @property
    def interface_map(self) -> PartialMap:
        """``i = y⁻¹ ∘ r ∘ l⁻¹ ∘ x``; defined where the item survives into ``y(Y)``."""
        k = self.plain.interface
        yn = {w: v for v, w in self.y.node_map.items()}
        ye = {f: e for e, f in self.y.edge_map.items()}
        return PartialMap(
            {v: yn[w] for v, w in self.x.node_map.items() if w in k.nodes and w in yn},
            {e: ye[f] for e, f in self.x.edge_map.items() if f in k.edges and f in ye})

    def with_ac(self, ac: Condition, name: str | None = None) -> Rule:
        return Rule(name or self.name, self.plain, self.x, self.y, ac)

    @property
    def is_identity(self) -> bool:
        return self.plain.is_identity


def make_select(a: Morphism, ac: Condition | None = None, name: str = "select") -> Rule:
    """``select(a, ac) = ⟨a, id_C, ac⟩``: extend the marking along ``a: A -> C``."""
    c = a.codomain
    return Rule.make(name, PlainRule.identity(c), x=a, y=Morphism.identity(c), ac=ac)


def make_unselect(a: Morphism, name: str = "unselect") -> Rule:
    """``unselect(a) = ⟨id_C, a⟩``: shrink the marking back to ``A``."""
    c = a.codomain
    return Rule.make(name, PlainRule.identity(c), x=Morphism.identity(c), y=a)


def make_guard(anchor: Graph, ac: Condition, name: str = "guard") -> Rule:
    """Identity rule on the marking that only checks ``ac``."""
    ident = Morphism.identity(anchor)
    return Rule.make(name, PlainRule.identity(anchor), x=ident, y=ident, ac=ac)


# -- programs ---------------------------------------------------------------------

class Program:
    label: str

    @property
    def input(self) -> Graph:
        raise NotImplementedError

    def children(self) -> tuple[Program, ...]:
        return ()


@dataclass(frozen=True)
class RuleStep(Program):
    rule: Rule
    spo: bool = False
    label: str = ""

    @property
    def input(self) -> Graph:
        return self.rule.input


@dataclass(frozen=True)
class Choice(Program):
    branches: tuple[Program, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ProgramError("choice needs at least one branch")

    @property
    def input(self) -> Graph:
        return self.branches[0].input

    def children(self):
        return self.branches


@dataclass(frozen=True)
class Seq(Program):
    parts: tuple[Program, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "parts", tuple(self.parts))
        if not self.parts:
            raise ProgramError("sequence needs at least one part")

    @property
    def input(self) -> Graph:
        return self.parts[0].input

    def children(self):
        return self.parts


@dataclass(frozen=True)
class Try(Program):
    body: Program
    label: str = ""

    @property
    def input(self) -> Graph:
        return self.body.input

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Alap(Program):
    body: Program
    label: str = ""

    @property
    def input(self) -> Graph:
        return self.body.input

    def children(self):
        return (self.body,)


@dataclass(frozen=True)
class Skip(Program):
    iface: Graph = Graph.EMPTY
    label: str = ""

    @property
    def input(self) -> Graph:
        return self.iface


def rule_set(rules: Sequence[Rule], spo: bool = False, label: str = "") -> Program:
    steps = [RuleStep(r, spo) for r in rules]
    if len(steps) == 1:
        return RuleStep(steps[0].rule, spo, label)
    return Choice(tuple(steps), label)


def iter_steps(p: Program) -> Iterator[RuleStep]:
    if isinstance(p, RuleStep):
        yield p
    for c in p.children():
        yield from iter_steps(c)


def map_steps(p: Program, fn: Callable[[RuleStep], Program]) -> Program:
    """Rebuild ``p`` with every rule step replaced by ``fn(step)``."""
    if isinstance(p, RuleStep):
        return fn(p)
    if isinstance(p, Choice):
        return Choice(tuple(map_steps(b, fn) for b in p.branches), p.label)
    if isinstance(p, Seq):
        return Seq(tuple(map_steps(b, fn) for b in p.parts), p.label)
    if isinstance(p, Try):
        return Try(map_steps(p.body, fn), p.label)
    if isinstance(p, Alap):
        return Alap(map_steps(p.body, fn), p.label)
    return p


# -- located graphs and direct transformations -------------------------------------

@dataclass(frozen=True)
class LocatedGraph:
    graph: Graph
    iface: Morphism

    @classmethod
    def of(cls, g: Graph) -> LocatedGraph:
        return cls(g, Morphism.empty(g))

    def __post_init__(self):
        if self.iface.codomain != self.graph:
            raise GraphError("marking must land in the located graph")


@dataclass
class ExecStats:
    steps: int = 0
    alap_iterations: int = 0
    rule_applications: dict = field(default_factory=dict)


class _Ctx:
    def __init__(self, rng: random.Random | None, max_steps: int, stats: ExecStats | None = None):
        self.rng = rng
        self.max_steps = max_steps
        self.stats = stats if stats is not None else ExecStats()
        self.counter = 0
        self.trace: deque[str] = deque(maxlen=40)

    def tick(self, what: str) -> None:
        self.stats.steps += 1
        self.trace.append(what)
        if self.stats.steps > self.max_steps:
            raise StepBudgetExceeded(self.max_steps, self.trace)

    def fresh(self, prefix: str, taken) -> str:
        while True:
            self.counter += 1
            cand = f"{prefix}_{self.counter}"
            if cand not in taken:
                return cand

    def order(self, items: list) -> list:
        if self.rng is not None and len(items) > 1:
            items = list(items)
            self.rng.shuffle(items)
        return items


def find_matches(lg: LocatedGraph, rule: Rule, spo: bool = False) -> list[tuple[dict, dict]]:
    """Matches ``g': L -> G`` with ``g' ∘ x = g`` satisfying the dangling condition
    (unless ``spo``) and the application condition, in canonical order."""
    return [m for m in _raw_matches(lg, rule) if _admissible(lg.graph, rule, m, spo)]


def _raw_matches(lg: LocatedGraph, rule: Rule) -> list[tuple[dict, dict]]:
    if lg.iface.domain != rule.input:
        raise InterfaceMismatch(
            f"rule {rule.name} expects interface {rule.input!r}, got {lg.iface.domain!r}")
    x, g = rule.x, lg.iface
    seed_n = {x.node_map[v]: w for v, w in g.node_map.items()}
    seed_e = {x.edge_map[e]: f for e, f in g.edge_map.items()}
    found = list(match_maps(rule.lhs, lg.graph, seed_n, seed_e))
    lhs = rule.lhs
    found.sort(key=lambda m: (tuple(m[0][v] for v in lhs.nodes), tuple(m[1][e] for e in lhs.edges)))
    return found


def _dangling(g: Graph, rule: Rule, m) -> set[str]:
    nm, em = m
    k = rule.plain.interface
    image = set(em.values())
    out = set()
    for v in rule.lhs.nodes:
        if v not in k.nodes:
            out.update(e for e in g.incident_edges(nm[v]) if e not in image)
    return out


def _admissible(g: Graph, rule: Rule, m, spo: bool) -> bool:
    if not spo and _dangling(g, rule, m):
        return False
    if isinstance(rule.ac, TrueC):
        return True
    return satisfies_maps(g, m[0], m[1], rule.ac)


def _transform(lg: LocatedGraph, rule: Rule, m, spo: bool, ctx: _Ctx) -> LocatedGraph:
    g = lg.graph
    nm, em = m
    k = rule.plain.interface
    del_n = {nm[v] for v in rule.lhs.nodes if v not in k.nodes}
    del_e = {em[e] for e in rule.lhs.edges if e not in k.edges}
    if spo:
        del_e |= _dangling(g, rule, m)
    nodes = {v: t for v, t in g.nodes.items() if v not in del_n}
    edges = {e: x for e, x in g.edges.items() if e not in del_e}
    hn = {v: nm[v] for v in k.nodes}
    he = {e: em[e] for e in k.edges}
    for v, t in rule.rhs.nodes.items():
        if v not in hn:
            w = ctx.fresh(rule.name, nodes)
            nodes[w] = t
            hn[v] = w
    for e, x in rule.rhs.edges.items():
        if e not in he:
            f = ctx.fresh(rule.name + "e", edges)
            edges[f] = (hn[x.src], hn[x.tgt], x.type)
            he[e] = f
    h = Graph(nodes, edges)
    y = rule.y
    iface = Morphism(y.domain, h, {v: hn[w] for v, w in y.node_map.items()},
                     {e: he[f] for e, f in y.edge_map.items()})
    return LocatedGraph(h, iface)


def apply_rule(lg: LocatedGraph, rule: Rule, policy: str = "all", seed: int | None = None,
               spo: bool = False) -> list[tuple[LocatedGraph, PartialMap]]:
    """Direct transformations of ``lg`` by ``rule``.

    ``policy`` is ``"all"`` (every admissible match, canonical order),
    ``"first"`` or ``"random"`` (one match picked with ``seed``).
    """
    matches = find_matches(lg, rule, spo)
    if policy == "first":
        matches = matches[:1]
    elif policy == "random":
        matches = [random.Random(seed).choice(matches)] if matches else []
    elif policy != "all":
        raise ValueError(f"unknown match policy {policy!r}")
    ctx = _Ctx(None, DEFAULT_MAX_STEPS)
    i = rule.interface_map
    return [(_transform(lg, rule, m, spo, ctx), i) for m in matches]


def apply_rule_spo(lg: LocatedGraph, rule: Rule, policy: str = "all",
                   seed: int | None = None) -> list[tuple[LocatedGraph, PartialMap]]:
    """Like :func:`apply_rule`, deleting dangling edges before the rule step."""
    return apply_rule(lg, rule, policy, seed, spo=True)


# -- single derivation --------------------------------------------------------------

def _fix(lg: LocatedGraph, i: PartialMap, x: Graph) -> LocatedGraph:
    if not i.is_total_on(x):
        raise ProgramError("iterated program lost part of its interface; Fix is undefined")
    h = lg.iface
    return LocatedGraph(lg.graph, Morphism(x, lg.graph, {v: h.node_map[w] for v, w in i.nodes.items()},
                                           {e: h.edge_map[f] for e, f in i.edges.items()}))


def _run(p: Program, lg: LocatedGraph, ctx: _Ctx) -> Iterator[tuple[LocatedGraph, PartialMap]]:
    if isinstance(p, RuleStep):
        rule = p.rule
        i = rule.interface_map
        for m in ctx.order(_raw_matches(lg, rule)):
            if _admissible(lg.graph, rule, m, p.spo):
                ctx.tick(p.label or rule.name)
                ctx.stats.rule_applications[rule.name] = ctx.stats.rule_applications.get(rule.name, 0) + 1
                yield _transform(lg, rule, m, p.spo, ctx), i
        return
    if isinstance(p, Skip):
        if lg.iface.domain != p.iface:
            raise InterfaceMismatch("skip: interface mismatch")
        yield lg, PartialMap.identity(p.iface)
        return
    if isinstance(p, Choice):
        for b in ctx.order(list(p.branches)):
            yield from _run(b, lg, ctx)
        return
    if isinstance(p, Seq):
        yield from _run_seq(p.parts, 0, lg, PartialMap.identity(lg.iface.domain), ctx)
        return
    if isinstance(p, Try):
        gen = _run(p.body, lg, ctx)
        first = next(gen, None)
        if first is None:
            yield lg, PartialMap.identity(lg.iface.domain)
            return
        yield first
        yield from gen
        return
    if isinstance(p, Alap):
        x = lg.iface.domain
        cur = lg
        while True:
            nxt = None
            for res, i in _run(p.body, cur, ctx):
                cand = _fix(res, i, x)
                if cand != cur:
                    nxt = cand
                    break
            if nxt is None:
                yield cur, PartialMap.identity(x)
                return
            ctx.stats.alap_iterations += 1
            ctx.tick(p.label or "alap")
            cur = nxt
    raise ProgramError(f"unknown program node {type(p).__name__}")


def _run_seq(parts, k, lg, acc, ctx):
    if k == len(parts):
        yield lg, acc
        return
    for lg2, i in _run(parts[k], lg, ctx):
        yield from _run_seq(parts, k + 1, lg2, acc.then(i), ctx)


def execute(prog: Program, lg: LocatedGraph | Graph, seed: int = 0,
            max_steps: int = DEFAULT_MAX_STEPS, stats: ExecStats | None = None) -> LocatedGraph:
    """Run one derivation of ``prog``; choices are drawn from ``random.Random(seed)``.

    Raises :class:`ProgramError` if the program has no derivation from ``lg``.
    """
    if isinstance(lg, Graph):
        lg = LocatedGraph.of(lg)
    if prog.input != lg.iface.domain:
        raise InterfaceMismatch("program interface differs from the marking of the input")
    ctx = _Ctx(random.Random(seed), max_steps, stats)
    for res, _ in _run(prog, lg, ctx):
        return res
    raise ProgramError("program has no derivation from this graph")


# -- exhaustive exploration -----------------------------------------------------------

@dataclass
class Exploration:
    results: list[LocatedGraph]
    incomplete: bool = False
    stats: ExecStats = field(default_factory=ExecStats)


class _Bound(Exception):
    pass


class _IsoSet:
    """Located graphs (with a partial map) deduplicated up to marking-respecting isomorphism."""

    def __init__(self):
        self.buckets: dict[tuple, list[tuple[LocatedGraph, PartialMap]]] = {}
        self.items: list[tuple[LocatedGraph, PartialMap]] = []

    def add(self, lg: LocatedGraph, i: PartialMap) -> bool:
        key = (invariant(lg.graph), lg.iface.domain, i.key())
        bucket = self.buckets.setdefault(key, [])
        for other, _ in bucket:
            if same_up_to_iso(lg, other):
                return False
        bucket.append((lg, i))
        self.items.append((lg, i))
        return True

    def __len__(self) -> int:
        return len(self.items)


def same_up_to_iso(a: LocatedGraph, b: LocatedGraph) -> bool:
    """Isomorphic graphs via an isomorphism commuting with the markings."""
    if a.iface.domain != b.iface.domain:
        return False
    bn = {a.iface.node_map[v]: w for v, w in b.iface.node_map.items()}
    be = {a.iface.edge_map[e]: f for e, f in b.iface.edge_map.items()}
    return find_isomorphism(a.graph, b.graph, bn, be) is not None


def _all(p: Program, lg: LocatedGraph, ctx: _Ctx, max_states: int) -> list[tuple[LocatedGraph, PartialMap]]:
    if isinstance(p, RuleStep):
        out = _IsoSet()
        i = p.rule.interface_map
        for m in _raw_matches(lg, p.rule):
            if _admissible(lg.graph, p.rule, m, p.spo):
                ctx.tick(p.label or p.rule.name)
                out.add(_transform(lg, p.rule, m, p.spo, ctx), i)
        return out.items
    if isinstance(p, Skip):
        if lg.iface.domain != p.iface:
            raise InterfaceMismatch("skip: interface mismatch")
        return [(lg, PartialMap.identity(p.iface))]
    if isinstance(p, Choice):
        out = _IsoSet()
        for b in p.branches:
            for r, i in _all(b, lg, ctx, max_states):
                out.add(r, i)
        return out.items
    if isinstance(p, Seq):
        states = [(lg, PartialMap.identity(lg.iface.domain))]
        for part in p.parts:
            nxt = _IsoSet()
            for s, acc in states:
                for r, i in _all(part, s, ctx, max_states):
                    nxt.add(r, acc.then(i))
                    if len(nxt) > max_states:
                        raise _Bound()
            states = nxt.items
        return states
    if isinstance(p, Try):
        res = _all(p.body, lg, ctx, max_states)
        return res if res else [(lg, PartialMap.identity(lg.iface.domain))]
    if isinstance(p, Alap):
        x = lg.iface.domain
        ident = PartialMap.identity(x)
        seen = _IsoSet()
        seen.add(lg, ident)
        finals = _IsoSet()
        todo = deque([lg])
        while todo:
            cur = todo.popleft()
            moved = False
            for r, i in _all(p.body, cur, ctx, max_states):
                cand = _fix(r, i, x)
                if cand == cur:
                    continue
                moved = True
                ctx.stats.alap_iterations += 1
                if seen.add(cand, ident):
                    todo.append(cand)
                    if len(seen) > max_states:
                        raise _Bound()
            if not moved:
                finals.add(cur, ident)
        return finals.items
    raise ProgramError(f"unknown program node {type(p).__name__}")


def execute_all(prog: Program, lg: LocatedGraph | Graph, max_results: int = 1000,
                max_steps: int = 100_000) -> Exploration:
    """All derivation results up to isomorphism, explored breadth first.

    When a bound is hit the returned exploration is flagged incomplete.
    """
    if isinstance(lg, Graph):
        lg = LocatedGraph.of(lg)
    if prog.input != lg.iface.domain:
        raise InterfaceMismatch("program interface differs from the marking of the input")
    ctx = _Ctx(None, max_steps)
    try:
        items = _all(prog, lg, ctx, max_results)
    except (StepBudgetExceeded, _Bound):
        return Exploration([], True, ctx.stats)
    results = [r for r, _ in items]
    if len(results) > max_results:
        return Exploration(results[:max_results], True, ctx.stats)
    return Exploration(results, False, ctx.stats)


def rule_condition_conjunction(rule: Rule, extra: Condition) -> Rule:
    """``rule`` with ``extra`` conjoined to its application condition."""
    if isinstance(extra, TrueC):
        return rule
    if isinstance(rule.ac, TrueC):
        return rule.with_ac(extra)
    return rule.with_ac(conj(rule.lhs, (rule.ac, extra)))
