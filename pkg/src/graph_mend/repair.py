"""Synthesis of repair programs from conditions.

Entry point is :func:`synthesize_legit`; the other functions expose the
individual constructions (repairing sets, proper conditions, preservation
wrappers, conjunctions and disjunctions).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Mapping, Sequence

from .conditions import (And, Condition, ConditionClass, Exists, Not, Or, PlainRule, TrueC,
                         as_exists_basic, as_forall, as_not_exists, classify, conj, cpres,
                         is_proper, not_exists, satisfies_constraint, shift, simplify)
from .corpus import enumerate_graphs
from .graph import Graph, GraphError, Morphism, TypeGraph, match_maps, subgraphs_between
from .programs import (Alap, Choice, Program, ProgramError, Rule, RuleStep, Seq, Skip, Try,
                       LocatedGraph, execute_all, find_matches, iter_steps, make_guard,
                       make_select, make_unselect, map_steps, rule_set, _transform, _Ctx)


class NotProper(ValueError):
    pass


class NotLegit(ValueError):
    def __init__(self, condition: Condition, reason: str = ""):
        super().__init__(f"condition is not legit: {condition!r}" + (f" ({reason})" if reason else ""))
        self.condition = condition


class NoEstablishedSequentialization(ValueError):
    pass


class BudgetFault(RuntimeError):
    pass


@dataclass(frozen=True)
class RepairPlan:
    condition: Condition
    program: Program
    classification: ConditionClass
    provenance: tuple[str, ...] = ()
    guarantees: frozenset[str] = frozenset()

    def rules(self) -> list[Rule]:
        return [s.rule for s in iter_steps(self.program)]


@dataclass(frozen=True)
class Sequentialization:
    items: tuple[tuple[Condition, RepairPlan], ...]
    kind: str
    split: int = 0          # number of leading items forming the first group (cases 2 and 3)

    KINDS = ("negative", "positive", "preserving-declared", "preserving-checked",
             "mixed-case-2", "mixed-case-3")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ValueError(f"unknown sequentialization kind {self.kind!r}")


@dataclass
class SynthesisOptions:
    """Knobs for synthesis.

    ``tg`` enables bounded preservation checks while searching an order for
    a conjunction.  ``registry`` maps subconditions to ready-made plans.
    ``declared_order`` lists conjunct indices in the order to try first;
    with ``declared_preserving`` that order is trusted without checking.
    """

    tg: TypeGraph | None = None
    bound_nodes: int = 2
    bound_edges: int = 2
    registry: Mapping[Condition, RepairPlan] = field(default_factory=dict)
    declared_order: Sequence[int] | None = None
    declared_preserving: bool = False


class _Names:
    def __init__(self):
        self.counts: dict[str, int] = {}

    def __call__(self, prefix: str) -> str:
        n = self.counts.get(prefix, 0) + 1
        self.counts[prefix] = n
        return f"{prefix}{n}"


# -- repairing sets -------------------------------------------------------------

def _check_real(a: Graph, c: Graph) -> None:
    if not a.is_subgraph_of(c):
        raise GraphError("repairing set: anchor is not a subgraph of the target")
    if a == c:
        raise GraphError("repairing set: the inclusion must be real")


def _dedup_between(a: Graph, c: Graph, bs: list[Graph]) -> list[Graph]:
    """Drop graphs ``B`` that an automorphism of ``c`` fixing ``a`` maps onto an earlier one."""
    autos = list(match_maps(c, c, {v: v for v in a.nodes}, {e: e for e in a.edges}))
    kept: list[Graph] = []
    for b in bs:
        dup = False
        for nm, em in autos:
            img = (frozenset(nm[v] for v in b.nodes), frozenset(em[e] for e in b.edges))
            if any(img == (frozenset(k.nodes), frozenset(k.edges)) for k in kept):
                dup = True
                break
        if not dup:
            kept.append(b)
    return kept


def _strict_supergraphs(b: Graph, c: Graph) -> list[Graph]:
    return [x for x in subgraphs_between(b, c) if x != b] + [c]


def repairing_set_exists(a: Graph, c: Graph, names: Callable[[str], str] | None = None) -> list[Rule]:
    """``R_a``: one increasing rule ``B => C`` per intermediate graph ``a ⊆ B ⊂ c``."""
    _check_real(a, c)
    names = names or _Names()
    neg = not_exists(a, c)
    rules = []
    for b in _dedup_between(a, c, subgraphs_between(a, c)):
        parts = [shift(Morphism.inclusion(a, b), neg)]
        parts += [not_exists(b, b2) for b2 in _strict_supergraphs(b, c)]
        ac = simplify(And(b, tuple(parts)))
        rules.append(Rule.make(names("R"), PlainRule(b, b, c), x=Morphism.inclusion(a, b),
                               y=Morphism.inclusion(a, c), ac=ac))
    return rules


def _star(a: Graph, b: Graph, c: Graph) -> bool:
    if len(c.edges) > len(a.edges):
        return len(c.nodes) == len(b.nodes) and len(c.edges) == len(b.edges) + 1
    return len(c.nodes) == len(b.nodes) + 1


def repairing_set_absence(a: Graph, c: Graph, names: Callable[[str], str] | None = None,
                          identity_interface: bool = False) -> list[Rule]:
    """``S_a``: decreasing rules ``C => B`` removing one edge (or one node if ``c`` adds no edge).

    With ``identity_interface`` the left interface is ``id_C`` instead of
    ``a`` (the rules then act on an already marked occurrence).
    """
    _check_real(a, c)
    names = names or _Names()
    rules = []
    for b in _dedup_between(a, c, [b for b in subgraphs_between(a, c) if _star(a, b, c)]):
        x = Morphism.identity(c) if identity_interface else Morphism.inclusion(a, c)
        rules.append(Rule.make(names("S"), PlainRule(c, b, b), x=x, y=Morphism.inclusion(a, b)))
    return rules


# -- program properties -----------------------------------------------------------

def _monotonicity(p: Program) -> set[str]:
    inc = dec = True
    for s in iter_steps(p):
        if s.rule.is_identity:
            continue
        inc = inc and s.rule.plain.is_increasing
        dec = dec and s.rule.plain.is_decreasing
    out = set()
    if inc:
        out.add("increasing")
    if dec:
        out.add("decreasing")
    return out


def _plan(d: Condition, prog: Program, prov: Iterable[str], cls: ConditionClass | None = None) -> RepairPlan:
    return RepairPlan(d, prog, cls if cls is not None else classify(d), tuple(prov),
                      frozenset({"stable", "terminating"} | _monotonicity(prog)))


# -- proper and legit conditions -------------------------------------------------------

def _quantified(d: Condition) -> tuple[str, Graph, Condition] | None:
    if isinstance(d, Exists):
        return "E", d.target, d.sub
    fa = as_forall(d)
    if fa is not None:
        return "A", fa[0], fa[1]
    if isinstance(d, Not) and isinstance(d.sub, Exists):
        # ¬∃(a, c) read as ∀(a, ¬c)
        return "A", d.sub.target, Not(d.sub.target, d.sub.sub)
    return None


class _Synth:
    def __init__(self, opts: SynthesisOptions):
        self.opts = opts
        self.names = _Names()

    def plan(self, d: Condition) -> RepairPlan:
        if d in self.opts.registry:
            return self.opts.registry[d]
        prog, prov = self.program(d)
        return _plan(d, prog, prov, classify(d, self._repairable))

    def _repairable(self, c: Condition) -> bool:
        if c in self.opts.registry:
            return True
        try:
            self.program(c)
            return True
        except (NotLegit, NoEstablishedSequentialization):
            return False

    def program(self, d: Condition) -> tuple[Program, list[str]]:
        if d in self.opts.registry:
            p = self.opts.registry[d]
            return p.program, [f"registry: {d!r}"] + list(p.provenance)
        a = d.anchor
        if isinstance(d, TrueC):
            return Skip(a, "case1:true"), ["case 1: true -> Skip"]
        t = as_exists_basic(d)
        if t is not None:
            rules = repairing_set_exists(a, t, self.names)
            prov = [f"case 2: exists -> try R_a over B = {[_items(r.lhs, a) for r in rules]}"]
            return Try(rule_set(rules, label="R_a"), "case2:exists"), prov
        t = as_not_exists(d)
        if t is not None:
            rules = repairing_set_absence(a, t, self.names)
            prov = [f"case 3: not exists -> S_a' alap, deleting {[_items(r.lhs, r.rhs) for r in rules]}"]
            return Alap(rule_set(rules, spo=True, label="S_a'"), "case3:not-exists"), prov
        if isinstance(d, And):
            plan = self.conjunction(list(d.subs), d)
            return plan.program, list(plan.provenance)
        if isinstance(d, Or):
            plan = self.disjunction(d)
            return plan.program, list(plan.provenance)
        q = _quantified(d)
        if q is None:
            raise NotLegit(d, "no construction applies")
        kind, c_graph, c = q
        sel = Morphism.inclusion(a, c_graph)
        sub_prog, sub_prov = self.program(c)
        tag = "proper" if is_proper(d) else "generalized proper"
        if kind == "E":
            basic_rules = repairing_set_exists(a, c_graph, self.names)
            p_exists = Try(rule_set(basic_rules, label="R_a"), "case2:exists")
            body = Seq((RuleStep(make_guard(a, Not(a, d), self.names("guard")), label="guard"),
                        p_exists,
                        RuleStep(make_select(sel, None, self.names("select")), label="select"),
                        sub_prog,
                        RuleStep(make_unselect(sel, self.names("unselect")), label="unselect")),
                       "case4:exists-nested")
            return Try(body, "case4:exists-nested"), [f"case 4 ({tag}): exists(a, c)"] + sub_prov
        body = Seq((RuleStep(make_select(sel, Not(c_graph, c), self.names("select")), label="select"),
                    sub_prog,
                    RuleStep(make_unselect(sel, self.names("unselect")), label="unselect")),
                   "case5:forall")
        return Alap(body, "case5:forall"), [f"case 5 ({tag}): forall(a, c)"] + sub_prov

    def conjunction(self, ds: list[Condition], whole: Condition) -> RepairPlan:
        plans = [self.plan(x) for x in ds]
        seq = find_sequentialization(ds, plans, self.opts)
        return compose_conjunction(seq, self.opts, names=self.names, condition=whole)

    def disjunction(self, d: Or) -> RepairPlan:
        ds, plans = [], []
        for x in d.subs:
            try:
                plans.append(self.plan(x))
                ds.append(x)
            except (NotLegit, NoEstablishedSequentialization):
                continue
        if not plans:
            raise NotLegit(d, "no disjunct is legit")
        return synthesize_disjunction(ds, plans, condition=d, names=self.names)


def _items(g: Graph, base: Graph) -> str:
    ns = [v for v in g.nodes if v not in base.nodes]
    es = [e for e in g.edges if e not in base.edges]
    return "+".join(ns + es) or "-"


def synthesize_proper(d: Condition, opts: SynthesisOptions | None = None) -> RepairPlan:
    """Repair program for a proper condition (or generalized proper, with registered sub-plans)."""
    opts = opts or SynthesisOptions()
    s = _Synth(opts)
    if not is_proper(d):
        q = _quantified(d)
        if q is None or not s._repairable(q[2]):
            raise NotProper(f"condition is not proper: {d!r}")
    return s.plan(d)


def synthesize_legit(d: Condition, opts: SynthesisOptions | None = None) -> RepairPlan:
    """Repair program for any legit condition, following its structure."""
    return _Synth(opts or SynthesisOptions()).plan(d)


def synthesize_disjunction(ds: Sequence[Condition], plans: Sequence[RepairPlan],
                           condition: Condition | None = None,
                           names: Callable[[str], str] | None = None) -> RepairPlan:
    """One plan per repairable disjunct, combined by choice.

    The result only runs when the whole disjunction is violated, so inputs
    satisfying some other disjunct stay untouched.
    """
    if not plans:
        raise ValueError("at least one plan is needed")
    names = names or _Names()
    d = condition if condition is not None else (Or(plans[0].condition.anchor, tuple(ds)) if len(ds) > 1 else ds[0])
    if len(plans) == 1:
        body, prov = plans[0].program, ("disjunction: single plan",) + plans[0].provenance
    else:
        body = Choice(tuple(p.program for p in plans), "disjunction")
        prov = ("disjunction: choice over all plans",) + tuple(x for p in plans for x in p.provenance)
    if isinstance(d, Or) and len(d.subs) > 1:
        a = d.anchor
        guard = RuleStep(make_guard(a, Not(a, d), names("guard")), label="guard")
        body = Try(Seq((guard, body), "disjunction"), "disjunction")
    g = frozenset.intersection(*(p.guarantees for p in plans)) | {"stable"}
    return RepairPlan(d, body, classify(d, lambda _: True), prov, g)


# -- preservation ---------------------------------------------------------------------

def _conjuncts(d: Condition) -> list[Condition]:
    if isinstance(d, And):
        out = []
        for s in d.subs:
            out.extend(_conjuncts(s))
        return out
    return [d]


def _types_of(g: Graph) -> tuple[set[str], set[str]]:
    return set(g.nodes.values()), {x.type for x in g.edges.values()}


def preservation_condition(rule: Rule, d: Condition, spo: bool = False) -> Condition:
    """Application condition making ``rule`` preserve the constraint ``d``.

    Conjunctions are handled conjunct by conjunct; combinations where the
    rule provably cannot break a conjunct contribute ``true``.
    """
    p = rule.plain
    parts: list[Condition] = []
    for di in _conjuncts(d):
        if isinstance(di, TrueC) or p.is_identity:
            continue
        neg = as_not_exists(di)
        pos = as_exists_basic(di)
        if neg is not None and (p.is_decreasing or (spo and not p.created[0] and not p.created[1])):
            continue
        if pos is not None and p.is_increasing:
            continue
        if neg is not None and p.is_increasing:
            cn, ce = p.created
            nt, et = _types_of(neg)
            if not ({p.rhs.nodes[v] for v in cn} & nt) and not ({p.rhs.edges[e].type for e in ce} & et):
                continue
        if spo:
            raise ProgramError("preservation conditions for dangling-edge deleting steps "
                               "are only available for negative constraints")
        parts.append(simplify(cpres(p, di)))
    parts = [x for x in parts if not isinstance(x, TrueC)]
    if not parts:
        return TrueC(p.lhs)
    return conj(p.lhs, parts)


def _wrapper_note(d: Condition) -> str:
    n = len(_conjuncts(d))
    return f"preserving wrapper for {d!r}" if n == 1 else f"preserving wrapper for {n} conjuncts"


def make_preserving(plan: RepairPlan, d: Condition) -> RepairPlan:
    """``P^d``: every rule gains ``cpres(rule, d)`` as an extra application condition."""
    if not d.anchor.is_empty():
        raise ValueError("preservation is defined for constraints")

    def wrap(step: RuleStep) -> Program:
        extra = preservation_condition(step.rule, d, step.spo)
        if isinstance(extra, TrueC):
            return step
        ac = extra if isinstance(step.rule.ac, TrueC) else simplify(And(step.rule.lhs, (step.rule.ac, extra)))
        return RuleStep(step.rule.with_ac(ac), step.spo, step.label)

    prog = map_steps(plan.program, wrap)
    return RepairPlan(plan.condition, prog, plan.classification,
                      plan.provenance + (_wrapper_note(d),), plan.guarantees)


def make_preserving_universal(plan: RepairPlan, e1: Condition,
                              names: Callable[[str], str] | None = None) -> RepairPlan:
    """``P'^{e1} = ⟨P^{e1}; ⟨select(a, ¬c); S_a^id⟩↓⟩``."""
    fa = as_forall(plan.condition)
    if fa is None or not plan.classification.universal:
        raise ValueError("the destructive fallback needs a plan for a universal condition")
    if not all(as_not_exists(x) is not None or isinstance(x, TrueC) for x in _conjuncts(e1)):
        raise ValueError("e1 must be a conjunction of negative conditions")
    names = names or _Names()
    a, (c_graph, c) = plan.condition.anchor, fa
    sel = Morphism.inclusion(a, c_graph)
    fallback = Alap(Seq((RuleStep(make_select(sel, Not(c_graph, c), names("select")), label="select"),
                         rule_set(repairing_set_absence(a, c_graph, names, identity_interface=True),
                                  spo=True, label="S_a^id'")),
                        "fallback"), "fallback")
    wrapped = make_preserving(plan, e1)
    prog = Seq((wrapped.program, fallback), "preserving-universal")
    g = set(plan.guarantees) - {"increasing", "decreasing"}
    return RepairPlan(plan.condition, prog, plan.classification,
                      wrapped.provenance + ("destructive fallback for unrepaired occurrences",),
                      frozenset(g | _monotonicity(prog)))


# -- bounded preservation check ------------------------------------------------------

@dataclass(frozen=True)
class PreservationResult:
    preserved: bool
    checked_graphs: int
    rule: str | None = None
    before: Graph | None = None
    after: Graph | None = None

    def __bool__(self) -> bool:
        return self.preserved


def check_preserving_bounded(prog: Program | RepairPlan, d: Condition, tg: TypeGraph,
                             max_nodes: int = 2, max_edges: int = 2, mode: str = "rules",
                             graphs: Iterable[Graph] | None = None,
                             max_graphs: int = 50_000) -> PreservationResult:
    """Search a small counterexample to ``d``-preservation.

    ``mode="rules"`` applies every rule of the program at every match to
    every graph up to the bounds that satisfies ``d``; ``mode="program"``
    runs the whole program instead.  Graphs are visited smallest first.
    """
    if isinstance(prog, RepairPlan):
        prog = prog.program
    if graphs is None:
        graphs = enumerate_graphs(tg, max_nodes, max_edges)
    steps = [s for s in iter_steps(prog) if not s.rule.is_identity]
    seen = 0
    for g in graphs:
        seen += 1
        if seen > max_graphs:
            raise BudgetFault(f"more than {max_graphs} graphs within the bound")
        if not satisfies_constraint(g, d):
            continue
        if mode == "program":
            for h in execute_all(prog, g).results:
                if not satisfies_constraint(h.graph, d):
                    return PreservationResult(False, seen, "program", g, h.graph)
            continue
        lg = LocatedGraph.of(g)
        for s in steps:
            ctx = _Ctx(None, 10**9)
            for m in _free_matches(g, s.rule, s.spo):
                h = _transform(lg, s.rule, m, s.spo, ctx).graph
                if not satisfies_constraint(h, d):
                    return PreservationResult(False, seen, s.rule.name, g, h)
    return PreservationResult(True, seen)


def _free_matches(g: Graph, rule: Rule, spo: bool):
    # rule-level check ignores the marking: any match of the left-hand side counts
    free = Rule.make(rule.name, rule.plain, ac=rule.ac, y=Morphism.empty(rule.rhs))
    return find_matches(LocatedGraph.of(g), free, spo)


# -- conjunctions -------------------------------------------------------------------------

def _rules_preserve(plan: RepairPlan, before: Sequence[Condition], opts: SynthesisOptions) -> bool:
    if not before:
        return True
    if opts.tg is None:
        return False
    d = conj(Graph.EMPTY, list(before))
    return check_preserving_bounded(plan, d, opts.tg, opts.bound_nodes, opts.bound_edges).preserved


def _orders(n: int, opts: SynthesisOptions) -> list[tuple[int, ...]]:
    first = [tuple(opts.declared_order)] if opts.declared_order is not None else [tuple(range(n))]
    return first + [p for p in permutations(range(n)) if p not in first]


def _preserving_order(idx: list[int], ds, plans, opts) -> tuple[list[int], str] | None:
    """An order of ``idx`` whose plans preserve all preceding conditions."""
    if len(idx) <= 1:
        return idx, "trivial"
    if opts.declared_preserving:
        order = [i for i in (opts.declared_order or idx) if i in idx]
        return order + [i for i in idx if i not in order], "declared"
    if opts.tg is None:
        return None
    orders = [[idx[k] for k in p] for p in permutations(range(len(idx)))]
    if opts.declared_order is not None:
        dec = [i for i in opts.declared_order if i in idx]
        orders.sort(key=lambda o: o != dec)
    for o in orders:
        if all(_rules_preserve(plans[o[k]], [ds[i] for i in o[:k]], opts) for k in range(1, len(o))):
            return o, "checked"
    return None


def find_sequentialization(ds: Sequence[Condition], plans: Sequence[RepairPlan],
                           opts: SynthesisOptions | None = None) -> Sequentialization:
    """Pick an order for a conjunction and record which composition case makes it sound."""
    opts = opts or SynthesisOptions()
    n = len(ds)
    cls = [classify(x, lambda _: False, lambda _: False) for x in ds]
    all_idx = list(range(n))

    def build(order, kind, split=0):
        return Sequentialization(tuple((ds[i], plans[i]) for i in order), kind, split)

    if n == 1:
        return build([0], "preserving-declared" if not (cls[0].negative or cls[0].positive)
                     else ("negative" if cls[0].negative else "positive"))
    if all(c.negative for c in cls):
        return build(opts.declared_order or all_idx, "negative")
    if all(c.positive for c in cls):
        return build(opts.declared_order or all_idx, "positive")
    neg = [i for i in all_idx if cls[i].negative]
    pos = [i for i in all_idx if cls[i].positive]
    uni = [i for i in all_idx if cls[i].universal]
    exi = [i for i in all_idx if cls[i].existential and not cls[i].positive]
    if neg and len(neg) + len(uni) == n:
        found = _preserving_order(uni, ds, plans, opts)
        if found is not None:
            return build(neg + found[0], "mixed-case-3", len(neg))
    if pos and len(pos) + len(uni) + len(exi) == n:
        found = _preserving_order(uni + exi, ds, plans, opts)
        if found is not None:
            return build(pos + found[0], "mixed-case-2", len(pos))
    if opts.declared_preserving and opts.declared_order is not None:
        return build(list(opts.declared_order), "preserving-declared")
    if opts.tg is not None:
        for order in _orders(n, opts):
            if all(_rules_preserve(plans[order[k]], [ds[i] for i in order[:k]], opts) for k in range(1, n)):
                return build(list(order), "preserving-checked")
    raise NoEstablishedSequentialization(
        "no order of the conjuncts could be shown to preserve the preceding ones")


def compose_conjunction(seq: Sequentialization, opts: SynthesisOptions | None = None,
                        names: Callable[[str], str] | None = None,
                        condition: Condition | None = None) -> RepairPlan:
    """Sequential composition following the case recorded in ``seq``."""
    names = names or _Names()
    conds = [c for c, _ in seq.items]
    plans = [p for _, p in seq.items]
    d = condition if condition is not None else conj(conds[0].anchor, conds)
    if len(plans) == 1:
        p = plans[0]
        return RepairPlan(d, p.program, p.classification, p.provenance, p.guarantees)
    prov = [f"conjunction ({seq.kind})"]
    if seq.kind == "mixed-case-3":
        k = seq.split
        e1 = conj(Graph.EMPTY, conds[:k])
        parts = [p.program for p in plans[:k]]
        for p in plans[:k]:
            prov.extend(p.provenance)
        for p in plans[k:]:
            wrapped = make_preserving_universal(p, e1, names)
            parts.append(wrapped.program)
            prov.extend(wrapped.provenance)
        prog = Seq(tuple(parts), "conjunction:case3")
        guarantees = frozenset({"stable", "terminating"} | _monotonicity(prog))
    else:
        prog = Seq(tuple(p.program for p in plans), f"conjunction:{seq.kind}")
        for p in plans:
            prov.extend(p.provenance)
        guarantees = frozenset.intersection(*(p.guarantees for p in plans)) | _monotonicity(prog)
    return RepairPlan(d, prog, classify(d, lambda _: True, lambda _: True), tuple(prov), guarantees)
