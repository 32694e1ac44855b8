"""Nested graph conditions.

A condition is anchored at a graph ``A``.  ``Exists(anchor=A, target=C, sub)``
quantifies over extensions of the current morphism along the literal
inclusion ``A ⊂ C``; ``sub`` is anchored at ``C``.  ``Or`` is kept as its
own node for readability; ``forall``/``not_exists``/``implies`` build the
derived forms out of the primitives.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Mapping, Sequence

from .graph import Graph, GraphError, Morphism, fresh_id, match_maps


class ConditionError(ValueError):
    pass


class Condition:
    anchor: Graph

    def __and__(self, other: Condition) -> Condition:
        return And(self.anchor, (self, other))

    def __or__(self, other: Condition) -> Condition:
        return Or(self.anchor, (self, other))

    def __invert__(self) -> Condition:
        return Not(self.anchor, self)


@dataclass(frozen=True)
class TrueC(Condition):
    anchor: Graph = Graph.EMPTY

    def __repr__(self) -> str:
        return "true"


@dataclass(frozen=True)
class Exists(Condition):
    anchor: Graph
    target: Graph
    sub: Condition = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.sub is None:
            object.__setattr__(self, "sub", TrueC(self.target))
        if not self.anchor.is_subgraph_of(self.target):
            raise ConditionError("exists: anchor is not a subgraph of the target")
        if self.anchor == self.target:
            raise ConditionError("exists: inclusion must be real (anchor ⊂ target)")
        if self.sub.anchor != self.target:
            raise ConditionError("exists: subcondition must be anchored at the target")

    @property
    def inclusion(self) -> Morphism:
        return Morphism.inclusion(self.anchor, self.target)

    def __repr__(self) -> str:
        body = "" if isinstance(self.sub, TrueC) else f", {self.sub!r}"
        return f"∃({_delta(self.anchor, self.target)}{body})"


@dataclass(frozen=True)
class Not(Condition):
    anchor: Graph
    sub: Condition

    def __post_init__(self):
        if self.sub.anchor != self.anchor:
            raise ConditionError("not: anchor mismatch")

    def __repr__(self) -> str:
        return f"¬{self.sub!r}"


@dataclass(frozen=True)
class And(Condition):
    anchor: Graph
    subs: tuple[Condition, ...]

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))
        if any(s.anchor != self.anchor for s in self.subs):
            raise ConditionError("and: children must share the anchor")

    def __repr__(self) -> str:
        return "(" + " ∧ ".join(map(repr, self.subs)) + ")" if self.subs else "true"


@dataclass(frozen=True)
class Or(Condition):
    anchor: Graph
    subs: tuple[Condition, ...]

    def __post_init__(self):
        object.__setattr__(self, "subs", tuple(self.subs))
        if any(s.anchor != self.anchor for s in self.subs):
            raise ConditionError("or: children must share the anchor")

    def __repr__(self) -> str:
        return "(" + " ∨ ".join(map(repr, self.subs)) + ")" if self.subs else "false"


def _delta(a: Graph, c: Graph) -> str:
    ns = [f"{v}:{t}" for v, t in c.nodes.items() if v not in a.nodes]
    es = [f"{x.src}-{x.type}->{x.tgt}" for e, x in c.edges.items() if e not in a.edges]
    return "+".join(ns + es) or "·"


# -- derived forms ----------------------------------------------------------

def true(anchor: Graph = Graph.EMPTY) -> Condition:
    return TrueC(anchor)


def false(anchor: Graph = Graph.EMPTY) -> Condition:
    return Not(anchor, TrueC(anchor))


def exists(anchor: Graph, target: Graph, sub: Condition | None = None) -> Condition:
    return Exists(anchor, target, sub)


def not_exists(anchor: Graph, target: Graph, sub: Condition | None = None) -> Condition:
    return Not(anchor, Exists(anchor, target, sub))


def forall(anchor: Graph, target: Graph, sub: Condition | None = None) -> Condition:
    """∀(a, c) := ¬∃(a, ¬c)."""
    sub = sub if sub is not None else TrueC(target)
    return Not(anchor, Exists(anchor, target, Not(target, sub)))


def implies(lhs: Condition, rhs: Condition) -> Condition:
    return Or(lhs.anchor, (Not(lhs.anchor, lhs), rhs))


def conj(anchor: Graph, subs: Sequence[Condition]) -> Condition:
    subs = tuple(subs)
    return subs[0] if len(subs) == 1 else And(anchor, subs)


def disj(anchor: Graph, subs: Sequence[Condition]) -> Condition:
    subs = tuple(subs)
    return subs[0] if len(subs) == 1 else Or(anchor, subs)


def as_forall(c: Condition) -> tuple[Graph, Condition] | None:
    """``(target, sub)`` if ``c`` has the shape ∀(a, sub)."""
    if isinstance(c, Not) and isinstance(c.sub, Exists) and isinstance(c.sub.sub, Not):
        return c.sub.target, c.sub.sub.sub
    return None


def as_not_exists(c: Condition) -> Graph | None:
    """Target graph if ``c`` is the basic ∄a."""
    if isinstance(c, Not) and isinstance(c.sub, Exists) and isinstance(c.sub.sub, TrueC):
        return c.sub.target
    return None


def as_exists_basic(c: Condition) -> Graph | None:
    if isinstance(c, Exists) and isinstance(c.sub, TrueC):
        return c.target
    return None


def is_false(c: Condition) -> bool:
    return isinstance(c, Not) and isinstance(c.sub, TrueC) or (isinstance(c, Or) and not c.subs)


# -- satisfaction -----------------------------------------------------------

def satisfies(p: Morphism, c: Condition) -> bool:
    """Does the morphism ``p: A -> G`` satisfy the condition ``c`` over ``A``?"""
    if p.domain != c.anchor:
        raise ConditionError("anchor mismatch: condition is not over the domain of p")
    return _sat(p.codomain, dict(p.node_map), dict(p.edge_map), c)


def satisfies_maps(g: Graph, nmap: Mapping[str, str], emap: Mapping[str, str], c: Condition) -> bool:
    """Like :func:`satisfies` with ``p`` given as raw id maps (no domain check)."""
    return _sat(g, nmap, emap, c)


def _sat(g: Graph, nmap, emap, c: Condition) -> bool:
    if isinstance(c, TrueC):
        return True
    if isinstance(c, Exists):
        for nm, em in match_maps(c.target, g, nmap, emap):
            if _sat(g, nm, em, c.sub):
                return True
        return False
    if isinstance(c, Not):
        return not _sat(g, nmap, emap, c.sub)
    if isinstance(c, And):
        return all(_sat(g, nmap, emap, s) for s in c.subs)
    if isinstance(c, Or):
        return any(_sat(g, nmap, emap, s) for s in c.subs)
    raise ConditionError(f"unknown condition node {type(c).__name__}")


def satisfies_constraint(g: Graph, c: Condition) -> bool:
    if not c.anchor.is_empty():
        raise ConditionError("a constraint must be anchored at the empty graph")
    return _sat(g, {}, {}, c)


# -- structural helpers -----------------------------------------------------

def graphs(c: Condition) -> Iterator[Graph]:
    """Every graph occurring in ``c`` (anchors and targets)."""
    yield c.anchor
    if isinstance(c, Exists):
        yield c.target
        yield from graphs(c.sub)
    elif isinstance(c, Not):
        yield from graphs(c.sub)
    elif isinstance(c, (And, Or)):
        for s in c.subs:
            yield from graphs(s)


def size(c: Condition) -> int:
    if isinstance(c, Exists):
        return 1 + size(c.sub)
    if isinstance(c, Not):
        return 1 + size(c.sub)
    if isinstance(c, (And, Or)):
        return 1 + sum(size(s) for s in c.subs)
    return 1


def relabel(c: Condition, new_anchor: Graph, nodes: Mapping[str, str], edges: Mapping[str, str]) -> Condition:
    """Transport ``c`` along the isomorphism ``c.anchor -> new_anchor`` given by the maps.

    Items introduced by nested quantifiers keep their id unless it clashes
    with an id already in use at that level.
    """
    if isinstance(c, TrueC):
        return TrueC(new_anchor)
    if isinstance(c, Not):
        return Not(new_anchor, relabel(c.sub, new_anchor, nodes, edges))
    if isinstance(c, And):
        return And(new_anchor, tuple(relabel(s, new_anchor, nodes, edges) for s in c.subs))
    if isinstance(c, Or):
        return Or(new_anchor, tuple(relabel(s, new_anchor, nodes, edges) for s in c.subs))
    assert isinstance(c, Exists)
    nm, em = dict(nodes), dict(edges)
    taken_n, taken_e = set(new_anchor.nodes), set(new_anchor.edges)
    for v in c.target.nodes:
        if v not in nm:
            nm[v] = fresh_id(v, taken_n)
            taken_n.add(nm[v])
    for e in c.target.edges:
        if e not in em:
            em[e] = fresh_id(e, taken_e)
            taken_e.add(em[e])
    target = Graph({nm[v]: t for v, t in c.target.nodes.items()},
                   {em[e]: (nm[x.src], nm[x.tgt], x.type) for e, x in c.target.edges.items()})
    target = new_anchor.union(target)
    return Exists(new_anchor, target, relabel(c.sub, target, nm, em))


def transport(c: Condition, m: Morphism) -> Condition:
    """Move ``c`` along an isomorphism ``m: c.anchor -> m.codomain``."""
    return relabel(c, m.codomain, m.node_map, m.edge_map)


# -- Shift ------------------------------------------------------------------

def _gluings(a: Graph, c: Graph, b_nodes: Mapping[str, str], b_edges: Mapping[str, str], r: Graph):
    """Jointly surjective pairs for ``a ⊂ c`` and ``b: a -> r``.

    Yields ``(r_prime, bn, be)``: ``r ⊆ r_prime`` and ``(bn, be)`` is the
    morphism ``c -> r_prime`` extending ``b``.  Every item of ``c`` outside
    ``a`` is either identified with an unused compatible item of ``r`` or
    copied fresh.
    """
    new_nodes = [v for v in c.nodes if v not in a.nodes]
    new_edges = [e for e in c.edges if e not in a.edges]
    used_n = set(b_nodes.values())
    used_e = set(b_edges.values())
    ridx = r.index
    taken_n, taken_e = set(r.nodes), set(r.edges)

    def nodes_step(i, bn):
        if i == len(new_nodes):
            yield from edges_step(0, bn, dict(b_edges), {}, {})
            return
        v = new_nodes[i]
        t = c.nodes[v]
        yield from nodes_step(i + 1, {**bn, v: None})
        for w in ridx.by_type.get(t, ()):
            if w not in used_n and w not in bn.values():
                yield from nodes_step(i + 1, {**bn, v: w})

    def edges_step(j, bn, be, fresh_n, fresh_e):
        if j == 0:
            # name fresh nodes deterministically
            fresh_n = {}
            tn = set(taken_n)
            for v in new_nodes:
                if bn[v] is None:
                    fresh_n[v] = fresh_id(v, tn)
                    tn.add(fresh_n[v])
            bn = {k: (fresh_n[k] if w is None else w) for k, w in bn.items()}
        if j == len(new_edges):
            tn_e = set(taken_e)
            be = dict(be)
            added_e = {}
            for e in new_edges:
                if be[e] is None:
                    be[e] = fresh_id(e, tn_e)
                    tn_e.add(be[e])
                    x = c.edges[e]
                    added_e[be[e]] = (bn[x.src], bn[x.tgt], x.type)
            added_n = {fresh_n[v]: c.nodes[v] for v in fresh_n}
            if added_n or added_e:
                rp = Graph({**r.nodes, **added_n}, {**r.edges, **added_e})
            else:
                rp = r
            yield rp, bn, be
            return
        e = new_edges[j]
        x = c.edges[e]
        s, t = bn[x.src], bn[x.tgt]
        yield from edges_step(j + 1, bn, {**be, e: None}, fresh_n, fresh_e)
        if s in r.nodes and t in r.nodes:
            for f in ridx.par.get((s, t, x.type), ()):
                if f not in used_e and f not in be.values():
                    yield from edges_step(j + 1, bn, {**be, e: f}, fresh_n, fresh_e)

    yield from nodes_step(0, dict(b_nodes))


def shift(b: Morphism, c: Condition) -> Condition:
    """Shift ``c`` (over ``P``) along ``b: P -> R`` to a condition over ``R``.

    For every ``n: R -> H``: ``n ∘ b ⊨ c  iff  n ⊨ shift(b, c)``.
    """
    if b.domain != c.anchor:
        raise ConditionError("shift: condition is not anchored at the domain of b")
    return _shift(b.codomain, b.node_map, b.edge_map, c)


def _shift(r: Graph, bn, be, c: Condition) -> Condition:
    if isinstance(c, TrueC):
        return TrueC(r)
    if isinstance(c, Not):
        return Not(r, _shift(r, bn, be, c.sub))
    if isinstance(c, And):
        return And(r, tuple(_shift(r, bn, be, s) for s in c.subs))
    if isinstance(c, Or):
        return Or(r, tuple(_shift(r, bn, be, s) for s in c.subs))
    assert isinstance(c, Exists)
    out = []
    for rp, bn2, be2 in _gluings(c.anchor, c.target, bn, be, r):
        inner = _shift(rp, bn2, be2, c.sub)
        out.append(inner if rp is r else Exists(r, rp, inner))
    return Or(r, tuple(out))


# -- Left -------------------------------------------------------------------

@dataclass(frozen=True)
class PlainRule:
    """Span ``lhs ⊇ interface ⊆ rhs`` of literal inclusions."""

    lhs: Graph
    interface: Graph
    rhs: Graph

    def __post_init__(self):
        if not self.interface.is_subgraph_of(self.lhs) or not self.interface.is_subgraph_of(self.rhs):
            raise GraphError("rule interface must be a subgraph of both sides")
        # items outside the interface must not share ids across sides
        for v in self.rhs.nodes:
            if v not in self.interface.nodes and v in self.lhs.nodes:
                raise GraphError(f"node id {v!r} used on both sides but not in the interface")
        for e in self.rhs.edges:
            if e not in self.interface.edges and e in self.lhs.edges:
                raise GraphError(f"edge id {e!r} used on both sides but not in the interface")

    @classmethod
    def identity(cls, g: Graph) -> PlainRule:
        return cls(g, g, g)

    def inverse(self) -> PlainRule:
        return PlainRule(self.rhs, self.interface, self.lhs)

    @property
    def is_identity(self) -> bool:
        return self.lhs == self.interface == self.rhs

    @property
    def deleted(self) -> tuple[set[str], set[str]]:
        return (set(self.lhs.nodes) - set(self.interface.nodes),
                set(self.lhs.edges) - set(self.interface.edges))

    @property
    def created(self) -> tuple[set[str], set[str]]:
        return (set(self.rhs.nodes) - set(self.interface.nodes),
                set(self.rhs.edges) - set(self.interface.edges))

    @property
    def is_increasing(self) -> bool:
        dn, de = self.deleted
        cn, ce = self.created
        return not dn and not de and bool(cn or ce)

    @property
    def is_decreasing(self) -> bool:
        dn, de = self.deleted
        cn, ce = self.created
        return not cn and not ce and bool(dn or de)


def left(p: PlainRule, ac: Condition) -> Condition:
    """Move a right application condition over ``p`` to a left one.

    For every direct transformation with match ``g`` and comatch ``h``:
    ``g ⊨ left(p, ac)  iff  h ⊨ ac``.
    """
    if ac.anchor != p.rhs:
        raise ConditionError("left: condition must be anchored at the right-hand side")
    if isinstance(ac, TrueC):
        return TrueC(p.lhs)
    if isinstance(ac, Not):
        return Not(p.lhs, left(p, ac.sub))
    if isinstance(ac, And):
        return And(p.lhs, tuple(left(p, s) for s in ac.subs))
    if isinstance(ac, Or):
        return Or(p.lhs, tuple(left(p, s) for s in ac.subs))
    assert isinstance(ac, Exists)
    ac = _avoid(ac, set(p.lhs.nodes), set(p.lhs.edges))
    rp = ac.target
    r_nodes_only = set(p.rhs.nodes) - set(p.interface.nodes)
    r_edges_only = set(p.rhs.edges) - set(p.interface.edges)
    # inverse rule must satisfy the dangling condition at the inclusion R ⊂ R'
    for e, x in rp.edges.items():
        if e in p.rhs.edges:
            continue
        if x.src in r_nodes_only or x.tgt in r_nodes_only:
            return false(p.lhs)
    kp = rp.without(r_nodes_only, r_edges_only)
    lp = kp.union(p.lhs)
    derived = PlainRule(lp, kp, rp)
    return Exists(p.lhs, lp, left(derived, ac.sub))


def _avoid(ex: Exists, nodes: set[str], edges: set[str]) -> Exists:
    """Rename items that ``ex`` introduces so they avoid the given ids."""
    a, c = ex.anchor, ex.target
    clash = any(v in nodes for v in c.nodes if v not in a.nodes) or \
        any(e in edges for e in c.edges if e not in a.edges)
    if not clash:
        return ex
    nm = {v: v for v in a.nodes}
    em = {e: e for e in a.edges}
    taken_n = set(c.nodes) | nodes
    taken_e = set(c.edges) | edges
    for v in c.nodes:
        if v not in nm:
            nm[v] = v if v not in nodes else fresh_id(v, taken_n)
            taken_n.add(nm[v])
    for e in c.edges:
        if e not in em:
            em[e] = e if e not in edges else fresh_id(e, taken_e)
            taken_e.add(em[e])
    target = Graph({nm[v]: t for v, t in c.nodes.items()},
                   {em[e]: (nm[x.src], nm[x.tgt], x.type) for e, x in c.edges.items()})
    return Exists(a, target, relabel(ex.sub, target, nm, em))


def cpres(p: PlainRule, d: Condition) -> Condition:
    """Application condition over ``p.lhs`` making ``p`` preserve the constraint ``d``."""
    if not d.anchor.is_empty():
        raise ConditionError("cpres expects a constraint")
    before = shift(Morphism.empty(p.lhs), d)
    after = left(p, shift(Morphism.empty(p.rhs), d))
    if before == after:
        return TrueC(p.lhs)
    return implies(before, after)


# -- simplification ---------------------------------------------------------

def simplify(c: Condition) -> Condition:
    """Equivalence preserving clean-up.

    Flattens nested conjunctions/disjunctions, pushes negation through
    disjunctions of basic conditions, removes duplicate conjuncts and drops
    ``∄B'`` whenever a conjunct ``∄B`` with ``B ⊆ B'`` is present.
    """
    a = c.anchor
    if isinstance(c, TrueC):
        return c
    if isinstance(c, Exists):
        return Exists(a, c.target, simplify(c.sub))
    if isinstance(c, Not):
        inner = simplify(c.sub)
        if isinstance(inner, Not):
            return inner.sub
        if isinstance(inner, Or):
            return simplify(And(a, tuple(Not(a, s) for s in inner.subs)))
        if isinstance(inner, And) and not inner.subs:
            return false(a)
        return Not(a, inner)
    if isinstance(c, (And, Or)):
        kind = type(c)
        flat: list[Condition] = []
        for s in c.subs:
            s = simplify(s)
            if isinstance(s, kind):
                flat.extend(s.subs)
            else:
                flat.append(s)
        uniq: list[Condition] = []
        for s in flat:
            if s not in uniq:
                uniq.append(s)
        if kind is And:
            uniq = [s for s in uniq if not isinstance(s, TrueC)]
            if any(is_false(s) for s in uniq):
                return false(a)
            targets = [as_not_exists(s) for s in uniq]
            keep = []
            for i, s in enumerate(uniq):
                t = targets[i]
                if t is not None and any(
                        j != i and u is not None and _embeds(a, u, t)
                        and (j < i or not _embeds(a, t, u))
                        for j, u in enumerate(targets)):
                    continue
                keep.append(s)
            uniq = keep
            if len(uniq) == 1:
                return uniq[0]
            return And(a, tuple(uniq))
        uniq = [s for s in uniq if not is_false(s)]
        if any(isinstance(s, TrueC) for s in uniq):
            return TrueC(a)
        if len(uniq) == 1:
            return uniq[0]
        return Or(a, tuple(uniq))
    raise ConditionError(f"unknown condition node {type(c).__name__}")


def _embeds(anchor: Graph, small: Graph, big: Graph) -> bool:
    """Is there a morphism ``small -> big`` fixing the anchor?"""
    if len(small.nodes) > len(big.nodes) or len(small.edges) > len(big.edges):
        return False
    seed_n = {v: v for v in anchor.nodes}
    seed_e = {e: e for e in anchor.edges}
    return next(match_maps(small, big, seed_n, seed_e), None) is not None


# -- classification ---------------------------------------------------------

@dataclass(frozen=True)
class ConditionClass:
    basic: bool = False
    positive: bool = False
    negative: bool = False
    existential: bool = False
    universal: bool = False
    proper: bool = False
    generalized_proper: bool = False
    legit: bool = False

    def flags(self) -> set[str]:
        return {k for k, v in self.__dict__.items() if v}


def quantifier_chain(c: Condition) -> tuple[list[tuple[str, Graph, Graph]], str] | None:
    """Decompose ``c`` into ``[(Q, A, C), ...]`` plus terminal 'true'/'false'.

    Only pure quantifier nestings qualify; Boolean connectives other than the
    negations of the derived forms make the result None.
    """
    chain: list[tuple[str, Graph, Graph]] = []
    cur = c
    while True:
        if isinstance(cur, TrueC):
            return chain, "true"
        if is_false(cur) and isinstance(cur, Not):
            return chain, "false"
        if isinstance(cur, Exists):
            chain.append(("E", cur.anchor, cur.target))
            cur = cur.sub
            continue
        fa = as_forall(cur)
        if fa is not None:
            chain.append(("A", cur.anchor, fa[0]))
            cur = fa[1]
            continue
        ne = as_not_exists(cur)
        if ne is not None:
            chain.append(("A", cur.anchor, ne))
            return chain, "false"
        return None


def _alternating(chain) -> bool:
    return all(chain[i][0] != chain[i + 1][0] for i in range(len(chain) - 1))


def is_proper(c: Condition) -> bool:
    if isinstance(c, TrueC):
        return True
    if as_not_exists(c) is not None:
        return True
    if isinstance(c, Exists) and as_not_exists(c.sub) is not None:
        return True
    parsed = quantifier_chain(c)
    if parsed is None:
        return False
    chain, end = parsed
    return end == "true" and _alternating(chain)


def quantified_parts(c: Condition) -> tuple[str, Graph, Condition] | None:
    """``('E'|'A', target, sub)`` when ``c`` is ∃(a, sub) or ∀(a, sub)."""
    if isinstance(c, Exists):
        return "E", c.target, c.sub
    fa = as_forall(c)
    if fa is not None:
        return "A", fa[0], fa[1]
    return None


def classify(c: Condition, repairable: Callable[[Condition], bool] | None = None,
             preserving: Callable[[Sequence[Condition]], bool] | None = None) -> ConditionClass:
    """Syntactic classification.

    ``repairable(c')`` decides whether a repair program exists for a
    substituted subcondition (generalized proper); by default it recurses
    into this classification.  ``preserving(ds)`` decides whether a
    conjunction has an established preserving sequentialization; by default
    only the purely syntactic conjunction shapes are accepted.
    """
    if repairable is None:
        repairable = lambda sub: classify(sub, None, preserving).legit  # noqa: E731
    if preserving is None:
        preserving = syntactic_preserving
    positive = as_exists_basic(c) is not None
    negative = as_not_exists(c) is not None
    proper = is_proper(c)
    existential = universal = False
    if proper and not negative:
        parsed = quantifier_chain(c)
        if parsed is not None and parsed[1] == "true" and parsed[0]:
            existential = parsed[0][0][0] == "E"
            universal = parsed[0][0][0] == "A"
    gen = False
    if not proper:
        q = quantified_parts(c)
        if q is not None:
            gen = bool(repairable(q[2]))
    legit = proper or gen
    if not legit and isinstance(c, And):
        subs = list(c.subs)
        legit = all(classify(s, repairable, preserving).legit for s in subs) and bool(preserving(subs))
    if not legit and isinstance(c, Or):
        legit = any(classify(s, repairable, preserving).legit for s in c.subs)
    return ConditionClass(basic=positive or negative, positive=positive, negative=negative,
                          existential=existential, universal=universal, proper=proper,
                          generalized_proper=gen, legit=legit)


def syntactic_preserving(ds: Sequence[Condition]) -> bool:
    """Conjunction shapes whose sequentialization is preserving by construction."""
    kinds = [classify(d, lambda _: False, lambda _: False) for d in ds]
    if all(k.negative for k in kinds) or all(k.positive for k in kinds):
        return True
    negs = [k for k in kinds if k.negative]
    poss = [k for k in kinds if k.positive]
    univ = [k for k in kinds if k.universal]
    exis = [k for k in kinds if k.existential and not k.positive]
    if negs and len(negs) + len(univ) == len(kinds) and len(univ) <= 1:
        return True
    if poss and len(poss) + len(univ) + len(exis) == len(kinds) and len(univ) + len(exis) <= 1:
        return True
    return len(ds) <= 1
