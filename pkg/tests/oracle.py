"""Brute-force reference semantics, kept independent of the matcher in the package.

Morphisms are found by trying every injective node assignment and every
injective edge assignment; nothing is pruned.
"""
from __future__ import annotations

from collections import Counter
from itertools import permutations, product

from graph_mend.conditions import And, Exists, Not, Or, TrueC


def morphisms(pattern, host, fixed_nodes=None, fixed_edges=None):
    """Every injective type-preserving map ``pattern -> host`` extending the fixed parts."""
    fixed_nodes = dict(fixed_nodes or {})
    fixed_edges = dict(fixed_edges or {})
    pn = list(pattern.nodes)
    hn = list(host.nodes)
    for image in permutations(hn, len(pn)):
        nm = dict(zip(pn, image))
        if any(pattern.nodes[v] != host.nodes[nm[v]] for v in pn):
            continue
        if any(nm[v] != w for v, w in fixed_nodes.items()):
            continue
        pe = list(pattern.edges)
        options = []
        for e in pe:
            x = pattern.edges[e]
            options.append([f for f, y in host.edges.items()
                            if y.type == x.type and y.src == nm[x.src] and y.tgt == nm[x.tgt]])
        for choice in product(*options):
            if len(set(choice)) != len(choice):
                continue
            em = dict(zip(pe, choice))
            if any(em[e] != f for e, f in fixed_edges.items()):
                continue
            yield nm, em


def sat(g, nm, em, c) -> bool:
    """``m ⊨ c`` for the morphism ``(nm, em)`` from ``c.anchor`` into ``g``."""
    if isinstance(c, TrueC):
        return True
    if isinstance(c, Not):
        return not sat(g, nm, em, c.sub)
    if isinstance(c, And):
        return all(sat(g, nm, em, s) for s in c.subs)
    if isinstance(c, Or):
        return any(sat(g, nm, em, s) for s in c.subs)
    if isinstance(c, Exists):
        return any(sat(g, n2, e2, c.sub) for n2, e2 in morphisms(c.target, g, nm, em))
    raise TypeError(c)


def sat_constraint(g, c) -> bool:
    return sat(g, {}, {}, c)


def is_iso(g, h) -> bool:
    # parallel edges are interchangeable, so a node bijection plus equal edge multisets suffices
    if len(g.nodes) != len(h.nodes) or len(g.edges) != len(h.edges):
        return False
    target = Counter((x.src, x.tgt, x.type) for x in h.edges.values())
    gn = list(g.nodes)
    for image in permutations(h.nodes):
        nm = dict(zip(gn, image))
        if any(g.nodes[v] != h.nodes[nm[v]] for v in gn):
            continue
        if Counter((nm[x.src], nm[x.tgt], x.type) for x in g.edges.values()) == target:
            return True
    return False


def contains_cycle(g, containment) -> bool:
    succ = {v: set() for v in g.nodes}
    for x in g.edges.values():
        if x.type in containment:
            succ[x.src].add(x.tgt)
    for start in g.nodes:
        stack, seen = list(succ[start]), set()
        while stack:
            v = stack.pop()
            if v == start:
                return True
            if v not in seen:
                seen.add(v)
                stack.extend(succ[v])
    return False


def emf_ok(g, tg) -> bool:
    """Direct restatement of the four EMF model graph conditions."""
    cont = tg.containment
    targets = [x.tgt for x in g.edges.values() if x.type in cont]
    if len(targets) != len(set(targets)):
        return False
    if contains_cycle(g, cont):
        return False
    keys = list(g.edges.values())
    if len(keys) != len(set(keys)):
        return False
    opp = dict(tg.opposites)
    for x in g.edges.values():
        if x.type in opp and not any(y.src == x.tgt and y.tgt == x.src and y.type == opp[x.type]
                                     for y in g.edges.values()):
            return False
    return True
