"""Graphviz DOT output for typed graphs and type graphs."""
from __future__ import annotations

from .graph import Graph, TypeGraph


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _edges(items, containment, opposite_of) -> list[str]:
    """``items`` are ``(id, src, tgt, type)``; opposite pairs collapse into one two-headed edge."""
    lines, done = [], set()
    for eid, s, t, et in items:
        if eid in done:
            continue
        done.add(eid)
        attrs = [f"label={_q(et)}"]
        opp = opposite_of(et)
        if opp is not None:
            partner = next((i for i, s2, t2, et2 in items
                            if i not in done and et2 == opp and s2 == t and t2 == s), None)
            if partner is not None:
                done.add(partner)
                attrs = [f"label={_q(et + ' / ' + opp)}", "dir=both"]
        if et in containment:
            attrs += ["dir=both", "arrowtail=diamond"]
        lines.append(f"  {_q(s)} -> {_q(t)} [{', '.join(dict.fromkeys(attrs))}];")
    return lines


def graph_to_dot(g: Graph, tg: TypeGraph | None = None, name: str = "G") -> str:
    lines = [f"digraph {_q(name)} {{"]
    for v, t in g.nodes.items():
        lines.append(f"  {_q(v)} [label={_q(f'{v}:{t}')}];")
    items = [(e, x.src, x.tgt, x.type) for e, x in g.edges.items()]
    cont = tg.containment if tg is not None else frozenset()
    lines += _edges(items, cont, tg.opposite_of if tg is not None else (lambda _: None))
    lines.append("}")
    return "\n".join(lines) + "\n"


def type_graph_to_dot(tg: TypeGraph, name: str = "TG") -> str:
    lines = [f"digraph {_q(name)} {{", "  node [shape=box];"]
    for v in tg.node_types:
        lines.append(f"  {_q(v)};")
    items = [(e, x.src, x.tgt, e) for e, x in tg.edge_types.items()]
    lines += _edges(items, tg.containment, tg.opposite_of)
    lines.append("}")
    return "\n".join(lines) + "\n"
