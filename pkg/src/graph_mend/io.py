"""JSON encoding of type graphs, typed graphs, conditions and programs."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .conditions import And, Condition, Exists, Not, Or, PlainRule, TrueC
from .graph import Graph, GraphError, Morphism, TypeGraph
from .programs import Alap, Choice, Program, Rule, RuleStep, Seq, Skip, Try


class FormatError(ValueError):
    pass


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def read_json(path: str | Path) -> Any:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as ex:
        raise FormatError(f"invalid JSON ({ex})") from ex


def write_json(path: str | Path, obj: Any) -> None:
    Path(path).write_text(dumps(obj), encoding="utf-8")


def _need(d: Any, key: str, kind: type = object):
    if not isinstance(d, dict) or key not in d:
        raise FormatError(f"missing field {key!r}")
    v = d[key]
    if not isinstance(v, kind):
        raise FormatError(f"field {key!r} has the wrong type")
    return v


# -- type graphs --------------------------------------------------------------------

def type_graph_to_json(tg: TypeGraph) -> dict:
    seen, opp = set(), []
    for a, b in tg.opposites:
        if (b, a) not in seen:
            seen.add((a, b))
            opp.append([a, b])
    return {
        "nodes": [{"id": n} for n in tg.node_types],
        "edges": [{"id": e, "src": x.src, "tgt": x.tgt, "containment": e in tg.containment}
                  for e, x in tg.edge_types.items()],
        "opposites": opp,
    }


def type_graph_from_json(d: Any) -> TypeGraph:
    try:
        nodes = [_need(n, "id", str) for n in _need(d, "nodes", list)]
        edges = _need(d, "edges", list)
        return TypeGraph.build(
            nodes, [(_need(e, "id", str), _need(e, "src", str), _need(e, "tgt", str)) for e in edges],
            containment=[e["id"] for e in edges if e.get("containment")],
            opposites=[tuple(p) for p in d.get("opposites", [])])
    except (TypeError, GraphError) as ex:
        raise FormatError(f"bad type graph: {ex}") from ex


# -- graphs and morphisms ---------------------------------------------------------------

def graph_to_json(g: Graph) -> dict:
    return {"nodes": [{"id": v, "type": t} for v, t in g.nodes.items()],
            "edges": [{"id": e, "type": x.type, "src": x.src, "tgt": x.tgt} for e, x in g.edges.items()]}


def graph_from_json(d: Any) -> Graph:
    try:
        nodes = {_need(n, "id", str): _need(n, "type", str) for n in _need(d, "nodes", list)}
        edges = {}
        for e in _need(d, "edges", list):
            eid = _need(e, "id", str)
            if eid in edges:
                raise FormatError(f"duplicate edge id {eid!r}")
            edges[eid] = (_need(e, "src", str), _need(e, "tgt", str), _need(e, "type", str))
        if len(nodes) != len(_need(d, "nodes", list)):
            raise FormatError("duplicate node id")
        return Graph(nodes, edges)
    except GraphError as ex:
        raise FormatError(str(ex)) from ex


def morphism_to_json(m: Morphism) -> dict:
    return {"domain": graph_to_json(m.domain), "nodes": dict(m.node_map), "edges": dict(m.edge_map)}


def morphism_from_json(d: Any, codomain: Graph) -> Morphism:
    m = Morphism(graph_from_json(_need(d, "domain")), codomain,
                 dict(_need(d, "nodes", dict)), dict(_need(d, "edges", dict)))
    bad = m.check()
    if bad:
        raise FormatError(f"bad morphism: {bad[0]}")
    return m


# -- conditions ---------------------------------------------------------------------------

def condition_to_json(c: Condition) -> dict:
    if isinstance(c, TrueC):
        return {"kind": "true", "anchor": graph_to_json(c.anchor)}
    if isinstance(c, Exists):
        return {"kind": "exists",
                "inclusion": {"domain": graph_to_json(c.anchor), "codomain": graph_to_json(c.target)},
                "sub": condition_to_json(c.sub)}
    if isinstance(c, Not):
        return {"kind": "not", "anchor": graph_to_json(c.anchor), "sub": condition_to_json(c.sub)}
    if isinstance(c, (And, Or)):
        return {"kind": "and" if isinstance(c, And) else "or", "anchor": graph_to_json(c.anchor),
                "subs": [condition_to_json(s) for s in c.subs]}
    raise TypeError(f"not a condition: {c!r}")


def condition_from_json(d: Any, anchor: Graph | None = None) -> Condition:
    """Decode a condition; ``anchor`` defaults to the empty graph for the outermost level."""
    kind = _need(d, "kind", str)
    if anchor is None:
        anchor = graph_from_json(d["anchor"]) if "anchor" in d else (
            graph_from_json(d["inclusion"]["domain"]) if kind == "exists" and "inclusion" in d else Graph.EMPTY)
    try:
        if kind == "true":
            return TrueC(anchor)
        if kind == "exists":
            inc = _need(d, "inclusion", dict)
            if graph_from_json(_need(inc, "domain")) != anchor:
                raise FormatError("inclusion domain differs from the enclosing graph")
            target = graph_from_json(_need(inc, "codomain"))
            sub = condition_from_json(d["sub"], target) if "sub" in d else None
            return Exists(anchor, target, sub)
        if kind == "not":
            return Not(anchor, condition_from_json(_need(d, "sub"), anchor))
        if kind in ("and", "or"):
            subs = tuple(condition_from_json(s, anchor) for s in _need(d, "subs", list))
            return (And if kind == "and" else Or)(anchor, subs)
    except (GraphError, ValueError) as ex:
        if isinstance(ex, FormatError):
            raise
        raise FormatError(f"bad condition: {ex}") from ex
    raise FormatError(f"unknown condition kind {kind!r}")


# -- programs ------------------------------------------------------------------------------

def rule_to_json(r: Rule) -> dict:
    return {"name": r.name, "lhs": graph_to_json(r.lhs), "interface": graph_to_json(r.plain.interface),
            "rhs": graph_to_json(r.rhs), "x": morphism_to_json(r.x), "y": morphism_to_json(r.y),
            "ac": condition_to_json(r.ac)}


def rule_from_json(d: Any) -> Rule:
    try:
        lhs = graph_from_json(_need(d, "lhs"))
        rhs = graph_from_json(_need(d, "rhs"))
        plain = PlainRule(lhs, graph_from_json(_need(d, "interface")), rhs)
        return Rule(_need(d, "name", str), plain, morphism_from_json(_need(d, "x"), lhs),
                    morphism_from_json(_need(d, "y"), rhs), condition_from_json(_need(d, "ac"), lhs))
    except GraphError as ex:
        raise FormatError(f"bad rule: {ex}") from ex


def program_to_json(p: Program) -> dict:
    out: dict[str, Any]
    if isinstance(p, RuleStep):
        out = {"kind": "rule", "rule": rule_to_json(p.rule), "spo": p.spo}
    elif isinstance(p, Choice):
        out = {"kind": "choice", "branches": [program_to_json(b) for b in p.branches]}
    elif isinstance(p, Seq):
        out = {"kind": "seq", "parts": [program_to_json(b) for b in p.parts]}
    elif isinstance(p, Try):
        out = {"kind": "try", "body": program_to_json(p.body)}
    elif isinstance(p, Alap):
        out = {"kind": "alap", "body": program_to_json(p.body)}
    elif isinstance(p, Skip):
        out = {"kind": "skip", "interface": graph_to_json(p.iface)}
    else:
        raise TypeError(f"not a program: {p!r}")
    if p.label:
        out["label"] = p.label
    return out


def program_from_json(d: Any) -> Program:
    kind = _need(d, "kind", str)
    label = d.get("label", "")
    if kind == "rule":
        return RuleStep(rule_from_json(_need(d, "rule")), bool(d.get("spo", False)), label)
    if kind == "choice":
        return Choice(tuple(program_from_json(b) for b in _need(d, "branches", list)), label)
    if kind == "seq":
        return Seq(tuple(program_from_json(b) for b in _need(d, "parts", list)), label)
    if kind == "try":
        return Try(program_from_json(_need(d, "body")), label)
    if kind == "alap":
        return Alap(program_from_json(_need(d, "body")), label)
    if kind == "skip":
        return Skip(graph_from_json(d["interface"]) if "interface" in d else Graph.EMPTY, label)
    raise FormatError(f"unknown program kind {kind!r}")


def program_file(p: Program, condition: Condition | None = None, provenance=(), guarantees=()) -> dict:
    """Wrapper written by ``synthesize``; :func:`load_program` accepts it or a bare program."""
    out: dict[str, Any] = {"program": program_to_json(p)}
    if condition is not None:
        out["condition"] = condition_to_json(condition)
    if provenance:
        out["provenance"] = list(provenance)
    if guarantees:
        out["guarantees"] = sorted(guarantees)
    return out


def load_program(d: Any) -> Program:
    return program_from_json(d["program"] if isinstance(d, dict) and "program" in d else d)
