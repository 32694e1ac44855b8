"""Typed graphs, type graphs and injective typed morphisms.

Graphs are immutable values.  Ids are opaque strings; node ids and edge ids
live in separate namespaces.  Every "canonical order" in this package is the
lexicographic order on ids.
"""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, NamedTuple


class GraphError(ValueError):
    """Structural error while building a graph or morphism."""


class Edge(NamedTuple):
    src: str
    tgt: str
    type: str


class Graph:
    """Directed multigraph whose nodes and edges carry a type label.

    ``nodes`` maps node id to node type, ``edges`` maps edge id to
    ``Edge(src, tgt, type)``.  An instance graph is typed over a
    :class:`TypeGraph`; a type graph's underlying graph uses its own ids as
    types (see :meth:`TypeGraph.as_graph`).
    """

    __slots__ = ("nodes", "edges", "_hash", "_index")

    def __init__(self, nodes: Mapping[str, str] | Iterable[tuple[str, str]] = (),
                 edges: Mapping[str, Edge | tuple] | Iterable[tuple] = ()):
        nodes = dict(nodes.items() if isinstance(nodes, Mapping) else nodes)
        items = edges.items() if isinstance(edges, Mapping) else ((e[0], e[1:]) for e in edges)
        built: dict[str, Edge] = {}
        for eid, spec in items:
            e = spec if isinstance(spec, Edge) else Edge(*spec)
            if e.src not in nodes or e.tgt not in nodes:
                raise GraphError(f"edge {eid!r} has an endpoint outside the node set")
            if eid in built:
                raise GraphError(f"duplicate edge id {eid!r}")
            built[eid] = e
        self.nodes: Mapping[str, str] = MappingProxyType(dict(sorted(nodes.items())))
        self.edges: Mapping[str, Edge] = MappingProxyType(dict(sorted(built.items())))
        self._hash: int | None = None
        self._index: _Index | None = None

    EMPTY: Graph  # set below

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self is other or (self.nodes == other.nodes and self.edges == other.edges)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((tuple(self.nodes.items()), tuple(self.edges.items())))
        return self._hash

    def __repr__(self) -> str:
        ns = " ".join(f"{v}:{t}" for v, t in self.nodes.items())
        es = " ".join(f"{e}:{x.src}-{x.type}->{x.tgt}" for e, x in self.edges.items())
        return f"Graph({ns}{' | ' + es if es else ''})"

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def size(self) -> tuple[int, int]:
        return len(self.nodes), len(self.edges)

    @property
    def index(self) -> _Index:
        if self._index is None:
            self._index = _Index(self)
        return self._index

    def is_empty(self) -> bool:
        return not self.nodes

    def is_subgraph_of(self, other: Graph) -> bool:
        """Literal subgraph test: same ids with the same types and incidences."""
        return (all(other.nodes.get(v) == t for v, t in self.nodes.items())
                and all(other.edges.get(e) == x for e, x in self.edges.items()))

    def subgraph(self, nodes: Iterable[str], edges: Iterable[str]) -> Graph:
        nodes = set(nodes)
        return Graph({v: self.nodes[v] for v in nodes},
                     {e: self.edges[e] for e in edges})

    def without(self, nodes: Iterable[str] = (), edges: Iterable[str] = ()) -> Graph:
        drop_n, drop_e = set(nodes), set(edges)
        return Graph({v: t for v, t in self.nodes.items() if v not in drop_n},
                     {e: x for e, x in self.edges.items() if e not in drop_e})

    def union(self, other: Graph) -> Graph:
        """Union of two graphs that agree on shared ids."""
        for v, t in other.nodes.items():
            if self.nodes.get(v, t) != t:
                raise GraphError(f"node {v!r} typed differently in union")
        for e, x in other.edges.items():
            if self.edges.get(e, x) != x:
                raise GraphError(f"edge {e!r} differs in union")
        return Graph({**self.nodes, **other.nodes}, {**self.edges, **other.edges})

    def incident_edges(self, node: str) -> list[str]:
        return self.index.incident.get(node, [])

    def node_type_counts(self) -> Counter:
        return self.index.node_types

    def edge_type_counts(self) -> Counter:
        return self.index.edge_types


Graph.EMPTY = Graph()


class _Index:
    """Lookup tables used by the matcher; built lazily once per graph."""

    __slots__ = ("by_type", "out", "inc", "par", "incident", "node_types",
                 "edge_types", "out_deg", "in_deg")

    def __init__(self, g: Graph):
        self.by_type: dict[str, list[str]] = defaultdict(list)
        for v, t in g.nodes.items():
            self.by_type[t].append(v)
        self.out: dict[tuple[str, str], list[str]] = defaultdict(list)   # (node, etype) -> tgt nodes
        self.inc: dict[tuple[str, str], list[str]] = defaultdict(list)   # (node, etype) -> src nodes
        self.par: dict[tuple[str, str, str], list[str]] = defaultdict(list)
        self.incident: dict[str, list[str]] = defaultdict(list)
        self.out_deg: dict[str, Counter] = defaultdict(Counter)
        self.in_deg: dict[str, Counter] = defaultdict(Counter)
        for e, x in g.edges.items():
            if x.tgt not in self.out[(x.src, x.type)]:
                self.out[(x.src, x.type)].append(x.tgt)
            if x.src not in self.inc[(x.tgt, x.type)]:
                self.inc[(x.tgt, x.type)].append(x.src)
            self.par[x].append(e)
            self.incident[x.src].append(e)
            if x.tgt != x.src:
                self.incident[x.tgt].append(e)
            self.out_deg[x.src][x.type] += 1
            self.in_deg[x.tgt][x.type] += 1
        self.node_types = Counter(g.nodes.values())
        self.edge_types = Counter(x.type for x in g.edges.values())


TypedGraph = Graph


@dataclass(frozen=True)
class TypeGraph:
    """Type graph with containment edge types and an opposite-edge relation.

    Node types and edge types are identified by id.  ``opposites`` holds
    ordered pairs and is expected to be symmetric.
    """

    node_types: tuple[str, ...]
    edge_types: Mapping[str, Edge]          # edge type id -> Edge(src type, tgt type, id)
    containment: frozenset[str] = frozenset()
    opposites: tuple[tuple[str, str], ...] = ()

    @classmethod
    def build(cls, node_types: Iterable[str], edge_types: Iterable[tuple[str, str, str]],
              containment: Iterable[str] = (), opposites: Iterable[tuple[str, str]] = ()) -> TypeGraph:
        """``edge_types`` are ``(id, src, tgt)``; opposite pairs are closed under symmetry."""
        edges = {eid: Edge(s, t, eid) for eid, s, t in edge_types}
        pairs: list[tuple[str, str]] = []
        for e1, e2 in opposites:
            for p in ((e1, e2), (e2, e1)):
                if p not in pairs:
                    pairs.append(p)
        return cls(tuple(node_types), MappingProxyType(edges), frozenset(containment), tuple(pairs))

    def __hash__(self) -> int:
        return hash((self.node_types, tuple(self.edge_types.items()), self.containment, self.opposites))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TypeGraph):
            return NotImplemented
        return (self.node_types == other.node_types and dict(self.edge_types) == dict(other.edge_types)
                and self.containment == other.containment and set(self.opposites) == set(other.opposites))

    def as_graph(self) -> Graph:
        return Graph({t: t for t in self.node_types}, dict(self.edge_types))

    def opposite_of(self, edge_type: str) -> str | None:
        for e1, e2 in self.opposites:
            if e1 == edge_type:
                return e2
        return None

    def is_containment(self, edge_type: str) -> bool:
        return edge_type in self.containment


@dataclass(frozen=True)
class Violation:
    kind: str
    items: tuple[str, ...]
    message: str = ""

    def as_dict(self) -> dict:
        return {"kind": self.kind, "items": list(self.items), "message": self.message}


def validate_type_graph(tg: TypeGraph) -> list[Violation]:
    """All violated containment/opposite invariants; empty list means ok."""
    out: list[Violation] = []
    node_set = set(tg.node_types)
    if len(node_set) != len(tg.node_types):
        dup = [t for t, n in Counter(tg.node_types).items() if n > 1]
        out.append(Violation("duplicate-node", tuple(dup), "node type ids must be unique"))
    for eid, e in tg.edge_types.items():
        if e.src not in node_set or e.tgt not in node_set:
            out.append(Violation("dangling-edge-type", (eid,), "edge type endpoint is not a node type"))
    for c in sorted(tg.containment):
        if c not in tg.edge_types:
            out.append(Violation("containment-subset", (c,), "containment edge is not an edge type"))
    pairs = set(tg.opposites)
    for e1, e2 in tg.opposites:
        if e1 not in tg.edge_types or e2 not in tg.edge_types:
            out.append(Violation("opposite-unknown", (e1, e2), "opposite pair names unknown edge types"))
            continue
        if e1 == e2:
            out.append(Violation("anti-reflexive", (e1, e2), "an edge cannot be its own opposite"))
        if (e2, e1) not in pairs:
            out.append(Violation("symmetric", (e1, e2), "missing symmetric pair"))
        a, b = tg.edge_types[e1], tg.edge_types[e2]
        if not (a.src == b.tgt and b.src == a.tgt):
            out.append(Violation("opposite-direction", (e1, e2), "opposite edges must run in reverse"))
    partners: dict[str, set[str]] = defaultdict(set)
    for e1, e2 in pairs:
        partners[e1].add(e2)
    for e1, ps in sorted(partners.items()):
        if len(ps) > 1:
            out.append(Violation("functional", (e1, *sorted(ps)), "edge has more than one opposite"))
    return out


def validate_typed_graph(g: Graph, tg: TypeGraph) -> list[Violation]:
    """Check that the typing of ``g`` is a graph morphism into ``tg``."""
    out: list[Violation] = []
    known = set(tg.node_types)
    for v, t in g.nodes.items():
        if t not in known:
            out.append(Violation("unknown-node-type", (v, t), f"node {v} has unknown type {t}"))
    for e, x in g.edges.items():
        et = tg.edge_types.get(x.type)
        if et is None:
            out.append(Violation("unknown-edge-type", (e, x.type), f"edge {e} has unknown type {x.type}"))
            continue
        if g.nodes[x.src] != et.src:
            out.append(Violation("src mismatch", (e, x.src), f"source of {e} must have type {et.src}"))
        if g.nodes[x.tgt] != et.tgt:
            out.append(Violation("tgt mismatch", (e, x.tgt), f"target of {e} must have type {et.tgt}"))
    return out


# --------------------------------------------------------------------------
# morphisms

@dataclass(frozen=True)
class Morphism:
    """Injective, type preserving graph morphism."""

    domain: Graph
    codomain: Graph
    node_map: Mapping[str, str]
    edge_map: Mapping[str, str]

    @classmethod
    def inclusion(cls, sub: Graph, sup: Graph) -> Morphism:
        if not sub.is_subgraph_of(sup):
            raise GraphError("domain is not a literal subgraph of the codomain")
        return cls(sub, sup, {v: v for v in sub.nodes}, {e: e for e in sub.edges})

    @classmethod
    def identity(cls, g: Graph) -> Morphism:
        return cls.inclusion(g, g)

    @classmethod
    def empty(cls, g: Graph) -> Morphism:
        return cls(Graph.EMPTY, g, {}, {})

    def __hash__(self) -> int:
        return hash((self.domain, self.codomain, tuple(sorted(self.node_map.items())),
                     tuple(sorted(self.edge_map.items()))))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Morphism):
            return NotImplemented
        return (self.domain == other.domain and self.codomain == other.codomain
                and dict(self.node_map) == dict(other.node_map)
                and dict(self.edge_map) == dict(other.edge_map))

    @property
    def is_inclusion(self) -> bool:
        return (all(k == v for k, v in self.node_map.items())
                and all(k == v for k, v in self.edge_map.items()))

    def check(self) -> list[str]:
        """Structural problems with this morphism (empty when well formed)."""
        problems = []
        d, c = self.domain, self.codomain
        if set(self.node_map) != set(d.nodes) or set(self.edge_map) != set(d.edges):
            problems.append("not total")
        if len(set(self.node_map.values())) != len(self.node_map) or \
                len(set(self.edge_map.values())) != len(self.edge_map):
            problems.append("not injective")
        for v, w in self.node_map.items():
            if c.nodes.get(w) != d.nodes.get(v):
                problems.append(f"node {v} type not preserved")
        for e, f in self.edge_map.items():
            x, y = d.edges.get(e), c.edges.get(f)
            if x is None or y is None or x.type != y.type:
                problems.append(f"edge {e} type not preserved")
            elif self.node_map.get(x.src) != y.src or self.node_map.get(x.tgt) != y.tgt:
                problems.append(f"edge {e} incidence not preserved")
        return problems

    def compose(self, first: Morphism) -> Morphism:
        """``self ∘ first``."""
        return Morphism(first.domain, self.codomain,
                        {k: self.node_map[v] for k, v in first.node_map.items()},
                        {k: self.edge_map[v] for k, v in first.edge_map.items()})

    def sort_key(self) -> tuple:
        return (tuple(self.node_map[v] for v in self.domain.nodes),
                tuple(self.edge_map[e] for e in self.domain.edges))

    def image(self) -> Graph:
        return self.codomain.subgraph(self.node_map.values(), self.edge_map.values())


def match_maps(pattern: Graph, host: Graph, nodes: Mapping[str, str] | None = None,
               edges: Mapping[str, str] | None = None) -> Iterator[tuple[dict, dict]]:
    """Yield every injective typed morphism ``pattern -> host`` as raw maps.

    ``nodes``/``edges`` pre-assign part of the morphism.  The order of
    results is the search order, not the canonical order.
    """
    nmap = dict(nodes or {})
    emap = dict(edges or {})
    used_n = set(nmap.values())
    used_e = set(emap.values())
    if len(used_n) != len(nmap) or len(used_e) != len(emap):
        return
    pn, hn, he = pattern.nodes, host.nodes, host.edges
    for v, w in nmap.items():
        if hn.get(w) != pn[v]:
            return
    for e, f in emap.items():
        x, y = pattern.edges[e], he.get(f)
        if y is None or y.type != x.type:
            return
        if nmap.setdefault(x.src, y.src) != y.src or nmap.setdefault(x.tgt, y.tgt) != y.tgt:
            return
        if hn.get(y.src) != pn[x.src] or hn.get(y.tgt) != pn[x.tgt]:
            return
    used_n = set(nmap.values())
    if len(used_n) != len(nmap):
        return
    hidx = host.index
    if len(pattern.nodes) - len(nmap) > len(host.nodes) - len(nmap):
        return
    plan = _plan(pattern, frozenset(nmap), frozenset(emap), hidx)
    if plan is None:
        return
    yield from _extend(plan, 0, pattern, host, hidx, nmap, emap, used_n, used_e)


def _plan(pattern: Graph, fixed_nodes: frozenset, fixed_edges: frozenset, hidx: _Index):
    """Search order: a list of steps ``(node, anchor, edges_closed)``.

    ``anchor`` is ``(edge_type, mapped_neighbour, outgoing?)`` when the node
    can be reached from an already placed node, which narrows candidates.
    """
    pidx = pattern.index
    for t, n in pidx.node_types.items():
        if hidx.node_types.get(t, 0) < n:
            return None
    for t, n in pidx.edge_types.items():
        if hidx.edge_types.get(t, 0) < n:
            return None
    placed = set(fixed_nodes)
    remaining = [v for v in pattern.nodes if v not in placed]
    steps: list = []
    # edges already closed by the seed
    pending = [e for e in pattern.edges if e not in fixed_edges]
    first = [e for e in pending if pattern.edges[e].src in placed and pattern.edges[e].tgt in placed]
    closed = set(first)
    steps.append((None, None, first))
    while remaining:
        best, best_key, best_anchor = None, None, None
        for v in remaining:
            anchor = None
            for e in pattern.incident_edges(v):
                x = pattern.edges[e]
                if x.src == v and x.tgt in placed:
                    anchor = (x.type, x.tgt, False)
                    break
                if x.tgt == v and x.src in placed:
                    anchor = (x.type, x.src, True)
                    break
            key = (anchor is None, len(hidx.by_type.get(pattern.nodes[v], ())),
                   -len(pattern.incident_edges(v)), v)
            if best_key is None or key < best_key:
                best, best_key, best_anchor = v, key, anchor
        remaining.remove(best)
        placed.add(best)
        new = [e for e in pending if e not in closed
               and pattern.edges[e].src in placed and pattern.edges[e].tgt in placed]
        closed.update(new)
        steps.append((best, best_anchor, new))
    return steps


def _extend(plan, i, pattern, host, hidx, nmap, emap, used_n, used_e):
    if i == len(plan):
        yield dict(nmap), dict(emap)
        return
    v, anchor, edges = plan[i]
    if v is None:
        yield from _assign_edges(plan, i, edges, 0, pattern, host, hidx, nmap, emap, used_n, used_e)
        return
    t = pattern.nodes[v]
    if anchor is None:
        cands = hidx.by_type.get(t, ())
    else:
        etype, nb, outgoing = anchor
        cands = hidx.out.get((nmap[nb], etype), ()) if outgoing else hidx.inc.get((nmap[nb], etype), ())
    pidx = pattern.index
    need_out, need_in = pidx.out_deg.get(v), pidx.in_deg.get(v)
    for w in cands:
        if w in used_n or host.nodes[w] != t:
            continue
        if need_out and any(hidx.out_deg[w][et] < n for et, n in need_out.items()):
            continue
        if need_in and any(hidx.in_deg[w][et] < n for et, n in need_in.items()):
            continue
        nmap[v] = w
        used_n.add(w)
        yield from _assign_edges(plan, i, edges, 0, pattern, host, hidx, nmap, emap, used_n, used_e)
        used_n.discard(w)
        del nmap[v]


def _assign_edges(plan, i, edges, j, pattern, host, hidx, nmap, emap, used_n, used_e):
    if j == len(edges):
        yield from _extend(plan, i + 1, pattern, host, hidx, nmap, emap, used_n, used_e)
        return
    e = edges[j]
    x = pattern.edges[e]
    for f in hidx.par.get(Edge(nmap[x.src], nmap[x.tgt], x.type), ()):
        if f in used_e:
            continue
        emap[e] = f
        used_e.add(f)
        yield from _assign_edges(plan, i, edges, j + 1, pattern, host, hidx, nmap, emap, used_n, used_e)
        used_e.discard(f)
        del emap[e]


def iter_morphisms(a: Graph, g: Graph) -> Iterator[Morphism]:
    for nm, em in match_maps(a, g):
        yield Morphism(a, g, nm, em)


def enumerate_morphisms(a: Graph, g: Graph) -> list[Morphism]:
    """All injective typed morphisms ``a -> g`` in canonical order."""
    return sorted(iter_morphisms(a, g), key=Morphism.sort_key)


def enumerate_extensions(a: Morphism, p: Morphism) -> list[Morphism]:
    """All ``q: C -> G`` with ``q ∘ a = p`` for ``a: A -> C`` and ``p: A -> G``."""
    if a.domain != p.domain:
        raise GraphError("extension requires a and p to share their domain")
    seed_n = {a.node_map[v]: w for v, w in p.node_map.items()}
    seed_e = {a.edge_map[e]: f for e, f in p.edge_map.items()}
    found = (Morphism(a.codomain, p.codomain, nm, em)
             for nm, em in match_maps(a.codomain, p.codomain, seed_n, seed_e))
    return sorted(found, key=Morphism.sort_key)


def find_isomorphism(g: Graph, h: Graph, nodes: Mapping[str, str] | None = None,
                     edges: Mapping[str, str] | None = None) -> tuple[dict, dict] | None:
    """An isomorphism ``g -> h`` extending the given partial maps, or None."""
    if g.size != h.size or g.node_type_counts() != h.node_type_counts() \
            or g.edge_type_counts() != h.edge_type_counts():
        return None
    return next(match_maps(g, h, nodes, edges), None)


def is_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


def invariant(g: Graph) -> tuple:
    """Cheap isomorphism invariant for bucketing."""
    idx = g.index
    degs = sorted((g.nodes[v], tuple(sorted(idx.out_deg[v].items())), tuple(sorted(idx.in_deg[v].items())))
                  for v in g.nodes)
    return (tuple(sorted(idx.node_types.items())), tuple(sorted(idx.edge_types.items())), tuple(degs))


def containment_pairs(g: Graph, tg: TypeGraph) -> set[tuple[str, str]]:
    """Transitive closure of direct containment edges (no reflexive seed)."""
    succ: dict[str, set[str]] = defaultdict(set)
    for x in g.edges.values():
        if x.type in tg.containment:
            succ[x.src].add(x.tgt)
    out: set[tuple[str, str]] = set()
    for v in g.nodes:
        seen: set[str] = set()
        stack = list(succ.get(v, ()))
        while stack:
            w = stack.pop()
            if w in seen:
                continue
            seen.add(w)
            stack.extend(succ.get(w, ()))
        out.update((v, w) for w in seen)
    return out


def subgraphs_between(a: Graph, c: Graph) -> list[Graph]:
    """All literal graphs ``B`` with ``a ⊆ B ⊂ c``, ordered by size then ids."""
    if not a.is_subgraph_of(c):
        raise GraphError("a is not a subgraph of c")
    if a == c:
        raise GraphError("inclusion a ⊂ c must be real")
    extra_nodes = [v for v in c.nodes if v not in a.nodes]
    extra_edges = [e for e in c.edges if e not in a.edges]
    found: list[Graph] = []
    for k in range(len(extra_nodes) + 1):
        for ns in combinations(extra_nodes, k):
            vs = set(a.nodes) | set(ns)
            allowed = [e for e in extra_edges if c.edges[e].src in vs and c.edges[e].tgt in vs]
            for m in range(len(allowed) + 1):
                for es in combinations(allowed, m):
                    if k == len(extra_nodes) and m == len(extra_edges):
                        continue
                    found.append(c.subgraph(vs, set(a.edges) | set(es)))
    found.sort(key=lambda b: (len(b.nodes), len(b.edges), tuple(b.nodes), tuple(b.edges)))
    return found


def fresh_id(base: str, taken) -> str:
    """``base`` or ``base'``, ``base''``... whichever is not in ``taken``."""
    cand = base
    while cand in taken:
        cand += "'"
    return cand
