"""Enumeration and sampling of small typed graphs over a type graph."""
from __future__ import annotations

import random
from itertools import combinations, combinations_with_replacement
from typing import Iterator, Sequence

from .graph import Graph, TypeGraph, is_isomorphic, invariant


def edge_slots(nodes: dict[str, str], tg: TypeGraph, edge_types: Sequence[str] | None = None):
    """Every ``(src, tgt, type)`` an edge between the given nodes could take."""
    allowed = set(edge_types) if edge_types is not None else None
    slots = []
    for et, x in tg.edge_types.items():
        if allowed is not None and et not in allowed:
            continue
        for s, st in nodes.items():
            if st != x.src:
                continue
            for t, tt in nodes.items():
                if tt == x.tgt:
                    slots.append((s, t, et))
    return slots


def enumerate_graphs(tg: TypeGraph, max_nodes: int, max_edges: int,
                     node_types: Sequence[str] | None = None,
                     edge_types: Sequence[str] | None = None,
                     parallel: bool = True) -> Iterator[Graph]:
    """All typed graphs up to the bounds, one per isomorphism class.

    Parallel edges are included unless ``parallel`` is false.
    """
    types = sorted(node_types if node_types is not None else tg.node_types)
    for n in range(max_nodes + 1):
        for combo in combinations_with_replacement(types, n):
            nodes = {f"v{i}": t for i, t in enumerate(combo)}
            slots = edge_slots(nodes, tg, edge_types)
            seen: dict[tuple, list[Graph]] = {}
            for m in range(max_edges + 1):
                pick = (combinations_with_replacement if parallel else combinations)(range(len(slots)), m)
                for choice in pick:
                    g = Graph(nodes, {f"e{j}": slots[k] for j, k in enumerate(choice)})
                    key = invariant(g)
                    bucket = seen.setdefault(key, [])
                    if any(is_isomorphic(g, h) for h in bucket):
                        continue
                    bucket.append(g)
                    yield g


def random_graph(tg: TypeGraph, rng: random.Random, max_nodes: int, max_edges: int,
                 node_types: Sequence[str] | None = None) -> Graph:
    """A random typed graph; parallel edges are allowed."""
    types = list(node_types if node_types is not None else tg.node_types)
    n = rng.randint(0, max_nodes)
    nodes = {f"v{i}": rng.choice(types) for i in range(n)}
    slots = edge_slots(nodes, tg)
    m = rng.randint(0, max_edges) if slots else 0
    edges = {f"e{j}": rng.choice(slots) for j in range(m)}
    return Graph(nodes, edges)
