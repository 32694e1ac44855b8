"""Ready-made type graphs, graphs and constraints used in docs, tests and the CLI."""
from __future__ import annotations

from .conditions import Condition, Exists, exists, forall, not_exists
from .graph import Graph, TypeGraph

EMPTY = Graph.EMPTY


def petri_type_graph() -> TypeGraph:
    """Petri nets: places, transitions, tokens and the two arc kinds."""
    return TypeGraph.build(
        ["PN", "Pl", "Tr", "Tk", "PTArc", "TPArc"],
        [("places", "PN", "Pl"), ("trans", "PN", "Tr"), ("ptarcs", "PN", "PTArc"),
         ("tparcs", "PN", "TPArc"), ("tok", "Pl", "Tk"),
         ("pt_src", "PTArc", "Pl"), ("pl_out", "Pl", "PTArc"),
         ("tp_tgt", "TPArc", "Pl"), ("pl_in", "Pl", "TPArc"),
         ("tp_src", "TPArc", "Tr"), ("tr_out", "Tr", "TPArc"),
         ("pt_tgt", "PTArc", "Tr"), ("tr_in", "Tr", "PTArc")],
        containment=["places", "trans", "ptarcs", "tparcs", "tok"],
        opposites=[("pt_src", "pl_out"), ("tp_tgt", "pl_in"), ("tp_src", "tr_out"), ("pt_tgt", "tr_in")],
    )


def plain_type_graph() -> TypeGraph:
    """One node type ``N`` and one edge type ``E``: untyped graphs."""
    return TypeGraph.build(["N"], [("E", "N", "N")])


# -- small Petri graphs --------------------------------------------------------

PL = Graph({"p": "Pl"})
PL_TK = Graph({"p": "Pl", "t": "Tk"})
PL_TOK_TK = Graph({"p": "Pl", "t": "Tk"}, {"e": ("p", "t", "tok")})
TWO_CONTAINERS = Graph({"p": "Pl", "t": "Tk", "q": "Pl"}, {"e": ("p", "t", "tok"), "f": ("q", "t", "tok")})
PARALLEL_TOK = Graph({"p": "Pl", "t": "Tk"}, {"e": ("p", "t", "tok"), "f": ("p", "t", "tok")})


def parallel_tok(n: int) -> Graph:
    return Graph({"p": "Pl", "t": "Tk"}, {f"e{i}": ("p", "t", "tok") for i in range(n)})


def lone_place_graph() -> Graph:
    """A place without token next to a token owned by another place."""
    return Graph({"p1": "Pl", "t": "Tk", "p2": "Pl"}, {"e": ("p2", "t", "tok")})


def every_place_has_token() -> Condition:
    return forall(EMPTY, PL, exists(PL, PL_TOK_TK))


def at_most_one_container() -> Condition:
    return not_exists(EMPTY, TWO_CONTAINERS)


def no_parallel_tok() -> Condition:
    return not_exists(EMPTY, PARALLEL_TOK)


def place_token_exists() -> Exists:
    """``∃(Pl ⊂ Pl -tok-> Tk)`` over a place."""
    return Exists(PL, PL_TOK_TK)


# -- plain graphs for the ordering counterexamples ------------------------------

N1 = Graph({"u": "N"})
N1_LOOP = Graph({"u": "N"}, {"l": ("u", "u", "E")})
N2_EDGE = Graph({"u": "N", "v": "N"}, {"a": ("u", "v", "E")})
N2_EDGE_PLUS = Graph({"u": "N", "v": "N", "w": "N"}, {"a": ("u", "v", "E")})


def node_has_loop() -> Condition:
    return forall(EMPTY, N1, exists(N1, N1_LOOP))


def node_has_successor() -> Condition:
    return forall(EMPTY, N1, exists(N1, N2_EDGE))


def edge_has_third_node() -> Condition:
    return forall(EMPTY, N2_EDGE, exists(N2_EDGE, N2_EDGE_PLUS))
