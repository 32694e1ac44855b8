"""Legit constraints over the Petri net type graph used by the soundness checks."""
from graph_mend.conditions import conj, disj, exists, forall, not_exists
from graph_mend.graph import Graph
from graph_mend.samples import (PL, PL_TOK_TK, TWO_CONTAINERS, at_most_one_container, every_place_has_token,
                                no_parallel_tok)

EMPTY = Graph.EMPTY
TK = Graph({"t": "Tk"})
PN = Graph({"n": "PN"})
PTARC = Graph({"a": "PTArc"})
PL_TOK_TK2 = Graph({"p": "Pl", "t": "Tk", "t2": "Tk"}, {"e": ("p", "t", "tok"), "f": ("p", "t2", "tok")})


def legit_constraints():
    """``(name, constraint)`` pairs; every entry is legit."""
    return [
        ("every-place-has-token", every_place_has_token()),
        ("one-container", at_most_one_container()),
        ("no-parallel-tok", no_parallel_tok()),
        ("some-marked-place", exists(EMPTY, PL_TOK_TK)),
        ("every-token-contained", forall(EMPTY, TK, exists(TK, Graph({"p": "Pl", "t": "Tk"},
                                                                       {"e": ("p", "t", "tok")})))),
        ("single-token-places", forall(EMPTY, PL_TOK_TK, not_exists(PL_TOK_TK, PL_TOK_TK2))),
        ("an-empty-place", exists(EMPTY, PL, not_exists(PL, PL_TOK_TK))),
        ("arcs-have-sources", forall(EMPTY, PTARC, exists(PTARC, Graph({"a": "PTArc", "p": "Pl"},
                                                                       {"s": ("a", "p", "pt_src")})))),
        ("net-or-no-place", disj(EMPTY, [exists(EMPTY, PN), not_exists(EMPTY, PL)])),
        ("one-container-and-tokens", conj(EMPTY, [at_most_one_container(), every_place_has_token()])),
        ("no-parallel-and-marked", conj(EMPTY, [no_parallel_tok(), exists(EMPTY, PL_TOK_TK)])),
        ("no-double-container", not_exists(EMPTY, TWO_CONTAINERS)),
    ]
