"""Command line front end: ``graph-mend validate|check|synthesize|repair|complete``.

Exit status is 0 on success, 1 when the input is well formed but fails the
requested property (violations, unsatisfied constraint, not repairable), and
2 for usage, parse and I/O errors.  Data goes to stdout, diagnostics to
stderr.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Any

from . import io
from .conditions import Condition, satisfies_constraint
from .dot import graph_to_dot
from .emf import completion_plan, emf_complete, generate_emfk, is_emf_model_graph, node_count_invariant_check
from .graph import Graph, GraphError, TypeGraph, validate_type_graph, validate_typed_graph
from .programs import DEFAULT_MAX_STEPS, ProgramError, StepBudgetExceeded, execute, execute_all
from .repair import NoEstablishedSequentialization, NotLegit, SynthesisOptions, synthesize_legit

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _emit(obj: Any, out: str | None = None) -> None:
    text = io.dumps(obj)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(path: str, decode):
    try:
        return decode(io.read_json(path))
    except OSError as ex:
        raise UsageError(f"{path}: {ex.strerror or ex}") from ex
    except (io.FormatError, GraphError, KeyError, TypeError, ValueError) as ex:
        raise UsageError(f"{path}: {ex}") from ex


def _type_graph(path: str, strict: bool = True) -> TypeGraph:
    tg = _load(path, io.type_graph_from_json)
    if strict:
        bad = validate_type_graph(tg)
        if bad:
            raise UsageError(f"{path}: invalid type graph: {bad[0].message or bad[0].kind}")
    return tg


def _graph(path: str, tg: TypeGraph) -> Graph:
    g = _load(path, io.graph_from_json)
    bad = validate_typed_graph(g, tg)
    if bad:
        raise UsageError(f"{path}: graph does not conform to the type graph: {bad[0].message or bad[0].kind}")
    return g


def _constraint(path: str) -> Condition:
    c = _load(path, io.condition_from_json)
    if not c.anchor.is_empty():
        raise UsageError(f"{path}: expected a constraint (condition over the empty graph)")
    return c


def _max_steps(args) -> int:
    if args.max_steps is not None:
        return args.max_steps
    env = os.environ.get("GRAPH_MEND_MAX_STEPS")
    if env:
        try:
            return int(env)
        except ValueError as ex:
            raise UsageError(f"GRAPH_MEND_MAX_STEPS must be an integer, got {env!r}") from ex
    return DEFAULT_MAX_STEPS


def _write_dot(path: str | None, g: Graph, tg: TypeGraph) -> None:
    if path:
        Path(path).write_text(graph_to_dot(g, tg), encoding="utf-8")


# -- commands ---------------------------------------------------------------------------

def cmd_validate(args) -> int:
    tg = _type_graph(args.typegraph, strict=False)
    report: dict[str, Any] = {"type_graph": [v.as_dict() for v in validate_type_graph(tg)]}
    if args.graph:
        g = _load(args.graph, io.graph_from_json)
        typing = validate_typed_graph(g, tg)
        report["typing"] = [v.as_dict() for v in typing]
        if not typing and not report["type_graph"]:
            report["emf"] = [v.as_dict() for v in is_emf_model_graph(g, tg)]
    report["ok"] = not any(report.values())
    _emit(report)
    return OK if report["ok"] else FAIL


def cmd_check(args) -> int:
    tg = _type_graph(args.typegraph)
    g = _graph(args.graph, tg)
    ok = satisfies_constraint(g, _constraint(args.constraint))
    _emit({"satisfied": ok})
    return OK if ok else FAIL


def _plan_for(args, tg: TypeGraph):
    if getattr(args, "emfk", None) is not None:
        if args.emfk < 1:
            raise UsageError("--emfk needs a positive bound")
        return completion_plan(tg, args.emfk)
    if not args.constraint:
        raise UsageError("give a constraint file or --emfk K")
    return synthesize_legit(_constraint(args.constraint), SynthesisOptions(tg=tg))


def cmd_synthesize(args) -> int:
    tg = _type_graph(args.typegraph)
    try:
        plan = _plan_for(args, tg)
    except (NotLegit, NoEstablishedSequentialization) as ex:
        print(f"not repairable: {ex}", file=sys.stderr)
        return FAIL
    doc = io.program_file(plan.program, plan.condition, plan.provenance, plan.guarantees)
    if args.emfk is not None:
        doc["emfk"] = {"k": args.emfk, "instances": len(generate_emfk(tg, args.emfk).instances),
                       "preserves_node_count": node_count_invariant_check(plan)}
    if args.trace:
        for line in plan.provenance:
            print(line, file=sys.stderr)
    _emit(doc, args.out)
    return OK


def cmd_repair(args) -> int:
    tg = _type_graph(args.typegraph)
    g = _graph(args.graph, tg)
    if args.program:
        prog = _load(args.program, io.load_program)
        target = None
    else:
        try:
            plan = _plan_for(args, tg)
        except (NotLegit, NoEstablishedSequentialization) as ex:
            print(f"not repairable: {ex}", file=sys.stderr)
            return FAIL
        prog, target = plan.program, plan.condition
    steps = _max_steps(args)
    try:
        if args.all:
            ex = execute_all(prog, g, max_steps=steps)
            if ex.incomplete:
                print("exploration bound reached; results are partial", file=sys.stderr)
            graphs = [r.graph for r in ex.results]
            _emit([io.graph_to_json(h) for h in graphs], args.out)
            if args.dot:
                Path(args.dot).write_text("".join(graph_to_dot(h, tg, f"R{i}") for i, h in enumerate(graphs)),
                                          encoding="utf-8")
            results = graphs
        else:
            h = execute(prog, g, seed=args.seed, max_steps=steps).graph
            _emit(io.graph_to_json(h), args.out)
            _write_dot(args.dot, h, tg)
            results = [h]
    except StepBudgetExceeded as ex:
        print(f"step budget of {ex.max_steps} exceeded; last steps:", file=sys.stderr)
        for line in ex.trace:
            print(f"  {line}", file=sys.stderr)
        return FAIL
    except ProgramError as ex:
        print(f"program failed: {ex}", file=sys.stderr)
        return FAIL
    if target is not None and not all(satisfies_constraint(h, target) for h in results):
        print("result does not satisfy the constraint", file=sys.stderr)
        return FAIL
    return OK


def cmd_complete(args) -> int:
    tg = _type_graph(args.typegraph)
    g = _graph(args.graph, tg)
    try:
        h = emf_complete(g, tg, seed=args.seed, max_steps=_max_steps(args))
    except StepBudgetExceeded as ex:
        print(f"step budget of {ex.max_steps} exceeded", file=sys.stderr)
        return FAIL
    _emit(io.graph_to_json(h), args.out)
    _write_dot(args.dot, h, tg)
    bad = is_emf_model_graph(h, tg)
    if bad:
        print(json.dumps([v.as_dict() for v in bad]), file=sys.stderr)
        return FAIL
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="graph-mend", description="Repair typed graphs against graph constraints.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a type graph, and optionally a graph against it")
    p.add_argument("typegraph")
    p.add_argument("graph", nargs="?")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", help="does the graph satisfy the constraint")
    p.add_argument("typegraph")
    p.add_argument("graph")
    p.add_argument("constraint")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("synthesize", help="build a repair program")
    p.add_argument("typegraph")
    p.add_argument("constraint", nargs="?")
    p.add_argument("--emfk", type=int, metavar="K", help="program for all bounded EMF constraints")
    p.add_argument("--out", help="write the program here instead of stdout")
    p.add_argument("--trace", action="store_true", help="print the construction steps to stderr")
    p.set_defaults(func=cmd_synthesize)

    def run_opts(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--max-steps", type=int, default=None)
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--dot", metavar="FILE", help="also write the result as DOT")

    p = sub.add_parser("repair", help="run a repair program on a graph")
    p.add_argument("typegraph")
    p.add_argument("graph")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--program")
    src.add_argument("--constraint")
    src.add_argument("--emfk", type=int, metavar="K")
    p.add_argument("--all", action="store_true", help="all results up to isomorphism")
    run_opts(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("complete", help="complete a graph to an EMF model graph")
    p.add_argument("typegraph")
    p.add_argument("graph")
    run_opts(p)
    p.set_defaults(func=cmd_complete)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as ex:
        return USAGE if ex.code else OK
    try:
        return args.func(args)
    except UsageError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return USAGE
    except OSError as ex:
        print(f"error: {ex}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
