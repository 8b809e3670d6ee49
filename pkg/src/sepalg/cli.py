"""Command-line interface.

Every command loads graphs from a file path or from a bundled fixture via
``fixture:NAME``. Exit codes: 0 for any definite verdict (including negative
ones), 2 when a decision procedure gives up within its budget, 1 for input
errors. Output is deterministic for fixed inputs.
"""

from __future__ import annotations

import argparse
import os
import sys

from .algebra import (
    AlgebraOps,
    cohn_product,
    enumerate_basis,
    multiply,
    normalize,
    parse_expr,
    print_expr,
)
from .fields import QQ, PrimeField
from .fixtures import load_graph_ref, plan_text_ref
from .graphs import dot_export, finite_complete_subobject, print_graph
from .homs import verify_hom
from .lattice import (
    enumerate_admissible_pairs,
    is_c_cofinal,
    is_simple,
    lattice_dot,
)
from .monoid import Budget, check_star, monoid_eq, parse_element, presentation_of, refine
from .resolution import parse_plan, run_plan


def _field_for(char: int):
    if char == 0:
        return QQ
    return PrimeField(char)


def _budget_from(args) -> Budget:
    size = int(os.environ.get("SEPALG_MAX_SIZE", Budget.max_size))
    frontier = int(os.environ.get("SEPALG_MAX_FRONTIER", Budget.max_frontier))
    depth = int(os.environ.get("SEPALG_MAX_DEPTH", Budget.max_depth))
    spec = getattr(args, "budget", None)
    if spec:
        parts = spec.split(",")
        if len(parts) != 3:
            raise ValueError("budget must be SIZE,FRONTIER,DEPTH")
        size, frontier, depth = (int(p) for p in parts)
    return Budget(size, frontier, depth)


def _print_steps(label: str, steps) -> None:
    if steps:
        print(f"{label}:")
        for s in steps:
            print(f"  {s.describe()}")


# -- commands ------------------------------------------------------------------


def cmd_check(args) -> int:
    g = load_graph_ref(args.graph)
    if args.format == "dot":
        sys.stdout.write(dot_export(g))
    else:
        sys.stdout.write(print_graph(g))
    return 0


def cmd_normalize(args) -> int:
    g = load_graph_ref(args.graph)
    x = parse_expr(g, args.expr, _field_for(args.char))
    y = normalize(x, strategy=args.strategy, seed=args.seed)
    print(print_expr(y))
    return 0


def cmd_mul(args) -> int:
    g = load_graph_ref(args.graph)
    f = _field_for(args.char)
    a = parse_expr(g, args.a, f)
    b = parse_expr(g, args.b, f)
    if args.cohn:
        print(print_expr(cohn_product(a, b)))
    else:
        print(print_expr(multiply(a, b)))
    return 0


def cmd_basis(args) -> int:
    g = load_graph_ref(args.graph)
    for w in enumerate_basis(g, args.max_len):
        print(str(w))
    return 0


def cmd_mono_eq(args) -> int:
    g = load_graph_ref(args.graph)
    p = presentation_of(g)
    a = parse_element(args.a)
    b = parse_element(args.b)
    result = monoid_eq(p, a, b, _budget_from(args))
    print(f"verdict: {result.verdict}")
    print(f"reason: {result.reason}")
    if result.witness is not None:
        print(f"witness: {result.witness}")
    _print_steps("trace a", result.trace_a)
    _print_steps("trace b", result.trace_b)
    print(f"explored: {result.explored}")
    return 2 if result.is_unknown else 0


def cmd_star_check(args) -> int:
    g = load_graph_ref(args.graph)
    report = check_star(presentation_of(g))
    for pr in report.pairs:
        if pr.ok:
            print(f"{pr.vertex}: {pr.left} {pr.right} -> ok ({pr.example})")
        else:
            print(f"{pr.vertex}: {pr.left} {pr.right} -> fail")
    print(f"result: {'pass' if report.ok else 'fail'}")
    return 0


def cmd_refine(args) -> int:
    g = load_graph_ref(args.graph)
    p = presentation_of(g)
    result = refine(p,
                    parse_element(args.a1), parse_element(args.a2),
                    parse_element(args.b1), parse_element(args.b2),
                    _budget_from(args))
    print(f"verdict: {result.verdict}")
    print(f"reason: {result.reason}")
    if result.verdict != "refined":
        return 2
    print(f"meet: {result.meet}")
    m = result.matrix
    print(f"c11: {m.c11}")
    print(f"c12: {m.c12}")
    print(f"c21: {m.c21}")
    print(f"c22: {m.c22}")
    print("checks: " + " ".join(c.verdict for c in result.checks))
    if any(c.is_unknown for c in result.checks):
        return 2
    return 0


def cmd_lattice(args) -> int:
    g = load_graph_ref(args.graph)
    if args.format == "dot":
        sys.stdout.write(lattice_dot(g))
        return 0
    pairs = enumerate_admissible_pairs(g)
    print(f"pairs: {len(pairs)}")
    for pr in pairs:
        print(str(pr))
    return 0


def cmd_simple(args) -> int:
    g = load_graph_ref(args.graph)
    report = is_simple(g)
    print(f"verdict: {report.verdict}")
    print(f"reason: {report.reason}")
    if report.witness is not None:
        print(f"witness: {report.witness}")
    return 0


def cmd_cofinal(args) -> int:
    g = load_graph_ref(args.graph)
    report = is_c_cofinal(g, depth=args.depth)
    print(f"verdict: {report.verdict}")
    print(f"reason: {report.reason}")
    if report.witness_vertex is not None:
        print(f"witness: {report.witness_vertex}")
        print("reachable: " + " ".join(sorted(report.h)))
        print("trapped: " + " ".join(sorted(report.trapped)))
        print(f"prefix start: {report.prefix.start}")
        for path in report.prefix.paths:
            print("  path: " + (" ".join(path) if path else "(empty)"))
    return 0


def cmd_subobject(args) -> int:
    g = load_graph_ref(args.graph)
    items = [t.strip() for t in args.items.split(",") if t.strip()]
    sub, inclusion = finite_complete_subobject(g, items)
    sys.stdout.write(print_graph(sub))
    return 0


def cmd_resolve(args) -> int:
    plan = parse_plan(plan_text_ref(args.plan))
    stages = run_plan(plan, load_graph_ref)
    pick = args.stage if args.stage is not None else stages[-1].stage
    if pick < 0 or pick >= len(stages):
        raise ValueError(f"no stage {pick}; plan built {len(stages) - 1}")
    for sg in stages:
        g = sg.graph
        print(f"stage {sg.stage}: {len(g.vertices)} vertices, "
              f"{len(g.edges)} edges, {len(g.all_blocks())} blocks, "
              f"{len(sg.triples)} triples resolved")
    chosen = stages[pick].graph
    if args.format == "dot":
        sys.stdout.write(dot_export(chosen))
    else:
        sys.stdout.write(print_graph(chosen))
    return 0


def cmd_verify_hom(args) -> int:
    source = None
    target = None
    assignments: list[tuple[str, str]] = []
    text = open(args.file, encoding="utf-8").read() if args.file != "-" \
        else sys.stdin.read()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("source "):
            source = load_graph_ref(line[len("source "):].strip())
        elif line.startswith("target "):
            target = load_graph_ref(line[len("target "):].strip())
        elif ":=" in line:
            name, expr = line.split(":=", 1)
            assignments.append((name.strip(), expr.strip()))
        else:
            raise ValueError(f"line {lineno}: unrecognized statement")
    if source is None or target is None:
        raise ValueError("file must declare both source and target")
    f = _field_for(args.char)
    ops = AlgebraOps(target, f)
    images = {name: parse_expr(target, expr, f) for name, expr in assignments}
    report = verify_hom(source, images, ops)
    print(f"relations: {report.checked}")
    for name in report.failures:
        print(f"fail: {name}")
    print(f"result: {'pass' if report.ok else 'fail'}")
    return 0


# -- wiring --------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="sepalg",
        description="Exact computation with block-partitioned graphs: "
                    "normal forms, monoid decisions, lattice analysis, "
                    "and staged sink resolutions.")
    sub = top.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(fn=fn)
        return p

    p = add("check", cmd_check, "validate a graph and print its canonical form")
    p.add_argument("graph")
    p.add_argument("--format", choices=("text", "dot"), default="text")

    p = add("normalize", cmd_normalize, "rewrite an expression to normal form")
    p.add_argument("graph")
    p.add_argument("-e", "--expr", required=True)
    p.add_argument("--strategy", choices=("leftmost", "random"),
                   default="leftmost")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--char", type=int, default=0,
                   help="coefficient characteristic (0 for rationals)")

    p = add("mul", cmd_mul, "multiply two expressions and normalize")
    p.add_argument("graph")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--cohn", action="store_true",
                   help="use the recursive product (no full blocks allowed)")
    p.add_argument("--char", type=int, default=0)

    p = add("basis", cmd_basis, "list the normal words up to a length")
    p.add_argument("graph")
    p.add_argument("--max-len", type=int, required=True)

    p = add("mono-eq", cmd_mono_eq, "decide equality in the graph monoid")
    p.add_argument("graph")
    p.add_argument("-a", required=True)
    p.add_argument("-b", required=True)
    p.add_argument("--budget", help="SIZE,FRONTIER,DEPTH")

    p = add("star-check", cmd_star_check,
            "test every block pair for a common substituted image")
    p.add_argument("graph")

    p = add("refine", cmd_refine,
            "refine two decompositions of congruent sums")
    p.add_argument("graph")
    p.add_argument("-a1", required=True)
    p.add_argument("-a2", required=True)
    p.add_argument("-b1", required=True)
    p.add_argument("-b2", required=True)
    p.add_argument("--budget", help="SIZE,FRONTIER,DEPTH")

    p = add("lattice", cmd_lattice, "enumerate the admissible pair lattice")
    p.add_argument("graph")
    p.add_argument("--format", choices=("text", "dot"), default="text")

    p = add("simple", cmd_simple, "decide simplicity")
    p.add_argument("graph")

    p = add("cofinal", cmd_cofinal, "decide cofinality (all blocks full)")
    p.add_argument("graph")
    p.add_argument("--depth", type=int, default=6)

    p = add("subobject", cmd_subobject,
            "smallest complete subgraph containing the given items")
    p.add_argument("graph")
    p.add_argument("--items", required=True,
                   help="comma-separated vertex and edge names")

    p = add("resolve", cmd_resolve, "run a staged resolution plan")
    p.add_argument("plan", help="plan file path or fixture:NAME")
    p.add_argument("--stage", type=int, default=None,
                   help="print this stage's graph (default: last)")
    p.add_argument("--format", choices=("text", "dot"), default="text")

    p = add("verify-hom", cmd_verify_hom,
            "check generator images against the defining relations")
    p.add_argument("file", help="assignment file ('-' for stdin)")
    p.add_argument("--char", type=int, default=0)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
