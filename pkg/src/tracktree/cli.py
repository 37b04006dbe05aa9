"""Command-line surface: check, tree, oracle, demo, random.

Exit codes: 0 all checks pass, 2 a property check failed, 3 a
certification failed, 4 input error.  Reports printed by ``check`` are
byte-identical across runs for the same input.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

from .errors import IoError, ParseError, TooLarge, TrackTreeError
from .instances import Expectations, InstanceSpec, corpus, load_instance
from .oracles import (
    labeling_matches_canonical,
    oracle_labelings,
    oracle_orientations,
    random_nested_family,
    tree_matches_oracle,
)
from .patterns import assign_labels
from .pipeline import run_instance
from .reports import dot_document, report_document, write_atomic


def _emit(text: str, out: Optional[str]):
    if out:
        write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _cmd_check(args) -> int:
    def one(path: str) -> tuple[str, int]:
        spec = load_instance(path)
        result = run_instance(spec, radius=args.radius, margin=args.margin)
        return report_document(result.report, include_timings=args.timings), result.report.exit_code()

    if len(args.spec) == 1:
        doc, code = one(args.spec[0])
        _emit(doc, args.out)
        return code
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        outputs = list(pool.map(one, args.spec))
    _emit("".join(doc for doc, _ in outputs), args.out)
    return max(code for _, code in outputs)


def _cmd_tree(args) -> int:
    spec = load_instance(args.spec)
    result = run_instance(spec, radius=args.radius, margin=args.margin)
    if args.format == "report":
        _emit(report_document(result.report, include_timings=args.timings), args.out)
        return result.report.exit_code()
    if result.tree is None:
        sys.stderr.write("no tree was built: " + result.report.status + "\n")
        sys.stderr.write(report_document(result.report))
        return result.report.exit_code() or 2
    _emit(dot_document(result.tree, spec.name), args.out)
    return result.report.exit_code()


def _cmd_oracle(args) -> int:
    spec = load_instance(args.spec)
    result = run_instance(spec, radius=args.radius, margin=args.margin)
    doc: dict = {"instance": spec.name, "status": result.report.status}
    code = result.report.exit_code()
    if result.tree is not None and result.system is not None:
        system, tree = result.system, result.tree
        oracle = oracle_orientations(system)
        doc["orientations_match"] = tree_matches_oracle(tree, oracle)
        doc["oracle_vertices"] = len(oracle.vertex_flips)
        try:
            lab = oracle_labelings(system)
            canonical = assign_labels(system)
            canon = tuple(canonical[e] for e in lab.edges)
            doc["labelings"] = lab.count
            doc["labelings_expected"] = lab.expected_count
            doc["canonical_is_valid"] = canon in lab.labelings
            doc["all_within_class"] = all(
                labeling_matches_canonical(system, canonical, L, lab.edges)
                for L in lab.labelings)
            if not (doc["orientations_match"] and doc["canonical_is_valid"]
                    and doc["all_within_class"]
                    and lab.count == lab.expected_count):
                code = max(code, 2)
        except TooLarge as exc:
            doc["labelings_skipped"] = str(exc)
        if not doc["orientations_match"]:
            code = max(code, 2)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return code


def _cmd_demo(args) -> int:
    instances = corpus()
    if args.name not in instances:
        sys.stderr.write(f"unknown demo instance {args.name!r}; choose from {sorted(instances)}\n")
        return 4
    result = run_instance(instances[args.name], radius=args.radius, margin=args.margin)
    text = report_document(result.report, include_timings=args.timings)
    if result.tree is not None:
        text += dot_document(result.tree, args.name)
    _emit(text, args.out)
    return result.report.exit_code()


def _cmd_random(args) -> int:
    family, info = random_nested_family(args.seed, exact_classes=args.classes)
    spec = InstanceSpec(
        name=f"random-{args.seed}", mode="explicit",
        universe=tuple(family.universe),
        explicit_vertices=tuple((v.name, tuple(sorted(v.members))) for v in family.vertices),
        expectations=Expectations(
            nested=True, tree_vertices=info.tree_vertex_count,
            tree_edges=info.tree_edge_count,
            class_sizes=tuple(sorted(info.class_sizes))),
    ).validate()
    result = run_instance(spec)
    _emit(report_document(result.report, include_timings=args.timings), args.out)
    return result.report.exit_code()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tracktree",
        description="Build and verify coset-labelled track systems and their dual trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out=True):
        p.add_argument("--radius", type=int, default=None, help="override the window radius")
        p.add_argument("--margin", type=int, default=None, help="override the window margin")
        p.add_argument("--timings", action="store_true", help="include wall-clock timings")
        if out:
            p.add_argument("--out", default=None, help="write the document to a file")

    p = sub.add_parser("check", help="run every check on instance files")
    p.add_argument("spec", nargs="+", help="instance file(s)")
    p.add_argument("--jobs", type=int, default=1, help="run multiple instances concurrently")
    common(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("tree", help="emit the dual tree of an instance")
    p.add_argument("spec", help="instance file")
    p.add_argument("--format", choices=("dot", "report"), default="dot")
    common(p)
    p.set_defaults(func=_cmd_tree)

    p = sub.add_parser("oracle", help="compare construction against brute-force oracles")
    p.add_argument("spec", help="instance file")
    common(p)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("demo", help="run a built-in instance (E1..E4)")
    p.add_argument("name", help="E1, E2, E3 or E4")
    common(p)
    p.set_defaults(func=_cmd_demo)

    p = sub.add_parser("random", help="check a random nested family")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--classes", type=int, default=None, help="force the number of parallel classes")
    common(p)
    p.set_defaults(func=_cmd_random)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return 4
    except IoError as exc:
        sys.stderr.write(f"io error: {exc}\n")
        return 4
    except TrackTreeError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4


if __name__ == "__main__":
    sys.exit(main())
