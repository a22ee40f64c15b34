"""Command-line driver: ``ivy compile | explore | step | canon``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any

from .compiler import compile_treemap
from .documents import BISET_FORMAT, TREEMAP_FORMAT, biset_document, dumps, load_json, parse_biset
from .errors import ConsistencyError, InputError
from .freegroup import canonical_form, parse_signed_name
from .ivyengine import (
    ExploreConfig,
    IvyNode,
    base_elements,
    explore,
    make_node,
    node_document,
    pullback_step,
    report_document,
    to_dot,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3

log = logging.getLogger("ivytree")


def _positive(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{value} is not positive")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ivy", description="Spanning trees of quadratic Thurston maps")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="compile a tree-map document into a biset document")
    p.add_argument("input")
    p.add_argument("-o", "--output")

    p = sub.add_parser("explore", help="explore the ivy graph from a biset or tree-map document")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--max-nodes", type=_positive, default=10000)
    p.add_argument("--max-word-len", type=_positive, default=64)
    p.add_argument("--max-cycle-len", type=_positive, default=8)
    p.add_argument("--format", choices=("json", "dot"), default="json")
    p.add_argument("--threads", type=_positive, default=1)

    p = sub.add_parser("step", help="apply one pullback step with a named base element")
    p.add_argument("input")
    p.add_argument("--base", required=True, help="generator name, optionally with ^-1")
    p.add_argument("-o", "--output")

    p = sub.add_parser("canon", help="print the canonical key of the generating set")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    return parser


def load_start(path: str) -> IvyNode:
    """Start node from a biset document, compiling tree-map documents on the fly."""
    doc = load_json(path)
    if isinstance(doc, dict) and doc.get("format") == TREEMAP_FORMAT:
        c = compile_treemap(doc)
        return make_node(c.recursion, c.tree)
    if isinstance(doc, dict) and doc.get("format", BISET_FORMAT) != BISET_FORMAT:
        raise InputError(f"field `format`: unsupported {doc['format']!r}")
    return make_node(*parse_biset(doc))


def _write(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def cmd_compile(args: argparse.Namespace) -> int:
    c = compile_treemap(load_json(args.input))
    doc = biset_document(c.recursion, c.tree, {"compiled": c.summary()})
    _write(dumps(doc), args.output)
    return EXIT_OK


def cmd_explore(args: argparse.Namespace) -> int:
    cfg = ExploreConfig(args.max_nodes, args.max_word_len, args.max_cycle_len, args.threads)
    start = load_start(args.input)
    graph, report = explore(start, cfg)
    if args.format == "dot":
        _write(to_dot(graph, report), args.output)
    else:
        _write(dumps(report_document(graph, report)), args.output)
    status = "closed" if report.closure_complete else "budget exceeded"
    print(
        f"{report.node_count} nodes, {report.edge_count} edges, "
        f"{len(report.self_loops)} self-loops, {status}",
        file=sys.stderr,
    )
    return EXIT_OK if report.closure_complete else EXIT_BUDGET


def cmd_step(args: argparse.Namespace) -> int:
    node = load_start(args.input)
    name, sign = parse_signed_name(args.base)
    if name not in node.gens:
        raise InputError(f"--base: unknown generator {name!r}")
    bases = dict(base_elements(node))
    if (name, sign) not in bases:
        raise InputError(f"--base: {args.base} is not a base element (iota(0, g) != 1)")
    succ = pullback_step(node, bases[(name, sign)])
    _write(dumps(node_document(succ)), args.output)
    return EXIT_OK


def cmd_canon(args: argparse.Namespace) -> int:
    node = load_start(args.input)
    group = node.tree.group
    _, witness = canonical_form(node.tree.elements())
    doc: dict[str, Any] = {
        "key": [group.format(w) for w in node.key],
        "witness": group.format(witness),
    }
    _write(dumps(doc), args.output)
    return EXIT_OK


COMMANDS = {"compile": cmd_compile, "explore": cmd_explore, "step": cmd_step, "canon": cmd_canon}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (InputError, ConsistencyError) as exc:
        print(f"ivy: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"ivy: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except json.JSONDecodeError as exc:  # pragma: no cover - load_json converts these
        print(f"ivy: error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
