"""Combinatorial ivy iteration and breadth-first exploration of the ivy graph.

A node is a tree-like generating set together with the wreath recursion in a
basis adapted to it. A pullback step picks a base element g (one with
iota(0, g) = 1), changes basis by h = sigma(0, g) and pushes the generating
set and vertex structure forward. Nodes are identified by the canonical form
of their generating set under simultaneous conjugation.
"""

from __future__ import annotations

import logging
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

from .biset import (
    ELetter,
    VertexWord,
    WreathRecursion,
    apply,
    basis_change,
    pushforward_gens,
    pushforward_vertex_structure,
)
from .errors import ConsistencyError, InputError
from .freegroup import Word, conjugate, format_signed_name, inverse
from .treestruct import (
    Key,
    TreeLikeGenSet,
    canonical_key,
    key_order,
    marked_count,
    name_generators,
    rekey_vertex_words,
    validate,
)

log = logging.getLogger(__name__)


@dataclass
class IvyNode:
    tree: TreeLikeGenSet
    recursion: WreathRecursion
    key: Key
    index: int = -1

    @property
    def gens(self) -> Mapping[str, Word]:
        return self.tree.gens

    @property
    def vertex_words(self) -> tuple[VertexWord, ...]:
        return self.tree.vertex_words

    def max_word_length(self) -> int:
        return max((len(w) for w in self.gens.values()), default=0)


@dataclass(frozen=True)
class ExploreConfig:
    max_nodes: int = 10000
    max_word_length: int = 64
    max_cycle_length: int = 8
    threads: int = 1

    def __post_init__(self):
        for name in ("max_nodes", "max_word_length", "max_cycle_length", "threads"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise InputError(f"{name} must be a positive integer, got {value!r}")


@dataclass
class IvyGraph:
    nodes: list[IvyNode] = field(default_factory=list)
    edges: set[tuple[Key, Key]] = field(default_factory=set)

    def index_of(self) -> dict[Key, int]:
        return {n.key: n.index for n in self.nodes}

    def adjacency(self) -> dict[int, list[int]]:
        idx = self.index_of()
        adj: dict[int, list[int]] = {n.index: [] for n in self.nodes}
        for s, t in self.edges:
            adj[idx[s]].append(idx[t])
        for succ in adj.values():
            succ.sort()
        return adj


@dataclass
class ExploreReport:
    node_count: int
    edge_count: int
    self_loops: list[int]
    cycles: list[tuple[int, ...]]
    periods: dict[int, list[int]]
    closure_complete: bool
    max_word_length_seen: int


def make_node(rec: WreathRecursion, tree: TreeLikeGenSet) -> IvyNode:
    if rec.group != tree.group:
        raise InputError("recursion and generating set use different bases")
    return IvyNode(tree, rec, canonical_key(tree))


def base_elements(node: IvyNode) -> list[tuple[ELetter, Word]]:
    """Signed generators g with iota(0, g) = 1, in generator order (+ before -)."""
    out = []
    for letter in node.tree.signed_letters():
        w = node.tree.value(letter)
        if apply(node.recursion, 0, w)[1] == 1:
            out.append((letter, w))
    if not out:
        raise InputError("no base element: no generator separates the critical values")
    return out


def pullback_step(node: IvyNode, g: Word) -> IvyNode:
    rec = node.recursion
    h, sheet = apply(rec, 0, g)
    if sheet != 1:
        raise InputError("not a base element: iota(0, g) != 1")
    new_rec = basis_change(rec, h)
    elements = node.tree.elements()
    pushed = pushforward_gens(new_rec, elements)
    lifted = pushforward_vertex_structure(new_rec, node.vertex_words, node.gens, pushed)
    gens = name_generators(pushed)
    try:
        words = rekey_vertex_words(lifted, gens)
    except InputError as exc:
        raise ConsistencyError(f"inconsistent biset data: {exc}") from None
    tree = TreeLikeGenSet(rec.group, gens, words)
    diag = validate(tree)
    if not diag:
        raise ConsistencyError(f"inconsistent biset data: {diag.message}")
    return IvyNode(tree, new_rec, canonical_key(tree))


def successors(node: IvyNode) -> list[IvyNode]:
    return [pullback_step(node, w) for _, w in base_elements(node)]


def conjugated(node: IvyNode, u: Word) -> IvyNode:
    """Same ivy object, represented by u E u^-1; the recursion is left unchanged."""
    gens = {n: conjugate(u, w) for n, w in node.gens.items()}
    tree = TreeLikeGenSet(node.tree.group, gens, node.vertex_words)
    return IvyNode(tree, node.recursion, node.key)


def explore(start: IvyNode, cfg: ExploreConfig | None = None) -> tuple[IvyGraph, ExploreReport]:
    """Breadth-first closure of `start` under pullback steps.

    Each level is expanded as a whole; new nodes of a level are numbered in
    canonical-key order, and the stored representative of a new node comes
    from its first parent (lowest index, then base-element order). The result
    therefore does not depend on ``cfg.threads``.
    """
    cfg = cfg or ExploreConfig()
    graph = IvyGraph()
    start = IvyNode(start.tree, start.recursion, start.key, 0)
    graph.nodes.append(start)
    known = {start.key}
    complete = start.max_word_length() <= cfg.max_word_length
    level = [start] if complete else []
    if len(graph.nodes) > cfg.max_nodes:
        complete, level = False, []

    pool = ThreadPoolExecutor(cfg.threads) if cfg.threads > 1 else None
    try:
        while level:
            if pool is None:
                expanded = [successors(n) for n in level]
            else:
                expanded = list(pool.map(successors, level))
            fresh: dict[Key, IvyNode] = {}
            for parent, succ in zip(level, expanded):
                for child in succ:
                    if child.max_word_length() > cfg.max_word_length:
                        complete = False
                        continue
                    graph.edges.add((parent.key, child.key))
                    if child.key not in known and child.key not in fresh:
                        fresh[child.key] = child
            new_keys = sorted(fresh, key=key_order)
            room = cfg.max_nodes - len(graph.nodes)
            if len(new_keys) > room:
                complete = False
                dropped = set(new_keys[room:])
                new_keys = new_keys[:room]
                graph.edges = {e for e in graph.edges if e[1] not in dropped}
            level = []
            for key in new_keys:
                node = fresh[key]
                node.index = len(graph.nodes)
                graph.nodes.append(node)
                known.add(key)
                level.append(node)
            log.debug("level done: %d nodes, %d edges", len(graph.nodes), len(graph.edges))
            if not complete:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    report = analyze(graph, cfg)
    report.closure_complete = complete
    return graph, report


def simple_cycles(adj: Mapping[int, list[int]], max_length: int) -> list[tuple[int, ...]]:
    """Simple directed cycles of length <= max_length, each listed once.

    A cycle is reported starting from its smallest node; the search from s
    only visits nodes with index above s.
    """
    cycles = []
    for s in sorted(adj):
        if s in adj[s]:
            cycles.append((s,))
        path = [s]
        on_path = {s}
        stack = [iter(adj[s])]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop())
                continue
            if nxt == s and len(path) > 1:
                cycles.append(tuple(path))
            elif nxt > s and nxt not in on_path and len(path) < max_length:
                path.append(nxt)
                on_path.add(nxt)
                stack.append(iter(adj[nxt]))
    cycles.sort(key=lambda c: (len(c), c))
    return cycles


def analyze(graph: IvyGraph, cfg: ExploreConfig | None = None) -> ExploreReport:
    cfg = cfg or ExploreConfig()
    adj = graph.adjacency()
    cycles = simple_cycles(adj, cfg.max_cycle_length)
    periods: dict[int, set[int]] = {n.index: set() for n in graph.nodes}
    for c in cycles:
        for v in c:
            periods[v].add(len(c))
    return ExploreReport(
        node_count=len(graph.nodes),
        edge_count=len(graph.edges),
        self_loops=[c[0] for c in cycles if len(c) == 1],
        cycles=cycles,
        periods={i: sorted(p) for i, p in periods.items()},
        closure_complete=True,
        max_word_length_seen=max((n.max_word_length() for n in graph.nodes), default=0),
    )


def check_node(node: IvyNode) -> None:
    """Raise ConsistencyError unless the node satisfies the structural invariants."""
    diag = validate(node.tree)
    if not diag:
        raise ConsistencyError(diag.message)
    elements = node.tree.elements()
    if any(inverse(w) not in elements for w in elements):
        raise ConsistencyError("generating set is not symmetric")
    if marked_count(node.tree) != node.tree.group.rank + 1:
        raise ConsistencyError("peripheral products do not match the rank")


def _words(node: IvyNode) -> dict[str, Any]:
    group = node.tree.group
    return {
        "generators": {n: group.format(w) for n, w in node.gens.items()},
        "vertex_words": [[format_signed_name(*x) for x in v] for v in node.vertex_words],
        "key": [group.format(w) for w in node.key],
    }


def report_document(graph: IvyGraph, report: ExploreReport) -> dict[str, Any]:
    adj = graph.adjacency()
    nodes = []
    for n in graph.nodes:
        entry: dict[str, Any] = {"index": n.index}
        entry.update(_words(n))
        entry["successors"] = adj[n.index]
        entry["periods"] = report.periods.get(n.index, [])
        nodes.append(entry)
    return {
        "format": "ivy-report/1",
        "node_count": report.node_count,
        "edge_count": report.edge_count,
        "closure_complete": report.closure_complete,
        "max_word_length_seen": report.max_word_length_seen,
        "self_loops": report.self_loops,
        "cycles": [list(c) for c in report.cycles],
        "edges": sorted([i, j] for i, succ in adj.items() for j in succ),
        "nodes": nodes,
    }


def to_dot(graph: IvyGraph, report: ExploreReport) -> str:
    idx = graph.index_of()
    loops = set(report.self_loops)
    lines = ["digraph ivy {"]
    for n in graph.nodes:
        attrs = ' [invariant=true, shape=doublecircle]' if n.index in loops else ""
        lines.append(f"  n{n.index}{attrs};")
    for s, t in sorted(graph.edges, key=lambda e: (key_order(e[0]), key_order(e[1]))):
        lines.append(f"  n{idx[s]} -> n{idx[t]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def node_document(node: IvyNode) -> dict[str, Any]:
    doc = _words(node)
    group = node.tree.group
    doc["recursion"] = {
        name: {str(a): [group.format(node.recursion.table[(a, i)][0]), node.recursion.table[(a, i)][1]]
               for a in (0, 1)}
        for i, name in enumerate(group.names, start=1)
    }
    return doc
