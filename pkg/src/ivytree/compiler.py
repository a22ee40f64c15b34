"""Compile a ribbon tree with dynamics into a wreath recursion.

Input is an ``ivy-treemap/1`` document describing an invariant spanning tree
with its ribbon structure, pseudoaccesses, critical splits and the images of
its edges. The pipeline is:

1. walk the boundary circuit and split it at the two post-critical
   pseudoaccesses into the segments S0 and S1, giving edge signatures;
2. propagate sheet labels from the in-tree pullback of the base edge across
   the critical splits;
3. fill the automaton table over the edge generators;
4. eliminate the parent-edge generator of every unmarked branch vertex to get
   a recursion over a free basis.

Unmarked degree-2 vertices are subdivision points at critical points. Their
chains of pieces form one tree edge, named after the first piece in input
order; edge images are written in terms of those tree edges.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

from .biset import SHEETS, ELetter, VertexWord, WreathRecursion, apply
from .documents import TREEMAP_FORMAT, check_format
from .errors import ConsistencyError, InputError
from .freegroup import (
    IDENTITY,
    NAME_RE,
    FreeGroup,
    Word,
    format_signed_name,
    inverse,
    multiply,
    parse_signed_name,
)
from .treestruct import TreeLikeGenSet, validate

SignedEdge = tuple[str, int]


def _rev(e: SignedEdge) -> SignedEdge:
    return e[0], -e[1]


def _fmt(e: SignedEdge) -> str:
    return format_signed_name(*e)


@dataclass(frozen=True)
class VertexInfo:
    name: str
    marked: bool
    critical_point: bool
    critical_value: int | None


@dataclass
class RibbonTreeMap:
    vertices: dict[str, VertexInfo]
    edges: dict[str, tuple[str, str]]
    ribbon: dict[str, list[SignedEdge]]
    pseudoaccess: dict[str, int]
    critical_splits: dict[str, tuple[int, int]]
    labels: dict[str, int] | None
    base_edge: str
    vertex_map: dict[str, str]
    edge_map: dict[SignedEdge, list[SignedEdge]]
    # derived: subdivision chains
    chain_of: dict[SignedEdge, SignedEdge] = field(default_factory=dict)
    chain_ends: dict[str, tuple[str, str]] = field(default_factory=dict)

    def tail(self, e: SignedEdge) -> str:
        u, v = self.edges[e[0]]
        return u if e[1] > 0 else v

    def head(self, e: SignedEdge) -> str:
        u, v = self.edges[e[0]]
        return v if e[1] > 0 else u

    def chain_tail(self, e: SignedEdge) -> str:
        u, v = self.chain_ends[e[0]]
        return u if e[1] > 0 else v

    def chain_head(self, e: SignedEdge) -> str:
        return self.chain_tail(_rev(e))

    def is_subdivision(self, v: str) -> bool:
        return not self.vertices[v].marked and len(self.ribbon[v]) == 2

    def tree_vertices(self) -> list[str]:
        return [v for v in self.vertices if not self.is_subdivision(v)]

    def tree_edges(self) -> list[str]:
        return list(self.chain_ends)

    def tree_ribbon(self, v: str) -> list[SignedEdge]:
        return [self.chain_of[e] for e in self.ribbon[v]]

    def critical_value(self, index: int) -> str:
        for v in self.vertices.values():
            if v.critical_value == index:
                return v.name
        raise InputError(f"no vertex has critical_value {index}")


# --------------------------------------------------------------------------
# parsing


def _field(doc: Mapping[str, Any], name: str, kind, where: str = ""):
    path = f"{where}.{name}" if where else name
    if name not in doc:
        raise InputError(f"missing field `{path}`")
    value = doc[name]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise InputError(f"field `{path}` has the wrong type")
    return value


def _signed(token: Any, edges: Mapping[str, Any], where: str) -> SignedEdge:
    if not isinstance(token, str):
        raise InputError(f"field `{where}` must hold signed edge names")
    name, sign = parse_signed_name(token)
    if name not in edges:
        raise InputError(f"field `{where}` names unknown edge {name!r}")
    return name, sign


def _vertex_ref(name: Any, vertices: Mapping[str, Any], where: str) -> str:
    if name not in vertices:
        raise InputError(f"field `{where}` names unknown vertex {name!r}")
    return name


def parse_treemap(doc: Any) -> RibbonTreeMap:
    """Parse and validate an ``ivy-treemap/1`` document."""
    check_format(doc, TREEMAP_FORMAT)

    vertices: dict[str, VertexInfo] = {}
    for i, rec in enumerate(_field(doc, "vertices", list)):
        where = f"vertices[{i}]"
        if not isinstance(rec, dict):
            raise InputError(f"field `{where}` must be an object")
        name = _field(rec, "name", str, where)
        if name in vertices:
            raise InputError(f"duplicate vertex name {name!r}")
        cv = rec.get("critical_value")
        if cv not in (None, 1, 2) or isinstance(cv, bool):
            raise InputError(f"field `{where}.critical_value` must be null, 1 or 2")
        vertices[name] = VertexInfo(
            name, bool(rec.get("marked", False)), bool(rec.get("critical_point", False)), cv
        )

    edges: dict[str, tuple[str, str]] = {}
    for i, rec in enumerate(_field(doc, "edges", list)):
        where = f"edges[{i}]"
        if not isinstance(rec, dict):
            raise InputError(f"field `{where}` must be an object")
        name = _field(rec, "name", str, where)
        if not NAME_RE.match(name) or name in edges:
            raise InputError(f"field `{where}.name`: invalid or duplicate edge name {name!r}")
        u = _vertex_ref(_field(rec, "from", str, where), vertices, f"{where}.from")
        v = _vertex_ref(_field(rec, "to", str, where), vertices, f"{where}.to")
        if u == v:
            raise InputError(f"field `{where}`: edge {name} is a loop")
        edges[name] = (u, v)
    if not edges:
        raise InputError("field `edges` is empty")

    raw = _field(doc, "ribbon", dict)
    ribbon: dict[str, list[SignedEdge]] = {}
    for v in vertices:
        if v not in raw or not isinstance(raw[v], list):
            raise InputError(f"field `ribbon.{v}` is missing or not a list")
        ribbon[v] = [_signed(tok, edges, f"ribbon.{v}") for tok in raw[v]]
    for v in raw:
        _vertex_ref(v, vertices, "ribbon")
    for name, (u, v) in edges.items():
        for vert, e in ((u, (name, 1)), (v, (name, -1))):
            if ribbon[vert].count(e) != 1:
                raise InputError(f"field `ribbon.{vert}` must list {_fmt(e)} exactly once")
    for v, lst in ribbon.items():
        for e in lst:
            u = edges[e[0]][0] if e[1] > 0 else edges[e[0]][1]
            if u != v:
                raise InputError(f"field `ribbon.{v}` lists {_fmt(e)}, which does not start at {v}")

    pseudo = {}
    for v, p in doc.get("pseudoaccess", {}).items():
        _vertex_ref(v, vertices, "pseudoaccess")
        if not isinstance(p, int) or isinstance(p, bool) or not 0 <= p < len(ribbon[v]):
            raise InputError(f"field `pseudoaccess.{v}` is out of range")
        pseudo[v] = p

    splits = {}
    for v, pair in doc.get("critical_splits", {}).items():
        _vertex_ref(v, vertices, "critical_splits")
        d = len(ribbon[v])
        if (
            not isinstance(pair, list)
            or len(pair) != 2
            or not all(isinstance(k, int) and not isinstance(k, bool) and 0 <= k < d for k in pair)
            or pair[0] == pair[1]
        ):
            raise InputError(f"field `critical_splits.{v}` must be two distinct gap indices")
        if not vertices[v].critical_point:
            raise InputError(f"field `critical_splits.{v}`: {v} is not a critical point")
        splits[v] = (pair[0], pair[1])

    labels = None
    if doc.get("labels") is not None:
        labels = {}
        raw_labels = _field(doc, "labels", dict)
        for name, value in raw_labels.items():
            if name not in edges:
                raise InputError(f"field `labels` names unknown edge {name!r}")
            if value not in (0, 1) or isinstance(value, bool):
                raise InputError(f"field `labels.{name}` must be 0 or 1")
            labels[name] = value
        missing = [n for n in edges if n not in labels]
        if missing:
            raise InputError(f"field `labels` lacks edges {missing}")

    base = _field(doc, "base_edge", str)

    vmap = {}
    raw_vmap = _field(doc, "vertex_map", dict)
    for v in vertices:
        if v not in raw_vmap:
            raise InputError(f"field `vertex_map.{v}` is missing")
        vmap[v] = _vertex_ref(raw_vmap[v], vertices, f"vertex_map.{v}")

    raw_emap = _field(doc, "edge_map", dict)
    emap: dict[SignedEdge, list[SignedEdge]] = {}
    for key, path in raw_emap.items():
        e = _signed(key, edges, "edge_map")
        if not isinstance(path, list) or not path:
            raise InputError(f"field `edge_map.{key}` must be a nonempty list")
        img = [_signed(tok, edges, f"edge_map.{key}") for tok in path]
        for f, g in ((e, img), (_rev(e), [_rev(x) for x in reversed(img)])):
            if f in emap and emap[f] != g:
                raise InputError(f"field `edge_map.{key}` contradicts its reverse")
            emap[f] = g
    for name in edges:
        if (name, 1) not in emap:
            raise InputError(f"field `edge_map` lacks edge {name}")

    t = RibbonTreeMap(vertices, edges, ribbon, pseudo, splits, labels, base, vmap, emap)
    _check_structure(t)
    return t


def _check_structure(t: RibbonTreeMap) -> None:
    # connected with #E = #V - 1
    if len(t.edges) != len(t.vertices) - 1:
        raise InputError("the underlying graph is not a tree (edge count)")
    start = next(iter(t.vertices))
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for e in t.ribbon[u]:
            w = t.head(e)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != len(t.vertices):
        raise InputError("the underlying graph is not connected")

    for v, info in t.vertices.items():
        d = len(t.ribbon[v])
        if d == 1 and not info.marked:
            raise InputError(f"vertex {v}: degree-1 vertices must be marked")
        if d == 2 and not info.marked and not info.critical_point:
            raise InputError(f"vertex {v}: unmarked degree-2 vertex that is not a critical point")
        if info.critical_value is not None and not info.marked:
            raise InputError(f"vertex {v}: critical values must be marked")
        if info.critical_point and d >= 2 and v not in t.critical_splits:
            raise InputError(f"field `critical_splits.{v}` is missing for critical point {v}")
    cvs = sorted(v.critical_value for v in t.vertices.values() if v.critical_value is not None)
    if cvs != [1, 2]:
        raise InputError("exactly one vertex must carry critical_value 1 and one critical_value 2")
    crit_values = {t.critical_value(1), t.critical_value(2)}
    for v, info in t.vertices.items():
        if info.critical_point and t.vertex_map[v] not in crit_values:
            raise InputError(f"vertex_map: critical point {v} does not map to a critical value")
    for k in (1, 2):
        v = t.critical_value(k)
        if v not in t.pseudoaccess:
            if len(t.ribbon[v]) != 1:
                raise InputError(f"field `pseudoaccess.{v}` is required at critical value {v}")

    _build_chains(t)

    if t.base_edge not in t.chain_ends:
        raise InputError(f"field `base_edge` names {t.base_edge!r}, which is not a tree edge")
    path = _tree_path(t, t.critical_value(1), t.critical_value(2))
    if t.base_edge not in {e[0] for e in path}:
        raise InputError("field `base_edge` does not separate the critical values")

    for e, img in t.edge_map.items():
        if e[1] < 0:
            continue
        where = f"edge_map.{e[0]}"
        for x in img:
            if x[0] not in t.chain_ends:
                raise InputError(f"field `{where}` uses {x[0]}, which is not a tree edge")
        if t.chain_tail(img[0]) != t.vertex_map[t.tail(e)]:
            raise InputError(f"field `{where}` does not start at the image of {t.tail(e)}")
        if t.chain_head(img[-1]) != t.vertex_map[t.head(e)]:
            raise InputError(f"field `{where}` does not end at the image of {t.head(e)}")
        for x, y in zip(img, img[1:]):
            if t.chain_head(x) != t.chain_tail(y):
                raise InputError(f"field `{where}` is not a connected path")


def _build_chains(t: RibbonTreeMap) -> None:
    """Group pieces through subdivision vertices into tree edges."""

    def through(e: SignedEdge) -> SignedEdge | None:
        v = t.head(e)
        if not t.is_subdivision(v):
            return None
        a, b = t.ribbon[v]
        return b if a == _rev(e) else a

    for name in t.edges:
        if (name, 1) in t.chain_of:
            continue
        forward = [(name, 1)]
        while (nxt := through(forward[-1])) is not None:
            forward.append(nxt)
        backward = [(name, -1)]
        while (nxt := through(backward[-1])) is not None:
            backward.append(nxt)
        for piece in forward + [_rev(x) for x in backward[1:]]:
            t.chain_of[piece] = (name, 1)
            t.chain_of[_rev(piece)] = (name, -1)
        t.chain_ends[name] = (t.head(backward[-1]), t.head(forward[-1]))


def _tree_path(t: RibbonTreeMap, a: str, b: str) -> list[SignedEdge]:
    prev: dict[str, SignedEdge | None] = {a: None}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for e in t.ribbon[u]:
            w = t.head(e)
            if w not in prev:
                prev[w] = e
                queue.append(w)
    path = []
    while prev[b] is not None:
        e = prev[b]
        path.append(t.chain_of[e])
        b = t.tail(e)
    return path[::-1]


# --------------------------------------------------------------------------
# boundary circuit, signatures, labels


def boundary_circuit(t: RibbonTreeMap) -> list[SignedEdge]:
    """Clockwise walk around the tree, starting at the first stored outgoing edge."""
    first_vertex = next(iter(t.vertices))
    start = t.ribbon[first_vertex][0]
    circuit = [start]
    e = start
    while True:
        at = t.ribbon[t.head(e)]
        e = at[(at.index(_rev(e)) - 1) % len(at)]
        if e == start:
            break
        circuit.append(e)
    if len(circuit) != 2 * len(t.edges):
        raise ConsistencyError("boundary circuit does not cover every oriented edge")
    return circuit


def _split_position(t: RibbonTreeMap, circuit: list[SignedEdge], v: str) -> int:
    ccw = t.ribbon[v]
    p = t.pseudoaccess.get(v, 0)
    # the walk crosses gap p right after arriving along the reverse of ccw[p]
    return (circuit.index(_rev(ccw[p])) + 1) % len(circuit)


def segments(t: RibbonTreeMap) -> tuple[list[SignedEdge], list[SignedEdge]]:
    circuit = boundary_circuit(t)
    n = len(circuit)
    i1 = _split_position(t, circuit, t.critical_value(1))
    i2 = _split_position(t, circuit, t.critical_value(2))
    if i1 == i2:
        raise InputError("the two post-critical pseudoaccesses coincide")
    s0 = [circuit[(i1 + k) % n] for k in range((i2 - i1) % n)]
    s1 = [circuit[(i2 + k) % n] for k in range((i1 - i2) % n)]
    return s0, s1


def signatures(t: RibbonTreeMap) -> dict[SignedEdge, tuple[int, int]]:
    """(i, j) for each oriented piece e, where e lies in S^i and e^-1 in S^j."""
    s0, s1 = segments(t)
    seg = {e: 0 for e in s0}
    seg.update({e: 1 for e in s1})
    sig = {}
    for name in t.edges:
        for s in (1, -1):
            e = (name, s)
            sig[e] = (seg[e], seg[_rev(e)])
    for piece, chain in t.chain_of.items():
        if sig[piece] != sig[chain]:
            raise InputError(f"piece {_fmt(piece)} and its tree edge have different signatures")
    return sig


def _arcs(t: RibbonTreeMap, v: str) -> list[int]:
    """Arc index (0 or 1) of each outgoing edge at v; a single arc away from splits."""
    d = len(t.ribbon[v])
    if v not in t.critical_splits:
        return [0] * d
    g1, g2 = t.critical_splits[v]
    return [0 if (k - g1) % d < (g2 - g1) % d else 1 for k in range(d)]


def base_pullbacks(t: RibbonTreeMap) -> list[str]:
    """Edges whose image path runs over the base edge, in either direction."""
    return [
        name for name in t.edges if any(x[0] == t.base_edge for x in t.edge_map[(name, 1)])
    ]


def propagate_labels(t: RibbonTreeMap) -> dict[str, int]:
    """Sheet labels: 0 on the in-tree pullback of the base edge, flipping across splits."""
    seeds = base_pullbacks(t)
    if len(seeds) > 1:
        raise InputError(f"several edges map over the base edge: {seeds}")
    if not seeds:
        if t.labels is None:
            raise InputError(
                "no edge maps over the base edge; field `labels` must be supplied"
            )
        _check_labels(t, t.labels)
        return dict(t.labels)

    labels = {seeds[0]: 0}
    queue = deque([seeds[0]])
    while queue:
        name = queue.popleft()
        for v in t.edges[name]:
            ccw = t.ribbon[v]
            arcs = _arcs(t, v)
            k0 = next(k for k, e in enumerate(ccw) if e[0] == name)
            for k, e in enumerate(ccw):
                value = labels[name] ^ arcs[k] ^ arcs[k0]
                if e[0] not in labels:
                    labels[e[0]] = value
                    queue.append(e[0])
                elif labels[e[0]] != value:
                    raise InputError(f"label propagation conflict at vertex {v}")
    labels = {n: labels[n] for n in t.edges}
    if t.labels is not None and t.labels != labels:
        bad = [n for n in t.edges if t.labels[n] != labels[n]]
        raise InputError(f"supplied labels disagree with propagation on edges {bad}")
    return labels


def _check_labels(t: RibbonTreeMap, labels: Mapping[str, int]) -> None:
    for v in t.vertices:
        ccw = t.ribbon[v]
        arcs = _arcs(t, v)
        ref = labels[ccw[0][0]] ^ arcs[0]
        for k, e in enumerate(ccw):
            if labels[e[0]] ^ arcs[k] != ref:
                raise InputError(f"supplied labels violate the split rule at vertex {v}")


# --------------------------------------------------------------------------
# table


def generator_name(edge: str) -> str:
    return edge.lower()


def _letter(e: SignedEdge) -> ELetter:
    return generator_name(e[0]), e[1]


@dataclass
class CompiledTable:
    """Automaton over the edge generators E_T.

    ``table[(sheet, letter)] = (letter or None, target sheet)``; None is the identity.
    """

    generators: list[str]
    vertex_words: tuple[VertexWord, ...]
    table: dict[tuple[int, ELetter], tuple[ELetter | None, int]]


def vertex_words(t: RibbonTreeMap) -> tuple[VertexWord, ...]:
    """Clockwise words of outgoing edge generators, starting after the pseudoaccess."""
    out = []
    for v in t.tree_vertices():
        ccw = t.tree_ribbon(v)
        d = len(ccw)
        p = t.pseudoaccess.get(v, 0)
        out.append(tuple(_letter(ccw[(p - 1 - k) % d]) for k in range(d)))
    return tuple(out)


def emit_table(
    t: RibbonTreeMap, sig: Mapping[SignedEdge, tuple[int, int]], labels: Mapping[str, int]
) -> CompiledTable:
    gens = [generator_name(n) for n in t.tree_edges()]
    if len(set(gens)) != len(gens):
        raise InputError("edge names must stay distinct after lowercasing")
    table: dict[tuple[int, ELetter], tuple[ELetter | None, int]] = {}
    for name in t.tree_edges():
        for s in (1, -1):
            e = (name, s)
            i, j = sig[e]
            for eps in SHEETS:
                delta = (eps + i) % 2
                target = (j + delta) % 2
                candidates = []
                for piece in t.edges:
                    if labels[piece] != delta:
                        continue
                    img = t.edge_map[(piece, 1)]
                    candidates += [(piece, 1)] * img.count(e)
                    candidates += [(piece, -1)] * img.count(_rev(e))
                if len(candidates) > 1:
                    names = ", ".join(_fmt(c) for c in candidates)
                    raise InputError(
                        f"edges {names} with label {delta} all map over {_fmt(e)}; inconsistent dynamics"
                    )
                star = _letter(t.chain_of[candidates[0]]) if candidates else None
                table[(eps, _letter(e))] = (star, target)

    for (eps, x), (y, b) in table.items():
        inv_y = None if y is None else (y[0], -y[1])
        if table[(b, (x[0], -x[1]))] != (inv_y, eps):
            raise InputError(f"table entries for {format_signed_name(*x)} are not inverse-consistent")
    return CompiledTable(gens, vertex_words(t), table)


# --------------------------------------------------------------------------
# free basis


def eliminated_generators(t: RibbonTreeMap) -> list[tuple[str, str]]:
    """(branch vertex, parent-edge generator) pairs, deepest vertex first."""
    order = t.tree_vertices()
    root = next((v for v in order if t.vertices[v].marked), None)
    if root is None:
        raise InputError("the tree has no marked vertex")
    depth = {root: 0}
    parent_edge: dict[str, str] = {}
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for e in t.tree_ribbon(u):
            w = t.chain_head(e)
            if w not in depth:
                depth[w] = depth[u] + 1
                parent_edge[w] = e[0]
                queue.append(w)
    branch = [v for v in order if not t.vertices[v].marked]
    branch.sort(key=lambda v: -depth[v])
    return [(v, generator_name(parent_edge[v])) for v in branch]


def reduce_to_free_basis(
    t: RibbonTreeMap, compiled: CompiledTable
) -> tuple[WreathRecursion, TreeLikeGenSet]:
    elim = eliminated_generators(t)
    gone = {g for _, g in elim}
    basis = [g for g in compiled.generators if g not in gone]
    group = FreeGroup(basis)
    value: dict[str, Word] = {g: (group.letter(g),) for g in basis}
    words = dict(zip(t.tree_vertices(), compiled.vertex_words))

    def letter_word(x: ELetter) -> Word:
        if x[0] not in value:
            raise ConsistencyError(f"generator {x[0]} used before its elimination")
        w = value[x[0]]
        return w if x[1] > 0 else inverse(w)

    for v, g in elim:
        rel = words[v]
        spots = [k for k, x in enumerate(rel) if x[0] == g]
        if len(spots) != 1:
            raise ConsistencyError(f"relation at {v} does not contain {g} exactly once")
        k = spots[0]
        u1 = multiply(*(letter_word(x) for x in rel[:k]))
        u2 = multiply(*(letter_word(x) for x in rel[k + 1 :]))
        w = multiply(inverse(u1), inverse(u2))
        value[g] = w if rel[k][1] > 0 else inverse(w)

    def entry_word(y: ELetter | None) -> Word:
        return IDENTITY if y is None else letter_word(y)

    table = {}
    for g in basis:
        for eps in SHEETS:
            y, b = compiled.table[(eps, (g, 1))]
            table[(eps, group.letter(g))] = (entry_word(y), b)
    rec = WreathRecursion(group, table)

    for g in gone:
        for s in (1, -1):
            for eps in SHEETS:
                y, b = compiled.table[(eps, (g, s))]
                got = apply(rec, eps, letter_word((g, s)))
                if got != (entry_word(y), b):
                    raise InputError(
                        f"table entry for {format_signed_name(g, s)} contradicts the vertex relation"
                    )

    gens = {g: value[g] for g in compiled.generators}
    tree = TreeLikeGenSet(group, gens, compiled.vertex_words)
    diag = validate(tree)
    if not diag:
        raise InputError(f"compiled vertex structure is invalid: {diag.message}")
    return rec, tree


# --------------------------------------------------------------------------
# driver


@dataclass
class Compilation:
    treemap: RibbonTreeMap
    signatures: dict[SignedEdge, tuple[int, int]]
    labels: dict[str, int]
    table: CompiledTable
    recursion: WreathRecursion
    tree: TreeLikeGenSet

    def summary(self) -> dict[str, Any]:
        """Intermediate data kept alongside the biset for inspection."""

        def tok(y: ELetter | None) -> str:
            return "1" if y is None else format_signed_name(*y)

        rows = {}
        for eps in SHEETS:
            rows[str(eps)] = {
                format_signed_name(g, s): [tok(y), b]
                for g in self.table.generators
                for s in (1, -1)
                for y, b in [self.table.table[(eps, (g, s))]]
            }
        return {
            "signatures": {_fmt(e): list(v) for e, v in self.signatures.items()},
            "labels": dict(self.labels),
            "table": rows,
        }


def compile_treemap(doc: Any) -> Compilation:
    t = doc if isinstance(doc, RibbonTreeMap) else parse_treemap(doc)
    sig = signatures(t)
    labels = propagate_labels(t)
    table = emit_table(t, sig, labels)
    rec, tree = reduce_to_free_basis(t, table)
    return Compilation(t, sig, labels, table, rec, tree)
