"""Tree-like generating sets and their vertex structures."""

from __future__ import annotations

from collections import Counter, deque
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

from .biset import ELetter, VertexWord, letter_value
from .errors import InputError
from .freegroup import (
    IDENTITY,
    FreeGroup,
    Word,
    canonical_form,
    format_signed_name,
    inverse,
    multiply,
    sorted_words,
    symmetric_closure,
    word_key,
)

Key = tuple[Word, ...]


@dataclass(frozen=True)
class TreeLikeGenSet:
    group: FreeGroup
    gens: Mapping[str, Word] = field(hash=False)
    vertex_words: tuple[VertexWord, ...]

    def elements(self) -> frozenset[Word]:
        """E as a symmetric set containing the identity."""
        return symmetric_closure(self.gens.values())

    def signed_letters(self) -> list[ELetter]:
        return [(n, s) for n in self.gens for s in (1, -1)]

    def value(self, letter: ELetter) -> Word:
        return letter_value(self.gens, letter)


@dataclass
class Diagnostics:
    ok: bool
    axiom: str | None = None
    generator: str | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class AbstractRibbonTree:
    vertices: list[VertexWord]
    edges: list[tuple[str, int, int]]  # (E-name, vertex holding g, vertex holding g^-1)
    rotation: list[VertexWord]

    def degree(self, i: int) -> int:
        return len(self.rotation[i])

    def is_tree(self) -> bool:
        n = len(self.vertices)
        if len(self.edges) != n - 1:
            return False
        adj: dict[int, list[int]] = {i: [] for i in range(n)}
        for _, u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        return len(seen) == n


def _fail(axiom: str, generator: str | None, message: str) -> Diagnostics:
    return Diagnostics(False, axiom, generator, message)


def validate(t: TreeLikeGenSet) -> Diagnostics:
    """Check the tree-like generating set axioms; reports the first violation."""
    seen_values: dict[Word, str] = {}
    for name in t.gens:
        w = t.gens[name]
        if w == IDENTITY:
            return _fail("nontrivial", name, f"generator {name} is the identity")
        for val, label in ((w, name), (inverse(w), format_signed_name(name, -1))):
            if val in seen_values:
                return _fail(
                    "distinct", name, f"{label} coincides with {seen_values[val]} as a group element"
                )
            seen_values[val] = label

    counts = Counter(letter for v in t.vertex_words for letter in v)
    for letter in counts:
        if letter[0] not in t.gens:
            return _fail("known-letter", letter[0], f"vertex word uses unknown generator {letter[0]}")
    for letter in t.signed_letters():
        c = counts.get(letter, 0)
        if c != 1:
            label = format_signed_name(*letter)
            how = "never" if c == 0 else f"{c} times"
            return _fail("occurrence", letter[0], f"{label} occurs {how} in the vertex structure")

    tree = build_tree(t)
    if not tree.is_tree():
        return _fail("tree", None, "the vertex structure graph is not a tree")
    return Diagnostics(True)


def build_tree(t: TreeLikeGenSet) -> AbstractRibbonTree:
    where: dict[ELetter, int] = {}
    for i, v in enumerate(t.vertex_words):
        for letter in v:
            if letter in where:
                raise InputError(f"{format_signed_name(*letter)} occurs in two vertex words")
            where[letter] = i
    edges = []
    for name in t.gens:
        try:
            edges.append((name, where[(name, 1)], where[(name, -1)]))
        except KeyError:
            raise InputError(f"generator {name} is missing from the vertex structure") from None
    verts = list(t.vertex_words)
    return AbstractRibbonTree(verts, edges, verts)


def evaluate(v: Sequence[ELetter], gens: Mapping[str, Word]) -> Word:
    return multiply(*(letter_value(gens, letter) for letter in v))


def canonical_key(t: TreeLikeGenSet) -> Key:
    canon, _ = canonical_form(t.elements())
    return sorted_words(canon)


def key_order(key: Key) -> tuple:
    return tuple(word_key(w) for w in key)


def name_generators(elements: frozenset[Word], prefix: str = "g") -> dict[str, Word]:
    """Fresh names g1, g2, ... for the inverse pairs of a symmetric set.

    Each pair is represented by its smaller element; names follow the word order.
    """
    reps = set()
    for w in elements:
        if w:
            reps.add(min(w, inverse(w), key=word_key))
    return {f"{prefix}{i}": w for i, w in enumerate(sorted_words(reps), start=1)}


def rekey_vertex_words(
    words: frozenset[tuple[Word, ...]], gens: Mapping[str, Word]
) -> tuple[VertexWord, ...]:
    """Replace group-element letters by signed generator names."""
    lookup: dict[Word, ELetter] = {}
    for name, w in gens.items():
        lookup[w] = (name, 1)
        lookup[inverse(w)] = (name, -1)
    out = []
    for w in words:
        try:
            out.append(tuple(lookup[g] for g in w))
        except KeyError:
            raise InputError("vertex word letter is not a named generator") from None
    return tuple(sorted(out, key=_vertex_word_order(gens)))


def _vertex_word_order(gens: Mapping[str, Word]):
    rank = {n: i for i, n in enumerate(gens)}
    return lambda v: (len(v), [(rank[n], s < 0) for n, s in v])


def sort_vertex_words(t_gens: Mapping[str, Word], words) -> tuple[VertexWord, ...]:
    return tuple(sorted(words, key=_vertex_word_order(t_gens)))


def marked_count(t: TreeLikeGenSet) -> int:
    """Number of vertices with nontrivial peripheral product."""
    return sum(1 for v in t.vertex_words if evaluate(v, t.gens) != IDENTITY)
