"""Wreath recursions of degree-2 bisets over a free group.

A recursion stores, for each sheet ``a`` in {0, 1} and each positive basis
letter ``x``, the pair ``(sigma(a, x), iota(a, x))``. Entries for inverse
letters follow from ``Sigma(a, x) = (w, b)  =>  Sigma(b, x^-1) = (w^-1, a)``.

Words are consumed leftmost letter first:
``sigma(a, g h) = sigma(a, g) sigma(iota(a, g), h)``.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

from .errors import ConsistencyError, InputError
from .freegroup import (
    IDENTITY,
    FreeGroup,
    Word,
    inverse,
    is_symmetric_with_id,
    multiply,
)

SHEETS = (0, 1)

# A vertex word is a sequence of signed generator names, e.g. (("a", -1), ("b", 1)).
ELetter = tuple[str, int]
VertexWord = tuple[ELetter, ...]


@dataclass(frozen=True, eq=True)
class WreathRecursion:
    group: FreeGroup
    table: Mapping[tuple[int, int], tuple[Word, int]] = field(hash=False)

    def __post_init__(self):
        for i in range(1, self.group.rank + 1):
            targets = []
            for a in SHEETS:
                if (a, i) not in self.table:
                    raise InputError(
                        f"recursion lacks entry for sheet {a}, letter {self.group.names[i - 1]}"
                    )
                w, b = self.table[(a, i)]
                if b not in SHEETS:
                    raise InputError(f"sheet {b!r} is not 0 or 1")
                targets.append(b)
            if sorted(targets) != [0, 1]:
                raise InputError(
                    f"iota(., {self.group.names[i - 1]}) is not a permutation of the sheets"
                )
        extra = set(self.table) - {(a, i) for a in SHEETS for i in range(1, self.group.rank + 1)}
        if extra:
            raise InputError(f"recursion has entries outside the basis: {sorted(extra)}")

    def entry(self, a: int, x: int) -> tuple[Word, int]:
        """Sigma(a, x) for a single signed letter."""
        if x > 0:
            return self.table[(a, x)]
        for b in SHEETS:
            w, c = self.table[(b, -x)]
            if c == a:
                return inverse(w), b
        raise ConsistencyError("iota is not a permutation")  # unreachable after validation


def apply(rec: WreathRecursion, a: int, w: Iterable[int]) -> tuple[Word, int]:
    """(sigma(a, w), iota(a, w)) for an arbitrary word."""
    parts = []
    for x in w:
        if x == 0 or abs(x) > rec.group.rank:
            raise InputError(f"letter {x} outside the recursion alphabet")
        s, a = rec.entry(a, x)
        parts.append(s)
    return multiply(*parts), a


def basis_change(rec: WreathRecursion, h: Word) -> WreathRecursion:
    """Recursion in the basis {alpha_0, h alpha_1}.

    New entries are ``lambda(a) sigma(a, x) lambda(iota(a, x))^-1`` with
    lambda(0) = id and lambda(1) = h; iota is unchanged.
    """
    lam = {0: IDENTITY, 1: tuple(h)}
    table = {}
    for (a, x), (w, b) in rec.table.items():
        table[(a, x)] = (multiply(lam[a], w, inverse(lam[b])), b)
    return WreathRecursion(rec.group, table)


def pushforward_gens(rec: WreathRecursion, gens: Iterable[Word]) -> frozenset[Word]:
    """The set of all sigma(a, g) for sheets a and g in a symmetric generating set."""
    out = frozenset(apply(rec, a, g)[0] for g in gens for a in SHEETS)
    if not is_symmetric_with_id(out):
        raise ConsistencyError("push-forward is not symmetric with identity; corrupted recursion")
    return out


def letter_value(gens: Mapping[str, Word], letter: ELetter) -> Word:
    name, sign = letter
    try:
        w = gens[name]
    except KeyError:
        raise InputError(f"vertex word letter {name!r} has no generator value") from None
    return w if sign > 0 else inverse(w)


def sigma_iota_star(
    rec: WreathRecursion, a: int, v: Sequence[ELetter], gens: Mapping[str, Word]
) -> tuple[tuple[Word, ...], int]:
    """Extend Sigma to formal products of generators, dropping identity outputs."""
    out = []
    for letter in v:
        s, a = apply(rec, a, letter_value(gens, letter))
        if s:
            out.append(s)
    return tuple(out), a


def is_backtrack(word: Sequence[Word]) -> bool:
    return len(word) == 2 and word[1] == inverse(word[0])


def pushforward_vertex_structure(
    rec: WreathRecursion,
    vertex_words: Iterable[Sequence[ELetter]],
    gens: Mapping[str, Word],
    pushed: frozenset[Word] | None = None,
) -> frozenset[tuple[Word, ...]]:
    """Vertex words of the pulled-back tree, as sequences of group elements.

    A vertex word v over a critical value (iota*(0, v) = 1) lifts to the single
    word sigma*(0, v) sigma*(1, v); otherwise each sheet gives its own lift.
    Empty lifts and backtracks ``g g^-1`` are dropped.
    """
    if pushed is None:
        e = {IDENTITY} | {letter_value(gens, (n, s)) for n in gens for s in (1, -1)}
        pushed = pushforward_gens(rec, e)
    out = set()
    for v in vertex_words:
        w0, end0 = sigma_iota_star(rec, 0, v, gens)
        w1, _ = sigma_iota_star(rec, 1, v, gens)
        lifts = [w0 + w1] if end0 == 1 else [w0, w1]
        for w in lifts:
            if not w or is_backtrack(w):
                continue
            for g in w:
                if g not in pushed:
                    raise ConsistencyError("vertex word lifts outside the pushed-forward generators")
            out.add(w)
    return frozenset(out)
