"""Reduced words in a free group of finite rank.

A word is a tuple of nonzero ints: ``+i`` is the i-th generator (1-based, in
declaration order) and ``-i`` its inverse. Words produced by this module are
always freely reduced, and the empty tuple is the identity.
"""

from __future__ import annotations

import re
from collections import deque
from collections.abc import Iterable, Sequence

from .errors import InputError

Word = tuple[int, ...]

IDENTITY: Word = ()

NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def reduce(letters: Iterable[int]) -> Word:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def inverse(w: Word) -> Word:
    return tuple(-x for x in reversed(w))


def multiply(*words: Word) -> Word:
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def conjugate(u: Word, w: Word) -> Word:
    """Return ``u w u^-1`` freely reduced."""
    return multiply(u, w, inverse(u))


def conjugate_set(u: Word, words: Iterable[Word]) -> frozenset[Word]:
    return frozenset(conjugate(u, w) for w in words)


def letter_key(x: int) -> int:
    # generator index first, then +1 before -1
    return 2 * (abs(x) - 1) + (x < 0)


def word_key(w: Word) -> tuple[int, tuple[int, ...]]:
    return len(w), tuple(letter_key(x) for x in w)


def set_key(words: Iterable[Word]) -> tuple:
    return tuple(sorted(word_key(w) for w in words))


def sorted_words(words: Iterable[Word]) -> tuple[Word, ...]:
    return tuple(sorted(words, key=word_key))


def total_length(words: Iterable[Word]) -> int:
    return sum(len(w) for w in words)


def symmetric_closure(words: Iterable[Word]) -> frozenset[Word]:
    out = {IDENTITY}
    for w in words:
        out.add(w)
        out.add(inverse(w))
    return frozenset(out)


def is_symmetric_with_id(words: Iterable[Word]) -> bool:
    s = set(words)
    return IDENTITY in s and all(inverse(w) in s for w in s)


def canonical_form(words: Iterable[Word]) -> tuple[frozenset[Word], Word]:
    """Canonical representative of a finite word set under simultaneous conjugation.

    Returns ``(canonical, witness)`` with ``canonical == conjugate_set(witness, words)``.
    The canonical set has minimal total length among all conjugates, and is the
    least such set under `set_key`.

    Total length is convex along geodesics of the Cayley tree, so a greedy
    descent by single letters reaches the global minimum, and the minimizing
    conjugates form a connected plateau that a breadth-first search covers.
    """
    current = frozenset(words)
    gens = sorted({abs(x) for w in current for x in w})
    moves = [s * g for g in gens for s in (1, -1)]
    witness: Word = IDENTITY
    cost = total_length(current)

    while True:
        best = None
        for x in moves:
            cand = conjugate_set((x,), current)
            c = total_length(cand)
            if c < cost and (best is None or c < best[0]):
                best = (c, x, cand)
        if best is None:
            break
        cost, x, current = best
        witness = multiply((x,), witness)

    seen = {current: witness}
    queue = deque([current])
    while queue:
        s = queue.popleft()
        for x in moves:
            cand = conjugate_set((x,), s)
            if cand in seen:
                continue
            c = total_length(cand)
            if c == cost:
                seen[cand] = multiply((x,), seen[s])
                queue.append(cand)
            elif c < cost:
                raise AssertionError("descent stopped above the minimum")

    best_set = min(seen, key=set_key)
    return best_set, seen[best_set]


class FreeGroup:
    """Named free basis; parses and prints words in the text syntax.

    Tokens are ``NAME`` or ``NAME^-1`` separated by whitespace; a lone ``1``
    is the empty word.
    """

    def __init__(self, names: Sequence[str]):
        names = tuple(names)
        for n in names:
            if not NAME_RE.match(n):
                raise InputError(f"invalid generator name {n!r}")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate generator names in {list(names)}")
        self.names = names
        self._index = {n: i + 1 for i, n in enumerate(names)}

    @property
    def rank(self) -> int:
        return len(self.names)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FreeGroup) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"FreeGroup({list(self.names)!r})"

    def letter(self, name: str, sign: int = 1) -> int:
        try:
            i = self._index[name]
        except KeyError:
            raise InputError(f"unknown generator {name!r}") from None
        return i if sign > 0 else -i

    def letters(self) -> list[int]:
        """All signed letters in the total order."""
        return [s * i for i in range(1, self.rank + 1) for s in (1, -1)]

    def reduce(self, letters: Iterable[int]) -> Word:
        letters = list(letters)
        for x in letters:
            if x == 0 or abs(x) > self.rank:
                raise InputError(f"letter {x} outside alphabet of rank {self.rank}")
        return reduce(letters)

    def parse(self, text: str) -> Word:
        tokens = text.split()
        if tokens == ["1"]:
            return IDENTITY
        letters = []
        for tok in tokens:
            name, sign = parse_signed_name(tok)
            letters.append(self.letter(name, sign))
        return reduce(letters)

    def format_letter(self, x: int) -> str:
        name = self.names[abs(x) - 1]
        return name if x > 0 else name + "^-1"

    def format(self, w: Word) -> str:
        if not w:
            return "1"
        return " ".join(self.format_letter(x) for x in w)


def parse_signed_name(token: str) -> tuple[str, int]:
    """Split ``NAME`` / ``NAME^-1`` into ``(NAME, sign)``."""
    name, sign = (token[:-3], -1) if token.endswith("^-1") else (token, 1)
    if not NAME_RE.match(name):
        raise InputError(f"malformed token {token!r}")
    return name, sign


def format_signed_name(name: str, sign: int) -> str:
    return name if sign > 0 else name + "^-1"
