"""JSON documents: ``ivy-biset/1`` (recursion + tree-like generating set)."""

from __future__ import annotations

import json
from collections.abc import Mapping
from pathlib import Path
from typing import Any

from .biset import SHEETS, WreathRecursion
from .errors import InputError
from .freegroup import FreeGroup, format_signed_name, parse_signed_name
from .treestruct import TreeLikeGenSet, sort_vertex_words, validate

BISET_FORMAT = "ivy-biset/1"
TREEMAP_FORMAT = "ivy-treemap/1"


def _require(doc: Mapping[str, Any], name: str, kind: type | tuple[type, ...]):
    if name not in doc:
        raise InputError(f"missing field `{name}`")
    value = doc[name]
    if not isinstance(value, kind):
        raise InputError(f"field `{name}` has the wrong type")
    return value


def check_format(doc: Any, expected: str) -> None:
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    fmt = doc.get("format", expected)
    if fmt != expected:
        raise InputError(f"field `format` is {fmt!r}, expected {expected!r}")


def parse_biset(doc: Any) -> tuple[WreathRecursion, TreeLikeGenSet]:
    check_format(doc, BISET_FORMAT)
    basis = _require(doc, "basis", list)
    group = FreeGroup(basis)

    recursion = _require(doc, "recursion", dict)
    table = {}
    for name, rows in recursion.items():
        x = group.letter(*parse_signed_name(name))
        if not isinstance(rows, dict):
            raise InputError(f"field `recursion.{name}` must map sheets to entries")
        for sheet_text, entry in rows.items():
            if sheet_text not in ("0", "1"):
                raise InputError(f"field `recursion.{name}` has bad sheet {sheet_text!r}")
            if not (isinstance(entry, list) and len(entry) == 2 and isinstance(entry[0], str)):
                raise InputError(f"field `recursion.{name}.{sheet_text}` must be [word, sheet]")
            word, target = group.parse(entry[0]), entry[1]
            if target not in SHEETS:
                raise InputError(f"field `recursion.{name}.{sheet_text}` has bad target sheet")
            a = int(sheet_text)
            if x > 0:
                key = (a, x)
                if key in table and table[key] != (word, target):
                    raise InputError(f"conflicting entries for `recursion.{name}.{sheet_text}`")
                table[key] = (word, target)
            else:
                # Redundant inverse entry: Sigma(a, x^-1) = (w, b) means Sigma(b, x) = (w^-1, a).
                key = (target, -x)
                inv = (tuple(-y for y in reversed(word)), a)
                if key in table and table[key] != inv:
                    raise InputError(f"entry `recursion.{name}.{sheet_text}` contradicts its inverse")
                table[key] = inv
    rec = WreathRecursion(group, table)

    generators = _require(doc, "generators", dict)
    gens = {}
    for name, text in generators.items():
        if not isinstance(text, str):
            raise InputError(f"field `generators.{name}` must be a word")
        parse_signed_name(name)
        w = group.parse(text)
        if w:
            gens[name] = w

    raw_words = _require(doc, "vertex_words", list)
    words = []
    for v in raw_words:
        if not isinstance(v, list):
            raise InputError("field `vertex_words` must be a list of lists")
        words.append(tuple(parse_signed_name(tok) for tok in v))
    tree = TreeLikeGenSet(group, gens, tuple(words))
    diag = validate(tree)
    if not diag:
        raise InputError(f"invalid vertex structure: {diag.message}")
    return rec, tree


def biset_document(
    rec: WreathRecursion, tree: TreeLikeGenSet, extra: Mapping[str, Any] | None = None
) -> dict[str, Any]:
    group = rec.group
    recursion = {}
    for i, name in enumerate(group.names, start=1):
        recursion[name] = {
            str(a): [group.format(rec.table[(a, i)][0]), rec.table[(a, i)][1]] for a in SHEETS
        }
    doc: dict[str, Any] = {
        "format": BISET_FORMAT,
        "basis": list(group.names),
        "recursion": recursion,
        "generators": {n: group.format(w) for n, w in tree.gens.items()},
        "vertex_words": [
            [format_signed_name(n, s) for n, s in v]
            for v in sort_vertex_words(tree.gens, tree.vertex_words)
        ],
    }
    if extra:
        doc.update(extra)
    return doc


def dumps(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def load_json(path: str | Path) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: not valid JSON ({exc})") from None
