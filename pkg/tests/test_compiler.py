import copy
import json
from pathlib import Path

import pytest
from conftest import compiled, load_fixture

from ivytree.biset import SHEETS, apply
from ivytree.compiler import (
    boundary_circuit,
    compile_treemap,
    eliminated_generators,
    parse_treemap,
    propagate_labels,
    segments,
)
from ivytree.errors import InputError
from ivytree.freegroup import multiply

DATA = Path(__file__).parent / "data"


def rotations(seq):
    return [seq[k:] + seq[:k] for k in range(len(seq))]


def names(edges):
    return [n if s > 0 else n + "^-1" for n, s in edges]


def table_text(name):
    """Compiled table over the edge generators as {row: {letter: [entry, sheet]}}."""
    return compiled(name).summary()["table"]


# ---------------------------------------------------------------- circuits


def test_basilica_boundary_circuit():
    t = parse_treemap(load_fixture("basilica"))
    assert names(boundary_circuit(t)) == ["A", "B", "B^-1", "A^-1"]


def test_rabbit_boundary_circuit_and_segments():
    t = parse_treemap(load_fixture("rabbit"))
    circuit = names(boundary_circuit(t))
    assert circuit in rotations(["B^-1", "A", "D", "D^-1", "A^-1", "C", "C^-1", "B"])
    s0, s1 = segments(t)
    assert names(s0) == ["B^-1", "A", "D"]
    assert names(s1) == ["D^-1", "A^-1", "C", "C^-1", "B"]


def test_one_edge_tree_circuit():
    doc = {
        "vertices": [
            {"name": "p", "marked": True, "critical_point": True, "critical_value": 1},
            {"name": "q", "marked": True, "critical_point": True, "critical_value": 2},
        ],
        "edges": [{"name": "E", "from": "p", "to": "q"}],
        "ribbon": {"p": ["E"], "q": ["E^-1"]},
        "base_edge": "E",
        "vertex_map": {"p": "q", "q": "p"},
        "edge_map": {"E": ["E^-1"]},
    }
    t = parse_treemap(doc)
    assert names(boundary_circuit(t)) == ["E", "E^-1"]


@pytest.mark.parametrize("name", ["basilica", "rabbit", "capture_sqrt2"])
def test_circuit_covers_every_oriented_edge_once(name):
    t = parse_treemap(load_fixture(name))
    circuit = boundary_circuit(t)
    assert len(circuit) == 2 * len(t.edges)
    assert set(circuit) == {(n, s) for n in t.edges for s in (1, -1)}
    s0, s1 = segments(t)
    assert sorted(s0 + s1) == sorted(circuit)


# ---------------------------------------------------------------- signatures


def test_signatures_match_worked_examples():
    bas = compiled("basilica").signatures
    assert bas[("A", 1)] == bas[("B", 1)] == (0, 1)
    assert bas[("A", -1)] == bas[("B", -1)] == (1, 0)
    assert compiled("rabbit").signatures[("C", 1)] == (1, 1)
    cap = compiled("capture_sqrt2").signatures
    assert cap[("A", 1)] == cap[("B", 1)] == cap[("C", 1)] == (0, 1)


@pytest.mark.parametrize("name", ["basilica", "rabbit", "capture_sqrt2"])
def test_signatures_are_symmetric(name):
    sig = compiled(name).signatures
    for (n, s), (i, j) in sig.items():
        assert sig[(n, -s)] == (j, i)


def test_pseudoaccess_out_of_range():
    doc = load_fixture("rabbit")
    doc["pseudoaccess"]["v"] = 3
    with pytest.raises(InputError, match="pseudoaccess"):
        parse_treemap(doc)


def test_pseudoaccess_required_at_inner_critical_value():
    doc = load_fixture("basilica")
    # make the critical value 1 sit at the inner vertex 0
    for v in doc["vertices"]:
        v["critical_value"] = {"0": 1, "inf": 2}.get(v["name"])
    doc["vertex_map"]["0"] = "0"
    with pytest.raises(InputError, match="pseudoaccess.0"):
        parse_treemap(doc)


# ---------------------------------------------------------------- labels


def test_labels_match_worked_examples():
    assert compiled("basilica").labels == {"A": 1, "B": 0}
    assert compiled("rabbit").labels == {"A": 1, "B": 1, "C": 1, "D": 0}
    assert compiled("capture_sqrt2").labels == {"A": 0, "B": 1, "C": 1}


def test_labels_required_without_in_tree_pullback():
    doc = load_fixture("capture_sqrt2")
    del doc["labels"]
    with pytest.raises(InputError, match="labels"):
        compile_treemap(doc)


def test_supplied_labels_are_checked_against_splits():
    doc = load_fixture("capture_sqrt2")
    doc["labels"] = {"A": 1, "B": 1, "C": 1}
    with pytest.raises(InputError, match="vertex 0"):
        compile_treemap(doc)
    doc["labels"] = {"A": 0, "B": 1, "C": 0}
    with pytest.raises(InputError, match="vertex 1"):
        compile_treemap(doc)


def test_supplied_labels_must_agree_with_propagation():
    doc = load_fixture("basilica")
    doc["labels"] = {"A": 0, "B": 1}
    with pytest.raises(InputError, match="disagree"):
        compile_treemap(doc)
    doc["labels"] = {"A": 1, "B": 0}
    assert propagate_labels(parse_treemap(doc)) == {"A": 1, "B": 0}


def test_base_edge_must_separate_critical_values():
    doc = load_fixture("rabbit")
    doc["base_edge"] = "C"
    with pytest.raises(InputError, match="separate"):
        parse_treemap(doc)


def test_missing_critical_split():
    doc = load_fixture("basilica")
    doc["critical_splits"] = {}
    with pytest.raises(InputError, match="critical_splits.0"):
        parse_treemap(doc)


# ---------------------------------------------------------------- tables

BASILICA_TABLE = {
    "0": {"a": ["b", 1], "b": ["b", 1], "a^-1": ["a", 1], "b^-1": ["1", 1]},
    "1": {"a": ["a^-1", 0], "b": ["1", 0], "a^-1": ["b^-1", 0], "b^-1": ["b^-1", 0]},
}
RABBIT_TABLE = {
    "0": {
        "a": ["d", 1], "b": ["a", 1], "c": ["b", 0], "d": ["d", 1],
        "a^-1": ["c^-1", 1], "b^-1": ["d", 1], "c^-1": ["b^-1", 0], "d^-1": ["1", 1],
    },
    "1": {
        "a": ["c", 0], "b": ["d^-1", 0], "c": ["1", 1], "d": ["1", 0],
        "a^-1": ["d^-1", 0], "b^-1": ["a^-1", 0], "c^-1": ["1", 1], "d^-1": ["d^-1", 0],
    },
}
CAPTURE_TABLE = {
    "0": {"a": ["a^-1", 1], "b": ["1", 1], "c": ["1", 1], "a^-1": ["b^-1", 1], "b^-1": ["c^-1", 1], "c^-1": ["1", 1]},
    "1": {"a": ["b", 0], "b": ["c", 0], "c": ["1", 0], "a^-1": ["a", 0], "b^-1": ["1", 0], "c^-1": ["1", 0]},
}


@pytest.mark.parametrize(
    "name, expected",
    [("basilica", BASILICA_TABLE), ("rabbit", RABBIT_TABLE), ("capture_sqrt2", CAPTURE_TABLE)],
)
def test_tables_match_worked_examples(name, expected):
    assert table_text(name) == expected


def test_duplicate_candidate_edge_is_rejected():
    doc = load_fixture("basilica")
    # A now also maps over A^-1 B, so both A and B (label 0 after propagation) cover B
    doc["edge_map"]["A"] = ["A^-1", "B", "B^-1"]
    with pytest.raises(InputError):
        compile_treemap(doc)


# ---------------------------------------------------------------- free basis


def test_rabbit_free_basis_eliminates_a():
    c = compiled("rabbit")
    assert eliminated_generators(c.treemap) == [("x", "a")]
    g = c.recursion.group
    assert g.names == ("b", "c", "d")
    assert g.format(c.tree.gens["a"]) == "b^-1 c^-1"
    assert c.recursion.table[(0, g.letter("b"))] == (g.parse("b^-1 c^-1"), 1)


@pytest.mark.parametrize("name", ["basilica", "capture_sqrt2"])
def test_path_trees_keep_every_generator(name):
    c = compiled(name)
    assert eliminated_generators(c.treemap) == []
    assert list(c.recursion.group.names) == c.table.generators


@pytest.mark.parametrize("name", ["basilica", "rabbit", "capture_sqrt2"])
def test_reduction_preserves_every_table_entry(name):
    c = compiled(name)
    value = c.tree.gens
    for (eps, (g, s)), (y, b) in c.table.table.items():
        x = value[g] if s > 0 else tuple(-t for t in reversed(value[g]))
        want = () if y is None else (value[y[0]] if y[1] > 0 else tuple(-t for t in reversed(value[y[0]])))
        assert apply(c.recursion, eps, x) == (want, b)


@pytest.mark.parametrize("name", ["basilica", "rabbit", "capture_sqrt2"])
def test_vertex_relations_hold(name):
    c = compiled(name)
    for v, word in zip(c.treemap.tree_vertices(), c.tree.vertex_words):
        product = multiply(*(c.tree.value(x) for x in word))
        assert (product == ()) == (not c.treemap.vertices[v].marked)


def test_basilica_vertex_words():
    assert compiled("basilica").table.vertex_words == (
        (("a", 1),),
        (("a", -1), ("b", 1)),
        (("b", -1),),
    )


# ---------------------------------------------------------------- subdivision


def test_subdivided_edge_becomes_one_generator():
    with open(DATA / "chebyshev_subdivided.treemap.json") as fh:
        c = compile_treemap(json.load(fh))
    assert c.treemap.tree_vertices() == ["m2", "p2", "inf"]
    assert c.recursion.group.names == ("a", "b")
    sig = c.signatures
    assert sig[("A", 1)] == sig[("A2", 1)] == (0, 1)
    assert c.labels == {"A": 1, "A2": 0, "B": 0}
    for eps in SHEETS:
        assert c.recursion.table[(eps, 1)] == [((1,), 1), ((-1,), 0)][eps]


# ---------------------------------------------------------------- schema


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("base_edge"), "base_edge"),
        (lambda d: d.pop("vertices"), "vertices"),
        (lambda d: d["ribbon"].update({"0": ["B"]}), "ribbon.0"),
        (lambda d: d["edge_map"].pop("A"), "edge_map"),
        (lambda d: d["edge_map"].update({"B": ["B", "A"]}), "edge_map.B"),
        (lambda d: d.update({"base_edge": "Q"}), "base_edge"),
        (lambda d: d["vertex_map"].update({"0": "0"}), "vertex_map"),
        (
            lambda d: (
                d["edges"].append({"name": "C", "from": "0", "to": "-1"}),
                d["ribbon"]["0"].append("C"),
                d["ribbon"]["-1"].append("C^-1"),
                d["edge_map"].update({"C": ["A"]}),
            ),
            "tree",
        ),
        (lambda d: d.update({"format": "other/1"}), "format"),
        (lambda d: d["vertices"][0].update({"marked": False}), "marked"),
    ],
)
def test_schema_violations(mutate, field):
    doc = copy.deepcopy(load_fixture("basilica"))
    mutate(doc)
    with pytest.raises(InputError, match=field):
        parse_treemap(doc)
