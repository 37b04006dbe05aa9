"""Brute-force oracles and the random nested family generator."""

import pytest

from tracktree import (
    assign_labels,
    build_track_system,
    build_tree,
    corpus,
    explicit_family,
    oracle_labelings,
    oracle_orientations,
    random_nested_family,
    run_instance,
    tree_matches_oracle,
)
from tracktree.errors import TooLarge
from tracktree.oracles import labeling_matches_canonical


def band_system():
    return build_track_system(explicit_family(
        ["a", "b"], [("e", frozenset()), ("vab", frozenset(["a", "b"]))]))


# --------------------------------------------------------------------------
# orientation oracle


def test_oracle_band_family():
    oracle = oracle_orientations(band_system())
    assert sorted(sorted(f) for f in oracle.vertex_flips) == [[], ["a"], ["a", "b"]]
    assert len(oracle.edges) == 2


def test_oracle_half_line():
    result = run_instance(corpus()["E1"])
    oracle = oracle_orientations(result.system)
    assert len(oracle.vertex_flips) == 5
    assert tree_matches_oracle(result.tree, oracle)


def test_oracle_empty_track_set():
    fam = explicit_family(["a"], [("v", frozenset(["a"]))])
    oracle = oracle_orientations(build_track_system(fam))
    assert len(oracle.vertex_flips) == 1 and not oracle.edges


def test_oracle_rejects_large_systems():
    fam, _ = random_nested_family(0, exact_classes=13 - 1 + 1)  # 13 classes
    system = build_track_system(fam)
    with pytest.raises(TooLarge):
        oracle_orientations(system)


def test_oracle_matches_tree_on_corpus():
    for name, spec in corpus().items():
        result = run_instance(spec)
        assert tree_matches_oracle(result.tree, oracle_orientations(result.system)), name


def test_oracle_matches_tree_on_random_families():
    for seed in range(100):
        family, info = random_nested_family(seed)
        system = build_track_system(family)
        tree = build_tree(system)
        assert tree_matches_oracle(tree, oracle_orientations(system)), seed
        assert tree.vertex_count == info.tree_vertex_count
        assert tree.edge_count == info.tree_edge_count


# --------------------------------------------------------------------------
# labeling oracle


def test_labelings_band_family():
    oracle = oracle_labelings(band_system())
    assert oracle.count == 2 and oracle.expected_count == 2


def test_labelings_all_singletons():
    result = run_instance(corpus()["E1"])
    oracle = oracle_labelings(result.system)
    assert oracle.count == 1 == oracle.expected_count


def test_labelings_crafted_two_three():
    fam = explicit_family(
        ["a", "b", "c", "d", "e"],
        [("v0", frozenset()), ("v1", frozenset(["a", "b"])),
         ("v2", frozenset(["a", "b", "c", "d", "e"]))])
    oracle = oracle_labelings(build_track_system(fam))
    assert oracle.count == 12 == oracle.expected_count


def test_labelings_within_class_structure():
    fam = explicit_family(
        ["c1", "c2", "c3", "c4", "c5", "c6", "c7"],
        [("u", frozenset(["c1", "c2", "c3"])), ("v", frozenset(["c4", "c5"])),
         ("w", frozenset(["c6", "c7"]))])
    system = build_track_system(fam)
    oracle = oracle_labelings(system)
    assert oracle.count == 24 == oracle.expected_count
    canonical = assign_labels(system)
    assert tuple(canonical[e] for e in oracle.edges) in oracle.labelings
    for labeling in oracle.labelings:
        assert labeling_matches_canonical(system, canonical, labeling, oracle.edges)


def test_labelings_cap():
    fam, _ = random_nested_family(1, exact_classes=9)
    with pytest.raises(TooLarge):
        oracle_labelings(build_track_system(fam))


# --------------------------------------------------------------------------
# random generator


def test_random_family_deterministic():
    fam1, info1 = random_nested_family(42)
    fam2, info2 = random_nested_family(42)
    assert info1 == info2
    assert [v.members for v in fam1.vertices] == [v.members for v in fam2.vertices]


def test_random_family_info_consistent():
    for seed in range(20):
        family, info = random_nested_family(seed)
        assert len(family) == info.vertex_count <= 12
        assert info.track_count == sum(info.class_sizes)
        system = build_track_system(family)
        assert len(system.labels) == info.track_count
        assert sorted(len(c) for c in system.classes) == sorted(info.class_sizes)


def test_random_family_exact_classes():
    family, info = random_nested_family(3, exact_classes=5)
    assert len(info.class_sizes) == 5
    assert info.vertex_count == 6
