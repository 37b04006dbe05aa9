"""Dual tree construction, separation, geodesics, action, stabilizers."""

import pytest

from tracktree import (
    act,
    base_orientation,
    build_track_system,
    build_tree,
    corpus,
    explicit_family,
    free_group,
    median,
    run_instance,
    stabilizer_analysis,
    subgroup,
    tree_metric_and_separation,
)
from tracktree.errors import NotNested, OutsideCertifiedDomain
from tracktree.trees import median_closure, orientation_consistent

Z = free_group(1, "t")


def run(name):
    return run_instance(corpus()[name])


def star_system():
    fam = explicit_family(
        ["a", "b", "c"],
        [("va", frozenset(["a"])), ("vb", frozenset(["b"])), ("vc", frozenset(["c"]))])
    return build_track_system(fam)


def crossing_system():
    fam = explicit_family(
        ["a", "b"],
        [("e", frozenset()), ("va", frozenset(["a"])),
         ("vb", frozenset(["b"])), ("vab", frozenset(["a", "b"]))])
    return build_track_system(fam)


# --------------------------------------------------------------------------
# orientations and medians


def test_base_orientation_of_base_vertex_is_empty():
    system = run("E1").system
    assert base_orientation(system, system.base_index) == 0


def test_base_orientation_flip_set():
    result = run("E1")
    tree = result.tree
    # the translate one step right flips exactly the identity coset
    idx = [i for i, v in enumerate(result.family.vertices) if v.element.word == "t"][0]
    assert tree.vertices[tree.family_vertex[idx]].flips == {""}


def test_median_majority():
    assert median(0b0101, 0b0101, 0b0011) == 0b0101
    system = run("E1").system
    o = [base_orientation(system, i) for i in range(system.n)]
    assert median(o[1], o[2], o[3]) == o[2]


def test_median_closure_star_adds_center():
    system = star_system()
    seeds = [base_orientation(system, i) for i in range(3)]
    closed = median_closure(system, seeds)
    assert len(closed) == 4
    extra = closed - set(seeds)
    assert len(extra) == 1
    assert orientation_consistent(system, extra.pop())


# --------------------------------------------------------------------------
# tree construction


def test_single_track_tree():
    fam = explicit_family(["a"], [("e", frozenset()), ("va", frozenset(["a"]))])
    tree = build_tree(build_track_system(fam))
    assert tree.vertex_count == 2 and tree.edge_count == 1


def test_band_subdivision():
    fam = explicit_family(["a", "b"], [("e", frozenset()), ("vab", frozenset(["a", "b"]))])
    tree = build_tree(build_track_system(fam))
    flips = sorted(sorted(v.flips) for v in tree.vertices)
    assert flips == [[], ["a"], ["a", "b"]]
    kinds = {tuple(sorted(v.flips)): v.kind for v in tree.vertices}
    assert kinds[("a",)] == "band"


def test_half_line_tree_is_path_without_extras():
    tree = run("E1").tree
    assert tree.vertex_count == 5 and tree.edge_count == 4
    assert all(v.kind == "family" for v in tree.vertices)
    degrees = sorted(len(tree.adjacency[v.index]) for v in tree.vertices)
    assert degrees == [1, 1, 2, 2, 2]


def test_star_tree_center_is_branch_vertex():
    tree = build_tree(star_system())
    assert tree.vertex_count == 4 and tree.edge_count == 3
    center = [v for v in tree.vertices if v.kind == "branch"]
    assert len(center) == 1
    assert len(tree.adjacency[center[0].index]) == 3


def test_build_tree_rejects_crossings():
    with pytest.raises(NotNested):
        build_tree(crossing_system())


def test_tree_axioms_on_corpus():
    for name in ("E1", "E2", "E3", "E4"):
        tree = run(name).tree
        assert tree.edge_count == tree.vertex_count - 1
        colors = tree.colors()
        for i, j, label in tree.edges:
            assert tree.vertices[i].flips ^ tree.vertices[j].flips == {label}
            assert colors[i] != colors[j]
        assert len(tree.vertices[tree.base_index].flips) == 0


def test_every_vertex_is_base_plus_finite_flip():
    result = run("E4")
    tree = result.tree
    base_members = result.family.vertices[result.family.base_index].members
    for v in tree.vertices:
        assert v.members == base_members ^ v.flips
        assert len(v.flips) <= len(result.system.labels)


# --------------------------------------------------------------------------
# separation and geodesics


def test_path_trivial_and_band():
    fam = explicit_family(["a", "b"], [("e", frozenset()), ("vab", frozenset(["a", "b"]))])
    tree = build_tree(build_track_system(fam))
    assert tree_metric_and_separation(tree, 1, 1).length == 0
    ends = sorted(tree.flip_index[f] for f in (frozenset(), frozenset(["a", "b"])))
    report = tree_metric_and_separation(tree, ends[0], ends[1])
    assert report.labels == ("a", "b")


def test_separation_property_on_corpus():
    for name in ("E1", "E2", "E3", "E4"):
        result = run(name)
        tree, system = result.tree, result.system
        for i in range(system.n):
            for j in range(i + 1, system.n):
                path = tree_metric_and_separation(
                    tree, tree.family_vertex[i], tree.family_vertex[j])
                assert set(path.labels) == system.table.diff(i, j)
                assert path.length == system.table.d(i, j)


def test_geodesic_for_all_tree_vertex_pairs():
    result = run("E4")
    tree = result.tree
    for a in range(tree.vertex_count):
        for b in range(tree.vertex_count):
            expected = len(tree.vertices[a].flips ^ tree.vertices[b].flips)
            assert tree_metric_and_separation(tree, a, b).length == expected


def test_path_class_blocks_follow_class_order():
    # walking away from a family vertex crosses whole classes consecutively
    result = run("E4")
    tree, system = result.tree, result.system
    path = tree_metric_and_separation(
        tree, tree.family_vertex[0], tree.family_vertex[2])
    classes_seen = [system.class_of[c] for c in path.labels]
    blocks = [k for i, k in enumerate(classes_seen) if i == 0 or classes_seen[i - 1] != k]
    assert len(blocks) == len(set(blocks))


# --------------------------------------------------------------------------
# group action


def test_act_identity():
    result = run("E1")
    rep = act(result.tree, Z.identity())
    assert rep.vertex_map == list(range(result.tree.vertex_count))
    assert rep.base_image == result.tree.base_index
    assert rep.equivariant


def test_act_shift_on_half_line():
    result = run("E1")
    tree = result.tree
    rep = act(tree, Z.normalize("t"))
    assert rep.equivariant
    assert rep.mapped_vertices == tree.vertex_count - 1
    # base maps to the vertex of the right-shifted half line
    t_index = [i for i, v in enumerate(result.family.vertices) if v.element.word == "t"][0]
    assert rep.base_image == tree.family_vertex[t_index]


def test_act_subgroup_element_fixes_everything():
    result = run("E2")
    model = result.family.window.model
    rep = act(result.tree, model.normalize("x"))
    assert rep.equivariant
    assert rep.base_image == result.tree.base_index
    assert all(rep.label_map[c] == c for c in result.system.labels)


def test_act_outside_certified_domain():
    result = run("E1")
    with pytest.raises(OutsideCertifiedDomain):
        act(result.tree, Z.normalize("t" * 8))


# --------------------------------------------------------------------------
# stabilizers


def test_stabilizers_half_line():
    result = run("E1")
    st = stabilizer_analysis(result.tree, Z.ball(2),
                             expected_k=subgroup(Z, []), expected_k_exact=True)
    assert st.vertex_stabilizers[result.tree.base_index] == ("1",)
    assert st.base_equals_expected
    assert all(s == ("1",) for s in st.edge_stabilizers)
    assert all(st.edge_conjugates_ok)
    assert st.class_union.applicable and st.class_union.index == 1


def test_stabilizers_rows():
    result = run("E2")
    window = result.family.window
    model, sub = window.model, window.sub
    ball = model.ball(2)
    st = stabilizer_analysis(result.tree, ball, expected_k=sub, expected_k_exact=True)
    h_ball = tuple(sorted((e.word or "1" for e in ball if sub.member(e)),
                          key=lambda w: model.sort_key("" if w == "1" else w)))
    for stab in st.edge_stabilizers:
        assert stab == h_ball
    assert st.base_equals_expected
    assert st.class_union.index == 1 and st.class_union.closed


def test_stabilizers_alternate_on_dihedral_line():
    result = run("E4")
    tree = result.tree
    model = result.family.window.model
    st = stabilizer_analysis(result.tree, model.ball(3),
                             expected_k=subgroup(model, ["t"]), expected_k_exact=True)
    by_flips = {tuple(sorted(v.flips)): st.vertex_stabilizers[v.index] for v in tree.vertices}
    assert by_flips[()] == ("1", "t")
    assert by_flips[("",)] == ("1", "s")            # midpoint fixed by s
    assert by_flips[("", "s")] == ("1", "sts")      # next vertex: conjugate of t
    assert by_flips[("t",)] == ("1", "tst")         # other midpoint: conjugate of s
    assert st.base_equals_expected
    # union of the identity-coset class is the order-two subgroup on s
    assert st.class_union.class_size == 2
    assert st.class_union.closed and st.class_union.inverse_closed
    assert st.class_union.contains_subgroup and st.class_union.index == 2


def test_stabilizer_analysis_requires_window():
    tree = build_tree(star_system())
    with pytest.raises(OutsideCertifiedDomain):
        stabilizer_analysis(tree, [])


def test_stabilizers_free_group_over_letter_subgroup():
    result = run("E3")
    window = result.family.window
    model, sub = window.model, window.sub
    st = stabilizer_analysis(result.tree, model.ball(2), expected_k=sub, expected_k_exact=True)
    base_stab = st.vertex_stabilizers[result.tree.base_index]
    assert base_stab == ("1", "a", "A", "aa", "AA")
    assert st.base_equals_expected
    assert all(st.edge_conjugates_ok)
    # the identity-coset class is a singleton, so its union in the window
    # is the subgroup itself
    assert st.class_union.class_size == 1
    assert st.class_union.contains_subgroup and st.class_union.closed
