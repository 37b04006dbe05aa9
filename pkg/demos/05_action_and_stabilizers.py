"""The windowed right action on the tree and its stabilizer structure.

On the infinite dihedral instance the vertex stabilizers alternate along
the path between the two order-two subgroups and their conjugates, and the
union of the identity coset's parallel class is itself an order-two
subgroup: the classical splitting recovered from pure set arithmetic.
"""

from tracktree import act, corpus, run_instance, stabilizer_analysis, subgroup

result = run_instance(corpus()["E4"])
tree = result.tree
model = result.family.window.model

print("shifting the whole picture by s:")
report = act(tree, model.normalize("s"))
print("  mapped", report.mapped_vertices, "of", tree.vertex_count,
      "vertices, equivariant:", report.equivariant)
print("  base vertex o maps to B" + str(report.base_image))

stab = stabilizer_analysis(tree, model.ball(3),
                           expected_k=subgroup(model, ["t"]), expected_k_exact=True)
print()
print("vertex stabilizers inside the radius-3 ball (note the alternation):")
for v in tree.vertices:
    flips = "{" + ",".join(sorted(w or "1" for w in v.flips)) + "}"
    print(f"  B{v.index} {flips:10s} -> {stab.vertex_stabilizers[v.index]}")
print("base stabilizer equals the declared one exactly:", stab.base_equals_expected)

print()
print("edge stabilizers and conjugate containment:")
for (i, j, label), words, ok in zip(tree.edges, stab.edge_stabilizers, stab.edge_conjugates_ok):
    print(f"  edge B{i}--B{j} [{label or '1'}]: {words}, conjugate check {'ok' if ok else 'FAILED'}")

cu = stab.class_union
print()
print("the parallel class of the identity coset:", cu.class_size, "cosets")
print("its union is a subgroup (closed, inverse-closed):", cu.closed and cu.inverse_closed)
print("it contains the base subgroup with index", cu.index)

print()
print("the same checks on the lattice instance:")
e2 = run_instance(corpus()["E2"])
window = e2.family.window
st2 = stabilizer_analysis(e2.tree, window.model.ball(2),
                          expected_k=window.sub, expected_k_exact=True)
print("  every edge stabilizer equals the row subgroup in the ball:",
      all(s == st2.edge_stabilizers[0] for s in st2.edge_stabilizers))
print("  edge stabilizer words:", st2.edge_stabilizers[0])
