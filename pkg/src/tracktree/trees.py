"""Dual tree of a nested track system, its metric, and the windowed group action.

Components of the pattern complement are modelled as consistent
orientations: one side choice per parallel class, a choice being
consistent when every pair of chosen half-spaces shares a family vertex.
The reduced tree is the median closure of the family's own orientations;
each reduced edge is subdivided by band vertices which flip the class's
cosets one at a time in ShortLex order away from the base side.  Every
vertex carries the finite flip set F and the set B = A + F it represents.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import (
    ClosureBudgetExceeded,
    DisconnectedTree,
    NotNested,
    OutsideCertifiedDomain,
    TrackTreeError,
)
from .groups import GroupElement, SubgroupModel, compose, display_word, invert
from .patterns import TrackSystem, nestedness_check
from .windows import Window


def base_orientation(system: TrackSystem, vertex: int) -> int:
    """Class-side choice of a family vertex, as a bitmask of flipped classes."""
    o = 0
    for k in range(len(system.classes)):
        if (system.class_norm_mask(k) >> vertex) & 1:
            o |= 1 << k
    return o


def median(o1: int, o2: int, o3: int) -> int:
    """Per-class majority vote of three orientations."""
    return (o1 & o2) | (o1 & o3) | (o2 & o3)


def orientation_consistent(system: TrackSystem, orientation: int) -> bool:
    """True when every pair of chosen class half-spaces meets the family."""
    m = len(system.classes)
    full = system._full
    sides = []
    for k in range(m):
        g = system.class_norm_mask(k)
        sides.append(g if (orientation >> k) & 1 else ~g & full)
    for a in range(m):
        if not sides[a]:
            return False
        for b in range(a + 1, m):
            if not sides[a] & sides[b]:
                return False
    return True


def median_closure(system: TrackSystem, seeds: Sequence[int]) -> set[int]:
    budget = 1 << len(system.classes)
    closed = set(seeds)
    frontier = list(closed)
    while frontier:
        fresh = set()
        pool = sorted(closed)
        for trio in itertools.combinations(pool, 3):
            med = median(*trio)
            if med not in closed:
                fresh.add(med)
        if len(closed) + len(fresh) > budget:
            raise ClosureBudgetExceeded("median closure exceeded 2^classes orientations")
        closed |= fresh
        frontier = list(fresh)
    return closed


@dataclass(frozen=True)
class TreeVertex:
    index: int
    flips: frozenset[str]      # cosets flipped relative to the base vertex
    members: frozenset[str]    # B = A + F over the core universe
    kind: str                  # "family", "band" or "branch"
    family_index: Optional[int]


class DualTree:
    def __init__(self, system: TrackSystem, vertices: list[TreeVertex],
                 edges: list[tuple[int, int, str]], base_index: int):
        self.system = system
        self.vertices = vertices
        self.edges = edges
        self.base_index = base_index
        self.adjacency: dict[int, list[tuple[int, str]]] = {v.index: [] for v in vertices}
        for i, j, label in edges:
            self.adjacency[i].append((j, label))
            self.adjacency[j].append((i, label))
        self.flip_index: dict[frozenset[str], int] = {v.flips: v.index for v in vertices}
        self.family_vertex: dict[int, int] = {
            v.family_index: v.index for v in vertices if v.family_index is not None
        }

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def colors(self) -> list[int]:
        return [len(v.flips) % 2 for v in self.vertices]

    def canonical_edges(self) -> set[tuple[tuple[str, ...], tuple[str, ...], str]]:
        sk = self.system.sort_key

        def flips_key(v: TreeVertex):
            return tuple(sorted(v.flips, key=sk))

        out = set()
        for i, j, label in self.edges:
            a, b = flips_key(self.vertices[i]), flips_key(self.vertices[j])
            if (len(a), a) > (len(b), b):
                a, b = b, a
            out.add((a, b, label))
        return out


def build_tree(system: TrackSystem) -> DualTree:
    """Median closure plus band subdivision; asserts the tree axioms."""
    nested = nestedness_check(system)
    if not nested.ok:
        raise NotNested(f"crossing witness {nested.witness}")

    m = len(system.classes)
    family_orients = [base_orientation(system, i) for i in range(system.n)]
    closed = median_closure(system, family_orients)
    for o in closed:
        if not orientation_consistent(system, o):
            raise TrackTreeError("median closure produced an inconsistent orientation")

    orient_of_family = {o: i for i, o in reversed(list(enumerate(family_orients)))}
    sk = system.sort_key
    base_members = system.family.vertices[system.base_index].members

    def flips_of(orientation: int) -> frozenset[str]:
        out: set[str] = set()
        for k in range(m):
            if (orientation >> k) & 1:
                out.update(system.classes[k])
        return frozenset(out)

    raw_vertices: dict[frozenset[str], tuple[str, Optional[int]]] = {}
    for o in sorted(closed):
        fam = orient_of_family.get(o)
        kind = "family" if fam is not None else "branch"
        raw_vertices[flips_of(o)] = (kind, fam)

    raw_edges: list[tuple[frozenset[str], frozenset[str], str]] = []
    class_edge_count = [0] * m
    ordered = sorted(closed)
    for a_i in range(len(ordered)):
        for b_i in range(a_i + 1, len(ordered)):
            x = ordered[a_i] ^ ordered[b_i]
            if x & (x - 1):
                continue
            k = x.bit_length() - 1
            class_edge_count[k] += 1
            tail, head = ordered[a_i], ordered[b_i]
            if (tail >> k) & 1:
                tail, head = head, tail
            labels = sorted(system.classes[k], key=sk)
            prev = flips_of(tail)
            for step, label in enumerate(labels):
                nxt = prev | {label} if step < len(labels) - 1 else flips_of(head)
                if nxt not in raw_vertices:
                    raw_vertices[nxt] = ("band", None)
                raw_edges.append((prev, nxt, label))
                prev = nxt

    if m and any(c != 1 for c in class_edge_count):
        raise TrackTreeError(f"class edge counts {class_edge_count} are not all 1")

    def vkey(flips: frozenset[str]):
        return (len(flips), tuple(sk(w) for w in sorted(flips, key=sk)))

    order = sorted(raw_vertices, key=vkey)
    index_of = {flips: i for i, flips in enumerate(order)}
    vertices = [
        TreeVertex(i, flips, base_members ^ flips, raw_vertices[flips][0], raw_vertices[flips][1])
        for i, flips in enumerate(order)
    ]
    edges = sorted(
        (
            (min(index_of[a], index_of[b]), max(index_of[a], index_of[b]), label)
            for a, b, label in raw_edges
        ),
    )
    tree = DualTree(system, vertices, edges, index_of[flips_of(family_orients[system.base_index])])
    _assert_tree(tree)
    return tree


def _assert_tree(tree: DualTree):
    n, e = tree.vertex_count, tree.edge_count
    if e != n - 1:
        raise TrackTreeError(f"{e} edges on {n} vertices is not a tree")
    seen = {tree.base_index}
    stack = [tree.base_index]
    while stack:
        x = stack.pop()
        for y, _ in tree.adjacency[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != n:
        raise DisconnectedTree(f"reached {len(seen)} of {n} vertices")
    for i, j, label in tree.edges:
        if tree.vertices[i].flips ^ tree.vertices[j].flips != {label}:
            raise TrackTreeError(f"edge ({i}, {j}) does not flip exactly {label!r}")
    colors = tree.colors()
    for i, j, _ in tree.edges:
        if colors[i] == colors[j]:
            raise TrackTreeError("tree is not bipartite under |A + B| mod 2")


# --------------------------------------------------------------------------
# paths and separation


@dataclass(frozen=True)
class PathReport:
    length: int
    labels: tuple[str, ...]


def tree_metric_and_separation(tree: DualTree, a: int, b: int) -> PathReport:
    """Unique path between two tree vertices; its labels must be B_a + B_b."""
    if a == b:
        return PathReport(0, ())
    prev: dict[int, tuple[int, str]] = {a: (a, "")}
    queue = [a]
    while queue:
        nxt = []
        for x in queue:
            for y, label in tree.adjacency[x]:
                if y not in prev:
                    prev[y] = (x, label)
                    nxt.append(y)
        queue = nxt
    if b not in prev:
        raise DisconnectedTree(f"no path from {a} to {b}")
    labels = []
    x = b
    while x != a:
        x, label = prev[x]
        labels.append(label)
    labels.reverse()
    expected = tree.vertices[a].flips ^ tree.vertices[b].flips
    if len(labels) != len(set(labels)) or set(labels) != expected:
        raise TrackTreeError(f"path labels {labels} do not realise the flip difference")
    return PathReport(len(labels), tuple(labels))


# --------------------------------------------------------------------------
# windowed group action


@dataclass
class ActionReport:
    element: str
    vertex_map: list[Optional[int]]
    base_image: Optional[int]
    label_map: dict[str, Optional[str]]
    mapped_vertices: int
    mapped_edges: int
    equivariant: bool
    witness: Optional[str] = None


def _window_of(tree: DualTree) -> Window:
    window = tree.system.family.window
    if window is None or tree.system.family.base_set is None:
        raise OutsideCertifiedDomain("the family was not built over a group window")
    return window


def translate_flips(tree: DualTree, g: GroupElement) -> frozenset[str]:
    """Certified symmetric difference between the base set and its g-translate."""
    window = _window_of(tree)
    base_set = tree.system.family.base_set
    view = window.translate(base_set, g)
    if view.unknown - window.shell:
        raise OutsideCertifiedDomain(f"translate by {g!r} undecided inside the core")
    diff = frozenset(
        k for k in window.omega
        if k not in view.unknown and ((k in view.known_in) != (k in base_set))
    )
    if diff & window.shell:
        raise OutsideCertifiedDomain(f"translate by {g!r} shifts the boundary shell")
    return diff


def act(tree: DualTree, g: GroupElement) -> ActionReport:
    """Map every vertex B to B*g and report equivariance on the mapped subtree."""
    window = _window_of(tree)
    d_g = translate_flips(tree, g)
    label_map: dict[str, Optional[str]] = {
        c: window.act_key(c, g) for c in tree.system.labels
    }

    vertex_map: list[Optional[int]] = []
    for v in tree.vertices:
        image: Optional[int] = None
        moved = set()
        ok = True
        for c in v.flips:
            mc = label_map[c]
            if mc is None:
                ok = False
                break
            moved.add(mc)
        if ok:
            image = tree.flip_index.get(frozenset(moved) ^ d_g)
        vertex_map.append(image)

    base_image = tree.flip_index.get(d_g)
    mapped_edges = 0
    equivariant = True
    witness = None
    edge_lookup = {}
    for i, j, label in tree.edges:
        edge_lookup[(min(i, j), max(i, j))] = label
    for i, j, label in tree.edges:
        mi, mj = vertex_map[i], vertex_map[j]
        if mi is None or mj is None:
            continue
        mapped_edges += 1
        want = label_map[label]
        got = edge_lookup.get((min(mi, mj), max(mi, mj)))
        if got is None or want is None or got != want:
            equivariant = False
            if witness is None:
                witness = f"edge ({i}, {j}, {display_word(label)}) maps to ({mi}, {mj}, {got})"
    return ActionReport(
        display_word(g.word), vertex_map, base_image, label_map,
        sum(1 for x in vertex_map if x is not None), mapped_edges, equivariant, witness)


# --------------------------------------------------------------------------
# window stabilizers


@dataclass
class ClassUnionReport:
    applicable: bool
    class_size: int = 0
    union_size: int = 0
    subgroup_size: int = 0
    closed: bool = True
    inverse_closed: bool = True
    contains_subgroup: bool = True
    index: int = 0
    witness: Optional[str] = None


@dataclass
class StabilizerReport:
    ball_words: list[str]
    vertex_stabilizers: list[tuple[str, ...]]
    base_contains_expected: bool
    base_equals_expected: Optional[bool]
    base_witness: Optional[str]
    edge_stabilizers: list[tuple[str, ...]]
    edge_conjugates_ok: list[bool]
    class_union: ClassUnionReport
    uncertified: list[str] = field(default_factory=list)


def stabilizer_analysis(tree: DualTree, ball: Sequence[GroupElement],
                        expected_k: Optional[SubgroupModel] = None,
                        expected_k_exact: bool = False,
                        product_radius: Optional[int] = None) -> StabilizerReport:
    """Window stabilizers of every tree vertex and edge, plus the subgroup
    formed by the parallel class of the identity coset.

    All verdicts are restricted to the supplied action ball; elements whose
    translate cannot be certified are listed as uncertified and excluded.
    """
    window = _window_of(tree)
    sub = window.sub
    sk = tree.system.sort_key

    certified: list[tuple[GroupElement, frozenset[str], dict[str, Optional[str]]]] = []
    uncertified: list[str] = []
    for g in ball:
        try:
            d_g = translate_flips(tree, g)
        except OutsideCertifiedDomain:
            uncertified.append(display_word(g.word))
            continue
        label_map = {c: window.act_key(c, g) for c in tree.system.labels}
        certified.append((g, d_g, label_map))

    def image_flips(flips: frozenset[str], d_g, label_map) -> Optional[frozenset[str]]:
        moved = set()
        for c in flips:
            mc = label_map[c]
            if mc is None:
                return None
            moved.add(mc)
        return frozenset(moved) ^ d_g

    vertex_stabs: list[tuple[str, ...]] = []
    for v in tree.vertices:
        stab = [
            g for g, d_g, label_map in certified
            if image_flips(v.flips, d_g, label_map) == v.flips
        ]
        vertex_stabs.append(tuple(display_word(g.word) for g in sorted(stab, key=lambda e: e.sort_key())))

    base_stab = set(vertex_stabs[tree.base_index])
    base_contains = True
    base_equals: Optional[bool] = None
    base_witness = None
    if expected_k is not None:
        expected_words = {
            display_word(g.word) for g, _, _ in certified if expected_k.member(g)
        }
        missing = expected_words - base_stab
        if missing:
            base_contains = False
            base_witness = f"expected stabilizer element {sorted(missing)[0]} moves the base vertex"
        if expected_k_exact:
            extra = base_stab - expected_words
            base_equals = not missing and not extra
            if extra and base_witness is None:
                base_witness = f"unexpected base stabilizer element {sorted(extra)[0]}"

    edge_stabs: list[tuple[str, ...]] = []
    edge_conj_ok: list[bool] = []
    h_ball = [g for g, _, _ in certified if sub.member(g)]
    certified_words = {g.word for g, _, _ in certified}
    for i, j, label in tree.edges:
        fi, fj = tree.vertices[i].flips, tree.vertices[j].flips
        stab = []
        for g, d_g, label_map in certified:
            if label_map[label] != label:
                continue
            imgs = {image_flips(fi, d_g, label_map), image_flips(fj, d_g, label_map)}
            if imgs == {fi, fj}:
                stab.append(g)
        edge_stabs.append(tuple(display_word(g.word) for g in sorted(stab, key=lambda e: e.sort_key())))

        # conjugate of the subgroup by the edge label representative
        rep = window.key_element(label)
        ok = True
        stab_words = set(edge_stabs[-1])
        for h in h_ball:
            conj = compose(compose(invert(rep), h), rep)
            if conj.word not in certified_words:
                continue
            if display_word(conj.word) not in stab_words:
                ok = False
                break
        edge_conj_ok.append(ok)

    class_union = _class_union_report(tree, product_radius)
    return StabilizerReport(
        [display_word(e.word) for e in ball],
        vertex_stabs, base_contains, base_equals, base_witness,
        edge_stabs, edge_conj_ok, class_union, uncertified)


def _class_union_report(tree: DualTree, product_radius: Optional[int]) -> ClassUnionReport:
    window = _window_of(tree)
    system = tree.system
    identity_key = window.table.key_of[""]
    if identity_key not in system.class_of:
        return ClassUnionReport(applicable=False)
    cls = set(system.classes[system.class_of[identity_key]])
    radius = product_radius if product_radius is not None else window.radius // 2
    pool = [e for e in window.elements if len(e.word) <= radius]
    union = [e for e in pool if window.table.key_of[e.word] in cls]
    sub_elems = [e for e in pool if window.sub.member(e)]

    report = ClassUnionReport(
        applicable=True, class_size=len(cls), union_size=len(union),
        subgroup_size=len(sub_elems), index=len(cls))
    lookup = window.table.key_of
    for h in sub_elems:
        if lookup[h.word] not in cls:
            report.contains_subgroup = False
            report.witness = f"subgroup element {h!r} escapes the class union"
            return report
    for e1 in union:
        inv = invert(e1)
        if inv.word in lookup and lookup[inv.word] not in cls:
            report.inverse_closed = False
            report.witness = f"inverse of {e1!r} escapes the class union"
            return report
        for e2 in union:
            prod = compose(e1, e2)
            kk = lookup.get(prod.word)
            if kk is not None and kk not in cls:
                report.closed = False
                report.witness = f"product {e1!r} * {e2!r} escapes the class union"
                return report
    return report
