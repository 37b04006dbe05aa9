"""Independent brute-force routes to the dual tree and the label assignment.

These deliberately avoid the construction paths they check: orientations
are enumerated exhaustively instead of median-closed, and labelings are
enumerated edge by edge against the corner-matching constraints instead of
being derived from the class order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Optional

from .errors import TooLarge
from .patterns import TrackSystem
from .trees import DualTree, orientation_consistent
from .windows import VertexFamily, explicit_family

MAX_ORACLE_CLASSES = 12
MAX_ORACLE_LABELS = 8
MAX_ORACLE_VERTICES = 8
DFS_BUDGET = 2_000_000


@dataclass(frozen=True)
class OrientationOracle:
    vertex_flips: frozenset[frozenset[str]]
    edges: frozenset[tuple[tuple[str, ...], tuple[str, ...], str]]


def oracle_orientations(system: TrackSystem) -> OrientationOracle:
    """All consistent class-side choices, expanded by band cuts.

    Enumerates every one of the 2^classes side choices, keeps the
    consistent ones, and subdivides adjacent pairs (differing in a single
    class) by the class's ShortLex-ordered cosets.
    """
    m = len(system.classes)
    if m > MAX_ORACLE_CLASSES:
        raise TooLarge(f"{m} classes exceed the oracle cap {MAX_ORACLE_CLASSES}")
    sk = system.sort_key

    consistent = [o for o in range(1 << m) if orientation_consistent(system, o)]

    def flips_of(orientation: int) -> frozenset[str]:
        out: set[str] = set()
        for k in range(m):
            if (orientation >> k) & 1:
                out.update(system.classes[k])
        return frozenset(out)

    vertices: set[frozenset[str]] = {flips_of(o) for o in consistent}
    edges: set[tuple[tuple[str, ...], tuple[str, ...], str]] = set()

    def ekey(flips: frozenset[str]) -> tuple[str, ...]:
        return tuple(sorted(flips, key=sk))

    def add_edge(a: frozenset[str], b: frozenset[str], label: str):
        ka, kb = ekey(a), ekey(b)
        if (len(ka), ka) > (len(kb), kb):
            ka, kb = kb, ka
        edges.add((ka, kb, label))

    for a, b in itertools.combinations(consistent, 2):
        x = a ^ b
        if x & (x - 1):
            continue
        k = x.bit_length() - 1
        tail = a if not (a >> k) & 1 else b
        labels = sorted(system.classes[k], key=sk)
        prev = flips_of(tail)
        for step, label in enumerate(labels):
            nxt = prev | {label}
            if step == len(labels) - 1:
                nxt = flips_of(tail) | set(system.classes[k])
            nxt = frozenset(nxt)
            vertices.add(nxt)
            add_edge(prev, nxt, label)
            prev = nxt

    return OrientationOracle(frozenset(vertices), frozenset(edges))


def tree_matches_oracle(tree: DualTree, oracle: OrientationOracle) -> bool:
    built = frozenset(v.flips for v in tree.vertices)
    return built == oracle.vertex_flips and tree.canonical_edges() == set(oracle.edges)


# --------------------------------------------------------------------------
# labelings


@dataclass
class LabelingOracle:
    edges: list[tuple[int, int]]
    labelings: list[tuple[tuple[str, ...], ...]]
    count: int
    expected_count: int


def oracle_labelings(system: TrackSystem) -> LabelingOracle:
    """Enumerate every per-edge label order consistent with corner matching.

    A labeling is valid when, in every triangle and at every corner, the
    sequences read away from the corner agree on the corner's line count.
    The two-triangle condition for disjoint edge pairs follows from the
    corner condition, so it is not enforced separately.
    """
    if len(system.labels) > MAX_ORACLE_LABELS:
        raise TooLarge(f"{len(system.labels)} labels exceed the oracle cap {MAX_ORACLE_LABELS}")
    if system.n > MAX_ORACLE_VERTICES:
        raise TooLarge(f"{system.n} vertices exceed the oracle cap {MAX_ORACLE_VERTICES}")

    table = system.table
    edges = [
        (i, j)
        for i in range(system.n) for j in range(i + 1, system.n)
        if table.d(i, j)
    ]
    edge_index = {e: k for k, e in enumerate(edges)}
    corner_checks: dict[int, list[tuple[int, bool, bool, int]]] = {k: [] for k in range(len(edges))}
    # for each unordered edge pair sharing a vertex, record the corner constraint
    for (e1, e2) in itertools.combinations(edges, 2):
        shared = set(e1) & set(e2)
        if not shared:
            continue
        a = shared.pop()
        count = len(table.diff(*e1) & table.diff(*e2))
        if count == 0:
            continue
        k1, k2 = edge_index[e1], edge_index[e2]
        corner_checks[max(k1, k2)].append(
            (min(k1, k2), e1[0] != a, e2[0] != a, count)
            if k1 < k2 else (min(k1, k2), e2[0] != a, e1[0] != a, count))

    perms_per_edge = [
        sorted(itertools.permutations(sorted(table.diff(i, j), key=system.sort_key)))
        for i, j in edges
    ]

    budget = [DFS_BUDGET]
    chosen: list[tuple[str, ...]] = []
    found: list[tuple[tuple[str, ...], ...]] = []

    def prefix(seq: tuple[str, ...], reverse: bool, k: int) -> tuple[str, ...]:
        return tuple(reversed(seq))[:k] if reverse else seq[:k]

    def dfs(k: int):
        if k == len(edges):
            found.append(tuple(chosen))
            return
        for perm in perms_per_edge[k]:
            budget[0] -= 1
            if budget[0] < 0:
                raise TooLarge("labeling enumeration exceeded its budget")
            ok = True
            for other, rev_other, rev_self, count in corner_checks[k]:
                if prefix(perm, rev_self, count) != prefix(chosen[other], rev_other, count):
                    ok = False
                    break
            if ok:
                chosen.append(perm)
                dfs(k + 1)
                chosen.pop()

    dfs(0)
    expected = 1
    for cls in system.classes:
        for f in range(2, len(cls) + 1):
            expected *= f
    return LabelingOracle(edges, found, len(found), expected)


def labeling_matches_canonical(system: TrackSystem,
                               canonical: dict[tuple[int, int], tuple[str, ...]],
                               labeling: tuple[tuple[str, ...], ...],
                               edges: list[tuple[int, int]]) -> bool:
    """True when the labeling is the canonical one composed with a single
    within-class permutation applied consistently on every edge."""
    mapping: dict[str, str] = {}
    for edge, seq in zip(edges, labeling):
        want = canonical[edge]
        if len(seq) != len(want):
            return False
        for a, b in zip(want, seq):
            if system.class_of[a] != system.class_of[b]:
                return False
            if mapping.setdefault(a, b) != b:
                return False
    image = list(mapping.values())
    return len(set(image)) == len(image)


# --------------------------------------------------------------------------
# random nested families


@dataclass(frozen=True)
class RandomFamilyInfo:
    seed: int
    vertex_count: int
    class_sizes: tuple[int, ...]
    track_count: int
    tree_vertex_count: int
    tree_edge_count: int


def random_nested_family(seed: int, max_vertices: int = 12,
                         max_extra_cosets: int = 4,
                         max_constants: int = 2,
                         exact_classes: Optional[int] = None) -> tuple[VertexFamily, RandomFamilyInfo]:
    """Grow a random tree, read its edge bipartitions as tracks, and thicken
    some tracks into parallel classes.  Nested by construction."""
    rng = random.Random(seed)
    if exact_classes is not None:
        if exact_classes < 1:
            raise ValueError("need at least one class")
        n = exact_classes + 1
    else:
        n = rng.randint(2, max_vertices)
    parent = [rng.randrange(i) for i in range(1, n)]

    children: dict[int, list[int]] = {i: [] for i in range(n)}
    for child, p in enumerate(parent, start=1):
        children[p].append(child)

    def subtree(root: int) -> frozenset[int]:
        out = set()
        stack = [root]
        while stack:
            x = stack.pop()
            out.add(x)
            stack.extend(children[x])
        return frozenset(out)

    sizes = [1] * (n - 1)
    for _ in range(rng.randint(0, max_extra_cosets)):
        sizes[rng.randrange(n - 1)] += 1

    labels: list[list[str]] = []
    counter = 0
    for s in sizes:
        group = []
        for _ in range(s):
            group.append(f"c{counter:02d}")
            counter += 1
        labels.append(group)

    constants = [f"z{i}" for i in range(rng.randint(0, max_constants))]
    constant_side = {z: rng.random() < 0.5 for z in constants}

    inside: list[frozenset[int]] = [subtree(child) for child in range(1, n)]
    subsets = []
    for v in range(n):
        members = set()
        for e in range(n - 1):
            if v in inside[e]:
                members.update(labels[e])
        members.update(z for z in constants if constant_side[z])
        subsets.append((f"v{v}", frozenset(members)))

    universe = [c for group in labels for c in group] + constants
    family = explicit_family(universe, subsets, base_index=0)
    info = RandomFamilyInfo(
        seed, n, tuple(sizes), sum(sizes),
        n + sum(s - 1 for s in sizes), sum(sizes))
    return family, info
