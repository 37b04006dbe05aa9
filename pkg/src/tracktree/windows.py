"""Finite certified windows over a coset universe, base sets, and translate families.

A window truncates the right-coset space H\\G to the keys seen in a ball of
group elements.  Every quantity derived from the window carries a
certificate: it must stay clear of the boundary shell (keys first seen at
distance greater than radius - margin), and shipped instances are
additionally re-checked at radius + 2.  Vertex subsets are stored over the
core universe (shell removed), so that downstream set arithmetic is exact
wherever a certificate holds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .errors import CertificationFailure, ConflictingRule, UncertifiedWitness, PropernessFailed
from .groups import (
    CosetTable,
    GroupElement,
    GroupModel,
    SubgroupModel,
    compose,
    display_word,
    invert,
)


@dataclass(frozen=True)
class TranslateView:
    """Membership of a translated base set over the window universe."""

    known_in: frozenset[str]
    unknown: frozenset[str]


class Window:
    """A ball of group elements together with its coset-key universe."""

    def __init__(self, model: GroupModel, sub: SubgroupModel, radius: int, margin: int,
                 max_radius: Optional[int] = None):
        if margin < 1:
            raise ValueError("margin must be at least 1")
        if radius < 2 * margin:
            raise ValueError("radius must be at least twice the margin")
        self.model = model
        self.sub = sub
        self.radius = radius
        self.margin = margin
        kwargs = {} if max_radius is None else {"max_radius": max_radius}
        self.elements = model.ball(radius, **kwargs)
        self.table = CosetTable(sub, self.elements)
        self.omega: list[str] = list(self.table.keys)
        cut = radius - margin
        self.core: list[str] = [k for k in self.omega if len(k) <= cut]
        self.shell: frozenset[str] = frozenset(k for k in self.omega if len(k) > cut)
        self._core_set = frozenset(self.core)

    def sort_key(self, word: str):
        return self.model.sort_key(word)

    def key_element(self, key: str) -> GroupElement:
        return GroupElement(self.model, key)

    def act_key(self, key: str, g: GroupElement) -> Optional[str]:
        """Right action on coset keys, defined while the representative stays in the ball."""
        moved = compose(self.key_element(key), g)
        return self.table.key_of.get(moved.word)

    def translate(self, base_set: frozenset[str], g: GroupElement) -> TranslateView:
        """Membership table of base_set * g over the universe.

        A key k belongs to the translate iff the key of k * g^-1 belongs to
        the base set; keys whose pulled-back representative leaves the ball
        are reported as unknown.
        """
        ginv = invert(g)
        known_in = set()
        unknown = set()
        lookup = self.table.key_of
        for k in self.omega:
            moved = compose(self.key_element(k), ginv)
            kk = lookup.get(moved.word)
            if kk is None:
                unknown.add(k)
            elif kk in base_set:
                known_in.add(k)
        return TranslateView(frozenset(known_in), frozenset(unknown))


def build_window(model: GroupModel, sub: SubgroupModel, radius: int, margin: int,
                 max_radius: Optional[int] = None) -> Window:
    return Window(model, sub, radius, margin, max_radius=max_radius)


# --------------------------------------------------------------------------
# base sets


@dataclass(frozen=True)
class BaseSetSpec:
    """Prefix rules plus explicit include/exclude lists over coset keys.

    Membership of a key is decided by the longest matching prefix rule,
    then by the explicit lists, then by the default side.
    """

    rules: tuple[tuple[str, bool], ...] = ()
    includes: frozenset[str] = frozenset()
    excludes: frozenset[str] = frozenset()
    default_in: bool = False

    def __post_init__(self):
        clash = self.includes & self.excludes
        if clash:
            raise ConflictingRule(f"keys both included and excluded: {sorted(clash)}")
        sides: dict[str, bool] = {}
        for prefix, side in self.rules:
            if sides.setdefault(prefix, side) != side:
                raise ConflictingRule(f"prefix {prefix!r} declared with both sides")

    def decide(self, key: str) -> bool:
        best: Optional[tuple[str, bool]] = None
        for prefix, side in self.rules:
            if key.startswith(prefix):
                if best is None or len(prefix) > len(best[0]):
                    best = (prefix, side)
        if best is not None:
            return best[1]
        if key in self.includes:
            return True
        if key in self.excludes:
            return False
        return self.default_in


def build_base_set(window: Window, spec: BaseSetSpec) -> frozenset[str]:
    return frozenset(k for k in window.omega if spec.decide(k))


# --------------------------------------------------------------------------
# translate families


@dataclass(frozen=True)
class FamilyVertex:
    element: Optional[GroupElement]  # the translation; None in explicit mode
    members: frozenset[str]          # subset of the core universe
    name: str


class VertexFamily:
    """A deduplicated family of certified base-set translates.

    ``universe`` is the core key list in ShortLex order; ``diffs`` holds the
    certified symmetric difference of every vertex pair.
    """

    def __init__(self, universe: Sequence[str], vertices: Sequence[FamilyVertex],
                 base_index: int, diffs: dict[tuple[int, int], frozenset[str]],
                 sort_key: Callable[[str], tuple], window: Optional[Window] = None,
                 base_set: Optional[frozenset[str]] = None,
                 merge_notes: Optional[list[str]] = None):
        self.universe = list(universe)
        self.vertices = list(vertices)
        self.base_index = base_index
        self.diffs = dict(diffs)
        self.sort_key = sort_key
        self.window = window
        self.base_set = base_set
        self.merge_notes = list(merge_notes or [])

    def __len__(self) -> int:
        return len(self.vertices)

    def diff(self, i: int, j: int) -> frozenset[str]:
        if i == j:
            return frozenset()
        return self.diffs[(min(i, j), max(i, j))]

    def distance(self, i: int, j: int) -> int:
        return len(self.diff(i, j))


def explicit_family(universe: Sequence[str], subsets: Sequence[tuple[str, frozenset[str]]],
                    base_index: int = 0) -> VertexFamily:
    """Family given directly as subsets of an abstract universe (test mode)."""
    def sort_key(word: str):
        return (len(word), word)

    universe = sorted(dict.fromkeys(universe), key=sort_key)
    allowed = frozenset(universe)
    vertices = []
    seen: dict[frozenset[str], str] = {}
    for name, members in subsets:
        members = frozenset(members)
        stray = members - allowed
        if stray:
            raise ValueError(f"vertex {name!r} uses keys outside the universe: {sorted(stray)}")
        if members in seen:
            raise ValueError(f"vertex {name!r} duplicates vertex {seen[members]!r}")
        seen[members] = name
        vertices.append(FamilyVertex(None, members, name))
    diffs = {
        (i, j): vertices[i].members ^ vertices[j].members
        for i in range(len(vertices))
        for j in range(i + 1, len(vertices))
    }
    return VertexFamily(universe, vertices, base_index, diffs, sort_key)


def build_family(window: Window, base_set: frozenset[str],
                 translations: Sequence[GroupElement]) -> VertexFamily:
    """Translate the base set by each element, certify all pairwise differences,
    and merge duplicate translates."""
    if not any(g.is_identity() for g in translations):
        raise ValueError("translations must contain the identity (the base vertex)")

    views: list[tuple[GroupElement, TranslateView]] = []
    for g in translations:
        view = window.translate(base_set, g)
        if view.unknown - window.shell:
            raise CertificationFailure(
                display_word(g.word), display_word(g.word),
                "translate undecided inside the core; enlarge radius")
        views.append((g, view))

    def pair_diff(a: TranslateView, b: TranslateView) -> frozenset[str]:
        joint_unknown = a.unknown | b.unknown
        diff = frozenset(
            k for k in window.omega
            if k not in joint_unknown and ((k in a.known_in) != (k in b.known_in))
        )
        return diff

    # certify every pair first, then deduplicate
    kept: list[tuple[GroupElement, TranslateView]] = []
    merge_notes: list[str] = []
    for g, view in views:
        dup = None
        for g0, view0 in kept:
            diff = pair_diff(view, view0)
            if diff & window.shell:
                raise CertificationFailure(
                    display_word(g0.word), display_word(g.word),
                    "symmetric difference touches the boundary shell; enlarge radius")
            if not diff:
                dup = g0
                break
        if dup is None:
            kept.append((g, view))
        else:
            merge_notes.append(
                f"translate by {display_word(g.word)} duplicates translate by "
                f"{display_word(dup.word)}; merged")

    core = frozenset(window.core)
    vertices = [
        FamilyVertex(g, view.known_in & core, f"A*{display_word(g.word)}")
        for g, view in kept
    ]
    base_index = next(i for i, (g, _) in enumerate(kept) if g.is_identity())
    diffs = {}
    for i in range(len(kept)):
        for j in range(i + 1, len(kept)):
            diffs[(i, j)] = pair_diff(kept[i][1], kept[j][1])
    return VertexFamily(window.core, vertices, base_index, diffs,
                        window.sort_key, window=window, base_set=base_set,
                        merge_notes=merge_notes)


# --------------------------------------------------------------------------
# hypothesis checks


@dataclass
class AlmostInvarianceEntry:
    word: str
    witness: tuple[str, ...]
    certified: bool


@dataclass
class ExpectedStabilizerEntry:
    word: str
    fixes_base: bool
    certified: bool


@dataclass
class HypothesisReport:
    left_invariance: str
    almost_invariance: list[AlmostInvarianceEntry]
    properness_ok: bool
    properness_detail: str
    expected_k: list[ExpectedStabilizerEntry]
    certified: bool = field(init=False)
    expected_k_ok: bool = field(init=False)

    def __post_init__(self):
        self.certified = all(e.certified for e in self.almost_invariance) and all(
            e.certified for e in self.expected_k)
        self.expected_k_ok = all(e.fixes_base for e in self.expected_k)

    def raise_for_status(self, require_proper: bool = False):
        if not self.certified:
            bad = [e.word for e in self.almost_invariance if not e.certified]
            bad += [e.word for e in self.expected_k if not e.certified]
            raise UncertifiedWitness(f"uncertified witness sets for {bad}")
        if require_proper and not self.properness_ok:
            raise PropernessFailed(self.properness_detail)


def hypothesis_report(window: Window, base_set: frozenset[str],
                      translations: Sequence[GroupElement],
                      expected_k: Optional[SubgroupModel] = None) -> HypothesisReport:
    """Check the standing hypotheses on the base set over the window.

    Left invariance holds structurally (the base set is a set of coset
    keys).  Almost invariance is witnessed per translation by the finite
    coset set separating the base set from its translate.  Properness is a
    shell-meeting heuristic: evidence, never proof.
    """
    base_view = window.translate(base_set, window.model.identity())
    entries = []
    for g in translations:
        view = window.translate(base_set, g)
        joint_unknown = view.unknown | base_view.unknown
        witness = sorted(
            (k for k in window.omega
             if k not in joint_unknown and ((k in view.known_in) != (k in base_view.known_in))),
            key=window.sort_key)
        certified = not (joint_unknown - window.shell) and not (set(witness) & window.shell)
        entries.append(AlmostInvarianceEntry(display_word(g.word), tuple(witness), certified))

    inside = base_set
    properness_ok = True
    detail = "base set and complement meet every populated shell"
    if not inside:
        properness_ok, detail = False, "base set is empty"
    elif len(inside) == len(window.omega):
        properness_ok, detail = False, "complement is empty"
    else:
        populated = 0
        for level in range(window.margin, window.radius - window.margin + 1):
            shell_keys = [k for k in window.omega if len(k) == level]
            if not shell_keys:
                continue
            populated += 1
            hit_in = any(k in inside for k in shell_keys)
            hit_out = any(k not in inside for k in shell_keys)
            if not hit_in or not hit_out:
                side = "base set" if not hit_in else "complement"
                properness_ok = False
                detail = f"{side} misses the distance-{level} shell"
                break
        if properness_ok and populated == 0:
            properness_ok = False
            detail = "no populated shells in the heuristic range"

    k_entries = []
    if expected_k is not None:
        for k in expected_k.generators:
            view = window.translate(base_set, k)
            joint_unknown = view.unknown | base_view.unknown
            moved = not all(
                (x in view.known_in) == (x in base_view.known_in)
                for x in window.omega if x not in joint_unknown)
            certified = not (joint_unknown - window.shell)
            k_entries.append(ExpectedStabilizerEntry(display_word(k.word), not moved, certified))

    return HypothesisReport("pass", entries, properness_ok, detail, k_entries)


# --------------------------------------------------------------------------
# stability re-checks


@dataclass(frozen=True)
class StabilityEntry:
    pair: tuple[str, str]
    stable: bool
    diff_small: tuple[str, ...]
    diff_large: tuple[str, ...]


def radius_stability_report(window: Window, base_spec: BaseSetSpec,
                            translations: Sequence[GroupElement]) -> list[StabilityEntry]:
    """Recompute every pairwise witness set at radius + 2 and compare."""
    big = Window(window.model, window.sub, window.radius + 2, window.margin,
                 max_radius=window.radius + 2)
    small_sets = build_family(window, build_base_set(window, base_spec), translations)
    big_sets = build_family(big, build_base_set(big, base_spec), translations)
    out = []
    small_by_word = {v.element.word: i for i, v in enumerate(small_sets.vertices)}
    big_by_word = {v.element.word: i for i, v in enumerate(big_sets.vertices)}
    if set(small_by_word) != set(big_by_word):
        # duplicate structure must agree between radii
        words = sorted(set(small_by_word) ^ set(big_by_word))
        raise CertificationFailure(words[0], words[-1], "duplicate structure changed with radius")
    words = sorted(small_by_word)
    for a in range(len(words)):
        for b in range(a + 1, len(words)):
            wi, wj = words[a], words[b]
            d_small = sorted(small_sets.diff(small_by_word[wi], small_by_word[wj]),
                             key=window.sort_key)
            d_big = sorted(big_sets.diff(big_by_word[wi], big_by_word[wj]),
                           key=window.sort_key)
            out.append(StabilityEntry(
                (display_word(wi), display_word(wj)),
                d_small == d_big, tuple(d_small), tuple(d_big)))
    return out
