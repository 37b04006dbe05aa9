"""Exact arithmetic for the supported group families.

Three kinds of group are supported, all with a bit-exact word syntax in
which lowercase letters are generators and the matching uppercase letter
is the inverse:

* ``free(rank)``           -- canonical form: freely reduced words.
* ``free_abelian(rank)``   -- canonical form: exponent vectors rendered as
                              sorted letter runs (``(2, -1)`` over x,y is
                              ``"xxY"``).
* ``free_product_cyclic``  -- free products of finite cyclic factors;
                              canonical form alternates factors with
                              exponents in ``[1, order - 1]`` written as
                              repeated lowercase letters.

The identity is the empty word everywhere and is displayed as ``"1"``.
Subgroup membership engines: Stallings folding automaton (free), integer
lattice reduction (free_abelian), and factor/cyclic special forms for free
products.  Right-coset keys are ShortLex-least representatives, computed
per ball by grouping elements with the membership engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import (
    ExponentOutOfRange,
    ModelMismatch,
    RadiusTooLarge,
    SearchBudgetExceeded,
    UnknownLetter,
    UnsupportedSubgroup,
)

DEFAULT_MAX_RADIUS = 12
DEFAULT_MAX_ELEMENTS = 200_000

FREE = "free"
FREE_ABELIAN = "free_abelian"
FREE_PRODUCT_CYCLIC = "free_product_cyclic"

_DEFAULT_LETTERS = {
    FREE: "abcdefgh",
    FREE_ABELIAN: "xyzuvw",
    FREE_PRODUCT_CYCLIC: "stuvwxyz",
}


def _swap_case(ch: str) -> str:
    return ch.lower() if ch.isupper() else ch.upper()


@dataclass(frozen=True)
class GroupModel:
    """A group family plus its generator alphabet."""

    kind: str
    letters: tuple[str, ...]
    orders: tuple[int, ...] = ()

    def __post_init__(self):
        if self.kind not in (FREE, FREE_ABELIAN, FREE_PRODUCT_CYCLIC):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if not self.letters:
            raise ValueError("rank must be at least 1")
        seen = set()
        for ch in self.letters:
            if len(ch) != 1 or not ch.isalpha() or not ch.islower():
                raise ValueError(f"generator letters must be single lowercase letters, got {ch!r}")
            if ch in seen:
                raise ValueError(f"duplicate generator letter {ch!r}")
            seen.add(ch)
        if self.kind == FREE_PRODUCT_CYCLIC:
            if len(self.orders) != len(self.letters):
                raise ValueError("one factor order per generator letter is required")
            for n in self.orders:
                if n < 2:
                    raise ValueError(f"cyclic factor orders must be at least 2, got {n}")
        elif self.orders:
            raise ValueError("orders are only meaningful for free_product_cyclic")

    # -- alphabet helpers --

    @property
    def rank(self) -> int:
        return len(self.letters)

    def letter_index(self, ch: str) -> int:
        low = ch.lower()
        try:
            return self.letters.index(low)
        except ValueError:
            raise UnknownLetter(f"letter {ch!r} is not declared in this model") from None

    def letter_rank(self, ch: str) -> int:
        # ShortLex alphabet order: a < A < b < B < ...
        return 2 * self.letter_index(ch) + (1 if ch.isupper() else 0)

    def sort_key(self, word: str):
        return (len(word), tuple(self.letter_rank(ch) for ch in word))

    # -- element constructors --

    def identity(self) -> "GroupElement":
        return GroupElement(self, "")

    def normalize(self, raw: str) -> "GroupElement":
        """Canonical form of a raw word; idempotent by construction."""
        for ch in raw:
            self.letter_index(ch)  # raises UnknownLetter
        if self.kind == FREE:
            word = _reduce_free(raw)
        elif self.kind == FREE_ABELIAN:
            word = _render_vector(self, _word_to_vector(self, raw))
        else:
            word = _render_syllables(self, _word_to_syllables(self, raw))
        return GroupElement(self, word)

    def element_from_vector(self, vector: Sequence[int]) -> "GroupElement":
        if self.kind != FREE_ABELIAN:
            raise ModelMismatch("exponent vectors only apply to free_abelian models")
        if len(vector) != self.rank:
            raise ExponentOutOfRange(f"expected {self.rank} exponents, got {len(vector)}")
        return GroupElement(self, _render_vector(self, tuple(vector)))

    # -- balls --

    def ball(
        self,
        radius: int,
        max_radius: int = DEFAULT_MAX_RADIUS,
        max_elements: int = DEFAULT_MAX_ELEMENTS,
    ) -> list["GroupElement"]:
        """All canonical elements of word length <= radius, in ShortLex order."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        if radius > max_radius:
            raise RadiusTooLarge(f"radius {radius} exceeds the configured maximum {max_radius}")
        if self.kind == FREE:
            words = _free_ball(self, radius, max_elements)
        elif self.kind == FREE_ABELIAN:
            words = _abelian_ball(self, radius, max_elements)
        else:
            words = _fpc_ball(self, radius, max_elements)
        return [GroupElement(self, w) for w in words]


def free_group(rank: int, letters: Optional[str] = None) -> GroupModel:
    return GroupModel(FREE, _pick_letters(FREE, rank, letters))


def free_abelian_group(rank: int, letters: Optional[str] = None) -> GroupModel:
    return GroupModel(FREE_ABELIAN, _pick_letters(FREE_ABELIAN, rank, letters))


def free_product_of_cyclics(orders: Sequence[int], letters: Optional[str] = None) -> GroupModel:
    return GroupModel(
        FREE_PRODUCT_CYCLIC,
        _pick_letters(FREE_PRODUCT_CYCLIC, len(orders), letters),
        tuple(orders),
    )


def _pick_letters(kind: str, rank: int, letters: Optional[str]) -> tuple[str, ...]:
    if rank < 1:
        raise ValueError("rank must be at least 1")
    if letters is None:
        pool = _DEFAULT_LETTERS[kind]
        if rank > len(pool):
            raise ValueError(f"provide explicit letters for rank {rank}")
        return tuple(pool[:rank])
    if len(letters) != rank:
        raise ValueError("number of letters must match the rank")
    return tuple(letters)


@dataclass(frozen=True)
class GroupElement:
    """An element in canonical normal form.  Construct via GroupModel methods."""

    model: GroupModel
    word: str

    def __len__(self) -> int:
        return len(self.word)

    def __repr__(self) -> str:
        return self.word if self.word else "1"

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if self.model != other.model:
            raise ModelMismatch("elements live in different group models")
        return compose(self, other)

    def inverse(self) -> "GroupElement":
        return invert(self)

    def is_identity(self) -> bool:
        return not self.word

    def sort_key(self):
        return self.model.sort_key(self.word)


# --------------------------------------------------------------------------
# free words


def _reduce_free(raw: str) -> str:
    stack: list[str] = []
    for ch in raw:
        if stack and stack[-1] == _swap_case(ch):
            stack.pop()
        else:
            stack.append(ch)
    return "".join(stack)


def _free_ball(model: GroupModel, radius: int, cap: int) -> list[str]:
    alphabet = sorted(
        [ch for g in model.letters for ch in (g, g.upper())],
        key=model.letter_rank,
    )
    words = [""]
    frontier = [""]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for ch in alphabet:
                if w and w[-1] == _swap_case(ch):
                    continue
                nxt.append(w + ch)
        words.extend(nxt)
        if len(words) > cap:
            raise RadiusTooLarge(f"ball size exceeds the element cap {cap}")
        frontier = nxt
    return words


# --------------------------------------------------------------------------
# free abelian words


def _word_to_vector(model: GroupModel, raw: str) -> tuple[int, ...]:
    vec = [0] * model.rank
    for ch in raw:
        vec[model.letter_index(ch)] += -1 if ch.isupper() else 1
    return tuple(vec)


def _render_vector(model: GroupModel, vec: tuple[int, ...]) -> str:
    parts = []
    for i, e in enumerate(vec):
        if e > 0:
            parts.append(model.letters[i] * e)
        elif e < 0:
            parts.append(model.letters[i].upper() * (-e))
    return "".join(parts)


def _abelian_ball(model: GroupModel, radius: int, cap: int) -> list[str]:
    rng = range(-radius, radius + 1)
    words = []
    for vec in itertools.product(rng, repeat=model.rank):
        if sum(abs(e) for e in vec) <= radius:
            words.append(_render_vector(model, vec))
            if len(words) > cap:
                raise RadiusTooLarge(f"ball size exceeds the element cap {cap}")
    words.sort(key=model.sort_key)
    return words


# --------------------------------------------------------------------------
# free products of cyclic factors; syllables are (letter_index, exponent)


def _word_to_syllables(model: GroupModel, raw: str) -> list[list[int]]:
    stack: list[list[int]] = []
    for ch in raw:
        i = model.letter_index(ch)
        n = model.orders[i]
        delta = -1 if ch.isupper() else 1
        if stack and stack[-1][0] == i:
            stack[-1][1] = (stack[-1][1] + delta) % n
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([i, delta % n])
    return stack


def _merge_syllables(model: GroupModel, left: list[list[int]], right: Iterable[Sequence[int]]) -> list[list[int]]:
    stack = [list(s) for s in left]
    for i, e in right:
        n = model.orders[i]
        if stack and stack[-1][0] == i:
            stack[-1][1] = (stack[-1][1] + e) % n
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([i, e % n])
    return stack


def _render_syllables(model: GroupModel, syllables: Iterable[Sequence[int]]) -> str:
    out = []
    for i, e in syllables:
        if not 1 <= e <= model.orders[i] - 1:
            raise ExponentOutOfRange(f"exponent {e} out of range for factor {model.letters[i]!r}")
        out.append(model.letters[i] * e)
    return "".join(out)


def _fpc_ball(model: GroupModel, radius: int, cap: int) -> list[str]:
    # BFS over canonical words, appending one lowercase letter at a time.
    words = [""]
    frontier = [("", -1, 0)]  # (word, last factor, last exponent)
    for _ in range(radius):
        nxt = []
        for w, last, exp in frontier:
            for i, ch in enumerate(model.letters):
                if i == last:
                    if exp + 1 <= model.orders[i] - 1:
                        nxt.append((w + ch, i, exp + 1))
                else:
                    nxt.append((w + ch, i, 1))
        words.extend(w for w, _, _ in nxt)
        if len(words) > cap:
            raise RadiusTooLarge(f"ball size exceeds the element cap {cap}")
        frontier = nxt
    words.sort(key=model.sort_key)
    return words


# --------------------------------------------------------------------------
# composition and inversion


def compose(e1: GroupElement, e2: GroupElement) -> GroupElement:
    if e1.model != e2.model:
        raise ModelMismatch("elements live in different group models")
    model = e1.model
    if model.kind == FREE:
        word = e1.word
        stack = list(word)
        for ch in e2.word:
            if stack and stack[-1] == _swap_case(ch):
                stack.pop()
            else:
                stack.append(ch)
        return GroupElement(model, "".join(stack))
    if model.kind == FREE_ABELIAN:
        v1 = _word_to_vector(model, e1.word)
        v2 = _word_to_vector(model, e2.word)
        return GroupElement(model, _render_vector(model, tuple(a + b for a, b in zip(v1, v2))))
    merged = _merge_syllables(model, _word_to_syllables(model, e1.word), _word_to_syllables(model, e2.word))
    return GroupElement(model, _render_syllables(model, merged))


def invert(e: GroupElement) -> GroupElement:
    model = e.model
    if model.kind == FREE:
        return GroupElement(model, "".join(_swap_case(ch) for ch in reversed(e.word)))
    if model.kind == FREE_ABELIAN:
        vec = _word_to_vector(model, e.word)
        return GroupElement(model, _render_vector(model, tuple(-a for a in vec)))
    syl = _word_to_syllables(model, e.word)
    inv = [[i, model.orders[i] - exp] for i, exp in reversed(syl)]
    return GroupElement(model, _render_syllables(model, inv))


# --------------------------------------------------------------------------
# membership engines


class FoldingAutomaton:
    """Folded core graph of a finitely generated subgroup of a free group.

    States are integers with 0 the base state; transitions carry single
    letters and always exist in inverse pairs.  After folding, the
    automaton is deterministic and every state lies on an accepted loop
    through the base (the construction starts from a wedge of generator
    loops and folding preserves that property).
    """

    def __init__(self, model: GroupModel, generators: Sequence[GroupElement]):
        self.model = model
        next_: list[dict[str, int]] = [{}]
        pending: list[tuple[int, int]] = []

        for g in generators:
            state = 0
            for ch in g.word:
                t = next_[state].get(ch)
                if t is None:
                    next_.append({})
                    t = len(next_) - 1
                    next_[state][ch] = t
                    next_[t][_swap_case(ch)] = state
                state = t
            pending.append((state, 0))

        self._fold(next_, pending)

    def _fold(self, next_: list[dict[str, int]], pending: list[tuple[int, int]]):
        parent = list(range(len(next_)))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        queue = list(pending)
        while queue:
            a, b = queue.pop()
            a, b = find(a), find(b)
            if a == b:
                continue
            # keep the base state alive, otherwise keep the larger dict
            if b == 0 or (a != 0 and len(next_[b]) > len(next_[a])):
                a, b = b, a
            parent[b] = a
            for ch, t in next_[b].items():
                if ch in next_[a]:
                    queue.append((next_[a][ch], t))
                else:
                    next_[a][ch] = t
            next_[b] = {}

        # compact to reachable states in BFS order (letters in rank order)
        order = sorted(
            [ch for g in self.model.letters for ch in (g, g.upper())],
            key=self.model.letter_rank,
        )
        remap = {find(0): 0}
        bfs = [find(0)]
        i = 0
        while i < len(bfs):
            s = bfs[i]
            i += 1
            for ch in order:
                t = next_[s].get(ch)
                if t is None:
                    continue
                t = find(t)
                if t not in remap:
                    remap[t] = len(remap)
                    bfs.append(t)
        self.next: list[dict[str, int]] = [{} for _ in remap]
        for s in bfs:
            for ch, t in next_[s].items():
                self.next[remap[s]][ch] = remap[find(t)]

    @property
    def state_count(self) -> int:
        return len(self.next)

    def trace(self, word: str) -> tuple[int, str]:
        """Schreier position of the coset H*word: (core state, hanging tail)."""
        state = 0
        tail: list[str] = []
        for ch in word:
            if tail:
                if tail[-1] == _swap_case(ch):
                    tail.pop()
                else:
                    tail.append(ch)
            else:
                t = self.next[state].get(ch)
                if t is None:
                    tail.append(ch)
                else:
                    state = t
        return state, "".join(tail)

    def accepts(self, word: str) -> bool:
        return self.trace(word) == (0, "")


class _FreeEngine:
    def __init__(self, model: GroupModel, generators: Sequence[GroupElement]):
        self.automaton = FoldingAutomaton(model, generators)

    def member(self, e: GroupElement) -> bool:
        return self.automaton.accepts(e.word)

    def fingerprint(self, e: GroupElement):
        return self.automaton.trace(e.word)


class IntegerLattice:
    """Sublattice of Z^n in row echelon form with positive pivots."""

    def __init__(self, rank: int, rows: Sequence[Sequence[int]]):
        self.rank = rank
        work = [list(r) for r in rows if any(r)]
        basis: list[list[int]] = []
        for col in range(rank):
            active = [r for r in work if r[col] != 0]
            rest = [r for r in work if r[col] == 0]
            while len(active) > 1:
                active.sort(key=lambda r: abs(r[col]))
                p = active[0]
                if p[col] < 0:
                    p = [-a for a in p]
                survivors = [p]
                for r in active[1:]:
                    q = r[col] // p[col]
                    r2 = [a - q * b for a, b in zip(r, p)]
                    if r2[col] != 0:
                        survivors.append(r2)
                    elif any(r2):
                        rest.append(r2)
                active = survivors
            if active:
                p = active[0]
                if p[col] < 0:
                    p = [-a for a in p]
                basis.append(p)
            work = rest
        self.basis = basis
        self.pivots = [next(i for i, a in enumerate(row) if a) for row in basis]

    def reduce(self, vector: Sequence[int]) -> tuple[int, ...]:
        v = list(vector)
        for row, col in zip(self.basis, self.pivots):
            q = v[col] // row[col]
            v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def contains(self, vector: Sequence[int]) -> bool:
        return not any(self.reduce(vector))


class _LatticeEngine:
    def __init__(self, model: GroupModel, generators: Sequence[GroupElement]):
        self.model = model
        self.lattice = IntegerLattice(model.rank, [_word_to_vector(model, g.word) for g in generators])

    def member(self, e: GroupElement) -> bool:
        return self.lattice.contains(_word_to_vector(self.model, e.word))

    def fingerprint(self, e: GroupElement):
        return self.lattice.reduce(_word_to_vector(self.model, e.word))


class _TrivialEngine:
    def member(self, e: GroupElement) -> bool:
        return e.is_identity()

    def fingerprint(self, e: GroupElement):
        return e.word


class _FactorCyclicEngine:
    """Subgroup of a single cyclic factor: <letter^step> with step | order."""

    def __init__(self, model: GroupModel, letter_index: int, exponents: Sequence[int]):
        self.model = model
        self.letter_index = letter_index
        n = model.orders[letter_index]
        g = n
        for e in exponents:
            g = _gcd(g, e % n)
        self.step = g if g else n

    def member(self, e: GroupElement) -> bool:
        syl = _word_to_syllables(self.model, e.word)
        if not syl:
            return True
        if len(syl) != 1 or syl[0][0] != self.letter_index:
            return False
        return syl[0][1] % self.step == 0

    def fingerprint(self, e: GroupElement):
        syl = _word_to_syllables(self.model, e.word)
        if syl and syl[0][0] == self.letter_index:
            residue = syl[0][1] % self.step
            rest = _render_syllables(self.model, syl[1:])
        else:
            residue = 0
            rest = e.word
        return (residue, rest)


class _CyclicEngine:
    """Cyclic subgroup <w> of a free product, via cyclic reduction w = u v u^-1."""

    def __init__(self, model: GroupModel, generator: GroupElement):
        self.model = model
        u = model.identity()
        v = generator
        while True:
            syl = _word_to_syllables(model, v.word)
            if len(syl) < 2 or syl[0][0] != syl[-1][0]:
                break
            head = GroupElement(model, _render_syllables(model, [syl[0]]))
            u = compose(u, head)
            v = compose(compose(invert(head), v), head)
        self.u = u
        self.v = v
        syl = _word_to_syllables(model, v.word)
        if len(syl) <= 1:
            # finite order: enumerate the whole cyclic group
            powers = {model.identity().word}
            acc = generator
            while not acc.is_identity():
                powers.add(acc.word)
                acc = compose(acc, generator)
            self.finite_powers: Optional[set[str]] = powers
        else:
            self.finite_powers = None
            self.v_inv = invert(v)

    def member(self, e: GroupElement) -> bool:
        if self.finite_powers is not None:
            return e.word in self.finite_powers
        z = compose(compose(invert(self.u), e), self.u)
        if z.is_identity():
            return True
        # powers of a cyclically reduced word concatenate without merging,
        # but the inverse word may have a different canonical length
        for w in (self.v.word, self.v_inv.word):
            if len(z.word) % len(w) == 0 and z.word == w * (len(z.word) // len(w)):
                return True
        return False

    def fingerprint(self, e: GroupElement):
        return None  # fall back to pairwise membership grouping


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


@dataclass
class SubgroupModel:
    """A subgroup given by generators, with a decidable membership engine."""

    model: GroupModel
    generators: tuple[GroupElement, ...]
    engine: object = field(repr=False)

    def member(self, e: GroupElement) -> bool:
        if e.model != self.model:
            raise ModelMismatch("element belongs to a different group model")
        return self.engine.member(e)

    def __contains__(self, e: GroupElement) -> bool:
        return self.member(e)

    def fingerprint(self, e: GroupElement):
        fp = getattr(self.engine, "fingerprint", None)
        return fp(e) if fp else None

    def is_trivial(self) -> bool:
        return not self.generators


def subgroup(model: GroupModel, generator_words: Sequence[str]) -> SubgroupModel:
    gens = tuple(g for g in (model.normalize(w) for w in generator_words) if not g.is_identity())
    if model.kind == FREE:
        engine = _FreeEngine(model, gens) if gens else _TrivialEngine()
    elif model.kind == FREE_ABELIAN:
        engine = _LatticeEngine(model, gens) if gens else _TrivialEngine()
    else:
        engine = _fpc_engine(model, gens)
    return SubgroupModel(model, gens, engine)


def _fpc_engine(model: GroupModel, gens: Sequence[GroupElement]):
    if not gens:
        return _TrivialEngine()
    syllable_lists = [_word_to_syllables(model, g.word) for g in gens]
    if all(len(s) == 1 for s in syllable_lists):
        letters = {s[0][0] for s in syllable_lists}
        if len(letters) == 1:
            idx = letters.pop()
            return _FactorCyclicEngine(model, idx, [s[0][1] for s in syllable_lists])
    if len(gens) == 1:
        return _CyclicEngine(model, gens[0])
    raise UnsupportedSubgroup(
        "free_product_cyclic subgroups must lie in one factor or be cyclic on one generator"
    )


# --------------------------------------------------------------------------
# coset keys


class CosetTable:
    """Right-coset keys for every element of a ball.

    The key of an element e is the ShortLex-least element of He inside the
    ball; scanning the ball in ShortLex order and grouping by coset makes
    the first member of each coset its key.  Grouping uses the engine's
    coset fingerprint when available and pairwise membership tests
    otherwise.
    """

    def __init__(
        self,
        sub: SubgroupModel,
        elements: Sequence[GroupElement],
        pair_budget: int = 50_000_000,
    ):
        self.sub = sub
        self.elements = list(elements)
        self.key_of: dict[str, str] = {}
        keys: list[str] = []
        use_fp = sub.fingerprint(sub.model.identity()) is not None
        if use_fp:
            by_fp: dict[object, str] = {}
            for e in self.elements:
                fp = sub.fingerprint(e)
                k = by_fp.get(fp)
                if k is None:
                    by_fp[fp] = e.word
                    k = e.word
                    keys.append(k)
                self.key_of[e.word] = k
        else:
            key_elems: list[GroupElement] = []
            tests = 0
            for e in self.elements:
                found = None
                for k in key_elems:
                    tests += 1
                    if tests > pair_budget:
                        raise SearchBudgetExceeded("coset grouping exceeded its pair budget")
                    if sub.member(compose(e, invert(k))):
                        found = k.word
                        break
                if found is None:
                    key_elems.append(e)
                    keys.append(e.word)
                    found = e.word
                self.key_of[e.word] = found
        self.keys = keys  # ShortLex order, inherited from the element scan

    def key(self, e: GroupElement) -> str:
        try:
            return self.key_of[e.word]
        except KeyError:
            raise SearchBudgetExceeded(f"element {e!r} lies outside the tabulated ball") from None


def coset_key(sub: SubgroupModel, e: GroupElement, table: CosetTable) -> str:
    """ShortLex-least representative of He, looked up in a ball table."""
    if table.sub is not sub and table.sub.generators != sub.generators:
        raise ModelMismatch("coset table was built for a different subgroup")
    return table.key(e)


def display_word(word: str) -> str:
    return word if word else "1"
