"""Permutations, sort words, Young-subgroup actions and exact finite quotients.

Conventions, fixed once and used by every other module:

* A permutation ``p`` of degree ``n`` is a bijection of positions
  ``{0, ..., n-1}``; ``p(i)`` is ``p.images[i]``.
* ``compose(p, q)`` is the function ``i -> p(q(i))``.
* Words (tuples of sorts) carry a right action: ``act_word(w, p)[i] == w[p(i)]``,
  so ``act_word(act_word(w, p), q) == act_word(w, compose(p, q))``.
* An arrow ``p: v -> w`` between words exists iff ``w == act_word(v, p)``.
  With this convention the arrow ``p: u -> v`` followed by ``q: v -> w``
  (diagram order) is the arrow ``compose(p, q): u -> w``.
* A cell of a symmetric sequence is presented at the canonical (sorted) word
  ``c`` and transports contravariantly: the arrow ``h: c -> c`` acts on labels
  by ``act(label, h)`` with ``act(act(x, g), h) == act(x, compose(h, g))``.

The chosen orientation (arrows relabel positions of the target from positions
of the source) is one of the two possible readings of permutation arrows in a
free symmetric monoidal category; functoriality tests pin it down.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Optional

Sort = Hashable
Word = tuple
Label = Hashable


class InputError(ValueError):
    """Malformed or incompatible input data."""


class ValidationError(ValueError):
    """A structural law failed; carries a human-readable witness."""


class BudgetError(RuntimeError):
    """An enumeration exceeded its configured budget."""


def skey(value):
    """Total order key for the heterogeneous hashables used as sorts/labels."""
    if isinstance(value, bool):
        return (0, int(value))
    if isinstance(value, int):
        return (0, value)
    if isinstance(value, str):
        return (1, value)
    if isinstance(value, tuple):
        return (2, tuple(skey(v) for v in value))
    if value is None:
        return (3, 0)
    if isinstance(value, frozenset):
        return (4, tuple(sorted(skey(v) for v in value)))
    return (5, repr(value))


def ssorted(values):
    return tuple(sorted(values, key=skey))


@dataclass(frozen=True)
class Perm:
    """A permutation of ``{0, ..., n-1}`` in one-line notation."""

    images: tuple

    def __post_init__(self):
        n = len(self.images)
        if sorted(self.images) != list(range(n)):
            raise InputError(f"not a permutation of 0..{n - 1}: {self.images!r}")

    @staticmethod
    def identity(n: int) -> "Perm":
        return Perm(tuple(range(n)))

    @staticmethod
    def transposition(n: int, i: int) -> "Perm":
        """Adjacent transposition swapping positions i and i+1."""
        im = list(range(n))
        im[i], im[i + 1] = im[i + 1], im[i]
        return Perm(tuple(im))

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i]

    def is_identity(self) -> bool:
        return all(v == i for i, v in enumerate(self.images))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.images)
        for i, v in enumerate(self.images):
            inv[v] = i
        return Perm(tuple(inv))


def compose(p: Perm, q: Perm) -> Perm:
    """Function composition ``i -> p(q(i))``; diagram-order arrow composite."""
    if p.degree != q.degree:
        raise InputError("degree mismatch in compose")
    return Perm(tuple(p.images[j] for j in q.images))


def act_word(w: Word, p: Perm) -> Word:
    if len(w) != p.degree:
        raise InputError("word/permutation degree mismatch")
    return tuple(w[p(i)] for i in range(len(w)))


@lru_cache(maxsize=65536)
def canonical_word(w: Word) -> tuple[Word, Perm]:
    """Stable sort of ``w`` plus the transport ``t`` with ``w[i] == c[t(i)]``.

    The transport is order-preserving within each equal-sort run, so it is
    the unique stable-sort permutation; it is an arrow ``t: c -> w``.
    """
    order = sorted(range(len(w)), key=lambda i: (skey(w[i]), i))
    cw = tuple(w[i] for i in order)
    # position j of cw holds original position order[j]; invert to map w->cw
    t = [0] * len(w)
    for j, i in enumerate(order):
        t[i] = j
    return cw, Perm(tuple(t))


def is_canonical(w: Word) -> bool:
    return all(skey(w[i]) <= skey(w[i + 1]) for i in range(len(w) - 1))


@lru_cache(maxsize=65536)
def stab_gens(w: Word) -> tuple[int, ...]:
    """Adjacent transpositions (i, i+1) generating the Young stabilizer of w."""
    return tuple(i for i in range(len(w) - 1) if w[i] == w[i + 1])


def stab_decompose(w: Word, p: Perm) -> list[int]:
    """Write ``p`` in the Young stabilizer of ``w`` as adjacent transpositions.

    Returns positions ``[t1, ..., tk]`` with ``p == t1 o t2 o ... o tk`` under
    ``compose``.  Raises if ``p`` does not stabilize ``w``.
    """
    if act_word(w, p) != w:
        raise InputError(f"{p.images} does not stabilize {w}")
    images = list(p.images)
    recorded = []
    # bubble: right-composing with s_i swaps the values at positions i, i+1
    changed = True
    while changed:
        changed = False
        for i in range(len(images) - 1):
            if images[i] > images[i + 1]:
                if w[i] != w[i + 1]:
                    raise InputError("stabilizer decomposition left its Young block")
                images[i], images[i + 1] = images[i + 1], images[i]
                recorded.append(i)
                changed = True
    # p o (s_{r1} o ... o s_{rk}) == id, hence p == s_{rk} o ... o s_{r1}
    return list(reversed(recorded))


@lru_cache(maxsize=65536)
def word_arrows(v: Word, w: Word) -> tuple[Perm, ...]:
    """All arrows ``p: v -> w``, i.e. permutations with ``act_word(v, p) == w``."""
    if len(v) != len(w):
        return ()
    positions: dict = {}
    for i, s in enumerate(v):
        positions.setdefault(s, []).append(i)
    by_letter: dict = {}
    for i, s in enumerate(w):
        by_letter.setdefault(s, []).append(i)
    if {k: len(ps) for k, ps in positions.items()} != {
        k: len(ps) for k, ps in by_letter.items()
    }:
        return ()
    letters = ssorted(by_letter)
    choices = []
    for s in letters:
        tgt = by_letter[s]
        src = positions[s]
        choices.append([list(zip(tgt, perm)) for perm in itertools.permutations(src)])
    out = []
    for combo in itertools.product(*choices):
        im = [0] * len(w)
        for pairs in combo:
            for tgt_pos, src_pos in pairs:
                im[tgt_pos] = src_pos
        out.append(Perm(tuple(im)))
    out.sort(key=lambda p: p.images)
    return tuple(out)


def block_offsets(lengths: Iterable[int]) -> list[int]:
    offs = [0]
    for n in lengths:
        offs.append(offs[-1] + n)
    return offs


def block_perm(lengths: list[int], psi: Perm) -> Perm:
    """Arrow ``concat(blocks) -> concat(blocks[psi(0)], blocks[psi(1)], ...)``.

    Moves whole blocks; block j of the target is block psi(j) of the source.
    """
    old = block_offsets(lengths)
    new_lengths = [lengths[psi(j)] for j in range(len(lengths))]
    new = block_offsets(new_lengths)
    total = old[-1]
    im = [0] * total
    for j in range(len(lengths)):
        for t in range(new_lengths[j]):
            im[new[j] + t] = old[psi(j)] + t
    return Perm(tuple(im))


def block_diag(perms: list[Perm]) -> Perm:
    """Blockwise permutation acting independently inside each block."""
    offs = block_offsets([p.degree for p in perms])
    im = []
    for k, p in enumerate(perms):
        im.extend(offs[k] + p(i) for i in range(p.degree))
    return Perm(tuple(im))


def embed_at(total: int, offset: int, p: Perm) -> Perm:
    """Permutation acting as ``p`` on ``[offset, offset+deg)`` and trivially elsewhere."""
    im = list(range(total))
    for i in range(p.degree):
        im[offset + i] = offset + p(i)
    return Perm(tuple(im))


@dataclass
class YoungSet:
    """One orbit cell: a label set with an action of the stabilizer of ``word``.

    The action is given on the adjacent transpositions that generate the
    Young subgroup and satisfies
    ``act(act(x, g), h) == act(x, compose(h, g))``.
    """

    word: Word
    labels: tuple
    gen_maps: dict  # position i -> {label: label}

    def __post_init__(self):
        self._index = {lab: k for k, lab in enumerate(self.labels)}
        if len(self._index) != len(self.labels):
            raise InputError(f"duplicate labels in cell at {self.word}")

    @staticmethod
    def trivial(word: Word, labels: Iterable[Label]) -> "YoungSet":
        labels = tuple(labels)
        ident = {lab: lab for lab in labels}
        return YoungSet(word, labels, {i: dict(ident) for i in stab_gens(word)})

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: Label) -> int:
        return self._index[label]

    def act(self, label: Label, p: Perm) -> Label:
        for t in reversed(stab_decompose(self.word, p)):
            label = self.gen_maps[t][label]
        return label

    def act_gen(self, label: Label, i: int) -> Label:
        return self.gen_maps[i][label]

    def orbits(self) -> tuple[tuple, ...]:
        pairs = []
        for i in stab_gens(self.word):
            for lab in self.labels:
                pairs.append((lab, self.gen_maps[i][lab]))
        return quotient(self.labels, pairs).classes

    def orbit_count(self) -> int:
        return len(self.orbits())

    def validate(self) -> None:
        gens = stab_gens(self.word)
        if set(self.gen_maps) != set(gens):
            raise ValidationError(f"cell at {self.word}: generator set mismatch")
        lset = set(self.labels)
        for i in gens:
            m = self.gen_maps[i]
            if set(m) != lset or set(m.values()) != lset:
                raise ValidationError(f"cell at {self.word}: generator {i} not a bijection")
            for lab in self.labels:
                if m[m[lab]] != lab:
                    raise ValidationError(f"cell at {self.word}: generator {i} not an involution at {lab!r}")
        for i in gens:
            for j in gens:
                if j <= i:
                    continue
                mi, mj = self.gen_maps[i], self.gen_maps[j]
                if j - i >= 2:
                    for lab in self.labels:
                        if mi[mj[lab]] != mj[mi[lab]]:
                            raise ValidationError(
                                f"cell at {self.word}: generators {i},{j} do not commute at {lab!r}"
                            )
                elif j == i + 1 and self.word[i] == self.word[j] == self.word[j + 1]:
                    for lab in self.labels:
                        if mi[mj[mi[lab]]] != mj[mi[mj[lab]]]:
                            raise ValidationError(
                                f"cell at {self.word}: braid relation fails at {i},{j},{lab!r}"
                            )


@dataclass
class QuotientResult:
    """Partition of a finite element list by a generated equivalence."""

    elements: tuple
    classes: tuple          # tuple of tuples, ordered by first-seen representative
    class_index: dict       # element -> index into classes
    representative: tuple   # class index -> representative element

    def rep_of(self, element) -> Hashable:
        return self.representative[self.class_index[element]]


def quotient(elements: Iterable[Hashable], relations: Iterable[tuple]) -> QuotientResult:
    """Union-find with path compression; representatives are minimal in input order."""
    elements = tuple(elements)
    pos = {e: i for i, e in enumerate(elements)}
    if len(pos) != len(elements):
        raise InputError("duplicate elements in quotient input")
    parent = list(range(len(elements)))

    def find(i: int) -> int:
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    for a, b in relations:
        if a not in pos or b not in pos:
            raise InputError(f"relation pair ({a!r}, {b!r}) mentions unknown element")
        ra, rb = find(pos[a]), find(pos[b])
        if ra != rb:
            # keep the smaller input index as the root for determinism
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    groups: dict = {}
    for i in range(len(elements)):
        groups.setdefault(find(i), []).append(i)
    roots = sorted(groups)
    classes = tuple(tuple(elements[i] for i in groups[r]) for r in roots)
    class_index = {}
    for k, r in enumerate(roots):
        for i in groups[r]:
            class_index[elements[i]] = k
    representative = tuple(elements[r] for r in roots)
    return QuotientResult(elements, classes, class_index, representative)


def equivariant_iso_search(a: YoungSet, b: YoungSet) -> Optional[dict]:
    """First stabilizer-equivariant bijection ``labels(a) -> labels(b)``, or None.

    Deterministic: orbits are processed in label order and candidate images
    are tried in label order, with constraint propagation along generators.
    """
    if a.word != b.word:
        raise InputError(f"word mismatch: {a.word} vs {b.word}")
    if a.size != b.size:
        return None
    gens = stab_gens(a.word)

    def extend(mapping, used, start_a, start_b):
        # propagate the seed assignment through the generator action
        queue = [start_a]
        mapping = dict(mapping)
        used = set(used)
        mapping[start_a] = start_b
        used.add(start_b)
        while queue:
            x = queue.pop()
            for i in gens:
                xa = a.gen_maps[i][x]
                xb = b.gen_maps[i][mapping[x]]
                if xa in mapping:
                    if mapping[xa] != xb:
                        return None
                else:
                    if xb in used:
                        return None
                    mapping[xa] = xb
                    used.add(xb)
                    queue.append(xa)
        return mapping, used

    def search(mapping, used):
        pending = [x for x in a.labels if x not in mapping]
        if not pending:
            return mapping
        x = pending[0]
        for y in b.labels:
            if y in used:
                continue
            ext = extend(mapping, used, x, y)
            if ext is None:
                continue
            res = search(*ext)
            if res is not None:
                return res
        return None

    return search({}, set())


def enumerate_equivariant_maps(a: YoungSet, b: YoungSet) -> list[dict]:
    """All stabilizer-equivariant (not necessarily bijective) maps a -> b."""
    if a.word != b.word:
        raise InputError(f"word mismatch: {a.word} vs {b.word}")
    gens = stab_gens(a.word)

    def extend(mapping, start_a, start_b):
        queue = [start_a]
        mapping = dict(mapping)
        mapping[start_a] = start_b
        while queue:
            x = queue.pop()
            for i in gens:
                xa = a.gen_maps[i][x]
                xb = b.gen_maps[i][mapping[x]]
                if xa in mapping:
                    if mapping[xa] != xb:
                        return None
                else:
                    mapping[xa] = xb
                    queue.append(xa)
        return mapping

    results: list[dict] = []

    def search(mapping):
        pending = [x for x in a.labels if x not in mapping]
        if not pending:
            results.append(mapping)
            return
        x = pending[0]
        for y in b.labels:
            ext = extend(mapping, x, y)
            if ext is not None:
                search(ext)

    search({})
    return results


@dataclass
class FinGroupoid:
    """A finite groupoid with explicit composition, identity and inverse tables.

    ``hom[(a, b)]`` lists the arrows from a to b; ``comp[(g, f)]`` is the
    diagram-order composite of ``f: a -> b`` followed by ``g: b -> c``.
    """

    objects: tuple
    hom: dict            # (a, b) -> tuple of arrow ids
    comp: dict           # (g, f) -> arrow id
    ident: dict          # object -> arrow id
    inv: dict            # arrow id -> arrow id

    def __post_init__(self):
        self.src = {}
        self.dst = {}
        for (a, b), arrows in self.hom.items():
            for f in arrows:
                self.src[f] = a
                self.dst[f] = b
        self._obj_index = {o: i for i, o in enumerate(self.objects)}

    @staticmethod
    def discrete(objects: Iterable) -> "FinGroupoid":
        objects = tuple(objects)
        hom = {(o, o): (("id", o),) for o in objects}
        ident = {o: ("id", o) for o in objects}
        comp = {(("id", o), ("id", o)): ("id", o) for o in objects}
        inv = {("id", o): ("id", o) for o in objects}
        return FinGroupoid(objects, hom, comp, ident, inv)

    def obj_index(self, o) -> int:
        return self._obj_index[o]

    def arrows(self, a, b) -> tuple:
        return self.hom.get((a, b), ())

    def compose(self, g, f):
        """Composite of ``f`` followed by ``g``."""
        return self.comp[(g, f)]

    def is_discrete(self) -> bool:
        return all(
            a == b and len(arrows) == 1 for (a, b), arrows in self.hom.items() if arrows
        )

    def validate(self) -> None:
        for (a, b), arrows in self.hom.items():
            if a not in self._obj_index or b not in self._obj_index:
                raise ValidationError("hom mentions unknown object")
            for f in arrows:
                if self.inv[f] not in self.arrows(b, a):
                    raise ValidationError(f"inverse of {f!r} missing or mistyped")
                if self.comp[(self.inv[f], f)] != self.ident[a]:
                    raise ValidationError(f"{f!r}: left inverse law fails")
                if self.comp[(f, self.inv[f])] != self.ident[b]:
                    raise ValidationError(f"{f!r}: right inverse law fails")
                if self.comp[(f, self.ident[a])] != f or self.comp[(self.ident[b], f)] != f:
                    raise ValidationError(f"{f!r}: unit law fails")
        for (a, b) in self.hom:
            for (b2, c) in self.hom:
                if b2 != b:
                    continue
                for f in self.arrows(a, b):
                    for g in self.arrows(b, c):
                        h = self.comp[(g, f)]
                        if h not in self.arrows(a, c):
                            raise ValidationError("composition lands outside its hom")
                        for (c2, d) in self.hom:
                            if c2 != c:
                                continue
                            for k in self.arrows(c, d):
                                if self.comp[(k, h)] != self.comp[(self.comp[(k, g)], f)]:
                                    raise ValidationError("associativity fails")


def disjoint_union(x: FinGroupoid, y: FinGroupoid) -> FinGroupoid:
    """Coproduct groupoid with objects tagged ('l', _) and ('r', _)."""

    def tag_obj(t, o):
        return (t, o)

    def tag_arr(t, f):
        return (t, f)

    objects = tuple(tag_obj("l", o) for o in x.objects) + tuple(
        tag_obj("r", o) for o in y.objects
    )
    hom = {}
    comp = {}
    ident = {}
    inv = {}
    for t, g in (("l", x), ("r", y)):
        for (a, b), arrows in g.hom.items():
            hom[(tag_obj(t, a), tag_obj(t, b))] = tuple(tag_arr(t, f) for f in arrows)
        for (gg, ff), hh in g.comp.items():
            comp[(tag_arr(t, gg), tag_arr(t, ff))] = tag_arr(t, hh)
        for o, f in g.ident.items():
            ident[tag_obj(t, o)] = tag_arr(t, f)
        for f, fi in g.inv.items():
            inv[tag_arr(t, f)] = tag_arr(t, fi)
    return FinGroupoid(objects, hom, comp, ident, inv)
