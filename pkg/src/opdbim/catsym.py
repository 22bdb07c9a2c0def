"""Categorical symmetric sequences over finite groupoids and the exponential operad.

Words over a groupoid form the free symmetric monoidal groupoid: an arrow
``A: v -> w`` is encoded as ``(images, comps)`` where ``images`` is a
permutation with ``comps[i]: v[images[i]] -> w[i]`` componentwise.  Diagram
order composition matches the permutation convention of :mod:`.perms`.

A categorical symmetric sequence stores, per cell, a plain label tuple plus
transports along every word arrow between canonical words (contravariant)
and every codomain arrow (covariant).  Composition, coherence maps, the
evaluation 1-cell and the transpose bijection follow the same raw-tuple and
quotient discipline as :mod:`.symseq`; groupoid arrows contribute the extra
relation edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .perms import (
    BudgetError,
    FinGroupoid,
    InputError,
    Perm,
    ValidationError,
    Word,
    YoungSet,
    block_offsets,
    compose,
    disjoint_union,
    quotient,
    skey,
    ssorted,
    stab_gens,
)
from .symseq import SymSeq, SymSeqMap
from .operads import Operad, make_operad

Arrow = tuple  # (perm images, component arrow ids indexed by target position)


@dataclass(frozen=True)
class TruncParams:
    """Finite windows for the exponential pipeline.

    ``length_bound`` caps the word length of exponential sorts and
    ``arity_bound`` caps the arity at which laws are verified.
    """

    length_bound: int
    arity_bound: int

    def __post_init__(self):
        if self.length_bound < 1 or self.arity_bound < 1:
            raise InputError("window parameters must be at least 1")


# ---------------------------------------------------------------------------
# words over a groupoid
# ---------------------------------------------------------------------------


def sw_canonical(gpd: FinGroupoid, word: Word) -> tuple[Word, Perm]:
    """Sort by object order; returns (canonical, t) with word[i] == canonical[t(i)]."""
    order = sorted(range(len(word)), key=lambda i: (gpd.obj_index(word[i]), i))
    cw = tuple(word[i] for i in order)
    t = [0] * len(word)
    for j, i in enumerate(order):
        t[i] = j
    return cw, Perm(tuple(t))


def sw_is_canonical(gpd: FinGroupoid, word: Word) -> bool:
    return all(gpd.obj_index(word[i]) <= gpd.obj_index(word[i + 1]) for i in range(len(word) - 1))


def sw_arrows(gpd: FinGroupoid, v: Word, w: Word) -> list[Arrow]:
    """All arrows ``v -> w``: permutations with componentwise groupoid arrows."""
    n = len(v)
    if len(w) != n:
        return []
    out = []
    # choose, for each target position i, a source position and an arrow
    def backtrack(i, used, images, comps):
        if i == n:
            out.append((tuple(images), tuple(comps)))
            return
        for j in range(n):
            if used[j]:
                continue
            arrows = gpd.arrows(v[j], w[i])
            if not arrows:
                continue
            used[j] = True
            images.append(j)
            for a in arrows:
                comps.append(a)
                backtrack(i + 1, used, images, comps)
                comps.pop()
            images.pop()
            used[j] = False

    backtrack(0, [False] * n, [], [])
    out.sort(key=skey)
    return out


def sw_id(gpd: FinGroupoid, w: Word) -> Arrow:
    return (tuple(range(len(w))), tuple(gpd.ident[o] for o in w))


def sw_compose(gpd: FinGroupoid, a1: Arrow, a2: Arrow) -> Arrow:
    """Diagram-order composite of ``a1: u -> v`` followed by ``a2: v -> w``."""
    im1, c1 = a1
    im2, c2 = a2
    images = tuple(im1[j] for j in im2)
    comps = tuple(gpd.compose(c2[i], c1[im2[i]]) for i in range(len(im2)))
    return (images, comps)


def sw_inverse(gpd: FinGroupoid, a: Arrow) -> Arrow:
    im, cs = a
    p = Perm(im)
    pi = p.inverse()
    comps = tuple(gpd.inv[cs[pi(j)]] for j in range(len(im)))
    return (pi.images, comps)


def sw_perm_arrow(gpd: FinGroupoid, target: Word, p: Perm) -> Arrow:
    """Pure permutation arrow ``v -> target`` (identity components)."""
    return (p.images, tuple(gpd.ident[o] for o in target))


def sw_block_perm(gpd: FinGroupoid, blocks: list[Word], psi: Perm) -> Arrow:
    """Block-moving arrow ``concat(blocks) -> concat(blocks[psi(j)])``."""
    lengths = [len(b) for b in blocks]
    old = block_offsets(lengths)
    new_blocks = [blocks[psi(j)] for j in range(len(blocks))]
    new = block_offsets([len(b) for b in new_blocks])
    total = old[-1]
    im = [0] * total
    for j in range(len(blocks)):
        for t in range(len(new_blocks[j])):
            im[new[j] + t] = old[psi(j)] + t
    target = tuple(o for b in new_blocks for o in b)
    return (tuple(im), tuple(gpd.ident[o] for o in target))


def sw_block_diag(gpd: FinGroupoid, arrows: list[Arrow], sources: list[Word]) -> Arrow:
    """Blockwise arrow ``concat(sources) -> concat(targets)``."""
    offs = block_offsets([len(s) for s in sources])
    images, comps = [], []
    for k, (im, cs) in enumerate(arrows):
        images.extend(offs[k] + i for i in im)
        comps.extend(cs)
    return (tuple(images), tuple(comps))


def sw_embed_at(gpd: FinGroupoid, concat: Word, offset: int, a: Arrow, blocklen: int) -> Arrow:
    """Arrow acting as ``a`` inside one block of a concatenation."""
    im = list(range(len(concat)))
    comps = [gpd.ident[o] for o in concat]
    ai, ac = a
    for t in range(blocklen):
        im[offset + t] = offset + ai[t]
    out_word = list(concat)
    for t in range(blocklen):
        comps[offset + t] = ac[t]
    return (tuple(im), tuple(comps))


def arrow_target(gpd: FinGroupoid, v: Word, a: Arrow) -> Word:
    im, cs = a
    return tuple(gpd.dst[c] for c in cs)


# ---------------------------------------------------------------------------
# categorical symmetric sequences
# ---------------------------------------------------------------------------


@dataclass
class CatSymSeq:
    dom: FinGroupoid
    cod: FinGroupoid
    cells: dict     # (canonical word, out object) -> labels tuple
    dom_tr: dict    # (word, out) -> {(src word, arrow): {label: label}}
    cod_tr: dict    # (word, out) -> {cod arrow: {label: label}}

    def labels(self, w: Word, y) -> tuple:
        return self.cells.get((w, y), ())

    def size(self, w: Word, y) -> int:
        return len(self.cells.get((w, y), ()))

    def support(self):
        return sorted(
            (k for k, v in self.cells.items() if v),
            key=lambda k: (len(k[0]), skey(k[0]), skey(k[1])),
        )

    def support_words(self, y) -> list:
        return sorted(
            {w for (w, out), v in self.cells.items() if out == y and v},
            key=lambda w: (len(w), skey(w)),
        )

    def max_arity(self) -> int:
        return max((len(w) for (w, _y), v in self.cells.items() if v), default=0)

    def transport_dom(self, key, src_word: Word, arrow: Arrow) -> dict:
        return self.dom_tr[key][(src_word, arrow)]

    def transport_cod(self, key, arrow) -> dict:
        return self.cod_tr[key][arrow]

    def validate(self) -> None:
        for key, labels in self.cells.items():
            w, y = key
            if not labels:
                continue
            drs = self.dom_tr.get(key, {})
            idm = drs.get((w, sw_id(self.dom, w)))
            if idm is None or any(idm[l] != l for l in labels):
                raise ValidationError(f"identity transport wrong at {key}")
            for (v, a), m in drs.items():
                tgt_key = (v, y)
                tgt = set(self.cells.get(tgt_key, ()))
                if set(m) != set(labels) or any(x not in tgt for x in m.values()):
                    raise ValidationError(f"dom transport mistyped at {key} along {a}")
                # functoriality against every arrow into v
                for (u, b), m2 in self.dom_tr.get(tgt_key, {}).items():
                    ab = sw_compose(self.dom, b, a)
                    m3 = drs.get((u, ab))
                    if m3 is None:
                        raise ValidationError(f"missing composite transport at {key}")
                    for l in labels:
                        if m2[m[l]] != m3[l]:
                            raise ValidationError(f"dom functoriality fails at {key}")
            for b, m in self.cod_tr.get(key, {}).items():
                y2 = self.cod.dst[b]
                tgt = set(self.cells.get((w, y2), ()))
                if set(m) != set(labels) or any(x not in tgt for x in m.values()):
                    raise ValidationError(f"cod transport mistyped at {key} along {b}")
                for b2, m2 in self.cod_tr.get((w, y2), {}).items():
                    m3 = self.cod_tr[key].get(self.cod.compose(b2, b))
                    for l in labels:
                        if m2[m[l]] != m3[l]:
                            raise ValidationError(f"cod functoriality fails at {key}")
                # interchange with dom transports
                for (v, a), dm in drs.items():
                    other = self.cod_tr.get((v, y), {}).get(b)
                    dm2 = self.dom_tr.get((w, y2), {}).get((v, a))
                    for l in labels:
                        if other[dm[l]] != dm2[m[l]]:
                            raise ValidationError(f"dom/cod interchange fails at {key}")


def _complete_transports(seq: CatSymSeq, dom_arrow_fn: Callable, cod_arrow_fn: Callable) -> None:
    """Fill ``dom_tr``/``cod_tr`` from per-generator transport callbacks.

    ``dom_arrow_fn(key, src_word, arrow, label)`` and
    ``cod_arrow_fn(key, arrow, label)`` must handle arbitrary arrows; this
    helper just materializes the tables for every canonical word pair.
    """
    by_out: dict = {}
    for (w, y), labels in seq.cells.items():
        by_out.setdefault(y, []).append(w)
    for key, labels in seq.cells.items():
        w, y = key
        seq.dom_tr[key] = {}
        for v in by_out.get(y, []):
            if len(v) != len(w):
                continue
            for a in sw_arrows(seq.dom, v, w):
                seq.dom_tr[key][(v, a)] = {l: dom_arrow_fn(key, v, a, l) for l in labels}
        seq.cod_tr[key] = {}
        for y2 in seq.cod.objects:
            for b in seq.cod.arrows(y, y2):
                seq.cod_tr[key][b] = {l: cod_arrow_fn(key, b, l) for l in labels}


def cat_from_symseq(f: SymSeq) -> CatSymSeq:
    """Embed an ordinary symmetric sequence along discrete groupoids."""
    dom = FinGroupoid.discrete(f.dom)
    cod = FinGroupoid.discrete(f.cod)
    cells = {key: cell.labels for key, cell in f.cells.items() if cell.size}
    seq = CatSymSeq(dom, cod, cells, {}, {})

    def dom_fn(key, v, a, label):
        # discrete: v == key word and the arrow is a pure stabilizer permutation
        return f.cells[key].act(label, Perm(a[0]))

    def cod_fn(key, b, label):
        return label

    _complete_transports(seq, dom_fn, cod_fn)
    return seq


def cat_id(gpd: FinGroupoid) -> CatSymSeq:
    """Identity 1-cell: unary cells are the hom sets of the groupoid."""
    cells = {}
    for o1 in gpd.objects:
        for o2 in gpd.objects:
            arrows = gpd.arrows(o1, o2)
            if arrows:
                cells[((o1,), o2)] = tuple(arrows)
    seq = CatSymSeq(gpd, gpd, cells, {}, {})

    def dom_fn(key, v, a, label):
        return gpd.compose(label, a[1][0])

    def cod_fn(key, b, label):
        return gpd.compose(b, label)

    _complete_transports(seq, dom_fn, cod_fn)
    return seq


def cat_sum(f: CatSymSeq, g: CatSymSeq) -> CatSymSeq:
    """Coproduct on tagged groupoids; mixed cells are empty."""
    dom = disjoint_union(f.dom, g.dom)
    cod = disjoint_union(f.cod, g.cod)
    cells, dom_tr, cod_tr = {}, {}, {}
    for tag, part in (("l", f), ("r", g)):
        for (w, y), labels in part.cells.items():
            if not labels:
                continue
            w2 = tuple((tag, o) for o in w)
            key2 = (w2, (tag, y))
            cells[key2] = labels
            dom_tr[key2] = {
                (tuple((tag, o) for o in v), (a[0], tuple((tag, c) for c in a[1]))): dict(m)
                for (v, a), m in part.dom_tr[(w, y)].items()
            }
            cod_tr[key2] = {(tag, b): dict(m) for b, m in part.cod_tr[(w, y)].items()}
    return CatSymSeq(dom, cod, cells, dom_tr, cod_tr)


# maps between categorical symmetric sequences ------------------------------


@dataclass
class CatMap:
    src: CatSymSeq
    dst: CatSymSeq
    comp: dict  # (word, out) -> {label: label}

    def at(self, w: Word, y, label):
        return self.comp[(w, y)][label]

    def validate(self) -> None:
        for key, labels in self.src.cells.items():
            if not labels:
                continue
            m = self.comp.get(key)
            if m is None or any(l not in m for l in labels):
                raise ValidationError(f"cat map not total at {key}")
            for (v, a), tm in self.src.dom_tr[key].items():
                other = self.dst.dom_tr[key].get((v, a))
                m2 = self.comp[(v, key[1])]
                for l in labels:
                    if m2[tm[l]] != other[m[l]]:
                        raise ValidationError(f"cat map dom equivariance fails at {key}")
            for b, tm in self.src.cod_tr[key].items():
                other = self.dst.cod_tr[key].get(b)
                key2 = (key[0], self.src.cod.dst[b])
                m2 = self.comp[key2]
                for l in labels:
                    if m2[tm[l]] != other[m[l]]:
                        raise ValidationError(f"cat map cod equivariance fails at {key}")

    def is_bijective(self) -> bool:
        for key, labels in self.src.cells.items():
            tgt = self.dst.cells.get(key, ())
            if len({self.comp[key][l] for l in labels}) != len(labels) or len(labels) != len(tgt):
                return False
        for key, tgt in self.dst.cells.items():
            if tgt and len(self.src.cells.get(key, ())) != len(tgt):
                return False
        return True


def cat_identity_map(f: CatSymSeq) -> CatMap:
    return CatMap(f, f, {k: {l: l for l in labs} for k, labs in f.cells.items()})


def cat_compose_maps(second: CatMap, first: CatMap) -> CatMap:
    comp = {}
    for key, m in first.comp.items():
        if not first.src.cells.get(key):
            continue
        m2 = second.comp.get(key, {})
        comp[key] = {l: m2[v] for l, v in m.items()}
    return CatMap(first.src, second.dst, comp)


def cat_map_equal(a: CatMap, b: CatMap) -> bool:
    for key, labels in a.src.cells.items():
        for l in labels:
            if a.comp.get(key, {}).get(l) != b.comp.get(key, {}).get(l):
                return False
    return True


def cat_map_inverse(m: CatMap) -> CatMap:
    """Invert cellwise on the cells where the map is defined."""
    comp = {}
    for k, cm in m.comp.items():
        if len(set(cm.values())) != len(cm):
            raise ValidationError(f"cannot invert: not injective at {k}")
        comp[k] = {v: l for l, v in cm.items()}
    return CatMap(m.dst, m.src, comp)


def cat_first_difference(a: CatMap, b: CatMap):
    for key, labels in sorted(a.src.cells.items(), key=lambda kv: (len(kv[0][0]), skey(kv[0]))):
        for l in labels:
            va = a.comp.get(key, {}).get(l)
            vb = b.comp.get(key, {}).get(l)
            if va != vb:
                return (key, l, va, vb)
    return None


# ---------------------------------------------------------------------------
# composition
# ---------------------------------------------------------------------------


@dataclass
class CatComposite:
    outer: CatSymSeq
    inner: CatSymSeq
    seq: CatSymSeq
    raws: dict
    cls: dict
    reps: dict

    def class_of(self, w: Word, y, raw):
        return self.cls[(w, y)][raw]

    def rep(self, w: Word, y, idx):
        return self.reps[(w, y)][idx]


def _cat_edges(outer: CatSymSeq, inner: CatSymSeq, key, raws):
    w, z = key
    dom = inner.dom
    mid_gpd = outer.dom
    edges = []
    inner_words_by_out: dict = {}
    outer_words_by_out: dict = {}
    for raw in raws:
        mid, g, blocks, fs, arr = raw
        lengths = [len(b) for b in blocks]
        # inner-variable relations: any arrow out of each block word
        for i, b in enumerate(blocks):
            cell_key = (b, mid[i])
            if mid[i] not in inner_words_by_out:
                inner_words_by_out[mid[i]] = inner.support_words(mid[i])
            for b2 in inner_words_by_out[mid[i]]:
                if len(b2) != len(b):
                    continue
                for beta in sw_arrows(dom, b, b2):
                    # (T_beta(f'), arr) ~ (f', arr then embed(beta))
                    t_beta = inner.dom_tr[(b2, mid[i])][(b, beta)]
                    inv = {v: k for k, v in t_beta.items()}
                    f2 = inv[fs[i]]
                    concat = tuple(o for bl in blocks for o in bl)
                    emb = sw_embed_at(dom, concat, block_offsets(lengths)[i], beta, len(b))
                    arr2 = sw_compose(dom, arr, emb)
                    blocks2 = blocks[:i] + (b2,) + blocks[i + 1 :]
                    edges.append((raw, (mid, g, blocks2, fs[:i] + (f2,) + fs[i + 1 :], arr2)))
        # middle-variable relations: any arrow out of the middle word
        if z not in outer_words_by_out:
            outer_words_by_out[z] = outer.support_words(z)
        for mid2 in outer_words_by_out[z]:
            if len(mid2) != len(mid):
                continue
            for psi in sw_arrows(mid_gpd, mid, mid2):
                t_psi = outer.dom_tr[(mid2, z)][(mid, psi)]
                inv = {v: k for k, v in t_psi.items()}
                g2 = inv[g]
                sigma = Perm(psi[0])
                blocks2 = tuple(blocks[sigma(i)] for i in range(len(blocks)))
                fs2 = []
                for i in range(len(blocks)):
                    comp_arrow = psi[1][i]  # mid[sigma(i)] -> mid2[i]
                    fs2.append(inner.cod_tr[(blocks[sigma(i)], mid[sigma(i)])][comp_arrow][fs[sigma(i)]])
                bp = sw_block_perm(dom, list(blocks), sigma)
                arr2 = sw_compose(dom, arr, bp)
                edges.append((raw, (mid2, g2, blocks2, tuple(fs2), arr2)))
    return edges


def _iso_source_words(gpd: FinGroupoid, concat: Word) -> list[Word]:
    """Canonical words admitting an arrow into ``concat`` (objectwise isomorphic)."""
    per_letter = []
    for o in concat:
        per_letter.append([o2 for o2 in gpd.objects if gpd.arrows(o2, o)])
    seen = set()
    for combo in itertools.product(*per_letter):
        cw, _t = sw_canonical(gpd, combo)
        seen.add(cw)
    return sorted(seen, key=skey)


def cat_compose(outer: CatSymSeq, inner: CatSymSeq, max_arity: Optional[int] = None) -> CatComposite:
    if inner.cod.objects != outer.dom.objects:
        raise InputError("cat composition groupoid mismatch")
    dom = inner.dom
    raws_by_cell: dict = {}
    for (mid, z) in outer.support():
        glabels = outer.cells[(mid, z)]
        choices = [inner.support_words(y) for y in mid]
        for blocks in itertools.product(*choices):
            total = sum(len(b) for b in blocks)
            if max_arity is not None and total > max_arity:
                continue
            concat = tuple(o for b in blocks for o in b)
            fng = [inner.labels(b, y) for b, y in zip(blocks, mid)]
            for cw in _iso_source_words(dom, concat):
                arrows = sw_arrows(dom, cw, concat)
                for g in glabels:
                    for fs in itertools.product(*fng):
                        for arr in arrows:
                            raws_by_cell.setdefault((cw, z), []).append((mid, g, blocks, fs, arr))
    cells, raws_out, cls_out, reps_out = {}, {}, {}, {}
    for key in sorted(raws_by_cell, key=lambda k: (len(k[0]), skey(k[0]), skey(k[1]))):
        raws = raws_by_cell[key]
        q = quotient(raws, _cat_edges(outer, inner, key, raws))
        cells[key] = tuple(range(len(q.classes)))
        raws_out[key] = raws
        cls_out[key] = q.class_index
        reps_out[key] = list(q.representative)
    seq = CatSymSeq(dom, outer.cod, cells, {}, {})

    def dom_fn(key, v, a, cls):
        mid, g, blocks, fs, arr = reps_out[key][cls]
        return cls_out[(v, key[1])][(mid, g, blocks, fs, sw_compose(dom, a, arr))]

    def cod_fn(key, b, cls):
        mid, g, blocks, fs, arr = reps_out[key][cls]
        g2 = outer.cod_tr[(mid, key[1])][b][g]
        return cls_out[(key[0], outer.cod.dst[b])][(mid, g2, blocks, fs, arr)]

    comp = CatComposite(outer, inner, seq, raws_out, cls_out, reps_out)
    _complete_transports(seq, dom_fn, cod_fn)
    return comp


def cat_hcompose(beta: CatMap, alpha: CatMap, src: CatComposite, dst: CatComposite) -> CatMap:
    comp = {}
    for key, reps in src.reps.items():
        w, z = key
        m = {}
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, arr = raw
            g2 = beta.at(mid, z, g)
            fs2 = tuple(alpha.at(b, y, f) for b, y, f in zip(blocks, mid, fs))
            m[idx] = dst.class_of(w, z, (mid, g2, blocks, fs2, arr))
        comp[key] = m
    return CatMap(src.seq, dst.seq, comp)


def cat_left_unitor(idf: CatComposite) -> CatMap:
    """``Id o F -> F``: transport along the shuffle, then along the unary arrow."""
    f = idf.inner
    comp = {}
    for key, reps in idf.reps.items():
        w, y = key
        m = {}
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, arr = raw
            # g: mid[0] -> y in the codomain groupoid; block word realizes F at w
            b = blocks[0]
            lab = f.dom_tr[(b, mid[0])][(w, arr)][fs[0]]
            m[idx] = f.cod_tr[(w, mid[0])][g][lab]
        comp[key] = m
    return CatMap(idf.seq, f, comp)


def cat_left_unitor_inv(idf: CatComposite) -> CatMap:
    f = idf.inner
    cod = f.cod
    comp = {}
    for key, labels in f.cells.items():
        w, y = key
        if not labels:
            continue
        m = {
            lab: idf.class_of(w, y, ((y,), cod.ident[y], (w,), (lab,), sw_id(f.dom, w)))
            for lab in labels
        }
        comp[key] = m
    return CatMap(f, idf.seq, comp)


def cat_right_unitor(fid: CatComposite) -> CatMap:
    """``F o Id -> F``: absorb the unary arrows and the shuffle."""
    f = fid.outer
    dom = f.dom
    comp = {}
    for key, reps in fid.reps.items():
        w, y = key
        m = {}
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, arr = raw
            # arr: w -> concat(blocks); then letterwise arrows into mid
            d = (tuple(range(len(mid))), tuple(fs))
            total = sw_compose(dom, arr, d)
            m[idx] = f.dom_tr[(mid, y)][(w, total)][g]
        comp[key] = m
    return CatMap(fid.seq, f, comp)


def cat_right_unitor_inv(fid: CatComposite) -> CatMap:
    f = fid.outer
    dom = f.dom
    comp = {}
    for key, labels in f.cells.items():
        w, y = key
        if not labels:
            continue
        blocks = tuple((o,) for o in w)
        fs = tuple(dom.ident[o] for o in w)
        m = {lab: fid.class_of(w, y, (w, lab, blocks, fs, sw_id(dom, w))) for lab in labels}
        comp[key] = m
    return CatMap(f, fid.seq, comp)


def cat_associator(hg: CatComposite, hg_f: CatComposite, gf: CatComposite, h_gf: CatComposite,
                   partial: bool = False) -> CatMap:
    dom = gf.inner.dom
    f = gf.inner
    comp = {}
    for key, reps in hg_f.reps.items():
        w, t_out = key
        m = {}
        try:
            _fill_assoc_cell(hg, gf, h_gf, dom, f, key, reps, m)
        except KeyError:
            if partial:
                continue
            raise
        comp[key] = m
    return CatMap(hg_f.seq, h_gf.seq, comp)


def _fill_assoc_cell(hg, gf, h_gf, dom, f, key, reps, m):
        w, t_out = key
        for idx, raw in enumerate(reps):
            mid, q, blocks, fs, arr = raw
            zmid, h, yblocks, gs, tau = hg.rep(mid, t_out, q)
            sigma_tau = Perm(tau[0])
            ylens = [len(d) for d in yblocks]
            yoffs = block_offsets(ylens)
            new_blocks, new_fs, kappas, group_words = [], [], [], []
            for j, d in enumerate(yblocks):
                picks = [sigma_tau(p) for p in range(yoffs[j], yoffs[j + 1])]
                # cod-transport the inner labels along the components of tau
                sub_blocks, sub_fs = [], []
                for local, p in enumerate(range(yoffs[j], yoffs[j + 1])):
                    i = sigma_tau(p)
                    comp_arrow = tau[1][p]  # mid[i] -> (+yblocks)[p]
                    sub_blocks.append(blocks[i])
                    sub_fs.append(f.cod_tr[(blocks[i], mid[i])][comp_arrow][fs[i]])
                u = tuple(o for bl in sub_blocks for o in bl)
                e, kap = sw_canonical(dom, u)
                kap_arrow = sw_perm_arrow(dom, u, kap)
                gf_raw = (d, gs[j], tuple(sub_blocks), tuple(sub_fs), kap_arrow)
                new_blocks.append(e)
                new_fs.append(gf.class_of(e, zmid[j], gf_raw))
                kappas.append(kap_arrow)
                group_words.append(u)
            rearrange = sw_block_perm(dom, list(blocks), sigma_tau)
            chi = sw_block_diag(
                dom, [sw_inverse(dom, k) for k in kappas], group_words
            )
            arr2 = sw_compose(dom, sw_compose(dom, arr, rearrange), chi)
            m[idx] = h_gf.class_of(w, t_out, (zmid, h, tuple(new_blocks), tuple(new_fs), arr2))


# ---------------------------------------------------------------------------
# iso search
# ---------------------------------------------------------------------------


def cat_iso(f: CatSymSeq, g: CatSymSeq) -> Optional[CatMap]:
    """Global equivariant iso search with propagation along every transport."""
    keys = sorted(set(f.support()) | set(g.support()), key=skey)
    for key in keys:
        if len(f.labels(*key)) != len(g.labels(*key)):
            return None
    mapping: dict = {}

    def propagate(seed_key, seed_a, seed_b, mapping):
        queue = [(seed_key, seed_a)]
        mapping = dict(mapping)
        if mapping.get((seed_key, seed_a), seed_b) != seed_b:
            return None
        mapping[(seed_key, seed_a)] = seed_b
        while queue:
            key, la = queue.pop()
            lb = mapping[(key, la)]
            for (v, a), tm in f.dom_tr.get(key, {}).items():
                key2 = (v, key[1])
                xa = tm[la]
                xb = g.dom_tr[key][(v, a)][lb]
                node = (key2, xa)
                if node in mapping:
                    if mapping[node] != xb:
                        return None
                else:
                    mapping[node] = xb
                    queue.append(node)
            for b, tm in f.cod_tr.get(key, {}).items():
                key2 = (key[0], f.cod.dst[b])
                xa = tm[la]
                xb = g.cod_tr[key][b][lb]
                node = (key2, xa)
                if node in mapping:
                    if mapping[node] != xb:
                        return None
                else:
                    mapping[node] = xb
                    queue.append(node)
        return mapping

    def injective_per_cell(mapping):
        seen: dict = {}
        for (key, la), lb in mapping.items():
            if (key, lb) in seen and seen[(key, lb)] != la:
                return False
            seen[(key, lb)] = la
        return True

    def search(mapping):
        pending = None
        for key in keys:
            for la in f.labels(*key):
                if (key, la) not in mapping:
                    pending = (key, la)
                    break
            if pending:
                break
        if pending is None:
            return mapping
        key, la = pending
        for lb in g.labels(*key):
            ext = propagate(key, la, lb, mapping)
            if ext is None or not injective_per_cell(ext):
                continue
            res = search(ext)
            if res is not None:
                return res
        return None

    res = search({})
    if res is None:
        return None
    comp: dict = {}
    for (key, la), lb in res.items():
        comp.setdefault(key, {})[la] = lb
    return CatMap(f, g, comp)


# ---------------------------------------------------------------------------
# cartesian closed structure
# ---------------------------------------------------------------------------


def product_object(x: FinGroupoid, y: FinGroupoid) -> FinGroupoid:
    """Binary product of objects: the coproduct of the groupoids."""
    return disjoint_union(x, y)


def exp_object(x: FinGroupoid, y: FinGroupoid, length_bound: int) -> FinGroupoid:
    """Exponential object: words over the domain (reversed) paired with codomain objects."""
    words = []
    for n in range(length_bound + 1):
        words.extend(itertools.product(x.objects, repeat=n))
    objects = tuple((w, yo) for w in words for yo in y.objects)
    hom: dict = {}
    comp: dict = {}
    ident: dict = {}
    inv: dict = {}
    for (w1, y1) in objects:
        for (w2, y2) in objects:
            arrows = []
            for a in sw_arrows(x, w2, w1):
                for b in y.arrows(y1, y2):
                    arrows.append(("e", a, b))
            if arrows:
                hom[((w1, y1), (w2, y2))] = tuple(sorted(arrows, key=skey))
    for (w, yo) in objects:
        ident[(w, yo)] = ("e", sw_id(x, w), y.ident[yo])
    for ((w1, y1), (w2, y2)), arrows in hom.items():
        for _e, a, b in arrows:
            inv[("e", a, b)] = ("e", sw_inverse(x, a), y.inv[b])
    for ((w1, y1), (w2, y2)), arrows1 in hom.items():
        for ((w2b, y2b), (w3, y3)), arrows2 in hom.items():
            if (w2b, y2b) != (w2, y2):
                continue
            for _e1, a1, b1 in arrows1:
                for _e2, a2, b2 in arrows2:
                    comp[(("e", a2, b2), ("e", a1, b1))] = (
                        "e",
                        sw_compose(x, a2, a1),
                        y.compose(b2, b1),
                    )
    return FinGroupoid(objects, hom, comp, ident, inv)


def merge_words(zw: Word, xw: Word) -> Word:
    return tuple(("l", o) for o in zw) + tuple(("r", o) for o in xw)


def split_word(w: Word) -> tuple[Word, Word, Perm]:
    """Split a tagged word into its parts; the permutation moves l-letters first."""
    lpos = [i for i, (t, _o) in enumerate(w) if t == "l"]
    rpos = [i for i, (t, _o) in enumerate(w) if t == "r"]
    order = lpos + rpos
    zw = tuple(w[i][1] for i in lpos)
    xw = tuple(w[i][1] for i in rpos)
    # arrow p: sorted -> w with w-part reading, i.e. sorted[j] = w[order[j]]
    images = [0] * len(w)
    for j, i in enumerate(order):
        images[i] = j
    return zw, xw, Perm(tuple(images)).inverse()


def c_adjoint_pair(z: FinGroupoid, x: FinGroupoid):
    """Concatenation/splitting data of the monoidal equivalence on word objects.

    Returns ``(merge, split)`` where ``merge(zw, xw)`` concatenates with tags
    and ``split(w)`` recovers the parts with the interleaving permutation.
    """
    return merge_words, split_word


@dataclass
class EvData:
    seq: CatSymSeq
    reps: dict   # (word, y) -> list of (x0, gamma)
    cls: dict    # (word, y) -> {(x0, gamma): class}


def ev_catsym(x: FinGroupoid, y: FinGroupoid, expz: FinGroupoid, length_bound: int) -> EvData:
    """Evaluation 1-cell ``[X, Y] n X -> Y`` with its coend class structure."""
    w_gpd = disjoint_union(expz, x)

    def target_word(x0: Word, yo) -> Word:
        return (("l", (x0, yo)),) + tuple(("r", o) for o in x0)

    x0_words = []
    for n in range(length_bound + 1):
        for combo in itertools.combinations_with_replacement(
            sorted(x.objects, key=x.obj_index), n
        ):
            x0_words.append(tuple(combo))
    # candidate source words: everything isomorphic to some target word
    elems_by_cell: dict = {}
    for x0 in x0_words:
        for yo in y.objects:
            tgt = target_word(x0, yo)
            heads = [
                ("l", (w2, y2))
                for (w2, y2) in expz.objects
                if expz.arrows((w2, y2), (x0, yo))
            ]
            tail_sets = []
            for o in x0:
                tail_sets.append(
                    [("r", o2) for o2 in x.objects if x.arrows(o2, o)]
                )
            for head in heads:
                for tail in itertools.product(*tail_sets):
                    src = (head,) + tail
                    cw, _t = sw_canonical(w_gpd, src)
                    for gamma in sw_arrows(w_gpd, cw, tgt):
                        elems_by_cell.setdefault((cw, yo), []).append((x0, gamma))
    cells, reps, cls = {}, {}, {}
    for key in sorted(elems_by_cell, key=lambda k: (len(k[0]), skey(k))):
        cw, yo = key
        elems = sorted(set(elems_by_cell[key]), key=skey)
        edges = []
        for (x0, gamma) in elems:
            for x0b in x0_words:
                if len(x0b) != len(x0):
                    continue
                for beta in sw_arrows(x, x0, x0b):
                    # head: exp arrow (x0, yo) -> (x0b, yo) built from beta
                    head = ("l", ("e", sw_inverse(x, beta), y.ident[yo]))
                    bi, bc = beta
                    move = (
                        (0,) + tuple(1 + i for i in bi),
                        (head,) + tuple(("r", c) for c in bc),
                    )
                    gamma2 = sw_compose(w_gpd, gamma, move)
                    edges.append(((x0, gamma), (x0b, gamma2)))
        q = quotient(elems, edges)
        cells[key] = tuple(range(len(q.classes)))
        reps[key] = list(q.representative)
        cls[key] = q.class_index
    seq = CatSymSeq(w_gpd, y, cells, {}, {})

    def dom_fn(key, v, a, cidx):
        x0, gamma = reps[key][cidx]
        return cls[(v, key[1])][(x0, sw_compose(w_gpd, a, gamma))]

    def cod_fn(key, b, cidx):
        x0, gamma = reps[key][cidx]
        n0 = len(x0)
        head = ("l", ("e", sw_id(x, x0), b))
        move = (
            tuple(range(n0 + 1)),
            (head,) + tuple(("r", x.ident[o]) for o in x0),
        )
        return cls[(key[0], y.dst[b])][(x0, sw_compose(w_gpd, gamma, move))]

    data = EvData(seq, reps, cls)
    _complete_transports(seq, dom_fn, cod_fn)
    return data


def transpose(f: CatSymSeq, x: FinGroupoid, y: FinGroupoid) -> CatSymSeq:
    """Reindex ``F: V -> [X, Y]`` as ``V n X -> Y`` (the proof-level equality)."""
    v_gpd = f.dom
    w_gpd = disjoint_union(v_gpd, x)
    cells = {}
    for (vw, obj), labels in f.cells.items():
        xw, yo = obj
        if not sw_is_canonical(x, xw) or not labels:
            continue
        cells[(merge_words(vw, xw), yo)] = labels
    seq = CatSymSeq(w_gpd, y, cells, {}, {})

    def dom_fn(key, src_word, a, label):
        w, yo = key
        vw, xw, _p = split_word(w)
        vw2, xw2, _p2 = split_word(src_word)
        nl = len(vw)
        im, comps = a
        b_arrow = (tuple(im[:nl]), tuple(c[1] for c in comps[:nl]))
        alpha = (tuple(i - nl for i in im[nl:]), tuple(c[1] for c in comps[nl:]))
        lab = f.dom_tr[(vw, (xw, yo))][(vw2, b_arrow)][label]
        exp_arrow = ("e", alpha, y.ident[yo])
        return f.cod_tr[(vw2, (xw, yo))][exp_arrow][lab]

    def cod_fn(key, b, label):
        w, yo = key
        vw, xw, _p = split_word(w)
        exp_arrow = ("e", sw_id(x, xw), b)
        return f.cod_tr[(vw, (xw, yo))][exp_arrow][label]

    _complete_transports(seq, dom_fn, cod_fn)
    return seq


def untranspose(g: CatSymSeq, v_gpd: FinGroupoid, x: FinGroupoid, expz: FinGroupoid,
                y: FinGroupoid) -> CatSymSeq:
    """Reindex ``G: V n X -> Y`` as ``V -> [X, Y]``, covering every word object."""
    cells = {}
    for obj in expz.objects:
        xw, yo = obj
        cxw, _tau = sw_canonical(x, xw)
        for (w, yy), labels in g.cells.items():
            if yy != yo or not labels:
                continue
            vw, xw2, _p = split_word(w)
            if xw2 != cxw:
                continue
            cells[(vw, obj)] = labels
    seq = CatSymSeq(v_gpd, expz, cells, {}, {})

    def g_key(vw, obj):
        xw, yo = obj
        cxw, _tau = sw_canonical(x, xw)
        return (merge_words(vw, cxw), yo)

    def dom_fn(key, src_word, a, label):
        vw, obj = key
        xw, yo = obj
        cxw, _tau = sw_canonical(x, xw)
        im, comps = a
        lifted = (
            tuple(im) + tuple(len(vw) + i for i in range(len(cxw))),
            tuple(("l", c) for c in comps) + tuple(("r", x.ident[o]) for o in cxw),
        )
        return g.dom_tr[g_key(vw, obj)][(g_key(src_word, obj)[0], lifted)][label]

    def cod_fn(key, earrow, label):
        vw, obj = key
        xw, yo = obj
        _e, alpha, b = earrow
        # source word of the reversed component = target object's word
        xw2 = _exp_arrow_source_word(x, alpha, xw)
        yo2 = y.dst[b]
        cxw, tau = sw_canonical(x, xw)
        cxw2, tau2 = sw_canonical(x, xw2)
        # alpha: xw2 -> xw; conjugate to canonical words
        a_can = sw_compose(
            x,
            sw_compose(x, sw_perm_arrow(x, xw2, tau2), alpha),
            sw_inverse(x, sw_perm_arrow(x, xw, tau)),
        )
        lifted = (
            tuple(range(len(vw))) + tuple(len(vw) + i for i in a_can[0]),
            tuple(("l", v_gpd.ident[o]) for o in vw) + tuple(("r", c) for c in a_can[1]),
        )
        lab = g.dom_tr[g_key(vw, obj)][(g_key(vw, (xw2, yo))[0], lifted)][label]
        return g.cod_tr[g_key(vw, (xw2, yo))][b][lab]

    _complete_transports(seq, dom_fn, cod_fn)
    return seq


def _exp_arrow_source_word(x: FinGroupoid, alpha: Arrow, target_word: Word) -> Word:
    """Domain word of the reversed component of an exponential arrow."""
    im, comps = alpha
    src = [None] * len(im)
    for i in range(len(im)):
        src[im[i]] = x.src[comps[i]]
    return tuple(src)


# ---------------------------------------------------------------------------
# sum splitting and partial map plumbing
# ---------------------------------------------------------------------------


def cat_hcompose_partial(beta: CatMap, alpha: CatMap, src: CatComposite, dst: CatComposite) -> CatMap:
    """Horizontal composite that silently omits cells where a component is undefined."""
    comp = {}
    for key, reps in src.reps.items():
        w, z = key
        m = {}
        ok = True
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, arr = raw
            try:
                g2 = beta.comp[(mid, z)][g]
                fs2 = tuple(alpha.comp[(b, y)][f] for b, y, f in zip(blocks, mid, fs))
            except KeyError:
                ok = False
                break
            m[idx] = dst.class_of(w, z, (mid, g2, blocks, fs2, arr))
        if ok:
            comp[key] = m
    return CatMap(src.seq, dst.seq, comp)


def cat_compose_partial(second: CatMap, first: CatMap) -> CatMap:
    comp = {}
    for key, m in first.comp.items():
        m2 = second.comp.get(key)
        if m2 is None:
            continue
        try:
            comp[key] = {l: m2[v] for l, v in m.items()}
        except KeyError:
            continue
    return CatMap(first.src, second.dst, comp)


def cat_sum_split(sumcomp: CatComposite, left: CatComposite, right: CatComposite) -> CatMap:
    """Canonical iso ``(F1 u G1) o (F2 u G2) -> (F1 o F2) u (G1 o G2)``.

    Cells whose pure composite lies outside the materialized window are
    omitted; downstream evaluation never reads them.
    """
    comp = {}
    for key, reps in sumcomp.reps.items():
        w, z = key
        tag = z[0]
        part = left if tag == "l" else right
        w2 = tuple(o for (_t, o) in w)
        m = {}
        ok = True
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, arr = raw
            mid2 = tuple(o for (_t, o) in mid)
            blocks2 = tuple(tuple(o for (_t, o) in b) for b in blocks)
            arr2 = (arr[0], tuple(c for (_t, c) in arr[1]))
            try:
                m[idx] = part.class_of(w2, z[1], (mid2, g, blocks2, fs, arr2))
            except KeyError:
                ok = False
                break
        if ok:
            comp[key] = m
    return CatMap(sumcomp.seq, cat_sum(left.seq, right.seq), comp)


def cat_sum_maps(ml: CatMap, mr: CatMap, src_sum: CatSymSeq, dst_sum: CatSymSeq) -> CatMap:
    comp = {}
    for key, labels in src_sum.cells.items():
        if not labels:
            continue
        (w, z) = key
        tag = z[0]
        w2 = tuple(o for (_t, o) in w)
        part = ml if tag == "l" else mr
        m = part.comp.get((w2, z[1]))
        if m is None:
            continue
        comp[key] = dict(m)
    return CatMap(src_sum, dst_sum, comp)


# ---------------------------------------------------------------------------
# the Yoneda collapse: ev o (F u Id_X)  ->  transpose(F)
# ---------------------------------------------------------------------------


def collapse_map(
    f: CatSymSeq,
    x: FinGroupoid,
    y: FinGroupoid,
    expz: FinGroupoid,
    evdata: EvData,
    compc: CatComposite,
    target: CatSymSeq,
) -> CatMap:
    """Collapse the evaluation coend onto the reindexed cells of ``F``."""
    comp = {}
    for key, reps in compc.reps.items():
        w, yo = key
        vpart, xpart, _p = split_word(w)
        m = {}
        try:
            _fill_collapse_cell(f, x, y, expz, evdata, key, reps, vpart, xpart, m)
        except KeyError:
            continue
        comp[key] = m
    return CatMap(compc.seq, target, comp)


def _fill_collapse_cell(f, x, y, expz, evdata, key, reps, vpart, xpart, m):
        w, yo = key
        for idx, raw in enumerate(reps):
            mid, evlab, blocks, ss, arr = raw
            x0, gamma = evdata.reps[(mid, yo)][evlab]
            sg, gcomps = gamma
            offs = block_offsets([len(b) for b in blocks])
            sa, comps_a = arr
            p0 = sg[0]
            e0 = gcomps[0][1]
            n0 = len(x0)
            delta_im, delta_comps = [0] * n0, [None] * n0
            for k in range(1, n0 + 1):
                pk = sg[k]
                a_prime = gcomps[k][1]
                a_k = ss[pk]
                q = offs[pk]
                s_pos = sa[q]
                c_arr = comps_a[q][1]
                delta_im[k - 1] = s_pos - len(vpart)
                delta_comps[k - 1] = x.compose(a_prime, x.compose(a_k, c_arr))
            delta = (tuple(delta_im), tuple(delta_comps))
            e1 = ("e", delta, y.ident[yo])
            e_total = expz.compose(e1, e0)
            vb = tuple(o for (_t, o) in blocks[p0])
            obj0 = mid[p0][1]
            f1 = f.cod_tr[(vb, obj0)][e_total][ss[p0]]
            rho_im, rho_comps = [], []
            for t in range(len(vb)):
                q = offs[p0] + t
                rho_im.append(sa[q])
                rho_comps.append(comps_a[q][1])
            rho = (tuple(rho_im), tuple(rho_comps))
            m[idx] = f.dom_tr[(vb, (xpart, yo))][(vpart, rho)][f1]


# ---------------------------------------------------------------------------
# the internal-hom monad
# ---------------------------------------------------------------------------


@dataclass
class HomMonad:
    x: FinGroupoid
    y: FinGroupoid
    expz: FinGroupoid
    e: CatSymSeq
    mu: CatMap
    eta: CatMap
    ee: CatComposite
    evdata: EvData


def _eta_sum_map(w_gpd: FinGroupoid, idw, s_id: CatSymSeq) -> CatMap:
    """Iso ``Id_{Z u X} -> Id_Z u Id_X`` stripping tags of unary arrows."""
    comp = {}
    for key, labels in idw.cells.items():
        comp[key] = {lab: lab[1] for lab in labels}
    return CatMap(idw, s_id, comp)


def hom_monad(a: Operad, b: Operad, length_bound: int, arity_bound: int,
              validate: bool = True) -> HomMonad:
    """The monad on ``[X, Y]`` whose algebras are the (B, A)-bimodules.

    Both multiplications and the unit are derived mechanically from the
    transpose bijection and the coherence maps; no closed formula is coded.
    """
    if not a.reduced or not b.reduced:
        raise InputError("the exponential pipeline requires reduced operads")
    x = FinGroupoid.discrete(a.sorts)
    y = FinGroupoid.discrete(b.sorts)
    expz = exp_object(x, y, length_bound)
    evdata = ev_catsym(x, y, expz, length_bound)
    acat = cat_from_symseq(a.carrier)
    bcat = cat_from_symseq(b.carrier)
    idz = cat_id(expz)
    idx = cat_id(x)
    idy = cat_id(y)
    w_gpd = evdata.seq.dom
    capt = arity_bound + length_bound

    atil = cat_sum(idz, acat)
    ev_a = cat_compose(evdata.seq, atil, max_arity=capt)
    tc = cat_compose(bcat, ev_a.seq, max_arity=capt)
    e = untranspose(tc.seq, expz, x, expz, y)
    ee = cat_compose(e, e, max_arity=arity_bound)
    tee = transpose(ee.seq, x, y)

    # --- multiplication ----------------------------------------------------
    s_e = cat_sum(e, idx)
    sum_ee = cat_sum(ee.seq, idx)
    c1 = cat_compose(evdata.seq, sum_ee, max_arity=capt)
    col_ee = collapse_map(ee.seq, x, y, expz, evdata, c1, tee)
    m1 = cat_map_inverse(col_ee)

    ss = cat_compose(s_e, s_e, max_arity=capt)
    idxx = cat_compose(idx, idx, max_arity=capt)
    ee2 = ee
    split1 = cat_sum_split(ss, ee2, idxx)
    u_idid = cat_left_unitor(idxx)
    smap = cat_sum_maps(cat_identity_map(ee.seq), u_idid, cat_sum(ee.seq, idxx.seq), sum_ee)
    split_total = cat_compose_partial(smap, split1)
    c2 = cat_compose(evdata.seq, ss.seq, max_arity=capt)
    m2 = cat_hcompose_partial(cat_identity_map(evdata.seq), cat_map_inverse(split_total), c1, c2)

    evs = cat_compose(evdata.seq, s_e, max_arity=capt)
    c3 = cat_compose(evs.seq, s_e, max_arity=capt)
    m3 = cat_map_inverse(cat_associator(evs, c3, ss, c2))

    col_e = collapse_map(e, x, y, expz, evdata, evs, tc.seq)
    c4 = cat_compose(tc.seq, s_e, max_arity=capt)
    m4 = cat_hcompose_partial(col_e, cat_identity_map(s_e), c3, c4)

    evas = cat_compose(ev_a.seq, s_e, max_arity=capt)
    c5 = cat_compose(bcat, evas.seq, max_arity=capt)
    m5 = cat_associator(tc, c4, evas, c5)

    atil_s = cat_compose(atil, s_e, max_arity=capt)
    ev_atils = cat_compose(evdata.seq, atil_s.seq, max_arity=capt)
    assoc2 = cat_associator(ev_a, evas, atil_s, ev_atils)
    c6 = cat_compose(bcat, ev_atils.seq, max_arity=capt)
    m6 = cat_hcompose_partial(cat_identity_map(bcat), assoc2, c5, c6)

    # interchange (Id u A) o (E u Id)  ->  (E u Id) o (Id u A)
    idz_e = cat_compose(idz, e, max_arity=arity_bound)
    a_idx = cat_compose(acat, idx, max_arity=capt)
    e_idz = cat_compose(e, idz, max_arity=arity_bound)
    idx_a = cat_compose(idx, acat, max_arity=capt)
    satil = cat_compose(s_e, atil, max_arity=capt)
    split_as = cat_sum_split(atil_s, idz_e, a_idx)
    step = cat_sum_maps(
        cat_left_unitor(idz_e), cat_right_unitor(a_idx),
        cat_sum(idz_e.seq, a_idx.seq), cat_sum(e, acat),
    )
    step2 = cat_sum_maps(
        cat_right_unitor_inv(e_idz), cat_left_unitor_inv(idx_a),
        cat_sum(e, acat), cat_sum(e_idz.seq, idx_a.seq),
    )
    unsplit = cat_map_inverse(cat_sum_split(satil, e_idz, idx_a))
    swap = cat_compose_partial(unsplit, cat_compose_partial(step2, cat_compose_partial(step, split_as)))
    ev_satil = cat_compose(evdata.seq, satil.seq, max_arity=capt)
    c7 = cat_compose(bcat, ev_satil.seq, max_arity=capt)
    m7 = cat_hcompose_partial(
        cat_identity_map(bcat),
        cat_hcompose_partial(cat_identity_map(evdata.seq), swap, ev_atils, ev_satil),
        c6, c7,
    )

    evs_atil = cat_compose(evs.seq, atil, max_arity=capt)
    assoc3 = cat_associator(evs, evs_atil, satil, ev_satil)
    c8 = cat_compose(bcat, evs_atil.seq, max_arity=capt)
    m8 = cat_hcompose_partial(cat_identity_map(bcat), cat_map_inverse(assoc3), c7, c8)

    t_atil = cat_compose(tc.seq, atil, max_arity=capt)
    c9 = cat_compose(bcat, t_atil.seq, max_arity=capt)
    m9 = cat_hcompose_partial(
        cat_identity_map(bcat),
        cat_hcompose_partial(col_e, cat_identity_map(atil), evs_atil, t_atil),
        c8, c9,
    )

    eva_atil = cat_compose(ev_a.seq, atil, max_arity=capt)
    b_evaatil = cat_compose(bcat, eva_atil.seq, max_arity=capt)
    c10 = cat_compose(bcat, b_evaatil.seq, max_arity=capt)
    m10 = cat_hcompose_partial(
        cat_identity_map(bcat), cat_associator(tc, t_atil, eva_atil, b_evaatil), c9, c10
    )

    atil2 = cat_compose(atil, atil, max_arity=capt)
    ev_atil2 = cat_compose(evdata.seq, atil2.seq, max_arity=capt)
    assoc4 = cat_associator(ev_a, eva_atil, atil2, ev_atil2)
    b_evatil2 = cat_compose(bcat, ev_atil2.seq, max_arity=capt)
    c11 = cat_compose(bcat, b_evatil2.seq, max_arity=capt)
    m11 = cat_hcompose_partial(
        cat_identity_map(bcat),
        cat_hcompose_partial(cat_identity_map(bcat), assoc4, b_evaatil, b_evatil2),
        c10, c11,
    )

    # mu of (Id u A): unitor on the left part, operad multiplication on the right
    idz2 = cat_compose(idz, idz, max_arity=2)
    a2 = cat_compose(acat, acat, max_arity=a.arity_bound)
    split_aa = cat_sum_split(atil2, idz2, a2)
    mu_a_comp = {}
    for key, reps in a2.reps.items():
        mu_a_comp[key] = {
            idx_: a.mu.at(*key, a.comp2.class_of(*key, _strip_cat_raw(rep)))
            for idx_, rep in enumerate(reps)
        }
    mu_a_cat = CatMap(a2.seq, acat, mu_a_comp)
    mu_atil = cat_compose_partial(
        cat_sum_maps(cat_left_unitor(idz2), mu_a_cat, cat_sum(idz2.seq, a2.seq), atil),
        split_aa,
    )
    m12 = cat_hcompose_partial(
        cat_identity_map(bcat),
        cat_hcompose_partial(
            cat_identity_map(bcat),
            cat_hcompose_partial(cat_identity_map(evdata.seq), mu_atil, ev_atil2, ev_a),
            b_evatil2, tc,
        ),
        c11,
        cat_compose(bcat, tc.seq, max_arity=capt),
    )
    b_t = cat_compose(bcat, tc.seq, max_arity=capt)
    b2 = cat_compose(bcat, bcat, max_arity=b.arity_bound)
    bb_eva = cat_compose(b2.seq, ev_a.seq, max_arity=capt)
    m13 = cat_map_inverse(cat_associator(b2, bb_eva, tc, b_t))
    mu_b_comp = {}
    for key, reps in b2.reps.items():
        mu_b_comp[key] = {
            idx_: b.mu.at(*key, b.comp2.class_of(*key, _strip_cat_raw(rep)))
            for idx_, rep in enumerate(reps)
        }
    mu_b_cat = CatMap(b2.seq, bcat, mu_b_comp)
    m14 = cat_hcompose_partial(mu_b_cat, cat_identity_map(ev_a.seq), bb_eva, tc)

    chain = [m1, m2, m3, m4, m5, m6, m7, m8, m9, m10, m11, m12, m13, m14]
    mu_on_t = chain[0]
    for step_map in chain[1:]:
        mu_on_t = cat_compose_partial(step_map, mu_on_t)

    mu_comp = {}
    for (zw, obj), labels in ee.seq.cells.items():
        if not labels:
            continue
        xw, yo = obj
        cxw, _tau = sw_canonical(x, xw)
        src = mu_on_t.comp.get((merge_words(zw, cxw), yo))
        if src is None:
            raise ValidationError(f"hom monad multiplication undefined at {(zw, obj)}")
        mu_comp[(zw, obj)] = dict(src)
    mu_e = CatMap(ee.seq, e, mu_comp)

    # --- unit ---------------------------------------------------------------
    s_id = cat_sum(idz, idx)
    c_id = cat_compose(evdata.seq, s_id, max_arity=capt)
    t_id = transpose(idz, x, y)
    col_id = collapse_map(idz, x, y, expz, evdata, c_id, t_id)
    idw = cat_id(w_gpd)
    ev_idw = cat_compose(evdata.seq, idw, max_arity=capt)
    idsum = _eta_sum_map(w_gpd, idw, s_id)
    r1 = cat_compose_partial(
        col_id,
        cat_compose_partial(
            cat_hcompose_partial(cat_identity_map(evdata.seq), idsum, ev_idw, c_id),
            cat_right_unitor_inv(ev_idw),
        ),
    )
    eta_atil_comp = {}
    for key, labels in idw.cells.items():
        (w0,), o1 = key[0], key[1]
        if key[0][0][0] == "l":
            eta_atil_comp[key] = {lab: lab[1] for lab in labels}
        else:
            xs = key[0][0][1]
            eta_atil_comp[key] = {lab: a.eta_label(xs) for lab in labels}
    eta_atil = CatMap(idw, atil, eta_atil_comp)
    idy_eva = cat_compose(idy, ev_a.seq, max_arity=capt)
    eta_b_comp = {
        key: {lab: b.eta_label(key[1]) for lab in labels}
        for key, labels in idy.cells.items()
    }
    eta_b_cat = CatMap(idy, bcat, eta_b_comp)
    path2 = cat_compose_partial(
        cat_hcompose_partial(eta_b_cat, cat_identity_map(ev_a.seq), idy_eva, tc),
        cat_compose_partial(
            cat_left_unitor_inv(idy_eva),
            cat_compose_partial(
                cat_hcompose_partial(cat_identity_map(evdata.seq), eta_atil, ev_idw, ev_a),
                cat_right_unitor_inv(ev_idw),
            ),
        ),
    )
    eta_on_t = cat_compose_partial(path2, cat_map_inverse(r1))
    eta_comp = {}
    for (zw, obj), labels in idz.cells.items():
        if not labels:
            continue
        xw, yo = obj
        cxw, _tau = sw_canonical(x, xw)
        src = eta_on_t.comp.get((merge_words(zw, cxw), yo))
        if src is None:
            raise ValidationError(f"hom monad unit undefined at {(zw, obj)}")
        eta_comp[(zw, obj)] = dict(src)
    eta_e = CatMap(idz, e, eta_comp)

    hm = HomMonad(x, y, expz, e, mu_e, eta_e, ee, evdata)
    if validate:
        check_cat_monad(hm, arity_bound)
    return hm


def _strip_cat_raw(raw):
    mid, g, blocks, fs, arr = raw
    return (mid, g, blocks, fs, arr[0])


def check_cat_monad(hm: HomMonad, cap: int) -> None:
    e, mu, eta, ee = hm.e, hm.mu, hm.eta, hm.ee
    idz = eta.src
    eee_l = cat_compose(ee.seq, e, max_arity=cap)
    eee_r = cat_compose(e, ee.seq, max_arity=cap)
    asc = cat_associator(ee, eee_l, ee, eee_r)
    lhs = cat_compose_partial(mu, cat_hcompose_partial(mu, cat_identity_map(e), eee_l, ee))
    rhs = cat_compose_partial(
        mu, cat_compose_partial(cat_hcompose_partial(cat_identity_map(e), mu, eee_r, ee), asc)
    )
    if not cat_map_equal(lhs, rhs):
        raise ValidationError(
            f"hom monad associativity fails: {cat_first_difference(lhs, rhs)}"
        )
    ide = cat_compose(idz, e, max_arity=cap)
    lu = cat_compose_partial(mu, cat_hcompose_partial(eta, cat_identity_map(e), ide, ee))
    if not cat_map_equal(lu, cat_left_unitor(ide)):
        raise ValidationError("hom monad left unit law fails")
    eid = cat_compose(e, idz, max_arity=cap)
    ru = cat_compose_partial(mu, cat_hcompose_partial(cat_identity_map(e), eta, eid, ee))
    if not cat_map_equal(ru, cat_right_unitor(eid)):
        raise ValidationError("hom monad right unit law fails")


# ---------------------------------------------------------------------------
# from monads on a groupoid to operads on its objects
# ---------------------------------------------------------------------------


def operad_of_monad(expz: FinGroupoid, e: CatSymSeq, mu: CatMap, eta: CatMap,
                    ee: CatComposite, arity_bound: int) -> Operad:
    """Extract the operad on the object set: cells of the monad as an S-matrix."""
    cells = {}
    for (w, obj), labels in e.cells.items():
        if not labels or len(w) > arity_bound:
            continue
        gen_maps = {}
        for i in stab_gens(w):
            p = Perm.transposition(len(w), i)
            arrow = sw_perm_arrow(expz, w, p)
            gen_maps[i] = dict(e.dom_tr[(w, obj)][(w, arrow)])
        cells[(w, obj)] = YoungSet(w, labels, gen_maps)
    sorts = ssorted(expz.objects)
    carrier = SymSeq(sorts, sorts, cells)

    def mu_fn(key, raw):
        mid, g, blocks, fs, sig = raw
        arr = (
            sig,
            tuple(expz.ident[o] for b in blocks for o in b),
        )
        cls = ee.class_of(key[0], key[1], (mid, g, blocks, fs, arr))
        return mu.at(key[0], key[1], cls)

    eta_labels = {z: eta.at((z,), z, expz.ident[z]) for z in sorts}
    return make_operad(carrier, mu_fn, eta_labels, arity_bound)


def exponential_operad(a: Operad, b: Operad, length_bound=None, arity_bound=None,
                       params: Optional[TruncParams] = None, validate: bool = True) -> Operad:
    """The operad whose algebras are the (B, A)-bimodules, within the windows."""
    if params is None:
        params = TruncParams(length_bound, arity_bound)
    hm = hom_monad(a, b, params.length_bound, params.arity_bound, validate=validate)
    return operad_of_monad(hm.expz, hm.e, hm.mu, hm.eta, hm.ee, params.arity_bound)


# ---------------------------------------------------------------------------
# products of operads
# ---------------------------------------------------------------------------


def product_operad(a: Operad, b: Operad) -> Operad:
    """Product in the bimodule bicategory: disjoint sorts, componentwise structure."""
    from .symseq import sum_symseq

    carrier, tag1, tag2 = sum_symseq(a.carrier, b.carrier)
    n = min(a.arity_bound, b.arity_bound)
    inv1 = {v: k for k, v in tag1.items()}
    inv2 = {v: k for k, v in tag2.items()}

    def mu_fn(key, raw):
        w, z = key
        mid, g, blocks, fs, sig = raw
        if z in inv1 and all(s in inv1 for s in w):
            part, inv = a, inv1
        else:
            part, inv = b, inv2
        mid2 = tuple(inv[s] for s in mid)
        blocks2 = tuple(tuple(inv[s] for s in bl) for bl in blocks)
        w2 = tuple(inv[s] for s in w)
        cls = part.comp2.class_of(w2, inv[z], (mid2, g, blocks2, fs, sig))
        return part.mu.at(w2, inv[z], cls)

    eta_labels = {}
    for x in a.sorts:
        eta_labels[tag1[x]] = a.eta_label(x)
    for yo in b.sorts:
        eta_labels[tag2[yo]] = b.eta_label(yo)
    return make_operad(carrier, mu_fn, eta_labels, n)
