"""Operad bimodules: relative composition, coherence, adjunctions, enumeration.

A ``(B, A)``-bimodule is a symmetric sequence between the sort sets of two
operads together with a left ``B``-action and a right ``A``-action that
commute.  Relative composition quotients the plain composite by the
two middle actions; its unit isomorphisms are split-fork bijections and the
associator regroups representatives.  All laws are checked cell by cell
within the smallest arity window of the participants.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .perms import (
    BudgetError,
    InputError,
    Perm,
    ValidationError,
    Word,
    YoungSet,
    canonical_word,
    compose,
    enumerate_equivariant_maps,
    skey,
    ssorted,
    stab_gens,
)
from .symseq import (
    Composite,
    SymSeq,
    SymSeqMap,
    associator,
    coequalize_maps,
    compose_maps,
    compose_symseq,
    first_map_difference,
    hcompose_maps,
    id_symseq,
    identity_map,
    left_unitor,
    left_unitor_inv,
    map_equal,
    map_inverse,
    right_unitor,
    right_unitor_inv,
)
from .operads import Algebra, Operad, OperadMorphism, unit_operad

DEFAULT_BUDGET = 2_000_000


def restrict_map(m: SymSeqMap, new_src: SymSeq, new_dst: Optional[SymSeq] = None) -> SymSeqMap:
    """Re-key a 2-cell onto a smaller (re-capped) source composite."""
    comp = {k: m.comp[k] for k in new_src.cells if k in m.comp}
    return SymSeqMap(new_src, new_dst if new_dst is not None else m.dst, comp)


@dataclass
class Bimodule:
    left: Operad      # acts on the codomain side
    right: Operad     # acts on the domain side
    carrier: SymSeq
    lam: SymSeqMap    # bm.seq -> carrier
    rho: SymSeqMap    # ma.seq -> carrier
    window: int
    bm: Composite     # left.carrier o carrier
    ma: Composite     # carrier o right.carrier

    @property
    def dom(self):
        return self.carrier.dom

    @property
    def cod(self):
        return self.carrier.cod


def make_bimodule(
    left: Operad,
    right: Operad,
    carrier: SymSeq,
    lam_fn: Callable,
    rho_fn: Callable,
    window: Optional[int] = None,
    validate: bool = True,
) -> Bimodule:
    """Assemble a bimodule from action functions on composite representatives."""
    if set(carrier.dom) != set(right.sorts) or set(carrier.cod) != set(left.sorts):
        raise InputError("bimodule carrier sorts do not match its operads")
    w = min(left.arity_bound, right.arity_bound) if window is None else window
    bm = compose_symseq(left.carrier, carrier, max_arity=w)
    ma = compose_symseq(carrier, right.carrier, max_arity=w)
    lam = SymSeqMap(
        bm.seq,
        carrier,
        {key: {i: lam_fn(key, raw) for i, raw in enumerate(reps)} for key, reps in bm.reps.items()},
    )
    rho = SymSeqMap(
        ma.seq,
        carrier,
        {key: {i: rho_fn(key, raw) for i, raw in enumerate(reps)} for key, reps in ma.reps.items()},
    )
    out = Bimodule(left, right, carrier, lam, rho, w, bm, ma)
    if validate:
        check_bimodule_laws(out)
    return out


def bimodule_from_maps(
    left: Operad,
    right: Operad,
    carrier: SymSeq,
    lam: SymSeqMap,
    rho: SymSeqMap,
    window: int,
    bm: Composite,
    ma: Composite,
    validate: bool = True,
) -> Bimodule:
    out = Bimodule(left, right, carrier, lam, rho, window, bm, ma)
    if validate:
        check_bimodule_laws(out)
    return out


def _fail(name: str, diff) -> None:
    key, lab, va, vb = diff
    raise ValidationError(f"{name} fails at cell {key}, class {lab!r}: {va!r} != {vb!r}")


def check_bimodule_laws(b: Bimodule) -> None:
    w = b.window
    bc, ac, m = b.left.carrier, b.right.carrier, b.carrier
    b.lam.validate()
    b.rho.validate()
    id_m = identity_map(m)
    # left module laws
    comp2b = compose_symseq(bc, bc, max_arity=w)
    mu_b = restrict_map(b.left.mu, comp2b.seq)
    bb_m = compose_symseq(comp2b.seq, m, max_arity=w)
    b_bm = compose_symseq(bc, b.bm.seq, max_arity=w)
    asc = associator(comp2b, bb_m, b.bm, b_bm)
    lhs = compose_maps(b.lam, hcompose_maps(mu_b, id_m, bb_m, b.bm))
    rhs = compose_maps(
        b.lam, compose_maps(hcompose_maps(identity_map(bc), b.lam, b_bm, b.bm), asc)
    )
    if not map_equal(lhs, rhs):
        _fail("left action associativity", first_map_difference(lhs, rhs))
    idy_m = compose_symseq(id_symseq(b.left.sorts), m, max_arity=w)
    eta_b = b.left.eta
    lu = compose_maps(b.lam, hcompose_maps(eta_b, id_m, idy_m, b.bm))
    if not map_equal(lu, left_unitor(idy_m)):
        _fail("left action unit", first_map_difference(lu, left_unitor(idy_m)))
    # right module laws
    comp2a = compose_symseq(ac, ac, max_arity=w)
    mu_a = restrict_map(b.right.mu, comp2a.seq)
    ma_a = compose_symseq(b.ma.seq, ac, max_arity=w)
    m_aa = compose_symseq(m, comp2a.seq, max_arity=w)
    asc2 = associator(b.ma, ma_a, comp2a, m_aa)
    lhs2 = compose_maps(b.rho, hcompose_maps(b.rho, identity_map(ac), ma_a, b.ma))
    rhs2 = compose_maps(
        b.rho, compose_maps(hcompose_maps(id_m, mu_a, m_aa, b.ma), asc2)
    )
    if not map_equal(lhs2, rhs2):
        _fail("right action associativity", first_map_difference(lhs2, rhs2))
    m_idx = compose_symseq(m, id_symseq(b.right.sorts), max_arity=w)
    ru = compose_maps(b.rho, hcompose_maps(id_m, b.right.eta, m_idx, b.ma))
    if not map_equal(ru, right_unitor(m_idx)):
        _fail("right action unit", first_map_difference(ru, right_unitor(m_idx)))
    # commuting actions
    bm_a = compose_symseq(b.bm.seq, ac, max_arity=w)
    b_ma = compose_symseq(bc, b.ma.seq, max_arity=w)
    asc3 = associator(b.bm, bm_a, b.ma, b_ma)
    path1 = compose_maps(b.rho, hcompose_maps(b.lam, identity_map(ac), bm_a, b.ma))
    path2 = compose_maps(
        b.lam, compose_maps(hcompose_maps(identity_map(bc), b.rho, b_ma, b.bm), asc3)
    )
    if not map_equal(path1, path2):
        _fail("commuting actions", first_map_difference(path1, path2))


def check_bimodule_map(f: SymSeqMap, src: Bimodule, dst: Bimodule) -> None:
    """Verify the left- and right-module map squares for ``f: src -> dst``."""
    f.validate()
    id_b = identity_map(src.left.carrier)
    id_a = identity_map(src.right.carrier)
    lhs = compose_maps(f, src.lam)
    rhs = compose_maps(dst.lam, hcompose_maps(id_b, f, src.bm, dst.bm))
    if not map_equal(lhs, rhs):
        _fail("left module map square", first_map_difference(lhs, rhs))
    lhs2 = compose_maps(f, src.rho)
    rhs2 = compose_maps(dst.rho, hcompose_maps(f, id_a, src.ma, dst.ma))
    if not map_equal(lhs2, rhs2):
        _fail("right module map square", first_map_difference(lhs2, rhs2))


def identity_bimodule(op: Operad) -> Bimodule:
    """The operad acting on itself by multiplication on both sides."""
    return Bimodule(
        op, op, op.carrier, op.mu, op.mu, op.arity_bound, op.comp2, op.comp2
    )


def left_module(op: Operad, dom_sorts: Iterable, carrier: SymSeq, lam_fn: Callable,
                window: Optional[int] = None, validate: bool = True) -> Bimodule:
    """A left module as a bimodule over the unit operad on its domain."""
    w = op.arity_bound if window is None else window
    unit = unit_operad(ssorted(dom_sorts), max(w, 2))
    bm = compose_symseq(op.carrier, carrier, max_arity=w)
    ma = compose_symseq(carrier, unit.carrier, max_arity=w)
    lam = SymSeqMap(
        bm.seq,
        carrier,
        {key: {i: lam_fn(key, raw) for i, raw in enumerate(reps)} for key, reps in bm.reps.items()},
    )
    rho = right_unitor(ma)
    out = Bimodule(op, unit, carrier, lam, rho, w, bm, ma)
    if validate:
        check_bimodule_laws(out)
    return out


def free_left_module(op: Operad, dom_sorts: Iterable, v: SymSeq,
                     window: Optional[int] = None) -> Bimodule:
    """The free left module ``A o V`` on a sequence ``V``, acting through ``mu``."""
    w = op.arity_bound if window is None else window
    av = compose_symseq(op.carrier, v, max_arity=w)
    comp2 = compose_symseq(op.carrier, op.carrier, max_arity=w)
    aa_v = compose_symseq(comp2.seq, v, max_arity=w)
    a_av = compose_symseq(op.carrier, av.seq, max_arity=w)
    mu = restrict_map(op.mu, comp2.seq)
    lam = compose_maps(
        hcompose_maps(mu, identity_map(v), aa_v, av),
        map_inverse(associator(comp2, aa_v, av, a_av)),
    )
    unit = unit_operad(ssorted(dom_sorts), max(w, 2))
    ma = compose_symseq(av.seq, unit.carrier, max_arity=w)
    out = Bimodule(op, unit, av.seq, lam, right_unitor(ma), w, a_av, ma)
    check_bimodule_laws(out)
    return out


def free_bimodule(left: Operad, right: Operad, v: SymSeq,
                  window: Optional[int] = None) -> Bimodule:
    """The free ``(B, A)``-bimodule ``B o V o A`` with both actions by multiplication."""
    w = min(left.arity_bound, right.arity_bound) if window is None else window
    bc, ac = left.carrier, right.carrier
    va = compose_symseq(v, ac, max_arity=w)
    bva = compose_symseq(bc, va.seq, max_arity=w)
    carrier = bva.seq
    comp2b = compose_symseq(bc, bc, max_arity=w)
    mu_b = restrict_map(left.mu, comp2b.seq)
    comp2a = compose_symseq(ac, ac, max_arity=w)
    mu_a = restrict_map(right.mu, comp2a.seq)
    b_bva = compose_symseq(bc, carrier, max_arity=w)
    bb_va = compose_symseq(comp2b.seq, va.seq, max_arity=w)
    lam = compose_maps(
        hcompose_maps(mu_b, identity_map(va.seq), bb_va, bva),
        map_inverse(associator(comp2b, bb_va, bva, b_bva)),
    )
    bva_a = compose_symseq(carrier, ac, max_arity=w)
    va_a = compose_symseq(va.seq, ac, max_arity=w)
    b_vaa = compose_symseq(bc, va_a.seq, max_arity=w)
    v_aa = compose_symseq(v, comp2a.seq, max_arity=w)
    inner = compose_maps(
        hcompose_maps(identity_map(v), mu_a, v_aa, va),
        associator(va, va_a, comp2a, v_aa),
    )  # (V o A) o A -> V o A
    rho = compose_maps(
        hcompose_maps(identity_map(bc), inner, b_vaa, bva),
        associator(bva, bva_a, va_a, b_vaa),
    )
    out = Bimodule(left, right, carrier, lam, rho, w, b_bva, bva_a)
    check_bimodule_laws(out)
    return out


def algebra_as_module(alg: Algebra) -> Bimodule:
    """An algebra is a left module with empty domain."""
    op = alg.operad
    cells = {}
    for x in op.sorts:
        elems = alg.family.sets[x]
        if elems:
            cells[((), x)] = YoungSet.trivial((), elems)
    carrier = SymSeq((), op.sorts, cells)

    def lam_fn(key, raw):
        _w, x = key
        mid, a, _blocks, fs, _sig = raw
        return alg.act[(mid, x)][(a, fs)]

    return left_module(op, (), carrier, lam_fn, window=op.arity_bound)


# ---------------------------------------------------------------------------
# relative composition
# ---------------------------------------------------------------------------


@dataclass
class RelCompose:
    bimodule: Bimodule
    nm: Composite        # plain composite of the carriers
    proj: SymSeqMap      # nm.seq -> relative carrier
    lift: dict           # (w, z) -> {class -> nm class of its representative}


def relative_compose(nb: Bimodule, mb: Bimodule, validate: bool = True) -> RelCompose:
    """Composite over the middle operad, by the reflexive-coequalizer quotient."""
    if nb.right is not mb.left and nb.right.carrier.cells != mb.left.carrier.cells:
        raise InputError("middle operads do not match")
    w = min(nb.window, mb.window)
    bmid = mb.left
    n, m = nb.carrier, mb.carrier
    nm = compose_symseq(n, m, max_arity=w)
    nb_ = compose_symseq(n, bmid.carrier, max_arity=w)
    nb_m = compose_symseq(nb_.seq, m, max_arity=w)
    b_m = compose_symseq(bmid.carrier, m, max_arity=w)
    n_bm = compose_symseq(n, b_m.seq, max_arity=w)
    rho_n = restrict_map(nb.rho, nb_.seq)
    lam_m = restrict_map(mb.lam, b_m.seq)
    e1 = hcompose_maps(rho_n, identity_map(m), nb_m, nm)
    e2 = compose_maps(
        hcompose_maps(identity_map(n), lam_m, n_bm, nm),
        associator(nb_, nb_m, b_m, n_bm),
    )
    carrier, proj = coequalize_maps(e1, e2)
    lift = {}
    for key, cm in proj.comp.items():
        sec = {}
        for cls_nm, cls_rel in cm.items():
            if cls_rel not in sec:
                sec[cls_rel] = cls_nm
            else:
                sec[cls_rel] = min(sec[cls_rel], cls_nm)
        lift[key] = sec

    # induced left action of the outer operad
    cc = nb.left.carrier
    c_q = compose_symseq(cc, carrier, max_arity=w)
    c_nm = compose_symseq(cc, nm.seq, max_arity=w)
    c_n = compose_symseq(cc, n, max_arity=w)
    cn_m = compose_symseq(c_n.seq, m, max_arity=w)
    asc = associator(c_n, cn_m, nm, c_nm)
    lam_n = restrict_map(nb.lam, c_n.seq)
    chain_l = compose_maps(
        proj, compose_maps(hcompose_maps(lam_n, identity_map(m), cn_m, nm), map_inverse(asc))
    )
    lam_comp = {}
    for key, reps in c_q.reps.items():
        w_, z = key
        table = {}
        for idx, raw in enumerate(reps):
            mid, g, blocks, qs, sig = raw
            lifted = tuple(lift[(b, y)][q] for b, y, q in zip(blocks, mid, qs))
            table[idx] = chain_l.at(w_, z, c_nm.class_of(w_, z, (mid, g, blocks, lifted, sig)))
        lam_comp[key] = table
    lam_rel = SymSeqMap(c_q.seq, carrier, lam_comp)

    # induced right action of the inner operad
    ac = mb.right.carrier
    q_a = compose_symseq(carrier, ac, max_arity=w)
    nm_a = compose_symseq(nm.seq, ac, max_arity=w)
    m_a = compose_symseq(m, ac, max_arity=w)
    n_ma = compose_symseq(n, m_a.seq, max_arity=w)
    asc2 = associator(nm, nm_a, m_a, n_ma)
    rho_m = restrict_map(mb.rho, m_a.seq)
    chain_r = compose_maps(
        proj, compose_maps(hcompose_maps(identity_map(n), rho_m, n_ma, nm), asc2)
    )
    rho_comp = {}
    for key, reps in q_a.reps.items():
        w_, z = key
        table = {}
        for idx, raw in enumerate(reps):
            mid, q, blocks, as_, sig = raw
            lifted = lift[(mid, z)][q]
            table[idx] = chain_r.at(w_, z, nm_a.class_of(w_, z, (mid, lifted, blocks, as_, sig)))
        rho_comp[key] = table
    rho_rel = SymSeqMap(q_a.seq, carrier, rho_comp)

    out = Bimodule(nb.left, mb.right, carrier, lam_rel, rho_rel, w, c_q, q_a)
    if validate:
        check_bimodule_laws(out)
    return RelCompose(out, nm, proj, lift)


def rel_left_unitor(mb: Bimodule, rel: Optional[RelCompose] = None):
    """Split-fork iso ``B o_B M -> M`` induced by the left action."""
    if rel is None:
        rel = relative_compose(identity_bimodule(mb.left), mb, validate=False)
    lam = restrict_map(mb.lam, rel.nm.seq, mb.carrier)
    comp = {}
    for key, sec in rel.lift.items():
        comp[key] = {cls: lam.at(*key, nm_cls) for cls, nm_cls in sec.items()}
    out = SymSeqMap(rel.bimodule.carrier, mb.carrier, comp)
    if not out.is_bijective():
        raise ValidationError("left unit map of a relative composite failed to biject")
    return out, rel


def rel_right_unitor(mb: Bimodule, rel: Optional[RelCompose] = None):
    """Split-fork iso ``M o_A A -> M`` induced by the right action."""
    if rel is None:
        rel = relative_compose(mb, identity_bimodule(mb.right), validate=False)
    rho = restrict_map(mb.rho, rel.nm.seq, mb.carrier)
    comp = {}
    for key, sec in rel.lift.items():
        comp[key] = {cls: rho.at(*key, nm_cls) for cls, nm_cls in sec.items()}
    out = SymSeqMap(rel.bimodule.carrier, mb.carrier, comp)
    if not out.is_bijective():
        raise ValidationError("right unit map of a relative composite failed to biject")
    return out, rel


def rel_hcompose(
    beta: SymSeqMap,
    alpha: SymSeqMap,
    src: RelCompose,
    dst: RelCompose,
) -> SymSeqMap:
    """Relative horizontal composite: lift, compose plainly, project back."""
    plain = hcompose_maps(beta, alpha, src.nm, dst.nm)
    comp = {}
    for key, sec in src.lift.items():
        comp[key] = {
            cls: dst.proj.at(*key, plain.at(*key, nm_cls)) for cls, nm_cls in sec.items()
        }
    return SymSeqMap(src.bimodule.carrier, dst.bimodule.carrier, comp)


def rel_associator(
    nm_rel: RelCompose,   # N o_C M
    nm_l: RelCompose,     # (N o_C M) o_B L
    ml_rel: RelCompose,   # M o_B L
    n_ml: RelCompose,     # N o_C (M o_B L)
) -> SymSeqMap:
    """Regrouping iso ``(N o_C M) o_B L -> N o_C (M o_B L)`` on representatives."""
    nm = nm_rel.nm           # compose(N, M)
    ml = ml_rel.nm           # compose(M, L)
    # plain composites to route through
    n_carrier = nm.outer
    m_carrier = nm.inner
    l_carrier = ml.inner
    w = min(nm_l.bimodule.window, n_ml.bimodule.window)
    nm_plain_l = compose_symseq(nm.seq, l_carrier, max_arity=w)
    n_ml_plain = compose_symseq(n_carrier, ml.seq, max_arity=w)
    asc = associator(nm, nm_plain_l, ml, n_ml_plain)
    proj_inner = hcompose_maps(
        identity_map(n_carrier), ml_rel.proj, n_ml_plain, n_ml.nm
    )
    comp = {}
    for key, sec in nm_l.lift.items():
        table = {}
        for cls, q1l_cls in sec.items():
            mid, q1, blocks, ls, sig = nm_l.nm.rep(*key, q1l_cls)
            lifted = nm_rel.lift[(mid, key[1])][q1]
            raw3 = (mid, lifted, blocks, ls, sig)
            c3 = nm_plain_l.class_of(*key, raw3)
            c4 = asc.at(*key, c3)
            c5 = proj_inner.at(*key, c4)
            table[cls] = n_ml.proj.at(*key, c5)
        comp[key] = table
    out = SymSeqMap(nm_l.bimodule.carrier, n_ml.bimodule.carrier, comp)
    if not out.is_bijective():
        raise ValidationError("relative associator failed to biject")
    return out


# ---------------------------------------------------------------------------
# bimodules from (op)lax monad morphisms
# ---------------------------------------------------------------------------


def check_lax_monad_morphism(
    f: SymSeq, a: Operad, b: Operad, phi: SymSeqMap, w: int
) -> None:
    """``phi: B o F -> F o A`` making the lax monad morphism squares commute."""
    bc, ac = b.carrier, a.carrier
    bf = compose_symseq(bc, f, max_arity=w)
    fa = compose_symseq(f, ac, max_arity=w)
    if phi.src is not bf.seq:
        phi = restrict_map(phi, bf.seq, fa.seq)
    comp2b = compose_symseq(bc, bc, max_arity=w)
    comp2a = compose_symseq(ac, ac, max_arity=w)
    bb_f = compose_symseq(comp2b.seq, f, max_arity=w)
    b_bf = compose_symseq(bc, bf.seq, max_arity=w)
    b_fa = compose_symseq(bc, fa.seq, max_arity=w)
    bf_a = compose_symseq(bf.seq, ac, max_arity=w)
    fa_a = compose_symseq(fa.seq, ac, max_arity=w)
    f_aa = compose_symseq(f, comp2a.seq, max_arity=w)
    mu_b = restrict_map(b.mu, comp2b.seq)
    mu_a = restrict_map(a.mu, comp2a.seq)
    s1 = compose_maps(phi, hcompose_maps(mu_b, identity_map(f), bb_f, bf))
    step = associator(comp2b, bb_f, bf, b_bf)
    step2 = hcompose_maps(identity_map(bc), phi, b_bf, b_fa)
    step3 = map_inverse(associator(bf, bf_a, fa, b_fa))
    step4 = hcompose_maps(phi, identity_map(ac), bf_a, fa_a)
    step5 = associator(fa, fa_a, comp2a, f_aa)
    step6 = hcompose_maps(identity_map(f), mu_a, f_aa, fa)
    s2 = compose_maps(
        step6, compose_maps(step5, compose_maps(step4, compose_maps(step3, compose_maps(step2, step))))
    )
    if not map_equal(s1, s2):
        _fail("lax morphism multiplication square", first_map_difference(s1, s2))
    idf = compose_symseq(id_symseq(b.sorts), f, max_arity=w)
    fid = compose_symseq(f, id_symseq(a.sorts), max_arity=w)
    u1 = compose_maps(phi, hcompose_maps(b.eta, identity_map(f), idf, bf))
    u2 = compose_maps(
        hcompose_maps(identity_map(f), a.eta, fid, fa),
        compose_maps(right_unitor_inv(fid), left_unitor(idf)),
    )
    if not map_equal(u1, u2):
        _fail("lax morphism unit triangle", first_map_difference(u1, u2))


def bimodule_of_lax(f: SymSeq, a: Operad, b: Operad, phi: SymSeqMap,
                    window: Optional[int] = None, validate: bool = True) -> Bimodule:
    """Carrier ``F o A`` with the free right action and phi-twisted left action."""
    w = min(a.arity_bound, b.arity_bound) if window is None else window
    if validate:
        check_lax_monad_morphism(f, a, b, phi, w)
    ac, bc = a.carrier, b.carrier
    fa = compose_symseq(f, ac, max_arity=w)
    comp2a = compose_symseq(ac, ac, max_arity=w)
    fa_a = compose_symseq(fa.seq, ac, max_arity=w)
    f_aa = compose_symseq(f, comp2a.seq, max_arity=w)
    mu_a = restrict_map(a.mu, comp2a.seq)
    rho = compose_maps(
        hcompose_maps(identity_map(f), mu_a, f_aa, fa),
        associator(fa, fa_a, comp2a, f_aa),
    )
    bf = compose_symseq(bc, f, max_arity=w)
    phi = restrict_map(phi, bf.seq, fa.seq)
    b_fa = compose_symseq(bc, fa.seq, max_arity=w)
    bf_a = compose_symseq(bf.seq, ac, max_arity=w)
    lam = compose_maps(
        rho,
        compose_maps(
            hcompose_maps(phi, identity_map(ac), bf_a, fa_a),
            map_inverse(associator(bf, bf_a, fa, b_fa)),
        ),
    )
    return bimodule_from_maps(b, a, fa.seq, lam, rho, w, b_fa, fa_a, validate=validate)


def check_oplax_monad_morphism(
    f: SymSeq, a: Operad, b: Operad, psi: SymSeqMap, w: int
) -> None:
    """``psi: F o A -> B o F`` making the oplax monad morphism squares commute."""
    bc, ac = b.carrier, a.carrier
    fa = compose_symseq(f, ac, max_arity=w)
    bf = compose_symseq(bc, f, max_arity=w)
    if psi.src is not fa.seq:
        psi = restrict_map(psi, fa.seq, bf.seq)
    comp2b = compose_symseq(bc, bc, max_arity=w)
    comp2a = compose_symseq(ac, ac, max_arity=w)
    fa_a = compose_symseq(fa.seq, ac, max_arity=w)
    f_aa = compose_symseq(f, comp2a.seq, max_arity=w)
    bf_a = compose_symseq(bf.seq, ac, max_arity=w)
    b_fa = compose_symseq(bc, fa.seq, max_arity=w)
    b_bf = compose_symseq(bc, bf.seq, max_arity=w)
    bb_f = compose_symseq(comp2b.seq, f, max_arity=w)
    mu_b = restrict_map(b.mu, comp2b.seq)
    mu_a = restrict_map(a.mu, comp2a.seq)
    s1 = compose_maps(
        psi,
        compose_maps(
            hcompose_maps(identity_map(f), mu_a, f_aa, fa),
            associator(fa, fa_a, comp2a, f_aa),
        ),
    )
    t1 = hcompose_maps(psi, identity_map(ac), fa_a, bf_a)
    t2 = associator(bf, bf_a, fa, b_fa)
    t3 = hcompose_maps(identity_map(bc), psi, b_fa, b_bf)
    t4 = map_inverse(associator(comp2b, bb_f, bf, b_bf))
    t5 = hcompose_maps(mu_b, identity_map(f), bb_f, bf)
    s2 = compose_maps(t5, compose_maps(t4, compose_maps(t3, compose_maps(t2, t1))))
    if not map_equal(s1, s2):
        _fail("oplax morphism multiplication square", first_map_difference(s1, s2))
    fid = compose_symseq(f, id_symseq(a.sorts), max_arity=w)
    idf = compose_symseq(id_symseq(b.sorts), f, max_arity=w)
    u1 = compose_maps(psi, hcompose_maps(identity_map(f), a.eta, fid, fa))
    u2 = compose_maps(
        hcompose_maps(b.eta, identity_map(f), idf, bf),
        compose_maps(left_unitor_inv(idf), right_unitor(fid)),
    )
    if not map_equal(u1, u2):
        _fail("oplax morphism unit triangle", first_map_difference(u1, u2))


def bimodule_of_oplax(f: SymSeq, a: Operad, b: Operad, psi: SymSeqMap,
                      window: Optional[int] = None, validate: bool = True) -> Bimodule:
    """Carrier ``B o F`` with the free left action and psi-twisted right action."""
    w = min(a.arity_bound, b.arity_bound) if window is None else window
    if validate:
        check_oplax_monad_morphism(f, a, b, psi, w)
    ac, bc = a.carrier, b.carrier
    bf = compose_symseq(bc, f, max_arity=w)
    comp2b = compose_symseq(bc, bc, max_arity=w)
    b_bf = compose_symseq(bc, bf.seq, max_arity=w)
    bb_f = compose_symseq(comp2b.seq, f, max_arity=w)
    mu_b = restrict_map(b.mu, comp2b.seq)
    lam = compose_maps(
        hcompose_maps(mu_b, identity_map(f), bb_f, bf),
        map_inverse(associator(comp2b, bb_f, bf, b_bf)),
    )
    fa = compose_symseq(f, ac, max_arity=w)
    psi = restrict_map(psi, fa.seq, bf.seq)
    bf_a = compose_symseq(bf.seq, ac, max_arity=w)
    b_fa = compose_symseq(bc, fa.seq, max_arity=w)
    rho = compose_maps(
        lam,
        compose_maps(
            hcompose_maps(identity_map(bc), psi, b_fa, b_bf),
            associator(bf, bf_a, fa, b_fa),
        ),
    )
    return bimodule_from_maps(b, a, bf.seq, lam, rho, w, b_bf, bf_a, validate=validate)


# ---------------------------------------------------------------------------
# adjunctions
# ---------------------------------------------------------------------------


@dataclass
class BimAdjunction:
    """An adjunction in the bimodule bicategory, with validated triangles."""

    left: Bimodule      # F': X/A -> Y/B
    right: Bimodule     # G': Y/B -> X/A
    unit: SymSeqMap     # carrier of 1_{X/A} -> carrier of G' o_A F'
    counit: SymSeqMap   # carrier of F' o_A G' -> carrier of 1_{Y/B}
    gf: RelCompose
    fg: RelCompose


def _check_triangles(adj: BimAdjunction) -> None:
    f, u = adj.left, adj.right
    a, b = f.right, f.left
    # (F eta) ; assoc^{-1} ; (eps F) == unitors, as maps F -> F
    f_id = relative_compose(f, identity_bimodule(a), validate=False)
    f_gf = relative_compose(f, adj.gf.bimodule, validate=False)
    fg_f = relative_compose(adj.fg.bimodule, f, validate=False)
    id_f = relative_compose(identity_bimodule(b), f, validate=False)
    r_f, _ = rel_right_unitor(f, f_id)
    l_f, _ = rel_left_unitor(f, id_f)
    m1 = rel_hcompose(identity_map(f.carrier), adj.unit, f_id, f_gf)
    asc = rel_associator(adj.fg, fg_f, adj.gf, f_gf)
    m2 = rel_hcompose(adj.counit, identity_map(f.carrier), fg_f, id_f)
    tri1 = compose_maps(l_f, compose_maps(m2, compose_maps(map_inverse(asc), m1)))
    lhs = compose_maps(tri1, map_inverse(r_f))
    if not map_equal(lhs, identity_map(f.carrier)):
        _fail("first triangle identity", first_map_difference(lhs, identity_map(f.carrier)))
    # (eta U) ; assoc ; (U eps) == unitors, as maps U -> U
    id_u = relative_compose(identity_bimodule(a), u, validate=False)
    gf_u = relative_compose(adj.gf.bimodule, u, validate=False)
    u_fg = relative_compose(u, adj.fg.bimodule, validate=False)
    u_id = relative_compose(u, identity_bimodule(b), validate=False)
    l_u, _ = rel_left_unitor(u, id_u)
    r_u, _ = rel_right_unitor(u, u_id)
    n1 = rel_hcompose(adj.unit, identity_map(u.carrier), id_u, gf_u)
    asc2 = rel_associator(adj.gf, gf_u, adj.fg, u_fg)
    n2 = rel_hcompose(identity_map(u.carrier), adj.counit, u_fg, u_id)
    tri2 = compose_maps(r_u, compose_maps(n2, compose_maps(asc2, n1)))
    lhs2 = compose_maps(tri2, map_inverse(l_u))
    if not map_equal(lhs2, identity_map(u.carrier)):
        _fail("second triangle identity", first_map_difference(lhs2, identity_map(u.carrier)))


def adjunction_from_operad(op: Operad) -> BimAdjunction:
    """The free/forgetful adjunction between the unit operad and ``op``."""
    unit = unit_operad(op.sorts, op.arity_bound)
    a = op.carrier
    a_id = compose_symseq(a, unit.carrier, max_arity=op.arity_bound)
    id_a = compose_symseq(unit.carrier, a, max_arity=op.arity_bound)
    free = Bimodule(op, unit, a, op.mu, right_unitor(a_id), op.arity_bound, op.comp2, a_id)
    forg = Bimodule(unit, op, a, left_unitor(id_a), op.mu, op.arity_bound, id_a, op.comp2)
    check_bimodule_laws(free)
    check_bimodule_laws(forg)
    gf = relative_compose(forg, free, validate=False)   # A o_A A
    fg = relative_compose(free, forg, validate=False)   # A o_1 A
    # unit: Id -> A o_A A through eta and the split-fork section
    mu_res = restrict_map(op.mu, gf.nm.seq, a)
    qbar = {}
    for key, sec in gf.lift.items():
        qbar[key] = {cls: mu_res.at(*key, nm_cls) for cls, nm_cls in sec.items()}
    qbar_map = SymSeqMap(gf.bimodule.carrier, a, qbar)
    unit_map = compose_maps(map_inverse(qbar_map), op.eta)
    # counit: A o_1 A -> A through mu
    mu_res2 = restrict_map(op.mu, fg.nm.seq, a)
    counit = {}
    for key, sec in fg.lift.items():
        counit[key] = {cls: mu_res2.at(*key, nm_cls) for cls, nm_cls in sec.items()}
    counit_map = SymSeqMap(fg.bimodule.carrier, a, counit)
    adj = BimAdjunction(free, forg, unit_map, counit_map, gf, fg)
    _check_triangles(adj)
    return adj


def check_sym_adjunction(f: SymSeq, u: SymSeq, eta: SymSeqMap, eps: SymSeqMap, w: int) -> None:
    """Triangle identities for an adjunction ``F -| U`` inside Sym."""
    uf = compose_symseq(u, f, max_arity=w)
    fu = compose_symseq(f, u, max_arity=w)
    f_id = compose_symseq(f, id_symseq(f.dom), max_arity=w)
    id_f = compose_symseq(id_symseq(f.cod), f, max_arity=w)
    f_uf = compose_symseq(f, uf.seq, max_arity=w)
    fu_f = compose_symseq(fu.seq, f, max_arity=w)
    eta = restrict_map(eta, id_symseq(f.dom), uf.seq)
    eps = restrict_map(eps, fu.seq, id_symseq(f.cod))
    m1 = hcompose_maps(identity_map(f), eta, f_id, f_uf)
    asc = associator(fu, fu_f, uf, f_uf)
    m2 = hcompose_maps(eps, identity_map(f), fu_f, id_f)
    tri1 = compose_maps(
        left_unitor(id_f),
        compose_maps(m2, compose_maps(map_inverse(asc), compose_maps(m1, right_unitor_inv(f_id)))),
    )
    if not map_equal(tri1, identity_map(f)):
        _fail("Sym adjunction triangle (left)", first_map_difference(tri1, identity_map(f)))
    u_id = compose_symseq(u, id_symseq(u.dom), max_arity=w)
    id_u = compose_symseq(id_symseq(u.cod), u, max_arity=w)
    uf_u = compose_symseq(uf.seq, u, max_arity=w)
    u_fu = compose_symseq(u, fu.seq, max_arity=w)
    n1 = hcompose_maps(eta, identity_map(u), id_u, uf_u)
    asc2 = associator(uf, uf_u, fu, u_fu)
    n2 = hcompose_maps(identity_map(u), eps, u_fu, u_id)
    tri2 = compose_maps(
        right_unitor(u_id),
        compose_maps(n2, compose_maps(asc2, compose_maps(n1, left_unitor_inv(id_u)))),
    )
    if not map_equal(tri2, identity_map(u)):
        _fail("Sym adjunction triangle (right)", first_map_difference(tri2, identity_map(u)))


def transport_adjunction(
    f: SymSeq,
    u: SymSeq,
    eta: SymSeqMap,
    eps: SymSeqMap,
    a: Operad,
    b: Operad,
    xi: SymSeqMap,
    window: Optional[int] = None,
) -> BimAdjunction:
    """Lift an adjunction ``F -| U`` in Sym along a monad map ``xi: A -> U(BF)``.

    ``xi`` lands in the composite bracketed as ``U o (B o F)``.
    """
    w = min(a.arity_bound, b.arity_bound) if window is None else window
    check_sym_adjunction(f, u, eta, eps, w)
    ac, bc = a.carrier, b.carrier
    bf = compose_symseq(bc, f, max_arity=w)
    u_bf = compose_symseq(u, bf.seq, max_arity=w)
    xi = restrict_map(xi, a.carrier, u_bf.seq)
    fu = compose_symseq(f, u, max_arity=w)
    eps = restrict_map(eps, fu.seq, id_symseq(f.cod))

    # psi: F o A -> B o F
    fa = compose_symseq(f, ac, max_arity=w)
    f_ubf = compose_symseq(f, u_bf.seq, max_arity=w)
    fu_bf = compose_symseq(fu.seq, bf.seq, max_arity=w)
    id_bf = compose_symseq(id_symseq(f.cod), bf.seq, max_arity=w)
    psi = compose_maps(
        left_unitor(id_bf),
        compose_maps(
            hcompose_maps(eps, identity_map(bf.seq), fu_bf, id_bf),
            compose_maps(
                map_inverse(associator(fu, fu_bf, u_bf, f_ubf)),
                hcompose_maps(identity_map(f), xi, fa, f_ubf),
            ),
        ),
    )
    # phi: A o U -> U o B
    au = compose_symseq(ac, u, max_arity=w)
    ubf_u = compose_symseq(u_bf.seq, u, max_arity=w)
    bf_u = compose_symseq(bf.seq, u, max_arity=w)
    u_bfu = compose_symseq(u, bf_u.seq, max_arity=w)
    b_fu = compose_symseq(bc, fu.seq, max_arity=w)
    b_id = compose_symseq(bc, id_symseq(f.cod), max_arity=w)
    ub = compose_symseq(u, bc, max_arity=w)
    u_bid = compose_symseq(u, b_id.seq, max_arity=w)
    inner = compose_maps(
        hcompose_maps(identity_map(bc), eps, b_fu, b_id),
        associator(bf, bf_u, fu, b_fu),
    )  # (B o F) o U -> B o Id
    phi = compose_maps(
        hcompose_maps(identity_map(u), right_unitor(b_id), u_bid, ub),
        compose_maps(
            hcompose_maps(identity_map(u), inner, u_bfu, u_bid),
            compose_maps(
                associator(u_bf, ubf_u, bf_u, u_bfu),
                hcompose_maps(xi, identity_map(u), au, ubf_u),
            ),
        ),
    )
    fprime = bimodule_of_oplax(f, a, b, psi, window=w)
    gprime = bimodule_of_lax(u, b, a, phi, window=w)
    gf = relative_compose(gprime, fprime, validate=False)
    fg = relative_compose(fprime, gprime, validate=False)

    # collapse (U o B) o (B o F) -> U o (B o F) with the middle multiplication
    ub_bf = gf.nm  # compose(gprime.carrier, fprime.carrier)
    comp2b = compose_symseq(bc, bc, max_arity=w)
    mu_b = restrict_map(b.mu, comp2b.seq)
    b_bf = compose_symseq(bc, bf.seq, max_arity=w)
    u_b_bf = compose_symseq(u, b_bf.seq, max_arity=w)
    bb_f = compose_symseq(comp2b.seq, f, max_arity=w)
    collapse_inner = compose_maps(
        hcompose_maps(mu_b, identity_map(f), bb_f, bf),
        map_inverse(associator(comp2b, bb_f, bf, b_bf)),
    )  # B o (B o F) -> B o F
    m = compose_maps(
        hcompose_maps(identity_map(u), collapse_inner, u_b_bf, u_bf),
        associator(ub, ub_bf, b_bf, u_b_bf),
    )  # (U o B) o (B o F) -> U o (B o F)
    mbar_comp = {
        key: {cls: m.at(*key, nm_cls) for cls, nm_cls in sec.items()}
        for key, sec in gf.lift.items()
    }
    mbar = SymSeqMap(gf.bimodule.carrier, u_bf.seq, mbar_comp)
    unit_map = compose_maps(map_inverse(mbar), xi)

    # sigma: (B o F) o (U o B) -> B, descending to the counit
    bf_ub = fg.nm
    f_ub = compose_symseq(f, ub.seq, max_arity=w)
    b_fub = compose_symseq(bc, f_ub.seq, max_arity=w)
    fu_b = compose_symseq(fu.seq, bc, max_arity=w)
    id_b = compose_symseq(id_symseq(f.cod), bc, max_arity=w)
    b_idb = compose_symseq(bc, id_b.seq, max_arity=w)
    inner2 = compose_maps(
        hcompose_maps(eps, identity_map(bc), fu_b, id_b),
        map_inverse(associator(fu, fu_b, ub, f_ub)),
    )  # F o (U o B) -> Id o B
    sigma = compose_maps(
        mu_b,
        compose_maps(
            hcompose_maps(identity_map(bc), left_unitor(id_b), b_idb, comp2b),
            compose_maps(
                hcompose_maps(identity_map(bc), inner2, b_fub, b_idb),
                associator(bf, bf_ub, f_ub, b_fub),
            ),
        ),
    )
    counit_comp = {
        key: {cls: sigma.at(*key, nm_cls) for cls, nm_cls in sec.items()}
        for key, sec in fg.lift.items()
    }
    counit_map = SymSeqMap(fg.bimodule.carrier, bc, counit_comp)
    adj = BimAdjunction(fprime, gprime, unit_map, counit_map, gf, fg)
    _check_triangles(adj)
    return adj


# ---------------------------------------------------------------------------
# restriction and extension along an operad morphism
# ---------------------------------------------------------------------------


def delta_upper(phi: OperadMorphism) -> SymSeq:
    """Unary sequence ``X -> Y`` supported at ``((x), u(x))``."""
    u = phi.u
    cells = {}
    for x in phi.src.sorts:
        cells[((x,), u[x])] = YoungSet.trivial((x,), (("pt", x),))
    return SymSeq(phi.src.sorts, phi.dst.sorts, cells)


def delta_lower(phi: OperadMorphism) -> SymSeq:
    """Unary sequence ``Y -> X`` supported at ``((u(x)), x)``."""
    u = phi.u
    cells = {}
    for x in phi.src.sorts:
        cells[((u[x],), x)] = YoungSet.trivial((u[x],), (("pt", x),))
    return SymSeq(phi.dst.sorts, phi.src.sorts, cells)


def _u_word(u: dict, w: Word) -> Word:
    return tuple(u[s] for s in w)


def u_circ(phi: OperadMorphism, validate: bool = True) -> Bimodule:
    """The ``(B, A)``-bimodule with cells ``B[u(w); y]``."""
    a, b, u = phi.src, phi.dst, phi.u
    w_bound = min(a.arity_bound, b.arity_bound)
    cells = {}
    for (v, y), bcell in b.carrier.cells.items():
        if bcell.size == 0:
            continue
        by_target: dict = {}
        for x in a.sorts:
            by_target.setdefault(u[x], []).append(x)
        pre = [by_target.get(s, []) for s in v]
        if any(not p for p in pre):
            continue
        for combo in itertools.product(*pre):
            w, _t = canonical_word(tuple(combo))
            key = (w, y)
            if key in cells:
                continue
            cw_y, tau = canonical_word(_u_word(u, w))
            gen_maps = {}
            for i in stab_gens(w):
                s_i = Perm.transposition(len(w), i)
                h = compose(compose(tau, s_i), tau.inverse())
                gen_maps[i] = {lab: bcell.act(lab, h) for lab in bcell.labels}
            cells[key] = YoungSet(w, bcell.labels, gen_maps)
    carrier = SymSeq(a.sorts, b.sorts, cells)

    def to_b_raw(key, raw, labels_are_xi: bool):
        """Map a composite raw over X-words to the corresponding B o B raw."""
        w, y = key
        mid, g, blocks, fs, sig = raw
        if labels_are_xi:
            # right action: inner labels are A-labels, push through xi first
            fs = tuple(
                phi.xi.at(bl, s, lab) for bl, s, lab in zip(blocks, mid, fs)
            )
            mid_y, tau_mid = canonical_word(_u_word(u, mid))
            outer_label = g
        else:
            # left action: outer label is a B-label over a Y-word already
            mid_y, tau_mid = mid, Perm.identity(len(mid))
            outer_label = g
        lengths = [len(bl) for bl in blocks]
        perm_blocks = [blocks[tau_mid(p)] for p in range(len(blocks))]
        canons = [canonical_word(_u_word(u, bl)) for bl in perm_blocks]
        cw_y, tau_w = canonical_word(_u_word(u, w))
        from .perms import block_perm, block_diag

        rearr = block_perm(lengths, tau_mid)
        bd = block_diag([c[1].inverse() for c in canons])
        sig_y = compose(compose(compose(tau_w, Perm(sig)), rearr), bd)
        raw_y = (
            mid_y,
            outer_label,
            tuple(c[0] for c in canons),
            tuple(fs[tau_mid(p)] for p in range(len(blocks))),
            sig_y.images,
        )
        return (cw_y, y), raw_y

    def lam_fn(key, raw):
        (cw_y, y), raw_y = to_b_raw(key, raw, labels_are_xi=False)
        cls = b.comp2.class_of(cw_y, y, raw_y)
        return b.mu.at(cw_y, y, cls)

    def rho_fn(key, raw):
        (cw_y, y), raw_y = to_b_raw(key, raw, labels_are_xi=True)
        cls = b.comp2.class_of(cw_y, y, raw_y)
        return b.mu.at(cw_y, y, cls)

    return make_bimodule(b, a, carrier, lam_fn, rho_fn, window=w_bound, validate=validate)


def u_lower_circ(phi: OperadMorphism, validate: bool = True) -> Bimodule:
    """The ``(A, B)``-bimodule with cells ``B[v; u(x)]``."""
    a, b, u = phi.src, phi.dst, phi.u
    w_bound = min(a.arity_bound, b.arity_bound)
    cells = {}
    for (v, y), bcell in b.carrier.cells.items():
        if bcell.size == 0:
            continue
        for x in a.sorts:
            if u[x] != y:
                continue
            cells[(v, x)] = YoungSet(
                v, bcell.labels, {i: dict(mm) for i, mm in bcell.gen_maps.items()}
            )
    carrier = SymSeq(b.sorts, a.sorts, cells)

    def lam_fn(key, raw):
        # A o (u_.) : push the outer A-label through xi, then multiply in B
        w, x = key
        mid, g, blocks, fs, sig = raw
        blab = phi.xi.at(mid, x, g)
        mid_y, tau_mid = canonical_word(_u_word(u, mid))
        lengths = [len(bl) for bl in blocks]
        from .perms import block_perm

        rearr = block_perm(lengths, tau_mid)
        sig_y = compose(Perm(sig), rearr)
        raw_y = (
            mid_y,
            blab,
            tuple(blocks[tau_mid(p)] for p in range(len(blocks))),
            tuple(fs[tau_mid(p)] for p in range(len(blocks))),
            sig_y.images,
        )
        cls = b.comp2.class_of(w, u[x], raw_y)
        return b.mu.at(w, u[x], cls)

    def rho_fn(key, raw):
        # (u_.) o B : plain multiplication in B
        w, x = key
        mid, g, blocks, fs, sig = raw
        cls = b.comp2.class_of(w, u[x], (mid, g, blocks, fs, sig))
        return b.mu.at(w, u[x], cls)

    return make_bimodule(a, b, carrier, lam_fn, rho_fn, window=w_bound, validate=validate)


def restriction(phi: OperadMorphism, nb: Bimodule) -> Bimodule:
    """Pull a left dst-module back to a left src-module along the morphism."""
    a, b, u = phi.src, phi.dst, phi.u
    if nb.left is not b and nb.left.carrier.cells != b.carrier.cells:
        raise InputError("module is not a left module over the morphism target")
    n = nb.carrier
    cells = {}
    for (kw, y), cell in n.cells.items():
        for x in a.sorts:
            if u[x] == y and cell.size:
                cells[(kw, x)] = YoungSet(
                    kw, cell.labels, {i: dict(mm) for i, mm in cell.gen_maps.items()}
                )
    carrier = SymSeq(n.dom, a.sorts, cells)
    w_bound = min(a.arity_bound, nb.window)

    def lam_fn(key, raw):
        kw, x = key
        mid, g, blocks, fs, sig = raw
        blab = phi.xi.at(mid, x, g)
        mid_y, tau_mid = canonical_word(_u_word(u, mid))
        lengths = [len(bl) for bl in blocks]
        from .perms import block_perm

        rearr = block_perm(lengths, tau_mid)
        sig2 = compose(Perm(sig), rearr)
        raw_y = (
            mid_y,
            blab,
            tuple(blocks[tau_mid(p)] for p in range(len(blocks))),
            tuple(fs[tau_mid(p)] for p in range(len(blocks))),
            sig2.images,
        )
        cls = nb.bm.class_of(kw, u[x], raw_y)
        return nb.lam.at(kw, u[x], cls)

    return left_module(a, n.dom, carrier, lam_fn, window=w_bound)


def extension(phi: OperadMorphism, mb: Bimodule, validate: bool = True) -> RelCompose:
    """Left adjoint of restriction: relative composition with ``u_circ``."""
    uc = u_circ(phi, validate=validate)
    return relative_compose(uc, mb, validate=validate)


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------


def _all_young_structures(w: Word, size: int):
    """Every stabilizer action on ``size`` labels at the word ``w``."""
    labels = tuple(range(size))
    gens = stab_gens(w)
    perms = [p for p in itertools.permutations(labels)]
    out = []
    for combo in itertools.product(perms, repeat=len(gens)):
        gen_maps = {g: {lab: combo[k][lab] for lab in labels} for k, g in enumerate(gens)}
        ys = YoungSet(w, labels, gen_maps)
        try:
            ys.validate()
        except ValidationError:
            continue
        out.append(ys)
    return out


def enumerate_bimodules(
    a: Operad,
    b: Operad,
    cell_sizes: dict,
    budget: int = DEFAULT_BUDGET,
    return_bimodules: bool = False,
):
    """All (B, A)-bimodule structures on prescribed cell sizes, exhaustively."""
    keys = sorted(cell_sizes, key=lambda k: (len(k[0]), skey(k)))
    struct_choices = []
    total = 1
    for key in keys:
        w, _y = key
        structures = _all_young_structures(w, cell_sizes[key])
        struct_choices.append(structures)
        total *= max(1, len(structures))
        if total > budget:
            raise BudgetError("bimodule enumeration exceeded its budget")
    found = []
    for combo in itertools.product(*struct_choices):
        cells = {key: ys for key, ys in zip(keys, combo) if ys.size}
        carrier = SymSeq(a.sorts, b.sorts, cells)
        w_bound = min(a.arity_bound, b.arity_bound)
        bm = compose_symseq(b.carrier, carrier, max_arity=w_bound)
        ma = compose_symseq(carrier, a.carrier, max_arity=w_bound)
        lam_choices, rho_choices = [], []
        ok = True
        for key in sorted(bm.seq.cells, key=lambda k: (len(k[0]), skey(k))):
            tgt = carrier.cell(*key)
            if tgt is None:
                ok = bm.seq.cells[key].size == 0
                if not ok:
                    break
                continue
            maps = enumerate_equivariant_maps(bm.seq.cells[key], tgt)
            if not maps:
                ok = False
                break
            lam_choices.append((key, maps))
        if ok:
            for key in sorted(ma.seq.cells, key=lambda k: (len(k[0]), skey(k))):
                tgt = carrier.cell(*key)
                if tgt is None:
                    ok = ma.seq.cells[key].size == 0
                    if not ok:
                        break
                    continue
                maps = enumerate_equivariant_maps(ma.seq.cells[key], tgt)
                if not maps:
                    ok = False
                    break
                rho_choices.append((key, maps))
        if not ok:
            continue
        space = 1
        for _k, ms in lam_choices + rho_choices:
            space *= len(ms)
            if space > budget:
                raise BudgetError("bimodule action enumeration exceeded its budget")
        for lam_combo in itertools.product(*(ms for _k, ms in lam_choices)):
            lam = SymSeqMap(bm.seq, carrier, {k: mm for (k, _), mm in zip(lam_choices, lam_combo)})
            for rho_combo in itertools.product(*(ms for _k, ms in rho_choices)):
                rho = SymSeqMap(ma.seq, carrier, {k: mm for (k, _), mm in zip(rho_choices, rho_combo)})
                cand = Bimodule(b, a, carrier, lam, rho, w_bound, bm, ma)
                try:
                    check_bimodule_laws(cand)
                except ValidationError:
                    continue
                found.append(cand)
    if return_bimodules:
        return found
    return len(found)


def enumerate_bimodule_maps(
    src: Bimodule, dst: Bimodule, budget: int = DEFAULT_BUDGET, return_maps: bool = False
):
    """All bimodule maps ``src -> dst``, by per-cell equivariant enumeration."""
    keys = [k for k, c in src.carrier.cells.items() if c.size]
    per_cell = []
    total = 1
    for key in sorted(keys, key=lambda k: (len(k[0]), skey(k))):
        tgt = dst.carrier.cell(*key)
        if tgt is None:
            return [] if return_maps else 0
        maps = enumerate_equivariant_maps(src.carrier.cells[key], tgt)
        per_cell.append((key, maps))
        total *= max(1, len(maps))
        if total > budget:
            raise BudgetError("bimodule map enumeration exceeded its budget")
    found = []
    for combo in itertools.product(*(ms for _k, ms in per_cell)):
        f = SymSeqMap(src.carrier, dst.carrier, {k: mm for (k, _), mm in zip(per_cell, combo)})
        try:
            check_bimodule_map(f, src, dst)
        except ValidationError:
            continue
        found.append(f)
    if return_maps:
        return found
    return len(found)
