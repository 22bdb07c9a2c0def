import itertools
import random

import pytest

from opdbim.perms import InputError, ValidationError, YoungSet
from opdbim.symseq import Family, SymSeq, compose_symseq, iso_symseq
from opdbim.operads import (
    Algebra,
    assoc_operad,
    builtin,
    com_operad,
    compose_morphisms,
    enumerate_algebra_maps,
    enumerate_algebras,
    free_algebra,
    free_operad,
    identity_morphism,
    magma_operad,
    make_algebra,
    make_operad,
    operad_iso,
    operad_morphism,
    presented_operad,
    pullback_operad,
    restrict_algebra,
    terminal_operad,
    unit_operad,
)

STAR = "*"
ASSOC_REL = (
    ("g", "b", (("g", "b", (("v", 0), ("v", 1))), ("v", 2))),
    ("g", "b", (("v", 0), ("g", "b", (("v", 1), ("v", 2))))),
)


def test_builtins_pass_monad_laws():
    # construction itself runs the monad-law suite
    unit_operad(("a", "b"), 3)
    com_operad(4)
    assoc_operad(3)
    magma_operad(3)
    t = terminal_operad()
    assert t.sorts == () and not t.carrier.cells


def test_builtin_dispatch():
    assert builtin("com", 2).carrier.size((STAR, STAR), STAR) == 1
    assert builtin("assoc", 3).carrier.size((STAR,) * 3, STAR) == 6
    assert builtin("magma", 3).carrier.size((STAR,) * 3, STAR) == 12
    with pytest.raises(InputError):
        builtin("nope")


def test_perturbed_mu_fails_with_witness():
    # break associativity of assoc(2) by twisting the multiplication once
    base = assoc_operad(2)

    def bad_mu(key, raw):
        good = None
        mid, g, blocks, fs, sig = raw
        from opdbim.operads import assoc_operad as _a

        # recompute the correct product, then twist binary outputs
        from opdbim.perms import Perm, block_offsets

        sigma = Perm(sig)
        offs = block_offsets([len(b) for b in blocks])
        out = []
        for a in g:
            for b in fs[a]:
                out.append(sigma(offs[a] + b))
        res = tuple(out)
        if len(res) == 2:
            res = (res[1], res[0])
        return res

    with pytest.raises(ValidationError) as err:
        make_operad(base.carrier, bad_mu, {STAR: (0,)}, 2)
    assert "fails at cell" in str(err.value)


def test_free_on_binary_generator_is_magma():
    free = free_operad((STAR,), {((STAR, STAR), STAR): ("b",)}, 3)
    magma = magma_operad(3)
    assert iso_symseq(free.carrier, magma.carrier) is not None


def test_free_operad_rejects_small_arities():
    with pytest.raises(InputError):
        free_operad((STAR,), {((), STAR): ("c",)}, 2)
    with pytest.raises(InputError):
        free_operad((STAR,), {((STAR,), STAR): ("u",)}, 2)


def test_free_on_empty_signature_is_unit():
    free = free_operad(("a", "b"), {}, 3)
    unit = unit_operad(("a", "b"), 3)
    assert operad_iso(free, unit, sort_map={"a": "a", "b": "b"}) is not None


def test_presented_magma_by_associativity_is_assoc():
    pm = presented_operad((STAR,), {((STAR, STAR), STAR): ("b",)}, [ASSOC_REL], 4)
    assert [pm.carrier.size((STAR,) * n, STAR) for n in (1, 2, 3, 4)] == [1, 2, 6, 24]
    assert operad_iso(pm, assoc_operad(4)) is not None


def test_algebra_validation():
    unit = unit_operad(("a",), 2)
    fam = Family(("a",), {"a": (0, 1, 2)})
    act = {(("a",), "a"): {(("id", "a"), (v,)): v for v in (0, 1, 2)}}
    make_algebra(unit, fam, act)

    com = com_operad(3)
    fam2 = Family((STAR,), {STAR: (0, 1)})

    def com_act(fn):
        act = {}
        for n in range(1, 4):
            w = (STAR,) * n
            table = {}
            for tvec in itertools.product((0, 1), repeat=n):
                table[(0, tvec)] = fn(tvec)
            act[(w, STAR)] = table
        return act

    make_algebra(com, fam2, com_act(min))  # min is commutative and associative
    with pytest.raises(ValidationError):
        make_algebra(com, fam2, com_act(lambda tv: tv[0]))  # left projection


def test_free_algebra_counts():
    unit = unit_operad(("a", "b"), 2)
    t = Family(("a", "b"), {"a": ("u", "v"), "b": ("w",)})
    fa = free_algebra(unit, t)
    assert fa.family.size("a") == 2 and fa.family.size("b") == 1
    com = com_operad(3)
    t2 = Family((STAR,), {STAR: ("p", "q")})
    assert free_algebra(com, t2).family.total() == 9
    empty = Family((STAR,), {STAR: ()})
    assert free_algebra(com, empty).family.total() == 0


def brute_force_binary(filter_fn):
    ops = []
    for values in itertools.product((0, 1), repeat=4):
        table = dict(zip(itertools.product((0, 1), repeat=2), values))
        if filter_fn(table):
            ops.append(table)
    return ops


def is_associative(table):
    return all(
        table[(table[(a, b)], c)] == table[(a, table[(b, c)])]
        for a in (0, 1)
        for b in (0, 1)
        for c in (0, 1)
    )


def is_commutative(table):
    return all(table[(a, b)] == table[(b, a)] for a in (0, 1) for b in (0, 1))


def test_enumerate_algebras_counts_with_oracles():
    assert len(brute_force_binary(is_associative)) == 8
    assert enumerate_algebras(assoc_operad(3), 2) == 8
    assert len(brute_force_binary(lambda t: is_associative(t) and is_commutative(t))) == 6
    assert enumerate_algebras(com_operad(3), 2) == 6
    assert enumerate_algebras(unit_operad(("a",), 2), 5) == 1


def test_enumerate_algebras_relabeling_invariance():
    com = com_operad(3)
    assert enumerate_algebras(com, 2) == enumerate_algebras(com, {STAR: 2})
    relab = make_operad(
        com.carrier.relabelled(order_key=lambda v: -v if isinstance(v, int) else v),
        lambda key, raw: 0,
        {STAR: 0},
        3,
    )
    assert enumerate_algebras(relab, 2) == 6


def test_enumerate_algebras_budget():
    from opdbim.perms import BudgetError

    with pytest.raises(BudgetError):
        enumerate_algebras(com_operad(3), 30, budget=10)


def test_free_forgetful_adjunction_counts():
    unit = unit_operad(("a",), 2)
    t = Family(("a",), {"a": ("u",)})
    free = free_algebra(unit, t)
    target_act = {(("a",), "a"): {(("id", "a"), (v,)): v for v in (0, 1)}}
    target = make_algebra(unit, Family(("a",), {"a": (0, 1)}), target_act)
    assert enumerate_algebra_maps(free, target) == 2  # = |T -> carrier|

    com = com_operad(2)
    t2 = Family((STAR,), {STAR: ("u",)})
    free2 = free_algebra(com, t2)
    min_act = {}
    for n in (1, 2):
        w = (STAR,) * n
        min_act[(w, STAR)] = {
            (0, tv): min(tv) for tv in itertools.product((0, 1), repeat=n)
        }
    target2 = make_algebra(com, Family((STAR,), {STAR: (0, 1)}), min_act)
    assert enumerate_algebra_maps(free2, target2) == 2


def test_identity_morphism_and_restriction():
    com = com_operad(2)
    phi = identity_morphism(com)
    fam = Family((STAR,), {STAR: (0, 1)})
    min_act = {}
    for n in (1, 2):
        w = (STAR,) * n
        min_act[(w, STAR)] = {(0, tv): min(tv) for tv in itertools.product((0, 1), repeat=n)}
    alg = make_algebra(com, fam, min_act)
    back = restrict_algebra(phi, alg)
    assert back.family.sets == alg.family.sets
    assert back.act == alg.act


def test_restriction_of_algebra_along_sort_collapse():
    # restrict a one-sorted algebra to a two-sorted unit operad: fibers agree
    a = unit_operad(("a", "b"), 2)
    b = com_operad(2)
    u = {"a": STAR, "b": STAR}
    xi_cells = {key: {lab: 0 for lab in cell.labels} for key, cell in a.carrier.cells.items()}
    phi = operad_morphism(a, b, u, xi_cells)
    fam = Family((STAR,), {STAR: (0, 1)})
    min_act = {}
    for n in (1, 2):
        w = (STAR,) * n
        min_act[(w, STAR)] = {(0, tv): min(tv) for tv in itertools.product((0, 1), repeat=n)}
    alg = make_algebra(b, fam, min_act)
    restricted = restrict_algebra(phi, alg)
    assert restricted.family.sets["a"] == (0, 1)
    assert restricted.family.sets["b"] == (0, 1)


def test_morphism_composition():
    a = unit_operad(("a", "b"), 2)
    b = com_operad(2)
    u = {"a": STAR, "b": STAR}
    xi_cells = {key: {lab: 0 for lab in cell.labels} for key, cell in a.carrier.cells.items()}
    phi = operad_morphism(a, b, u, xi_cells)
    psi = identity_morphism(b)
    comp = compose_morphisms(psi, phi)
    assert comp.u == u
    for key, cell in a.carrier.cells.items():
        for lab in cell.labels:
            assert comp.xi.at(*key, lab) == phi.xi.at(*key, lab)


def test_pullback_operad_shape():
    b = com_operad(2)
    pb = pullback_operad(b, {"a": STAR, "b": STAR}, ("a", "b"), 2)
    assert pb.carrier.size(("a", "b"), "a") == 1
    assert pb.carrier.size(("a",), "b") == 1


def test_operad_iso_certificates():
    assert operad_iso(com_operad(2), com_operad(2)) is not None
    assert operad_iso(com_operad(2), assoc_operad(2)) is None
