"""Operads as monads on symmetric sequences, their algebras, and enumeration.

An operad carries an explicit multiplication ``mu`` defined on the
materialized composite of its carrier with itself and a unit ``eta`` from the
identity sequence.  Monad laws are verified by exhaustive comparison of
2-cells on every composite cell of arity at most the operad's window; a
failure reports the first offending cell and label.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from .perms import (
    BudgetError,
    InputError,
    Perm,
    ValidationError,
    Word,
    YoungSet,
    act_word,
    block_offsets,
    block_perm,
    block_diag,
    canonical_word,
    compose,
    quotient,
    skey,
    ssorted,
    stab_gens,
)
from .symseq import (
    Composite,
    EvalResult,
    Family,
    SymSeq,
    SymSeqMap,
    analytic_eval,
    associator,
    compose_maps,
    compose_symseq,
    first_map_difference,
    hcompose_maps,
    id_symseq,
    identity_map,
    left_unitor,
    map_equal,
    right_unitor,
)

DEFAULT_BUDGET = 2_000_000


@dataclass
class Operad:
    sorts: tuple
    carrier: SymSeq
    mu: SymSeqMap            # comp2.seq -> carrier
    eta: SymSeqMap           # Id -> carrier
    arity_bound: int
    reduced: bool
    comp2: Composite
    ident: SymSeq            # the identity sequence on sorts

    def eta_label(self, x):
        return self.eta.at((x,), x, ("id", x))

    def mu_class(self, w: Word, x, cls: int):
        return self.mu.at(w, x, cls)

    def support(self):
        return self.carrier.support()

    def is_unit_operad(self) -> bool:
        return all(
            len(w) == 1 and cell.size == 1
            for (w, _x), cell in self.carrier.cells.items()
            if cell.size
        )


def mu_from_raws(comp2: Composite, fn: Callable) -> SymSeqMap:
    """Build the multiplication from a function on class representatives."""
    comp = {}
    for key, reps in comp2.reps.items():
        comp[key] = {idx: fn(key, raw) for idx, raw in enumerate(reps)}
    return SymSeqMap(comp2.seq, comp2.outer, comp)


def make_operad(
    carrier: SymSeq,
    mu_fn: Callable,
    eta_labels: dict,
    arity_bound: int,
    validate: bool = True,
) -> Operad:
    """Assemble and law-check an operad.

    ``mu_fn(key, raw)`` gives the multiplication on composite class
    representatives; ``eta_labels`` maps each sort to its identity label.
    """
    sorts = carrier.dom
    if set(carrier.cod) != set(sorts):
        raise InputError("operad carrier must be an endo sequence")
    reduced = all(len(w) > 0 for (w, _x) in carrier.cells)
    ident = id_symseq(sorts)
    comp2 = compose_symseq(carrier, carrier, max_arity=arity_bound)
    mu = mu_from_raws(comp2, mu_fn)
    eta = SymSeqMap(
        ident,
        carrier,
        {((x,), x): {("id", x): eta_labels[x]} for x in sorts},
    )
    op = Operad(sorts, carrier, mu, eta, arity_bound, reduced, comp2, ident)
    if validate:
        check_monad_laws(op)
    return op


def check_monad_laws(op: Operad) -> None:
    n = op.arity_bound
    a = op.carrier
    op.mu.validate()
    op.eta.validate()
    comp2 = op.comp2
    comp3l = compose_symseq(comp2.seq, a, max_arity=n)
    comp3r = compose_symseq(a, comp2.seq, max_arity=n)
    assoc = associator(comp2, comp3l, comp2, comp3r)
    ida = identity_map(a)
    lhs = compose_maps(op.mu, hcompose_maps(op.mu, ida, comp3l, comp2))
    rhs = compose_maps(op.mu, compose_maps(hcompose_maps(ida, op.mu, comp3r, comp2), assoc))
    diff = None if map_equal(lhs, rhs) else first_map_difference(lhs, rhs)
    if diff is not None:
        key, lab, va, vb = diff
        raise ValidationError(
            f"associativity fails at cell {key}, class {lab!r}: {va!r} != {vb!r}"
        )
    id_a = compose_symseq(op.ident, a, max_arity=n)
    a_id = compose_symseq(a, op.ident, max_arity=n)
    lu = compose_maps(op.mu, hcompose_maps(op.eta, ida, id_a, comp2))
    if not map_equal(lu, left_unitor(id_a)):
        key, lab, va, vb = first_map_difference(lu, left_unitor(id_a))
        raise ValidationError(f"left unit law fails at cell {key}, class {lab!r}")
    ru = compose_maps(op.mu, hcompose_maps(ida, op.eta, a_id, comp2))
    if not map_equal(ru, right_unitor(a_id)):
        key, lab, va, vb = first_map_difference(ru, right_unitor(a_id))
        raise ValidationError(f"right unit law fails at cell {key}, class {lab!r}")


# ---------------------------------------------------------------------------
# builtin operads
# ---------------------------------------------------------------------------


def unit_operad(sorts: Iterable, arity_bound: int = 2) -> Operad:
    ident = id_symseq(ssorted(sorts))

    def mu_fn(key, raw):
        _w, x = key
        return ("id", x)

    return make_operad(ident, mu_fn, {x: ("id", x) for x in ssorted(sorts)}, arity_bound)


def com_operad(arity_bound: int) -> Operad:
    star = "*"
    cells = {}
    for k in range(1, arity_bound + 1):
        w = (star,) * k
        cells[(w, star)] = YoungSet.trivial(w, (0,))
    carrier = SymSeq((star,), (star,), cells)
    return make_operad(carrier, lambda key, raw: 0, {star: 0}, arity_bound)


def assoc_operad(arity_bound: int) -> Operad:
    star = "*"
    cells = {}
    for k in range(1, arity_bound + 1):
        w = (star,) * k
        labels = tuple(sorted(itertools.permutations(range(k))))
        gen_maps = {}
        for t in stab_gens(w):
            s = Perm.transposition(k, t)
            gen_maps[t] = {lab: tuple(s(e) for e in lab) for lab in labels}
        cells[(w, star)] = YoungSet(w, labels, gen_maps)
    carrier = SymSeq((star,), (star,), cells)

    def mu_fn(key, raw):
        mid, g, blocks, fs, sig = raw
        sigma = Perm(sig)
        offs = block_offsets([len(b) for b in blocks])
        out = []
        for a in g:
            for b in fs[a]:
                out.append(sigma(offs[a] + b))
        return tuple(out)

    return make_operad(carrier, mu_fn, {star: (0,)}, arity_bound)


def terminal_operad() -> Operad:
    carrier = SymSeq((), (), {})
    return make_operad(carrier, lambda key, raw: None, {}, 1)


# ---------------------------------------------------------------------------
# free and presented operads
# ---------------------------------------------------------------------------


def _ordered_partitions(positions: tuple, k: int):
    """All ways to split a position set into k ordered nonempty parts."""
    if k == 0:
        if not positions:
            yield ()
        return
    if len(positions) < k:
        return
    if k == 1:
        yield (positions,)
        return
    for size in range(1, len(positions) - k + 2):
        for part0 in itertools.combinations(positions, size):
            remaining = tuple(p for p in positions if p not in part0)
            for parts in _ordered_partitions(remaining, k - 1):
                yield (part0,) + parts


def _free_terms(w: Word, out, signature, cache):
    """All signature terms over the positions of ``w`` with output sort ``out``."""

    def terms(positions: tuple, sort):
        key = (positions, sort)
        if key in cache:
            return cache[key]
        found = []
        if len(positions) == 1 and w[positions[0]] == sort:
            found.append(("v", positions[0]))
        for (v, o), names in signature.items():
            if o != sort:
                continue
            k = len(v)
            for parts in _ordered_partitions(positions, k):
                child_choices = [terms(part, v[j]) for j, part in enumerate(parts)]
                if any(not c for c in child_choices):
                    continue
                for kids in itertools.product(*child_choices):
                    for name in names:
                        found.append(("g", name, kids))
        found.sort(key=skey)
        cache[key] = found
        return found

    # distributing positions into slots only needs position *sets*; but slots
    # are ordered, so we enumerate ordered tuples of disjoint subsets
    return terms(tuple(range(len(w))), out)


def _relabel_term(term, images):
    if term[0] == "v":
        return ("v", images[term[1]])
    return ("g", term[1], tuple(_relabel_term(t, images) for t in term[2]))


def _graft(raw, inner_terms):
    """Substitute inner terms into the leaves of the outer term of a raw."""
    mid, g, blocks, fs, sig = raw
    sigma = Perm(sig)
    offs = block_offsets([len(b) for b in blocks])

    def go(term):
        if term[0] == "v":
            a = term[1]
            images = {q: sigma(offs[a] + q) for q in range(len(blocks[a]))}
            return _relabel_term(inner_terms[a], images)
        return ("g", term[1], tuple(go(t) for t in term[2]))

    return go(g)


def _norm_signature(signature) -> dict:
    out = {}
    for (v, o), names in signature.items():
        v = tuple(v)
        if not is_canonical_word(v):
            raise InputError(f"signature word {v} is not canonical")
        if len(v) == 0:
            raise InputError("nullary generators are rejected: free cells would be infinite")
        if len(v) == 1:
            raise InputError("unary generators are rejected: free cells would be infinite")
        out[(v, o)] = tuple(names)
    return out


def is_canonical_word(w: Word) -> bool:
    return all(skey(w[i]) <= skey(w[i + 1]) for i in range(len(w) - 1))


def _free_cells(sorts, signature, arity_bound):
    sorts = ssorted(sorts)
    cells = {}
    cache_by_word = {}
    for n in range(1, arity_bound + 1):
        for combo in itertools.combinations_with_replacement(sorts, n):
            w = tuple(combo)
            cache: dict = {}
            for out in sorts:
                ts = _free_terms(w, out, signature, cache)
                if ts:
                    cells[(w, out)] = tuple(ts)
            cache_by_word[w] = cache
    return sorts, cells


def free_operad(sorts: Iterable, signature: dict, arity_bound: int) -> Operad:
    """Labelled-tree operad on a finite signature, truncated at the window."""
    signature = _norm_signature(signature)
    sorts, term_cells = _free_cells(sorts, signature, arity_bound)
    cells = {}
    for (w, out), terms in term_cells.items():
        gen_maps = {}
        for t in stab_gens(w):
            s = Perm.transposition(len(w), t)
            images = {p: s(p) for p in range(len(w))}
            gen_maps[t] = {term: _relabel_term(term, images) for term in terms}
        cells[(w, out)] = YoungSet(w, terms, gen_maps)
    carrier = SymSeq(sorts, sorts, cells)

    def mu_fn(key, raw):
        return _graft(raw, raw[3])

    return make_operad(carrier, mu_fn, {x: ("v", 0) for x in sorts}, arity_bound)


def _match(pattern, term, theta):
    if pattern[0] == "v":
        p = pattern[1]
        if p in theta:
            return theta[p] == term
        theta[p] = term
        return True
    if term[0] != "g" or term[1] != pattern[1] or len(term[2]) != len(pattern[2]):
        return False
    return all(_match(pk, tk, theta) for pk, tk in zip(pattern[2], term[2]))


def _substitute(pattern, theta):
    if pattern[0] == "v":
        return theta[pattern[1]]
    return ("g", pattern[1], tuple(_substitute(p, theta) for p in pattern[2]))


def _rewrites(term, rules):
    """All one-step rewrites of ``term`` at any subterm, both orientations."""
    results = []

    def at(t, rebuild):
        for lhs, rhs in rules:
            theta: dict = {}
            if _match(lhs, t, theta):
                results.append(rebuild(_substitute(rhs, theta)))
        if t[0] == "g":
            for i, child in enumerate(t[2]):
                def rb(new, i=i, t=t, rebuild=rebuild):
                    kids = t[2][:i] + (new,) + t[2][i + 1 :]
                    return rebuild(("g", t[1], kids))
                at(child, rb)

    at(term, lambda x: x)
    return results


def presented_operad(sorts: Iterable, signature: dict, relations: list, arity_bound: int) -> Operad:
    """Quotient of the free operad by substitution-closed relation instances."""
    signature = _norm_signature(signature)
    rules = []
    for lhs, rhs in relations:
        lv = _leaf_positions(lhs)
        rv = _leaf_positions(rhs)
        if lv != rv:
            raise InputError(f"relation sides use different position sets: {lv} vs {rv}")
        rules.append((lhs, rhs))
        rules.append((rhs, lhs))
    sorts, term_cells = _free_cells(sorts, signature, arity_bound)
    class_data = {}
    for (w, out), terms in term_cells.items():
        edges = []
        for term in terms:
            for other in _rewrites(term, rules):
                edges.append((term, other))
        q = quotient(terms, edges)
        class_data[(w, out)] = q
    cells = {}
    for (w, out), q in class_data.items():
        gen_maps = {}
        for t in stab_gens(w):
            s = Perm.transposition(len(w), t)
            images = {p: s(p) for p in range(len(w))}
            m = {}
            for idx in range(len(q.classes)):
                m[idx] = q.class_index[_relabel_term(q.representative[idx], images)]
            gen_maps[t] = m
        cells[(w, out)] = YoungSet(w, tuple(range(len(q.classes))), gen_maps)
    carrier = SymSeq(sorts, sorts, cells)

    def mu_fn(key, raw):
        mid, g, blocks, fs, sig = raw
        gterm = class_data[(mid, key[1])].representative[g]
        inner = tuple(
            class_data[(blocks[i], mid[i])].representative[fs[i]] for i in range(len(blocks))
        )
        grafted = _graft((mid, gterm, blocks, inner, sig), inner)
        return class_data[key].class_index[grafted]

    eta_labels = {x: class_data[((x,), x)].class_index[("v", 0)] for x in sorts}
    return make_operad(carrier, mu_fn, eta_labels, arity_bound)


def _leaf_positions(term):
    if term[0] == "v":
        return {term[1]}
    out = set()
    for t in term[2]:
        out |= _leaf_positions(t)
    return out


def magma_operad(arity_bound: int) -> Operad:
    return free_operad(("*",), {(("*", "*"), "*"): ("b",)}, arity_bound)


def builtin(name: str, arity_bound: int = 3, sorts: Iterable = ("*",)) -> Operad:
    if name == "unit":
        return unit_operad(sorts, arity_bound)
    if name == "com":
        return com_operad(arity_bound)
    if name == "assoc":
        return assoc_operad(arity_bound)
    if name == "terminal":
        return terminal_operad()
    if name == "magma":
        return magma_operad(arity_bound)
    raise InputError(f"unknown builtin operad {name!r}")


# ---------------------------------------------------------------------------
# algebras
# ---------------------------------------------------------------------------


@dataclass
class Algebra:
    operad: Operad
    family: Family
    act: dict  # (w, x) -> {(label, tvec): value}

    def apply(self, w: Word, x, label, tvec):
        return self.act[(w, x)][(label, tvec)]


def _family_transport(tvec: tuple, p: Perm) -> tuple:
    return tuple(tvec[p(i)] for i in range(len(tvec)))


def check_algebra_laws(alg: Algebra, partial: bool = False) -> None:
    op = alg.operad
    t = alg.family
    n = op.arity_bound
    for (w, x), cell in op.carrier.cells.items():
        if len(w) > n or cell.size == 0:
            continue
        table = alg.act.get((w, x))
        if table is None:
            if partial:
                continue
            raise ValidationError(f"action missing on cell {(w, x)}")
        for lab in cell.labels:
            for tvec in t.power(w):
                if (lab, tvec) not in table:
                    if partial:
                        continue
                    raise ValidationError(f"action undefined at {(w, x)}, {lab!r}, {tvec}")
                val = table[(lab, tvec)]
                if val not in t.sets[x]:
                    raise ValidationError(f"action value {val!r} outside carrier at {(w, x)}")
        for i in stab_gens(w):
            s = Perm.transposition(len(w), i)
            for lab in cell.labels:
                for tvec in t.power(w):
                    a = table.get((cell.gen_maps[i][lab], tvec))
                    b = table.get((lab, _family_transport(tvec, s)))
                    if a is None or b is None:
                        continue
                    if a != b:
                        raise ValidationError(
                            f"equivariance fails at {(w, x)}, gen {i}, {lab!r}, {tvec}"
                        )
    for x in op.sorts:
        key = ((x,), x)
        table = alg.act.get(key)
        if table is None:
            continue
        e = op.eta_label(x)
        for v in t.sets[x]:
            got = table.get((e, (v,)))
            if got is not None and got != v:
                raise ValidationError(f"unit law fails at sort {x!r}: {v!r} -> {got!r}")
    for key, reps in op.comp2.reps.items():
        w, x = key
        if len(w) > n:
            continue
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, sig = raw
            sigma = Perm(sig)
            offs = block_offsets([len(b) for b in blocks])
            target = op.mu.at(w, x, idx)
            for tvec in t.power(w):
                lhs_entry = alg.act.get((w, x), {}).get((target, tvec))
                concat = tuple(tvec[sigma(p)] for p in range(len(w)))
                inner_vals = []
                ok = True
                for i, b in enumerate(blocks):
                    tv_i = concat[offs[i] : offs[i + 1]]
                    v = alg.act.get((b, mid[i]), {}).get((fs[i], tv_i))
                    if v is None:
                        ok = False
                        break
                    inner_vals.append(v)
                if not ok:
                    continue
                rhs_entry = alg.act.get((mid, x), {}).get((g, tuple(inner_vals)))
                if lhs_entry is None or rhs_entry is None:
                    if partial:
                        continue
                    raise ValidationError(f"action undefined in associativity instance at {key}")
                if lhs_entry != rhs_entry:
                    raise ValidationError(
                        f"associativity fails at {key}, class {idx}, inputs {tvec}: "
                        f"{lhs_entry!r} != {rhs_entry!r}"
                    )


def make_algebra(op: Operad, family: Family, act: dict, partial: bool = False) -> Algebra:
    if set(family.sorts) != set(op.sorts):
        raise InputError("algebra carrier sorts do not match the operad")
    alg = Algebra(op, family, act)
    check_algebra_laws(alg, partial=partial)
    return alg


def free_algebra(op: Operad, t: Family) -> Algebra:
    """Free algebra on a family: evaluate the carrier, act through ``mu``."""
    ev = analytic_eval(op.carrier, t, max_arity=op.arity_bound)
    act: dict = {}
    for (w, x), cell in op.carrier.cells.items():
        if len(w) > op.arity_bound or cell.size == 0:
            continue
        table = {}
        for lab in cell.labels:
            for mvec in itertools.product(*(ev.value.sets[s] for s in w)):
                raws = [ev.reps[s][m] for s, m in zip(w, mvec)]
                blocks = tuple(r[0] for r in raws)
                fs = tuple(r[1] for r in raws)
                concat_tv = tuple(v for r in raws for v in r[2])
                concat = tuple(s for b in blocks for s in b)
                if len(concat) > op.arity_bound:
                    continue  # outside the window
                e, kappa = canonical_word(concat)
                raw2 = (w, lab, blocks, fs, kappa.images)
                mu_lab = op.mu.at(e, x, op.comp2.class_of(e, x, raw2))
                # kappa: e -> concat, so s[q] = concat_tv[kappa^{-1}(q)]
                kinv = kappa.inverse()
                s_tv = tuple(concat_tv[kinv(q)] for q in range(len(e)))
                table[(lab, mvec)] = ev.class_of(x, e, mu_lab, s_tv)
        act[(w, x)] = table
    alg = Algebra(op, ev.value, act)
    check_algebra_laws(alg, partial=True)
    return alg


def _cell_action_classes(op: Operad, cell_key, t: Family):
    """Orbits of (label, input tuple) pairs under the diagonal stabilizer action."""
    w, x = cell_key
    cell = op.carrier.cells[cell_key]
    pairs = [(lab, tvec) for lab in cell.labels for tvec in t.power(w)]
    edges = []
    for (lab, tvec) in pairs:
        for i in stab_gens(w):
            s = Perm.transposition(len(w), i)
            edges.append(((cell.gen_maps[i][lab], tvec), (lab, _family_transport(tvec, s))))
    return quotient(pairs, edges)


def enumerate_algebras(
    op: Operad,
    sizes,
    budget: int = DEFAULT_BUDGET,
    return_algebras: bool = False,
):
    """Exhaustively enumerate algebra structures on carriers of the given sizes.

    Equivariance is built in by assigning one value per orbit of
    (operation, input tuple) pairs; unit and associativity prune the search
    as soon as every cell they mention has been assigned.
    """
    if isinstance(sizes, int):
        sizes = {x: sizes for x in op.sorts}
    t = Family(op.sorts, {x: tuple(range(sizes.get(x, 0))) for x in op.sorts})
    keys = [k for k in op.support() if len(k[0]) <= op.arity_bound and op.carrier.cells[k].size]
    keys.sort(key=lambda k: (len(k[0]), skey(k)))
    orbit_data = {k: _cell_action_classes(op, k, t) for k in keys}
    total = 1
    for k in keys:
        total *= max(1, len(t.sets[k[1]])) ** len(orbit_data[k].classes)
        if total > budget:
            raise BudgetError(
                f"algebra enumeration needs ~{total} tables, budget is {budget}"
            )

    # associativity instances, scheduled by the last-assigned cell they touch
    key_index = {k: i for i, k in enumerate(keys)}
    instances = []
    for key, reps in op.comp2.reps.items():
        w, x = key
        if len(w) > op.arity_bound or key not in key_index:
            continue
        for idx, raw in enumerate(reps):
            mid, g, blocks, fs, sig = raw
            involved = [key, (mid, x)] + [(b, y) for b, y in zip(blocks, mid)]
            if any(k not in key_index for k in involved):
                continue
            stage = max(key_index[k] for k in involved)
            instances.append((stage, key, idx, raw))
    by_stage: dict = {}
    for stage, key, idx, raw in instances:
        by_stage.setdefault(stage, []).append((key, idx, raw))

    eta_of = {x: op.eta_label(x) for x in op.sorts}
    results = []

    def check_stage(stage, act):
        for key, idx, raw in by_stage.get(stage, ()):
            w, x = key
            mid, g, blocks, fs, sig = raw
            sigma = Perm(sig)
            offs = block_offsets([len(b) for b in blocks])
            target = op.mu.at(w, x, idx)
            for tvec in t.power(w):
                concat = tuple(tvec[sigma(p)] for p in range(len(w)))
                vals = []
                for i, b in enumerate(blocks):
                    vals.append(act[(b, mid[i])][(fs[i], concat[offs[i] : offs[i + 1]])])
                if act[(w, x)][(target, tvec)] != act[(mid, x)][(g, tuple(vals))]:
                    return False
        return True

    def assign(i, assignment, act):
        if i == len(keys):
            results.append({k: dict(v) for k, v in assignment.items()})
            return
        key = keys[i]
        w, x = key
        q = orbit_data[key]
        carrier_x = t.sets[x]
        n_classes = len(q.classes)
        forced: dict = {}
        if len(w) == 1 and w[0] == x:
            for ci in range(n_classes):
                lab, tvec = q.representative[ci]
                if lab == eta_of[x]:
                    forced[ci] = tvec[0]
        choice_space = [
            (forced[ci],) if ci in forced else carrier_x for ci in range(n_classes)
        ]
        for values in itertools.product(*choice_space):
            assignment[key] = dict(enumerate(values))
            table = {}
            for pair in q.elements:
                table[pair] = values[q.class_index[pair]]
            act[key] = table
            if check_stage(i, act):
                assign(i + 1, assignment, act)
        assignment.pop(key, None)
        act.pop(key, None)

    assign(0, {}, {})
    if return_algebras:
        return [Algebra(op, t, expand_assignment(op, orbit_data, keys, t, r)) for r in results]
    return len(results)


def expand_assignment(op, orbit_data, keys, t, assignment):
    act = {}
    for k in keys:
        q = orbit_data[k]
        act[k] = {pair: assignment[k][q.class_index[pair]] for pair in q.elements}
    return act


def enumerate_algebra_maps(src: Algebra, dst: Algebra, budget: int = DEFAULT_BUDGET):
    """All algebra maps ``src -> dst``: sorted functions commuting with the actions."""
    op = src.operad
    total = 1
    for x in op.sorts:
        total *= max(1, len(dst.family.sets[x])) ** len(src.family.sets[x])
        if total > budget:
            raise BudgetError("algebra map enumeration exceeded its budget")
    spaces = []
    for x in op.sorts:
        elems = src.family.sets[x]
        choices = [dst.family.sets[x]] * len(elems)
        spaces.append((x, elems, choices))
    found = 0
    keys = [k for k in op.support() if len(k[0]) <= op.arity_bound]

    def ok(fmap):
        for (w, x) in keys:
            table = src.act.get((w, x), {})
            dtable = dst.act.get((w, x), {})
            for (lab, tvec), val in table.items():
                mapped = tuple(fmap[s][v] for s, v in zip(w, tvec))
                if (lab, mapped) not in dtable:
                    return False
                if dtable[(lab, mapped)] != fmap[x][val]:
                    return False
        return True

    import itertools as _it

    per_sort = []
    for x, elems, choices in spaces:
        per_sort.append([dict(zip(elems, combo)) for combo in _it.product(*choices)])
    for combo in _it.product(*per_sort):
        fmap = {x: combo[i] for i, (x, _e, _c) in enumerate(spaces)}
        if ok(fmap):
            found += 1
    return found


def compose_morphisms(second: "OperadMorphism", first: "OperadMorphism") -> "OperadMorphism":
    """Composite operad morphism, with its monad-map square re-validated."""
    if second.src is not first.dst:
        raise InputError("morphisms are not composable")
    u = {x: second.u[first.u[x]] for x in first.src.sorts}
    xi_cells = {}
    for (w, x), cell in first.src.carrier.cells.items():
        cw_mid, _tau = canonical_word(_u_word(first.u, w))
        xi_cells[(w, x)] = {
            lab: second.xi.at(cw_mid, first.u[x], first.xi.at(w, x, lab))
            for lab in cell.labels
        }
    return operad_morphism(first.src, second.dst, u, xi_cells)


# ---------------------------------------------------------------------------
# operad morphisms and the pullback operad
# ---------------------------------------------------------------------------


def _u_word(u: dict, w: Word) -> Word:
    return tuple(u[s] for s in w)


def pullback_operad(op: Operad, u: dict, sorts_x: Iterable, arity_bound: int) -> Operad:
    """The operad on the source sorts whose cells are ``B[u(w); u(x)]``."""
    sorts_x = ssorted(sorts_x)
    by_target: dict = {}
    for x in sorts_x:
        by_target.setdefault(u[x], []).append(x)
    cells = {}
    for (v, y), bcell in op.carrier.cells.items():
        if len(v) > arity_bound or bcell.size == 0:
            continue
        pre_choices = []
        for s in v:
            pre_choices.append(by_target.get(s, []))
        if any(not c for c in pre_choices):
            continue
        for combo in itertools.product(*pre_choices):
            w, _t = canonical_word(tuple(combo))
            for x in by_target.get(y, []):
                key = (w, x)
                if key in cells:
                    continue
                cw_y, tau = canonical_word(_u_word(u, w))
                gen_maps = {}
                for i in stab_gens(w):
                    s_i = Perm.transposition(len(w), i)
                    h = compose(compose(tau, s_i), tau.inverse())
                    gen_maps[i] = {lab: bcell.act(lab, h) for lab in bcell.labels}
                bc = op.carrier.cells[(cw_y, y)]
                cells[key] = YoungSet(w, bc.labels, gen_maps)
    carrier = SymSeq(sorts_x, sorts_x, cells)

    def mu_fn(key, raw):
        w, x = key
        mid, b1, blocks, b2s, sig = raw
        mid_y, tau_mid = canonical_word(_u_word(u, mid))
        ublocks = [_u_word(u, b) for b in blocks]
        lengths = [len(b) for b in blocks]
        perm_blocks = [ublocks[tau_mid(p)] for p in range(len(blocks))]
        canons = [canonical_word(b) for b in perm_blocks]
        cw_y, tau_w = canonical_word(_u_word(u, w))
        rearr = block_perm(lengths, tau_mid)
        bd = block_diag([c[1].inverse() for c in canons])
        sig_y = compose(compose(compose(tau_w, Perm(sig)), rearr), bd)
        raw_y = (
            mid_y,
            b1,
            tuple(c[0] for c in canons),
            tuple(b2s[tau_mid(p)] for p in range(len(blocks))),
            sig_y.images,
        )
        cls = op.comp2.class_of(cw_y, u[x], raw_y)
        return op.mu.at(cw_y, u[x], cls)

    eta_labels = {x: op.eta_label(u[x]) for x in sorts_x}
    return make_operad(carrier, mu_fn, eta_labels, arity_bound)


@dataclass
class OperadMorphism:
    src: Operad
    dst: Operad
    u: dict            # sort map
    xi: SymSeqMap      # src.carrier -> pullback carrier
    pullback: Operad   # dst pulled back along u

    def validate(self) -> None:
        a, bp = self.src, self.pullback
        self.xi.validate()
        # multiplication square
        xibis = hcompose_maps(self.xi, self.xi, a.comp2, _pull_comp2(a, bp))
        lhs = compose_maps(self.xi, a.mu)
        rhs = compose_maps(bp.mu, xibis)
        if not map_equal(lhs, rhs):
            key, lab, va, vb = first_map_difference(lhs, rhs)
            raise ValidationError(f"morphism multiplication square fails at {key}, {lab!r}")
        # unit triangle
        lhs_u = compose_maps(self.xi, a.eta)
        if not map_equal(lhs_u, bp.eta):
            raise ValidationError("morphism unit triangle fails")


def _pull_comp2(a: Operad, bp: Operad) -> Composite:
    # composite of the pullback carrier with itself, on the window of `a`
    if bp.arity_bound >= a.arity_bound:
        return bp.comp2
    return compose_symseq(bp.carrier, bp.carrier, max_arity=a.arity_bound)


def operad_morphism(src: Operad, dst: Operad, u: dict, xi_cells: dict) -> OperadMorphism:
    """Assemble and validate an operad morphism given per-cell label maps."""
    pb = pullback_operad(dst, u, src.sorts, src.arity_bound)
    xi = SymSeqMap(src.carrier, pb.carrier, xi_cells)
    phi = OperadMorphism(src, dst, u, xi, pb)
    phi.validate()
    return phi


def identity_morphism(op: Operad) -> OperadMorphism:
    u = {x: x for x in op.sorts}
    pb = pullback_operad(op, u, op.sorts, op.arity_bound)
    xi_cells = {}
    for key, cell in op.carrier.cells.items():
        xi_cells[key] = {lab: lab for lab in cell.labels}
    xi = SymSeqMap(op.carrier, pb.carrier, xi_cells)
    phi = OperadMorphism(op, op, u, xi, pb)
    phi.validate()
    return phi


def restrict_algebra(phi: OperadMorphism, alg: Algebra) -> Algebra:
    """Pull a dst-algebra back to a src-algebra along the morphism."""
    a, b, u = phi.src, phi.dst, phi.u
    fam = Family(a.sorts, {x: alg.family.sets[u[x]] for x in a.sorts})
    act: dict = {}
    for (w, x), cell in a.carrier.cells.items():
        if len(w) > a.arity_bound or cell.size == 0:
            continue
        cw_y, tau = canonical_word(_u_word(u, w))
        table = {}
        tinv = tau.inverse()
        for lab in cell.labels:
            blab = phi.xi.at(w, x, lab)
            for tvec in fam.power(w):
                s_tv = tuple(tvec[tinv(q)] for q in range(len(w)))
                table[(lab, tvec)] = alg.act[(cw_y, u[x])][(blab, s_tv)]
        act[(w, x)] = table
    out = Algebra(a, fam, act)
    check_algebra_laws(out, partial=True)
    return out


# ---------------------------------------------------------------------------
# operad isomorphism certificates
# ---------------------------------------------------------------------------


def operad_iso(p: Operad, q: Operad, sort_map: Optional[dict] = None, budget: int = 100_000):
    """Search for an isomorphism of operads, returned as (sort map, cell maps)."""
    from .perms import enumerate_equivariant_maps

    if len(p.sorts) != len(q.sorts):
        return None
    candidates = [sort_map] if sort_map else [
        dict(zip(p.sorts, perm)) for perm in itertools.permutations(q.sorts)
    ]
    for u in candidates:
        try:
            pb = pullback_operad(q, u, p.sorts, p.arity_bound)
        except (ValidationError, KeyError, InputError):
            continue
        keys = [k for k, c in p.carrier.cells.items() if c.size]
        if set(keys) != set(k for k, c in pb.carrier.cells.items() if c.size):
            continue
        per_cell = []
        count = 1
        ok = True
        for k in keys:
            isos = [
                m
                for m in enumerate_equivariant_maps(p.carrier.cells[k], pb.carrier.cells[k])
                if len(set(m.values())) == len(m)
            ]
            if not isos:
                ok = False
                break
            per_cell.append(isos)
            count *= len(isos)
            if count > budget:
                raise BudgetError("operad isomorphism search exceeded its budget")
        if not ok:
            continue
        for combo in itertools.product(*per_cell):
            cells = dict(zip(keys, combo))
            cand = SymSeqMap(p.carrier, pb.carrier, cells)
            if not map_equal(compose_maps(cand, p.eta), pb.eta):
                continue
            xibis = hcompose_maps(cand, cand, p.comp2, _pull_comp2(p, pb))
            if map_equal(compose_maps(cand, p.mu), compose_maps(pb.mu, xibis)):
                return u, cand
    return None
