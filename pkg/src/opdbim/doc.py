"""The batch document format: named declarations with canonical serialization.

Documents are JSON with a fixed schema.  Labels are strings, integers or
tuples; tuples are encoded as ``{"t": [...]}`` so that parsing a serialized
value reproduces it exactly.  All emitted JSON is sorted and separator
normalized, which makes every command's output byte-reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .perms import InputError, Perm, ValidationError, YoungSet, skey, ssorted, stab_gens
from .symseq import Family, SymSeq, SymSeqMap, compose_symseq
from .operads import (
    Algebra,
    Operad,
    assoc_operad,
    com_operad,
    free_operad,
    magma_operad,
    make_algebra,
    make_operad,
    presented_operad,
    terminal_operad,
    unit_operad,
)
from .bimodules import Bimodule, make_bimodule, identity_bimodule

FORMAT_VERSION = "1"


def enc(value):
    """Encode a label-like value into JSON-safe data, reversibly."""
    if isinstance(value, tuple):
        return {"t": [enc(v) for v in value]}
    if isinstance(value, (str, int, bool)) or value is None:
        return value
    raise InputError(f"value {value!r} is not serializable")


def dec(value):
    if isinstance(value, dict):
        if set(value) != {"t"}:
            raise InputError(f"bad encoded value {value!r}")
        return tuple(dec(v) for v in value["t"])
    if isinstance(value, list):
        raise InputError("bare lists are not valid encoded values; use {'t': [...]}")
    return value


def enc_word(word):
    return [enc(s) for s in word]


def dec_word(data):
    return tuple(dec(s) for s in data)


def serialize_symseq(f: SymSeq) -> dict:
    cells = []
    for (w, y) in f.support():
        cell = f.cells[(w, y)]
        action = {}
        for i in stab_gens(w):
            action[str(i)] = sorted(
                ([enc(a), enc(b)] for a, b in cell.gen_maps[i].items()),
                key=lambda p: skey(dec(p[0])),
            )
        cells.append(
            {
                "word": enc_word(w),
                "out": enc(y),
                "labels": sorted((enc(l) for l in cell.labels), key=lambda e: skey(dec(e))),
                "action": action,
            }
        )
    return {
        "dom": enc_word(f.dom),
        "cod": enc_word(f.cod),
        "cells": cells,
    }


def parse_symseq(data: dict) -> SymSeq:
    dom = dec_word(data["dom"])
    cod = dec_word(data["cod"])
    cells = {}
    for c in data["cells"]:
        w = dec_word(c["word"])
        y = dec(c["out"])
        labels = tuple(dec(l) for l in c["labels"])
        gen_maps = {}
        action = c.get("action", {})
        for i in stab_gens(w):
            if str(i) in action:
                gen_maps[i] = {dec(a): dec(b) for a, b in action[str(i)]}
            else:
                gen_maps[i] = {l: l for l in labels}
        cells[(w, y)] = YoungSet(w, labels, gen_maps)
        cells[(w, y)].validate()
    return SymSeq(dom, cod, cells)


def enc_raw(raw) -> dict:
    mid, g, blocks, fs, sig = raw
    return {
        "mid": enc_word(mid),
        "outer": enc(g),
        "blocks": [enc_word(b) for b in blocks],
        "inner": [enc(f) for f in fs],
        "sigma": list(sig),
    }


def dec_raw(data) -> tuple:
    return (
        dec_word(data["mid"]),
        dec(data["outer"]),
        tuple(dec_word(b) for b in data["blocks"]),
        tuple(dec(f) for f in data["inner"]),
        tuple(data["sigma"]),
    )


def enc_term(term):
    if term[0] == "v":
        return {"var": term[1]}
    return {"op": term[1], "args": [enc_term(t) for t in term[2]]}


def dec_term(data):
    if "var" in data:
        return ("v", data["var"])
    return ("g", data["op"], tuple(dec_term(t) for t in data["args"]))


def serialize_operad(op: Operad) -> dict:
    mu_entries = []
    for key in sorted(op.comp2.reps, key=lambda k: (len(k[0]), skey(k))):
        w, x = key
        for idx, raw in enumerate(op.comp2.reps[key]):
            mu_entries.append(
                {
                    "word": enc_word(w),
                    "out": enc(x),
                    "rep": enc_raw(raw),
                    "to": enc(op.mu.at(w, x, idx)),
                }
            )
    eta = sorted(
        ([enc(x), enc(op.eta_label(x))] for x in op.sorts),
        key=lambda p: skey(dec(p[0])),
    )
    return {
        "carrier": serialize_symseq(op.carrier),
        "mu": mu_entries,
        "eta": eta,
        "arity_bound": op.arity_bound,
    }


def parse_explicit_operad(data: dict) -> Operad:
    carrier = parse_symseq(data["carrier"])
    n = data["arity_bound"]
    comp2 = compose_symseq(carrier, carrier, max_arity=n)
    table: dict = {}
    for entry in data["mu"]:
        w = dec_word(entry["word"])
        x = dec(entry["out"])
        raw = dec_raw(entry["rep"])
        cls = comp2.class_of(w, x, raw)
        table[(w, x, cls)] = dec(entry["to"])

    def mu_fn(key, raw):
        w, x = key
        cls = comp2.class_of(w, x, raw)
        if (w, x, cls) not in table:
            raise InputError(f"mu entry missing for class {cls} at {key}")
        return table[(w, x, cls)]

    eta_labels = {dec(a): dec(b) for a, b in data["eta"]}
    return make_operad(carrier, mu_fn, eta_labels, n)


@dataclass
class Document:
    windows: dict
    sorts: dict
    symseqs: dict
    operads: dict
    families: dict
    algebras: dict
    bimodules: dict


def parse_document(data: dict) -> Document:
    if data.get("version") != FORMAT_VERSION:
        raise InputError(f"unsupported document version {data.get('version')!r}")
    windows = dict(data.get("windows", {}))
    windows.setdefault("arity_bound", 3)
    windows.setdefault("length_bound", 2)
    windows.setdefault("budget", 2_000_000)
    if windows["arity_bound"] < 1 or windows["length_bound"] < 1:
        raise InputError("window parameters must be positive")
    sorts = {}
    for name, values in data.get("sorts", {}).items():
        sorts[name] = ssorted(dec(v) for v in values)
    symseqs = {}
    for name, sdata in data.get("symseqs", {}).items():
        if isinstance(sdata.get("dom"), str):
            sdata = dict(sdata)
            sdata["dom"] = [enc(s) for s in sorts[sdata["dom"]]]
        if isinstance(sdata.get("cod"), str):
            sdata = dict(sdata)
            sdata["cod"] = [enc(s) for s in sorts[sdata["cod"]]]
        symseqs[name] = parse_symseq(sdata)
    operads = {}
    for name, odata in data.get("operads", {}).items():
        operads[name] = _parse_operad(odata, sorts, symseqs, windows)
    families = {}
    for name, fdata in data.get("families", {}).items():
        sets = {_dec_key(k_): tuple(dec(v) for v in vs) for k_, vs in fdata.items()}
        families[name] = Family(tuple(sets), sets)
    algebras = {}
    for name, adata in data.get("algebras", {}).items():
        algebras[name] = _parse_algebra(adata, operads, families)
    bimodules = {}
    for name, bdata in data.get("bimodules", {}).items():
        bimodules[name] = _parse_bimodule(bdata, operads, symseqs)
    return Document(windows, sorts, symseqs, operads, families, algebras, bimodules)


def _dec_key(k: str):
    # family keys are JSON object keys; decode via json when they look encoded
    try:
        return dec(json.loads(k))
    except (json.JSONDecodeError, InputError):
        return k


def enc_key(sort) -> str:
    return json.dumps(enc(sort), sort_keys=True, separators=(",", ":"))


def _parse_operad(odata: dict, sorts: dict, symseqs: dict, windows: dict) -> Operad:
    n = odata.get("arity_bound", windows["arity_bound"])
    if "builtin" in odata:
        name = odata["builtin"]
        if name == "unit":
            key = odata.get("sorts", ("*",))
            ss = sorts[key] if isinstance(key, str) else tuple(dec(s) for s in key)
            return unit_operad(ss, n)
        if name == "com":
            return com_operad(n)
        if name == "assoc":
            return assoc_operad(n)
        if name == "magma":
            return magma_operad(n)
        if name == "terminal":
            return terminal_operad()
        raise InputError(f"unknown builtin operad {name!r}")
    if "free" in odata:
        body = odata["free"]
        ss = tuple(dec(s) for s in body["sorts"])
        signature = {}
        for g in body["generators"]:
            key = (dec_word(g["word"]), dec(g["out"]))
            signature.setdefault(key, ())
            signature[key] = signature[key] + tuple(g["names"])
        return free_operad(ss, signature, n)
    if "presented" in odata:
        body = odata["presented"]
        ss = tuple(dec(s) for s in body["sorts"])
        signature = {}
        for g in body["generators"]:
            key = (dec_word(g["word"]), dec(g["out"]))
            signature.setdefault(key, ())
            signature[key] = signature[key] + tuple(g["names"])
        relations = [
            (dec_term(r["left"]), dec_term(r["right"])) for r in body["relations"]
        ]
        return presented_operad(ss, signature, relations, n)
    if "carrier" in odata:
        data = dict(odata)
        if isinstance(data["carrier"], str):
            data = dict(data)
            data["carrier"] = serialize_symseq(symseqs[data["carrier"]])
        data.setdefault("arity_bound", n)
        return parse_explicit_operad(data)
    raise InputError("operad declaration needs builtin/free/presented/carrier")


def _parse_algebra(adata: dict, operads: dict, families: dict) -> Algebra:
    op = operads[adata["operad"]]
    fam = families[adata["family"]]
    act: dict = {}
    for entry in adata.get("action", []):
        w = dec_word(entry["word"])
        x = dec(entry["out"])
        lab = dec(entry["label"])
        args = tuple(dec(v) for v in entry["args"])
        act.setdefault((w, x), {})[(lab, args)] = dec(entry["to"])
    return make_algebra(op, fam, act)


def _parse_bimodule(bdata: dict, operads: dict, symseqs: dict) -> Bimodule:
    left = operads[bdata["left"]]
    right = operads[bdata["right"]]
    carrier = symseqs[bdata["carrier"]]
    window = bdata.get("window", min(left.arity_bound, right.arity_bound))

    def action_fn(entries):
        if entries == "induced":
            return None
        table = {}
        for entry in entries:
            w = dec_word(entry["word"])
            x = dec(entry["out"])
            raw = dec_raw(entry["rep"])
            table[(w, x, raw)] = dec(entry["to"])
        return table

    lam_table = action_fn(bdata["lambda"])
    rho_table = action_fn(bdata["rho"])
    from .symseq import left_unitor, right_unitor

    bm = compose_symseq(left.carrier, carrier, max_arity=window)
    ma = compose_symseq(carrier, right.carrier, max_arity=window)
    if lam_table is None:
        if not left.is_unit_operad():
            raise InputError("induced left action requires a unit operad")
        lam = left_unitor(bm)
    else:
        lam = SymSeqMap(
            bm.seq,
            carrier,
            {
                key: {
                    idx: lam_table[(key[0], key[1], raw)]
                    for idx, raw in enumerate(reps)
                }
                for key, reps in bm.reps.items()
            },
        )
    if rho_table is None:
        if not right.is_unit_operad():
            raise InputError("induced right action requires a unit operad")
        rho = right_unitor(ma)
    else:
        rho = SymSeqMap(
            ma.seq,
            carrier,
            {
                key: {
                    idx: rho_table[(key[0], key[1], raw)]
                    for idx, raw in enumerate(reps)
                }
                for key, reps in ma.reps.items()
            },
        )
    from .bimodules import bimodule_from_maps

    return bimodule_from_maps(left, right, carrier, lam, rho, window, bm, ma)


def serialize_bimodule(b: Bimodule) -> dict:
    lam_entries = []
    for key in sorted(b.bm.reps, key=lambda k: (len(k[0]), skey(k))):
        for idx, raw in enumerate(b.bm.reps[key]):
            lam_entries.append(
                {
                    "word": enc_word(key[0]),
                    "out": enc(key[1]),
                    "rep": enc_raw(raw),
                    "to": enc(b.lam.at(*key, idx)),
                }
            )
    rho_entries = []
    for key in sorted(b.ma.reps, key=lambda k: (len(k[0]), skey(k))):
        for idx, raw in enumerate(b.ma.reps[key]):
            rho_entries.append(
                {
                    "word": enc_word(key[0]),
                    "out": enc(key[1]),
                    "rep": enc_raw(raw),
                    "to": enc(b.rho.at(*key, idx)),
                }
            )
    return {
        "carrier": serialize_symseq(b.carrier),
        "lambda": lam_entries,
        "rho": rho_entries,
        "window": b.window,
    }


def dumps(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":")) + "\n"
