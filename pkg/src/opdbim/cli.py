"""Batch front end: law checks, composition, evaluation, series and counting.

Exit statuses: 0 success, 1 law failure, 2 input error, 3 budget exceeded.
Output is UTF-8 text or the canonical document format; identical inputs give
byte-identical output.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .perms import BudgetError, InputError, ValidationError, skey, ssorted
from .symseq import Family, analytic_eval, compose_symseq, series
from .operads import enumerate_algebras
from .bimodules import enumerate_bimodules, enumerate_bimodule_maps, check_bimodule_laws
from .catsym import exponential_operad, product_operad
from . import doc as docmod

OK, LAW_FAIL, INPUT_ERR, BUDGET_ERR = 0, 1, 2, 3


def load_document(path: str) -> docmod.Document:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    return docmod.parse_document(data)


def cmd_check(args) -> int:
    """Validate each declaration in dependency order, one report line per name."""
    with open(args.file, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if data.get("version") != docmod.FORMAT_VERSION:
        print(f"parse error: unsupported version {data.get('version')!r}")
        return INPUT_ERR
    failures = 0
    lines = []
    windows = dict(data.get("windows", {}))
    windows.setdefault("arity_bound", 3)
    windows.setdefault("length_bound", 2)
    windows.setdefault("budget", 2_000_000)
    sorts, symseqs, operads, families, algebras = {}, {}, {}, {}, {}
    try:
        for name, values in data.get("sorts", {}).items():
            sorts[name] = ssorted(docmod.dec(v) for v in values)
    except InputError as e:
        print(f"parse error in sorts: {e}")
        return INPUT_ERR

    def run(section, kind, builder, store):
        nonlocal failures
        for name in sorted(data.get(section, {})):
            try:
                store[name] = builder(name, data[section][name])
                lines.append(f"{kind} {name}: ok")
            except ValidationError as e:
                lines.append(f"{kind} {name}: FAIL {e}")
                failures += 1
            except (InputError, KeyError) as e:
                lines.append(f"{kind} {name}: parse error {e}")
                failures += 1
                raise SystemExit(INPUT_ERR)

    def build_symseq(name, sdata):
        sdata = dict(sdata)
        if isinstance(sdata.get("dom"), str):
            sdata["dom"] = [docmod.enc(s) for s in sorts[sdata["dom"]]]
        if isinstance(sdata.get("cod"), str):
            sdata["cod"] = [docmod.enc(s) for s in sorts[sdata["cod"]]]
        return docmod.parse_symseq(sdata)

    def build_family(name, fdata):
        sets = {docmod._dec_key(k): tuple(docmod.dec(v) for v in vs) for k, vs in fdata.items()}
        return Family(tuple(sets), sets)

    try:
        run("symseqs", "symseq", build_symseq, symseqs)
        run("operads", "operad", lambda n, d: docmod._parse_operad(d, sorts, symseqs, windows), operads)
        run("families", "family", build_family, families)
        run("algebras", "algebra", lambda n, d: docmod._parse_algebra(d, operads, families), algebras)
        run("bimodules", "bimodule", lambda n, d: docmod._parse_bimodule(d, operads, symseqs), {})
    except SystemExit:
        for line in lines:
            print(line)
        return INPUT_ERR
    for line in lines:
        print(line)
    return LAW_FAIL if failures else OK


def cmd_compose(args) -> int:
    document = load_document(args.file)
    try:
        g = document.symseqs[args.outer]
        f = document.symseqs[args.inner]
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    cap = args.arity_bound
    comp = compose_symseq(g, f, max_arity=cap)
    out = docmod.dumps(
        {
            "version": docmod.FORMAT_VERSION,
            "symseqs": {f"{args.outer}o{args.inner}": docmod.serialize_symseq(comp.seq)},
        }
    )
    _emit(out, args.out)
    return OK


def cmd_eval(args) -> int:
    document = load_document(args.file)
    try:
        f = document.symseqs[args.seq]
        t = document.families[args.family]
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    ev = analytic_eval(f, t, max_arity=args.arity_bound)
    rows = []
    for y in ssorted(f.cod):
        reps = [
            {
                "word": docmod.enc_word(w),
                "label": docmod.enc(lab),
                "args": [docmod.enc(v) for v in tvec],
            }
            for (w, lab, tvec) in ev.reps[y]
        ]
        rows.append({"sort": docmod.enc(y), "size": len(ev.value.sets[y]), "classes": reps})
    _emit(docmod.dumps({"carrier": rows}), args.out)
    return OK


def cmd_series(args) -> int:
    document = load_document(args.file)
    try:
        f = document.symseqs[args.seq]
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    try:
        rows = series(f, args.bound)
    except InputError as e:
        print(f"input error: {e}")
        return INPUT_ERR
    lines = ["n\tsize\torbits\tegf"]
    for (n, size, orbits, coeff) in rows:
        lines.append(f"{n}\t{size}\t{orbits}\t{coeff}")
    _emit("\n".join(lines) + "\n", args.out)
    return OK


def _parse_sizes(arg: str):
    if "=" not in arg:
        return int(arg)
    sizes = {}
    for part in arg.split(","):
        key, value = part.split("=")
        sizes[docmod.dec(json.loads(key)) if key.startswith(("[", "{", '"')) else key] = int(value)
    return sizes


def cmd_count(args) -> int:
    document = load_document(args.file)
    budget = args.budget or document.windows["budget"]
    try:
        if args.kind == "algebras":
            op = document.operads[args.names[0]]
            sizes = _parse_sizes(args.names[1])
            if isinstance(sizes, dict):
                sizes = {s: sizes.get(_plain_sort_name(s), sizes.get(s, 0)) for s in op.sorts}
            n = enumerate_algebras(op, sizes, budget=budget)
            _emit(f"algebras\t{n}\n", args.out)
        elif args.kind == "bimodules":
            a = document.operads[args.names[0]]
            b = document.operads[args.names[1]]
            cells = {}
            for entry in json.loads(args.cells):
                cells[(docmod.dec_word(entry["word"]), docmod.dec(entry["out"]))] = entry["size"]
            n = enumerate_bimodules(a, b, cells, budget=budget)
            _emit(f"bimodules\t{n}\n", args.out)
        elif args.kind == "module-maps":
            m = document.bimodules[args.names[0]]
            n = document.bimodules[args.names[1]]
            count = enumerate_bimodule_maps(m, n, budget=budget)
            _emit(f"module-maps\t{count}\n", args.out)
        else:
            print(f"unknown count kind {args.kind!r}")
            return INPUT_ERR
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    except BudgetError as e:
        print(f"budget exceeded: {e}")
        return BUDGET_ERR
    return OK


def _plain_sort_name(sort):
    return sort if isinstance(sort, str) else None


def cmd_product(args) -> int:
    document = load_document(args.file)
    try:
        a = document.operads[args.a]
        b = document.operads[args.b]
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    prod = product_operad(a, b)
    out = docmod.dumps(
        {
            "version": docmod.FORMAT_VERSION,
            "operads": {f"{args.a}x{args.b}": docmod.serialize_operad(prod)},
        }
    )
    _emit(out, args.out)
    return OK


def cmd_exponential(args) -> int:
    document = load_document(args.file)
    try:
        a = document.operads[args.a]
        b = document.operads[args.b]
    except KeyError as e:
        print(f"name resolution error: {e}")
        return INPUT_ERR
    length_bound = args.length_bound or document.windows["length_bound"]
    arity_bound = args.arity_bound or document.windows["arity_bound"]
    try:
        exp = exponential_operad(a, b, length_bound, arity_bound)
    except InputError as e:
        print(f"input error: {e}")
        return INPUT_ERR
    out = docmod.dumps(
        {
            "version": docmod.FORMAT_VERSION,
            "operads": {f"{args.b}^{args.a}": docmod.serialize_operad(exp)},
        }
    )
    _emit(out, args.out)
    return OK


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opdbim",
        description="exact operad and operad-bimodule computations over finite sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate every declaration in a document")
    p.add_argument("file")
    p.set_defaults(fn=cmd_check)

    p = sub.add_parser("compose", help="compose two named symmetric sequences")
    p.add_argument("file")
    p.add_argument("outer")
    p.add_argument("inner")
    p.add_argument("--arity-bound", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_compose)

    p = sub.add_parser("eval", help="evaluate a sequence on a named family")
    p.add_argument("file")
    p.add_argument("seq")
    p.add_argument("family")
    p.add_argument("--arity-bound", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("series", help="cardinality/orbit/EGF table of a single-sorted sequence")
    p.add_argument("file")
    p.add_argument("seq")
    p.add_argument("bound", type=int)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_series)

    p = sub.add_parser("count", help="count algebras, bimodules or module maps")
    p.add_argument("file")
    p.add_argument("kind", choices=["algebras", "bimodules", "module-maps"])
    p.add_argument("names", nargs="+")
    p.add_argument("--cells", default="[]")
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_count)

    p = sub.add_parser("product", help="product of two named operads")
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_product)

    p = sub.add_parser("exponential", help="exponential operad of two named operads")
    p.add_argument("file")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--length-bound", type=int, default=None)
    p.add_argument("--arity-bound", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_exponential)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (json.JSONDecodeError, FileNotFoundError, InputError, KeyError) as e:
        print(f"input error: {e}")
        return INPUT_ERR
    except ValidationError as e:
        print(f"law failure: {e}")
        return LAW_FAIL
    except BudgetError as e:
        print(f"budget exceeded: {e}")
        return BUDGET_ERR


if __name__ == "__main__":
    sys.exit(main())
