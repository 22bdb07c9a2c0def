#!/usr/bin/env python3
"""Print cardinality/orbit/EGF tables for the builtin operads and a composite."""

from opdbim.perms import YoungSet
from opdbim.symseq import SymSeq, compose_symseq, series
from opdbim.operads import assoc_operad, com_operad, magma_operad

BOUND = 4


def show(name, seq, bound=BOUND):
    print(f"\n{name}")
    print("n\tsize\torbits\tegf")
    for n, size, orbits, coeff in series(seq, bound):
        print(f"{n}\t{size}\t{orbits}\t{coeff}")


def main():
    show("com(4)", com_operad(4).carrier)
    show("assoc(4)", assoc_operad(4).carrier)
    show("magma(4)", magma_operad(4).carrier)

    star = "*"
    cells = {
        ((star,), star): YoungSet.trivial((star,), ("a",)),
        ((star, star), star): YoungSet.trivial((star, star), ("b",)),
    }
    f = SymSeq((star,), (star,), cells)
    ff = compose_symseq(f, f)
    show("F o F for F with one unary and one binary operation", ff.seq)

    com = com_operad(3)
    cc = compose_symseq(com.carrier, com.carrier, max_arity=4)
    show("Com(3) o Com(3), arity capped at 4 (row 3 counts set partitions)", cc.seq)


if __name__ == "__main__":
    main()
