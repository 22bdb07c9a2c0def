#!/usr/bin/env python3
"""Build the exponential operad of two unit operads and count its algebras.

The computed operad's algebras on carriers (1, 1, 2) match the number of
bimodules with matching cell sizes, and both equal the number of actions of
the two-element symmetric group on a two-element set.
"""

import time

from opdbim.operads import enumerate_algebras, unit_operad
from opdbim.bimodules import enumerate_bimodules
from opdbim.catsym import exponential_operad


def main():
    t0 = time.time()
    a = unit_operad(("x",), 2)
    b = unit_operad(("y",), 2)
    exp = exponential_operad(a, b, length_bound=2, arity_bound=2)
    print("sorts of B^A (word over sorts of A, sort of B):")
    for s in exp.sorts:
        print("  ", s)
    print("cells:")
    for key in exp.support():
        print("  ", key, "size", exp.carrier.cells[key].size)
    sizes = {s: {0: 1, 1: 1, 2: 2}[len(s[0])] for s in exp.sorts}
    count = enumerate_algebras(exp, sizes)
    cells = {((), "y"): 1, (("x",), "y"): 1, (("x", "x"), "y"): 2}
    bims = enumerate_bimodules(a, b, cells)
    print(f"algebras of B^A on carriers (1,1,2): {count}")
    print(f"(B,A)-bimodules with matching cells: {bims}")
    print(f"elapsed {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()
