#!/usr/bin/env python3
"""Restriction/extension along a sort collapse, with matching hom counts."""

from opdbim.perms import YoungSet
from opdbim.symseq import SymSeq
from opdbim.operads import com_operad, operad_morphism, unit_operad
from opdbim.bimodules import (
    enumerate_bimodule_maps,
    extension,
    free_left_module,
    restriction,
)


def main():
    a = unit_operad(("a", "b"), 2)
    b = com_operad(2)
    u = {"a": "*", "b": "*"}
    xi = {key: {lab: 0 for lab in cell.labels} for key, cell in a.carrier.cells.items()}
    phi = operad_morphism(a, b, u, xi)
    k = ("k",)
    vm = SymSeq(k, ("a", "b"), {(("k",), "a"): YoungSet.trivial(("k",), ("m0", "m1"))})
    vn = SymSeq(k, ("*",), {(("k",), "*"): YoungSet.trivial(("k",), ("n0",))})
    m = free_left_module(a, k, vm, window=2)
    n = free_left_module(b, k, vn, window=2)
    um = extension(phi, m)
    rn = restriction(phi, n)
    print("module carriers:")
    for key, cell in sorted(um.bimodule.carrier.cells.items()):
        print("   u_! M", key, cell.size)
    for key, cell in sorted(rn.carrier.cells.items()):
        print("   u* N ", key, cell.size)
    lhs = enumerate_bimodule_maps(um.bimodule, n)
    rhs = enumerate_bimodule_maps(m, rn)
    print(f"|Hom(u_! M, N)| = {lhs}")
    print(f"|Hom(M, u* N)| = {rhs}")


if __name__ == "__main__":
    main()
