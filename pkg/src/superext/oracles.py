"""Slow, independent reference computations.

None of these share code with the fast paths they are used to check; they
work on explicit Python sets of bitmasks.
"""
from __future__ import annotations

import itertools

from .groups import FiniteGroup


def members_of(minimal, n):
    """Explicit up-closure of a collection of masks."""
    return {s for s in range(1 << n) if any(m & s == m for m in minimal)}


def count_mls_by_pairs(n: int) -> int:
    """Count maximal linked systems by choosing one side of each complementary pair.

    Pairs are taken in natural order of the side avoiding the last point; a
    choice is kept only if it meets every set chosen so far.
    """
    if n == 0:
        return 0
    full = (1 << n) - 1
    pairs = [(s, full ^ s) for s in range(1 << (n - 1))]
    chosen: list[int] = []

    def rec(i):
        if i == len(pairs):
            return 1
        total = 0
        for side in pairs[i]:
            if side and all(side & c for c in chosen):
                chosen.append(side)
                total += rec(i + 1)
                chosen.pop()
        return total

    return rec(0)


def mls_by_pairs(n: int) -> list[frozenset[int]]:
    """The same search, returning each system as a frozenset of member masks."""
    full = (1 << n) - 1
    pairs = [(s, full ^ s) for s in range(1 << (n - 1))]
    out = []
    chosen: list[int] = []

    def rec(i):
        if i == len(pairs):
            out.append(frozenset(chosen))
            return
        for side in pairs[i]:
            if side and all(side & c for c in chosen):
                chosen.append(side)
                rec(i + 1)
                chosen.pop()

    rec(0)
    return out


def transversal_by_scan(members: set[int], n: int) -> set[int]:
    return {a for a in range(1 << n) if all(a & f for f in members)}


def product_by_unions(a: set[int], b: set[int], group: FiniteGroup) -> set[int]:
    """A*B as the up-closure of the sets  U_{x in U} x*V_x  (U in A, V_x in B).

    Exponential; for ground sets of size <= 3.
    """
    n = group.order
    b_list = sorted(b)
    gen = set()
    for u in a:
        xs = [x for x in range(n) if u >> x & 1]
        for vs in itertools.product(b_list, repeat=len(xs)):
            s = 0
            for x, v in zip(xs, vs):
                s |= group.left_translate_mask(x, v)
            gen.add(s)
    return members_of(gen, n)


def is_left_ideal(members: set, table, universe) -> bool:
    return all(table[s][m] in members for s in universe for m in members)
