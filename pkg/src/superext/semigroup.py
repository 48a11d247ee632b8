"""The extended operation on inclusion hyperspaces, and ideals of lambda(G).

    A * B = {S : {x : x^{-1}S in B} in A}

For fixed B write phi_B(S) = {x : x^{-1}S in B}; then S is in A*B iff
phi_B(S) is in A.  phi_B is one sweep over the 2**n subsets, so a product is
a gather of A's dense form through phi_B.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .enumeration import (
    EXHAUSTIVE_LIMIT,
    _UpCache,
    complete_one,
    completions,
    enumerate_mls,
    enumerate_maximal_invariant_linked,
    invariant_hyperspaces,
    is_maximal_invariant_linked,
    upset_mls,
)
from .errors import CapacityError, SpecError
from .groups import FiniteGroup, elements_of
from .hyperspace import (
    GroundSizeError,
    InclusionHyperspace,
    MaximalLinkedSystem,
    array_to_dense,
    dense_to_array,
    is_invariant,
    is_maximal_linked,
    render,
    sort_key,
    transversal_bits,
    up_closure,
)

TABLE_LIMIT = 6


def _check_ground(f: InclusionHyperspace, group: FiniteGroup):
    if f.n != group.order:
        raise GroundSizeError(f"family over {f.n} points, group of order {group.order}")


@lru_cache(maxsize=8192)
def phi(b: InclusionHyperspace, group: FiniteGroup) -> np.ndarray:
    """``phi[S]`` = bitmask of {x : x^{-1}S in B}, for every subset S."""
    _check_ground(b, group)
    arr = b.as_array()
    inv = group.inverse_translation_table
    out = np.zeros(1 << group.order, dtype=np.int64)
    for x in group.elements:
        out |= arr[inv[x]].astype(np.int64) << x
    out.setflags(write=False)
    return out


def product(a: InclusionHyperspace, b: InclusionHyperspace, group: FiniteGroup) -> InclusionHyperspace:
    _check_ground(a, group)
    _check_ground(b, group)
    bits = array_to_dense(a.as_array()[phi(b, group)])
    if isinstance(a, MaximalLinkedSystem) and isinstance(b, MaximalLinkedSystem):
        out = MaximalLinkedSystem.from_bits(group.order, bits, check=False)
        assert is_maximal_linked(out), "product of maximal linked systems is not maximal linked"
        return out
    return InclusionHyperspace.from_bits(group.order, bits, check=False)


def _pack_rows(rows: np.ndarray) -> np.ndarray:
    """Dense bool rows of width <= 64 -> uint64 keys (bit S = column S)."""
    packed = np.packbits(rows, axis=1, bitorder="little")
    if packed.shape[1] < 8:
        packed = np.pad(packed, ((0, 0), (0, 8 - packed.shape[1])))
    packed = np.ascontiguousarray(packed)
    return packed.view("<u8")[:, 0]


class Superextension:
    """lambda(G) as an indexed finite semigroup (orders up to 6 for tables).

    ``elements`` is in canonical order; index i everywhere refers to it.
    """

    def __init__(self, group: FiniteGroup, elements: Sequence[MaximalLinkedSystem] | None = None,
                 jobs: int | None = None):
        n = group.order
        if n > EXHAUSTIVE_LIMIT:
            raise CapacityError(f"lambda(G) is only enumerable up to order {EXHAUSTIVE_LIMIT}",
                                limit=EXHAUSTIVE_LIMIT, requested=n)
        self.group = group
        self.elements = list(elements) if elements is not None else enumerate_mls(group, jobs=jobs)
        self.index = {f.bits: i for i, f in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def index_of(self, f: InclusionHyperspace) -> int:
        return self.index[f.bits]

    @cached_property
    def dense(self) -> np.ndarray:
        n = self.group.order
        out = np.zeros((len(self.elements), 1 << n), dtype=bool)
        for i, f in enumerate(self.elements):
            out[i] = dense_to_array(f.bits, n)
        out.setflags(write=False)
        return out

    @cached_property
    def phis(self) -> np.ndarray:
        """``phis[b, S]`` = phi_{B_b}(S), vectorised over all elements."""
        g = self.group
        inv = g.inverse_translation_table
        out = np.zeros((len(self.elements), 1 << g.order), dtype=np.int64)
        for x in g.elements:
            out |= self.dense[:, inv[x]].astype(np.int64) << x
        return out

    @cached_property
    def _keys(self):
        if self.group.order > TABLE_LIMIT:
            raise CapacityError(f"product tables are limited to order {TABLE_LIMIT}",
                                limit=TABLE_LIMIT, requested=self.group.order)
        keys = _pack_rows(self.dense)
        order = np.argsort(keys, kind="stable")
        return keys[order], order

    def lookup(self, rows: np.ndarray) -> np.ndarray:
        """Indices of the elements with the given dense rows (all must be in lambda(G))."""
        sk, order = self._keys
        q = _pack_rows(rows)
        pos = np.searchsorted(sk, q)
        pos = np.minimum(pos, len(sk) - 1)
        if not np.array_equal(sk[pos], q):
            raise AssertionError("a product left lambda(G)")
        return order[pos]

    def multiply(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise products of index arrays ``a`` and ``b``."""
        a = np.asarray(a)
        b = np.asarray(b)
        rows = np.take_along_axis(self.dense[a], self.phis[b], axis=1)
        return self.lookup(rows)

    @cached_property
    def table(self) -> np.ndarray:
        """``table[a, b]`` = index of elements[a] * elements[b]."""
        m = len(self.elements)
        out = np.empty((m, m), dtype=np.int32)
        for b in range(m):
            out[:, b] = self.lookup(self.dense[:, self.phis[b]])
        out.setflags(write=False)
        return out

    def column(self, b: int) -> np.ndarray:
        """All products L * B_b for L in lambda(G), without building the table."""
        if self.group.order <= TABLE_LIMIT:
            return self.table[:, b]
        raise CapacityError("columns need a product table", limit=TABLE_LIMIT,
                            requested=self.group.order)


@lru_cache(maxsize=16)
def superextension(group: FiniteGroup) -> Superextension:
    return Superextension(group)


@dataclass(frozen=True)
class LeftIdeal:
    group: FiniteGroup
    members: tuple[MaximalLinkedSystem, ...]
    seeded: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(sorted(set(self.members), key=lambda f: f.key)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, f):
        return f in set(self.members)

    @property
    def key(self):
        return (len(self.members), tuple(f.key for f in self.members))

    def to_json(self) -> dict:
        return {"size": len(self.members), "members": [render(f) for f in self.members],
                "seeded": self.seeded}


def _as_mls(b: InclusionHyperspace) -> MaximalLinkedSystem:
    if isinstance(b, MaximalLinkedSystem):
        return b
    return MaximalLinkedSystem.of(b)


def trace_products(b: InclusionHyperspace, group: FiniteGroup, *, limit: int | None = None,
                   timeout: float | None = None) -> list[int]:
    """Dense forms of {L * B : L in lambda(G)} without enumerating lambda(G).

    L * B depends on L only through which sets of R = {phi_B(S)} it
    contains.  The admissible restrictions are exactly the assignments on R
    whose chosen sets and rejected complements form a linked family.
    """
    _check_ground(b, group)
    n = group.order
    ph = phi(b, group)
    values = sorted({int(v) for v in np.unique(ph)}, key=sort_key)
    deadline = None if timeout is None else time.monotonic() + timeout
    start = up_closure(1 << ((1 << n) - 1), n)
    out = []
    for u in completions(n, start, values, limit=limit, deadline=deadline, up=_UpCache(n)):
        out.append(array_to_dense(dense_to_array(u, n)[ph]))
    return out


def principal_left_ideal(b: InclusionHyperspace, group: FiniteGroup, strategy: str = "trace", *,
                         limit: int | None = None, timeout: float | None = None) -> LeftIdeal:
    """lambda(G) * B, computed by brute force over lambda(G) or by tracing phi_B."""
    b = _as_mls(b)
    n = group.order
    if strategy == "brute":
        sx = superextension(group)
        col = sx.column(sx.index_of(b))
        members = [sx.elements[i] for i in np.unique(col)]
        return LeftIdeal(group, tuple(members))
    if strategy == "trace":
        dense = trace_products(b, group, limit=limit, timeout=timeout)
        if len(set(dense)) != len(dense):
            raise AssertionError("distinct traces gave equal products")
        return LeftIdeal(group, tuple(MaximalLinkedSystem.from_bits(n, d, check=False) for d in dense))
    raise ValueError(f"unknown strategy {strategy!r}")


# -- minimal left ideals ----------------------------------------------------


def _brute_ideal_sets(sx: Superextension) -> list[frozenset[int]]:
    t = sx.table
    return [frozenset(np.unique(t[:, b]).tolist()) for b in range(len(sx))]


def minimal_left_ideal_indices(sx: Superextension) -> list[frozenset[int]]:
    ideals = _brute_ideal_sets(sx)
    found = set()
    for b, ib in enumerate(ideals):
        if all(len(ideals[c]) == len(ib) for c in ib):
            found.add(ib)
    return sorted(found, key=lambda s: (len(s), sorted(sx.elements[i].key for i in s)))


def seed_systems(group: FiniteGroup) -> list[MaximalLinkedSystem]:
    """One maximal linked system above each maximal invariant linked system."""
    return [complete_one(l0) for l0 in enumerate_maximal_invariant_linked(group)]


def descend_to_minimal(seed: MaximalLinkedSystem, group: FiniteGroup, *, timeout: float | None = None
                       ) -> LeftIdeal:
    """Shrink lambda(G) * seed to a minimal left ideal using traced products only.

    Minimal once every member generates the same principal left ideal.
    """
    deadline = None if timeout is None else time.monotonic() + timeout
    cache: dict[int, LeftIdeal] = {}

    def ideal(f):
        if f.bits not in cache:
            left = None if deadline is None else max(0.0, deadline - time.monotonic())
            cache[f.bits] = principal_left_ideal(f, group, "trace", timeout=left)
        return cache[f.bits]

    current = ideal(seed)
    while True:
        smaller = None
        for f in current.members:
            sub = ideal(f)
            if len(sub) < len(current):
                smaller = sub
                break
        if smaller is None:
            return LeftIdeal(group, current.members, seeded=True)
        current = smaller


def minimal_left_ideals(group: FiniteGroup, strategy: str = "auto", *, seeds=None,
                        timeout: float | None = None) -> list[LeftIdeal]:
    """Minimal left ideals of lambda(G), sorted by (size, members).

    ``brute`` (orders <= 6) finds all of them from the product table.
    ``seeded`` descends from ``seeds`` (default: completions of maximal
    invariant linked systems) with traced products; results are flagged
    ``seeded`` and cover only the ideals reached, except that a singleton
    {z} implies every minimal left ideal is a singleton {z'} with z' a right
    zero, and those are listed in full.
    """
    if strategy == "auto":
        strategy = "brute" if group.order <= TABLE_LIMIT else "seeded"
    if strategy == "brute":
        sx = superextension(group)
        return [LeftIdeal(group, tuple(sx.elements[i] for i in s)) for s in minimal_left_ideal_indices(sx)]
    if strategy != "seeded":
        raise ValueError(f"unknown strategy {strategy!r}")
    seeds = seed_systems(group) if seeds is None else list(seeds)
    found = {descend_to_minimal(s, group, timeout=timeout) for s in seeds}
    if any(len(i) == 1 for i in found):
        # z*s is a right zero whenever z is: x*(z*s) = (x*z)*s = z*s
        found = {LeftIdeal(group, (z,), seeded=True) for z in right_zeros(group)}
    return sorted(found, key=lambda i: i.key)


def minimal_ideal(sx: Superextension) -> frozenset[int]:
    """K(lambda(G)) by shrinking principal two-sided ideals (independent of left ideals)."""
    t = sx.table
    m = len(sx)

    def two_sided(a: int) -> frozenset[int]:
        left = set(np.unique(t[:, a]).tolist()) | {a}
        both = set(left)
        for v in left:
            both.update(np.unique(t[v, :]).tolist())
        return frozenset(both)

    current = two_sided(0)
    changed = True
    while changed:
        changed = False
        for a in sorted(current):
            j = two_sided(a)
            if len(j) < len(current):
                current, changed = j, True
                break
    assert len(current) <= m
    return current


def right_zeros(group: FiniteGroup) -> list[MaximalLinkedSystem]:
    """Right zeros z (x*z = z for all x) of lambda(G), canonical order.

    Orders <= 6 use the product table.  Above that, a right zero is fixed by
    left multiplication with the principal ultrafilters, hence invariant; the
    invariant candidates come from the orbit search and each is confirmed by
    a traced principal left ideal equal to {z}.
    """
    n = group.order
    if n <= TABLE_LIMIT:
        sx = superextension(group)
        t = sx.table
        return [sx.elements[z] for z in range(len(sx)) if np.all(t[:, z] == z)]
    if n > 12:
        raise CapacityError("right zeros are limited to order 12", limit=12, requested=n)
    out = []
    for l0 in enumerate_maximal_invariant_linked(group):
        if transversal_bits(l0) != l0.bits:
            continue
        z = MaximalLinkedSystem.of(l0)
        ideal = principal_left_ideal(z, group, "trace")
        if ideal.members == (z,):
            out.append(z)
    return sorted(out, key=lambda f: f.key)


def idempotents(group: FiniteGroup) -> list[MaximalLinkedSystem]:
    if group.order > TABLE_LIMIT:
        raise CapacityError(f"idempotents need a product table (order <= {TABLE_LIMIT})",
                            limit=TABLE_LIMIT, requested=group.order)
    sx = superextension(group)
    t = sx.table
    return [sx.elements[e] for e in range(len(sx)) if t[e, e] == e]


def invariant_mls(group: FiniteGroup) -> list[MaximalLinkedSystem]:
    """Invariant maximal linked systems, from the orbit search."""
    return [MaximalLinkedSystem.of(f) for f in enumerate_maximal_invariant_linked(group)
            if transversal_bits(f) == f.bits]


# -- executable checks ----------------------------------------------------------


def check_narist(l0: InclusionHyperspace, group: FiniteGroup) -> dict:
    """For each A in l0^perp minus l0, find x with xA = G minus A and check x^2 A = A."""
    if not group.is_abelian:
        raise SpecError("check_narist needs an abelian group", axiom="abelian")
    if not is_maximal_invariant_linked(l0, group):
        raise SpecError("family is not a maximal invariant linked system", axiom="maximal-invariant")
    full = group.full_mask
    gap = sorted(elements_of(transversal_bits(l0) & ~l0.bits), key=sort_key)
    witnesses, failures = [], []
    for a in gap:
        x = next((x for x in group.elements if group.left_translate_mask(x, a) == full ^ a), None)
        if x is None:
            failures.append({"A": hex(a), "reason": "no x with xA = G \\ A"})
            continue
        x2 = group.mul(x, x)
        if group.left_translate_mask(x2, a) != a:
            failures.append({"A": hex(a), "witness": x, "reason": "x^2 A != A"})
            continue
        witnesses.append({"A": hex(a), "witness": x})
    return {
        "check": "narist",
        "group": group.name,
        "L0": render(l0),
        "gap_size": len(gap),
        "witnesses": witnesses,
        "failures": failures,
        "ok": not failures,
    }


def check_rectangular_invariant(group: FiniteGroup) -> dict:
    """A * B = B for all invariant inclusion hyperspaces A, B."""
    fams = invariant_hyperspaces(group)
    failures = []
    for a in fams:
        for b in fams:
            if product(a, b, group) != b:
                failures.append({"A": render(a), "B": render(b)})
    return {
        "check": "rectangular",
        "group": group.name,
        "invariant_hyperspaces": len(fams),
        "pairs": len(fams) ** 2,
        "failures": failures,
        "ok": not failures,
    }


def check_upset_left_ideal(l0: InclusionHyperspace, group: FiniteGroup, *, brute: bool | None = None) -> dict:
    """Whether the up-set of l0 in lambda(G) is closed under left multiplication.

    Certificate route: A*B contains l0 for every A iff phi_B(S) = G for every
    minimal S of l0 (G is the only set lying in every maximal linked system).
    Brute route (orders <= 6): every table entry A*B with B in the up-set.
    """
    ups = upset_mls(l0, group)
    full = group.full_mask
    cert_fail = []
    for b in ups:
        ph = phi(b, group)
        bad = [hex(s) for s in l0.minimal if int(ph[s]) != full]
        if bad:
            cert_fail.append({"B": render(b), "sets": bad})
    report = {
        "check": "upset-left-ideal",
        "group": group.name,
        "L0": render(l0),
        "upset_size": len(ups),
        "certificate_failures": cert_fail,
    }
    if brute is None:
        brute = group.order <= TABLE_LIMIT
    ok = not cert_fail
    if brute:
        sx = superextension(group)
        idx = np.array([sx.index_of(b) for b in ups], dtype=np.int64)
        inside = np.zeros(len(sx), dtype=bool)
        inside[idx] = True
        closed = bool(np.all(inside[sx.table[:, idx]]))
        report["brute_closed"] = closed
        ok = ok and closed
    report["ok"] = ok
    return report


def upset_as_left_ideal(l0: InclusionHyperspace, group: FiniteGroup) -> LeftIdeal:
    return LeftIdeal(group, tuple(upset_mls(l0, group)))


def check_stideal(group: FiniteGroup) -> dict:
    """G odd iff every minimal left ideal is a singleton; right zeros = invariant systems."""
    from .groups import is_odd_group
    from .hyperspace import majority_sets

    odd = is_odd_group(group)
    ideals = minimal_left_ideals(group)
    rz = right_zeros(group)
    inv = invariant_mls(group)
    report = {
        "check": "stideal",
        "group": group.name,
        "odd": odd,
        "minimal_left_ideals": len(ideals),
        "ideal_sizes": sorted({len(i) for i in ideals}),
        "seeded": any(i.seeded for i in ideals),
        "right_zeros": [render(z) for z in rz],
        "invariant_mls": [render(z) for z in inv],
    }
    all_singletons = all(len(i) == 1 for i in ideals)
    ok = (odd == all_singletons) and [z.bits for z in rz] == [z.bits for z in inv]
    if group.order <= TABLE_LIMIT:
        by_scan = [f for f in superextension(group).elements if is_invariant(f, group)]
        report["invariant_by_scan"] = len(by_scan)
        ok = ok and [f.bits for f in by_scan] == [z.bits for z in inv]
    if odd:
        maj = InclusionHyperspace(group.order, majority_sets(group.order))
        report["majority_is_right_zero"] = any(z.bits == maj.bits for z in rz)
        ok = ok and len(inv) >= 1 and report["majority_is_right_zero"]
    else:
        ok = ok and not inv and not any(len(i) == 1 for i in ideals)
    report["ok"] = bool(ok)
    return report


def check_structure(group: FiniteGroup) -> dict:
    """Minimal left ideals are disjoint, equally sized, and cover K exactly."""
    sx = superextension(group)
    ideals = minimal_left_ideal_indices(sx)
    union = set().union(*ideals)
    k = minimal_ideal(sx)
    disjoint = sum(len(i) for i in ideals) == len(union)
    equal = len({len(i) for i in ideals}) == 1
    return {
        "check": "structure",
        "group": group.name,
        "lambda_size": len(sx),
        "minimal_left_ideals": len(ideals),
        "ideal_size": len(ideals[0]),
        "K_size": len(k),
        "disjoint": disjoint,
        "equal_size": equal,
        "union_is_K": union == set(k),
        "ok": disjoint and equal and union == set(k),
    }


def check_associativity(group: FiniteGroup, triples: int | None = None, seed: int = 0) -> dict:
    """(A*B)*C = A*(B*C) over all triples, or ``triples`` random ones."""
    sx = superextension(group)
    t = sx.table
    m = len(sx)
    if triples is None:
        a, b, c = np.unravel_index(np.arange(m ** 3, dtype=np.int64), (m, m, m))
    else:
        rng = np.random.default_rng(seed)
        a, b, c = (rng.integers(0, m, triples) for _ in range(3))
    lhs = t[t[a, b], c]
    rhs = t[a, t[b, c]]
    bad = int(np.count_nonzero(lhs != rhs))
    return {
        "check": "associativity",
        "group": group.name,
        "triples": int(len(a)),
        "exhaustive": triples is None,
        "failures": bad,
        "ok": bad == 0,
    }


def check_trace_vs_brute(group: FiniteGroup, samples: int = 20, seed: int = 0) -> dict:
    """Traced and brute-force principal left ideals agree for random B."""
    sx = superextension(group)
    rng = np.random.default_rng(seed)
    picks = rng.integers(0, len(sx), samples)
    discrepancies = []
    sizes = []
    for i in picks:
        b = sx.elements[int(i)]
        brute = principal_left_ideal(b, group, "brute")
        trace = principal_left_ideal(b, group, "trace")
        sizes.append(len(brute))
        if brute.members != trace.members:
            discrepancies.append(render(b))
    return {
        "check": "trace-vs-brute",
        "group": group.name,
        "samples": samples,
        "ideal_sizes": sizes,
        "discrepancies": discrepancies,
        "ok": not discrepancies,
    }
