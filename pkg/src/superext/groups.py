"""Finite groups as Cayley tables on the elements 0..n-1.

Everything here is immutable once constructed.  Subsets of a group are
encoded as int bitmasks (bit ``x`` set iff element ``x`` is a member); that
encoding is shared with :mod:`superext.hyperspace`.
"""
from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, SpecError

CAPACITY = 16


class NotASubgroupError(SpecError):
    pass


class NotNormalError(SpecError):
    pass


class NotHomomorphismError(SpecError):
    pass


def _check_capacity(n):
    if n < 1:
        raise SpecError(f"group order must be positive, got {n}", axiom="order")
    if n > CAPACITY:
        raise CapacityError(
            f"group order {n} exceeds capacity {CAPACITY}", limit=CAPACITY, requested=n
        )


def mask_of(elements: Iterable[int]) -> int:
    m = 0
    for x in elements:
        m |= 1 << x
    return m


def elements_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``table[x][y]`` is the index of ``x*y``.  The table is validated at
    construction (Latin square, two-sided identity, inverses, associativity).
    Equality and hashing use the table only; ``name`` is cosmetic.
    """

    table: tuple[tuple[int, ...], ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        table = tuple(tuple(int(v) for v in row) for row in self.table)
        object.__setattr__(self, "table", table)
        n = len(table)
        _check_capacity(n)
        if any(len(row) != n for row in table):
            raise SpecError("table is not square", axiom="closure")
        full = set(range(n))
        for row in table:
            if set(row) != full:
                raise SpecError("table rows are not permutations of the elements", axiom="latin")
        for y in range(n):
            if {table[x][y] for x in range(n)} != full:
                raise SpecError("table columns are not permutations of the elements", axiom="latin")
        ident = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
        if not ident:
            raise SpecError("no two-sided identity element", axiom="identity")
        object.__setattr__(self, "identity", ident[0])
        t = np.array(table, dtype=np.int64)
        # (xy)z == x(yz) for all triples
        if not np.array_equal(t[t, :], t[:, t]):
            raise SpecError("multiplication is not associative", axiom="associativity")
        inv = []
        for x in range(n):
            ys = [y for y in range(n) if table[x][y] == ident[0] and table[y][x] == ident[0]]
            if not ys:
                raise SpecError(f"element {x} has no two-sided inverse", axiom="inverse")
            inv.append(ys[0])
        object.__setattr__(self, "inverses", tuple(inv))

    # identity and inverses are set in __post_init__
    identity: int = field(init=False, compare=False, repr=False)
    inverses: tuple[int, ...] = field(init=False, compare=False, repr=False)

    @property
    def order(self) -> int:
        return len(self.table)

    def __len__(self):
        return len(self.table)

    @property
    def elements(self) -> range:
        return range(len(self.table))

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inverse(self, x: int) -> int:
        return self.inverses[x]

    def power(self, x: int, k: int) -> int:
        r = self.identity
        for _ in range(k):
            r = self.table[r][x]
        return r

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    @cached_property
    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[x][y] == self.table[y][x] for x in range(n) for y in range(x))

    @cached_property
    def is_cyclic(self) -> bool:
        return any(self.element_order(x) == self.order for x in self.elements)

    # -- subsets -----------------------------------------------------------

    @property
    def full_mask(self) -> int:
        return (1 << self.order) - 1

    def left_translate_mask(self, x: int, mask: int) -> int:
        """x*S as a bitmask."""
        row = self.table[x]
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << row[low.bit_length() - 1]
            mask ^= low
        return out

    def right_translate_mask(self, mask: int, x: int) -> int:
        """S*x as a bitmask."""
        out = 0
        while mask:
            low = mask & -mask
            out |= 1 << self.table[low.bit_length() - 1][x]
            mask ^= low
        return out

    @cached_property
    def translation_table(self) -> np.ndarray:
        """``T[x, S]`` is the bitmask of ``x*S`` for every subset S."""
        n = self.order
        subsets = np.arange(1 << n, dtype=np.int64)
        out = np.zeros((n, 1 << n), dtype=np.int64)
        for x in range(n):
            row = self.table[x]
            acc = np.zeros(1 << n, dtype=np.int64)
            for z in range(n):
                acc |= ((subsets >> z) & 1) << row[z]
            out[x] = acc
        out.setflags(write=False)
        return out

    @cached_property
    def inverse_translation_table(self) -> np.ndarray:
        """``T[x, S]`` is the bitmask of ``x^{-1}S = {z : x*z in S}``."""
        t = self.translation_table[list(self.inverses)]
        t.setflags(write=False)
        return t

    def is_subgroup(self, elements: Iterable[int]) -> bool:
        try:
            self._check_subgroup(set(elements))
        except NotASubgroupError:
            return False
        return True

    def _check_subgroup(self, h: set[int]):
        if not h or not h <= set(self.elements):
            raise NotASubgroupError(f"{sorted(h)} is not a nonempty subset of the group", axiom="subset")
        if self.identity not in h:
            raise NotASubgroupError(f"{sorted(h)} does not contain the identity", axiom="identity")
        for x in h:
            if self.inverses[x] not in h:
                raise NotASubgroupError(f"{sorted(h)} is not closed under inverses", axiom="inverse")
            for y in h:
                if self.table[x][y] not in h:
                    raise NotASubgroupError(f"{sorted(h)} is not closed under multiplication", axiom="closure")

    def is_normal(self, elements: Iterable[int]) -> bool:
        h = set(elements)
        self._check_subgroup(h)
        return all(
            self.table[self.table[g][x]][self.inverses[g]] in h for g in self.elements for x in h
        )

    def to_spec(self) -> dict:
        return {"kind": "table", "table": [list(r) for r in self.table]}

    def __repr__(self):
        return f"FiniteGroup({self.name or 'order ' + str(self.order)})"


@dataclass(frozen=True)
class GroupHomomorphism:
    source: FiniteGroup
    target: FiniteGroup
    map: tuple[int, ...]

    def __post_init__(self):
        m = tuple(int(v) for v in self.map)
        object.__setattr__(self, "map", m)
        if len(m) != self.source.order or any(not 0 <= v < self.target.order for v in m):
            raise NotHomomorphismError("map has wrong length or out-of-range images", axiom="domain")
        s, t = self.source.table, self.target.table
        for x in self.source.elements:
            for y in self.source.elements:
                if m[s[x][y]] != t[m[x]][m[y]]:
                    raise NotHomomorphismError(
                        f"f({x}*{y}) != f({x})*f({y})", axiom="homomorphism"
                    )

    def __call__(self, x: int) -> int:
        return self.map[x]

    @classmethod
    def identity(cls, g: FiniteGroup) -> GroupHomomorphism:
        return cls(g, g, tuple(g.elements))

    @property
    def is_surjective(self) -> bool:
        return set(self.map) == set(self.target.elements)

    @property
    def is_injective(self) -> bool:
        return len(set(self.map)) == len(self.map)

    def kernel(self) -> frozenset[int]:
        return frozenset(x for x in self.source.elements if self.map[x] == self.target.identity)

    def then(self, other: GroupHomomorphism) -> GroupHomomorphism:
        """The composite ``other . self``."""
        if other.source != self.target:
            raise SpecError("composition: target/source mismatch", axiom="composition")
        return GroupHomomorphism(self.source, other.target, tuple(other.map[v] for v in self.map))

    def preimage_mask(self, mask: int) -> int:
        out = 0
        for x, v in enumerate(self.map):
            if mask >> v & 1:
                out |= 1 << x
        return out

    def image_mask(self, mask: int) -> int:
        return mask_of(self.map[x] for x in elements_of(mask))


@dataclass(frozen=True)
class Section:
    """A right inverse ``pick`` of a surjective homomorphism."""

    hom: GroupHomomorphism
    pick: tuple[int, ...]

    def __post_init__(self):
        p = tuple(int(v) for v in self.pick)
        object.__setattr__(self, "pick", p)
        if not self.hom.is_surjective:
            raise SpecError("a section needs a surjective homomorphism", axiom="surjective")
        if len(p) != self.hom.target.order or any(self.hom.map[p[t]] != t for t in self.hom.target.elements):
            raise SpecError("pick is not a right inverse of the homomorphism", axiom="section")

    def __call__(self, t: int) -> int:
        return self.pick[t]

    @classmethod
    def minimal(cls, hom: GroupHomomorphism) -> Section:
        pick = [None] * hom.target.order
        for x in hom.source.elements:
            if pick[hom.map[x]] is None:
                pick[hom.map[x]] = x
        return cls(hom, tuple(pick))

    @classmethod
    def random(cls, hom: GroupHomomorphism, rng: random.Random) -> Section:
        fibres: list[list[int]] = [[] for _ in hom.target.elements]
        for x in hom.source.elements:
            fibres[hom.map[x]].append(x)
        return cls(hom, tuple(rng.choice(f) for f in fibres))


# -- constructors ---------------------------------------------------------


def make_cyclic(n: int) -> FiniteGroup:
    _check_capacity(n)
    return FiniteGroup(tuple(tuple((i + j) % n for j in range(n)) for i in range(n)), name=f"C{n}")


def direct_product(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element (a, b) has index a*|h| + b."""
    _check_capacity(g.order * h.order)
    m = h.order
    table = tuple(
        tuple(g.table[a][c] * m + h.table[b][d] for c in g.elements for d in h.elements)
        for a in g.elements
        for b in h.elements
    )
    return FiniteGroup(table, name=f"{g.name or 'G'}x{h.name or 'H'}")


def quotient(g: FiniteGroup, subgroup: Iterable[int]) -> tuple[FiniteGroup, GroupHomomorphism]:
    """G/H with cosets labelled in order of their least element."""
    h = set(subgroup)
    g._check_subgroup(h)
    if not g.is_normal(h):
        raise NotNormalError(f"{sorted(h)} is not a normal subgroup", axiom="normal")
    label = [-1] * g.order
    reps = []
    for x in g.elements:
        if label[x] < 0:
            for y in h:
                label[g.table[x][y]] = len(reps)
            reps.append(x)
    k = len(reps)
    table = tuple(tuple(label[g.table[reps[i]][reps[j]]] for j in range(k)) for i in range(k))
    q = FiniteGroup(table, name=f"{g.name or 'G'}/{k}" if k else "")
    return q, GroupHomomorphism(g, q, tuple(label))


def unique_subgroup_of_order(g: FiniteGroup, m: int) -> frozenset[int]:
    if not g.is_cyclic:
        raise SpecError("group is not cyclic", axiom="cyclic")
    if m < 1 or g.order % m:
        raise SpecError(f"{m} does not divide the group order {g.order}", axiom="divisibility")
    # in a cyclic group the order-m subgroup is the set of solutions of x^m = e
    return frozenset(x for x in g.elements if g.power(x, m) == g.identity)


def cyclic_reduction(n: int, m: int) -> GroupHomomorphism:
    """The quotient map C_n -> C_m (m | n); after relabelling it is x -> x mod m."""
    g = make_cyclic(n)
    _, pi = quotient(g, unique_subgroup_of_order(g, n // m))
    return pi


def is_odd_group(g: FiniteGroup) -> bool:
    by_orders = all(g.element_order(x) % 2 == 1 for x in g.elements)
    by_size = g.order % 2 == 1
    assert by_orders == by_size, "element orders disagree with the group order"
    return by_orders


def is_isomorphic(g: FiniteGroup, h: FiniteGroup) -> bool:
    """Exhaustive isomorphism search (test utility; fine for orders ≤ 8)."""
    return find_isomorphism(g, h) is not None


def find_isomorphism(g: FiniteGroup, h: FiniteGroup) -> tuple[int, ...] | None:
    if g.order != h.order:
        return None
    go = [g.element_order(x) for x in g.elements]
    ho = [h.element_order(x) for x in h.elements]
    if sorted(go) != sorted(ho):
        return None
    n = g.order
    candidates = [[y for y in h.elements if ho[y] == go[x]] for x in g.elements]
    for perm in itertools.product(*candidates):
        if len(set(perm)) != n:
            continue
        if all(perm[g.table[x][y]] == h.table[perm[x]][perm[y]] for x in range(n) for y in range(n)):
            return tuple(perm)
    return None


# -- spec ingestion -------------------------------------------------------

_SHORT = re.compile(r"^[Cc](\d+)$")


def group_from_spec(spec) -> FiniteGroup:
    """Build a group from a JSON-like spec.

    Accepts ``{"kind": "cyclic", "n": 6}``, ``{"kind": "product", "factors":
    [spec, spec]}``, ``{"kind": "table", "table": [[...]]}``, or the shorthand
    strings ``"C6"`` and ``"C2xC3"``.
    """
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise SpecError(f"group spec is not valid JSON: {exc}", axiom="syntax") from None
        else:
            parts = [p for p in re.split(r"[x×*]", text) if p]
            factors = []
            for p in parts:
                m = _SHORT.match(p.strip())
                if not m:
                    raise SpecError(f"cannot parse group shorthand {p!r}", axiom="syntax")
                factors.append(make_cyclic(int(m.group(1))))
            if not factors:
                raise SpecError("empty group spec", axiom="syntax")
            g = factors[0]
            for f in factors[1:]:
                g = direct_product(g, f)
            return g
    if not isinstance(spec, dict) or "kind" not in spec:
        raise SpecError("group spec must be an object with a 'kind'", axiom="syntax")
    kind = spec["kind"]
    if kind == "cyclic":
        n = spec.get("n")
        if not isinstance(n, int):
            raise SpecError("cyclic spec needs integer 'n'", axiom="syntax")
        return make_cyclic(n)
    if kind == "product":
        factors = spec.get("factors")
        if not isinstance(factors, list) or not factors:
            raise SpecError("product spec needs a nonempty 'factors' list", axiom="syntax")
        groups = [group_from_spec(f) for f in factors]
        g = groups[0]
        for f in groups[1:]:
            g = direct_product(g, f)
        return g
    if kind == "table":
        table = spec.get("table")
        if not isinstance(table, list) or not all(isinstance(r, list) for r in table):
            raise SpecError("table spec needs a list of rows", axiom="syntax")
        try:
            rows = [[int(v) for v in r] for r in table]
        except (TypeError, ValueError):
            raise SpecError("table entries must be integers", axiom="syntax") from None
        if any(v < 0 or v >= len(rows) for r in rows for v in r):
            raise SpecError("table entries out of range", axiom="closure")
        return FiniteGroup(tuple(tuple(r) for r in rows), name=spec.get("name", ""))
    raise SpecError(f"unknown group kind {kind!r}", axiom="syntax")


def subgroup_of(g: FiniteGroup, elements: Sequence[int]) -> frozenset[int]:
    h = set(elements)
    g._check_subgroup(h)
    return frozenset(h)
