"""Inclusion hyperspaces over a finite ground set {0..n-1}.

A family is held in two forms at once:

* ``minimal``: the antichain of minimal members, sorted by (size, bitmask);
* ``bits``: the dense form, an int with ``2**n`` bits where bit ``S`` is set
  iff the subset with bitmask ``S`` belongs to the family.

Transversals and membership work on the dense form; translation maps the
antichain.  Values are immutable.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np

from .errors import SpecError
from .groups import CAPACITY, FiniteGroup, elements_of, mask_of


class GroundSizeError(SpecError):
    pass


class NotMaximalLinkedError(SpecError):
    pass


@dataclass(frozen=True)
class SubsetOfGround:
    ground_size: int
    bits: int

    def __post_init__(self):
        if not 0 <= self.ground_size <= CAPACITY:
            raise GroundSizeError(f"ground size {self.ground_size} out of range")
        if self.bits < 0 or self.bits >> self.ground_size:
            raise GroundSizeError(f"subset {self.bits:#x} is not inside a {self.ground_size}-set")

    @classmethod
    def of(cls, ground_size: int, elements: Iterable[int]) -> SubsetOfGround:
        return cls(ground_size, mask_of(elements))

    @property
    def members(self) -> list[int]:
        return elements_of(self.bits)

    def __len__(self):
        return self.bits.bit_count()


def sort_key(mask: int) -> tuple[int, int]:
    return (mask.bit_count(), mask)


# -- dense helpers --------------------------------------------------------


@lru_cache(maxsize=None)
def lacking_masks(n: int) -> tuple[int, ...]:
    """For each element i, the dense bit pattern of subsets that lack i."""
    size = 1 << n
    out = []
    for i in range(n):
        run = 1 << i
        pattern = (1 << run) - 1
        length = 2 * run
        while length < size:
            pattern |= pattern << length
            length *= 2
        out.append(pattern)
    return tuple(out)


def full_dense(n: int) -> int:
    return (1 << (1 << n)) - 1


def up_closure(bits: int, n: int) -> int:
    for i, lack in enumerate(lacking_masks(n)):
        bits |= (bits & lack) << (1 << i)
    return bits


def down_closure(bits: int, n: int) -> int:
    # S in family -> S minus {i} in family
    for i, lack in enumerate(lacking_masks(n)):
        bits |= (bits >> (1 << i)) & lack
    return bits


def minimal_bits(bits: int, n: int) -> int:
    """Dense pattern of minimal members of an up-closed dense family."""
    covered = 0
    for i, lack in enumerate(lacking_masks(n)):
        covered |= (bits & lack) << (1 << i)
    return bits & ~covered


def complement_image(bits: int, n: int) -> int:
    """Dense family {X minus S : S in family} (bit reversal of the dense word)."""
    size = 1 << n
    s = format(bits, f"0{size}b")
    return int(s[::-1], 2)


def dense_to_array(bits: int, n: int) -> np.ndarray:
    size = 1 << n
    raw = np.frombuffer(bits.to_bytes(max(1, (size + 7) // 8), "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def array_to_dense(arr: np.ndarray) -> int:
    return int.from_bytes(np.packbits(np.asarray(arr, dtype=bool), bitorder="little").tobytes(), "little")


def dense_members(bits: int) -> list[int]:
    return elements_of(bits)


# -- families -------------------------------------------------------------


class InclusionHyperspace:
    """An upward-closed nonempty family of nonempty subsets of {0..n-1}."""

    __slots__ = ("n", "minimal", "bits", "_hash")

    def __init__(self, n: int, sets: Iterable[int | SubsetOfGround | Iterable[int]]):
        if not 0 <= n <= CAPACITY:
            raise GroundSizeError(f"ground size {n} out of range 0..{CAPACITY}")
        masks = [_as_mask(s, n) for s in sets]
        if not masks:
            raise SpecError("an inclusion hyperspace must be nonempty", axiom="nonempty")
        if 0 in masks:
            raise SpecError("the empty set cannot belong to an inclusion hyperspace", axiom="nonempty-members")
        dense = 0
        for m in masks:
            dense |= 1 << m
        self._set(n, up_closure(dense, n))

    def _set(self, n, bits):
        self.n = n
        self.bits = bits
        self.minimal = tuple(sorted(elements_of(minimal_bits(bits, n)), key=sort_key))
        self._hash = hash((n, bits))

    @classmethod
    def from_bits(cls, n: int, bits: int, *, check: bool = True):
        """Wrap a dense up-closed family (``check`` verifies closure and ∅ ∉ F)."""
        if check:
            if not 0 <= n <= CAPACITY:
                raise GroundSizeError(f"ground size {n} out of range 0..{CAPACITY}")
            if bits <= 0 or bits >> (1 << n):
                raise SpecError("dense family empty or out of range", axiom="nonempty")
            if bits & 1:
                raise SpecError("the empty set cannot belong to an inclusion hyperspace", axiom="nonempty-members")
            if up_closure(bits, n) != bits:
                raise SpecError("family is not upward closed", axiom="monotone")
        obj = cls.__new__(cls)
        obj._set(n, bits)
        return obj

    @classmethod
    def from_array(cls, arr: np.ndarray, n: int, *, check: bool = True):
        return cls.from_bits(n, array_to_dense(arr), check=check)

    def as_array(self) -> np.ndarray:
        return dense_to_array(self.bits, self.n)

    @property
    def ground_size(self) -> int:
        return self.n

    @property
    def minimal_sets(self) -> tuple[int, ...]:
        return self.minimal

    def __contains__(self, a) -> bool:
        return member(self, a)

    def __iter__(self) -> Iterator[int]:
        """All members as bitmasks, in increasing bitmask order."""
        return iter(elements_of(self.bits))

    def __len__(self):
        return self.bits.bit_count()

    def __eq__(self, other):
        if not isinstance(other, InclusionHyperspace):
            return NotImplemented
        return self.n == other.n and self.bits == other.bits

    def __hash__(self):
        return self._hash

    def __le__(self, other: InclusionHyperspace) -> bool:
        _same_ground(self, other)
        return self.bits & ~other.bits == 0

    def __lt__(self, other: InclusionHyperspace) -> bool:
        return self <= other and self.bits != other.bits

    # written out rather than delegated: a subclass operand makes Python try
    # the reflected method first, and delegation would bounce forever
    def __ge__(self, other: InclusionHyperspace) -> bool:
        _same_ground(self, other)
        return other.bits & ~self.bits == 0

    def __gt__(self, other: InclusionHyperspace) -> bool:
        return self >= other and self.bits != other.bits

    @property
    def key(self) -> tuple[tuple[int, int], ...]:
        """Canonical ordering key: the minimal sets as (size, mask) pairs."""
        return tuple(sort_key(m) for m in self.minimal)

    def render(self) -> str:
        return render(self)

    def __repr__(self):
        sets = ",".join("{" + ",".join(map(str, elements_of(m))) + "}" for m in self.minimal)
        return f"{type(self).__name__}(n={self.n}, min=[{sets}])"


class MaximalLinkedSystem(InclusionHyperspace):
    """An inclusion hyperspace equal to its own transversal."""

    __slots__ = ()

    def __init__(self, n, sets):
        super().__init__(n, sets)
        _require_mls(self)

    @classmethod
    def from_bits(cls, n, bits, *, check=True):
        obj = super().from_bits(n, bits, check=check)
        if check:
            _require_mls(obj)
        return obj

    @classmethod
    def of(cls, family: InclusionHyperspace) -> MaximalLinkedSystem:
        return cls.from_bits(family.n, family.bits)

    @classmethod
    def principal(cls, n: int, x: int) -> MaximalLinkedSystem:
        """The principal ultrafilter at x."""
        return cls(n, [1 << x])

    @classmethod
    def majority(cls, n: int) -> MaximalLinkedSystem:
        """{A : |A| > n/2}; maximal linked only for odd n."""
        return cls(n, majority_sets(n))


def majority_sets(n: int, ground: int | None = None) -> list[int]:
    """Masks of size floor(n/2)+1 inside ``ground`` (default the whole n-set)."""
    ground = (1 << n) - 1 if ground is None else ground
    elems = elements_of(ground)
    need = len(elems) // 2 + 1
    from itertools import combinations

    return [mask_of(c) for c in combinations(elems, need)]


def _require_mls(f: InclusionHyperspace):
    if transversal_bits(f) != f.bits:
        raise NotMaximalLinkedError("family is not maximal linked (F != F^perp)", axiom="self-dual")


def _as_mask(s, n) -> int:
    if isinstance(s, SubsetOfGround):
        if s.ground_size != n:
            raise GroundSizeError(f"subset over a {s.ground_size}-set used on a {n}-set")
        return s.bits
    if isinstance(s, (int, np.integer)):
        m = int(s)
    else:
        m = mask_of(s)
    if m < 0 or m >> n:
        raise GroundSizeError(f"subset {m:#x} does not fit a ground set of size {n}")
    return m


def _same_ground(a: InclusionHyperspace, b: InclusionHyperspace):
    if a.n != b.n:
        raise GroundSizeError(f"ground sizes differ: {a.n} vs {b.n}")


# -- pointwise algebra -----------------------------------------------------


def member(f: InclusionHyperspace, a) -> bool:
    return bool(f.bits >> _as_mask(a, f.n) & 1)


def transversal_bits(f: InclusionHyperspace) -> int:
    # A meets every member  <=>  X minus A is not a member (F is up-closed)
    return full_dense(f.n) ^ complement_image(f.bits, f.n)


def transversal(f: InclusionHyperspace) -> InclusionHyperspace:
    return InclusionHyperspace.from_bits(f.n, transversal_bits(f), check=False)


def is_linked(f: InclusionHyperspace, method: str = "pairwise") -> bool:
    if method == "pairwise":
        ms = f.minimal
        return all(a & b for i, a in enumerate(ms) for b in ms[i:])
    if method == "transversal":
        return f.bits & ~transversal_bits(f) == 0
    raise ValueError(f"unknown method {method!r}")


def is_maximal_linked(f: InclusionHyperspace, method: str = "transversal") -> bool:
    if method == "transversal":
        return transversal_bits(f) == f.bits
    if method == "partition":
        return partition_test(f)
    raise ValueError(f"unknown method {method!r}")


def partition_test(f: InclusionHyperspace) -> bool:
    """Exactly one of A, X minus A is a member, for every complementary pair."""
    full = (1 << f.n) - 1
    bits = f.bits
    for a in range(1 << max(f.n - 1, 0)):
        if (bits >> a & 1) == (bits >> (full ^ a) & 1):
            return False
    return True


def translate(x: int, f: InclusionHyperspace, group: FiniteGroup) -> InclusionHyperspace:
    """xF = {xA : A in F}."""
    if group.order != f.n:
        raise GroundSizeError(f"family over {f.n} points, group of order {group.order}")
    cls = type(f)
    dense = 0
    for m in f.minimal:
        dense |= 1 << group.left_translate_mask(x, m)
    return cls.from_bits(f.n, up_closure(dense, f.n), check=False)


def is_invariant(f: InclusionHyperspace, group: FiniteGroup) -> bool:
    return all(translate(x, f, group) == f for x in group.elements)


def is_H_invariant(f: InclusionHyperspace, group: FiniteGroup, subgroup: Iterable[int]) -> bool:
    h = set(subgroup)
    group._check_subgroup(h)
    return all(translate(x, f, group) == f for x in sorted(h))


def upper(n: int, sets: Iterable) -> InclusionHyperspace:
    """Shorthand for the up-closure of ``sets``."""
    return InclusionHyperspace(n, sets)


def at_least(n: int, k: int) -> InclusionHyperspace:
    """{A : |A| >= k}."""
    from itertools import combinations

    return InclusionHyperspace(n, [mask_of(c) for c in combinations(range(n), k)])


def embed(f: InclusionHyperspace, n: int) -> InclusionHyperspace:
    """Read the minimal sets of ``f`` as subsets of a larger n-set."""
    if n < f.n:
        raise GroundSizeError("cannot embed into a smaller ground set")
    return InclusionHyperspace(n, f.minimal)


def embed_on_subgroup(f: InclusionHyperspace, subgroup: Iterable[int], n: int) -> InclusionHyperspace:
    """Transport a family on |H| points to H inside an n-set (i-th point -> i-th least member of H)."""
    h = sorted(subgroup)
    if len(h) != f.n:
        raise GroundSizeError(f"family over {f.n} points, subgroup of size {len(h)}")
    return InclusionHyperspace(n, [mask_of(h[i] for i in elements_of(m)) for m in f.minimal])


def majority_on(subgroup: Iterable[int], n: int) -> InclusionHyperspace:
    """The majority family of a subset H, with minimal sets inside H."""
    return InclusionHyperspace(n, majority_sets(n, mask_of(subgroup)))


# -- serialization ----------------------------------------------------------


def to_json(f: InclusionHyperspace) -> dict:
    return {"n": f.n, "min": [hex(m) for m in f.minimal]}


def render(f: InclusionHyperspace) -> str:
    return json.dumps(to_json(f), separators=(",", ":"))


def parse(text_or_obj, cls=InclusionHyperspace, strict: bool = False) -> InclusionHyperspace:
    """Inverse of :func:`render`; ``strict`` also demands the canonical antichain."""
    obj = text_or_obj
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise SpecError(f"family is not valid JSON: {exc}", axiom="syntax") from None
    if not isinstance(obj, dict) or "n" not in obj or "min" not in obj:
        raise SpecError("family JSON needs 'n' and 'min'", axiom="syntax")
    try:
        masks = [int(m, 16) if isinstance(m, str) else int(m) for m in obj["min"]]
    except (TypeError, ValueError):
        raise SpecError("minimal sets must be hex strings or integers", axiom="syntax") from None
    fam = cls(int(obj["n"]), masks)
    if strict and masks != list(fam.minimal):
        raise SpecError("listed sets are not a canonical antichain", axiom="antichain")
    return fam
