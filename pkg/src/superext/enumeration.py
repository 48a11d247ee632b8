"""Enumeration of maximal linked systems and of invariant linked families.

Search over complementary pairs.  A partial system is an up-closed linked
dense family U.  For an undecided pair {Y, X minus Y}, adding either side
(with its up-closure) keeps U linked: a member of U disjoint from a superset
of Y would lie inside X minus Y, which would then already be decided.  So the
search tree has no dead ends and every leaf is a distinct maximal linked
system.  Pairs are decided smallest side first.
"""
from __future__ import annotations

import os
import random
import time
from concurrent.futures import ProcessPoolExecutor
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import networkx as nx

from .errors import BudgetExceeded, CapacityError
from .groups import FiniteGroup, elements_of
from .hyperspace import (
    InclusionHyperspace,
    MaximalLinkedSystem,
    full_dense,
    is_linked,
    sort_key,
    transversal_bits,
    up_closure,
)

EXHAUSTIVE_LIMIT = 7
# |lambda(C_8)|, for documentation only; never enumerated
LAMBDA_8_ESTIMATE = 229_809_982_112
DEFAULT_SPLIT_DEPTH = 8


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("SUPEREXT_JOBS", "1")))
    except ValueError:
        return 1


def _order(group_or_n) -> int:
    return group_or_n.order if isinstance(group_or_n, FiniteGroup) else int(group_or_n)


# -- fast engine for exhaustive enumeration -------------------------------


class _Layout:
    """Subsets of an n-set re-indexed by (size, mask); so the lowest set bit
    of an undecided pattern is a smallest undecided set."""

    def __init__(self, n: int):
        self.n = n
        self.order = sorted(range(1 << n), key=sort_key)
        pos = [0] * (1 << n)
        for p, s in enumerate(self.order):
            pos[s] = p
        self.pos = pos
        full = (1 << n) - 1
        self.all = full_dense(n)
        self.comp = [pos[full ^ s] for s in self.order]
        up = []
        cdown = []
        for s in self.order:
            rest = full ^ s
            u = 0
            c = 0
            sub = rest
            while True:
                u |= 1 << pos[s | sub]
                c |= 1 << pos[rest ^ sub]
                if sub == 0:
                    break
                sub = (sub - 1) & rest
            up.append(u)
            cdown.append(c)
        self.up = up
        self.cdown = cdown

    def start(self):
        top = len(self.order) - 1
        return self.up[top], self.cdown[top]

    def minimal_sets(self, chosen: Iterable[int]) -> tuple[int, ...]:
        masks = sorted((self.order[p] for p in chosen), key=sort_key)
        kept: list[int] = []
        for m in masks:
            if not any(m & k == k for k in kept):
                kept.append(m)
        return tuple(kept)


@lru_cache(maxsize=None)
def _layout(n: int) -> _Layout:
    return _Layout(n)


def _expand(layout: _Layout, states, depth: int):
    """Split the search tree: return (finished leaves, frontier states at ``depth``)."""
    leaves, frontier = [], []
    stack = list(reversed(states))
    while stack:
        U, D, chosen = stack.pop()
        und = layout.all & ~(U | D)
        if not und:
            leaves.append(chosen)
            continue
        if len(chosen) >= depth:
            frontier.append((U, D, chosen))
            continue
        p = (und & -und).bit_length() - 1
        c = layout.comp[p]
        stack.append((U | layout.up[c], D | layout.cdown[c], chosen + (c,)))
        stack.append((U | layout.up[p], D | layout.cdown[p], chosen + (p,)))
    return leaves, frontier


def _run_subtrees(args):
    n, states, count_only, limit, deadline = args
    layout = _layout(n)
    up, cdown, comp, allbits = layout.up, layout.cdown, layout.comp, layout.all
    out = []
    count = 0
    ticks = 0
    for state in states:
        stack = [state]
        while stack:
            U, D, chosen = stack.pop()
            und = allbits & ~(U | D)
            if not und:
                count += 1
                if not count_only:
                    out.append(layout.minimal_sets(chosen))
                if limit is not None and count > limit:
                    return count, out, True
                continue
            ticks += 1
            if deadline is not None and ticks & 0xFFF == 0 and time.monotonic() > deadline:
                return count, out, True
            p = (und & -und).bit_length() - 1
            c = comp[p]
            if count_only:
                stack.append((U | up[c], D | cdown[c], None))
                stack.append((U | up[p], D | cdown[p], None))
            else:
                stack.append((U | up[c], D | cdown[c], chosen + (c,)))
                stack.append((U | up[p], D | cdown[p], chosen + (p,)))
    return count, out, False


def _search(n: int, *, count_only: bool, limit=None, jobs=None, split_depth=DEFAULT_SPLIT_DEPTH,
            timeout=None):
    layout = _layout(n)
    U, D = layout.start()
    # the full set is always a member; it is minimal only when n == 1
    root = [(U, D, (len(layout.order) - 1,))]
    jobs = default_jobs() if jobs is None else max(1, jobs)
    deadline = None if timeout is None else time.monotonic() + timeout
    if jobs == 1:
        return _run_subtrees((n, root, count_only, limit, deadline))
    leaves, frontier = _expand(layout, root, split_depth)
    count = len(leaves)
    out = [] if count_only else [layout.minimal_sets(c) for c in leaves]
    # round-robin chunks keep the work balanced; order is restored by sorting
    chunks = [frontier[i::jobs * 4] for i in range(min(len(frontier), jobs * 4))]
    stopped = False
    if chunks:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for c, o, s in pool.map(_run_subtrees, [(n, ch, count_only, limit, deadline) for ch in chunks]):
                count += c
                out.extend(o)
                stopped = stopped or s
    if limit is not None and count > limit:
        stopped = True
    return count, out, stopped


def _mls_from_minimal(n: int, minimal: Sequence[int]) -> MaximalLinkedSystem:
    dense = 0
    for m in minimal:
        dense |= 1 << m
    return MaximalLinkedSystem.from_bits(n, up_closure(dense, n), check=False)


def enumerate_mls(group_or_n, budget: int | None = None, *, jobs: int | None = None,
                  split_depth: int = DEFAULT_SPLIT_DEPTH, timeout: float | None = None,
                  ) -> list[MaximalLinkedSystem]:
    """All maximal linked systems on an n-set, in canonical order.

    Orders above 7 are refused unless ``budget`` is given, in which case the
    search stops with :class:`BudgetExceeded` once more than ``budget``
    systems have been found (``partial`` holds the first ``budget``).
    """
    n = _order(group_or_n)
    if n > EXHAUSTIVE_LIMIT and budget is None:
        raise CapacityError(
            f"exhaustive enumeration is limited to order {EXHAUSTIVE_LIMIT}"
            + (f" (order 8 would give {LAMBDA_8_ESTIMATE} systems)" if n == 8 else ""),
            limit=EXHAUSTIVE_LIMIT, requested=n,
        )
    if n > 8:
        raise CapacityError("enumeration tables are limited to order 8", limit=8, requested=n)
    count, mins, stopped = _search(n, count_only=False, limit=budget, jobs=jobs,
                                   split_depth=split_depth, timeout=timeout)
    mins.sort(key=lambda ms: tuple(sort_key(m) for m in ms))
    if stopped:
        partial = [_mls_from_minimal(n, ms) for ms in mins[: budget if budget is not None else len(mins)]]
        raise BudgetExceeded(f"enumeration stopped after {len(partial)} systems", count=len(partial),
                             partial=partial)
    return [_mls_from_minimal(n, ms) for ms in mins]


def iter_mls(group_or_n, **kw) -> Iterator[MaximalLinkedSystem]:
    return iter(enumerate_mls(group_or_n, **kw))


def count_mls(group_or_n, *, jobs: int | None = None, split_depth: int = DEFAULT_SPLIT_DEPTH,
              timeout: float | None = None) -> int:
    n = _order(group_or_n)
    if n > EXHAUSTIVE_LIMIT:
        raise CapacityError(f"exhaustive counting is limited to order {EXHAUSTIVE_LIMIT}",
                            limit=EXHAUSTIVE_LIMIT, requested=n)
    count, _, stopped = _search(n, count_only=True, jobs=jobs, split_depth=split_depth, timeout=timeout)
    if stopped:
        raise BudgetExceeded(f"counting timed out after {count} systems", count=count)
    return count


# -- generic completion over a list of questions --------------------------


class _UpCache:
    def __init__(self, n):
        self.n = n
        self._c: dict[int, int] = {}

    def __call__(self, s: int) -> int:
        v = self._c.get(s)
        if v is None:
            v = self._c[s] = up_closure(1 << s, self.n)
        return v


def completions(n: int, start_bits: int, questions: Sequence[int], *, limit: int | None = None,
                deadline: float | None = None, up: _UpCache | None = None) -> Iterator[int]:
    """Every way of deciding ``questions`` on top of a linked up-closed family.

    ``start_bits`` is a dense linked up-closed family.  For each question Y
    either Y or its complement is added.  Yields the final dense family for
    each leaf; restricted to the questions, leaves are pairwise distinct.
    """
    full = (1 << n) - 1
    up = up or _UpCache(n)
    k = len(questions)
    stack = [(start_bits, 0)]
    produced = 0
    ticks = 0
    while stack:
        U, i = stack.pop()
        while i < k:
            q = questions[i]
            if U >> q & 1 or U >> (full ^ q) & 1:
                i += 1
                continue
            break
        if i == k:
            produced += 1
            if limit is not None and produced > limit:
                raise BudgetExceeded(f"more than {limit} completions", count=limit)
            yield U
            continue
        ticks += 1
        if deadline is not None and ticks & 0x3FF == 0 and time.monotonic() > deadline:
            raise BudgetExceeded("completion search timed out", count=produced)
        q = questions[i]
        stack.append((U | up(full ^ q), i + 1))
        stack.append((U | up(q), i + 1))


def _pair_questions(n: int) -> list[int]:
    full = (1 << n) - 1
    reps = [s for s in range(1 << n) if sort_key(s) < sort_key(full ^ s)]
    return sorted(reps, key=sort_key)


def upset_mls(l0: InclusionHyperspace, group_or_n=None, *, limit: int | None = None,
              timeout: float | None = None) -> list[MaximalLinkedSystem]:
    """All maximal linked systems containing the linked family ``l0``."""
    n = l0.n
    if group_or_n is not None and _order(group_or_n) != n:
        raise CapacityError("family and group sizes differ")
    if not is_linked(l0):
        raise ValueError("upset_mls needs a linked family")
    deadline = None if timeout is None else time.monotonic() + timeout
    out = [MaximalLinkedSystem.from_bits(n, u, check=False)
           for u in completions(n, l0.bits, _pair_questions(n), limit=limit, deadline=deadline)]
    out.sort(key=lambda f: f.key)
    return out


def complete_one(l0: InclusionHyperspace) -> MaximalLinkedSystem:
    """The first completion of a linked family in search order."""
    return MaximalLinkedSystem.from_bits(l0.n, next(completions(l0.n, l0.bits, _pair_questions(l0.n))),
                                         check=False)


def sample_mls(group_or_n, k: int, seed: int = 0) -> list[MaximalLinkedSystem]:
    """``k`` random maximal linked systems (random pair order and random sides).

    Works at any order up to the capacity; not uniform over lambda(G).
    """
    n = _order(group_or_n)
    rng = random.Random(seed)
    full = (1 << n) - 1
    reps = [s for s in range(1 << n) if s < full ^ s]
    up = _UpCache(n) if n <= 10 else (lambda s: up_closure(1 << s, n))
    out = []
    for _ in range(k):
        rng.shuffle(reps)
        U = up(full)
        for q in reps:
            if U >> q & 1 or U >> (full ^ q) & 1:
                continue
            U |= up(q if rng.random() < 0.5 else full ^ q)
        out.append(MaximalLinkedSystem.from_bits(n, U, check=False))
    return out


# -- orbit families ----------------------------------------------------------


def subset_orbits(group: FiniteGroup) -> list[tuple[int, ...]]:
    """Orbits of nonempty subsets under left translation, sorted by least member."""
    n = group.order
    seen_set = set()
    orbits = []
    for s in sorted(range(1, 1 << n), key=sort_key):
        if s in seen_set:
            continue
        orb = sorted({group.left_translate_mask(x, s) for x in group.elements}, key=sort_key)
        seen_set.update(orb)
        orbits.append(tuple(orb))
    return orbits


def _meets_all(a: int, orbit: Sequence[int]) -> bool:
    return all(a & b for b in orbit)


def _orbit_graph(group: FiniteGroup):
    orbits = subset_orbits(group)
    # invariance: xA meets yB for all x,y  <=>  A meets every translate of B
    vertices = [i for i, o in enumerate(orbits) if _meets_all(o[0], o)]
    g = nx.Graph()
    g.add_nodes_from(vertices)
    for a, i in enumerate(vertices):
        rep = orbits[i][0]
        for j in vertices[a + 1:]:
            if _meets_all(rep, orbits[j]):
                g.add_edge(i, j)
    return orbits, g


def _family_of(n: int, orbits, chosen) -> InclusionHyperspace:
    dense = 0
    for i in chosen:
        for s in orbits[i]:
            dense |= 1 << s
    return InclusionHyperspace.from_bits(n, up_closure(dense, n), check=False)


def enumerate_maximal_invariant_linked(group: FiniteGroup) -> list[InclusionHyperspace]:
    """Invariant linked inclusion hyperspaces maximal among invariant linked ones.

    These are the maximal cliques of the graph whose vertices are self-linked
    orbits of subsets and whose edges join mutually linked orbits.
    """
    if group.order > 12:
        raise CapacityError("maximal invariant search is limited to order 12", limit=12,
                            requested=group.order)
    orbits, g = _orbit_graph(group)
    fams = {_family_of(group.order, orbits, clique) for clique in nx.find_cliques(g)}
    return sorted(fams, key=lambda f: f.key)


def greedy_maximal_invariant_linked(group: FiniteGroup) -> InclusionHyperspace:
    """One maximal invariant linked system: add compatible orbits, largest sets first."""
    orbits, g = _orbit_graph(group)
    chosen: list[int] = []
    for i in sorted(g.nodes, key=lambda i: (-orbits[i][0].bit_count(), orbits[i][0])):
        if all(g.has_edge(i, j) for j in chosen):
            chosen.append(i)
    return _family_of(group.order, orbits, chosen)


def is_maximal_invariant_linked(f: InclusionHyperspace, group: FiniteGroup) -> bool:
    from .hyperspace import is_invariant

    if f.n != group.order or not is_invariant(f, group) or not is_linked(f):
        return False
    for orb in subset_orbits(group):
        if f.bits >> orb[0] & 1:
            continue
        if _meets_all(orb[0], orb) and all(_meets_all(m, orb) for m in f.minimal):
            return False
    return True


def invariant_hyperspaces(group: FiniteGroup) -> list[InclusionHyperspace]:
    """Every invariant inclusion hyperspace (up-closed nonempty unions of orbits)."""
    orbits = subset_orbits(group)
    if len(orbits) > 20:
        raise CapacityError("too many orbits for invariant hyperspace enumeration", limit=20,
                            requested=len(orbits))
    n = group.order
    dense = [sum(1 << s for s in o) for o in orbits]
    out = []
    for choice in range(1, 1 << len(orbits)):
        bits = 0
        for i in elements_of(choice):
            bits |= dense[i]
        if up_closure(bits, n) == bits:
            out.append(InclusionHyperspace.from_bits(n, bits, check=False))
    return sorted(out, key=lambda f: f.key)


def min_linked_gap(l0: InclusionHyperspace) -> list[int]:
    """Members of l0^perp that are not in l0 (as masks, canonical order)."""
    return sorted(elements_of(transversal_bits(l0) & ~l0.bits), key=sort_key)
