"""Induced maps between superextensions and the C_2 <- C_4 <- C_8 ... tower.

For a function f: X -> Y the induced map sends a family A on X to
{B ⊆ Y : f^{-1}(B) in A}.  It takes maximal linked systems to maximal linked
systems and, for homomorphisms, respects the product.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .enumeration import sample_mls
from .errors import CapacityError, SpecError
from .groups import (
    FiniteGroup,
    GroupHomomorphism,
    Section,
    cyclic_reduction,
    make_cyclic,
    quotient,
    unique_subgroup_of_order,
)
from .hyperspace import (
    GroundSizeError,
    InclusionHyperspace,
    MaximalLinkedSystem,
    array_to_dense,
    is_H_invariant,
    majority_on,
    render,
)
from .semigroup import (
    TABLE_LIMIT,
    LeftIdeal,
    descend_to_minimal,
    minimal_left_ideals,
    principal_left_ideal,
    seed_systems,
    product,
    superextension,
)


def _preimage_table(images: Sequence[int], target_size: int) -> np.ndarray:
    """``pre[B]`` = bitmask of {x : images[x] in B} for every B ⊆ target."""
    subsets = np.arange(1 << target_size, dtype=np.int64)
    pre = np.zeros(1 << target_size, dtype=np.int64)
    for x, v in enumerate(images):
        pre |= ((subsets >> v) & 1) << x
    return pre


def pushforward(images: Sequence[int], target_size: int, a: InclusionHyperspace) -> InclusionHyperspace:
    """The family induced on the target by the function x -> images[x]."""
    if len(images) != a.n:
        raise GroundSizeError(f"function on {len(images)} points, family on {a.n}")
    bits = array_to_dense(a.as_array()[_preimage_table(images, target_size)])
    cls = MaximalLinkedSystem if isinstance(a, MaximalLinkedSystem) else InclusionHyperspace
    return cls.from_bits(target_size, bits, check=False)


def induced_map(f: GroupHomomorphism, a: InclusionHyperspace) -> InclusionHyperspace:
    if a.n != f.source.order:
        raise GroundSizeError(f"family on {a.n} points, homomorphism source of order {f.source.order}")
    return pushforward(f.map, f.target.order, a)


def section_lift(s: Section, a: MaximalLinkedSystem) -> MaximalLinkedSystem:
    """Lift a system on G/H to G along the section."""
    if a.n != s.hom.target.order:
        raise GroundSizeError("family is not over the quotient")
    return pushforward(s.pick, s.hom.source.order, a)


def _image_table(f: GroupHomomorphism):
    """Indices in lambda(target) of the images of all of lambda(source)."""
    src, tgt = superextension(f.source), superextension(f.target)
    return np.array([tgt.index_of(induced_map(f, a)) for a in src.elements], dtype=np.int64)


# -- checks -------------------------------------------------------------------


def check_homomorphism_law(f: GroupHomomorphism, pairs: int | None = None, seed: int = 0) -> dict:
    """lambda f(A*B) = lambda f(A) * lambda f(B); all pairs, or ``pairs`` random ones."""
    if f.source.order > TABLE_LIMIT or f.target.order > TABLE_LIMIT:
        raise CapacityError(f"homomorphism law check needs orders <= {TABLE_LIMIT}")
    src, tgt = superextension(f.source), superextension(f.target)
    img = _image_table(f)
    m = len(src)
    if pairs is None:
        a, b = np.divmod(np.arange(m * m, dtype=np.int64), m)
    else:
        rng = np.random.default_rng(seed)
        a = rng.integers(0, m, pairs)
        b = rng.integers(0, m, pairs)
    lhs = img[src.table[a, b]]
    rhs = tgt.table[img[a], img[b]]
    bad = np.nonzero(lhs != rhs)[0]
    return {
        "check": "homomorphism-law",
        "source": f.source.name,
        "target": f.target.name,
        "pairs": int(len(a)),
        "failures": [{"A": render(src.elements[a[i]]), "B": render(src.elements[b[i]])} for i in bad[:10]],
        "failure_count": int(len(bad)),
        "ok": len(bad) == 0,
    }


def _injective_on(f: GroupHomomorphism, members: Iterable[MaximalLinkedSystem]):
    seen: dict[int, MaximalLinkedSystem] = {}
    clash = None
    images = []
    for a in members:
        im = induced_map(f, a)
        images.append(im)
        if im.bits in seen and clash is None:
            clash = (seen[im.bits], a)
        seen.setdefault(im.bits, a)
    return clash is None, images, clash


def verify_lemma_inj(group: FiniteGroup, subgroup: Iterable[int], a: InclusionHyperspace | None = None,
                     section: Section | None = None, samples: int = 200, seed: int = 0) -> dict:
    """Injectivity of lambda(pi) on lambda(G)*A for an H-invariant system A on H.

    Also checks the identity L*A = lift(lambda pi(L))*A that drives it: over
    all of lambda(G) when G is small, else over ``samples`` random L.
    """
    h = frozenset(subgroup)
    if not group.is_normal(h):
        raise SpecError("subgroup is not normal", axiom="normal")
    hsize = len(h)
    if hsize % 2 == 0:
        raise SpecError("subgroup is not odd", axiom="odd")
    n = group.order
    hmask = sum(1 << x for x in h)
    if a is None:
        a = majority_on(h, n)
    if any(m & ~hmask for m in a.minimal):
        raise SpecError("family is not supported on the subgroup", axiom="support")
    if not is_H_invariant(a, group, h):
        raise SpecError("family is not H-invariant", axiom="H-invariant")
    a = MaximalLinkedSystem.of(a)
    q, pi = quotient(group, h)
    s = section or Section.minimal(pi)

    exhaustive = n <= TABLE_LIMIT
    if exhaustive:
        sx = superextension(group)
        ls = sx.elements
        col = sx.table[:, sx.index_of(a)]
        ideal = LeftIdeal(group, tuple(sx.elements[i] for i in np.unique(col)))
        prods = [sx.elements[i] for i in col]
    else:
        ls = sample_mls(group, samples, seed=seed)
        prods = [product(l, a, group) for l in ls]
        ideal = principal_left_ideal(a, group, "trace")
    identity_failures = []
    for l, la in zip(ls, prods):
        m = section_lift(s, induced_map(pi, l))
        if product(m, a, group) != la:
            identity_failures.append(render(l))
    injective, images, clash = _injective_on(pi, ideal.members)
    return {
        "check": "lemma-inj",
        "group": group.name,
        "subgroup": sorted(h),
        "A": render(a),
        "section": list(s.pick),
        "identity_checked": len(ls),
        "identity_exhaustive": exhaustive,
        "identity_failures": identity_failures[:10],
        "ideal_size": len(ideal),
        "ideal_strategy": "brute" if exhaustive else "trace",
        "image_size": len({im.bits for im in images}),
        "injective": injective,
        "clash": None if clash is None else [render(c) for c in clash],
        "ok": injective and not identity_failures,
    }


def _two_adic(m: int) -> tuple[int, int]:
    k = 0
    while m % 2 == 0:
        m //= 2
        k += 1
    return k, m


def _is_left_ideal_trace(members: Sequence[MaximalLinkedSystem], group: FiniteGroup) -> bool:
    want = {f.bits for f in members}
    return all({g.bits for g in principal_left_ideal(f, group, "trace")} == want for f in members)


def verify_minideal_tower(order: int, k: int, timeout: float | None = 120.0) -> dict:
    """Minimal left ideals of lambda(C_order) embed into lambda(C_{2^k}).

    ``order = 2^k * m`` with m odd.  For each minimal left ideal I (all of them
    when order <= 6, otherwise the one reached by traced descent from the
    majority system on the order-m subgroup) check that lambda q is injective
    on I, that lambda q(I) is a minimal left ideal of lambda(C_{2^k}), and that
    lambda q preserves products on I.
    """
    kk, m = _two_adic(order)
    if kk != k:
        raise SpecError(f"{order} is not 2^{k} times an odd number", axiom="2-adic")
    g = make_cyclic(order)
    q = cyclic_reduction(order, 1 << k)
    tgt = q.target
    if order <= TABLE_LIMIT:
        ideals = minimal_left_ideals(g, "brute")
        mode = "brute"
    else:
        if m > 1:
            h = unique_subgroup_of_order(g, m)
            seed = MaximalLinkedSystem.of(majority_on(h, order))
        else:
            # the principal ultrafilter would generate all of lambda(G)
            seed = seed_systems(g)[0]
        ideals = [descend_to_minimal(seed, g, timeout=timeout)]
        mode = "trace"
    if tgt.order <= TABLE_LIMIT:
        target_minimal = {frozenset(f.bits for f in i) for i in minimal_left_ideals(tgt, "brute")}
    else:
        target_minimal = None

    rows = []
    for ideal in ideals:
        injective, images, clash = _injective_on(q, ideal.members)
        image_bits = frozenset(im.bits for im in images)
        if target_minimal is not None:
            image_minimal = image_bits in target_minimal
        else:
            uniq = [MaximalLinkedSystem.from_bits(tgt.order, b, check=False) for b in sorted(image_bits)]
            image_minimal = _is_left_ideal_trace(uniq, tgt)
        by_bits = {f.bits: im for f, im in zip(ideal.members, images)}
        mismatches = 0
        for x in ideal.members:
            for y in ideal.members:
                if induced_map(q, product(x, y, g)) != product(by_bits[x.bits], by_bits[y.bits], tgt):
                    mismatches += 1
        rows.append({
            "size": len(ideal),
            "image_size": len(image_bits),
            "injective": injective,
            "image_is_minimal_left_ideal": image_minimal,
            "product_mismatches": mismatches,
        })
    ok = bool(rows) and all(r["injective"] and r["image_is_minimal_left_ideal"] and not r["product_mismatches"]
                            for r in rows)
    report = {
        "check": "minideal-tower",
        "order": order,
        "k": k,
        "target": tgt.name,
        "mode": mode,
        "ideals": rows,
        "target_minimal_ideal_sizes": sorted({len(i) for i in target_minimal}) if target_minimal else None,
        "note": "the periodicity step for sets on Z has no finite analogue; only finite stages are checked",
        "ok": ok,
    }
    return report


def verify_lemma_l1(f: GroupHomomorphism) -> dict:
    """Injective on every minimal left ideal of lambda(source), or on none."""
    ideals = minimal_left_ideals(f.source)
    flags = [_injective_on(f, i.members)[0] for i in ideals]
    seeded = any(i.seeded for i in ideals)
    return {
        "check": "lemma-l1",
        "source": f.source.name,
        "target": f.target.name,
        "ideals": len(ideals),
        "ideal_size": len(ideals[0]) if ideals else 0,
        "injective_on": flags,
        "outcome": "all" if all(flags) else ("none" if not any(flags) else "mixed"),
        "seeded": seeded,
        "ok": all(flags) or not any(flags),
    }


def tower_stages(k_max: int) -> list[GroupHomomorphism]:
    """Stage maps C_{2^{k+1}} -> C_{2^k} for k = 1..k_max-1."""
    if not 1 <= k_max <= 4:
        raise CapacityError("tower levels limited to 1..4 (C_16)", limit=4, requested=k_max)
    return [cyclic_reduction(1 << (k + 1), 1 << k) for k in range(1, k_max)]


def check_tower_coherence(k_max: int, samples: int = 5, seed: int = 0) -> dict:
    """Composites of stage maps agree with the induced map of the composite quotient."""
    stages = tower_stages(k_max)
    failures = []
    checked = 0
    for hi in range(2, k_max + 1):
        src_samples = sample_mls(1 << hi, samples, seed=seed + hi)
        for lo in range(1, hi):
            direct = cyclic_reduction(1 << hi, 1 << lo)
            path = [stages[step] for step in range(hi - 2, lo - 2, -1)]
            comp = path[0]
            for stage in path[1:]:
                comp = comp.then(stage)
            if comp.map != direct.map:
                failures.append({"from": hi, "to": lo, "reason": "group maps differ"})
            for a in src_samples:
                x = a
                for stage in path:
                    x = induced_map(stage, x)
                checked += 1
                if x != induced_map(direct, a):
                    failures.append({"from": hi, "to": lo, "A": render(a)})
    return {
        "check": "tower-coherence",
        "levels": k_max,
        "stages": [f"C{1 << (k + 1)}->C{1 << k}" for k in range(1, k_max)],
        "checked": checked,
        "failures": failures,
        "ok": not failures,
    }
