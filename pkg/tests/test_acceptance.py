"""Acceptance criteria, one PASS/FAIL line each.

Run under pytest (the lines go straight to the terminal) or as a script.
"""
import time

import pytest

from conftest import EXTENDED
from superext.enumeration import count_mls, enumerate_maximal_invariant_linked, enumerate_mls
from superext.groups import cyclic_reduction, direct_product, make_cyclic
from superext.hyperspace import MaximalLinkedSystem, at_least
from superext.oracles import count_mls_by_pairs
from superext.semigroup import (
    check_associativity,
    check_narist,
    check_rectangular_invariant,
    check_stideal,
    check_structure,
    check_trace_vs_brute,
    check_upset_left_ideal,
    superextension,
)
from superext.suite import render_bundle, run_verify_all
from superext.tower import check_homomorphism_law, verify_lemma_l1, verify_minideal_tower

RESULTS = {}


@pytest.fixture
def report(capsys):
    def emit(name, ok, detail):
        RESULTS[name] = ok
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok

    return emit


def test_c01_mls_counts(report):
    want = [1, 2, 4, 12, 81, 2646]
    got, oracle = [], []
    t6 = 0.0
    for n in range(1, 7):
        t = time.perf_counter()
        got.append(len(enumerate_mls(n)))
        if n == 6:
            t6 = time.perf_counter() - t
        oracle.append(count_mls_by_pairs(n))
    t = time.perf_counter()
    c7 = count_mls(7)
    t7 = time.perf_counter() - t
    o7 = count_mls_by_pairs(7) if EXTENDED else None
    ok = got == want == oracle and t6 < 60 and c7 == 1422564 and (o7 is None or o7 == c7)
    detail = f"counts {got}, oracle {oracle}, n=6 in {t6:.2f}s; n=7 count {c7} in {t7:.1f}s"
    detail += f", oracle {o7}" if o7 is not None else " (oracle run skipped; set SUPEREXT_EXTENDED=1)"
    assert report("1 MLS counts", ok, detail)


def test_c02_associativity(report):
    t = time.perf_counter()
    a = check_associativity(make_cyclic(4))
    b = check_associativity(make_cyclic(6), triples=100_000, seed=0)
    dt = time.perf_counter() - t
    ok = a["ok"] and a["triples"] == 1728 and b["ok"] and b["triples"] == 100_000 and dt < 120
    assert report("2 associativity", ok,
                  f"C4 {a['triples']} triples {a['failures']} failures, C6 {b['triples']} random triples "
                  f"{b['failures']} failures, {dt:.1f}s including table builds")


def test_c03_odd_singletons(report):
    lines, ok = [], True
    for n in (3, 5, 7):
        r = check_stideal(make_cyclic(n))
        maj = MaximalLinkedSystem.majority(n)
        good = (r["ok"] and r["ideal_sizes"] == [1] and r["right_zeros"] == r["invariant_mls"]
                and len(r["invariant_mls"]) >= 1 and maj.render() in r["right_zeros"])
        ok &= good
        lines.append(f"C{n}: {r['minimal_left_ideals']} singleton ideals, {len(r['right_zeros'])} right zeros")
    for n in (2, 4, 6):
        r = check_stideal(make_cyclic(n))
        good = r["ok"] and not r["invariant_mls"] and 1 not in r["ideal_sizes"]
        ok &= good
        lines.append(f"C{n}: no invariant MLS, ideal sizes {r['ideal_sizes']}")
    assert report("3 odd groups and singleton ideals", ok, "; ".join(lines))


def test_c04_upset_left_ideal(report):
    total, ok = 0, True
    for n in range(2, 8):
        g = make_cyclic(n)
        for l0 in enumerate_maximal_invariant_linked(g):
            r = check_upset_left_ideal(l0, g)
            total += 1
            ok &= r["ok"]
    l0s = enumerate_maximal_invariant_linked(make_cyclic(4))
    c4 = check_upset_left_ideal(l0s[0], make_cyclic(4))
    ok &= l0s == [at_least(4, 3)] and c4["upset_size"] == 8
    assert report("4 up-sets are left ideals", ok,
                  f"{total} maximal invariant systems on C2..C7 closed; C4 unique L0 with |upset| = {c4['upset_size']}")


def test_c05_narist(report):
    groups = [make_cyclic(4), make_cyclic(6), make_cyclic(8), direct_product(make_cyclic(2), make_cyclic(2))]
    names = ["C4", "C6", "C8", "C2xC2"]
    lines, ok = [], True
    for name, g in zip(names, groups):
        reps = [check_narist(l0, g) for l0 in enumerate_maximal_invariant_linked(g)]
        gap = sum(r["gap_size"] for r in reps)
        fails = sum(len(r["failures"]) for r in reps)
        ok &= fails == 0 and bool(reps)
        lines.append(f"{name}: {len(reps)} L0, {gap} sets, {fails} failures")
    assert report("5 xA = G minus A witnesses", ok, "; ".join(lines))


def test_c06_minimal_ideals_c6(report):
    r = verify_minideal_tower(6, 1)
    sizes = {i["size"] for i in r["ideals"]}
    ok = r["ok"] and sizes == {2} and all(i["image_size"] == 2 and not i["product_mismatches"] for i in r["ideals"])
    l1a = verify_lemma_l1(cyclic_reduction(6, 2))
    l1b = verify_lemma_l1(cyclic_reduction(4, 2))
    ok &= l1a["ok"] and l1b["ok"]
    assert report("6 minimal left ideals of C6 onto C2", ok,
                  f"{len(r['ideals'])} ideals of size {sorted(sizes)}, bijective and product-preserving; "
                  f"dichotomy C6->C2 '{l1a['outcome']}', C4->C2 '{l1b['outcome']}'")


def test_c06_stretch_c12(report):
    t = time.perf_counter()
    try:
        r = verify_minideal_tower(12, 2, timeout=120)
        state = r["ok"]
        detail = (f"ideal size {r['ideals'][0]['size']} via trace, injective into C4, "
                  f"image size {r['ideals'][0]['image_size']} = minimal ideal size of lambda(C4); "
                  f"{time.perf_counter() - t:.1f}s")
    except Exception as exc:  # budget or capacity: non-blocking
        state = None
        detail = f"not completed within budget ({exc})"
    report("6 stretch C12 -> C4 (non-blocking)", state is not False, detail)
    assert state is not False


def test_c07_trace_vs_brute(report):
    lines, ok = [], True
    for n in (4, 5, 6):
        r = check_trace_vs_brute(make_cyclic(n), samples=20, seed=0)
        ok &= r["ok"] and r["samples"] == 20
        lines.append(f"C{n}: {len(r['discrepancies'])} discrepancies")
    assert report("7 trace strategy equals brute force", ok, "; ".join(lines))


def test_c08_homomorphism_law(report):
    a = check_homomorphism_law(cyclic_reduction(4, 2))
    b = check_homomorphism_law(cyclic_reduction(6, 2), pairs=10_000, seed=0)
    c = check_homomorphism_law(cyclic_reduction(6, 3), pairs=10_000, seed=0)
    ok = a["ok"] and a["pairs"] == 144 and b["ok"] and c["ok"] and b["pairs"] == c["pairs"] == 10_000
    assert report("8 homomorphism law", ok,
                  f"C4->C2 {a['pairs']} pairs, C6->C2 {b['pairs']}, C6->C3 {c['pairs']}; "
                  f"failures {a['failure_count'] + b['failure_count'] + c['failure_count']}")


def test_c09_rectangularity(report):
    lines, ok = [], True
    for n in (2, 3, 4):
        r = check_rectangular_invariant(make_cyclic(n))
        ok &= r["ok"]
        lines.append(f"C{n}: {r['invariant_hyperspaces']} hyperspaces, {len(r['failures'])} failures")
    assert report("9 rectangularity", ok, "; ".join(lines))


def test_c10_structure(report):
    lines, ok = [], True
    for n in range(1, 7):
        r = check_structure(make_cyclic(n))
        ok &= r["ok"]
        lines.append(f"C{n}: {r['minimal_left_ideals']}x{r['ideal_size']}, |K|={r['K_size']}")
    assert report("10 structure of minimal left ideals", ok, "; ".join(lines))


def test_c11_determinism(report, tmp_path):
    s1, b1 = run_verify_all(jobs=1, out_dir=tmp_path / "j1")
    superextension.cache_clear()
    s2, b2 = run_verify_all(jobs=2, out_dir=tmp_path / "j2")
    f1, f2 = render_bundle(b1), render_bundle(b2)
    same = f1 == f2 and all((tmp_path / "j1" / k).read_bytes() == (tmp_path / "j2" / k).read_bytes() for k in f1)
    ok = same and s1 == s2 == 0
    assert report("11 determinism", ok, f"{len(f1)} report files byte-identical for jobs=1 and jobs=2; "
                  f"exit status {s1}/{s2}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
