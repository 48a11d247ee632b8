"""The verify-all bundle: every finite-scale check, grouped by theorem."""
from __future__ import annotations

import json
import logging
from pathlib import Path

from .enumeration import count_mls, enumerate_maximal_invariant_linked, enumerate_mls
from .errors import BudgetExceeded, CapacityError, SpecError
from .groups import cyclic_reduction, group_from_spec, make_cyclic, unique_subgroup_of_order
from .oracles import count_mls_by_pairs
from .semigroup import (
    TABLE_LIMIT,
    check_associativity,
    check_narist,
    check_rectangular_invariant,
    check_stideal,
    check_structure,
    check_trace_vs_brute,
    check_upset_left_ideal,
    superextension,
)
from .tower import (
    _two_adic,
    check_homomorphism_law,
    check_tower_coherence,
    verify_lemma_inj,
    verify_lemma_l1,
    verify_minideal_tower,
)

log = logging.getLogger(__name__)

DEFAULT_CONFIG = {
    "groups": ["C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C12", "C2xC2"],
    "exhaustive": False,
    "tower_levels": 4,
    "random_triples": 100_000,
    "random_pairs": 10_000,
    "trace_samples": 20,
    "seed": 0,
}

SECTIONS = ("enumeration", "associativity", "structure", "trace", "stideal", "upset", "narist",
            "rectangular", "homomorphism", "lemma_inj", "minideal", "l1", "tower")


def load_config(path=None) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        try:
            user = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SpecError(f"config is not valid JSON: {exc}", axiom="syntax") from None
        if not isinstance(user, dict):
            raise SpecError("config must be a JSON object", axiom="syntax")
        cfg.update(user)
    return cfg


def _divisors(n):
    return [d for d in range(1, n + 1) if n % d == 0]


def run_checks(cfg: dict, jobs: int | None = None, budget: float | None = 120.0) -> dict:
    groups = [group_from_spec(spec) for spec in cfg["groups"]]
    if cfg.get("exhaustive"):
        for g in groups:
            if g.order > 7:
                raise CapacityError(f"exhaustive mode is limited to order 7, got {g.name}", limit=7,
                                    requested=g.order)
    seed = int(cfg.get("seed", 0))
    bundle: dict[str, list] = {name: [] for name in SECTIONS}
    for g in groups:
        n = g.order
        log.info("checking %s", g.name)
        if n <= TABLE_LIMIT or (n == 7 and cfg.get("exhaustive")):
            main = len(enumerate_mls(g, jobs=jobs)) if n <= TABLE_LIMIT else count_mls(g, jobs=jobs)
            oracle = count_mls_by_pairs(n)
            bundle["enumeration"].append({"check": "mls-count", "order": n, "count": main,
                                          "oracle": oracle, "ok": main == oracle})
        if n <= TABLE_LIMIT:
            m = len(superextension(g))
            triples = None if m ** 3 <= 2_000_000 else int(cfg["random_triples"])
            bundle["associativity"].append(check_associativity(g, triples, seed=seed))
            bundle["structure"].append(check_structure(g))
            if n >= 2:
                bundle["trace"].append(check_trace_vs_brute(g, int(cfg["trace_samples"]), seed=seed))
        if n <= 7:
            bundle["stideal"].append(check_stideal(g))
            for l0 in enumerate_maximal_invariant_linked(g):
                bundle["upset"].append(check_upset_left_ideal(l0, g))
        if g.is_abelian and n <= 8:
            for l0 in enumerate_maximal_invariant_linked(g):
                bundle["narist"].append(check_narist(l0, g))
        if n <= 4:
            bundle["rectangular"].append(check_rectangular_invariant(g))
        if not g.is_cyclic or g != make_cyclic(n):
            continue
        # cyclic groups only from here on
        for d in _divisors(n):
            if d in (1, n) and n > 1:
                if d == 1 and n <= TABLE_LIMIT:
                    bundle["l1"].append(verify_lemma_l1(cyclic_reduction(n, 1)))
                continue
            if n <= TABLE_LIMIT:
                f = cyclic_reduction(n, d)
                m = len(superextension(g))
                pairs = None if m * m <= 100_000 else int(cfg["random_pairs"])
                bundle["homomorphism"].append(check_homomorphism_law(f, pairs, seed=seed))
                bundle["l1"].append(verify_lemma_l1(f))
        for m in _divisors(n):
            if m % 2 == 1 and 1 < m < n and n <= 12:
                h = unique_subgroup_of_order(g, m)
                bundle["lemma_inj"].append(verify_lemma_inj(g, h, seed=seed))
        if n % 2 == 0 and n <= 12:
            k, _ = _two_adic(n)
            stretch = n > TABLE_LIMIT
            try:
                rep = verify_minideal_tower(n, k, timeout=budget)
            except BudgetExceeded as exc:
                rep = {"check": "minideal-tower", "order": n, "k": k, "partial": True,
                       "count": exc.count, "ok": None}
            rep["stretch"] = stretch
            bundle["minideal"].append(rep)
    levels = int(cfg.get("tower_levels", 0))
    if levels >= 2:
        bundle["tower"].append(check_tower_coherence(levels, seed=seed))
    return bundle


def summarize(bundle: dict) -> dict:
    out = {}
    for name, reports in bundle.items():
        blocking = [r for r in reports if not (r.get("stretch") and r.get("ok") is None)]
        out[name] = {"reports": len(reports), "ok": all(r.get("ok") is True for r in blocking)}
    return out


def render_bundle(bundle: dict) -> dict[str, bytes]:
    files = {f"{name}.json": (json.dumps(reports, sort_keys=True, indent=2) + "\n").encode()
             for name, reports in bundle.items()}
    files["summary.json"] = (json.dumps(summarize(bundle), sort_keys=True, indent=2) + "\n").encode()
    return files


def run_verify_all(cfg: dict | None = None, out_dir=None, fixtures=None, jobs: int | None = None,
                   budget: float | None = 120.0) -> tuple[int, dict]:
    """Run every check; return (exit status, bundle).  Status 1 on any failure.

    With ``fixtures``, the first run stores each report file there and later
    runs compare against the stored bytes.
    """
    cfg = load_config() if cfg is None else {**DEFAULT_CONFIG, **cfg}
    bundle = run_checks(cfg, jobs=jobs, budget=budget)
    files = render_bundle(bundle)
    status = 0 if all(v["ok"] for v in summarize(bundle).values()) else 1
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in files.items():
            (out / name).write_bytes(data)
    if fixtures is not None:
        fx = Path(fixtures)
        fx.mkdir(parents=True, exist_ok=True)
        for name, data in files.items():
            path = fx / name
            if path.exists():
                if path.read_bytes() != data:
                    log.error("fixture mismatch: %s", name)
                    status = 1
            else:
                path.write_bytes(data)
    return status, bundle
