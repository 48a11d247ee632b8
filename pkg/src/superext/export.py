"""Deterministic exports: family lists, ideals, product tables."""
from __future__ import annotations

import csv
import io
import json
from typing import Sequence

from .errors import SpecError
from .hyperspace import InclusionHyperspace, render
from .semigroup import LeftIdeal, Superextension, product


class ExportError(SpecError):
    pass


def _jsonl(lines) -> bytes:
    return "".join(line + "\n" for line in lines).encode()


def families_jsonl(families: Sequence[InclusionHyperspace]) -> bytes:
    return _jsonl(render(f) for f in families)


def families_csv(families: Sequence[InclusionHyperspace]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["index", "n", "minimal_sets"])
    for i, f in enumerate(families):
        w.writerow([i, f.n, " ".join(hex(m) for m in f.minimal)])
    return buf.getvalue().encode()


def table_csv(sx: Superextension) -> bytes:
    """Rows and columns indexed by the canonical order of lambda(G)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in sx.table:
        w.writerow([int(v) for v in row])
    return buf.getvalue().encode()


def table_jsonl(sx: Superextension) -> bytes:
    lines = [json.dumps({"elements": [render(f) for f in sx.elements]}, separators=(",", ":"))]
    lines += [json.dumps([int(v) for v in row], separators=(",", ":")) for row in sx.table]
    return _jsonl(lines)


def ideal_dot(ideal: LeftIdeal) -> bytes:
    """Right-translation graph: an edge a -> a*s labelled s for all a, s in the ideal."""
    members = list(ideal.members)
    pos = {f.bits: i for i, f in enumerate(members)}
    out = ["digraph ideal {"]
    for i, f in enumerate(members):
        label = render(f).replace('"', '\\"')
        out.append(f'  n{i} [label="{label}"];')
    for i, a in enumerate(members):
        for j, s in enumerate(members):
            k = pos.get(product(a, s, ideal.group).bits)
            if k is None:
                raise ExportError("ideal is not closed under its own products")
            out.append(f'  n{i} -> n{k} [label="{j}"];')
    out.append("}")
    return ("\n".join(out) + "\n").encode()


def ideals_jsonl(ideals: Sequence[LeftIdeal]) -> bytes:
    return _jsonl(json.dumps(i.to_json(), separators=(",", ":"), sort_keys=True) for i in ideals)


def export(obj, fmt: str) -> bytes:
    if isinstance(obj, Superextension):
        if fmt == "csv":
            return table_csv(obj)
        if fmt == "jsonl":
            return table_jsonl(obj)
    elif isinstance(obj, LeftIdeal):
        if fmt == "dot":
            return ideal_dot(obj)
        if fmt == "jsonl":
            return ideals_jsonl([obj])
    elif isinstance(obj, (list, tuple)):
        if all(isinstance(x, LeftIdeal) for x in obj) and obj:
            if fmt == "jsonl":
                return ideals_jsonl(obj)
            if fmt == "dot" and len(obj) == 1:
                return ideal_dot(obj[0])
        elif all(isinstance(x, InclusionHyperspace) for x in obj):
            if fmt == "jsonl":
                return families_jsonl(obj)
            if fmt == "csv":
                return families_csv(obj)
    raise ExportError(f"cannot export {type(obj).__name__} as {fmt}", axiom="export-format")
