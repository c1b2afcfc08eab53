"""File formats: MatroidFile JSON, basis-indicator strings, JSONL records.

Basis-indicator strings list one character per k-subset of {0..n-1}: ``*``
for a basis and ``0`` for a non-basis.  Two subset orders are supported.
Both compare subsets by their elements sorted in decreasing order; ``colex``
takes those tuples ascending and ``revlex`` (the default) descending.  For
n = 4, k = 2:

    position   0   1   2   3   4   5
    revlex    23  13  03  12  02  01
    colex     01  02  12  03  13  23
"""

from __future__ import annotations

import itertools
import json
import math
from pathlib import Path
from typing import Iterable

from .core import (
    Matroid,
    SetFunction,
    SparsePavingMatroid,
    as_matroid,
    default_labels,
    fmt_set,
    mask_of,
    parse_set,
)

MATROID_FORMAT = "matext-matroid/1"
ORDERS = ("revlex", "colex")


class FormatError(ValueError):
    """Malformed input; ``line`` is 1-based when known."""

    def __init__(self, msg: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {msg}" if line is not None else msg)


def ksubsets(n: int, k: int, order: str = "revlex") -> list[int]:
    if order not in ORDERS:
        raise ValueError(f"unknown subset order {order!r}; use one of {ORDERS}")
    subs = [mask_of(c) for c in itertools.combinations(range(n), k)]
    key = lambda m: tuple(sorted((i for i in range(n) if m >> i & 1), reverse=True))  # noqa: E731
    return sorted(subs, key=key, reverse=(order == "revlex"))


def parse_indicator(n: int, k: int, text: str, order: str = "revlex", line: int | None = None) -> Matroid:
    text = text.strip()
    want = math.comb(n, k)
    if len(text) != want:
        raise FormatError(f"indicator string has length {len(text)}, expected C({n},{k}) = {want}", line)
    bad = set(text) - {"*", "0"}
    if bad:
        raise FormatError(f"unexpected characters {''.join(sorted(bad))!r} in indicator string", line)
    subs = ksubsets(n, k, order)
    bases = [s for s, ch in zip(subs, text) if ch == "*"]
    if not bases:
        raise FormatError("no bases", line)
    try:
        return Matroid.from_bases(n, bases)
    except ValueError as e:
        raise FormatError(f"not a matroid: {e}", line) from None


def format_indicator(m, order: str = "revlex") -> str:
    mat = as_matroid(m)
    k = mat.rank()
    v = mat.f.values
    return "".join("*" if v[s] == k else "0" for s in ksubsets(mat.n, k, order))


def read_indicator_file(path, order: str = "revlex") -> list[Matroid]:
    """Lines ``n k string`` (a leading ``# format`` header and blank lines are skipped)."""
    out = []
    for no, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FormatError("expected 'n k indicator'", no)
        try:
            n, k = int(parts[0]), int(parts[1])
        except ValueError:
            raise FormatError("n and k must be integers", no) from None
        out.append(parse_indicator(n, k, parts[2], order, no))
    return out


# -- MatroidFile JSON -----------------------------------------------------------

_DEFINING = ("circuit_hyperplanes", "bases", "rank_table")


def _set_from_json(x, labels, n: int) -> int:
    if isinstance(x, str):
        return parse_set(x, labels)
    m = 0
    for e in x:
        if not isinstance(e, int) or not 0 <= e < n:
            raise FormatError(f"element {e!r} outside 0..{n - 1}")
        m |= 1 << e
    return m


def matroid_from_dict(d: dict):
    """Build a matroid from a MatroidFile object.  Sparse paving input given by
    circuit-hyperplanes returns a SparsePavingMatroid."""
    present = [k for k in _DEFINING if k in d]
    if len(present) != 1:
        raise FormatError(f"need exactly one of {', '.join(_DEFINING)}; got {present or 'none'}")
    try:
        n = int(d["n"])
    except (KeyError, ValueError, TypeError):
        raise FormatError("missing or invalid 'n'") from None
    labels = tuple(d["labels"]) if d.get("labels") else default_labels(n)
    field = present[0]
    try:
        if field == "circuit_hyperplanes":
            k = int(d["rank"])
            chs = tuple(_set_from_json(c, labels, n) for c in d[field])
            return SparsePavingMatroid(n, k, chs, labels)
        if field == "bases":
            bases = [_set_from_json(b, labels, n) for b in d[field]]
            m = Matroid.from_bases(n, bases, labels)
        else:
            table = d[field]
            vals = [0] * (1 << n)
            seen = set()
            for key, val in table.items():
                s = parse_set(key, labels)
                vals[s] = int(val)
                seen.add(s)
            if len(seen) < (1 << n) - 1:
                raise FormatError(f"rank_table lists {len(seen)} subsets, expected all {1 << n}")
            m = Matroid(SetFunction(n, tuple(vals)), labels)
    except FormatError:
        raise
    except (ValueError, KeyError) as e:
        raise FormatError(str(e)) from None
    if "rank" in d and m.rank() != int(d["rank"]):
        raise FormatError(f"declared rank {d['rank']} but the matroid has rank {m.rank()}")
    return m


def matroid_to_dict(m, name: str = "") -> dict:
    if isinstance(m, SparsePavingMatroid):
        d = {"format": MATROID_FORMAT, "name": name, "n": m.n, "rank": m.k,
             "circuit_hyperplanes": [[i for i in range(m.n) if c >> i & 1] for c in m.chs]}
        labels = m.labels
    else:
        mat = as_matroid(m)
        d = {"format": MATROID_FORMAT, "name": name, "n": mat.n, "rank": mat.rank(),
             "bases": [[i for i in range(mat.n) if b >> i & 1] for b in mat.bases()]}
        labels = mat.labels
    if tuple(labels) != default_labels(len(labels)):
        d["labels"] = list(labels)
    return d


def load_matroid_json(path) -> list:
    """A MatroidFile: one object, a list of objects, or JSON lines."""
    text = Path(path).read_text()
    try:
        data = json.loads(text)
        items = data if isinstance(data, list) else [data]
        return [matroid_from_dict(x) for x in items]
    except json.JSONDecodeError:
        pass
    out = []
    for no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as e:
            raise FormatError(f"invalid JSON: {e.msg}", no) from None
        try:
            out.append(_from_record(obj))
        except FormatError as e:
            raise FormatError(str(e), no) from None
    return out


def _from_record(obj: dict):
    """MatroidFile objects, or census records that carry ``chs`` strings."""
    if any(k in obj for k in _DEFINING):
        return matroid_from_dict(obj)
    if "chs" in obj and obj.get("format", "").startswith("matext-ttt"):
        from .catalog.named import TTT_LABELS
        return SparsePavingMatroid(9, 5, tuple(parse_set(c, TTT_LABELS) for c in obj["chs"]), TTT_LABELS)
    if "chs" in obj:
        n, k = int(obj["n"]), int(obj["k"])
        labels = default_labels(n)
        return SparsePavingMatroid(n, k, tuple(parse_set(c, labels) for c in obj["chs"]))
    raise FormatError("record defines no matroid")


def ingest(path, format: str = "json", order: str = "revlex") -> list:
    if format == "json":
        return load_matroid_json(path)
    if format in ("revlex", "indicator"):
        return read_indicator_file(path, order)
    raise ValueError(f"unknown format {format!r}")


def export(m, format: str = "json", order: str = "revlex", name: str = "") -> str:
    if format == "json":
        return json.dumps(matroid_to_dict(m, name), sort_keys=True)
    if format in ("revlex", "indicator"):
        mat = as_matroid(m)
        return f"{mat.n} {mat.rank()} {format_indicator(mat, order)}"
    raise ValueError(f"unknown format {format!r}")


def write_jsonl(records: Iterable[dict], path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r, sort_keys=True) + "\n")


def sparse_paving_record(m: SparsePavingMatroid, canonical: str) -> dict:
    return {"format": "matext-sparse-paving/1", "n": m.n, "k": m.k,
            "chs": [fmt_set(c, default_labels(m.n)) for c in m.chs], "ch_count": len(m.chs),
            "canonical": canonical}
