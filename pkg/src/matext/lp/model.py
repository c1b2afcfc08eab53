"""Linear constraints for polymatroid extension chains.

Variables are the values g(S) for nonempty subsets S of the augmented ground
set.  Values on subsets of the base ground set are pinned to the base rank
function; every other value is free.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..core import Polymatroid, SetFunction, elements, fmt_set, full_mask, popcount, submasks

MAX_AUGMENTED = 13


@dataclass(frozen=True)
class ExtensionStep:
    """One polymatroid extension step.

    ``CI``/``AK`` use ``x`` and ``y`` and add one element.  ``CL`` copies ``y``
    over ``x`` (the copy is conditionally independent of ``x2 | y`` given
    ``x``) and adds ``|y|`` elements.
    """

    kind: str
    x: int
    y: int
    x2: int = 0

    def __post_init__(self):
        kind = self.kind.upper()
        if kind not in ("CI", "AK", "CL"):
            raise ValueError(f"unknown step kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "CL" and self.x & self.y:
            raise ValueError("copy-lemma step needs the copied set disjoint from X1")

    @property
    def new_count(self) -> int:
        return popcount(self.y) if self.kind == "CL" else 1

    def describe(self, labels) -> str:
        if self.kind == "CL":
            return f"CL({fmt_set(self.x, labels)}; {fmt_set(self.x2, labels)}; {fmt_set(self.y, labels)})"
        return f"{self.kind}({fmt_set(self.x, labels)}, {fmt_set(self.y, labels)})"


@dataclass
class Row:
    """sum(coef * g(mask)) <relation> rhs, with relation '>=' or '='."""

    terms: dict
    rel: str
    rhs: object = 0
    tag: str = ""


def _add(terms: dict, mask: int, c):
    if mask == 0:
        return
    terms[mask] = terms.get(mask, 0) + c
    if terms[mask] == 0:
        del terms[mask]


def cond_terms(x: int, z: int, sign=1) -> dict:
    """g(X|Z) as a term dict."""
    t: dict = {}
    _add(t, x | z, sign)
    _add(t, z, -sign)
    return t


def mutual_terms(x: int, y: int, z: int, sign=1) -> dict:
    t: dict = {}
    _add(t, x | z, sign)
    _add(t, y | z, sign)
    _add(t, x | y | z, -sign)
    _add(t, z, -sign)
    return t


def _merge(*parts: dict) -> dict:
    out: dict = {}
    for p in parts:
        for k, c in p.items():
            _add(out, k, c)
    return out


def shannon_arrays(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Elemental inequalities on n elements as (masks, coefs), each (R, 4).

    Rows: monotonicity g(N) - g(N-i) >= 0, then for i < j and K in N-{i,j}:
    g(Ki) + g(Kj) - g(Kij) - g(K) >= 0.
    """
    top = full_mask(n)
    rows_m = []
    rows_c = []
    for i in range(n):
        rows_m.append((top, top & ~(1 << i), 0, 0))
        rows_c.append((1, -1, 0, 0))
    for i in range(n):
        for j in range(i + 1, n):
            bi, bj = 1 << i, 1 << j
            rest = top & ~bi & ~bj
            ks = np.fromiter(submasks(rest), dtype=np.int64)
            m = np.stack([ks | bi, ks | bj, ks | bi | bj, ks], axis=1)
            rows_m.append(m)
            rows_c.append(np.tile(np.array([1, 1, -1, -1], dtype=np.int64), (len(ks), 1)))
    head_m = np.array(rows_m[:n], dtype=np.int64).reshape(-1, 4)
    head_c = np.array(rows_c[:n], dtype=np.int64).reshape(-1, 4)
    masks = np.concatenate([head_m] + rows_m[n:]) if n > 1 else head_m
    coefs = np.concatenate([head_c] + rows_c[n:]) if n > 1 else head_c
    return masks, coefs


def build_shannon(n: int) -> list[Row]:
    """Elemental Shannon rows as explicit Row objects (small n)."""
    masks, coefs = shannon_arrays(n)
    out = []
    for mr, cr in zip(masks.tolist(), coefs.tolist()):
        t: dict = {}
        for m, c in zip(mr, cr):
            if c:
                _add(t, m, c)
        out.append(Row(t, ">=", 0, "shannon"))
    return out


def build_step_rows(step: ExtensionStep, n_before: int) -> list[Row]:
    """Equality rows for ``step`` whose new elements are n_before, n_before+1, ..."""
    avail = full_mask(n_before)
    for s in (step.x, step.y, step.x2):
        if s & ~avail:
            raise ValueError("step refers to elements outside the current ground set")
    x, y = step.x, step.y
    rows = []
    if step.kind == "CI":
        z = 1 << n_before
        rows.append(Row(cond_terms(z, x), "=", 0, "CI z|X"))
        rows.append(Row(cond_terms(z, y), "=", 0, "CI z|Y"))
        rows.append(Row(mutual_terms(x, y, z), "=", 0, "CI X:Y|z"))
    elif step.kind == "AK":
        z = 1 << n_before
        rows.append(Row(cond_terms(z, x), "=", 0, "AK z|X"))
        for xp in submasks(x):
            if xp == 0:
                continue
            t = _merge(cond_terms(xp, z), cond_terms(xp, y, -1))
            if t:
                rows.append(Row(t, "=", 0, "AK X'|z"))
    else:
        ys = elements(y)
        phi = {e: n_before + i for i, e in enumerate(ys)}
        zmask = 0
        for e in ys:
            zmask |= 1 << phi[e]
        x1 = x
        for s in submasks(x1):
            for t in submasks(y):
                if s | t == 0 or t == 0:
                    continue
                img = 0
                for e in elements(t):
                    img |= 1 << phi[e]
                terms = _merge({s | img: 1}, {s | t: -1})
                if terms:
                    rows.append(Row(terms, "=", 0, "CL copy"))
        rows.append(Row(mutual_terms(zmask, step.x2 | y, x1), "=", 0, "CL Z:X2Y|X1"))
    return rows


@dataclass
class LPModel:
    base: Polymatroid
    steps: list
    n: int  # augmented ground set size
    step_rows: list = field(default_factory=list)
    labels: tuple = ()

    @property
    def n_base(self) -> int:
        return self.base.n

    @property
    def base_mask(self) -> int:
        return full_mask(self.base.n)

    def pinned(self, mask: int) -> bool:
        return mask & ~self.base_mask == 0

    def free_masks(self) -> np.ndarray:
        allm = np.arange(1, 1 << self.n, dtype=np.int64)
        return allm[(allm & ~self.base_mask) != 0]

    @property
    def variable_count(self) -> int:
        return (1 << self.n) - (1 << self.n_base)

    @property
    def shannon_count(self) -> int:
        n = self.n
        return n + n * (n - 1) // 2 * (1 << max(n - 2, 0))

    @property
    def row_count(self) -> int:
        return self.shannon_count + len(self.step_rows)

    def shannon(self):
        return _shannon_cached(self.n)

    def row(self, idx: int) -> Row:
        """Row by global index: Shannon rows first, then step rows."""
        ns = self.shannon_count
        if idx >= ns:
            return self.step_rows[idx - ns]
        masks, coefs = _shannon_cached(self.n)
        t: dict = {}
        for m, c in zip(masks[idx].tolist(), coefs[idx].tolist()):
            if c:
                _add(t, m, c)
        return Row(t, ">=", 0, "shannon")

    def dump(self) -> str:
        """Text listing: one row per line as ``set:coef ... REL rhs``."""
        lab = self.labels
        out = [f"# matext-lp v1 n={self.n} base={self.n_base} vars={self.variable_count} rows={self.row_count}"]
        fv = self.base.f.values
        for m in range(1, 1 << self.n_base):
            out.append(f"pin {fmt_set(m, lab)} = {fv[m]}")
        for i in range(self.row_count):
            r = self.row(i)
            body = " ".join(f"{fmt_set(m, lab)}:{c}" for m, c in sorted(r.terms.items()))
            out.append(f"{body} {r.rel} {r.rhs}")
        return "\n".join(out) + "\n"


_SHANNON_CACHE: dict = {}


def _shannon_cached(n: int):
    if n not in _SHANNON_CACHE:
        _SHANNON_CACHE.clear()
        _SHANNON_CACHE[n] = shannon_arrays(n)
    return _SHANNON_CACHE[n]


def new_labels(base_labels, steps) -> tuple:
    labels = list(base_labels)
    c = 1
    for st in steps:
        for _ in range(st.new_count):
            name = f"z{c}"
            while name in labels:
                c += 1
                name = f"z{c}"
            labels.append(name)
            c += 1
    return tuple(labels)


def build_model(base: Polymatroid, steps: Sequence[ExtensionStep], max_n: int = MAX_AUGMENTED) -> LPModel:
    n = base.n
    rows = []
    for st in steps:
        rows.extend(build_step_rows(st, n))
        n += st.new_count
    if n > max_n:
        raise ValueError(f"augmented ground set of {n} elements exceeds the cap of {max_n}")
    return LPModel(base, list(steps), n, rows, new_labels(base.labels, steps))


def evaluate(terms: dict, g) -> Fraction:
    return sum((c * g(m) for m, c in terms.items()), 0)


def witness_function(model: LPModel, free_values: dict) -> SetFunction:
    fv = model.base.f.values
    bm = model.base_mask
    vals = []
    for m in range(1 << model.n):
        vals.append(fv[m] if m & ~bm == 0 else free_values[m])
    return SetFunction(model.n, tuple(vals))
