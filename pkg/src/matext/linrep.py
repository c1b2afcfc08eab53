"""Matroids of matrices over prime fields, by exact rank computation."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .core import Matroid, SetFunction, SparsePavingMatroid, as_matroid, fmt_set


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


@dataclass(frozen=True)
class PrimeFieldMatrix:
    """An r x n matrix over F_p; column j represents ground element j."""

    p: int
    rows: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        rows = tuple(tuple(int(x) % self.p for x in r) for r in self.rows)
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        if self.labels is not None and len(self.labels) != self.n:
            raise ValueError(f"{len(self.labels)} labels for {self.n} columns")

    @property
    def n(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def column(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    @classmethod
    def from_json(cls, text: str) -> "PrimeFieldMatrix":
        d = json.loads(text)
        labels = d.get("column_labels")
        return cls(int(d["p"]), tuple(tuple(r) for r in d["rows"]), tuple(labels) if labels else None)

    def to_json(self) -> str:
        d = {"format": "matext-matrix/1", "p": self.p, "rows": [list(r) for r in self.rows]}
        if self.labels:
            d["column_labels"] = list(self.labels)
        return json.dumps(d)


def rank_mod_p(vectors: Sequence[Sequence[int]], p: int) -> int:
    """Rank of a list of vectors over F_p (row reduction on a copy)."""
    rows = [list(v) for v in vectors if any(x % p for x in v)]
    if not rows:
        return 0
    width = len(rows[0])
    rank = 0
    for c in range(width):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % p), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        rows[rank] = [x * inv % p for x in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % p:
                f = rows[i][c]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def matrix_matroid(a: PrimeFieldMatrix) -> Matroid:
    """The column matroid of ``a``; rank of every subset computed exactly.

    Ranks are built incrementally: adding column j to a set raises the rank
    by one exactly when j leaves the span, tracked by a reduced basis per set.
    """
    n, p = a.n, a.p
    cols = [a.column(j) for j in range(n)]
    # reduced row-echelon basis for each subset, grown from subset minus its top element
    basis: list = [None] * (1 << n)
    basis[0] = []
    values = [0] * (1 << n)
    for mask in range(1, 1 << n):
        top = mask.bit_length() - 1
        prev = basis[mask ^ (1 << top)]
        v = list(cols[top])
        for piv, row in prev:
            if v[piv]:
                f = v[piv]
                v = [(x - f * y) % p for x, y in zip(v, row)]
        lead = next((i for i, x in enumerate(v) if x), None)
        if lead is None:
            basis[mask] = prev
            values[mask] = values[mask ^ (1 << top)]
        else:
            inv = pow(v[lead], -1, p)
            v = [x * inv % p for x in v]
            new = []
            for piv, row in prev:
                if row[lead]:
                    f = row[lead]
                    row = [(x - f * y) % p for x, y in zip(row, v)]
                new.append((piv, row))
            new.append((lead, v))
            basis[mask] = new
            values[mask] = values[mask ^ (1 << top)] + 1
    return Matroid(SetFunction(n, tuple(values)), a.labels)


@dataclass
class RepresentationCheck:
    ok: bool
    mismatch: int | None = None  # first subset (by mask) where ranks differ
    matrix_rank: int | None = None
    matroid_rank: int | None = None

    def describe(self, labels=None) -> str:
        if self.ok:
            return "representation verified"
        return (f"rank of {fmt_set(self.mismatch, labels)} is {self.matrix_rank} "
                f"in the matrix and {self.matroid_rank} in the matroid")


def verify_representation(a: PrimeFieldMatrix, m) -> RepresentationCheck:
    """Does the column matroid of ``a`` equal ``m`` (same labeling)?"""
    mat = as_matroid(m) if isinstance(m, SparsePavingMatroid) else m
    if a.n != mat.n:
        raise ValueError(f"matrix has {a.n} columns, matroid has {mat.n} elements")
    got = matrix_matroid(a).f.values
    want = mat.f.values
    for mask in range(1 << a.n):
        if got[mask] != want[mask]:
            return RepresentationCheck(False, mask, got[mask], want[mask])
    return RepresentationCheck(True)


# columns in the point order (-1,-1), (-1,0), ..., (1,1)
T9C_ROWS = (
    (1, 0, 0, 0, 0, 1, 1, 1, 1),
    (0, 1, 0, 0, 0, 1, -1, -1, 1),
    (0, 0, 1, 0, 0, 1, -1, 1, 0),
    (0, 0, 0, 1, 0, 1, 1, 0, -1),
    (0, 0, 0, 0, 1, 1, 0, -1, -1),
)


def t9c_matrix(p: int = 3) -> PrimeFieldMatrix:
    from .catalog.named import TTT_LABELS
    return PrimeFieldMatrix(p, T9C_ROWS, TTT_LABELS)
