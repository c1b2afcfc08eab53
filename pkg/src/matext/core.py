"""Set functions, polymatroids and matroids on small ground sets.

Subsets of the ground set ``{0, ..., n-1}`` are bitmasks; a set function is a
dense tuple of exact values (``int`` or ``Fraction``) indexed by mask.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

MAX_GROUND = 16

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


def bit(i: int) -> int:
    return 1 << i


def popcount(x: int) -> int:
    return x.bit_count()


def elements(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def full_mask(n: int) -> int:
    return (1 << n) - 1


def submasks(mask: int) -> Iterable[int]:
    """All submasks of ``mask``, in increasing order."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def default_labels(n: int) -> tuple[str, ...]:
    return tuple(_DIGITS[i] for i in range(n))


def _exact(v) -> int | Fraction:
    if isinstance(v, bool):
        return int(v)
    if isinstance(v, (int, Fraction)):
        return v
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"set function values must be exact rationals, got {type(v).__name__}")


@dataclass(frozen=True)
class SetFunction:
    n: int
    values: tuple

    def __post_init__(self):
        if not 0 <= self.n <= MAX_GROUND:
            raise ValueError(f"ground set size {self.n} outside 0..{MAX_GROUND}")
        if len(self.values) != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} values, got {len(self.values)}")
        object.__setattr__(self, "values", tuple(_exact(v) for v in self.values))

    def __call__(self, mask: int):
        return self.values[mask]

    @classmethod
    def from_callable(cls, n: int, fn) -> "SetFunction":
        return cls(n, tuple(fn(m) for m in range(1 << n)))

    def cond(self, x: int, z: int):
        """f(X|Z) = f(XZ) - f(Z)."""
        v = self.values
        return v[x | z] - v[z]

    def mutual(self, x: int, y: int, z: int = 0):
        """f(X:Y|Z) = f(XZ) + f(YZ) - f(XYZ) - f(Z)."""
        v = self.values
        return v[x | z] + v[y | z] - v[x | y | z] - v[z]

    @property
    def ground(self) -> int:
        return full_mask(self.n)

    def is_integer(self) -> bool:
        return all(isinstance(v, int) or v.denominator == 1 for v in self.values)


@dataclass(frozen=True)
class Violation:
    axiom: str  # "normalization" | "monotonicity" | "submodularity" | "integrality" | "unit-singleton"
    sets: tuple[int, ...]
    amount: object = None


@dataclass(frozen=True)
class AxiomReport:
    violations: list
    is_matroid: bool

    @property
    def valid(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.valid


def validate_polymatroid(f: SetFunction, limit: int | None = None) -> AxiomReport:
    """Check normalization, monotonicity and submodularity via the elemental
    inequalities, which generate the full set of polymatroid axioms.

    Violations record the witness subsets: ``(N - i, N)`` for monotonicity and
    ``(K|i, K|j)`` for submodularity.
    """
    n = f.n
    v = f.values
    out: list[Violation] = []

    def full() -> bool:
        return limit is not None and len(out) >= limit

    if v[0] != 0:
        out.append(Violation("normalization", (0,), v[0]))
    top = full_mask(n)
    for i in range(n):
        if full():
            break
        d = v[top] - v[top & ~(1 << i)]
        if d < 0:
            out.append(Violation("monotonicity", (top & ~(1 << i), top), d))
    for i in range(n):
        for j in range(i + 1, n):
            rest = top & ~(1 << i) & ~(1 << j)
            bi, bj = 1 << i, 1 << j
            for k in submasks(rest):
                if full():
                    break
                d = v[k | bi] + v[k | bj] - v[k | bi | bj] - v[k]
                if d < 0:
                    out.append(Violation("submodularity", (k | bi, k | bj), d))
    matroid = not out and f.is_integer() and all(v[1 << i] <= 1 for i in range(n))
    return AxiomReport(out, matroid)


class Polymatroid:
    """A polymatroid rank function on ``{0..n-1}``; validated on construction
    unless ``check=False``."""

    def __init__(self, f: SetFunction, labels: Sequence[str] | None = None, check: bool = True):
        if check:
            rep = validate_polymatroid(f, limit=1)
            if not rep.valid:
                raise ValueError(f"not a polymatroid: {rep.violations[0]}")
        self.f = f
        self.labels = tuple(labels) if labels is not None else default_labels(f.n)
        if len(self.labels) != f.n:
            raise ValueError("label count does not match ground set size")

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def ground(self) -> int:
        return full_mask(self.f.n)

    def rank(self, mask: int = None):
        return self.f(self.ground if mask is None else mask)

    def __call__(self, mask: int):
        return self.f.values[mask]

    def __eq__(self, other):
        return isinstance(other, Polymatroid) and self.f == other.f

    def __hash__(self):
        return hash(self.f)

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, rank={self.rank()})"

    def fmt(self, mask: int) -> str:
        return fmt_set(mask, self.labels)

    def parse(self, text: str) -> int:
        return parse_set(text, self.labels)


class Matroid(Polymatroid):
    def __init__(self, f: SetFunction, labels: Sequence[str] | None = None, check: bool = True):
        if check:
            rep = validate_polymatroid(f, limit=1)
            if not rep.is_matroid:
                why = rep.violations[0] if rep.violations else "integrality / unit singletons"
                raise ValueError(f"not a matroid: {why}")
        super().__init__(f, labels, check=False)

    @classmethod
    def from_bases(cls, n: int, bases: Iterable[int], labels=None, check: bool = True) -> "Matroid":
        bases = list(bases)
        if not bases:
            raise ValueError("a matroid needs at least one basis")
        # independent sets are the subsets of bases; rank is the largest one inside X
        indep = bytearray(1 << n)
        for b in bases:
            indep[b] = 1
        for m in range((1 << n) - 1, -1, -1):
            if not indep[m]:
                for i in range(n):
                    if not m >> i & 1 and indep[m | (1 << i)]:
                        indep[m] = 1
                        break
        r = [0] * (1 << n)
        for m in range(1, 1 << n):
            if indep[m]:
                r[m] = popcount(m)
            else:
                r[m] = max(r[m & ~(1 << i)] for i in range(n) if m >> i & 1)
        f = SetFunction(n, tuple(r))
        mat = cls(f, labels, check=check)
        if check and sorted(mat.bases()) != sorted(bases):
            raise ValueError("basis family does not satisfy the exchange axiom")
        return mat

    def bases(self) -> list[int]:
        k = self.rank()
        return [m for m in range(1 << self.n) if popcount(m) == k and self.f.values[m] == k]

    def nonbases(self) -> list[int]:
        k = self.rank()
        return [m for m in range(1 << self.n) if popcount(m) == k and self.f.values[m] < k]

    @cached_property
    def closures(self) -> tuple[int, ...]:
        n = self.n
        v = self.f.values
        out = []
        for m in range(1 << n):
            c = m
            r = v[m]
            for i in range(n):
                b = 1 << i
                if not m & b and v[m | b] == r:
                    c |= b
            out.append(c)
        return tuple(out)

    @cached_property
    def all_flats(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.closures)))

    def is_flat(self, mask: int) -> bool:
        return self.closures[mask] == mask

    def circuit_hyperplanes(self) -> list[int]:
        k = self.rank()
        return [m for m in self.nonbases() if self.f.values[m] == k - 1 and self.is_flat(m)
                and all(self.f.values[m & ~(1 << i)] == k - 1 for i in elements(m))]


def fmt_set(mask: int, labels: Sequence[str]) -> str:
    parts = [labels[i] for i in elements(mask)]
    if all(len(p) == 1 for p in parts):
        return "".join(parts) if parts else "{}"
    return "{" + ",".join(parts) + "}"


def _split_top(text: str) -> list[str]:
    """Split on commas that are not inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        depth += (ch == "(") - (ch == ")")
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def parse_set(text: str, labels: Sequence[str]) -> int:
    """Parse ``"0123"`` (single-character labels) or ``"{0,z1}"``."""
    text = text.strip()
    if text in ("", "{}", "-"):
        return 0
    index = {lab: i for i, lab in enumerate(labels)}
    if text.startswith("{"):
        toks = [t.strip() for t in _split_top(text[1:-1] if text.endswith("}") else text[1:]) if t.strip()]
    else:
        toks = list(text)
    m = 0
    for t in toks:
        if t not in index:
            raise ValueError(f"unknown element {t!r}")
        m |= 1 << index[t]
    return m


@dataclass(frozen=True)
class SparsePavingMatroid:
    n: int
    k: int
    chs: tuple[int, ...]
    labels: tuple[str, ...] = field(default=None, compare=False)

    def __post_init__(self):
        chs = tuple(sorted(set(self.chs)))
        object.__setattr__(self, "chs", chs)
        if self.labels is None:
            object.__setattr__(self, "labels", default_labels(self.n))
        if not 0 <= self.k <= self.n <= MAX_GROUND:
            raise ValueError("need 0 <= k <= n <= 16")
        top = full_mask(self.n)
        for c in chs:
            if c & ~top or popcount(c) != self.k:
                raise ValueError(f"circuit-hyperplane {c:#x} is not a {self.k}-subset")
        for a, b in itertools.combinations(chs, 2):
            if popcount(a & b) > self.k - 2:
                raise ValueError(
                    f"circuit-hyperplanes {fmt_set(a, self.labels)} and {fmt_set(b, self.labels)} "
                    f"meet in more than k-2 elements")

    def rank(self, mask: int) -> int:
        return sparse_paving_rank(self, mask)

    @cached_property
    def matroid(self) -> Matroid:
        chs = set(self.chs)
        k = self.k
        vals = []
        for m in range(1 << self.n):
            c = popcount(m)
            vals.append(k - 1 if c == k and m in chs else min(c, k))
        return Matroid(SetFunction(self.n, tuple(vals)), self.labels, check=False)

    def fmt(self) -> str:
        return " ".join(fmt_set(c, self.labels) for c in self.chs)


def sparse_paving_rank(sp: SparsePavingMatroid, x: int) -> int:
    c = popcount(x)
    if c < sp.k:
        return c
    if c == sp.k and x in sp.chs:
        return sp.k - 1
    return sp.k


def as_matroid(m) -> Matroid:
    if isinstance(m, SparsePavingMatroid):
        return m.matroid
    if isinstance(m, Matroid):
        return m
    raise TypeError(f"expected a matroid, got {type(m).__name__}")


def closure(m, x: int) -> int:
    return as_matroid(m).closures[x]


def flats(m, r: int | None = None) -> list[int]:
    """Flats in ascending mask order, optionally only those of rank ``r``."""
    m = as_matroid(m)
    fl = m.all_flats
    if r is None:
        return list(fl)
    v = m.f.values
    return [F for F in fl if v[F] == r]


def is_modular_pair(m, f1: int, f2: int) -> bool:
    m = as_matroid(m)
    for F in (f1, f2):
        if not m.is_flat(F):
            raise ValueError(f"{m.fmt(F)} is not a flat")
    v = m.f.values
    return v[f1] + v[f2] == v[f1 | f2] + v[f1 & f2]


def dual(m):
    """Dual matroid; sparse paving input stays sparse paving."""
    if isinstance(m, SparsePavingMatroid):
        top = full_mask(m.n)
        return SparsePavingMatroid(m.n, m.n - m.k, tuple(top & ~c for c in m.chs), m.labels)
    m = as_matroid(m)
    n = m.n
    top = full_mask(n)
    v = m.f.values
    rq = v[top]
    vals = tuple(popcount(x) - rq + v[top & ~x] for x in range(1 << n))
    return Matroid(SetFunction(n, vals), m.labels, check=False)


def _compress(x: int, keep: Sequence[int]) -> int:
    out = 0
    for j, i in enumerate(keep):
        if x >> i & 1:
            out |= 1 << j
    return out


def minor(p: Polymatroid, delete: int = 0, contract: int = 0) -> Polymatroid:
    """Delete ``delete`` and contract ``contract``: X -> f(X | contract) - f(contract)."""
    if isinstance(p, SparsePavingMatroid):
        p = p.matroid
    if delete & contract:
        raise ValueError("deleted and contracted sets overlap")
    n = p.n
    gone = delete | contract
    keep = [i for i in range(n) if not gone >> i & 1]
    v = p.f.values
    base = v[contract]
    vals = []
    for y in range(1 << len(keep)):
        x = 0
        for j, i in enumerate(keep):
            if y >> j & 1:
                x |= 1 << i
        vals.append(v[x | contract] - base)
    f = SetFunction(len(keep), tuple(vals))
    labels = [p.labels[i] for i in keep]
    if isinstance(p, Matroid):
        return Matroid(f, labels, check=False)
    return Polymatroid(f, labels, check=False)


def relax(sp: SparsePavingMatroid, c: int) -> SparsePavingMatroid:
    if c not in sp.chs:
        raise ValueError(f"{fmt_set(c, sp.labels)} is not a circuit-hyperplane")
    return SparsePavingMatroid(sp.n, sp.k, tuple(x for x in sp.chs if x != c), sp.labels)


@dataclass(frozen=True)
class BlockPartition:
    blocks: tuple[int, ...]

    def __post_init__(self):
        seen = 0
        for b in self.blocks:
            if b == 0:
                raise ValueError("empty block")
            if b & seen:
                raise ValueError("blocks overlap")
            seen |= b

    @property
    def support(self) -> int:
        return mask_of(i for b in self.blocks for i in elements(b))

    def union(self, atoms: int) -> int:
        out = 0
        for i, b in enumerate(self.blocks):
            if atoms >> i & 1:
                out |= b
        return out


def induced_polymatroid(p: Polymatroid, blocks: BlockPartition | Sequence[int]) -> Polymatroid:
    if isinstance(p, SparsePavingMatroid):
        p = p.matroid
    if not isinstance(blocks, BlockPartition):
        blocks = BlockPartition(tuple(blocks))
    if blocks.support & ~p.ground:
        raise ValueError("blocks leave the ground set")
    v = p.f.values
    m = len(blocks.blocks)
    f = SetFunction(m, tuple(v[blocks.union(s)] for s in range(1 << m)))
    labels = [p.fmt(b) for b in blocks.blocks]
    return Polymatroid(f, labels, check=False)


# -- Ingleton ------------------------------------------------------------------

def ingleton_slack(f, a: int, b: int, c: int, d: int):
    """f(AB)+f(AC)+f(AD)+f(BC)+f(BD) - f(A)-f(B)-f(CD)-f(ABC)-f(ABD)."""
    if isinstance(f, (Polymatroid,)):
        f = f.f
    v = f.values
    return (v[a | b] + v[a | c] + v[a | d] + v[b | c] + v[b | d]
            - v[a] - v[b] - v[c | d] - v[a | b | c] - v[a | b | d])


@dataclass(frozen=True)
class IngletonViolation:
    a: int
    b: int
    c: int
    d: int
    slack: object


def _integer_values(f: SetFunction) -> np.ndarray:
    den = 1
    for x in f.values:
        if isinstance(x, Fraction):
            den = den * x.denominator // np.gcd(den, x.denominator)
    return np.array([int(x * den) for x in f.values], dtype=np.int64), den


def ingleton_check(p) -> IngletonViolation | None:
    """First violated Ingleton instance over disjoint nonempty A, B, C, D.

    Assignments of elements to {unused, A, B, C, D} are scanned as base-5
    numbers with element 0 as the least significant digit.
    """
    if isinstance(p, SparsePavingMatroid):
        p = p.matroid
    f = p.f
    n = f.n
    vals, den = _integer_values(f)
    pw = np.array([1 << i for i in range(n)], dtype=np.int64)
    # chunk over the top digits so memory stays bounded
    low = min(n, 8)
    high = n - low
    codes = np.arange(5 ** low, dtype=np.int64)
    digits = np.stack([(codes // 5 ** i) % 5 for i in range(low)], axis=1)
    low_parts = [(digits == t) @ pw[:low] for t in range(1, 5)]
    for hcode in range(5 ** high):
        hd = [(hcode // 5 ** i) % 5 for i in range(high)]
        extra = [0, 0, 0, 0]
        for i, t in enumerate(hd):
            if t:
                extra[t - 1] |= 1 << (low + i)
        A, B, C, D = (low_parts[t] | extra[t] for t in range(4))
        ok = (A != 0) & (B != 0) & (C != 0) & (D != 0)
        s = (vals[A | B] + vals[A | C] + vals[A | D] + vals[B | C] + vals[B | D]
             - vals[A] - vals[B] - vals[C | D] - vals[A | B | C] - vals[A | B | D])
        bad = np.nonzero(ok & (s < 0))[0]
        if bad.size:
            i = bad[0]
            a, b, c, d = int(A[i]), int(B[i]), int(C[i]), int(D[i])
            return IngletonViolation(a, b, c, d, ingleton_slack(f, a, b, c, d))
    return None


# -- Vamos configuration ---------------------------------------------------------

def is_vamos_pattern(v, lines: Sequence[int]) -> bool:
    """Induced rank pattern of four lines equals the Vamos polymatroid: each
    line rank 2, pairs rank 3 except (L0, L3) of rank 4, larger unions rank 4."""
    l0, l1, l2, l3 = lines
    if any(v[l] != 2 for l in lines):
        return False
    if v[l0 | l3] != 4:
        return False
    for a, b in ((l0, l1), (l0, l2), (l1, l2), (l1, l3), (l2, l3)):
        if v[a | b] != 3:
            return False
    for t in itertools.combinations(lines, 3):
        if v[t[0] | t[1] | t[2]] != 4:
            return False
    return v[l0 | l1 | l2 | l3] == 4


def contains_vamos_configuration(m, candidates: Sequence[int] | None = None,
                                 disjoint: bool = True) -> tuple[int, int, int, int] | None:
    """Search ordered 4-tuples of lines inducing the Vamos polymatroid.

    ``candidates`` restricts the search to the given sets (closures are not
    taken); by default all rank-2 flats are used.  With ``disjoint`` the four
    lines must be pairwise disjoint as sets.
    """
    m = as_matroid(m)
    v = m.f.values
    lines = sorted(candidates) if candidates is not None else flats(m, 2)
    lines = [l for l in lines if v[l] == 2]

    def compatible(a, b):
        return not disjoint or not a & b

    for l0 in lines:
        for l3 in lines:
            if l3 == l0 or not compatible(l0, l3) or v[l0 | l3] != 4:
                continue
            mids = [l for l in lines if l not in (l0, l3) and compatible(l, l0) and compatible(l, l3)
                    and v[l | l0] == 3 and v[l | l3] == 3]
            for l1 in mids:
                for l2 in mids:
                    if l2 == l1 or not compatible(l1, l2):
                        continue
                    if is_vamos_pattern(v, (l0, l1, l2, l3)):
                        return (l0, l1, l2, l3)
    return None
