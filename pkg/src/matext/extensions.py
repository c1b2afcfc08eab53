"""Modular cuts, single-element extensions and the matroid extension
properties GE, CE, IM and iterated GE."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .core import Matroid, SetFunction, as_matroid, elements, fmt_set


class FlatLattice:
    """Flats of a matroid with up/down sets as bitsets over flat indices."""

    def __init__(self, m: Matroid):
        self.m = m
        self.flats = m.all_flats
        self.index = {F: i for i, F in enumerate(self.flats)}
        v = m.f.values
        self.rank = [v[F] for F in self.flats]
        nf = len(self.flats)
        allbits = (1 << nf) - 1
        contains = [0] * m.n
        for j, F in enumerate(self.flats):
            for x in elements(F):
                contains[x] |= 1 << j
        up = []
        down = []
        for F in self.flats:
            u = allbits
            d = allbits
            for x in range(m.n):
                if F >> x & 1:
                    u &= contains[x]
                else:
                    d &= ~contains[x]
            up.append(u)
            down.append(d)
        self.up = up
        self.down = down
        # decreasing rank, then ascending mask
        self.order = sorted(range(nf), key=lambda i: (-self.rank[i], self.flats[i]))

    def members(self, bits: int) -> list[int]:
        out = []
        i = 0
        while bits:
            if bits & 1:
                out.append(self.flats[i])
            bits >>= 1
            i += 1
        return out

    def bits_of(self, fl: Sequence[int]) -> int:
        b = 0
        for F in fl:
            b |= 1 << self.index[F]
        return b

    def modular(self, a: int, b: int) -> bool:
        v = self.m.f.values
        return v[a] + v[b] == v[a | b] + v[a & b]

    def close(self, bits: int, forbid: int = 0) -> int | None:
        """Least modular cut containing the flats in ``bits``; ``None`` as soon
        as a flat in ``forbid`` would enter."""
        up = self.up
        cut = 0
        for i in _bit_indices(bits):
            cut |= up[i]
        if cut & forbid:
            return None
        members = _bit_indices(cut)
        flats = self.flats
        index = self.index
        v = self.m.f.values
        pos = 0
        while pos < len(members):
            a = flats[members[pos]]
            for jb in members[:pos]:
                b = flats[jb]
                meet = a & b
                if meet == a or meet == b:
                    continue
                k = index[meet]
                if cut >> k & 1:
                    continue
                if v[a] + v[b] == v[a | b] + v[meet]:
                    new = up[k] & ~cut
                    cut |= new
                    if cut & forbid:
                        return None
                    members.extend(_bit_indices(new))
            pos += 1
        return cut


def _bit_indices(bits: int) -> list[int]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return out


@lru_cache(maxsize=64)
def lattice(m: Matroid) -> FlatLattice:
    return FlatLattice(m)


@dataclass(frozen=True)
class ModularCut:
    matroid: Matroid = field(repr=False, compare=False)
    flats: tuple[int, ...]

    def __contains__(self, F: int) -> bool:
        return F in self._set

    @property
    def _set(self) -> frozenset:
        s = self.__dict__.get("_fs")
        if s is None:
            s = frozenset(self.flats)
            object.__setattr__(self, "_fs", s)
        return s

    def __len__(self):
        return len(self.flats)

    def fmt(self) -> str:
        return "{" + ", ".join(self.matroid.fmt(F) for F in self.flats) + "}"


def cut_violations(m: Matroid, fl: Sequence[int]) -> list[tuple[str, tuple[int, ...]]]:
    """Violated modular-cut axioms for the family ``fl``."""
    m = as_matroid(m)
    out = []
    s = set(fl)
    for F in fl:
        if not m.is_flat(F):
            out.append(("not-a-flat", (F,)))
    if out:
        return out
    lat = lattice(m)
    for F in fl:
        for G in lat.members(lat.up[lat.index[F]]):
            if G not in s:
                out.append(("upward-closure", (F, G)))
    fl = sorted(s)
    for i, a in enumerate(fl):
        for b in fl[:i]:
            if lat.modular(a, b) and (a & b) not in s:
                out.append(("modular-intersection", (a, b)))
    return out


def _make_cut(m: Matroid, lat: FlatLattice, bits: int) -> ModularCut:
    return ModularCut(m, tuple(sorted(lat.members(bits))))


def _require_flats(m: Matroid, fl):
    for F in fl:
        if not m.is_flat(F):
            raise ValueError(f"{m.fmt(F)} is not a flat")


def minimal_modular_cut(m, generators: Sequence[int]) -> ModularCut:
    m = as_matroid(m)
    _require_flats(m, generators)
    lat = lattice(m)
    return _make_cut(m, lat, lat.close(lat.bits_of(generators)))


def extend_by_modular_cut(m, cut: ModularCut | Sequence[int], label: str | None = None,
                          check: bool = True) -> Matroid:
    """Single-element extension ``g`` on ``Q + z`` (z is the new top element):
    g(Xz) = f(X) when cl(X) is in the cut, f(X) + 1 otherwise."""
    m = as_matroid(m)
    fl = cut.flats if isinstance(cut, ModularCut) else tuple(cut)
    if check:
        bad = cut_violations(m, fl)
        if bad:
            ax, sets = bad[0]
            raise ValueError(f"invalid modular cut ({ax}): " + ", ".join(m.fmt(s) for s in sets))
    members = set(fl)
    v = m.f.values
    cl = m.closures
    n = m.n
    hi = [v[x] if cl[x] in members else v[x] + 1 for x in range(1 << n)]
    label = label or _fresh_label(m.labels)
    return Matroid(SetFunction(n + 1, tuple(v) + tuple(hi)), m.labels + (label,), check=False)


def _fresh_label(labels) -> str:
    i = 1
    while f"z{i}" in labels:
        i += 1
    return f"z{i}"


def nonmodular_pairs(m) -> list[tuple[int, int]]:
    """Non-modular pairs of flats (F1 < F2 by mask), in ascending order."""
    m = as_matroid(m)
    fl = m.all_flats
    v = m.f.values
    out = []
    for i, a in enumerate(fl):
        for b in fl[i + 1:]:
            meet = a & b
            if meet == a or meet == b:
                continue
            if v[a] + v[b] != v[a | b] + v[meet]:
                out.append((a, b))
    return out


def ge_extension_exists(m, f1: int, f2: int) -> ModularCut | None:
    """Minimal modular cut putting a point on both flats, unless it is forced
    onto their intersection."""
    m = as_matroid(m)
    _require_flats(m, (f1, f2))
    lat = lattice(m)
    if lat.modular(f1, f2):
        raise ValueError(f"({m.fmt(f1)}, {m.fmt(f2)}) is a modular pair")
    forbid = 1 << lat.index[f1 & f2]
    bits = lat.close(lat.bits_of((f1, f2)), forbid)
    return None if bits is None else _make_cut(m, lat, bits)


def enumerate_admissible_cuts(m, must_contain: Sequence[int] = (), must_exclude: Sequence[int] = (),
                              cap: int = 10_000) -> tuple[list[ModularCut], bool]:
    """All modular cuts containing ``must_contain`` and avoiding ``must_exclude``.

    Returns ``(cuts, truncated)``.  Flats are decided in decreasing rank order;
    the "in" branch is explored before the "out" branch.
    """
    if cap < 1:
        raise ValueError("cap must be positive")
    m = as_matroid(m)
    _require_flats(m, tuple(must_contain) + tuple(must_exclude))
    lat = lattice(m)
    out_bits = 0
    for F in must_exclude:
        out_bits |= lat.down[lat.index[F]]
    start = lat.close(lat.bits_of(must_contain), out_bits)
    results: list[ModularCut] = []
    if start is None:
        return results, False
    order = lat.order
    truncated = False

    def rec(pos: int, cin: int, cout: int):
        nonlocal truncated
        if truncated:
            return
        while pos < len(order) and ((cin | cout) >> order[pos]) & 1:
            pos += 1
        if pos == len(order):
            if len(results) >= cap:
                truncated = True
                return
            results.append(_make_cut(m, lat, cin))
            return
        i = order[pos]
        grown = lat.close(cin | (1 << i), cout)
        if grown is not None:
            rec(pos + 1, grown, cout)
        rec(pos + 1, cin, cout | lat.down[i])

    rec(0, start, out_bits)
    return results, truncated


# -- iterated GE ---------------------------------------------------------------

class Strategy(enum.Enum):
    MINIMAL = "minimal"
    EXHAUSTIVE = "exhaustive"


class Status(enum.Enum):
    PASSED = "passed"
    REFUTED = "refuted"
    TRUNCATED = "truncated"


@dataclass(frozen=True)
class ExtensionStepRecord:
    kind: str  # "GE" | "CE" | "IM"
    flats: tuple[int, ...]
    cut: ModularCut | None
    element: int | None  # index of the new element, None for a dead end


@dataclass
class KGEVerdict:
    status: Status
    witness: list = field(default_factory=list)  # ExtensionStepRecords, last one a dead end
    nodes: int = 0
    note: str = ""
    matroid: Matroid | None = None  # matroid in which the dead-end pair lives

    def describe(self) -> str:
        parts = [self.status.value]
        if self.witness and self.matroid is not None:
            parts.append(" -> ".join(format_record(self.matroid, r) for r in self.witness))
        if self.note:
            parts.append(self.note)
        return "; ".join(parts)


class _Budget(Exception):
    pass


def kge_check(m, depth: int, strategy: Strategy | str = Strategy.MINIMAL,
              budget: int | None = None, cap: int = 10_000) -> KGEVerdict:
    """Decide k-GE by recursion on GE extensions of every non-modular pair.

    With the minimal strategy only the minimal modular cut is tried for each
    pair, so a dead end found below the top level is not a proof and the
    verdict becomes ``TRUNCATED`` with a note.  ``budget`` caps the number of
    extensions built; ``cap`` bounds the cuts enumerated per pair under the
    exhaustive strategy.  At every level all pairs are first screened for a
    missing minimal cut, which rules out every cut.
    """
    strategy = Strategy(strategy)
    m = as_matroid(m)
    nodes = 0
    why = [f"budget of {budget} extensions exhausted"]

    def tick():
        nonlocal nodes
        nodes += 1
        if budget is not None and nodes > budget:
            raise _Budget

    def rec(mat: Matroid, k: int) -> tuple[bool, list, Matroid]:
        """Returns (passed, dead-end chain, matroid holding the dead end)."""
        if k == 0:
            return True, [], mat
        pairs = nonmodular_pairs(mat)
        for f1, f2 in pairs:
            if ge_extension_exists(mat, f1, f2) is None:
                return False, [ExtensionStepRecord("GE", (f1, f2), None, None)], mat
        if k == 1:
            return True, [], mat
        for f1, f2 in pairs:
            if strategy is Strategy.MINIMAL:
                cut = ge_extension_exists(mat, f1, f2)
                tick()
                ext = extend_by_modular_cut(mat, cut, check=False)
                ok, chain, where = rec(ext, k - 1)
                if not ok:
                    return False, [ExtensionStepRecord("GE", (f1, f2), cut, mat.n)] + chain, where
            else:
                cuts, trunc = enumerate_admissible_cuts(mat, (f1, f2), (f1 & f2,), cap)
                if trunc:
                    why[0] = f"more than {cap} admissible cuts for ({mat.fmt(f1)}, {mat.fmt(f2)})"
                    raise _Budget
                last = None
                for cut in cuts:
                    tick()
                    ext = extend_by_modular_cut(mat, cut, check=False)
                    ok, chain, where = rec(ext, k - 1)
                    if ok:
                        break
                    last = ([ExtensionStepRecord("GE", (f1, f2), cut, mat.n)] + chain, where)
                else:
                    return False, last[0], last[1]
        return True, [], mat

    try:
        ok, chain, where = rec(m, depth)
    except _Budget:
        return KGEVerdict(Status.TRUNCATED, nodes=nodes, note=why[0])
    if ok:
        return KGEVerdict(Status.PASSED, nodes=nodes)
    if strategy is Strategy.MINIMAL and len(chain) > 1:
        return KGEVerdict(Status.TRUNCATED, chain, nodes,
                          "dead end below the first level under minimal cuts only; "
                          "rerun with the exhaustive strategy to confirm", where)
    return KGEVerdict(Status.REFUTED, chain, nodes, matroid=where)


# -- CE, IM, scripted chains -----------------------------------------------------

@dataclass
class ExtensionResult:
    matroid: Matroid
    steps: list
    dead_end: ExtensionStepRecord | None = None

    @property
    def ok(self) -> bool:
        return self.dead_end is None


def ce_extension(m, f1: int, f2: int) -> ExtensionResult:
    """Complete Euclidean extension by repeated GE steps on the images
    cl(F1 Z), cl(F2 Z) of the pair, until it becomes modular."""
    mat = as_matroid(m)
    _require_flats(mat, (f1, f2))
    added = 0
    steps = []
    while True:
        cl = mat.closures
        a, b = cl[f1 | added], cl[f2 | added]
        lat = lattice(mat)
        if lat.modular(a, b):
            return ExtensionResult(mat, steps)
        cut = ge_extension_exists(mat, a, b)
        if cut is None:
            return ExtensionResult(mat, steps, ExtensionStepRecord("GE", (a, b), None, None))
        steps.append(ExtensionStepRecord("GE", (a, b), cut, mat.n))
        added |= 1 << mat.n
        mat = extend_by_modular_cut(mat, cut, check=False)


def im_extension_exists(m, l1: int, l2: int, l3: int) -> ModularCut | None:
    """Minimal modular cut making three pairwise coplanar, jointly non-coplanar
    lines concurrent at a non-loop point."""
    m = as_matroid(m)
    v = m.f.values
    ls = (l1, l2, l3)
    for i, l in enumerate(ls):
        if v[l] != 2:
            raise ValueError(f"line {i + 1} ({m.fmt(l)}) has rank {v[l]}, not 2")
        if not m.is_flat(l):
            raise ValueError(f"line {i + 1} ({m.fmt(l)}) is not a flat")
    for i in range(3):
        for j in range(i + 1, 3):
            r = v[ls[i] | ls[j]]
            if r != 3:
                raise ValueError(f"lines {i + 1} and {j + 1} span rank {r}, not 3")
    r = v[l1 | l2 | l3]
    if r != 4:
        raise ValueError(f"the three lines span rank {r}, not 4")
    lat = lattice(m)
    loops = m.closures[0]
    bits = lat.close(lat.bits_of(ls), 1 << lat.index[loops])
    return None if bits is None else _make_cut(m, lat, bits)


def im_triples(m) -> list[tuple[int, int, int]]:
    """All line triples satisfying the IM rank conditions, ascending."""
    m = as_matroid(m)
    v = m.f.values
    lines = [F for F in m.all_flats if v[F] == 2]
    out = []
    for i, a in enumerate(lines):
        for j in range(i + 1, len(lines)):
            b = lines[j]
            if v[a | b] != 3:
                continue
            for c in lines[j + 1:]:
                if v[a | c] == 3 and v[b | c] == 3 and v[a | b | c] == 4:
                    out.append((a, b, c))
    return out


def im_check(m) -> tuple[bool, tuple[int, int, int] | None]:
    """(True, None) if every IM triple admits an IM extension, else the first
    failing triple."""
    for t in im_triples(m):
        if im_extension_exists(m, *t) is None:
            return False, t
    return True, None


def scripted_chain(m, steps: Sequence[tuple[str, Sequence[int]]],
                   strategy: Strategy | str = Strategy.MINIMAL, cap: int = 10_000) -> ExtensionResult:
    """Apply GE/CE/IM steps in order; sets are closed in the running
    extension before use.

    The minimal strategy takes the least admissible cut at every step.  The
    exhaustive one backtracks over all admissible GE/IM cuts (CE steps always
    use minimal cuts) and returns the first chain that completes; a dead end
    is then reported only if every choice of earlier cuts dies.
    """
    strategy = Strategy(strategy)
    steps = [(kind.upper(), tuple(sets)) for kind, sets in steps]
    for kind, _ in steps:
        if kind not in ("GE", "IM", "CE"):
            raise ValueError(f"unknown step kind {kind!r}")

    def options(mat: Matroid, kind: str, fl: tuple) -> list:
        if kind == "GE":
            if strategy is Strategy.MINIMAL:
                cut = ge_extension_exists(mat, *fl)
                return [cut] if cut is not None else []
            if lattice(mat).modular(*fl):
                raise ValueError(f"({mat.fmt(fl[0])}, {mat.fmt(fl[1])}) is a modular pair")
            return enumerate_admissible_cuts(mat, fl, (fl[0] & fl[1],), cap)[0]
        if strategy is Strategy.MINIMAL:
            cut = im_extension_exists(mat, *fl)
            return [cut] if cut is not None else []
        im_extension_exists(mat, *fl)  # rank conditions
        return enumerate_admissible_cuts(mat, fl, (mat.closures[0],), cap)[0]

    deepest: list = [None]

    def rec(mat: Matroid, idx: int, records: list) -> ExtensionResult | None:
        if idx == len(steps):
            return ExtensionResult(mat, records)
        kind, sets = steps[idx]
        cl = mat.closures
        fl = tuple(cl[s] for s in sets)
        if kind == "CE":
            res = ce_extension(mat, *fl)
            if not res.ok:
                _note(deepest, ExtensionResult(res.matroid, records + res.steps, _dead(res.dead_end, idx)))
                return None
            return rec(res.matroid, idx + 1, records + res.steps)
        cuts = options(mat, kind, fl)
        if not cuts:
            _note(deepest, ExtensionResult(mat, records, _dead(ExtensionStepRecord(kind, fl, None, None), idx)))
            return None
        for cut in cuts:
            ext = extend_by_modular_cut(mat, cut, check=False)
            got = rec(ext, idx + 1, records + [ExtensionStepRecord(kind, fl, cut, mat.n)])
            if got is not None:
                return got
        return None

    got = rec(as_matroid(m), 0, [])
    return got if got is not None else deepest[0]


def _note(slot: list, res: ExtensionResult):
    """Keep the dead end reached at the latest step."""
    if slot[0] is None or res.dead_end.step_index > slot[0].dead_end.step_index:
        slot[0] = res


@dataclass(frozen=True)
class DeadEnd(ExtensionStepRecord):
    step_index: int = -1


def _dead(rec: ExtensionStepRecord, idx: int) -> DeadEnd:
    return DeadEnd(rec.kind, rec.flats, None, None, idx)


def format_record(m: Matroid, rec: ExtensionStepRecord) -> str:
    """Human-readable step; ``m`` must carry labels for every set mentioned."""
    body = ", ".join(fmt_set(F, m.labels) for F in rec.flats)
    if rec.cut is None:
        return f"{rec.kind}({body}): no admissible cut"
    return f"{rec.kind}({body}) adds {m.labels[rec.element] if rec.element < m.n else 'a new point'}"
