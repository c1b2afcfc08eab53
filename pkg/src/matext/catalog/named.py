"""Named matroids and polymatroids on eight and nine elements.

Eight-element matroids live on the vertices of the cube {0,1}^3, element ``b``
being the vertex with binary representation ``b``.  Nine-element matroids live
on the affine plane F3 x F3 with F3 = {-1, 0, 1}; the point (x, y) is element
3(x+1) + (y+1).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..core import (
    BlockPartition,
    Matroid,
    SparsePavingMatroid,
    default_labels,
    induced_polymatroid,
    mask_of,
    parse_set,
    popcount,
)

F3 = (-1, 0, 1)


def point(x: int, y: int) -> int:
    return 3 * (x + 1) + (y + 1)


def point_mask(*pts: tuple[int, int]) -> int:
    return mask_of(point(x, y) for x, y in pts)


def _f3(a: int) -> int:
    return (a + 1) % 3 - 1


@dataclass(frozen=True)
class AffinePlaneF3:
    """The twelve lines of F3 x F3 in four parallel classes."""

    @staticmethod
    def A(i: int) -> int:
        return point_mask(*((x, i) for x in F3))

    @staticmethod
    def B(i: int) -> int:
        return point_mask(*((i, y) for y in F3))

    @staticmethod
    def C(i: int) -> int:
        return point_mask(*((x, y) for x in F3 for y in F3 if _f3(x - y) == i))

    @staticmethod
    def D(i: int) -> int:
        return point_mask(*((x, y) for x in F3 for y in F3 if _f3(x + y) == i))

    def lines(self) -> list[int]:
        return [fam(i) for fam in (self.A, self.B, self.C, self.D) for i in F3]


PLANE = AffinePlaneF3()
A, B, C, D = PLANE.A, PLANE.B, PLANE.C, PLANE.D

TTT_LABELS = tuple(f"({x},{y})" for x in F3 for y in F3)
ORIGIN = point_mask((0, 0))
# (A0 B0 minus the origin) plus (1,1)
DISPLACED = (A(0) | B(0)) & ~ORIGIN | point_mask((1, 1))


def displaced(x: int, y: int) -> int:
    return (A(0) | B(0)) & ~ORIGIN | point_mask((x, y))


def _sets(text: str, n: int = 8) -> tuple[int, ...]:
    lab = default_labels(n)
    return tuple(parse_set(s, lab) for s in text.replace(",", " ").split())


def ag32() -> SparsePavingMatroid:
    planes = [mask_of(c) for c in itertools.combinations(range(8), 4)
              if c[0] ^ c[1] ^ c[2] ^ c[3] == 0]
    return SparsePavingMatroid(8, 4, tuple(planes))


VAMOS_CHS = "0123 0145 2367 4567 2345"
P8_CHS = "0246 1357 0217 4617 2635 0435 0637 0615 2413 2457"


def vamos() -> SparsePavingMatroid:
    return SparsePavingMatroid(8, 4, _sets(VAMOS_CHS))


def l8() -> SparsePavingMatroid:
    return SparsePavingMatroid(8, 4, _sets("0123 4567 0145 2367 0246 1357 0356 1247"))


def l8_prime() -> SparsePavingMatroid:
    return SparsePavingMatroid(8, 4, _sets("0123 4567 0145 2367 0246 1357 0356"))


def p8(relaxed: str = "") -> SparsePavingMatroid:
    gone = set(_sets(relaxed)) if relaxed else set()
    return SparsePavingMatroid(8, 4, tuple(c for c in _sets(P8_CHS) if c not in gone))


def t3o_chs() -> list[int]:
    return [A(i) | B(j) for i in F3 for j in F3]


def cd_chs() -> list[int]:
    return [C(i) | D(j) for i in F3 for j in F3]


def _ttt(chs) -> SparsePavingMatroid:
    return SparsePavingMatroid(9, 5, tuple(chs), TTT_LABELS)


def t3o() -> SparsePavingMatroid:
    return _ttt(t3o_chs())


def t3() -> SparsePavingMatroid:
    return _ttt(c for c in t3o_chs() if c != A(0) | B(0))


def t3w() -> SparsePavingMatroid:
    return _ttt(list(t3().chs) + [DISPLACED])


def t9c() -> SparsePavingMatroid:
    return _ttt(t3o_chs() + cd_chs())


def t7c() -> SparsePavingMatroid:
    ab = [A(i) | B(j) for i in F3 for j in F3 if (i, j) != (0, 0)]
    cd = [C(i) | D(j) for i in F3 for j in F3 if (i, j) not in ((-1, -1), (1, -1))]
    return _ttt(ab + [DISPLACED] + cd)


def vamos_hat():
    return induced_polymatroid(vamos().matroid, BlockPartition(_sets("01 23 45 67")))


M201827_FLATS = "0125 0268 1568"
M201827_CHS = "12378 03458 24578 01467 12346 34678"


def m201827() -> Matroid:
    """Rank-5 matroid on nine elements given by three 4-point planes and six
    circuit-hyperplanes.

    The planes pairwise meet in two points, so they span the rank-4 hyperplane
    012568; the non-bases are the 5-subsets of that hyperplane, the 5-sets
    containing one of the planes, and the circuit-hyperplanes.
    """
    n = 9
    planes = _sets(M201827_FLATS, n)
    chs = _sets(M201827_CHS, n)
    span = 0
    for p in planes:
        span |= p
    nonbases = set(chs)
    for c in itertools.combinations(range(n), 5):
        m = mask_of(c)
        if m & span == m or any(p & m == p for p in planes):
            nonbases.add(m)
    bases = [mask_of(c) for c in itertools.combinations(range(n), 5) if mask_of(c) not in nonbases]
    mat = Matroid.from_bases(n, bases)
    v = mat.f.values
    for p in planes:
        assert v[p] == 3 and mat.is_flat(p), "plane not reproduced"
    for c in chs:
        assert v[c] == 4 and mat.is_flat(c) and all(v[c & ~(1 << i)] == 4 for i in range(n) if c >> i & 1)
    assert popcount(span) == 6 and v[span] == 4
    return mat


def uniform(k: int, n: int) -> SparsePavingMatroid:
    return SparsePavingMatroid(n, k, ())


_REGISTRY = {
    "ag32": ag32,
    "vamos": vamos,
    "l8": l8,
    "l8p": l8_prime,
    "p8": p8,
    "p8_1": lambda: p8("2635"),
    "p8_2p": lambda: p8("2635 1357"),
    "p8_2pp": lambda: p8("2635 0246"),
    "p8_3": lambda: p8("2635 1357 0246"),
    "t3o": t3o,
    "t3": t3,
    "t3w": t3w,
    "t9c": t9c,
    "t7c": t7c,
    "vamos_hat": vamos_hat,
    "201827": m201827,
}

ALIASES = {
    "ag(3,2)": "ag32", "v": "vamos", "vámos": "vamos", "p8,1": "p8_1", "p'8,2": "p8_2p",
    "p''8,2": "p8_2pp", "p8,3": "p8_3", "l8'": "l8p", "v_hat": "vamos_hat", "vhat": "vamos_hat",
    "ttt": "t3", "m201827": "201827",
}


def names() -> list[str]:
    return sorted(_REGISTRY)


def named(name: str):
    """Look up a catalog entry; ``U(k,n)`` / ``u_k_n`` give uniform matroids."""
    key = name.strip().lower()
    if key.startswith("named:"):
        key = key[6:]
    key = ALIASES.get(key, key)
    if key.startswith("u(") and key.endswith(")"):
        k, n = (int(t) for t in key[2:-1].split(","))
        return uniform(k, n)
    if key.startswith("u_"):
        _, k, n = key.split("_")
        return uniform(int(k), int(n))
    try:
        return _REGISTRY[key]()
    except KeyError:
        raise KeyError(f"unknown matroid {name!r}; known: {', '.join(names())}") from None
