"""Canonical forms of matroids up to relabeling of the ground set.

A matroid of rank k is determined by its non-bases (the dependent k-sets);
for a sparse paving matroid these are exactly the circuit-hyperplanes.  The
canonical form is the lexicographically least sorted image of that hypergraph
over the orderings reachable by individualization and refinement: elements
are colored by iterated incidence invariants (degrees, then the colors of the
sets through them), ties are broken by branching, and orderings that differ by
a known automorphism are visited once.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..core import Matroid, SparsePavingMatroid, as_matroid, elements


def _refine(n: int, sets: list[tuple[int, ...]], colors: list[int]) -> list[int]:
    """Coarsest equitable refinement of ``colors`` on the incidence structure.

    New colors are ranks of signatures whose first entry is the old color, so
    cells only split and their relative order is kept.
    """
    through = [[] for _ in range(n)]
    for s in sets:
        for x in s:
            through[x].append(s)
    ncol = len(set(colors))
    while True:
        set_col = {s: tuple(sorted(colors[x] for x in s)) for s in sets}
        sigs = [(colors[x], tuple(sorted(set_col[s] for s in through[x]))) for x in range(n)]
        rank = {sig: i for i, sig in enumerate(sorted(set(sigs)))}
        colors = [rank[sig] for sig in sigs]
        if len(rank) == ncol:
            return colors
        ncol = len(rank)


def _image(sets_masks: list[int], perm: list[int]) -> tuple[int, ...]:
    out = []
    for s in sets_masks:
        m = 0
        while s:
            low = s & -s
            m |= 1 << perm[low.bit_length() - 1]
            s ^= low
        out.append(m)
    return tuple(sorted(out))


@dataclass
class CanonResult:
    form: tuple[int, ...]  # sorted masks of the relabeled hypergraph
    labeling: list[int]  # element -> canonical position
    automorphisms: list[list[int]]  # generators found during the search


def canonical_hypergraph(n: int, sets_masks) -> CanonResult:
    """Canonical relabeling of a hypergraph on ``n`` points."""
    sets_masks = sorted(set(sets_masks))
    sets = [tuple(elements(s)) for s in sets_masks]
    best: list = [None, None]  # form, labeling
    autos: list[list[int]] = []

    def leaf(colors: list[int]):
        perm = colors  # discrete: color = position
        form = _image(sets_masks, perm)
        if best[0] is None or form < best[0]:
            best[0], best[1] = form, list(perm)
        elif form == best[0]:
            # perm^-1 . best maps best's image onto itself
            inv = [0] * n
            for x, p in enumerate(perm):
                inv[p] = x
            auto = [inv[best[1][x]] for x in range(n)]
            if auto != list(range(n)) and auto not in autos:
                autos.append(auto)

    def search(colors: list[int], fixed: list[int]):
        colors = _refine(n, sets, colors)
        ncol = len(set(colors))
        if ncol == n:
            leaf(colors)
            return
        # first smallest non-singleton cell
        sizes: dict = {}
        for c in colors:
            sizes[c] = sizes.get(c, 0) + 1
        target = min((c for c, k in sizes.items() if k > 1), key=lambda c: (sizes[c], c))
        cell = [x for x in range(n) if colors[x] == target]
        done: list[int] = []
        for x in cell:
            if any(_same_orbit(x, y, autos, fixed) for y in done):
                continue
            done.append(x)
            # individualize x: it comes first within its cell
            new = [2 * c + (0 if c != target or y == x else 1) for y, c in enumerate(colors)]
            search(new, fixed + [x])

    search([0] * n, [])
    return CanonResult(best[0], best[1], autos)


def _same_orbit(x: int, y: int, autos: list[list[int]], fixed: list[int]) -> bool:
    """Are x and y in one orbit of the group generated by the automorphisms
    that fix every element of ``fixed``?"""
    gens = [a for a in autos if all(a[f] == f for f in fixed)]
    if not gens:
        return False
    seen = {x}
    stack = [x]
    while stack:
        u = stack.pop()
        for a in gens:
            v = a[u]
            if v == y:
                return True
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return False


def _nonbases(m) -> tuple[int, int, list[int]]:
    if isinstance(m, SparsePavingMatroid):
        return m.n, m.k, list(m.chs)
    mat = as_matroid(m)
    return mat.n, mat.rank(), list(mat.nonbases())


def canonical_form(m) -> tuple[int, int, tuple[int, ...]]:
    """``(n, k, sorted masks)``: equal exactly for isomorphic matroids.

    Sparse paving matroids are keyed by their circuit-hyperplanes, other
    matroids by their non-bases (the complement of the basis indicator).
    """
    n, k, sets = _nonbases(m)
    return (n, k, canonical_hypergraph(n, sets).form)


def canonical_string(m) -> str:
    n, k, form = canonical_form(m)
    width = (n + 3) // 4
    return f"{n}:{k}:" + ",".join(format(s, f"0{width}x") for s in form)


def canonical_relabeling(m) -> list[int]:
    """Element -> position map realizing the canonical form."""
    n, _, sets = _nonbases(m)
    return canonical_hypergraph(n, sets).labeling


def automorphisms(m) -> list[list[int]]:
    """Generators of the automorphism group found by the canonical search
    (each a list mapping element i to its image)."""
    n, _, sets = _nonbases(m)
    return canonical_hypergraph(n, sets).automorphisms


def automorphism_group(m, limit: int = 100_000) -> set[tuple[int, ...]]:
    """The full automorphism group by closing the generators (small groups)."""
    n, _, sets = _nonbases(m)
    gens = [tuple(a) for a in canonical_hypergraph(n, sets).automorphisms]
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        g = frontier.pop()
        for a in gens:
            h = tuple(a[g[i]] for i in range(n))
            if h not in group:
                group.add(h)
                if len(group) > limit:
                    raise OverflowError("automorphism group larger than the limit")
                frontier.append(h)
    return group


def are_isomorphic(a, b) -> bool:
    return canonical_form(a) == canonical_form(b)


def permute(m, perm) -> SparsePavingMatroid | Matroid:
    """The image of ``m`` under the element map i -> perm[i]."""
    perm = list(perm)
    if sorted(perm) != list(range(len(perm))):
        raise ValueError("not a permutation")
    if isinstance(m, SparsePavingMatroid):
        return SparsePavingMatroid(m.n, m.k, tuple(sorted(_image(list(m.chs), perm))))
    mat = as_matroid(m)
    bases = _image(list(mat.bases()), perm)
    return Matroid.from_bases(mat.n, bases, check=False)


def brute_force_form(m) -> tuple[int, int, tuple[int, ...]]:
    """Least image over all n! orderings; a slow oracle for small n."""
    n, k, sets = _nonbases(m)
    best = None
    for perm in itertools.permutations(range(n)):
        img = _image(sets, list(perm))
        if best is None or img < best:
            best = img
    return (n, k, best if best is not None else ())
