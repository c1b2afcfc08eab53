"""Sparse paving enumeration over Johnson graphs and the censuses built on it:
TTT matroids, relaxation graphs, maximal extensions and Ingleton violators
on eight elements."""

from __future__ import annotations

import enum
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import networkx as nx

from ..core import (
    SparsePavingMatroid,
    contains_vamos_configuration,
    fmt_set,
    ingleton_check,
    mask_of,
    minor,
    popcount,
    relax,
)
from .canon import canonical_form, canonical_string
from .named import A, B, C, D, DISPLACED, TTT_LABELS, ag32, cd_chs, point_mask, t3

# -- stable sets of J(n, k) -------------------------------------------------------


def compatible(a: int, b: int, k: int) -> bool:
    """Two k-sets can both be circuit-hyperplanes iff they share at most k-2 points."""
    return popcount(a & b) <= k - 2


def all_ksets(n: int, k: int) -> list[int]:
    return sorted(mask_of(c) for c in itertools.combinations(range(n), k))


def is_stable(chs: Sequence[int], k: int) -> bool:
    return all(compatible(a, b, k) for a, b in itertools.combinations(chs, 2))


def candidate_pool(n: int, k: int, must_contain: Sequence[int], pool: Iterable[int] | None = None) -> list[int]:
    """Pool members (default: all k-sets) compatible with every forced CH."""
    must = set(must_contain)
    src = all_ksets(n, k) if pool is None else sorted(set(pool))
    return [s for s in src if s not in must and popcount(s) == k and all(compatible(s, c, k) for c in must)]


def enumerate_sparse_paving(n: int, k: int, must_contain: Sequence[int] = (),
                            pool: Iterable[int] | None = None) -> Iterator[SparsePavingMatroid]:
    """Every sparse paving matroid whose CHs are ``must_contain`` plus a stable
    subset of ``pool``, in a fixed order (include before exclude, pool ascending)."""
    must = tuple(sorted(set(must_contain)))
    for c in must:
        if popcount(c) != k or c >> n:
            raise ValueError(f"{c:#x} is not a {k}-subset of a {n}-set")
    if not is_stable(must, k):
        raise ValueError("forced circuit-hyperplanes are not pairwise compatible")
    cand = candidate_pool(n, k, must, pool)

    def rec(i: int, chosen: list[int]) -> Iterator[tuple[int, ...]]:
        if i == len(cand):
            yield tuple(sorted(must + tuple(chosen)))
            return
        s = cand[i]
        if all(compatible(s, c, k) for c in chosen):
            chosen.append(s)
            yield from rec(i + 1, chosen)
            chosen.pop()
        yield from rec(i + 1, chosen)

    for chs in rec(0, []):
        yield SparsePavingMatroid(n, k, chs)


def maximal_extensions(sp: SparsePavingMatroid, pool: Iterable[int] | None = None) -> list[SparsePavingMatroid]:
    """Maximal sparse paving matroids having ``sp`` as a relaxation, up to
    isomorphism: maximal cliques of the compatibility graph on the pool."""
    cand = candidate_pool(sp.n, sp.k, sp.chs, pool)
    g = nx.Graph()
    g.add_nodes_from(cand)
    g.add_edges_from((a, b) for a, b in itertools.combinations(cand, 2) if compatible(a, b, sp.k))
    found: dict = {}
    cliques = list(nx.find_cliques(g)) if cand else [[]]
    for clique in cliques:
        m = SparsePavingMatroid(sp.n, sp.k, tuple(sorted(sp.chs + tuple(clique))), sp.labels)
        found.setdefault(canonical_form(m), m)
    return [found[key] for key in sorted(found)]


def relaxation_forms(sp: SparsePavingMatroid) -> set:
    """Canonical forms of every matroid obtained from ``sp`` by relaxing any
    set of circuit-hyperplanes (``sp`` itself included)."""
    level = {canonical_form(sp): sp}
    seen = set(level)
    while level:
        nxt = {}
        for m in level.values():
            for c in m.chs:
                r = relax(m, c)
                key = canonical_form(r)
                if key not in seen:
                    seen.add(key)
                    nxt[key] = r
        level = nxt
    return seen


# -- TTT census ---------------------------------------------------------------


class Kind(enum.Enum):
    FIRST = "first"
    SECOND = "second"


# circuit-hyperplanes whose presence puts a Vamos configuration in the
# contraction of (1,1)
VAMOS_TTT = (C(0) | D(-1), C(0) | D(0), C(0) | D(1), A(1) | B(1), DISPLACED)


@dataclass
class TTTRecord:
    matroid: SparsePavingMatroid
    kind: Kind
    ch_count: int
    canonical: str
    vamos_minor: bool = False

    def to_json(self) -> dict:
        return {
            "format": "matext-ttt/1",
            "kind": self.kind.value,
            "ch_count": self.ch_count,
            "chs": [fmt_set(c, TTT_LABELS) for c in self.matroid.chs],
            "canonical": self.canonical,
            "vamos_minor": self.vamos_minor,
        }


def ttt_pools() -> tuple[list[int], list[int]]:
    """Extra circuit-hyperplanes for each kind: the nine C_iD_j for the first
    kind, and those C_iD_j compatible with the displaced set for the second."""
    first = cd_chs()
    second = [c for c in first if compatible(c, DISPLACED, 5)]
    return first, second


def _ttt_families() -> list[tuple[Kind, tuple[int, ...]]]:
    base = tuple(t3().chs)
    first, second = ttt_pools()
    out = []
    for r in range(len(first) + 1):
        for extra in itertools.combinations(first, r):
            out.append((Kind.FIRST, base + extra))
    for r in range(len(second) + 1):
        for extra in itertools.combinations(second, r):
            out.append((Kind.SECOND, base + (DISPLACED,) + extra))
    return out


def enumerate_ttt(workers: int = 1) -> list[TTTRecord]:
    """All TTT matroids of either kind up to isomorphism, sorted by kind,
    decreasing CH count and canonical string.

    The candidates come from the structural lemmas: a sparse paving matroid
    containing the CHs of T3 adds only C_iD_j sets, A0B0, or one displaced
    copy of A0B0; the first kind forbids A0B0, the second contains the
    displaced set through (1,1), and the C_iD_j sets then must be compatible
    with it.
    """
    families = _ttt_families()

    def work(item):
        kind, chs = item
        m = SparsePavingMatroid(9, 5, tuple(sorted(chs)), TTT_LABELS)
        return kind, m, canonical_string(m)

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            done = list(ex.map(work, families))
    else:
        done = [work(f) for f in families]
    # a matroid could in principle be of both kinds; keep the first kind
    seen: dict = {}
    for kind, m, key in done:
        if key not in seen or (kind is Kind.FIRST and seen[key][0] is Kind.SECOND):
            seen[key] = (kind, m)
    vam = {r.canonical for r in second_kind_vamos_minors(_records_from(seen))}
    recs = []
    for key, (kind, m) in seen.items():
        recs.append(TTTRecord(m, kind, len(m.chs), key, key in vam))
    recs.sort(key=lambda r: (r.kind is Kind.SECOND, -r.ch_count, r.canonical))
    return recs


def _records_from(seen: dict) -> list[TTTRecord]:
    return [TTTRecord(m, kind, len(m.chs), key) for key, (kind, m) in seen.items()]


def contract_point(m: SparsePavingMatroid, x: int, y: int):
    """Contraction of the point (x, y) of F3 x F3."""
    return minor(m, 0, point_mask((x, y)))


def second_kind_vamos_minors(records: Sequence[TTTRecord] | None = None) -> list[TTTRecord]:
    """Second-kind TTT matroids with a labeling containing the five CHs that
    give a Vamos configuration once (1,1) is contracted.

    Every second-kind family is generated with the displaced set through
    (1,1), so it is enough to test the generated labelings; the result is
    deduplicated by canonical form.
    """
    if records is None:
        records = enumerate_ttt()
    first, second = ttt_pools()
    base = tuple(t3().chs)
    want = set(VAMOS_TTT)
    hits: dict = {}
    keys = {r.canonical for r in records if r.kind is Kind.SECOND}
    for r in range(len(second) + 1):
        for extra in itertools.combinations(second, r):
            chs = tuple(sorted(base + (DISPLACED,) + extra))
            if not want <= set(chs):
                continue
            m = SparsePavingMatroid(9, 5, chs, TTT_LABELS)
            key = canonical_string(m)
            if key in keys and key not in hits:
                hits[key] = m
    out = []
    for key in sorted(hits):
        m = hits[key]
        c = contract_point(m, 1, 1)
        if contains_vamos_configuration(c) is None:
            raise AssertionError(f"contraction of (1,1) in {key} has no Vamos configuration")
        out.append(TTTRecord(m, Kind.SECOND, len(m.chs), key, True))
    return out


def write_jsonl(records: Sequence[TTTRecord], path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")


# -- relaxation graphs --------------------------------------------------------


@dataclass
class RelaxationGraph:
    nodes: dict  # canonical string -> SparsePavingMatroid
    edges: list  # (from, to) canonical strings, M -> relax(M, C)

    def columns(self) -> dict:
        """CH count -> node keys, sorted."""
        cols: dict = {}
        for key, m in self.nodes.items():
            cols.setdefault(len(m.chs), []).append(key)
        return {c: sorted(v) for c, v in sorted(cols.items(), reverse=True)}

    def sinks(self) -> list[str]:
        out = {a for a, _ in self.edges}
        return sorted(k for k in self.nodes if k not in out)

    def to_dot(self, names: dict | None = None) -> str:
        names = names or {}
        ids = {key: f"n{i}" for i, key in enumerate(sorted(self.nodes, key=lambda k: (-len(self.nodes[k].chs), k)))}
        lines = ["// matext-relaxation-graph/1", "digraph relaxations {", "  rankdir=LR;"]
        for count, keys in self.columns().items():
            lines.append(f"  subgraph col{count} {{ rank=same;")
            for key in keys:
                label = names.get(key, f"{count} CHs")
                lines.append(f'    {ids[key]} [label="{label}", chs={count}];')
            lines.append("  }")
        for a, b in self.edges:
            lines.append(f"  {ids[a]} -> {ids[b]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def relaxation_graph(family: Sequence[SparsePavingMatroid]) -> RelaxationGraph:
    """Edges M -> M' whenever relaxing one CH of M gives a matroid isomorphic
    to the family member M'."""
    family = list(family)
    if not family:
        return RelaxationGraph({}, [])
    shapes = {(m.n, m.k) for m in family}
    if len(shapes) > 1:
        raise ValueError(f"family mixes ground sets / ranks {sorted(shapes)}")
    nodes = {}
    for m in family:
        nodes.setdefault(canonical_string(m), m)
    edges = set()
    for key, m in nodes.items():
        for c in m.chs:
            r = canonical_string(relax(m, c))
            if r in nodes:
                edges.add((key, r))
    return RelaxationGraph(nodes, sorted(edges))


# -- Ingleton census on eight elements --------------------------------------


def sparse_paving_classes(n: int, k: int, workers: int = 1) -> list[SparsePavingMatroid]:
    """All sparse paving matroids of rank k on n elements up to isomorphism,
    grown one circuit-hyperplane at a time with canonical deduplication."""
    ksets = all_ksets(n, k)
    level = {canonical_string(SparsePavingMatroid(n, k, ())): SparsePavingMatroid(n, k, ())}
    out = dict(level)

    def grow(m: SparsePavingMatroid) -> list[tuple[str, SparsePavingMatroid]]:
        res = []
        for s in ksets:
            if s in m.chs or not all(compatible(s, c, k) for c in m.chs):
                continue
            e = SparsePavingMatroid(n, k, tuple(sorted(m.chs + (s,))))
            res.append((canonical_string(e), e))
        return res

    while level:
        nxt: dict = {}
        items = list(level.values())
        if workers > 1:
            with ThreadPoolExecutor(workers) as ex:
                batches = list(ex.map(grow, items))
        else:
            batches = [grow(m) for m in items]
        for batch in batches:
            for key, e in batch:
                if key not in out and key not in nxt:
                    nxt[key] = e
        out.update(nxt)
        level = nxt
    return [out[key] for key in sorted(out, key=lambda s: (s.count(","), s))]


@dataclass
class IngletonCensus:
    count: int
    violators: list  # SparsePavingMatroid
    classes: int  # sparse paving classes examined
    vamos_agrees: bool
    all_relax_ag32: bool


def count_ingleton_violators_8(workers: int = 1) -> IngletonCensus:
    """Sparse paving (8,4) matroids violating Ingleton, up to isomorphism.

    Every class is run through both the Ingleton scan and the Vamos
    configuration search; the two filters must agree.
    """
    classes = sparse_paving_classes(8, 4, workers)
    ag = relaxation_forms(ag32())
    violators = []
    agree = True
    for m in classes:
        ing = ingleton_check(m) is not None
        vam = contains_vamos_configuration(m) is not None
        if ing != vam:
            agree = False
        if ing:
            violators.append(m)
    if not agree:
        raise AssertionError("Ingleton scan and Vamos configuration search disagree")
    in_ag = all(canonical_form(m) in ag for m in violators)
    return IngletonCensus(len(violators), violators, len(classes), agree, in_ag)


def is_relaxation_of(m: SparsePavingMatroid, top: SparsePavingMatroid) -> bool:
    """Is ``m`` isomorphic to a relaxation of ``top``?"""
    return canonical_form(m) in relaxation_forms(top)
