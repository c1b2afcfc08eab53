"""Extension chains (CI / AK / CL) checked by one LP over the augmented
ground set, plus refutation search and minor-closure checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from ..core import Polymatroid, SparsePavingMatroid, as_matroid, submasks
from .model import ExtensionStep, build_model
from .solver import FeasibilityVerdict, solve_feasibility


def _polymatroid(p) -> Polymatroid:
    if isinstance(p, SparsePavingMatroid):
        return p.matroid
    return p


def check_chain(p, steps: Sequence[ExtensionStep], exact_only: bool = False) -> FeasibilityVerdict:
    """Is there one polymatroid extension carrying every step at once?

    Infeasible refutes the corresponding iterated property for this sequence
    of pairs; Feasible says nothing about deeper iterations.
    """
    p = _polymatroid(p)
    model = build_model(p, steps)
    verdict = solve_feasibility(model, exact_only=exact_only)
    if verdict.feasible:
        _post_checks(verdict)
    return verdict


def _post_checks(verdict: FeasibilityVerdict):
    """Consequences every feasible witness must satisfy."""
    g = verdict.witness
    n = verdict.model.n_base
    for st in verdict.model.steps:
        if st.kind == "AK":
            z = 1 << n
            if g(z) != g.mutual(st.x, st.y):
                raise AssertionError(f"AK witness with g(z) != g(X:Y) for {st}")
        n += st.new_count


def ak_element_value(verdict: FeasibilityVerdict, step_index: int):
    """g(z) for the AK/CI step ``step_index`` of a feasible verdict."""
    n = verdict.model.n_base
    for st in verdict.model.steps[:step_index]:
        n += st.new_count
    return verdict.witness(1 << n)


def ci(x: int, y: int) -> ExtensionStep:
    return ExtensionStep("CI", x, y)


def ak(x: int, y: int) -> ExtensionStep:
    return ExtensionStep("AK", x, y)


def cl(x1: int, x2: int, y: int) -> ExtensionStep:
    return ExtensionStep("CL", x1, y, x2)


def dual_ttt_ak_steps(conclude: bool = True) -> list[ExtensionStep]:
    """AK steps refuting the AK property for a dual TTT matroid.

    For j = -1, 1 the pair (L(-1,j) L(1,j), L(0,j)), where L(i,j) = {(i,k), (i,l)}
    and {j,k,l} = F3, adds an element z_j.  Those two steps only force the
    lines L(-1,0), L(0,0), {z_-1, z_1}, L(1,0) to induce the Vamos
    polymatroid; the extension itself still exists.  With ``conclude`` a third
    AK step for the pair (L(0,0) z_-1 z_1, L(-1,0)) is appended, the step that
    the Vamos polymatroid cannot take.
    """
    from ..catalog.named import F3, point_mask

    def L(i, j):
        return point_mask(*((i, y) for y in F3 if y != j))

    steps = [ak(L(-1, j) | L(1, j), L(0, j)) for j in (-1, 1)]
    if conclude:
        zz = (1 << 9) | (1 << 10)
        steps.append(ak(L(0, 0) | zz, L(-1, 0)))
    return steps


def dual_t3_ak_refutation(m, conclude: bool = True) -> FeasibilityVerdict:
    m = as_matroid(m)
    if m.n != 9:
        raise ValueError("expected a matroid on the nine points of F3 x F3")
    return check_chain(m, dual_ttt_ak_steps(conclude))


@dataclass
class SearchResult:
    sequence: list | None
    verdict: FeasibilityVerdict | None = None
    solved: int = 0
    truncated: bool = False
    note: str = ""


def search_refutation(p, kind: str, depth: int, pool: Sequence[tuple[int, int]],
                      budget: int | None = 1000) -> SearchResult:
    """Depth-first search for an infeasible chain of ``kind`` steps.

    Steps only refer to base elements, so a chain's LP does not depend on the
    order of its steps; sequences are taken as strictly increasing index
    tuples into ``pool``, visited depth-first in pool order.
    """
    if not pool:
        raise ValueError("empty pair pool")
    kind = kind.upper()
    p = _polymatroid(p)
    pool = list(pool)
    result = SearchResult(None)
    if budget is not None and budget <= 0:
        result.truncated = True
        result.note = "budget exhausted before the first LP"
        return result

    def rec(prefix: list[int]) -> bool:
        start = prefix[-1] + 1 if prefix else 0
        for i in range(start, len(pool)):
            if budget is not None and result.solved >= budget:
                result.truncated = True
                result.note = f"budget of {budget} LPs exhausted"
                return False
            seq = prefix + [i]
            steps = [ExtensionStep(kind, *pool[j]) for j in seq]
            v = check_chain(p, steps)
            result.solved += 1
            if not v.feasible:
                result.sequence = [pool[j] for j in seq]
                result.verdict = v
                return True
            if len(seq) < depth and rec(seq):
                return True
            if result.truncated:
                return False
        return False

    rec([])
    return result


def verify_minor_closure(g, kind: str, x: int, y: int, u: int, z: int) -> bool:
    """Given a witness ``g`` for a CI/AK step on (XU, YU) with new element set
    ``z``, check that the contraction h(A) = g(AU) - g(U) satisfies the step
    rows for (X, Y).  A ``g`` that is not a witness on (XU, YU) gives False."""
    kind = kind.upper()
    if kind not in ("CI", "AK"):
        raise ValueError(f"minor closure is defined for CI and AK, not {kind}")
    if (x | y) & u or z & (x | y | u):
        raise ValueError("X, Y must avoid U and the new elements")
    if not _step_holds(g, kind, x | u, y | u, z):
        return False

    def h(a):
        return g(a | u) - g(u)

    class _H:
        def __call__(self, a):
            return h(a)

        def cond(self, a, c):
            return h(a | c) - h(c)

        def mutual(self, a, b, c=0):
            return h(a | c) + h(b | c) - h(a | b | c) - h(c)

    return _step_holds(_H(), kind, x, y, z)


def _step_holds(g, kind: str, x: int, y: int, z: int) -> bool:
    if g.cond(z, x) != 0:
        return False
    if kind == "CI":
        return g.cond(z, y) == 0 and g.mutual(x, y, z) == 0
    if kind == "AK":
        return all(g.cond(xp, z) == g.cond(xp, y) for xp in submasks(x))
    raise ValueError(f"minor closure is defined for CI and AK, not {kind}")


def disjoint_pairs(n: int, size: int = 2) -> list[tuple[int, int]]:
    """Unordered pairs of disjoint ``size``-subsets, ascending."""
    subs = [sum(1 << i for i in c) for c in itertools.combinations(range(n), size)]
    return [(a, b) for a, b in itertools.combinations(subs, 2) if not a & b]
