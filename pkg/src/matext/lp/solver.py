"""Feasibility of extension LPs with exactly verified verdicts.

HiGHS (through scipy) locates a solution or a Farkas ray in floating point;
the answer is then rebuilt in rationals and re-checked against every row.  A
verdict is never returned on floating-point evidence alone.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from . import exact
from .model import LPModel, evaluate, witness_function

log = logging.getLogger(__name__)

PRESOLVE_TOL = 1e-9
EXACT_SIMPLEX_MAX_VARS = 300


class CertificateError(RuntimeError):
    """The float answer could not be turned into an exact proof."""


@dataclass
class FeasibilityVerdict:
    feasible: bool
    model: LPModel = field(repr=False)
    witness: object = None  # SetFunction over the augmented ground set
    certificate: dict | None = None  # global row index -> Fraction
    method: str = ""
    seconds: float = 0.0

    @property
    def status(self) -> str:
        return "feasible" if self.feasible else "infeasible"

    def digest(self) -> str:
        import hashlib
        h = hashlib.sha256()
        if self.feasible:
            h.update(repr(self.witness.values).encode())
        else:
            h.update(repr(sorted(self.certificate.items())).encode())
        return h.hexdigest()[:16]


# -- exact checks ---------------------------------------------------------------

def verify_witness(model: LPModel, g) -> list[int]:
    """Indices of rows violated by the exact set function ``g`` (empty if none).
    Base pinning is checked too (reported as index -1)."""
    vals = g.values
    bad = []
    fv = model.base.f.values
    if any(vals[m] != fv[m] for m in range(1 << model.n_base)):
        bad.append(-1)
    if vals[0] != 0:
        bad.append(-1)
    den = 1
    for x in vals:
        if isinstance(x, Fraction):
            den = math.lcm(den, x.denominator)
    ints = [int(x * den) for x in vals]
    dtype = np.int64 if max(abs(v) for v in ints) < 2 ** 60 // 8 else object
    G = np.array(ints, dtype=dtype)
    masks, coefs = model.shannon()
    s = (G[masks] * coefs).sum(axis=1)
    bad.extend(np.nonzero(s < 0)[0].tolist())
    ns = model.shannon_count
    for i, r in enumerate(model.step_rows):
        lhs = evaluate(r.terms, g)
        if (r.rel == "=" and lhs != r.rhs) or (r.rel == ">=" and lhs < r.rhs):
            bad.append(ns + i)
    return bad


def verify_certificate(model: LPModel, cert: dict) -> Fraction:
    """Exact Farkas check.  Combines the certified rows with their multipliers
    (nonnegative on inequalities) after substituting pinned base values.
    Returns the positive gap of the resulting ``0 >= gap`` contradiction, or
    raises CertificateError."""
    fv = model.base.f.values
    acc: dict = {}
    const = Fraction(0)  # value of the pinned part of the combined left side
    rhs = Fraction(0)
    for idx, w in cert.items():
        if w == 0:
            continue
        r = model.row(idx)
        if r.rel == ">=" and w < 0:
            raise CertificateError(f"negative multiplier on inequality row {idx}")
        rhs += w * r.rhs
        for m, c in r.terms.items():
            if model.pinned(m):
                const += w * c * fv[m]
            else:
                acc[m] = acc.get(m, 0) + w * c
    leftover = {m: c for m, c in acc.items() if c != 0}
    if leftover:
        raise CertificateError(f"combination leaves {len(leftover)} free variables")
    gap = rhs - const
    if gap <= 0:
        raise CertificateError("combination does not produce a contradiction")
    return gap


# -- matrix assembly --------------------------------------------------------------

class _Assembled:
    def __init__(self, model: LPModel):
        self.model = model
        n = model.n
        free = model.free_masks()
        col = np.full(1 << n, -1, dtype=np.int64)
        col[free] = np.arange(len(free))
        self.free = free
        self.col = col
        self.nvar = len(free)
        fv = model.base.f.values
        self.base_exact = fv
        base_float = np.zeros(1 << n)
        base_float[: 1 << model.n_base] = [float(x) for x in fv]
        masks, coefs = model.shannon()
        cols = col[masks]
        pinned = cols < 0
        const = (np.where(pinned, base_float[masks], 0.0) * coefs).sum(axis=1)
        has_free = ((~pinned) & (coefs != 0)).any(axis=1)
        self.ineq_ids = np.nonzero(has_free)[0]
        self.dead_ids = np.nonzero(~has_free)[0]
        keep = self.ineq_ids
        r_idx = np.repeat(np.arange(len(keep)), 4)
        c_idx = cols[keep].ravel()
        vals = coefs[keep].ravel().astype(float)
        ok = (c_idx >= 0) & (vals != 0)
        self.A = sp.csr_matrix((vals[ok], (r_idx[ok], c_idx[ok])), shape=(len(keep), self.nvar))
        self.b = -const[keep]  # A x >= b
        eq_r, eq_c, eq_v, eq_b = [], [], [], []
        ns = model.shannon_count
        self.eq_ids = []
        for i, r in enumerate(model.step_rows):
            k = 0.0
            rowi = len(self.eq_ids)
            for m, c in r.terms.items():
                if col[m] < 0:
                    k += float(c) * float(fv[m])
                else:
                    eq_r.append(rowi)
                    eq_c.append(col[m])
                    eq_v.append(float(c))
            eq_b.append(float(r.rhs) - k)
            self.eq_ids.append(ns + i)
        self.E = sp.csr_matrix((eq_v, (eq_r, eq_c)), shape=(len(self.eq_ids), self.nvar))
        self.d = np.array(eq_b)

    def dead_row_violation(self) -> int | None:
        """A Shannon row with no free variable that the base already violates."""
        if not len(self.dead_ids):
            return None
        masks, coefs = self.model.shannon()
        fv = self.base_exact
        for idx in self.dead_ids.tolist():
            s = sum(c * fv[m] for m, c in zip(masks[idx].tolist(), coefs[idx].tolist()) if c)
            if s < 0:
                return idx
        return None


def _rationalize(x: float, maxden: int) -> Fraction:
    return Fraction(x).limit_denominator(maxden)


_DENOMS = (1, 2, 6, 12, 60, 840, 27720, 10 ** 6)
# interior point with crossover is far faster on the large Shannon systems and
# still ends at a basic solution; dual simplex is the fallback
_METHODS = ("highs-ipm", "highs")


def implied_upper_bound(model: LPModel) -> int:
    """A bound every feasible g satisfies: each new element has
    g(z) <= g(current ground set), so g doubles at most once per element."""
    top = model.base.f.values[-1]
    return max(int(math.ceil(top)), 1) * 2 ** (model.n - model.n_base)


def _exact_witness(asm: _Assembled, x: np.ndarray):
    model = asm.model
    for maxden in _DENOMS:
        vals = {int(m): _rationalize(float(v), maxden) for m, v in zip(asm.free, x)}
        g = witness_function(model, vals)
        if not verify_witness(model, g):
            return g, f"rationalized(maxden={maxden})"
    # a basic solution is pinned down by its tight rows
    slack = asm.A @ x - asm.b
    tight = np.nonzero(np.abs(slack) <= 1e-7)[0]
    eqs, rhs = _exact_rows(asm, [int(asm.ineq_ids[t]) for t in tight] + list(asm.eq_ids))
    sol = exact.solve_sparse(eqs, rhs)
    if sol is not None:
        vals = {int(m): sol.get(int(m), Fraction(0)) for m in asm.free}
        g = witness_function(model, vals)
        if not verify_witness(model, g):
            return g, "tight-system"
    return None, ""


def _exact_rows(asm: _Assembled, ids) -> tuple[list[dict], list[Fraction]]:
    """Rows in free-variable form with exact constants: terms . x (=) rhs."""
    model = asm.model
    fv = asm.base_exact
    eqs, rhs = [], []
    for idx in ids:
        r = model.row(idx)
        k = Fraction(0)
        t = {}
        for m, c in r.terms.items():
            if model.pinned(m):
                k += c * fv[m]
            else:
                t[m] = c
        eqs.append(t)
        rhs.append(Fraction(r.rhs) - k)
    return eqs, rhs


def _farkas_float(asm: _Assembled):
    """Solve for w >= 0, y free with A'w + E'y = 0 and b.w + d.y = 1."""
    R = asm.A.shape[0]
    Q = asm.E.shape[0]
    top = sp.hstack([asm.A.T, asm.E.T, -asm.E.T]).tocsr()
    norm = sp.csr_matrix(np.concatenate([asm.b, asm.d, -asm.d])[None, :])
    A_eq = sp.vstack([top, norm]).tocsc()
    b_eq = np.zeros(asm.nvar + 1)
    b_eq[-1] = 1.0
    c = np.ones(R + 2 * Q)
    res = None
    for method in _METHODS:
        res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=(0, None), method=method)
        if res.status in (0, 2):
            break
    if res.status != 0:
        return None
    z = res.x
    return z[:R], z[R:R + Q] - z[R + Q:]


def _exact_certificate(asm: _Assembled, w: np.ndarray, y: np.ndarray) -> tuple[dict, str] | None:
    model = asm.model
    ids = [int(i) for i in asm.ineq_ids] + list(asm.eq_ids)
    vec = np.concatenate([w, y])
    support = [k for k in range(len(vec)) if abs(vec[k]) > PRESOLVE_TOL]
    for maxden in _DENOMS:
        cert = {}
        for k in support:
            q = _rationalize(float(vec[k]), maxden)
            if q:
                cert[ids[k]] = q
        try:
            verify_certificate(model, cert)
            return cert, f"rationalized(maxden={maxden})"
        except CertificateError:
            continue
    # exact solve on the support: sum_k v_k row_k = 0 on free vars, sum v_k rhs_k = 1
    rows, rhs = _exact_rows(asm, [ids[k] for k in support])
    eqs: dict = {}
    for k, (t, b) in zip(support, zip(rows, rhs)):
        for m, c in t.items():
            eqs.setdefault(m, {})[k] = c
    system = list(eqs.values()) + [{k: b for k, b in zip(support, rhs)}]
    sol = exact.solve_sparse(system, [0] * len(eqs) + [1])
    if sol is not None:
        cert = {ids[k]: v for k, v in sol.items() if v}
        try:
            verify_certificate(model, cert)
            return cert, "support-system"
        except CertificateError:
            pass
    return None


def _exact_simplex(asm: _Assembled):
    model = asm.model
    ineq_ids = [int(i) for i in asm.ineq_ids]
    ineq, eq = [], []
    free_index = {int(m): j for j, m in enumerate(asm.free)}
    for target, ids in ((ineq, ineq_ids), (eq, asm.eq_ids)):
        rows, rhs = _exact_rows(asm, ids)
        for t, b in zip(rows, rhs):
            target.append(({free_index[m]: c for m, c in t.items()}, b))
    status, payload = exact.simplex_feasibility(ineq, eq, asm.nvar)
    if status == "feasible":
        vals = {int(m): payload[j] for m, j in free_index.items()}
        return witness_function(model, vals), None
    w, y = payload
    cert = {i: v for i, v in zip(ineq_ids + list(asm.eq_ids), list(w) + list(y)) if v}
    return None, cert


def solve_feasibility(model: LPModel, exact_only: bool = False) -> FeasibilityVerdict:
    t0 = time.perf_counter()
    asm = _Assembled(model)

    def done(**kw):
        return FeasibilityVerdict(model=model, seconds=time.perf_counter() - t0, **kw)

    bad = asm.dead_row_violation()
    if bad is not None:
        cert = {bad: Fraction(1)}
        verify_certificate(model, cert)
        return done(feasible=False, certificate=cert, method="base-violation")
    if asm.nvar == 0:
        g = witness_function(model, {})
        if verify_witness(model, g):
            raise CertificateError("model without free variables is inconsistent but no row found")
        return done(feasible=True, witness=g, method="trivial")

    if not exact_only:
        # g >= 0 follows from monotonicity; the upper bound is implied as
        # well, and both keep HiGHS away from unbounded directions
        bounds = (0, implied_upper_bound(model))
        for method in _METHODS:
            res = linprog(np.zeros(asm.nvar), A_ub=-asm.A, b_ub=-asm.b,
                          A_eq=asm.E if asm.E.shape[0] else None, b_eq=asm.d if asm.E.shape[0] else None,
                          bounds=bounds, method=method)
            log.debug("%s status %s: %s", method, res.status, res.message)
            if res.status in (0, 2):
                break
        if res.status == 0:
            g, how = _exact_witness(asm, res.x)
            if g is not None:
                return done(feasible=True, witness=g, method=f"highs+{how}")
        elif res.status == 2:
            fk = _farkas_float(asm)
            if fk is not None:
                got = _exact_certificate(asm, *fk)
                if got is not None:
                    cert, how = got
                    return done(feasible=False, certificate=cert, method=f"highs-farkas+{how}")
    if asm.nvar > EXACT_SIMPLEX_MAX_VARS and not exact_only:
        raise CertificateError("float presolve inconclusive and the model is too large for exact simplex")
    g, cert = _exact_simplex(asm)
    if g is not None:
        if verify_witness(model, g):
            raise CertificateError("exact simplex witness failed verification")
        return done(feasible=True, witness=g, method="exact-simplex")
    verify_certificate(model, cert)
    return done(feasible=False, certificate=cert, method="exact-simplex")
