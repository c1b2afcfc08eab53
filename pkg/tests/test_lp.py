import itertools
from fractions import Fraction

import numpy as np
import pytest

from matext.core import Polymatroid, SetFunction, default_labels, parse_set
from matext.lp.chains import (
    ak,
    check_chain,
    ci,
    cl,
    disjoint_pairs,
    search_refutation,
    verify_minor_closure,
)
from matext.lp.model import build_model, build_shannon, build_step_rows, shannon_arrays
from matext.lp.solver import CertificateError, verify_certificate, verify_witness
from matext.catalog.named import uniform, vamos, vamos_hat

from conftest import random_matroid

LAB = default_labels(8)


def s(text):
    return parse_set(text, LAB)


def test_shannon_row_counts():
    assert len(build_shannon(3)) == 3 + 6
    assert len(shannon_arrays(12)[0]) == 12 + 66 * 2 ** 10
    m = build_model(uniform(4, 8).matroid, [ci(s("01"), s("23"))] * 4)
    assert m.n == 12 and m.shannon_count == 12 + 67584
    assert m.variable_count == 4095 - 255


def test_uniform_rank_satisfies_shannon_rows():
    for n in range(1, 7):
        f = uniform(1, n).matroid.f
        masks, coefs = shannon_arrays(n)
        vals = np.array(f.values)
        assert ((vals[masks] * coefs).sum(axis=1) >= 0).all()


def test_ci_step_rows_on_vamos():
    rows = build_step_rows(ci(s("01"), s("23")), 8)
    z = 1 << 8
    assert rows[0].terms == {s("01") | z: 1, s("01"): -1}
    assert rows[1].terms == {s("23") | z: 1, s("23"): -1}
    assert rows[2].terms == {s("01") | z: 1, s("23") | z: 1, s("0123") | z: -1, z: -1}


def test_step_outside_ground_rejected():
    with pytest.raises(ValueError):
        build_step_rows(ci(1 << 9, 1), 8)
    with pytest.raises(ValueError):
        cl(s("01"), 0, s("12"))


def test_vamos_ak_infeasible_with_certificate():
    v = check_chain(vamos(), [ak(s("2345"), s("01"))])
    assert not v.feasible
    assert verify_certificate(v.model, v.certificate) > 0


def test_vamos_ci_feasible_like_line_01():
    v = check_chain(vamos(), [ci(s("0123"), s("0145"))])
    assert v.feasible
    assert verify_witness(v.model, v.witness) == []
    assert v.witness(1 << 8) == 2  # g(z) = g(0123 : 0145) = 2


def test_empty_chain_returns_base():
    base = vamos().matroid
    v = check_chain(base, [])
    assert v.feasible and v.witness == base.f


def test_corrupted_certificate_rejected():
    v = check_chain(vamos(), [ak(s("2345"), s("01"))])
    cert = dict(v.certificate)
    k = next(iter(cert))
    cert[k] = cert[k] * 2 + 1
    with pytest.raises(CertificateError):
        verify_certificate(v.model, cert)


def test_ak_witness_value_equals_mutual_information(rng):
    for _ in range(6):
        m = random_matroid(rng, 6, 3)
        x, y = rng.sample([0b11, 0b1100, 0b110000, 0b101, 0b1010], 2)
        v = check_chain(m, [ak(x, y)])
        assert v.feasible  # linear matroids have AK extensions
        g = v.witness
        assert g(1 << 6) == g.mutual(x, y)


def test_ak_with_equal_sides_feasible():
    v = check_chain(vamos(), [ak(s("01"), s("01"))])
    assert v.feasible


def test_minor_closure_of_ci_witness():
    v = check_chain(vamos(), [ci(s("0123"), s("0145"))])
    z = 1 << 8
    g = v.witness
    assert verify_minor_closure(g, "CI", s("23"), s("45"), s("01"), z)
    assert verify_minor_closure(g, "CI", s("0123"), s("0145"), 0, z)
    vals = list(g.values)
    vals[s("01") | z] += 1
    assert not verify_minor_closure(SetFunction(9, tuple(vals)), "CI", s("23"), s("45"), s("01"), z)


def test_minor_closure_on_generated_witnesses(rng):
    for _ in range(6):
        m = random_matroid(rng, 6, rng.choice((2, 3)))
        kind = rng.choice(("CI", "AK"))
        u = 1 << 5
        x, y = 0b11, 0b1100
        v = check_chain(m, [ci(x | u, y | u) if kind == "CI" else ak(x | u, y | u)])
        if v.feasible:
            assert verify_minor_closure(v.witness, kind, x, y, u, 1 << 6)


def test_infeasibility_is_monotone_in_steps():
    first = ak(s("2345"), s("01"))
    v = check_chain(vamos(), [first, ci(s("01"), s("67"))])
    assert not v.feasible


def test_vamos_hat_ak_infeasible_exactly():
    # four lines of the Vamos matroid as single elements: L0 L1 L2 L3
    vh = vamos_hat()
    exact = check_chain(vh, [ak(0b0110, 0b0001)], exact_only=True)
    fast = check_chain(vh, [ak(0b0110, 0b0001)])
    assert not exact.feasible and not fast.feasible
    assert verify_certificate(exact.model, exact.certificate) > 0


def test_exact_simplex_agrees_with_highs(rng):
    for _ in range(8):
        n = rng.choice((3, 4))
        m = random_matroid(rng, n, rng.randrange(1, 3))
        x, y = rng.sample(range(1, 1 << n), 2)
        steps = [rng.choice((ci, ak))(x, y)]
        a = check_chain(m, steps, exact_only=True)
        b = check_chain(m, steps)
        assert a.feasible == b.feasible
        for v in (a, b):
            if v.feasible:
                assert verify_witness(v.model, v.witness) == []
            else:
                assert verify_certificate(v.model, v.certificate) > 0


def test_copy_lemma_step_on_uniform():
    v = check_chain(uniform(2, 4), [cl(0b0011, 0b0100, 0b1000)])
    assert v.feasible
    g = v.witness
    # the copy of element 3 behaves like 3 over 01
    assert g(0b0011 | 1 << 4) == g(0b1011)


def _polymatroids_on(n, top, extra_ok=None):
    """All integer polymatroids on n elements with values in 0..top."""
    size = 1 << n
    masks, coefs = shannon_arrays(n)
    grid = np.array(list(itertools.product(range(top + 1), repeat=size - 1)), dtype=np.int64)
    vals = np.concatenate([np.zeros((len(grid), 1), dtype=np.int64), grid], axis=1)
    ok = np.ones(len(vals), dtype=bool)
    for mr, cr in zip(masks, coefs):
        ok &= (vals[:, mr] * cr).sum(axis=1) >= 0
    return vals[ok]


def test_common_information_lemma_on_grid():
    # x=0, y=1, u=2 base, z=3 new: whenever g(u|x) = g(u|y) = 0 and z is a
    # common information of x and y, g(u|z) = 0
    x, y, u, z = 1, 2, 4, 8
    base = _polymatroids_on(3, 3)
    base = base[(base[:, x | u] == base[:, x]) & (base[:, y | u] == base[:, y])]
    masks, coefs = shannon_arrays(4)
    ext = np.array(list(itertools.product(range(4), repeat=8)), dtype=np.int64)
    checked = 0
    for b in base:
        full = np.concatenate([np.tile(b, (len(ext), 1)), ext], axis=1)
        ok = np.ones(len(full), dtype=bool)
        for mr, cr in zip(masks, coefs):
            ok &= (full[:, mr] * cr).sum(axis=1) >= 0
        ok &= (full[:, z | x] == full[:, x]) & (full[:, z | y] == full[:, y])
        ok &= full[:, x | z] + full[:, y | z] - full[:, x | y | z] - full[:, z] == 0
        good = full[ok]
        checked += len(good)
        assert (good[:, u | z] == good[:, z]).all()
    assert checked > 0


def test_search_finds_vamos_ak_pair():
    pool = [(s("0123"), s("4567")), (s("2345"), s("01"))]
    res = search_refutation(vamos(), "AK", 1, pool)
    assert res.sequence == [(s("2345"), s("01"))]
    assert verify_certificate(res.verdict.model, res.verdict.certificate) > 0


def test_search_on_uniform_finds_nothing():
    pool = disjoint_pairs(8)[:6]
    res = search_refutation(uniform(4, 8), "CI", 2, pool, budget=8)
    assert res.sequence is None


def test_search_with_empty_budget():
    res = search_refutation(vamos(), "AK", 1, [(s("2345"), s("01"))], budget=0)
    assert res.sequence is None and res.truncated and res.note
    with pytest.raises(ValueError):
        search_refutation(vamos(), "AK", 1, [])


def test_model_dump_lists_rows():
    model = build_model(uniform(1, 2).matroid, [ci(1, 2)])
    text = model.dump()
    lines = text.splitlines()
    assert lines[0].startswith("# matext-lp v1 n=3")
    assert sum(1 for l in lines if l.endswith(">= 0")) == model.shannon_count
    assert any("pin 01 = 1" in l for l in lines)


def test_fractional_base_polymatroid():
    f = SetFunction(2, (0, Fraction(1, 2), Fraction(1, 2), Fraction(1, 2)))
    v = check_chain(Polymatroid(f), [ci(1, 2)])
    assert v.feasible and v.witness(1 << 2) == Fraction(1, 2)
