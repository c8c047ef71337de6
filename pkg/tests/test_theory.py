import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chainti import theory
from chainti.chains import ABC_FAMILIES, FAMILIES, LinkDistribution, alpha_vector, ti2
from chainti.indices import IndexFunction, builtin
from chainti.theory import (DegenerateVarianceError, TheoryError, abc_constants, clt_statistic,
                            exact_distribution, martingale_value, mgf, moments)

POLY_ALPHA = [42.0, 41.0, 41.0]
P = [0.5, 0.3, 0.2]


def brute_force_law(alpha, probs, base, n):
    """Enumerate every ordered link sequence; independent of compositions."""
    law = {}
    for seq in itertools.product(range(len(alpha)), repeat=n - 2):
        value = base + sum(alpha[i] for i in seq)
        weight = math.prod(probs[i] for i in seq)
        key = round(value, 9)
        law[key] = law.get(key, 0.0) + weight
    return law


def test_moments_polyphenyl_example():
    mom = moments(POLY_ALPHA, P, 65.0, 10)
    assert mom.alpha == pytest.approx(41.5)
    assert mom.beta - mom.alpha**2 == pytest.approx(0.25)
    assert mom.mean == pytest.approx(397.0, abs=1e-12)
    assert mom.variance == pytest.approx(2.0, abs=1e-12)
    abc = abc_constants("polyphenyl", builtin("m2"))
    # (A p1 + B) n - 2 A p1 + C
    assert mom.mean == pytest.approx((abc.A * 0.5 + abc.B) * 10 - 2 * abc.A * 0.5 + abc.C)
    assert mom.variance == pytest.approx(abc.A**2 * 0.5 * 0.5 * 8)


def test_moments_n2():
    mom = moments(POLY_ALPHA, P, 65.0, 2)
    assert (mom.mean, mom.variance) == (65.0, 0.0)


def test_moments_m1_zero_variance(family):
    f = builtin("m1")
    for n in (2, 3, 10, 1000):
        assert moments(alpha_vector(family, f), LinkDistribution.default(family.m), ti2(family, f), n).variance == 0.0


def test_moments_errors():
    with pytest.raises(TheoryError):
        moments([1.0, 2.0], P, 0.0, 5)
    with pytest.raises(TheoryError):
        moments(POLY_ALPHA, P, 0.0, 1)
    with pytest.raises(ValueError):
        moments(POLY_ALPHA, [0.5, 0.6, 0.1], 0.0, 5)


@pytest.mark.parametrize("n", range(2, 9))
def test_moments_against_brute_force(n):
    law = brute_force_law(POLY_ALPHA, P, 65.0, n)
    mean = sum(v * p for v, p in law.items())
    var = sum((v - mean) ** 2 * p for v, p in law.items())
    mom = moments(POLY_ALPHA, P, 65.0, n)
    assert mom.mean == pytest.approx(mean, rel=1e-12)
    assert mom.variance == pytest.approx(var, rel=1e-9, abs=1e-12)


@pytest.mark.parametrize("name,A,B,C", [
    ("phenylene", -1, 61, -38),
    ("polyphenyl", 1, 41, -17),
    ("cyclooctane", 1, 49, -17),
])
def test_abc_m2(name, A, B, C):
    abc = abc_constants(name, builtin("m2"))
    assert (abc.A, abc.B, abc.C) == (A, B, C)


def test_abc_unsupported():
    with pytest.raises(TheoryError):
        abc_constants("spiro", builtin("m2"))


@pytest.mark.parametrize("name", ABC_FAMILIES)
def test_graph_alpha_matches_abc(name, index):
    fam = FAMILIES[name]
    abc = abc_constants(name, index)
    alpha = alpha_vector(fam, index)
    assert alpha[0] == pytest.approx(abc.A + abc.B, abs=1e-9)
    assert np.allclose(alpha[1:], abc.B, rtol=0, atol=1e-9)
    assert ti2(fam, index) == pytest.approx(2 * abc.B + abc.C, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_abc_sign_identities(h):
    h22, h23, h33 = h
    table = {(2, 2): h22, (2, 3): h23, (3, 2): h23, (3, 3): h33}
    f = IndexFunction("grid", lambda x, y: table.get((int(x), int(y)), 0.0))
    rpc, rpoc, rcc = (abc_constants(n, f) for n in ("phenylene", "polyphenyl", "cyclooctane"))
    assert abs(rcc.A - rpoc.A) <= 1e-12
    assert abs(rpoc.A + rpc.A) <= 1e-12
    assert abs(rcc.C - rpoc.C) <= 1e-12


def test_exact_polyphenyl_n4():
    d = exact_distribution(POLY_ALPHA, P, 65.0, 4)
    assert d.support.tolist() == [147.0, 148.0, 149.0]
    assert d.probs == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)


def test_exact_n2():
    d = exact_distribution(POLY_ALPHA, P, 65.0, 2)
    assert d.support.tolist() == [65.0] and d.probs.tolist() == [1.0]


@pytest.mark.parametrize("n", range(2, 9))
def test_exact_against_brute_force(n):
    alpha = [1.3, -0.7, 2.2, 0.4]
    probs = [0.1, 0.2, 0.3, 0.4]
    law = brute_force_law(alpha, probs, 3.0, n)
    d = exact_distribution(alpha, probs, 3.0, n)
    assert len(d.support) == len(law)
    for v, p in zip(d.support, d.probs):
        assert law[round(v, 9)] == pytest.approx(p, abs=1e-14)
    assert d.probs.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(d.support) > 0) and np.all(d.probs > 0)


def test_exact_against_scipy_multinomial():
    from scipy.stats import multinomial
    alpha = np.array([5.0, 1.0, -2.0])
    probs = [0.2, 0.5, 0.3]
    n = 12
    d = exact_distribution(alpha, probs, 0.0, n)
    ref = {}
    for x in theory.compositions(n - 2, 3):
        v = float(alpha @ x)
        ref[v] = ref.get(v, 0.0) + multinomial.pmf(x, n - 2, probs)
    assert dict(zip(d.support.tolist(), d.probs.tolist())) == pytest.approx(ref, abs=1e-14)


def test_exact_merges_equal_values():
    d = exact_distribution([1.0, 1.0, 1.0], [0.2, 0.3, 0.5], 0.0, 6)
    assert d.support.tolist() == [4.0] and d.probs[0] == pytest.approx(1.0, abs=1e-12)


def test_exact_skips_zero_probability_links():
    d = exact_distribution([1.0, 2.0], [1.0, 0.0], 0.0, 5)
    assert d.support.tolist() == [3.0]


def test_exact_size_limit():
    with pytest.raises(TheoryError, match="exceed"):
        exact_distribution([1.0, 2.0, 3.0], [0.2, 0.3, 0.5], 0.0, 10**4)


@pytest.mark.parametrize("n", range(2, 21))
def test_exact_moments_consistent(n):
    for name in ABC_FAMILIES:
        fam = FAMILIES[name]
        f = builtin("sombor")
        probs = LinkDistribution.default(fam.m, 0.3)
        a, base = alpha_vector(fam, f), ti2(fam, f)
        d = exact_distribution(a, probs, base, n)
        mom = moments(a, probs, base, n)
        assert d.mean == pytest.approx(mom.mean, rel=1e-9)
        assert d.variance == pytest.approx(mom.variance, rel=1e-9, abs=1e-12)


def test_binomial_support_structure():
    fam = FAMILIES["phenylene"]
    f = builtin("ga")
    abc = abc_constants("phenylene", f)
    n = 9
    d = exact_distribution(alpha_vector(fam, f), LinkDistribution.default(3), ti2(fam, f), n)
    assert len(d.support) == n - 1
    expected = sorted(abc.A * k + abc.B * n + abc.C for k in range(n - 1))
    assert d.support == pytest.approx(expected, abs=1e-9)
    # X ~ Binomial(n - 2, p1)
    from scipy.stats import binom
    ks = np.rint((d.support - abc.B * n - abc.C) / abc.A).astype(int)
    assert d.probs == pytest.approx(binom.pmf(ks, n - 2, 0.5), abs=1e-14)


def test_degenerate_h_gives_single_atom():
    # affine in x + y, so h22 + h33 = 2 h23
    f = IndexFunction("affine", lambda x, y: 0.7 * (x + y) + 1.3)
    for name in ABC_FAMILIES:
        fam = FAMILIES[name]
        abc = abc_constants(name, f)
        assert abc.A == pytest.approx(0.0, abs=1e-12)
        d = exact_distribution(alpha_vector(fam, f), LinkDistribution.default(fam.m), ti2(fam, f), 11)
        assert len(d.support) == 1
        assert d.support[0] == pytest.approx(abc.B * 11 + abc.C, abs=1e-9)


def test_mgf_zero():
    assert mgf(POLY_ALPHA, P, 65.0, 10, 0.0) == 1.0


def test_mgf_matches_exact_law():
    d = exact_distribution(POLY_ALPHA, P, 65.0, 4)
    t = 1e-3
    direct = math.fsum(p * math.exp(t * v) for v, p in zip(d.support, d.probs))
    assert mgf(POLY_ALPHA, P, 65.0, 4, t) == pytest.approx(direct, rel=1e-12)
    assert d.mgf(t) == pytest.approx(direct, rel=1e-12)


def test_mgf_degenerate_chain():
    assert mgf([3.0, 9.0], [1.0, 0.0], 2.0, 7, 0.1) == pytest.approx(math.exp(0.1 * (2 + 3 * 5)), rel=1e-14)


def test_mgf_derivatives_give_moments():
    """Central finite differences at t=0 recover E and E^2 (scaled to avoid cancellation)."""
    alpha = [0.4, -0.1, 0.25]
    probs = [0.5, 0.3, 0.2]
    n, base, h = 30, 0.5, 1e-4
    mom = moments(alpha, probs, base, n)
    up, down = mgf(alpha, probs, base, n, h), mgf(alpha, probs, base, n, -h)
    first = (up - down) / (2 * h)
    second = (up - 2 + down) / h**2
    assert first == pytest.approx(mom.mean, rel=1e-6)
    assert second - first**2 == pytest.approx(mom.variance, rel=1e-3)


def test_mgf_overflow_reported():
    with pytest.raises(OverflowError):
        mgf(POLY_ALPHA, P, 65.0, 10**6, 50.0)


def test_martingale_value():
    assert martingale_value(65.0, 2, 41.5) == 65.0
    assert martingale_value(397.0, 10, 41.5) == 65.0


def test_martingale_constant_for_m1(family):
    f = builtin("m1")
    alpha = alpha_vector(family, f)[0]
    state = family.initial()
    from chainti.indices import topological_index
    values = []
    for link in [1, 2, 3, 1, 1, 2]:
        family.attach(state, link)
        values.append(martingale_value(topological_index(state.graph, f), state.units, alpha))
    assert max(values) - min(values) <= 1e-9
    assert values[0] == pytest.approx(ti2(family, f))


def test_clt_statistic():
    mom = moments(POLY_ALPHA, [0.5, 0.25, 0.25], 65.0, 10)
    assert mom.mean == 397.0 and mom.variance == 2.0
    assert clt_statistic(397.0, 10, mom) == 0.0
    assert clt_statistic(399.0, 10, mom) == pytest.approx(1.41421356, abs=1e-8)


def test_clt_statistic_degenerate():
    f = builtin("m1")
    fam = FAMILIES["polyphenyl"]
    mom = moments(alpha_vector(fam, f), LinkDistribution.default(3), ti2(fam, f), 20)
    with pytest.raises(DegenerateVarianceError, match="B n \\+ C"):
        clt_statistic(mom.mean, 20, mom)


@settings(max_examples=200)
@given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=6), st.data())
def test_variance_nonnegative(alpha, data):
    raw = data.draw(st.lists(st.floats(0.0, 1.0), min_size=len(alpha), max_size=len(alpha)))
    total = sum(raw)
    if total <= 0:
        return
    probs = [r / total for r in raw]
    probs[-1] = 1.0 - math.fsum(probs[:-1])
    if probs[-1] < 0:
        return
    mom = moments(alpha, probs, 0.0, 12)
    assert mom.beta - mom.alpha**2 >= -1e-9 * max(1.0, mom.beta)
    assert mom.variance >= 0.0


def test_variance_zero_iff_equal_alphas():
    assert moments([2.0, 2.0, 7.0], [0.5, 0.5, 0.0], 0.0, 9).variance == 0.0
    assert moments([2.0, 2.0, 7.0], [0.5, 0.4, 0.1], 0.0, 9).variance > 0.0
