import numpy as np
import pytest

from chainti import theory
from chainti.chains import ABC_FAMILIES, FAMILIES, LinkDistribution, alpha_vector, ti2
from chainti.indices import builtin, topological_index
from chainti.oracle import (OracleLimit, OracleLimitError, enumerate_exact, local_delta,
                            total_variation)
from chainti.theory import ExactDistribution


def test_polyphenyl_n4_by_hand():
    d = enumerate_exact(FAMILIES["polyphenyl"], builtin("m2"), [0.5, 0.3, 0.2], 4)
    assert d.support.tolist() == [147.0, 148.0, 149.0]
    assert d.probs == pytest.approx([0.25, 0.5, 0.25], abs=1e-15)


def test_n2_single_atom(family):
    f = builtin("sombor")
    d = enumerate_exact(family, f, LinkDistribution.default(family.m), 2)
    assert d.probs.tolist() == [1.0]
    assert d.support[0] == topological_index(family.initial().graph, f)


@pytest.mark.parametrize("n", range(3, 8))
def test_oracle_equals_multinomial(family, index, n):
    probs = LinkDistribution.default(family.m, 0.35)
    oracle = enumerate_exact(family, index, probs, n)
    exact = theory.exact_distribution(alpha_vector(family, index), probs, ti2(family, index), n)
    assert total_variation(oracle, exact) < 1e-12
    assert len(oracle.support) == len(exact.support)
    assert oracle.probs.sum() == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("name", ABC_FAMILIES)
def test_support_size_bound(name):
    f = builtin("harmonic")
    for n in range(3, 8):
        d = enumerate_exact(FAMILIES[name], f, LinkDistribution.default(FAMILIES[name].m), n)
        assert len(d.support) <= n - 1


def test_oracle_moments_match_closed_form(family):
    f = builtin("isi")
    probs = LinkDistribution.default(family.m, 0.6)
    d = enumerate_exact(family, f, probs, 7)
    mom = theory.moments(alpha_vector(family, f), probs, ti2(family, f), 7)
    assert d.mean == pytest.approx(mom.mean, rel=1e-9)
    assert d.variance == pytest.approx(mom.variance, rel=1e-9)


def test_limit():
    with pytest.raises(OracleLimitError) as err:
        enumerate_exact(FAMILIES["cyclooctane"], builtin("m2"), [0.25] * 4, 8, OracleLimit(1000))
    assert err.value.required == 4**6


def test_local_delta_matches_full_recompute(family, index):
    state = family.initial()
    for link in [1, 3, 2, 2, 1, family.m]:
        before = topological_index(state.graph, index)
        family.attach(state, link)
        after = topological_index(state.graph, index)
        assert local_delta(state, index) == pytest.approx(after - before, abs=1e-9)


def test_total_variation():
    a = ExactDistribution(np.array([0.0, 1.0]), np.array([0.5, 0.5]))
    b = ExactDistribution(np.array([1.0 + 1e-12, 2.0]), np.array([0.5, 0.5]))
    assert total_variation(a, a) == 0.0
    assert total_variation(a, b) == pytest.approx(0.5)
