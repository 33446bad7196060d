import itertools
from fractions import Fraction

import pytest

from mdagid.constructions import (
    DEFAULT_OBSERVED,
    AppendixObserved,
    appendix_pair,
    compare_models,
    solve_appendix,
    thm6_pair,
)
from mdagid.errors import BadGamma, ConstructionError, InfeasibleA, MissingPath
from mdagid.expr import rational
from mdagid.graph import MDag, MonotoneSpec
from tests.unit.conftest import self_censoring_chain

F = Fraction


def test_appendix_parameters():
    m1, m2 = appendix_pair(DEFAULT_OBSERVED, [F(7, 15), F(8, 15)])
    assert m1.parameters() == {'a': F(7, 15), 'b': F(4, 7), 'c': F(15, 16), 'd': F(1, 4), 'e': F(5, 8), 'f': F(4, 5)}
    assert m2.parameters() == {'a': F(8, 15), 'b': F(3, 4), 'c': F(5, 8), 'd': F(3, 7), 'e': F(15, 16), 'f': F(4, 5)}
    assert m1.gammas == (2, F(1, 2))


def test_appendix_models_differ_only_where_x_is_missing():
    m1, m2 = appendix_pair(DEFAULT_OBSERVED, [F(7, 15), F(8, 15)])
    summary = compare_models(m1.model, m2.model, marginal=['X'])
    assert summary['observed_equal']

    diffs = {
        (d['cell']['X'], d['cell']['Y']): (d['p1'], d['p2'])
        for d in summary['full_law_differences']
    }
    assert all(d['cell']['R_X'] == 0 and d['cell']['R_Y'] == 0 for d in summary['full_law_differences'])
    assert diffs == {
        (0, 0): ('3/20', '1/60'),
        (0, 1): ('1/120', '3/40'),
        (1, 0): ('3/40', '1/120'),
        (1, 1): ('1/60', '3/20'),
    }
    rows = {tuple(r['values']): (r['p1'], r['p2']) for r in summary['marginal']['rows']}
    assert rows[(1,)] == ('7/15', '8/15')


def test_appendix_missing_cells_are_split_evenly():
    law = appendix_pair(DEFAULT_OBSERVED, [F(7, 15)])[0].model.full_law()
    assert law.prob({'X': 1, 'R_X': 1, 'R_Y': 0}) == F(3, 40)
    assert law.prob({'X': 0, 'R_X': 1, 'R_Y': 0}) == F(3, 40)
    assert law.prob({'R_X': 0}) == F(1, 4)


@pytest.mark.parametrize('a', [F(2, 5), F(3, 5), F(5, 11), F(11, 24), F(13, 24), F(0), F(1)])
def test_infeasible_a(a):
    with pytest.raises(InfeasibleA):
        solve_appendix(DEFAULT_OBSERVED, a)


def test_every_a_in_the_open_interval_is_feasible():
    low, high = F(11, 24), F(13, 24)
    inside = {F(n, d) for d in range(1, 61) for n in range(d) if low < F(n, d) < high}
    assert inside
    for a in sorted(inside):
        construction = solve_appendix(DEFAULT_OBSERVED, a)
        assert all(0 < v < 1 for v in construction.parameters().values())


def test_observed_probabilities_must_sum_to_one():
    with pytest.raises(ConstructionError):
        AppendixObserved(F(1, 2), F(1, 2), F(1, 5), F(1, 5), 0, 0)


@pytest.mark.parametrize('k', [2, 3, 4])
@pytest.mark.parametrize('gamma', [F(1, 4), F(1, 3), F(2, 5)])
def test_thm6_pair_agrees_on_observed_law(k, gamma):
    g, mono = self_censoring_chain(k)
    construction = thm6_pair(k, gamma, g, mono)
    assert construction.variable == f"X{k}"

    summary = compare_models(*construction.models, marginal=[construction.variable])
    assert summary['observed_equal'], summary['observed_differences']
    assert summary['full_law_differences']
    rows = {tuple(r['values']): (r['p1'], r['p2']) for r in summary['marginal']['rows']}
    assert rows[(0,)] == (rational(gamma), rational(1 - gamma))


def test_thm6_on_figure2a(fig2a):
    g, mono = fig2a
    construction = thm6_pair(2, F(1, 4), g, mono)
    assert construction.variable == 'Y'
    assert construction.alpha == F(1, 2)
    assert compare_models(*construction.models)['observed_equal']


def monotone_patterns(k):
    return [tuple([1] * m + [0] * (k - m)) for m in range(k + 1)]


@pytest.mark.parametrize('k', [1, 2, 3, 4])
@pytest.mark.parametrize('gamma', [F(1, 4), F(1, 3)])
def test_marginal_shape_follows_the_models(k, gamma):
    if k == 1:
        g, mono = MDag.build(partial=['X'], edges=[('X', 'R_X')]), MonotoneSpec()
    else:
        g, mono = self_censoring_chain(k)
    construction = thm6_pair(k, gamma, g, mono)

    for r in monotone_patterns(k)[1:]:
        assert construction.f_star(1, 0, r) == gamma * (1 - gamma)
    assert construction.f_star(1, 0, (0,) * k) == gamma ** 2
    assert construction.marginal_shape(1, 0) == gamma ** 2 + k * gamma * (1 - gamma)
    assert construction.marginal_shape(1, 1) == (1 - gamma) ** 2 + k * gamma * (1 - gamma)
    assert construction.marginal_shape(1, 0) - construction.marginal_shape(1, 1) == 2 * gamma - 1
    assert construction.marginal_shape(1, 0) == construction.marginal_shape(2, 1)


def test_half_factors_follow_responding_predecessors():
    g, mono = self_censoring_chain(3)
    construction = thm6_pair(3, F(1, 3), g, mono)
    assert construction.c((1, 1, 0)) == 2
    assert construction.c((1, 0, 0)) == 1
    assert construction.c((0, 0, 0)) == 0
    assert construction.f_star(1, 0, (1, 1, 0)) == F(2, 9)


@pytest.mark.parametrize('k', [2, 3])
def test_observed_pattern_masses_agree(k):
    g, mono = self_censoring_chain(k)
    construction = thm6_pair(k, F(2, 5), g, mono)
    for r in itertools.product((0, 1), repeat=k):
        if r[-1] == 1:
            for x in (0, 1):
                assert construction.h(1, x, r) == construction.h(2, x, r)
        else:
            assert construction.h(1, None, r) == construction.h(2, None, r)
    assert construction.f(1, 0, (0, 1) + (0,) * (k - 2)) == 0


@pytest.mark.parametrize('gamma', [F(1, 2), F(0), F(1)])
def test_bad_gamma(gamma, fig2a):
    g, mono = fig2a
    with pytest.raises(BadGamma):
        thm6_pair(2, gamma, g, mono)


def test_missing_path(fig1, fig2a):
    g, mono = fig1
    with pytest.raises(MissingPath):
        thm6_pair(2, F(1, 4), g, mono)
    g, mono = fig2a
    with pytest.raises(MissingPath):
        thm6_pair(3, F(1, 4), g, mono)
