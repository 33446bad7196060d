import itertools

import pytest

from mdagid.discrete import random_model
from mdagid.errors import BadOrdering, ZeroDenominator
from mdagid.graph import MDag, MonotoneSpec
from mdagid.odds_ratio import or_reconstruct

TWO_INDICATORS = MDag.build(
    partial=['X', 'Y'],
    edges=[('X', 'Y'), ('X', 'R_Y'), ('Y', 'R_X'), ('R_X', 'R_Y')],
)

THREE_INDICATORS = MDag.build(
    observed=['O'],
    partial=['X', 'Y', 'Z'],
    edges=[('O', 'X'), ('X', 'Y'), ('Y', 'Z'), ('Z', 'R_X'), ('O', 'R_Y'), ('R_X', 'R_Y'), ('R_Y', 'R_Z')],
)


@pytest.mark.parametrize('g', [TWO_INDICATORS, THREE_INDICATORS])
def test_reconstruction_is_exact_on_positive_models(g):
    orderings = list(itertools.permutations(g.indicators))[:2]
    for seed in range(50):
        model = random_model(g, MonotoneSpec(), seed=seed)
        for ordering in orderings:
            report = or_reconstruct(model, ordering)
            assert report.exact, report.to_json()
            assert report.cells_checked == 2 ** len(ordering) * len(report.factorizations)


def test_monotone_models_hit_zero_denominators(fig1):
    g, mono = fig1
    for seed in range(20):
        model = random_model(g, mono, seed=seed)
        for ordering in (['R_X', 'R_Y'], ['R_Y', 'R_X']):
            with pytest.raises(ZeroDenominator):
                or_reconstruct(model, ordering)


def test_lenient_mode_lists_zero_denominators(fig1):
    g, mono = fig1
    report = or_reconstruct(random_model(g, mono, seed=0), ['R_X', 'R_Y'], strict=False)
    assert not report.exact
    assert report.zero_denominators
    assert report.to_json()['zero_denominator_count'] == len(report.zero_denominators)


def test_ordering_must_cover_all_indicators(fig1):
    g, mono = fig1
    model = random_model(g, mono, seed=0)
    with pytest.raises(BadOrdering):
        or_reconstruct(model, ['R_X'])
    with pytest.raises(BadOrdering):
        or_reconstruct(model, ['R_X', 'R_X'])


def test_single_indicator_needs_no_odds_ratios():
    g = MDag.build(observed=['W'], partial=['X'], edges=[('W', 'X'), ('W', 'R_X')])
    for seed in range(5):
        model = random_model(g, MonotoneSpec(), seed=seed)
        report = or_reconstruct(model, ['R_X'])
        assert report.exact
        assert len(report.factorizations) == 4
        for fact in report.factorizations:
            assert fact.normalizer == 1
            assert all(terms == () for terms in fact.or_terms.values())
            assert fact.baseline_terms[(0,)][0] + fact.baseline_terms[(1,)][0] == 1
