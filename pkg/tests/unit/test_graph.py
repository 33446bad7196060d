import itertools
import random

import pytest

from mdagid.discrete import random_model
from mdagid.errors import MalformedContextError, OverlappingSetsError, UnknownVertexError
from mdagid.graph import (
    CiStatus,
    MDag,
    MonotoneSpec,
    ci_under_context,
    d_separated,
    is_null_assignment,
    relation_set,
    validate_mdag,
)

FIGURES = ['fig1', 'fig2a', 'fig2b', 'fig3a', 'fig3b', 'fig3c', 'fig3d', 'fig3e']


@pytest.mark.parametrize('name', FIGURES)
def test_figures_are_valid(name, request):
    g, mono = request.getfixturevalue(name)
    assert validate_mdag(g).valid
    assert mono.violations(g) == []


def test_cycle_is_reported():
    g = MDag.build(partial=['X', 'Y'], edges=[('X', 'Y'), ('Y', 'X')])
    kinds = [v.kind for v in validate_mdag(g).violations]
    assert 'cycle' in kinds


def test_indicator_with_substantive_descendant():
    g = MDag.build(partial=['X', 'Y'], edges=[('R_X', 'Y')])
    report = validate_mdag(g)
    assert not report.valid
    assert report.violations[0].kind == 'indicator-descendant'
    assert 'R_X -> Y' in report.violations[0].message


def test_self_loop_and_unknown_vertex():
    g = MDag.build(partial=['X'], edges=[('X', 'X'), ('X', 'Q')])
    kinds = {v.kind for v in validate_mdag(g).violations}
    assert {'self-loop', 'unknown-vertex'} <= kinds


def test_relatives(fig1, fig2b):
    g, _ = fig1
    assert relation_set(g, 'R_Y', 'parents') == {'X', 'R_X'}
    assert relation_set(g, 'X', 'parents') == frozenset()
    assert relation_set(g, 'X', 'descendants') == {'Y', 'R_Y'}

    chain, _ = fig2b
    assert relation_set(chain, 'R_X4', 'ancestors') >= {'X4', 'R_X1', 'R_X2', 'R_X3', 'X1', 'X2', 'X3'}


def test_relatives_unknown_vertex(fig1):
    g, _ = fig1
    with pytest.raises(UnknownVertexError):
        relation_set(g, 'Q', 'parents')


def test_d_separation(fig1, fig2a):
    g1, _ = fig1
    assert d_separated(g1, {'Y'}, {'R_X', 'R_Y'}, {'X'})

    g2, _ = fig2a
    assert d_separated(g2, {'Y'}, {'R_Y'}, {'R_X'})
    assert not d_separated(g2, {'Y'}, {'R_X'})


def test_d_separation_rejects_overlap(fig1):
    g, _ = fig1
    with pytest.raises(OverlappingSetsError):
        d_separated(g, {'X'}, {'X', 'Y'})


def test_ci_holds_under_upstream_context(fig1):
    g, mono = fig1
    verdict = ci_under_context(g, mono, {'Y'}, {'R_X', 'R_Y'}, {'X'}, {'R_X': 1})
    assert verdict.status is CiStatus.HOLDS
    assert verdict.holds


def test_ci_unknown_without_upstream_context(fig1):
    g, mono = fig1
    verdict = ci_under_context(g, mono, {'Y'}, {'R_Y'}, {'X', 'R_X'}, {})
    assert verdict.status is CiStatus.UNKNOWN


def test_ci_undefined_on_null_context(fig2a):
    g, mono = fig2a
    verdict = ci_under_context(g, mono, {'Y'}, {'R_Y'}, {'R_X'}, {'R_X': 0, 'R_Y': 1})
    assert verdict.status is CiStatus.UNDEFINED_CONTEXT


def test_ci_not_separated(fig2a):
    g, mono = fig2a
    verdict = ci_under_context(g, mono, {'Y'}, {'R_X'}, set(), {})
    assert verdict.status is CiStatus.NOT_SEPARATED


def test_context_must_assign_indicators(fig1):
    g, mono = fig1
    with pytest.raises(MalformedContextError):
        ci_under_context(g, mono, {'Y'}, {'R_Y'}, {'X'}, {'X': 1})
    with pytest.raises(MalformedContextError):
        ci_under_context(g, mono, {'Y'}, {'R_Y'}, {'X'}, {'R_X': 2})


def test_monotone_closure_is_transitive():
    spec = MonotoneSpec(frozenset({('R_A', 'R_B'), ('R_B', 'R_C')}))
    assert ('R_A', 'R_C') in spec.closure()
    assert spec.upstream('R_C') == {'R_A', 'R_B'}
    assert is_null_assignment(spec, {'R_A': 0, 'R_C': 1})
    assert not is_null_assignment(spec, {'R_A': 1, 'R_C': 0})


def test_mono_pair_needs_edge(fig1):
    g, _ = fig1
    spec = MonotoneSpec(frozenset({('R_Y', 'R_X')}))
    kinds = [v.kind for v in spec.violations(g)]
    assert kinds == ['mono-edge']


def random_mdag(seed):
    """Forward edges over C, A, B, R_A, R_B; indicators only point at indicators"""
    rng = random.Random(seed)
    order = ['C', 'A', 'B', 'R_A', 'R_B']
    edges = [(a, b) for i, a in enumerate(order) for b in order[i + 1:] if rng.random() < 0.5]
    return MDag.build(observed=['C'], partial=['A', 'B'], edges=edges)


def separated_pairs(g):
    vertices = sorted(g.vertices)
    for a, b in itertools.combinations(vertices, 2):
        rest = [v for v in vertices if v not in (a, b)]
        for size in range(len(rest) + 1):
            for z in itertools.combinations(rest, size):
                if d_separated(g, {a}, {b}, set(z)):
                    yield a, b, z


@pytest.mark.parametrize('seed', range(6))
def test_d_separation_implies_independence(seed):
    g = random_mdag(seed)
    assert validate_mdag(g).valid
    law = random_model(g, MonotoneSpec(), seed=seed).full_law()

    for a, b, z in separated_pairs(g):
        for values in itertools.product((0, 1), repeat=len(z) + 2):
            za = dict(zip(z, values[2:]))
            joint = law.prob({a: values[0], b: values[1], **za})
            assert joint * law.prob(za) == law.prob({a: values[0], **za}) * law.prob({b: values[1], **za})


@pytest.mark.parametrize('name', FIGURES)
def test_ancestors_and_descendants_are_dual(name, request):
    g, _ = request.getfixturevalue(name)
    for u in g.vertices:
        for v in g.vertices:
            assert (u in relation_set(g, v, 'ancestors')) == (v in relation_set(g, u, 'descendants'))


@pytest.mark.parametrize('seed', range(6))
def test_ancestors_and_descendants_are_dual_on_random_graphs(seed):
    g = random_mdag(seed)
    for v in g.vertices:
        assert v not in relation_set(g, v, 'ancestors')
        for u in relation_set(g, v, 'ancestors'):
            assert v in relation_set(g, u, 'descendants')
