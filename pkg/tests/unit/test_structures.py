import pytest

from mdagid.errors import NotAnIndicatorError
from mdagid.graph import MDag, MonotoneSpec
from mdagid.structures import (
    Colluder,
    SelfCensoringPath,
    colluder_is_monotone,
    detect_all,
    find_colluders,
    find_maximal_colluder,
    find_self_censoring,
)


def test_figure1_colluder(fig1):
    g, mono = fig1
    assert find_colluders(g) == [Colluder('X', 'R_X', 'R_Y')]
    mc = find_maximal_colluder(g, 'R_Y')
    assert mc.c_set == {'X'}
    assert colluder_is_monotone(g, mc, mono)
    assert not colluder_is_monotone(g, mc, MonotoneSpec())


def test_figure2a_has_no_colluder(fig2a):
    g, _ = fig2a
    assert find_colluders(g) == []
    assert find_maximal_colluder(g, 'R_Y').c_set == frozenset()


def test_figure3a_maximal_colluder_excludes_z(fig3a):
    g, mono = fig3a
    mc = find_maximal_colluder(g, 'R_Y')
    assert mc.c_set == {'X'}
    assert mc.indicators(g) == ['R_X']


def test_maximal_colluder_needs_indicator(fig1):
    g, _ = fig1
    with pytest.raises(NotAnIndicatorError):
        find_maximal_colluder(g, 'X')


def test_self_censoring_path_figure2b(fig2b):
    g, mono = fig2b
    edges, paths = find_self_censoring(g, mono)
    assert edges == []
    assert paths == [SelfCensoringPath('X4', ('R_X1', 'R_X2', 'R_X3', 'R_X4'))]
    assert paths[0].k == 4


def test_self_censoring_path_figure2a(fig2a):
    g, mono = fig2a
    _, paths = find_self_censoring(g, mono)
    assert paths == [SelfCensoringPath('Y', ('R_X', 'R_Y'))]


def test_nonmonotone_chain_is_not_a_path(fig2a):
    g, _ = fig2a
    assert find_self_censoring(g, MonotoneSpec()) == ([], [])


def test_self_censoring_edge():
    g = MDag.build(partial=['X'], edges=[('X', 'R_X')])
    edges, paths = find_self_censoring(g, MonotoneSpec())
    assert edges == [('X', 'R_X')]
    assert paths == [SelfCensoringPath('X', ('R_X',))]


@pytest.mark.parametrize('name, colluders, paths', [
    ('fig1', [('X', 'R_X', 'R_Y')], []),
    ('fig2a', [], [('Y', ('R_X', 'R_Y'))]),
    ('fig2b', [], [('X4', ('R_X1', 'R_X2', 'R_X3', 'R_X4'))]),
    ('fig3a', [('X', 'R_X', 'R_Y')], []),
    ('fig3b', [('X', 'R_X', 'R_Y')], []),
    ('fig3c', [('X', 'R_X', 'R_Y')], []),
    ('fig3d', [('X', 'R_X', 'R_Y')], []),
    ('fig3e', [('X', 'R_X', 'R_Y')], []),
])
def test_detect_all_on_figures(name, colluders, paths, request):
    g, mono = request.getfixturevalue(name)
    found = detect_all(g, mono)
    assert [(c['variable'], c['indicator'], c['target']) for c in found['colluders']] == colluders
    assert [(p['variable'], tuple(p['indicator_chain'])) for p in found['self_censoring_paths']] == paths
    assert found['self_censoring_edges'] == []
    for mc in found['maximal_colluders']:
        assert mc['c_set'] == ['X']
        assert mc['target'] == 'R_Y'
        assert mc['monotone']
