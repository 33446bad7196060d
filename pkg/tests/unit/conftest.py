import pytest

from mdagid.graph import MDag, MonotoneSpec


def mono(*pairs):
    return MonotoneSpec(frozenset(pairs))


FIG3A_EDGES = [('X', 'Y'), ('Y', 'Z'), ('X', 'R_Y'), ('X', 'R_Z'), ('Z', 'R_Y'), ('R_X', 'R_Y')]
FIG3B_EDGES = FIG3A_EDGES + [('R_Y', 'R_Z')]
FIG3C_EDGES = FIG3B_EDGES + [('W', 'Z'), ('W', 'R_Z')]


def self_censoring_chain(k):
    """X_1 -> ... -> X_k, X_k -> R_X1 -> ... -> R_Xk with every indicator edge monotone"""
    names = [f"X{i}" for i in range(1, k + 1)]
    indicators = [f"R_{x}" for x in names]
    edges = list(zip(names, names[1:])) + [(names[-1], indicators[0])]
    chain = list(zip(indicators, indicators[1:]))
    return MDag.build(partial=names, edges=edges + chain), mono(*chain)


@pytest.fixture
def fig1():
    g = MDag.build(partial=['X', 'Y'], edges=[('X', 'Y'), ('X', 'R_Y'), ('R_X', 'R_Y')])
    return g, mono(('R_X', 'R_Y'))


@pytest.fixture
def fig2a():
    g = MDag.build(partial=['X', 'Y'], edges=[('X', 'Y'), ('Y', 'R_X'), ('R_X', 'R_Y')])
    return g, mono(('R_X', 'R_Y'))


@pytest.fixture
def fig2b():
    return self_censoring_chain(4)


@pytest.fixture
def fig3a():
    return MDag.build(partial=['X', 'Y', 'Z'], edges=FIG3A_EDGES), mono(('R_X', 'R_Y'))


@pytest.fixture
def fig3b():
    return MDag.build(partial=['X', 'Y', 'Z'], edges=FIG3B_EDGES), mono(('R_X', 'R_Y'))


@pytest.fixture
def fig3c():
    g = MDag.build(observed=['W'], partial=['X', 'Y', 'Z'], edges=FIG3C_EDGES)
    return g, mono(('R_X', 'R_Y'))


@pytest.fixture
def fig3d():
    g = MDag.build(partial=['W', 'X', 'Y', 'Z'], edges=FIG3C_EDGES + [('R_W', 'R_Y')])
    return g, mono(('R_X', 'R_Y'))


@pytest.fixture
def fig3e():
    g = MDag.build(partial=['W', 'X', 'Y', 'Z'], edges=FIG3C_EDGES + [('R_X', 'R_W')])
    return g, mono(('R_X', 'R_Y'))


FIG1_SPEC = """\
# Figure 1
var X partial
var Y partial
edge X -> Y
edge X -> R_Y
edge R_X -> R_Y
mono R_X >= R_Y
"""

FIG2A_SPEC = """\
var X partial
var Y partial
edge X -> Y
edge Y -> R_X
edge R_X -> R_Y
mono R_X >= R_Y
"""
