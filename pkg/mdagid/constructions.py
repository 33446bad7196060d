"""
Pairs of models that agree on the observed data law but not on the full law.

thm6_pair builds the pair for a monotone self-censoring path of any length,
appendix_pair solves the bivariate Figure-2a parametrization for chosen p(X=1).
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from mdagid.discrete import Cpt, DiscreteModel, forced_zero, observed_law, query_eval, Query
from mdagid.errors import BadGamma, ConstructionError, InfeasibleA, MissingPath
from mdagid.expr import rational
from mdagid.graph import MDag, MonotoneSpec
from mdagid.structures import SelfCensoringPath, find_self_censoring

logger = logging.getLogger(__name__)

HALF = Fraction(1, 2)


@dataclass
class Thm6Construction:
    k: int
    gamma: Fraction
    path: SelfCensoringPath
    models: Tuple[DiscreteModel, DiscreteModel]
    alpha: Fraction
    betas: Dict[str, Tuple[Fraction, Fraction]] = field(default_factory=dict)

    @property
    def variable(self):
        return self.path.variable

    def c(self, r):
        """Number of 1/2 factors in the chain: indicators after the first whose predecessor is 1"""
        return sum(1 for prev in r[:-1] if prev == 1)

    def f(self, i, x_k, r):
        """Product of the path CPTs of model i at X_k = x_k and chain values r"""
        model = self.models[i - 1]
        chain = self.path.indicator_chain
        mass = model.cpts[self.variable].rows[_ignored(model, self.variable)][x_k]
        values = {self.variable: x_k, **dict(zip(chain, r))}
        for ind in chain:
            cpt = model.cpts[ind]
            row = tuple(values.get(p, 1) for p in cpt.parents)
            mass *= cpt.rows[row][values[ind]]
        return mass

    def f_star(self, i, x_k, r):
        return 2 ** self.c(r) * self.f(i, x_k, r)

    def h(self, i, x_k, r):
        """Observed mass of the path pattern: x_k is None when the last chain indicator hides X_k"""
        if x_k is not None:
            return self.f(i, x_k, r)
        return self.f(i, 0, r) + self.f(i, 1, r)

    def marginal_shape(self, i, x_k):
        """
        Sum of f_star over every chain pattern. Equals gamma^2 + k*gamma*(1-gamma)
        for model 1 at X_k = 0 and model 2 at X_k = 1, and the mirror
        (1-gamma)^2 + k*gamma*(1-gamma) otherwise.
        """
        return sum(self.f_star(i, x_k, r) for r in itertools.product((0, 1), repeat=self.k))

    def to_json(self):
        return {
            'kind': 'thm6',
            'k': self.k,
            'gamma': rational(self.gamma),
            'path': self.path.to_json(),
            'alpha': rational(self.alpha),
            'betas': {name: [rational(v) for v in pair] for name, pair in self.betas.items()},
            'models': [m.to_json() for m in self.models],
        }


def _ignored(model, v):
    """Any row of a CPT whose value does not depend on its parents"""
    return next(iter(model.cpts[v].rows))


def _uniform(k):
    return tuple(Fraction(1, k) for _ in range(k))


def _find_path(g, mono, k):
    _, paths = find_self_censoring(g, mono if k > 1 else MonotoneSpec())
    for path in paths:
        if path.k == k:
            return path
    raise MissingPath(f"no monotone self-censoring path of length {k}")


def thm6_pair(k: int, gamma, g: MDag, mono: MonotoneSpec) -> Thm6Construction:
    """
    Two models on g agreeing on the observed law with p1(X_k=0) = gamma and
    p2(X_k=0) = 1 - gamma.

    Off-path vertices are uniform and ignore the path; path vertices ignore
    off-path parents. Rows forced by a monotone parent at 0 stay forced.
    """
    gamma = Fraction(gamma)
    if not 0 < gamma < 1 or gamma == HALF:
        raise BadGamma(f"gamma must lie in (0, 1) and differ from 1/2, got {gamma}")
    path = _find_path(g, mono, k)
    x_k, chain = path.variable, path.indicator_chain

    def build(p_zero, r1_zero_at):
        cpts = {}
        for v in g.topological_order():
            parents = tuple(sorted(g.parents(v)))
            rows = {}
            for pv in itertools.product((0, 1), repeat=len(parents)):
                values = dict(zip(parents, pv))
                if forced_zero(g, mono, v, parents, pv):
                    rows[pv] = (Fraction(1), Fraction(0))
                elif v == x_k:
                    rows[pv] = (p_zero, 1 - p_zero)
                elif v == chain[0]:
                    q = r1_zero_at[values[x_k]]
                    rows[pv] = (q, 1 - q)
                elif v in chain:
                    prev = chain[chain.index(v) - 1]
                    rows[pv] = (Fraction(1), Fraction(0)) if values[prev] == 0 else (HALF, HALF)
                else:
                    rows[pv] = _uniform(2)
            cpts[v] = Cpt(v, parents, rows)
        return DiscreteModel(g, mono, {}, cpts)

    m1 = build(gamma, {0: gamma, 1: 1 - gamma})
    m2 = build(1 - gamma, {0: 1 - gamma, 1: gamma})
    off_path = len(g.vertices) - k - 1
    construction = Thm6Construction(
        k=k, gamma=gamma, path=path, models=(m1, m2),
        alpha=Fraction(1, 2 ** off_path),
        betas={
            'beta_0': (gamma, 1 - gamma),
            'beta_1_0': (gamma, 1 - gamma),
            'beta_1_1': (1 - gamma, gamma),
            'beta_j_0': (Fraction(1), Fraction(1)),
            'beta_j_1': (HALF, HALF),
        },
    )
    logger.debug("Theorem-6 pair on %s with gamma=%s", path, gamma)
    return construction


@dataclass(frozen=True)
class AppendixObserved:
    p11: Fraction
    p10: Fraction
    p01: Fraction
    p00: Fraction
    p1na: Fraction
    p0na: Fraction
    pnana: Optional[Fraction] = None

    def __post_init__(self):
        for name in ('p11', 'p10', 'p01', 'p00', 'p1na', 'p0na'):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        rest = self.p11 + self.p10 + self.p01 + self.p00 + self.p1na + self.p0na
        pnana = 1 - rest if self.pnana is None else Fraction(self.pnana)
        object.__setattr__(self, 'pnana', pnana)
        if min(self.p11, self.p10, self.p01, self.p00) <= 0:
            raise ConstructionError("complete-case probabilities must be positive")
        if rest + pnana != 1 or pnana < 0:
            raise ConstructionError("observed probabilities must sum to 1")

    @property
    def complete(self):
        return self.p11 + self.p10 + self.p01 + self.p00

    @property
    def na_sum(self):
        return self.p1na + self.p0na

    @property
    def gamma1(self):
        return self.p11 / self.p01

    @property
    def gamma0(self):
        return self.p10 / self.p00


DEFAULT_OBSERVED = AppendixObserved(Fraction(1, 5), Fraction(1, 10), Fraction(1, 10), Fraction(1, 5),
                                  Fraction(1, 20), Fraction(1, 10))


@dataclass
class AppendixConstruction:
    observed: AppendixObserved
    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction
    e: Fraction
    f: Fraction
    model: DiscreteModel

    @property
    def gammas(self):
        return self.observed.gamma1, self.observed.gamma0

    def parameters(self):
        return {name: getattr(self, name) for name in 'abcdef'}

    def to_json(self):
        return {
            'kind': 'appendix',
            'parameters': {k: rational(v) for k, v in self.parameters().items()},
            'model': self.model.to_json(),
        }


def figure_2a():
    g = MDag.build(partial=['X', 'Y'], edges=[('X', 'Y'), ('Y', 'R_X'), ('R_X', 'R_Y')])
    return g, MonotoneSpec(frozenset({('R_X', 'R_Y')}))


def solve_appendix(observed: AppendixObserved, a) -> AppendixConstruction:
    """Solve b, c, d, e, f from the observed probabilities for a fixed p(X=1) = a"""
    a = Fraction(a)
    if not 0 < a < 1:
        raise InfeasibleA(a, "a must lie in (0, 1)")
    g1, g0 = observed.gamma1, observed.gamma0
    if g0 == g1:
        raise InfeasibleA(a, "gamma_0 equals gamma_1, the system is singular")
    t = a / (1 - a)
    if not min(g0, g1) < t < max(g0, g1):
        raise InfeasibleA(a, f"a/(1-a) = {t} lies outside ({min(g0, g1)}, {max(g0, g1)})")

    # a b / ((1-a) d) = gamma_1 and a (1-b) / ((1-a) (1-d)) = gamma_0
    d = (g0 - t) / (g0 - g1)
    b = g1 * d / t
    f = observed.complete / (observed.complete + observed.na_sum)
    c = observed.p11 / (a * b * f)
    e = observed.p10 / (a * (1 - b) * f)
    for name, value in (('b', b), ('c', c), ('d', d), ('e', e)):
        if not 0 < value < 1:
            raise InfeasibleA(a, f"{name} = {value} is not in (0, 1)")

    g, mono = figure_2a()
    cpts = {
        'X': Cpt('X', (), {(): (1 - a, a)}),
        'Y': Cpt('Y', ('X',), {(0,): (1 - d, d), (1,): (1 - b, b)}),
        'R_X': Cpt('R_X', ('Y',), {(0,): (1 - e, e), (1,): (1 - c, c)}),
        'R_Y': Cpt('R_Y', ('R_X',), {(0,): (Fraction(1), Fraction(0)), (1,): (1 - f, f)}),
    }
    construction = AppendixConstruction(observed, a, b, c, d, e, f, DiscreteModel(g, mono, {}, cpts))
    _check_reconstruction(construction)
    return construction


def _check_reconstruction(construction: AppendixConstruction):
    law = observed_law(construction.model)
    obs = construction.observed
    checks = {
        'p11': law.prob({'X': 1, 'Y': 1, 'R_X': 1, 'R_Y': 1}),
        'p10': law.prob({'X': 1, 'Y': 0, 'R_X': 1, 'R_Y': 1}),
        'p01': law.prob({'X': 0, 'Y': 1, 'R_X': 1, 'R_Y': 1}),
        'p00': law.prob({'X': 0, 'Y': 0, 'R_X': 1, 'R_Y': 1}),
        'na_sum': law.prob({'R_X': 1, 'R_Y': 0}),
        'pnana': law.prob({'R_X': 0, 'R_Y': 0}),
    }
    for name, value in checks.items():
        if value != getattr(obs, name):
            raise ConstructionError(
                f"a = {construction.a}: reconstructed {name} = {value}, observed {getattr(obs, name)}"
            )


def appendix_pair(observed: AppendixObserved = DEFAULT_OBSERVED, a_values: Sequence = ()) -> List[AppendixConstruction]:
    return [solve_appendix(observed, a) for a in a_values]


def compare_models(m1: DiscreteModel, m2: DiscreteModel, marginal: Sequence[str] = ()) -> dict:
    """Observed-law agreement, full-law disagreement and optional marginal difference"""
    observed_diff = observed_law(m1).differences(observed_law(m2))
    full_diff = m1.full_law().differences(m2.full_law())
    variables = m1.full_law().variables
    summary = {
        'observed_equal': not observed_diff,
        'observed_differences': [_cell_json(variables, *d) for d in observed_diff],
        'full_law_differences': [_cell_json(variables, *d) for d in full_diff],
    }
    if marginal:
        tables = [query_eval(m, Query.marginal(marginal)) for m in (m1, m2)]
        summary['marginal'] = {
            'variables': list(marginal),
            'rows': [
                {'values': list(row), 'p1': rational(tables[0].values[row]), 'p2': rational(tables[1].values[row])}
                for row in sorted(tables[0].values)
            ],
        }
    return summary


def _cell_json(variables, cell, mine, theirs):
    return {'cell': dict(zip(variables, cell)), 'p1': rational(mine), 'p2': rational(theirs)}
