"""
Exact discrete models over an m-DAG, their full and observed laws, and
exact query evaluation by enumeration.
"""
import itertools
import logging
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from mdagid import config
from mdagid.errors import ConditioningOnNull, ConstructionError, NotObservable, UnknownVertexError
from mdagid.expr import rational
from mdagid.graph import Kind, MDag, MonotoneSpec, is_null_assignment

logger = logging.getLogger(__name__)

NA = None


@dataclass(frozen=True)
class Cpt:
    """p(vertex | parents); rows maps a parent-value tuple to the column over the vertex's domain"""
    vertex: str
    parents: Tuple[str, ...]
    rows: Dict[Tuple[int, ...], Tuple[Fraction, ...]]

    def prob(self, value, parent_values):
        return self.rows[tuple(parent_values)][value]


class _Table:
    """Probability table with the evaluate() law interface"""

    def __init__(self, variables, cells, domains):
        self.variables = tuple(variables)
        self.cells = dict(cells)
        self.domains = dict(domains)
        self._index = {v: i for i, v in enumerate(self.variables)}
        self._cache = {}

    def domain(self, name) -> Sequence[int]:
        if name not in self.domains:
            raise UnknownVertexError(name)
        return self.domains[name]

    def prob(self, event: Mapping[str, int]) -> Fraction:
        key = frozenset(event.items())
        if key not in self._cache:
            for name in event:
                if name not in self._index:
                    raise UnknownVertexError(name)
            picks = [(self._index[n], v) for n, v in event.items()]
            self._cache[key] = sum(
                (mass for cell, mass in self.cells.items() if all(cell[i] == v for i, v in picks)),
                Fraction(0),
            )
        return self._cache[key]

    def total(self):
        return sum(self.cells.values(), Fraction(0))

    def nonzero(self):
        return {cell: mass for cell, mass in self.cells.items() if mass != 0}

    def differences(self, other) -> List[Tuple[tuple, Fraction, Fraction]]:
        """Cells where the two tables disagree, as (cell, mine, theirs)"""
        if self.variables != other.variables:
            raise ValueError("tables are over different variables")
        keys = sorted(set(self.cells) | set(other.cells), key=_cell_key)
        found = []
        for cell in keys:
            mine, theirs = self.cells.get(cell, Fraction(0)), other.cells.get(cell, Fraction(0))
            if mine != theirs:
                found.append((cell, mine, theirs))
        return found

    def to_json(self):
        return {
            'variables': list(self.variables),
            'cells': [
                {'values': list(cell), 'p': rational(mass)}
                for cell, mass in sorted(self.cells.items(), key=lambda kv: _cell_key(kv[0]))
            ],
        }


def _cell_key(cell):
    return tuple(-1 if v is NA else v for v in cell)


class FullLaw(_Table):
    """p(O, X(1), R); every cell is readable"""

    def require_observable(self, values, term):
        return None


class ObservedLaw(_Table):
    """p(O, X, R) with NA (None) for values hidden by R = 0"""

    def __init__(self, variables, cells, domains, indicator_of):
        super().__init__(variables, cells, domains)
        self.indicator_of = dict(indicator_of)

    def require_observable(self, values, term):
        for name in values:
            indicator = self.indicator_of.get(name)
            if indicator is not None and values.get(indicator) != 1:
                raise NotObservable(name, term)


@dataclass
class DiscreteModel:
    graph: MDag
    mono: MonotoneSpec
    cardinalities: Dict[str, int]
    cpts: Dict[str, Cpt]
    _full: Optional[FullLaw] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for v in self.graph.vertices:
            self.cardinalities.setdefault(v, 2)
        for r in self.graph.indicators:
            if self.cardinalities[r] != 2:
                raise ConstructionError(f"response indicator {r} must be binary")
        for v in self.graph.vertices:
            cpt = self.cpts.get(v)
            if cpt is None:
                raise ConstructionError(f"no CPT for {v}")
            if set(cpt.parents) != set(self.graph.parents(v)):
                raise ConstructionError(f"CPT parents of {v} do not match the graph")
            for parent_values in self.parent_assignments(cpt.parents):
                column = cpt.rows.get(parent_values)
                if column is None or len(column) != self.cardinalities[v]:
                    raise ConstructionError(f"CPT of {v} is missing row {parent_values}")
                if sum(column, Fraction(0)) != 1 or any(q < 0 for q in column):
                    raise ConstructionError(f"CPT column of {v} at {parent_values} is not a distribution")

    @property
    def variables(self):
        return tuple(self.graph.topological_order())

    def domain(self, v):
        return tuple(range(self.cardinalities[v]))

    def parent_assignments(self, parents):
        return list(itertools.product(*(self.domain(p) for p in parents)))

    def full_law(self) -> FullLaw:
        if self._full is None:
            order = self.variables
            index = {v: i for i, v in enumerate(order)}
            cells = {}
            for cell in itertools.product(*(self.domain(v) for v in order)):
                mass = Fraction(1)
                for v in order:
                    cpt = self.cpts[v]
                    mass *= cpt.prob(cell[index[v]], (cell[index[p]] for p in cpt.parents))
                    if mass == 0:
                        break
                cells[cell] = mass
            self._full = FullLaw(order, cells, {v: self.domain(v) for v in order})
        return self._full

    def monotone_violations(self):
        """Full-law cells with positive mass whose indicator values break a monotone pair"""
        law = self.full_law()
        bad = []
        for cell, mass in law.cells.items():
            values = dict(zip(law.variables, cell))
            if mass != 0 and is_null_assignment(self.mono, values):
                bad.append(cell)
        return bad

    def to_json(self):
        g = self.graph
        return {
            'observed': g.observed,
            'partial': g.partial,
            'indicator_of': dict(sorted(g.indicator_of.items())),
            'edges': [list(e) for e in sorted(g.edges)],
            'mono': [list(pair) for pair in sorted(self.mono.pairs)],
            'cardinalities': dict(sorted(self.cardinalities.items())),
            'cpts': {
                v: {
                    'parents': list(cpt.parents),
                    'rows': [
                        {'parents': list(pv), 'p': [rational(q) for q in column]}
                        for pv, column in sorted(cpt.rows.items())
                    ],
                }
                for v, cpt in sorted(self.cpts.items())
            },
        }

    @classmethod
    def from_json(cls, data):
        kinds = {v: Kind.OBSERVED for v in data['observed']}
        kinds.update({v: Kind.PARTIAL for v in data['partial']})
        kinds.update({r: Kind.INDICATOR for r in data['indicator_of'].values()})
        g = MDag(kinds=kinds, edges=frozenset(tuple(e) for e in data['edges']),
                 indicator_of=dict(data['indicator_of']))
        cpts = {
            v: Cpt(v, tuple(spec['parents']), {
                tuple(row['parents']): tuple(Fraction(q) for q in row['p']) for row in spec['rows']
            })
            for v, spec in data['cpts'].items()
        }
        return cls(g, MonotoneSpec(frozenset(tuple(p) for p in data['mono'])),
                   dict(data['cardinalities']), cpts)


def forced_zero(g: MDag, mono: MonotoneSpec, vertex, parents, parent_values):
    """An indicator with a monotone parent at 0 is 0 with probability one"""
    if not g.is_indicator(vertex):
        return False
    values = dict(zip(parents, parent_values))
    return any(mono.has_pair(a, vertex) and values.get(a) == 0 for a in parents)


def random_model(g: MDag, mono: MonotoneSpec, seed=None, cardinalities=None,
                 bound=None) -> DiscreteModel:
    """
    Random exact-rational model consistent with (g, mono).

    Args:
        seed: seed of the numerator stream; identical seeds give identical models
        cardinalities: domain size per vertex, default 2
        bound: numerators are drawn from 1..bound // (k - 1) for a k-valued vertex

    Returns:
        DiscreteModel whose only zero cells are the monotone-forced ones
    """
    rng = random.Random(config.DEFAULT_SEED if seed is None else seed)
    bound = bound or config.NUMERATOR_BOUND
    cards = {v: 2 for v in g.vertices}
    cards.update(cardinalities or {})

    cpts = {}
    for v in g.topological_order():
        parents = tuple(sorted(g.parents(v)))
        k = cards[v]
        top = max(bound // max(k - 1, 1), 1)
        rows = {}
        for parent_values in itertools.product(*(range(cards[p]) for p in parents)):
            if forced_zero(g, mono, v, parents, parent_values):
                rows[parent_values] = (Fraction(1), Fraction(0))
                continue
            numerators = [rng.randint(1, top) for _ in range(k)]
            total = sum(numerators)
            rows[parent_values] = tuple(Fraction(n, total) for n in numerators)
        cpts[v] = Cpt(v, parents, rows)
    return DiscreteModel(g, mono, cards, cpts)


def observed_law(m: DiscreteModel) -> ObservedLaw:
    full = m.full_law()
    g = m.graph
    index = {v: i for i, v in enumerate(full.variables)}
    hide = [(index[x], index[r]) for x, r in sorted(g.indicator_of.items())]

    cells = {}
    for cell, mass in full.cells.items():
        coarse = list(cell)
        for xi, ri in hide:
            if cell[ri] == 0:
                coarse[xi] = NA
        coarse = tuple(coarse)
        cells[coarse] = cells.get(coarse, Fraction(0)) + mass
    return ObservedLaw(full.variables, cells, full.domains, g.indicator_of)


@dataclass(frozen=True)
class Query:
    """
    A quantity computed from the full law. Kinds: full_law, target_law,
    marginal (over variables), conditional (p(event | given) with fixed pins).
    """
    kind: str
    event: Tuple[str, ...] = ()
    given: Tuple[str, ...] = ()
    fixed: Tuple[Tuple[str, int], ...] = ()

    @classmethod
    def full_law(cls):
        return cls('full_law')

    @classmethod
    def target_law(cls):
        return cls('target_law')

    @classmethod
    def marginal(cls, variables):
        return cls('marginal', tuple(variables))

    @classmethod
    def conditional(cls, event, given=(), fixed=None):
        return cls('conditional', tuple(event), tuple(given), tuple(sorted((fixed or {}).items())))

    def variables(self, m: DiscreteModel):
        if self.kind == 'full_law':
            return tuple(m.variables)
        if self.kind == 'target_law':
            keep = set(m.graph.observed) | set(m.graph.partial)
            return tuple(v for v in m.variables if v in keep)
        if self.kind == 'marginal':
            return self.event
        if self.kind == 'conditional':
            return self.event + self.given
        raise ValueError(f"unknown query kind {self.kind!r}")

    def to_json(self):
        return {'kind': self.kind, 'event': list(self.event), 'given': list(self.given),
                'fixed': {n: v for n, v in self.fixed}}


@dataclass
class QueryTable:
    variables: Tuple[str, ...]
    values: Dict[Tuple[int, ...], Fraction]

    def to_json(self):
        return {
            'variables': list(self.variables),
            'rows': [{'values': list(k), 'p': rational(v)} for k, v in sorted(self.values.items())],
        }


def query_eval(m: DiscreteModel, query: Query) -> QueryTable:
    """
    Exact value table of query by enumeration of the full law. Conditional
    rows whose conditioning event has probability zero are left out; a
    zero-probability fixed pin raises ConditioningOnNull.
    """
    law = m.full_law()
    variables = query.variables(m)
    for v in variables + tuple(n for n, _ in query.fixed):
        if v not in m.graph.kinds:
            raise UnknownVertexError(v)

    if query.kind == 'full_law':
        return QueryTable(variables, dict(law.cells))

    fixed = dict(query.fixed)
    values = {}
    if query.kind == 'conditional' and fixed and law.prob(fixed) == 0:
        raise ConditioningOnNull(fixed)
    for row in itertools.product(*(m.domain(v) for v in variables)):
        event = dict(zip(variables, row))
        if query.kind == 'conditional':
            given = {**fixed, **{g: event[g] for g in query.given}}
            denominator = law.prob(given)
            if denominator == 0:
                continue
            values[row] = law.prob({**given, **event}) / denominator
        else:
            values[row] = law.prob(event)
    return QueryTable(variables, values)
