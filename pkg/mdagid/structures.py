"""
Detection of the graph structures that govern full-law identifiability:
colluders, maximal colluders, self-censoring edges and self-censoring paths.
"""
import logging
from dataclasses import dataclass
from typing import FrozenSet, List, Tuple

import networkx as nx

from mdagid.errors import NotAnIndicatorError
from mdagid.graph import MDag, MonotoneSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Colluder:
    collider_var: str
    collider_ind: str
    target: str

    def to_json(self):
        return {'variable': self.collider_var, 'indicator': self.collider_ind, 'target': self.target}


@dataclass(frozen=True)
class MaximalColluder:
    c_set: FrozenSet[str]
    target: str

    def indicators(self, g: MDag):
        return sorted(g.indicator_of[c] for c in self.c_set)

    def to_json(self):
        return {'c_set': sorted(self.c_set), 'target': self.target}


@dataclass(frozen=True, order=True)
class SelfCensoringPath:
    variable: str
    indicator_chain: Tuple[str, ...]

    @property
    def k(self):
        return len(self.indicator_chain)

    def to_json(self):
        return {'variable': self.variable, 'indicator_chain': list(self.indicator_chain)}


def find_colluders(g: MDag) -> List[Colluder]:
    found = set()
    for target in g.indicators:
        parents = g.parents(target)
        for x in parents:
            if g.is_partial(x) and g.indicator_of[x] in parents:
                found.add(Colluder(x, g.indicator_of[x], target))
    return sorted(found)


def find_maximal_colluder(g: MDag, r_y: str) -> MaximalColluder:
    if not g.is_indicator(r_y):
        raise NotAnIndicatorError(r_y)
    parents = g.parents(r_y)
    c_set = frozenset(
        x for x in parents if g.is_partial(x) and g.indicator_of[x] in parents
    )
    return MaximalColluder(c_set, r_y)


def colluder_is_monotone(g: MDag, mc: MaximalColluder, mono: MonotoneSpec) -> bool:
    """min R_C >= R_Y, i.e. every colluding indicator dominates the target"""
    return bool(mc.c_set) and all(mono.has_pair(g.indicator_of[c], mc.target) for c in mc.c_set)


def find_self_censoring(g: MDag, mono: MonotoneSpec) -> Tuple[List[Tuple[str, str]], List[SelfCensoringPath]]:
    """
    Self-censoring edges X -> R_X and self-censoring paths
    X_k -> R_X1 -> ... -> R_Xk whose indicator edges are all monotone.
    """
    edges = sorted(
        (x, r) for x, r in g.indicator_of.items() if (x, r) in g.edges
    )

    chain_graph = nx.DiGraph()
    chain_graph.add_nodes_from(g.indicators)
    chain_graph.add_edges_from(p for p in sorted(mono.pairs) if p in g.edges)

    paths = set()
    for x in g.partial:
        own = g.indicator_of[x]
        for start in sorted(g.children(x)):
            if not g.is_indicator(start):
                continue
            if start == own:
                paths.add(SelfCensoringPath(x, (own,)))
                continue
            for chain in nx.all_simple_paths(chain_graph, start, own):
                paths.add(SelfCensoringPath(x, tuple(chain)))

    logger.debug("self-censoring: %d edges, %d paths", len(edges), len(paths))
    return edges, sorted(paths)


def detect_all(g: MDag, mono: MonotoneSpec) -> dict:
    colluders = find_colluders(g)
    maximal = [find_maximal_colluder(g, r) for r in sorted({c.target for c in colluders})]
    edges, paths = find_self_censoring(g, mono)
    return {
        'colluders': [c.to_json() for c in colluders],
        'maximal_colluders': [
            {**m.to_json(), 'monotone': colluder_is_monotone(g, m, mono)} for m in maximal
        ],
        'self_censoring_edges': [{'variable': x, 'indicator': r} for x, r in edges],
        'self_censoring_paths': [p.to_json() for p in paths],
    }
