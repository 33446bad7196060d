"""
Missing-data DAGs: representation, validity, relatives, d-separation and
conditional-independence verdicts that respect monotone determinism.

Proxy variables and their deterministic edges are never stored; a partially
observed vertex stands for both its true value and its proxy.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx

from mdagid.errors import (
    MalformedContextError,
    OverlappingSetsError,
    UnknownVertexError,
)

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]
Context = Mapping[str, int]


class Kind(Enum):
    OBSERVED = "observed"
    PARTIAL = "partial"
    INDICATOR = "indicator"


@dataclass(frozen=True)
class MDag:
    kinds: Dict[str, Kind]
    edges: FrozenSet[Edge]
    indicator_of: Dict[str, str]
    graph: nx.DiGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        graph = nx.DiGraph()
        graph.add_nodes_from(sorted(self.kinds))
        graph.add_edges_from(sorted(self.edges))
        object.__setattr__(self, 'graph', graph)
        object.__setattr__(self, 'edges', frozenset(self.edges))

    @classmethod
    def build(cls, observed=(), partial=(), edges=(), prefix="R_"):
        """Create an m-DAG, adding one indicator named prefix+X per partial X"""
        kinds = {v: Kind.OBSERVED for v in observed}
        indicator_of = {}
        for x in partial:
            kinds[x] = Kind.PARTIAL
            kinds[prefix + x] = Kind.INDICATOR
            indicator_of[x] = prefix + x
        return cls(kinds=kinds, edges=frozenset(tuple(e) for e in edges),
                   indicator_of=indicator_of)

    @property
    def vertices(self):
        return frozenset(self.kinds)

    @property
    def observed(self):
        return sorted(v for v, k in self.kinds.items() if k is Kind.OBSERVED)

    @property
    def partial(self):
        return sorted(v for v, k in self.kinds.items() if k is Kind.PARTIAL)

    @property
    def indicators(self):
        return sorted(v for v, k in self.kinds.items() if k is Kind.INDICATOR)

    def kind_of(self, v):
        if v not in self.kinds:
            raise UnknownVertexError(v)
        return self.kinds[v]

    def is_indicator(self, v):
        return self.kinds.get(v) is Kind.INDICATOR

    def is_partial(self, v):
        return self.kinds.get(v) is Kind.PARTIAL

    def variable_of(self, indicator):
        for x, r in self.indicator_of.items():
            if r == indicator:
                return x
        raise UnknownVertexError(indicator)

    def parents(self, v):
        return relation_set(self, v, "parents")

    def children(self, v):
        return relation_set(self, v, "children")

    def topological_order(self):
        return list(nx.lexicographical_topological_sort(self.graph))


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    vertices: Tuple[str, ...] = ()
    line: Optional[int] = None
    column: Optional[int] = None

    def __str__(self):
        if self.line is None:
            return self.message
        return f"line {self.line}, column {self.column}: {self.message}"

    def to_json(self):
        body = {'kind': self.kind, 'message': self.message, 'vertices': list(self.vertices)}
        if self.line is not None:
            body.update(line=self.line, column=self.column)
        return body


@dataclass
class ValidationReport:
    violations: List[Violation] = field(default_factory=list)

    @property
    def valid(self):
        return not self.violations

    def to_json(self):
        return {'valid': self.valid, 'violations': [v.to_json() for v in self.violations]}


def validate_mdag(g: MDag) -> ValidationReport:
    """List every violated m-DAG property; an empty report means valid"""
    report = ValidationReport()
    add = report.violations.append

    for a, b in sorted(g.edges):
        missing = [v for v in (a, b) if v not in g.kinds]
        if missing:
            add(Violation("unknown-vertex", f"edge {a} -> {b} uses unknown vertex {missing[0]}", (a, b)))
        elif a == b:
            add(Violation("self-loop", f"self loop on {a}", (a,)))

    for cycle in nx.simple_cycles(g.graph):
        if len(cycle) > 1:
            path = " -> ".join(cycle + [cycle[0]])
            add(Violation("cycle", f"cycle {path}", tuple(cycle)))

    seen = {}
    for x, r in sorted(g.indicator_of.items()):
        if not g.is_partial(x):
            add(Violation("indicator-map", f"{x} has an indicator but is not partially observed", (x,)))
        if not g.is_indicator(r):
            add(Violation("indicator-map", f"{r} is not declared as a response indicator", (r,)))
        if r in seen:
            add(Violation("indicator-map", f"{r} is the indicator of both {seen[r]} and {x}", (seen[r], x, r)))
        seen[r] = x
    for x in g.partial:
        if x not in g.indicator_of:
            add(Violation("indicator-map", f"partially observed {x} has no response indicator", (x,)))
    for r in g.indicators:
        if r not in seen:
            add(Violation("indicator-map", f"response indicator {r} belongs to no variable", (r,)))

    substantive = set(g.observed) | set(g.partial)
    for r in g.indicators:
        bad = sorted(nx.descendants(g.graph, r) & substantive)
        if bad:
            add(Violation(
                "indicator-descendant",
                f"indicator has descendant in O ∪ X(1): {r} -> {', '.join(bad)}",
                (r, *bad),
            ))

    if report.violations:
        logger.debug("validation found %d violations", len(report.violations))
    return report


RELATIONS = ("parents", "children", "ancestors", "descendants")


def relation_set(g: MDag, v: str, kind: str) -> FrozenSet[str]:
    """Graph relatives of v; ancestors and descendants exclude v itself"""
    if v not in g.kinds:
        raise UnknownVertexError(v)
    if kind == "parents":
        return frozenset(g.graph.predecessors(v))
    if kind == "children":
        return frozenset(g.graph.successors(v))
    if kind == "ancestors":
        return frozenset(nx.ancestors(g.graph, v))
    if kind == "descendants":
        return frozenset(nx.descendants(g.graph, v))
    raise ValueError(f"unknown relation {kind!r}, expected one of {RELATIONS}")


def _check_sets(g, *sets):
    for s in sets:
        for v in s:
            if v not in g.kinds:
                raise UnknownVertexError(v)
    a, b, z = (set(s) for s in sets)
    overlap = (a & b) | (a & z) | (b & z)
    if overlap:
        raise OverlappingSetsError(f"sets overlap on {sorted(overlap)}")
    return a, b, z


def d_separated(g: MDag, A: Iterable[str], B: Iterable[str], Z: Iterable[str] = ()) -> bool:
    a, b, z = _check_sets(g, A, B, Z)
    if not a or not b:
        return True
    return nx.is_d_separator(g.graph, a, b, z)


@dataclass(frozen=True)
class MonotoneSpec:
    """Pairs (R_X, R_Y) meaning R_X >= R_Y"""
    pairs: FrozenSet[Edge] = frozenset()
    _closure: FrozenSet[Edge] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pairs = frozenset(tuple(p) for p in self.pairs)
        object.__setattr__(self, 'pairs', pairs)
        closed = nx.transitive_closure(nx.DiGraph(sorted(pairs)), reflexive=False) if pairs else None
        object.__setattr__(self, '_closure', frozenset(closed.edges) if closed else frozenset())

    def __bool__(self):
        return bool(self.pairs)

    def closure(self) -> FrozenSet[Edge]:
        return self._closure

    def upstream(self, r):
        """Indicators forced to 1 whenever r is 1"""
        return frozenset(a for a, b in self.closure() if b == r)

    def has_pair(self, a, b):
        return (a, b) in self.pairs

    def violations(self, g: MDag) -> List[Violation]:
        found = []
        for a, b in sorted(self.pairs):
            for v in (a, b):
                if not g.is_indicator(v):
                    found.append(Violation("mono-endpoint", f"mono endpoint is not a response indicator: {v}", (v,)))
            if (a, b) not in g.edges:
                found.append(Violation("mono-edge", f"mono pair {a} >= {b} has no edge {a} -> {b}", (a, b)))
        return found


def is_null_assignment(mono: MonotoneSpec, assignment: Mapping[str, int]) -> bool:
    """True when the indicator values violate a (transitively closed) monotone pair"""
    return any(assignment.get(a) == 0 and assignment.get(b) == 1 for a, b in mono.closure())


class CiStatus(Enum):
    HOLDS = "Holds"
    UNDEFINED_CONTEXT = "UndefinedContext"
    UNKNOWN = "Unknown"
    NOT_SEPARATED = "NotSeparated"


@dataclass(frozen=True)
class CiVerdict:
    status: CiStatus
    reason: str

    @property
    def holds(self):
        return self.status is CiStatus.HOLDS

    def to_json(self):
        return {'status': self.status.value, 'reason': self.reason}


def check_context(g: MDag, ctx: Context):
    for v, value in ctx.items():
        if not g.is_indicator(v):
            raise MalformedContextError(f"context assigns {v}, which is not a response indicator")
        if value not in (0, 1):
            raise MalformedContextError(f"context value for {v} must be 0 or 1, got {value!r}")


def _fmt(ctx):
    return ", ".join(f"{k}={v}" for k, v in sorted(ctx.items())) or "∅"


def ci_under_context(g: MDag, mono: MonotoneSpec, A, B, Z, ctx: Context) -> CiVerdict:
    """
    Conditional independence of A and B given Z under the value assignment ctx.

    Holds only when the sets are d-separated, the context is a nonzero event,
    and every indicator involved has all of its monotone-upstream indicators
    fixed to 1 in ctx.
    """
    check_context(g, ctx)
    a, b, z = _check_sets(g, A, B, Z)

    if is_null_assignment(mono, ctx):
        return CiVerdict(CiStatus.UNDEFINED_CONTEXT, f"context {_fmt(ctx)} violates monotonicity")

    if not d_separated(g, a, b, z):
        return CiVerdict(CiStatus.NOT_SEPARATED, "an active path connects the sets")

    queried = sorted(v for v in a | b | z if g.is_indicator(v))
    loose = sorted(
        (u, q) for q in queried for u in mono.upstream(q) if ctx.get(u) != 1
    )
    if loose:
        u, q = loose[0]
        return CiVerdict(
            CiStatus.UNKNOWN,
            f"{u} >= {q} is not fixed to 1 by the context; determinism may break the independence",
        )
    return CiVerdict(CiStatus.HOLDS, f"d-separated under {_fmt(ctx)}")
