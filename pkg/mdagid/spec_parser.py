"""
Graph-spec files: parsing with line/column diagnostics and canonical rendering.
"""
import logging
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Dict, Tuple

from lark import Lark, Transformer
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from mdagid import config
from mdagid.errors import SpecSemanticError, SpecSyntaxError
from mdagid.expr import read_grammar
from mdagid.graph import Kind, MDag, MonotoneSpec, ValidationReport, Violation, validate_mdag

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphSpec:
    source: str = field(compare=False)
    graph: MDag
    mono: MonotoneSpec
    cardinalities: Dict[str, int]
    locations: Dict[tuple, Tuple[int, int]] = field(default_factory=dict, compare=False, repr=False)

    def validate(self) -> ValidationReport:
        """Structural violations, each located at the statement that introduced it"""
        violations = validate_mdag(self.graph).violations + self.mono.violations(self.graph)
        return ValidationReport([self._locate(v) for v in violations])

    def _locate(self, violation: Violation) -> Violation:
        vs = violation.vertices
        if violation.kind.startswith('mono'):
            keys = [('mono', *vs)]
            keys += [k for k in sorted(self.locations) if k[0] == 'mono' and set(vs) & set(k[1:])]
        else:
            # consecutive pairs cover edges, paths and closed cycles
            keys = [('edge', a, b) for a, b in zip(vs, vs[1:] + vs[:1])]
            keys += [k for k in sorted(self.locations) if k[0] == 'edge' and vs and k[1] == vs[0]]
            keys += [('var', v) for v in vs]
        for key in keys:
            if key in self.locations:
                line, column = self.locations[key]
                return replace(violation, line=line, column=column)
        return violation

    def to_json(self):
        g = self.graph
        return {
            'observed': g.observed,
            'partial': g.partial,
            'indicators': g.indicators,
            'edges': [list(e) for e in sorted(g.edges)],
            'mono': [list(p) for p in sorted(self.mono.pairs)],
            'cardinalities': dict(sorted(self.cardinalities.items())),
        }


class _Statements(Transformer):
    def start(self, items):
        return list(items)

    def var_stmt(self, items):
        name, kind = items
        return ('var', name, str(kind))

    def edge_stmt(self, items):
        return ('edge', items[0], items[1])

    def mono_stmt(self, items):
        return ('mono', items[0], items[1])

    def card_stmt(self, items):
        return ('card', items[0], items[1])


@lru_cache(maxsize=None)
def get_spec_parser() -> Lark:
    return Lark(read_grammar("mdag.lark"), parser="lalr", lexer="contextual")


def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _syntax_error(e: UnexpectedInput, lines):
    # end-of-input errors carry line -1
    line = e.line if e.line and e.line > 0 else max(len(lines), 1)
    column = e.column if e.column and e.column > 0 else 1
    source_line = lines[line - 1] if line - 1 < len(lines) else ""
    if isinstance(e, UnexpectedCharacters):
        message = f"unexpected character {source_line[column - 1:column]!r}"
    elif isinstance(e, UnexpectedToken):
        message = f"unexpected {e.token!r}, expected one of {sorted(e.expected)}"
    elif isinstance(e, UnexpectedEOF):
        message = "unexpected end of input"
    else:
        message = str(e)
    return SpecSyntaxError(message, line, column, source_line)


def parse_mdag_file(text: str, prefix: str = config.INDICATOR_PREFIX) -> GraphSpec:
    """
    Parse a graph-spec text into an m-DAG and its monotone pairs.

    Response indicators prefix+X are created for every partial X. Structural
    validity (acyclicity, indicators without substantive descendants, mono
    pairs backed by edges) is not checked here; see GraphSpec.validate.

    Raises:
        SpecSyntaxError: the text does not follow the grammar
        SpecSemanticError: duplicate or unknown names, indicator-name
            collisions, mono on a non-indicator, bad cardinalities
    """
    lines = text.splitlines()
    try:
        tree = get_spec_parser().parse(_strip_comments(text) + "\n")
    except UnexpectedInput as e:
        raise _syntax_error(e, lines) from e
    statements = _Statements().transform(tree)

    kinds, locations = {}, {}
    for stmt in statements:
        if stmt[0] != 'var':
            continue
        _, name, kind = stmt
        if name in kinds:
            raise SpecSemanticError(f"vertex {name} declared twice", name.line, name.column)
        kinds[str(name)] = Kind.PARTIAL if kind == 'partial' else Kind.OBSERVED
        locations[('var', str(name))] = (name.line, name.column)

    indicator_of = {}
    for stmt in statements:
        if stmt[0] == 'var' and stmt[2] == 'partial':
            name = stmt[1]
            indicator = prefix + str(name)
            if indicator in kinds:
                loc = locations[('var', indicator)]
                raise SpecSemanticError(
                    f"{indicator} collides with the response indicator of {name}", *loc
                )
            indicator_of[str(name)] = indicator
    kinds.update({r: Kind.INDICATOR for r in indicator_of.values()})

    edges, pairs, cards = set(), set(), {}
    for stmt in statements:
        head = stmt[0]
        if head == 'edge':
            _, a, b = stmt
            for v in (a, b):
                if str(v) not in kinds:
                    raise SpecSemanticError(f"unknown vertex {v}", v.line, v.column)
            edges.add((str(a), str(b)))
            locations[('edge', str(a), str(b))] = (a.line, a.column)
        elif head == 'mono':
            _, a, b = stmt
            for v in (a, b):
                if kinds.get(str(v)) is not Kind.INDICATOR:
                    raise SpecSemanticError(f"mono endpoint is not a response indicator: {v}", v.line, v.column)
            pairs.add((str(a), str(b)))
            locations[('mono', str(a), str(b))] = (a.line, a.column)
        elif head == 'card':
            _, name, k = stmt
            if str(name) not in kinds:
                raise SpecSemanticError(f"unknown vertex {name}", name.line, name.column)
            if int(k) < 2:
                raise SpecSemanticError(f"cardinality of {name} must be at least 2", k.line, k.column)
            if kinds[str(name)] is Kind.INDICATOR and int(k) != 2:
                raise SpecSemanticError(f"response indicator {name} must be binary", k.line, k.column)
            cards[str(name)] = int(k)
            locations[('card', str(name))] = (name.line, name.column)

    graph = MDag(kinds=kinds, edges=frozenset(edges), indicator_of=indicator_of)
    logger.debug("parsed spec: %d vertices, %d edges, %d mono pairs", len(kinds), len(edges), len(pairs))
    return GraphSpec(text, graph, MonotoneSpec(frozenset(pairs)), cards, locations)


def render_spec(spec: GraphSpec) -> str:
    """Canonical text: declarations, edges, mono pairs, cardinalities, each sorted"""
    g = spec.graph
    out = [f"var {v} observed" for v in g.observed]
    out += [f"var {v} partial" for v in g.partial]
    out += [f"edge {a} -> {b}" for a, b in sorted(g.edges)]
    out += [f"mono {a} >= {b}" for a, b in sorted(spec.mono.pairs)]
    out += [f"card {v} {k}" for v, k in sorted(spec.cardinalities.items())]
    return "\n".join(out) + "\n"
