"""
Symbolic probability expressions and their exact evaluation.

Expressions are immutable trees. A ProbTerm reads a (conditional) probability
from a law; the other nodes combine terms. Text form:

    p(Y, R_Y=1 | X, R_X=1)      term, unpinned names are free
    [A * B]                     product ([] is 1)
    (A / B)                     quotient
    sum_{W, R_W} A              marginal sum
    A|_{R_X=1}                  restriction
    cases{R_X=0 -> 0; * -> A}   piecewise, first matching guard wins
"""
import itertools
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Optional, Protocol, Sequence, Tuple

from lark import Lark, Transformer
from lark.exceptions import LarkError, UnexpectedInput, VisitError

from mdagid.errors import (
    ConditioningOnNull,
    ExprSyntaxError,
    NoMatchingCase,
    UnboundVariable,
)

logger = logging.getLogger(__name__)

Assignment = Tuple[Tuple[str, int], ...]


class Law(Protocol):
    """What evaluate needs from a full or observed law"""

    def domain(self, name: str) -> Sequence[int]: ...

    def prob(self, event: Mapping[str, int]) -> Fraction: ...

    def require_observable(self, values: Mapping[str, int], term: "ProbTerm") -> None: ...


@dataclass(frozen=True)
class VarRef:
    name: str
    value: Optional[int] = None

    def __str__(self):
        return self.name if self.value is None else f"{self.name}={self.value}"


@dataclass(frozen=True)
class ProbTerm:
    event: Tuple[VarRef, ...]
    given: Tuple[VarRef, ...] = ()

    def __str__(self):
        return render(self)


@dataclass(frozen=True)
class Product:
    factors: Tuple["Expr", ...] = ()


@dataclass(frozen=True)
class Quotient:
    numerator: "Expr"
    denominator: "Expr"


@dataclass(frozen=True)
class MarginalSum:
    variables: Tuple[str, ...]
    body: "Expr"


@dataclass(frozen=True)
class Constant:
    value: Fraction


@dataclass(frozen=True)
class Restriction:
    assignment: Assignment
    body: "Expr"

    def as_dict(self):
        return dict(self.assignment)


@dataclass(frozen=True)
class Piecewise:
    cases: Tuple[Tuple[Assignment, "Expr"], ...]


Expr = (ProbTerm, Product, Quotient, MarginalSum, Constant, Restriction, Piecewise)


def _ref(text):
    if isinstance(text, VarRef):
        return text
    name, sep, value = text.partition("=")
    return VarRef(name.strip(), int(value) if sep else None)


def p(*event, given=()):
    """Shorthand term builder: p("Y", "R_Y=1", given=["X", "R_X=1"])"""
    return ProbTerm(tuple(_ref(e) for e in event), tuple(_ref(g) for g in given))


def rational(value) -> str:
    """Exact "num/den" text of a rational"""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def assignment_of(mapping: Mapping[str, int]) -> Assignment:
    return tuple(sorted(mapping.items()))


def restrict(mapping: Mapping[str, int], body):
    return Restriction(assignment_of(mapping), body) if mapping else body


def free_variables(expr) -> frozenset:
    if isinstance(expr, ProbTerm):
        return frozenset(r.name for r in expr.event + expr.given if r.value is None)
    if isinstance(expr, Product):
        return frozenset().union(*(free_variables(f) for f in expr.factors))
    if isinstance(expr, Quotient):
        return free_variables(expr.numerator) | free_variables(expr.denominator)
    if isinstance(expr, MarginalSum):
        return free_variables(expr.body) - set(expr.variables)
    if isinstance(expr, Restriction):
        return free_variables(expr.body) - {n for n, _ in expr.assignment}
    if isinstance(expr, Piecewise):
        names = set()
        for guard, body in expr.cases:
            names |= {n for n, _ in guard} | free_variables(body)
        return frozenset(names)
    if isinstance(expr, Constant):
        return frozenset()
    raise TypeError(f"not an expression: {expr!r}")


# Evaluation

def _bind(refs, assignment):
    values = {}
    for ref in refs:
        if ref.value is not None:
            value = ref.value
        elif ref.name in assignment:
            value = assignment[ref.name]
        else:
            raise UnboundVariable(ref.name)
        if values.get(ref.name, value) != value:
            return None
        values[ref.name] = value
    return values


def _eval_term(term: ProbTerm, law: Law, assignment):
    event = _bind(term.event, assignment)
    given = _bind(term.given, assignment)
    if given is None:
        raise ConditioningOnNull({r.name: r.value for r in term.given})
    law.require_observable({**(event or {}), **given}, term)

    if given:
        law.require_observable(given, term)
        denominator = law.prob(given)
        if denominator == 0:
            raise ConditioningOnNull(given)
    else:
        denominator = Fraction(1)
    if event is None or any(given.get(k, v) != v for k, v in event.items()):
        return Fraction(0)
    return law.prob({**given, **event}) / denominator


def evaluate(expr, law: Law, assignment: Mapping[str, int] = None) -> Fraction:
    """Exact value of expr under law with the free variables bound by assignment"""
    assignment = dict(assignment or {})

    if isinstance(expr, ProbTerm):
        return _eval_term(expr, law, assignment)
    if isinstance(expr, Constant):
        return Fraction(expr.value)
    if isinstance(expr, Product):
        result = Fraction(1)
        for factor in expr.factors:
            result *= evaluate(factor, law, assignment)
            if result == 0:
                break
        return result
    if isinstance(expr, Quotient):
        denominator = evaluate(expr.denominator, law, assignment)
        if denominator == 0:
            raise ConditioningOnNull(assignment)
        return evaluate(expr.numerator, law, assignment) / denominator
    if isinstance(expr, MarginalSum):
        total = Fraction(0)
        domains = [law.domain(v) for v in expr.variables]
        for values in itertools.product(*domains):
            total += evaluate(expr.body, law, {**assignment, **dict(zip(expr.variables, values))})
        return total
    if isinstance(expr, Restriction):
        return evaluate(expr.body, law, {**assignment, **expr.as_dict()})
    if isinstance(expr, Piecewise):
        for guard, body in expr.cases:
            for name, _ in guard:
                if name not in assignment:
                    raise UnboundVariable(name)
            if all(assignment[n] == v for n, v in guard):
                return evaluate(body, law, assignment)
        raise NoMatchingCase(assignment)
    raise TypeError(f"not an expression: {expr!r}")


# Text form

def _assigns(assignment):
    return ", ".join(f"{n}={v}" for n, v in assignment)


def render(expr) -> str:
    if isinstance(expr, ProbTerm):
        event = ", ".join(str(r) for r in expr.event)
        if expr.given:
            return f"p({event} | {', '.join(str(r) for r in expr.given)})"
        return f"p({event})"
    if isinstance(expr, Constant):
        return str(Fraction(expr.value))
    if isinstance(expr, Product):
        return "[" + " * ".join(render(f) for f in expr.factors) + "]"
    if isinstance(expr, Quotient):
        return f"({render(expr.numerator)} / {render(expr.denominator)})"
    if isinstance(expr, MarginalSum):
        return f"sum_{{{', '.join(expr.variables)}}} {render(expr.body)}"
    if isinstance(expr, Restriction):
        body = render(expr.body)
        if isinstance(expr.body, MarginalSum):
            body = "{" + body + "}"
        return f"{body}|_{{{_assigns(expr.assignment)}}}"
    if isinstance(expr, Piecewise):
        cases = "; ".join(f"{_assigns(g) or '*'} -> {render(b)}" for g, b in expr.cases)
        return f"cases{{{cases}}}"
    raise TypeError(f"not an expression: {expr!r}")


class ExprTransformer(Transformer):
    def NAME(self, token):
        return str(token)

    def NUMBER(self, token):
        return str(token)

    def constant(self, items):
        return Constant(Fraction(items[0]))

    def ref(self, items):
        if len(items) == 1:
            return VarRef(items[0])
        return VarRef(items[0], _int(items[1]))

    def refs(self, items):
        return tuple(items)

    def given(self, items):
        return items[0]

    def term(self, items):
        return ProbTerm(items[0], items[1] if len(items) > 1 else ())

    def product(self, items):
        return Product(tuple(items))

    def quotient(self, items):
        return Quotient(items[0], items[1])

    def names(self, items):
        return tuple(items)

    def sum(self, items):
        return MarginalSum(items[0], items[1])

    def assign(self, items):
        return items[0], _int(items[1])

    def assigns(self, items):
        return tuple(sorted(items))

    def restriction(self, items):
        return Restriction(items[1], items[0])

    def wildcard(self, items):
        return ()

    def guard(self, items):
        return items[0]

    def case(self, items):
        return items[0], items[1]

    def cases(self, items):
        return Piecewise(tuple(items))


def _int(text):
    if "/" in text:
        raise ExprSyntaxError(f"variable values are integers, got {text}")
    return int(text)


def read_grammar(name: str) -> str:
    grammar_dir = os.path.join(os.path.dirname(os.path.realpath(__file__)), "grammar")
    with open(os.path.join(grammar_dir, name), "r") as grammar_file:
        return grammar_file.read()


@lru_cache(maxsize=None)
def get_parser() -> Lark:
    return Lark(read_grammar("expr.lark"), parser="lalr", lexer="contextual")


def parse_expr(text: str):
    try:
        tree = get_parser().parse(text)
    except UnexpectedInput as e:
        raise ExprSyntaxError(f"column {e.column}: {e}") from e
    except LarkError as e:
        raise ExprSyntaxError(str(e)) from e
    try:
        return ExprTransformer().transform(tree)
    except VisitError as e:
        raise e.orig_exc from e


# JSON tree form

def _refs_json(refs):
    return [{'name': r.name, 'value': r.value} for r in refs]


def _assign_json(assignment):
    return [{'name': n, 'value': v} for n, v in assignment]


def to_json(expr) -> dict:
    if isinstance(expr, ProbTerm):
        return {'kind': 'term', 'event': _refs_json(expr.event), 'given': _refs_json(expr.given)}
    if isinstance(expr, Constant):
        return {'kind': 'constant', 'value': rational(expr.value)}
    if isinstance(expr, Product):
        return {'kind': 'product', 'factors': [to_json(f) for f in expr.factors]}
    if isinstance(expr, Quotient):
        return {'kind': 'quotient', 'numerator': to_json(expr.numerator),
                'denominator': to_json(expr.denominator)}
    if isinstance(expr, MarginalSum):
        return {'kind': 'sum', 'variables': list(expr.variables), 'body': to_json(expr.body)}
    if isinstance(expr, Restriction):
        return {'kind': 'restriction', 'assignment': _assign_json(expr.assignment),
                'body': to_json(expr.body)}
    if isinstance(expr, Piecewise):
        return {'kind': 'cases', 'cases': [
            {'guard': _assign_json(g), 'body': to_json(b)} for g, b in expr.cases
        ]}
    raise TypeError(f"not an expression: {expr!r}")


def from_json(data: dict):
    kind = data['kind']
    if kind == 'term':
        return ProbTerm(
            tuple(VarRef(r['name'], r['value']) for r in data['event']),
            tuple(VarRef(r['name'], r['value']) for r in data.get('given', [])),
        )
    if kind == 'constant':
        return Constant(Fraction(data['value']))
    if kind == 'product':
        return Product(tuple(from_json(f) for f in data['factors']))
    if kind == 'quotient':
        return Quotient(from_json(data['numerator']), from_json(data['denominator']))
    if kind == 'sum':
        return MarginalSum(tuple(data['variables']), from_json(data['body']))
    if kind == 'restriction':
        return Restriction(tuple((a['name'], a['value']) for a in data['assignment']),
                           from_json(data['body']))
    if kind == 'cases':
        return Piecewise(tuple(
            (tuple((a['name'], a['value']) for a in c['guard']), from_json(c['body']))
            for c in data['cases']
        ))
    raise ValueError(f"unknown expression kind {kind!r}")
