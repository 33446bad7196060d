"""
Odds-ratio factorization of the missingness mechanism, as an executable check.

For an ordering R_1..R_K of the indicators,

    p(R | O, X) = 1/Z * prod_k p(R_k | R_-k=1, O, X) * prod_{k>=2} OR_k

    OR_k = p(R_k | R_>k=1, R_<k, O, X) / p(R_k=1 | R_>k=1, R_<k, O, X)
         * p(R_k=1 | R_-k=1, O, X) / p(R_k | R_-k=1, O, X)

Under monotone missingness some of these denominators are zero.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from mdagid.discrete import DiscreteModel
from mdagid.errors import BadOrdering, ConditioningOnNull, ZeroDenominator
from mdagid.expr import ProbTerm, VarRef, evaluate, rational, render

logger = logging.getLogger(__name__)


def _term(target, value, given):
    return ProbTerm((VarRef(target, value),), tuple(VarRef(n, v) for n, v in sorted(given.items())))


@dataclass
class OrFactorization:
    """Factors of one (O, X) cell; keys of the dicts are indicator value tuples"""
    ordering: Tuple[str, ...]
    cell: Dict[str, int]
    baseline_terms: Dict[Tuple[int, ...], Tuple[Fraction, ...]] = field(default_factory=dict)
    or_terms: Dict[Tuple[int, ...], Tuple[Fraction, ...]] = field(default_factory=dict)
    normalizer: Fraction = Fraction(0)

    def reconstruct(self, r):
        mass = Fraction(1)
        for q in self.baseline_terms[r] + self.or_terms[r]:
            mass *= q
        return mass / self.normalizer


@dataclass
class OrReport:
    ordering: Tuple[str, ...]
    cells_checked: int = 0
    mismatches: List[dict] = field(default_factory=list)
    zero_denominators: List[dict] = field(default_factory=list)
    factorizations: List[OrFactorization] = field(default_factory=list)

    @property
    def exact(self):
        return not self.mismatches and not self.zero_denominators

    def to_json(self):
        return {
            'ordering': list(self.ordering),
            'exact': self.exact,
            'cells_checked': self.cells_checked,
            'mismatches': self.mismatches,
            'zero_denominators': self.zero_denominators[:20],
            'zero_denominator_count': len(self.zero_denominators),
        }


class _Zero(Exception):
    def __init__(self, term):
        self.term = term


def or_reconstruct(model: DiscreteModel, ordering: Sequence[str], strict=True) -> OrReport:
    """
    Compute every factor and Z from the model's full law and compare the
    reconstruction with p(R | O, X) cell by cell.

    Args:
        model: discrete model over the m-DAG
        ordering: all response indicators, each once
        strict: raise ZeroDenominator on the first zero denominator instead of
            listing it in the report

    Returns:
        OrReport
    """
    g = model.graph
    ordering = tuple(ordering)
    if sorted(ordering) != g.indicators:
        raise BadOrdering(f"ordering {list(ordering)} must list each of {g.indicators} once")

    law = model.full_law()
    substantive = [v for v in model.variables if not g.is_indicator(v)]
    report = OrReport(ordering)
    K = len(ordering)

    def cond(target, value, given):
        term = _term(target, value, given)
        try:
            return evaluate(term, law), term
        except ConditioningOnNull:
            raise _Zero(term)

    def divide(numerator, denominator, term):
        if denominator == 0:
            raise _Zero(term)
        return numerator / denominator

    for values in itertools.product(*(model.domain(v) for v in substantive)):
        cell = dict(zip(substantive, values))
        if law.prob(cell) == 0:
            continue
        fact = OrFactorization(ordering, cell)
        try:
            for r in itertools.product((0, 1), repeat=K):
                baseline, ors = [], []
                for k, rk in enumerate(ordering):
                    rest = {o: 1 for o in ordering if o != rk}
                    q, _ = cond(rk, r[k], {**cell, **rest})
                    baseline.append(q)
                    if k == 0:
                        continue
                    mixed = {**cell, **{o: 1 for o in ordering[k + 1:]}, **dict(zip(ordering[:k], r[:k]))}
                    top, _ = cond(rk, r[k], mixed)
                    one, one_term = cond(rk, 1, mixed)
                    base_one, _ = cond(rk, 1, {**cell, **rest})
                    base_r, base_term = cond(rk, r[k], {**cell, **rest})
                    ors.append(divide(top, one, one_term) * divide(base_one, base_r, base_term))
                fact.baseline_terms[r] = tuple(baseline)
                fact.or_terms[r] = tuple(ors)
            fact.normalizer = sum(
                (_prod(fact.baseline_terms[r] + fact.or_terms[r]) for r in fact.baseline_terms),
                Fraction(0),
            )
            if fact.normalizer == 0:
                raise _Zero("Z")
        except _Zero as zero:
            term = zero.term if isinstance(zero.term, str) else render(zero.term)
            if strict:
                raise ZeroDenominator(term, cell)
            report.zero_denominators.append({'term': term, 'cell': cell})
            continue

        report.factorizations.append(fact)
        for r in fact.baseline_terms:
            report.cells_checked += 1
            truth = law.prob({**cell, **dict(zip(ordering, r))}) / law.prob(cell)
            rebuilt = fact.reconstruct(r)
            if truth != rebuilt:
                report.mismatches.append({
                    'cell': {**cell, **dict(zip(ordering, r))},
                    'expected': rational(truth),
                    'reconstructed': rational(rebuilt),
                })

    logger.debug("OR check %s: %d cells, %d mismatches, %d zero denominators",
                 ordering, report.cells_checked, len(report.mismatches), len(report.zero_denominators))
    return report


def _prod(values):
    result = Fraction(1)
    for q in values:
        result *= q
    return result
