"""
Verification oracle: evaluate a functional on the observed law of random
models and compare with the true query value computed from the full law.
"""
import logging
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import List, Optional

from mdagid import config
from mdagid.discrete import Query, observed_law, query_eval, random_model
from mdagid.errors import MdagError
from mdagid.expr import evaluate, rational, render
from mdagid.graph import MDag, MonotoneSpec

logger = logging.getLogger(__name__)


@dataclass
class ModelCheck:
    seed: int
    passed: bool
    rows: int = 0
    witness: Optional[dict] = None

    def to_json(self):
        return {'seed': self.seed, 'passed': self.passed, 'rows': self.rows, 'witness': self.witness}


@dataclass
class VerificationReport:
    functional: str
    query: Query
    checks: List[ModelCheck] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def to_json(self):
        return {
            'functional': self.functional,
            'query': self.query.to_json(),
            'n': len(self.checks),
            'passed': self.passed,
            'failures': len(self.failures),
            'first_failure': self.failures[0].to_json() if self.failures else None,
            'warnings': self.warnings,
        }


def check_model(g: MDag, mono: MonotoneSpec, expr, query: Query, seed: int, cardinalities=None) -> ModelCheck:
    model = random_model(g, mono, seed, cardinalities)
    law = observed_law(model)
    truth = query_eval(model, query)
    for row, expected in sorted(truth.values.items()):
        assignment = dict(zip(truth.variables, row))
        try:
            got = evaluate(expr, law, assignment)
        except MdagError as e:
            return ModelCheck(seed, False, len(truth.values),
                              {'cell': assignment, 'expected': rational(expected), 'error': str(e)})
        if got != expected:
            return ModelCheck(seed, False, len(truth.values),
                              {'cell': assignment, 'expected': rational(expected), 'got': rational(got)})
    return ModelCheck(seed, True, len(truth.values))


def _check_star(args):
    return check_model(*args)


def verify_functional(g: MDag, mono: MonotoneSpec, expr, query: Query, n=None, seed=None,
                      workers=None, cardinalities=None) -> VerificationReport:
    """
    Compare expr on observed_law(m) with query_eval(m, query) exactly for n
    models seeded seed, seed+1, ...

    Args:
        workers: processes to spread the seeds over; 1 runs in-process
        cardinalities: domain sizes passed on to random_model

    Returns:
        VerificationReport with the first counterexample cell of each failing model
    """
    n = config.DEFAULT_N if n is None else n
    seed = config.DEFAULT_SEED if seed is None else seed
    workers = workers or config.WORKERS
    report = VerificationReport(render(expr), query)
    if n == 0:
        report.warnings.append("n = 0: no models checked, the pass is vacuous")
        logger.warning("⚠️  verification with n = 0 is vacuous")
        return report

    jobs = [(g, mono, expr, query, seed + i, cardinalities) for i in range(n)]
    if workers > 1:
        with Pool(workers) as pool:
            report.checks = pool.map(_check_star, jobs)
    else:
        report.checks = [check_model(*job) for job in jobs]
    report.checks.sort(key=lambda c: c.seed)
    logger.info("verified %d models, %d failures", n, len(report.failures))
    return report
