"""
Identification engine.

Each response indicator's conditional p(R_Y | pa(R_Y)) is split into slices
by the values of its indicator parents. Null slices carry 0, slices where a
monotone parent is 0 carry the forced constants, and the remaining slices are
identified by the first applicable step of the ladder

    T2  R_Y independent of R' given pa(R_Y)
    T3  Z independent of R_Z given R_Y and the other parents
    T4  as T3, additionally given fully observed W outside pa(R_Y)
    T5  as T3, using partially observed W outside pa(R_Y)

The full law is then p(O, X, R=1) / p(R=1 | O, X) * prod_k p(R_k | pa(R_k)).
"""
import itertools
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

from mdagid.errors import InvalidGraphError, NoApplicableTheorem, NotApplicable, NotAnIndicatorError
from mdagid.expr import (
    Constant,
    MarginalSum,
    Piecewise,
    ProbTerm,
    Product,
    Quotient,
    VarRef,
    assignment_of,
    render,
    restrict,
    to_json,
)
from mdagid.graph import (
    CiStatus,
    CiVerdict,
    MDag,
    MonotoneSpec,
    ci_under_context,
    d_separated,
    is_null_assignment,
    relation_set,
    validate_mdag,
)
from mdagid.structures import colluder_is_monotone, find_colluders, find_maximal_colluder, find_self_censoring

logger = logging.getLogger(__name__)


class Status(Enum):
    IDENTIFIED = "Identified"
    NOT_IDENTIFIABLE = "NotIdentifiable"
    UNKNOWN = "Unknown"


class Reason(Enum):
    SELF_CENSORING_EDGE = "SelfCensoringEdge"
    SELF_CENSORING_PATH = "SelfCensoringPath"
    COLLUDER = "Colluder"
    NO_APPLICABLE_THEOREM = "NoApplicableTheorem"
    ANCESTOR_OF_OWN_INDICATOR = "AncestorOfOwnIndicator"


@dataclass(frozen=True)
class CiObligation:
    A: Tuple[str, ...]
    B: Tuple[str, ...]
    Z: Tuple[str, ...]
    ctx: Tuple[Tuple[str, int], ...]
    verdict: CiVerdict

    def to_json(self):
        return {'A': list(self.A), 'B': list(self.B), 'Z': list(self.Z),
                'ctx': dict(self.ctx), 'verdict': self.verdict.to_json()}


@dataclass
class TheoremApplication:
    theorem_id: str
    target: str
    functional: object = None
    context: Dict[str, int] = field(default_factory=dict)
    via: Optional[str] = None
    z_set: Tuple[str, ...] = ()
    r_prime: Tuple[str, ...] = ()
    w_set: Tuple[str, ...] = ()
    d_set: Tuple[str, ...] = ()
    guards: List[Dict[str, int]] = field(default_factory=list)
    ci_obligations: List[CiObligation] = field(default_factory=list)

    def to_json(self):
        return {
            'theorem': self.theorem_id,
            'via': self.via,
            'target': self.target,
            'context': dict(sorted(self.context.items())),
            'z_set': list(self.z_set),
            'r_prime': list(self.r_prime),
            'w_set': list(self.w_set),
            'd_set': list(self.d_set),
            'guards': [dict(sorted(g.items())) for g in self.guards],
            'ci_obligations': [o.to_json() for o in self.ci_obligations],
            'functional': render(self.functional) if self.functional is not None else None,
        }


@dataclass
class IdentifyResult:
    status: Status
    functional: object = None
    provenance: List[TheoremApplication] = field(default_factory=list)
    reason: Optional[Reason] = None
    witness: Optional[dict] = None
    message: str = ""

    @property
    def identified(self):
        return self.status is Status.IDENTIFIED

    def to_json(self):
        return {
            'status': self.status.value,
            'reason': self.reason.value if self.reason else None,
            'witness': self.witness,
            'message': self.message,
            'provenance': [a.to_json() for a in self.provenance],
            'functional': None if self.functional is None else {
                'text': render(self.functional),
                'tree': to_json(self.functional),
            },
        }


def _term(event, given, fixed=None):
    fixed = fixed or {}
    refs = lambda names: tuple(VarRef(n, fixed.get(n)) for n in names)
    return ProbTerm(refs(event), refs(given))


def _require_valid(g, mono):
    violations = validate_mdag(g).violations + mono.violations(g)
    if violations:
        raise InvalidGraphError(violations)


def forced_constant(r_y):
    """p(R_Y | pa) when a monotone parent of R_Y is 0"""
    return Piecewise((
        (((r_y, 1),), Constant(0)),
        (((r_y, 0),), Constant(1)),
    ))


@dataclass
class _Parents:
    """The pieces of pa(R_Y) the ladder works with"""
    target: str
    pa: Tuple[str, ...]
    indicators: Tuple[str, ...]
    colluders: Tuple[str, ...]
    z_set: Tuple[str, ...]
    r_prime: Tuple[str, ...]

    @classmethod
    def of(cls, g: MDag, r_y):
        pa = tuple(sorted(g.parents(r_y)))
        partial = [v for v in pa if g.is_partial(v)]
        return cls(
            target=r_y,
            pa=pa,
            indicators=tuple(v for v in pa if g.is_indicator(v)),
            colluders=tuple(v for v in partial if g.indicator_of[v] in pa),
            z_set=tuple(v for v in partial if g.indicator_of[v] not in pa),
            r_prime=tuple(g.indicator_of[v] for v in partial if g.indicator_of[v] not in pa),
        )

    def rest(self, drop=()):
        """pa(R_Y) without Z and without drop"""
        return tuple(v for v in self.pa if v not in self.z_set and v not in drop)


class _Ladder:
    """One attempt to identify p(R_Y | pa(R_Y)) under a context on its indicator parents"""

    def __init__(self, g: MDag, mono: MonotoneSpec, r_y, ctx):
        self.g = g
        self.mono = mono
        self.r_y = r_y
        self.ctx = dict(ctx)
        self.parts = _Parents.of(g, r_y)
        self.attempts = []

    def _check(self, app, A, B, Z, ctx):
        if not B or not A:
            return True
        verdict = ci_under_context(self.g, self.mono, A, B, Z, ctx)
        app.ci_obligations.append(CiObligation(tuple(sorted(A)), tuple(sorted(B)), tuple(sorted(Z)),
                                               assignment_of(ctx), verdict))
        logger.debug("%s %s: %s _||_ %s | %s under %s -> %s", app.theorem_id, self.r_y,
                     sorted(A), sorted(B), sorted(Z), ctx, verdict.status.value)
        return verdict.holds

    def _app(self, theorem_id, **kwargs):
        return TheoremApplication(theorem_id, self.r_y, context=dict(self.ctx),
                                  z_set=self.parts.z_set, r_prime=self.parts.r_prime, **kwargs)

    def run(self) -> TheoremApplication:
        for c in self.parts.colluders:
            if self.ctx.get(self.g.indicator_of[c]) != 1:
                raise NotApplicable(f"{c} is unobservable unless {self.g.indicator_of[c]} = 1")
        for step in (self.t2, self.t3, self.t4, self.t5):
            app = step()
            if app is not None:
                return app
        raise NoApplicableTheorem(self.r_y, self.attempts)

    def t2(self):
        parts = self.parts
        app = self._app("T2")
        self.attempts.append(app)
        ctx = {**self.ctx, **{r: 1 for r in parts.r_prime}}
        if not self._check(app, {self.r_y}, parts.r_prime, parts.pa, ctx):
            return None
        app.functional = restrict(ctx, _term([self.r_y], parts.pa + parts.r_prime))
        return app

    def _ratio(self, q, sum_over):
        return Quotient(
            MarginalSum(sum_over, q) if sum_over else q,
            MarginalSum(sum_over + (self.r_y,), q),
        )

    def t3(self):
        parts = self.parts
        if not parts.z_set:
            return None
        app = self._app("T3")
        self.attempts.append(app)
        ctx = {**self.ctx, **{r: 1 for r in parts.r_prime}}
        rest = parts.rest()
        if not self._check(app, parts.z_set, parts.r_prime, {self.r_y, *rest}, ctx):
            return None
        q = Product((
            _term(parts.z_set, parts.r_prime + (self.r_y,) + rest),
            _term((self.r_y,) + rest, ()),
        ))
        app.functional = restrict(ctx, self._ratio(q, ()))
        return app

    def _subsets(self, pool):
        pool = sorted(pool)
        for size in range(1, len(pool) + 1):
            yield from itertools.combinations(pool, size)

    def t4(self):
        parts = self.parts
        if not parts.z_set:
            return None
        pool = set(self.g.observed) - set(parts.pa)
        ctx = {**self.ctx, **{r: 1 for r in parts.r_prime}}
        rest = parts.rest()
        for w in self._subsets(pool):
            app = self._app("T4", w_set=w)
            self.attempts.append(app)
            if not self._check(app, parts.z_set, parts.r_prime, {*w, self.r_y, *rest}, ctx):
                continue
            q = Product((
                _term(parts.z_set, w + (self.r_y,) + rest + parts.r_prime),
                _term(w + (self.r_y,) + rest, ()),
            ))
            app.functional = restrict(ctx, self._ratio(q, w))
            return app
        return None

    def t5(self):
        parts = self.parts
        if not parts.z_set:
            return None
        g = self.g
        own = g.variable_of(self.r_y)
        pool = set(g.partial) - set(parts.pa) - {own}
        for w in self._subsets(pool):
            r_w = tuple(g.indicator_of[v] for v in w)
            r_w_in = tuple(r for r in r_w if r in parts.pa)
            r_w_out = tuple(r for r in r_w if r not in parts.pa)
            if any(self.ctx.get(r) == 0 for r in r_w_in):
                continue
            d_set = tuple(sorted(parts.colluders + tuple(v for v in w if g.indicator_of[v] in parts.pa)))
            app = self._app("T5", w_set=w, d_set=d_set)
            self.attempts.append(app)
            ctx = {**self.ctx, **{r: 1 for r in parts.r_prime + r_w}}
            app.context = {**self.ctx, **{r: 1 for r in r_w_in}}
            rest = parts.rest()
            if not self._check(app, parts.z_set, parts.r_prime + r_w_out, {*w, self.r_y, *rest}, ctx):
                continue
            if not self._check(app, w, r_w_out, {self.r_y, *rest}, ctx):
                continue
            rest_w = parts.rest(drop=r_w)
            q = Product((
                _term(parts.z_set, w + parts.r_prime + r_w + (self.r_y,) + rest_w),
                _term(w, r_w + (self.r_y,) + rest_w),
                _term((self.r_y,) + rest, ()),
            ))
            app.functional = restrict(ctx, self._ratio(q, w))
            return app
        return None


def identify_violation_part(g: MDag, mono: MonotoneSpec, r_y) -> TheoremApplication:
    """
    Forced pieces of p(R_Y | pa(R_Y)) for every assignment with min R_C = 0.

    Returns:
        TheoremApplication 'T1' whose guards list the assignments of R_C and
        whose functional gives p(R_Y=1 | ...) = 0 and p(R_Y=0 | ...) = 1
    """
    mc = find_maximal_colluder(g, r_y)
    if not colluder_is_monotone(g, mc, mono):
        raise NotApplicable(f"{r_y} has no monotone maximal colluder")
    r_c = mc.indicators(g)
    guards = [
        dict(zip(r_c, values))
        for values in itertools.product((0, 1), repeat=len(r_c))
        if min(values) == 0
    ]
    return TheoremApplication("T1", r_y, functional=forced_constant(r_y),
                              d_set=tuple(sorted(mc.c_set)), guards=guards)


def identify_colluded_at_one(g: MDag, mono: MonotoneSpec, r_y) -> TheoremApplication:
    """First of T2..T5 identifying p(R_Y | pa(R_Y)) at R_C = 1"""
    mc = find_maximal_colluder(g, r_y)
    if not colluder_is_monotone(g, mc, mono):
        raise NotApplicable(f"{r_y} has no monotone maximal colluder")
    ctx = {r: 1 for r in mc.indicators(g)}
    return _Ladder(g, mono, r_y, ctx).run()


def identify_indicator_fallback(g: MDag, mono: MonotoneSpec, r_k, ctx=None) -> TheoremApplication:
    """
    Best-effort identification of a non-colluded indicator with the same
    ladder and an empty colluder set.
    """
    if not g.is_indicator(r_k):
        raise NotAnIndicatorError(r_k)
    if find_maximal_colluder(g, r_k).c_set:
        raise NotApplicable(f"{r_k} is colluded")
    if g.variable_of(r_k) in g.parents(r_k):
        raise NoApplicableTheorem(r_k)
    app = _Ladder(g, mono, r_k, ctx or {}).run()
    app.via, app.theorem_id = app.theorem_id, "Fallback"
    return app


def _conditional(g, mono, r_y, provenance):
    """Piecewise p(R_Y | pa(R_Y)) over the slices of its indicator parents"""
    parts = _Parents.of(g, r_y)
    colluded = bool(parts.colluders)
    cases = []
    forced_guards = []
    for values in itertools.product((0, 1), repeat=len(parts.indicators)):
        slice_ = dict(zip(parts.indicators, values))
        guard = assignment_of(slice_)
        if is_null_assignment(mono, slice_):
            cases.append((guard, Constant(0)))
            continue
        if any(v == 0 and (r, r_y) in mono.closure() for r, v in slice_.items()):
            cases.append((guard, forced_constant(r_y)))
            forced_guards.append(slice_)
            continue
        app = _Ladder(g, mono, r_y, slice_).run()
        if not colluded:
            app.via, app.theorem_id = app.theorem_id, "Fallback"
        provenance.append(app)
        cases.append((guard, app.functional))

    if forced_guards:
        provenance.append(TheoremApplication("T1", r_y, functional=forced_constant(r_y),
                                             d_set=parts.colluders, guards=forced_guards))
    if len(cases) == 1 and not cases[0][0]:
        return cases[0][1]
    return Piecewise(tuple(cases))


def _refusal(g, mono):
    edges, paths = find_self_censoring(g, mono)
    if edges:
        x, r = edges[0]
        return IdentifyResult(Status.NOT_IDENTIFIABLE, reason=Reason.SELF_CENSORING_EDGE,
                              witness={'variable': x, 'indicator': r},
                              message=f"self-censoring edge {x} -> {r}")
    long_paths = [p for p in paths if p.k > 1]
    if mono and long_paths:
        path = long_paths[0]
        return IdentifyResult(Status.NOT_IDENTIFIABLE, reason=Reason.SELF_CENSORING_PATH,
                              witness=path.to_json(),
                              message=f"self-censoring path {path.variable} -> {' -> '.join(path.indicator_chain)}")
    for c in find_colluders(g):
        if not mono.has_pair(c.collider_ind, c.target):
            return IdentifyResult(Status.NOT_IDENTIFIABLE, reason=Reason.COLLUDER, witness=c.to_json(),
                                  message=f"colluder {c.collider_var} -> {c.target} <- {c.collider_ind} is not monotone")
    return None


def full_law_functional(g: MDag, conditionals):
    """p(O, X, R=1) / p(R=1 | O, X) * p(R | O, X) from the indicator conditionals"""
    mechanism = Product(tuple(conditionals))
    ones = {r: 1 for r in g.indicators}
    substantive = tuple(v for v in g.topological_order() if not g.is_indicator(v))
    complete = _term(substantive + tuple(g.indicators), (), ones)
    return Product((Quotient(complete, restrict(ones, mechanism)), mechanism))


def identify_full_law(g: MDag, mono: MonotoneSpec) -> IdentifyResult:
    _require_valid(g, mono)
    refused = _refusal(g, mono)
    if refused is not None:
        logger.info("full law refused: %s", refused.message)
        return refused

    provenance = []
    conditionals = []
    for r in g.indicators:
        try:
            conditionals.append(_conditional(g, mono, r, provenance))
        except (NoApplicableTheorem, NotApplicable) as e:
            logger.info("full law unknown at %s: %s", r, e)
            attempts = getattr(e, 'attempts', [])
            return IdentifyResult(Status.UNKNOWN, provenance=provenance + attempts,
                                  reason=Reason.NO_APPLICABLE_THEOREM, witness={'indicator': r},
                                  message=str(e))
    return IdentifyResult(Status.IDENTIFIED, functional=full_law_functional(g, conditionals),
                          provenance=provenance)


def identify_target_law_mohan(g: MDag) -> IdentifyResult:
    """
    Target law as prod_V p(V | pa(V)) with every factor conditioned on the
    indicators of the partially observed variables it reads being 1. Applies
    when no partially observed variable is an ancestor of its own indicator.
    """
    _require_valid(g, MonotoneSpec())
    for x in g.partial:
        if x in relation_set(g, g.indicator_of[x], "ancestors"):
            return IdentifyResult(Status.UNKNOWN, reason=Reason.ANCESTOR_OF_OWN_INDICATOR,
                                  witness={'variable': x, 'indicator': g.indicator_of[x]},
                                  message=f"{x} is an ancestor of {g.indicator_of[x]}")

    factors = []
    app = TheoremApplication("Mohan", "target_law")
    for v in g.topological_order():
        if g.is_indicator(v):
            continue
        pa = tuple(sorted(g.parents(v)))
        read = [u for u in (v,) + pa if g.is_partial(u)]
        r_read = tuple(g.indicator_of[u] for u in read)
        separated = d_separated(g, {v}, r_read, pa)
        if r_read:
            verdict = CiVerdict(CiStatus.HOLDS, "d-separated") if separated else \
                CiVerdict(CiStatus.NOT_SEPARATED, "an active path connects the sets")
            app.ci_obligations.append(CiObligation((v,), r_read, pa, tuple((r, 1) for r in r_read), verdict))
            if not separated:
                return IdentifyResult(Status.UNKNOWN, provenance=[app], reason=Reason.NO_APPLICABLE_THEOREM,
                                      witness={'variable': v}, message=f"{v} depends on {list(r_read)}")
        factors.append(restrict({r: 1 for r in r_read}, _term((v,), pa + r_read)))
    app.functional = Product(tuple(factors))
    return IdentifyResult(Status.IDENTIFIED, functional=app.functional, provenance=[app])


TARGET_LAW_REFUSALS = (Reason.SELF_CENSORING_EDGE, Reason.SELF_CENSORING_PATH)


def identify_target_law(g: MDag, mono: MonotoneSpec) -> IdentifyResult:
    """
    Mohan criterion first; otherwise sum the indicators out of an identified
    full law. Only self-censoring refusals carry over to the target law; a
    colluder blocks the full law alone, so it leaves the target law Unknown.
    """
    result = identify_target_law_mohan(g)
    if result.identified:
        return result
    full = identify_full_law(g, mono)
    if full.identified:
        return IdentifyResult(Status.IDENTIFIED, functional=MarginalSum(tuple(g.indicators), full.functional),
                              provenance=full.provenance)
    if full.reason in TARGET_LAW_REFUSALS:
        return full
    logger.info("target law unknown: %s; %s", result.message, full.message)
    return IdentifyResult(Status.UNKNOWN, reason=Reason.NO_APPLICABLE_THEOREM, witness=full.witness,
                          provenance=full.provenance,
                          message=f"Mohan criterion: {result.message}; full law: {full.message}")
