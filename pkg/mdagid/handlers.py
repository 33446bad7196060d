"""
Command handlers. Each takes a parsed GraphSpec (or None) and an options
dict and returns {'exitCode': int, 'body': dict}.

Exit codes: 0 success, 1 refusal / non-identification / failed check,
2 input error.
"""
import logging
from fractions import Fraction

from mdagid import config
from mdagid.constructions import appendix_pair, compare_models, figure_2a, thm6_pair
from mdagid.discrete import Query, random_model
from mdagid.engine import identify_full_law, identify_target_law
from mdagid.errors import InvalidGraphError, MdagError, MissingSpecError, UnknownCommandError
from mdagid.expr import parse_expr
from mdagid.odds_ratio import or_reconstruct
from mdagid.spec_parser import parse_mdag_file
from mdagid.structures import detect_all, find_self_censoring
from mdagid.verify import verify_functional

logger = logging.getLogger(__name__)

SUCCESS, REFUSED, INPUT_ERROR = 0, 1, 2


def _response(code, body):
    return {'exitCode': code, 'body': body}


def _require(spec, command):
    if spec is None:
        raise MissingSpecError(command)
    violations = spec.validate().violations
    if violations:
        raise InvalidGraphError(violations)
    return spec


def handle_validate(spec, options):
    if spec is None:
        raise MissingSpecError('validate')
    report = spec.validate()
    if report.valid:
        logger.info("✅ graph is a valid m-DAG")
    else:
        logger.warning("⚠️  %d violations", len(report.violations))
    return _response(SUCCESS if report.valid else REFUSED, {'spec': spec.to_json(), **report.to_json()})


def handle_detect(spec, options):
    spec = _require(spec, 'detect')
    found = detect_all(spec.graph, spec.mono)
    logger.info("🔍 %d colluders, %d self-censoring edges, %d self-censoring paths",
                len(found['colluders']), len(found['self_censoring_edges']), len(found['self_censoring_paths']))
    return _response(SUCCESS, found)


def _identify(spec, options, target):
    result = (identify_target_law if target else identify_full_law)(spec.graph, spec.mono)
    if result.identified:
        logger.info("✅ %s identified", "target law" if target else "full law")
    else:
        logger.info("🚫 %s: %s", result.status.value, result.message)
    return result


def handle_identify_full(spec, options):
    result = _identify(_require(spec, 'identify-full'), options, target=False)
    return _response(SUCCESS if result.identified else REFUSED, result.to_json())


def handle_identify_target(spec, options):
    result = _identify(_require(spec, 'identify-target'), options, target=True)
    return _response(SUCCESS if result.identified else REFUSED, result.to_json())


def handle_verify(spec, options):
    """
    Verify a functional against random models. The functional is --expr when
    given, otherwise the one found by identification of --query.
    """
    spec = _require(spec, 'verify')
    target = options.get('query', 'full_law') == 'target_law'
    query = Query.target_law() if target else Query.full_law()

    identification = None
    if options.get('expr'):
        expr = parse_expr(options['expr'])
    else:
        result = _identify(spec, options, target)
        identification = result.to_json()
        if not result.identified:
            return _response(REFUSED, {'identification': identification, 'report': None})
        expr = result.functional

    n = options.get('n', config.DEFAULT_N)
    seed = options.get('seed', config.DEFAULT_SEED)
    logger.info("🔄 verifying on %d random models from seed %d", n, seed)
    report = verify_functional(spec.graph, spec.mono, expr, query, n=n, seed=seed,
                               workers=options.get('workers'), cardinalities=spec.cardinalities)
    if report.passed:
        logger.info("✅ all %d models agree exactly", n)
    else:
        logger.warning("❌ %d of %d models disagree", len(report.failures), n)
    return _response(SUCCESS if report.passed else REFUSED,
                     {'identification': identification, 'report': report.to_json()})


def _default_k(spec):
    _, paths = find_self_censoring(spec.graph, spec.mono)
    return max((p.k for p in paths), default=1)


def handle_counterexample(spec, options):
    kind = options.get('kind', 'thm6')
    if kind == 'thm6':
        spec = _require(spec, 'counterexample')
        k = options['k'] if options.get('k') is not None else _default_k(spec)
        gamma = Fraction(options.get('gamma', '1/4'))
        construction = thm6_pair(k, gamma, spec.graph, spec.mono)
        comparison = compare_models(*construction.models, marginal=[construction.variable])
        logger.info("🧪 Theorem-6 pair on %s, observed laws equal: %s", construction.variable,
                    comparison['observed_equal'])
        return _response(SUCCESS, {'kind': kind, 'constructions': [construction.to_json()],
                                   'comparison': comparison})

    if kind == 'appendix':
        if spec is not None:
            g, mono = figure_2a()
            if spec.graph != g or spec.mono != mono:
                logger.warning("⚠️  the appendix pair is built on X -> Y -> R_X -> R_Y; the given spec is ignored")
        a_values = [Fraction(a) for a in options.get('a') or ('7/15', '8/15')]
        constructions = appendix_pair(a_values=a_values)
        comparison = None
        if len(constructions) >= 2:
            comparison = compare_models(constructions[0].model, constructions[1].model, marginal=['X'])
        logger.info("🧪 %d appendix models solved", len(constructions))
        return _response(SUCCESS, {'kind': kind, 'constructions': [c.to_json() for c in constructions],
                                   'comparison': comparison})

    raise UnknownCommandError(f"unknown counterexample kind {kind!r}, expected thm6 or appendix")


def handle_or_check(spec, options):
    spec = _require(spec, 'or-check')
    g = spec.graph
    ordering = list(options.get('order') or g.indicators)
    n = options.get('n', config.DEFAULT_N)
    seed = options.get('seed', config.DEFAULT_SEED)

    cells = mismatches = zeros = 0
    failures = []
    for i in range(n):
        model = random_model(g, spec.mono, seed + i, spec.cardinalities)
        report = or_reconstruct(model, ordering, strict=False)
        cells += report.cells_checked
        mismatches += len(report.mismatches)
        zeros += len(report.zero_denominators)
        if not report.exact and len(failures) < 10:
            failures.append({'seed': seed + i, 'mismatches': report.mismatches[:5],
                             'zero_denominators': report.zero_denominators[:5]})

    exact = not mismatches and not zeros
    if exact:
        logger.info("✅ odds-ratio reconstruction exact on %d models", n)
    else:
        logger.warning("❌ %d mismatches and %d zero denominators over %d models", mismatches, zeros, n)
    return _response(SUCCESS if exact else REFUSED, {
        'ordering': ordering,
        'n': n,
        'seed': seed,
        'exact': exact,
        'cells_checked': cells,
        'mismatch_count': mismatches,
        'zero_denominator_count': zeros,
        'failures': failures,
    })


HANDLERS = {
    'validate': handle_validate,
    'detect': handle_detect,
    'identify-full': handle_identify_full,
    'identify-target': handle_identify_target,
    'verify': handle_verify,
    'counterexample': handle_counterexample,
    'or-check': handle_or_check,
}


def _error_body(e):
    body = {'error': type(e).__name__, 'message': str(e)}
    for name in ('line', 'column'):
        if hasattr(e, name):
            body[name] = getattr(e, name)
    if isinstance(e, InvalidGraphError):
        body['violations'] = [str(v) for v in e.violations]
    return body


def handler(event, context=None):
    """
    Run one command.

    Event format:
    {
        "command": "identify-full",
        "spec": "var X partial\\nvar Y partial\\n...",
        "options": {"n": 100, "seed": 0}
    }
    """
    command = event.get('command')
    try:
        run = HANDLERS.get(command)
        if run is None:
            raise UnknownCommandError(f"unknown command {command!r}, expected one of {sorted(HANDLERS)}")
        text = event.get('spec')
        spec = parse_mdag_file(text) if text is not None else None
        logger.info("🔄 %s", command)
        return run(spec, event.get('options') or {})
    except MdagError as e:
        logger.error("❌ %s failed: %s", command, e)
        return _response(INPUT_ERROR, _error_body(e))
