"""
Command-line front end: mdagid <command> [spec-file] [flags]
"""
import argparse
import json
import logging
import sys
from fractions import Fraction

from mdagid import config
from mdagid.handlers import HANDLERS, handler
from mdagid.schemas import validate_output

logger = logging.getLogger(__name__)


def _fraction(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _ordering(text):
    return [name.strip() for name in text.split(",") if name.strip()]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="mdagid",
        description="Identification of full and target laws in monotone missing-data DAGs",
    )
    parser.add_argument("command", choices=sorted(HANDLERS))
    parser.add_argument("spec", nargs="?", help="graph-spec file, '-' for stdin")
    parser.add_argument("--n", type=int, help=f"number of random models (default {config.DEFAULT_N})")
    parser.add_argument("--seed", type=int, help=f"first model seed (default {config.DEFAULT_SEED})")
    parser.add_argument("--workers", type=int, help="worker processes for verify")
    parser.add_argument("--query", choices=["full_law", "target_law"], help="quantity to verify")
    parser.add_argument("--expr", help="functional to verify instead of the identified one")
    parser.add_argument("--kind", choices=["thm6", "appendix"], help="counterexample construction")
    parser.add_argument("--gamma", type=_fraction, help="p1(X_k = 0) of the thm6 pair")
    parser.add_argument("--k", type=int, help="self-censoring path length of the thm6 pair")
    parser.add_argument("--a", action="append", type=_fraction, help="p(X=1) of an appendix model; repeatable")
    parser.add_argument("--order", type=_ordering, help="comma-separated indicator ordering for or-check")
    parser.add_argument("--output", choices=["json", "text"], default="json")
    return parser


def _read_spec(path):
    if path is None:
        return None
    if path == "-":
        return sys.stdin.read()
    with open(path, "r") as spec_file:
        return spec_file.read()


def run(command, spec_text, options):
    """
    Dispatch one command and check its body against the published schema.

    Returns:
        (body, exit code)
    """
    response = handler({'command': command, 'spec': spec_text, 'options': options})
    body = response['body']
    validate_output(command, body)
    return body, response['exitCode']


def summarize(command, body):
    """Short human-readable rendering of a command body"""
    if 'error' in body:
        return f"error ({body['error']}): {body['message']}"
    if command == 'validate':
        lines = ["valid m-DAG" if body['valid'] else "invalid m-DAG"]
        for v in body['violations']:
            where = f"line {v['line']}: " if 'line' in v else ""
            lines.append(f"  - {where}{v['message']}")
        return "\n".join(lines)
    if command == 'detect':
        lines = [f"colluder {c['variable']} -> {c['target']} <- {c['indicator']}" for c in body['colluders']]
        lines += [f"self-censoring edge {e['variable']} -> {e['indicator']}" for e in body['self_censoring_edges']]
        lines += [
            f"self-censoring path {p['variable']} -> {' -> '.join(p['indicator_chain'])}"
            for p in body['self_censoring_paths'] if len(p['indicator_chain']) > 1
        ]
        return "\n".join(lines) or "no structures"
    if command in ('identify-full', 'identify-target'):
        lines = [body['status'] + (f" ({body['reason']})" if body['reason'] else "")]
        if body['message']:
            lines.append(body['message'])
        for app in body['provenance']:
            via = f" via {app['via']}" if app.get('via') else ""
            lines.append(f"  {app['theorem']}{via} for {app['target']}")
        if body['functional']:
            lines.append(body['functional']['text'])
        return "\n".join(lines)
    if command == 'verify':
        report = body['report']
        if report is None:
            return f"not identified: {body['identification']['status']}"
        verdict = "PASS" if report['passed'] else "FAIL"
        return f"{verdict}: {report['n'] - report['failures']}/{report['n']} models agree\n{report['functional']}"
    if command == 'counterexample':
        comparison = body['comparison']
        if comparison is None:
            return f"{len(body['constructions'])} model(s) built"
        lines = [f"observed laws equal: {comparison['observed_equal']}",
                 f"full-law cells that differ: {len(comparison['full_law_differences'])}"]
        for row in comparison.get('marginal', {}).get('rows', []):
            lines.append(f"  {comparison['marginal']['variables']}={row['values']}: {row['p1']} vs {row['p2']}")
        return "\n".join(lines)
    if command == 'or-check':
        verdict = "exact" if body['exact'] else "not exact"
        return (f"{verdict} over {body['n']} models ({body['cells_checked']} cells, "
                f"{body['mismatch_count']} mismatches, {body['zero_denominator_count']} zero denominators)")
    return json.dumps(body, indent=2)


def main(argv=None):
    logging.basicConfig(level=config.LOG_LEVEL, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    options = {
        name: getattr(args, name)
        for name in ('n', 'seed', 'workers', 'query', 'expr', 'kind', 'gamma', 'k', 'a', 'order')
        if getattr(args, name) is not None
    }
    try:
        spec_text = _read_spec(args.spec)
    except OSError as e:
        logger.error("❌ cannot read %s: %s", args.spec, e)
        return 2

    body, code = run(args.command, spec_text, options)
    if args.output == "text":
        print(summarize(args.command, body))
    else:
        print(json.dumps(body, indent=2))
    return code
