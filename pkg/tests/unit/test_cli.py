import json

import pytest

from mdagid.cli import main, run, summarize
from tests.unit.conftest import FIG1_SPEC, FIG2A_SPEC

FIG2A_NONMONOTONE = FIG2A_SPEC.replace("mono R_X >= R_Y\n", "")


def test_identify_full_figure1():
    body, code = run('identify-full', FIG1_SPEC, {})
    assert code == 0
    assert body['status'] == 'Identified'
    assert 'p(R_X)' in body['functional']['text']


def test_identify_full_refuses_figure2a():
    body, code = run('identify-full', FIG2A_SPEC, {})
    assert code == 1
    assert (body['status'], body['reason']) == ('NotIdentifiable', 'SelfCensoringPath')
    assert body['witness'] == {'variable': 'Y', 'indicator_chain': ['R_X', 'R_Y']}


def test_identify_target_figure1():
    body, code = run('identify-target', FIG1_SPEC, {})
    assert code == 0
    assert body['provenance'][0]['theorem'] == 'Mohan'


def test_detect_without_edges():
    body, code = run('detect', "var X partial\nvar Y partial\n", {})
    assert code == 0
    assert body['colluders'] == []
    assert body['self_censoring_edges'] == []
    assert body['self_censoring_paths'] == []


def test_validate_reports_violations():
    body, code = run('validate', "var X partial\nedge R_X -> X\n", {})
    assert code == 1
    assert not body['valid']
    assert body['violations']


def test_input_errors_exit_with_two():
    body, code = run('bogus', None, {})
    assert (code, body['error']) == (2, 'UnknownCommandError')

    body, code = run('validate', "var X partial\nedg X -> Y\n", {})
    assert (code, body['error'], body['line']) == (2, 'SpecSyntaxError', 2)

    body, code = run('identify-full', None, {})
    assert (code, body['error']) == (2, 'MissingSpecError')

    body, code = run('identify-full', "var X partial\nvar Y partial\nedge X -> Y\nedge Y -> X\n", {})
    assert (code, body['error']) == (2, 'InvalidGraphError')
    assert body['violations']


def test_verify_identified_functional():
    body, code = run('verify', FIG1_SPEC, {'n': 5, 'seed': 3})
    assert code == 0
    assert body['identification']['status'] == 'Identified'
    assert body['report']['passed']
    assert body['report']['n'] == 5


def test_verify_refused_graph_has_no_report():
    body, code = run('verify', FIG2A_SPEC, {'n': 5})
    assert code == 1
    assert body['report'] is None


def test_verify_user_functional():
    options = {'n': 5, 'query': 'target_law', 'expr': 'p(X, Y | R_X=1, R_Y=1)'}
    body, code = run('verify', FIG2A_NONMONOTONE, options)
    assert code == 1
    assert body['identification'] is None
    assert body['report']['failures'] > 0


def test_counterexample_appendix():
    body, code = run('counterexample', None, {'kind': 'appendix'})
    assert code == 0
    assert [c['parameters']['a'] for c in body['constructions']] == ['7/15', '8/15']
    assert body['comparison']['observed_equal']
    assert len(body['comparison']['full_law_differences']) == 4


def test_counterexample_thm6():
    body, code = run('counterexample', FIG2A_SPEC, {'kind': 'thm6'})
    assert code == 0
    construction = body['constructions'][0]
    assert (construction['k'], construction['gamma']) == (2, '1/4')
    assert body['comparison']['observed_equal']
    rows = body['comparison']['marginal']['rows']
    assert rows[0] == {'values': [0], 'p1': '1/4', 'p2': '3/4'}


def test_counterexample_bad_gamma():
    body, code = run('counterexample', FIG2A_SPEC, {'kind': 'thm6', 'gamma': '1/2'})
    assert (code, body['error']) == (2, 'BadGamma')


def test_or_check():
    body, code = run('or-check', FIG1_SPEC, {'n': 3})
    assert code == 1
    assert body['zero_denominator_count'] > 0

    body, code = run('or-check', FIG2A_NONMONOTONE, {'n': 3, 'order': ['R_Y', 'R_X']})
    assert code == 0
    assert body['exact']
    assert body['ordering'] == ['R_Y', 'R_X']


def test_main_reads_spec_file(tmp_path, capsys):
    path = tmp_path / 'fig1.mdag'
    path.write_text(FIG1_SPEC)
    assert main(['identify-full', str(path)]) == 0
    assert json.loads(capsys.readouterr().out)['status'] == 'Identified'


def test_main_text_output(tmp_path, capsys):
    path = tmp_path / 'fig2a.mdag'
    path.write_text(FIG2A_SPEC)
    assert main(['counterexample', str(path), '--kind', 'thm6', '--gamma', '1/3', '--output', 'text']) == 0
    out = capsys.readouterr().out
    assert 'observed laws equal: True' in out
    assert '1/3 vs 2/3' in out


def test_main_missing_file(tmp_path):
    assert main(['validate', str(tmp_path / 'absent.mdag')]) == 2


def test_main_rejects_bad_rational():
    with pytest.raises(SystemExit):
        main(['counterexample', '--kind', 'thm6', '--gamma', 'half'])


def test_summarize_refusal():
    body, _ = run('identify-full', FIG2A_SPEC, {})
    assert summarize('identify-full', body).startswith('NotIdentifiable (SelfCensoringPath)')


def test_structural_errors_carry_locations():
    text = "var X partial\nvar Y partial\nedge X -> Y\nedge R_X -> Y\n"
    body, code = run('validate', text, {})
    assert code == 1
    assert (body['violations'][0]['line'], body['violations'][0]['column']) == (4, 6)

    body, code = run('identify-full', text, {})
    assert (code, body['error']) == (2, 'InvalidGraphError')
    assert (body['line'], body['column']) == (4, 6)
