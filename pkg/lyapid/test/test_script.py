"""Test the command-line entry point."""

import json
import os

import pytest

from lyapid.database import Session, connect, latest_report
from lyapid.equivalence import equivalence_class, is_identifiable, markov_equiv, model_equiv
from lyapid.excel import read_census_workbook
from lyapid.graph import read_graph
from lyapid.script import EXIT_INPUT_ERROR, EXIT_OK, main


@pytest.fixture
def run(capsys, monkeypatch):
    """Run the command line and return (exit status, parsed JSON or raw stdout, stderr)."""
    monkeypatch.delenv('LYAPID_SEED', raising=False)
    monkeypatch.delenv('LYAPID_DB', raising=False)

    def _run(*argv):
        status = main([str(arg) for arg in argv])
        captured = capsys.readouterr()
        try:
            out = json.loads(captured.out)
        except ValueError:
            out = captured.out
        return status, out, captured.err
    return _run


@pytest.fixture
def path(data_dir):
    return lambda name: os.path.join(data_dir, name)


def test_equiv_graphical(run, path):
    status, out, _ = run('equiv', path('flip_start.txt'), path('flip_end.txt'))
    assert status == EXIT_OK
    assert out['command'] == 'equiv'
    assert out['method'] == 'graphical'
    assert out['equivalent'] is True
    assert 'certificate' not in out


def test_equiv_flips(run, path):
    status, out, _ = run('equiv', '--method', 'flips', path('flip_start.txt'), path('flip_end.txt'))
    assert status == EXIT_OK
    assert out['flips'] == ['2->3', '1->3']
    _, out, _ = run('equiv', '--method', 'flips', path('forward_path.txt'), path('backward_path.txt'))
    assert out['equivalent'] is False
    assert out['certificate']['reason'] == 'not super-covered'


def test_equiv_oracle(run, path):
    status, out, _ = run('equiv', '--method', 'oracle', '--samples', 1, '--seed', 4,
                         path('forward_path.txt'), path('backward_path.txt'))
    assert status == EXIT_OK
    assert out['equivalent'] is False
    assert out['samples'] == 1
    assert out['certificate']['seed'] == 4


def test_identifiable(run, path):
    _, out, _ = run('identifiable', path('forward_path.txt'))
    assert out['identifiable'] is True
    assert out['super_covered_edges'] == []
    _, out, _ = run('identifiable', path('four_node_type1.txt'))
    assert out['identifiable'] is False
    assert out['super_covered_edges'] == ['2->3']


def test_class(run, path):
    _, out, _ = run('class', path('complete3.txt'))
    assert out['size'] == 6
    assert out['representative'] in out['members']


def test_markov_and_ci_defined(run, path):
    _, out, _ = run('markov', path('forward_path.txt'), path('backward_path.txt'))
    assert out['markov_equivalent'] is True
    _, out, _ = run('ci-defined', path('forward_path.txt'))
    assert out['ci_defined'] is False
    assert out['certificate'] == {'trek_between_non_adjacent': [1, 3]}
    _, out, _ = run('ci-defined', path('complete3.txt'))
    assert out['ci_defined'] is True


def test_solve_identify_member(run, path):
    _, out, _ = run('solve', '--drift', path('drift_backward.csv'))
    assert out['sigma'] == [['15/8', '7/8', '1/4'], ['7/8', '3/2', '1/2'], ['1/4', '1/2', '1']]
    _, out, _ = run('identify', '--sigma', path('sigma_backward.csv'), '--graph', path('backward_path.txt'))
    assert out['drift'] == [['-1', '1', '0'], ['0', '-1', '1'], ['0', '0', '-1']]
    _, out, _ = run('member', '--sigma', path('sigma_backward.csv'), '--graph', path('forward_path.txt'))
    assert out['member'] is False
    assert out['relations'] == {'1->3': '-5341/1024'}
    assert out['certificate'] == {'edge': '1->3', 'det': '-5341/1024'}


def test_census_formats(run, tmp_path):
    _, out, _ = run('census', '-n', 3)
    assert out['dag_count'] == 25
    assert out['lyap_class_count'] == 17
    _, out, _ = run('census', '-n', 3, '--format', 'csv')
    assert out.splitlines()[1] == '3,25,17,13,11,4'
    workbook = tmp_path / 'table.xlsx'
    status, out, _ = run('census', '-n', 2, '--format', 'xlsx', '--output', workbook)
    assert status == EXIT_OK
    assert read_census_workbook(str(workbook))[0]['DAGs'] == 3


def test_census_store_and_reuse(run, db):
    run('census', '-n', 3, '--store')
    status, out, _ = run('census', '-n', 3, '--cached')
    assert status == EXIT_OK
    assert out['markov_class_count'] == 11


@pytest.mark.parametrize('argv, message', [
    (['identifiable', 'no_such_file.txt'], 'lyapid identifiable: error:'),
    (['member', '--sigma', '{data}/not_symmetric.csv', '--graph', '{data}/forward_path.txt'],
     'Covariance matrix is 2x2 but the graph has 3 nodes'),
    (['solve', '--drift', '{data}/identity3.csv'], 'not stable'),
    (['census', '-n', '2', '--format', 'xlsx'], 'needs --output'),
])
def test_input_errors(run, data_dir, argv, message):
    status, _, err = run(*[arg.format(data=data_dir) for arg in argv])
    assert status == EXIT_INPUT_ERROR
    assert message in err


def test_bad_config(run, path, tmp_path):
    config = tmp_path / 'settings.yaml'
    config.write_text('seed: "zero"\n')
    status, _, err = run('--config', config, 'identifiable', path('forward_path.txt'))
    assert status == EXIT_INPUT_ERROR
    assert 'Config setting seed has wrong type' in err


def test_census_size_is_checked(run):
    with pytest.raises(SystemExit):
        run('census', '-n', 7)


def test_census_uses_configured_database(run, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr(Session, '_connected', False)
    stored = tmp_path / 'mine.db'
    config = tmp_path / 'settings.yaml'
    config.write_text('database: "sqlite:///{}"\n'.format(stored))
    status, _, _ = run('--config', config, 'census', '-n', 2, '--store')
    assert status == EXIT_OK
    assert stored.exists()
    assert not (tmp_path / 'lyapid.db').exists()
    engine = connect('sqlite:///{}'.format(stored), create_tables=False)
    try:
        with Session.scope() as session:
            assert latest_report(session, 2).counts() == (2, 3, 2, 1, 2, 1)
    finally:
        engine.dispose()


def test_json_report_is_canonical(capsys, monkeypatch, path):
    monkeypatch.delenv('LYAPID_SEED', raising=False)
    main(['member', '--sigma', path('sigma_backward.csv'), '--graph', path('forward_path.txt')])
    out = capsys.readouterr().out
    assert json.dumps(json.loads(out), sort_keys=True, indent=2) + '\n' == out


@pytest.mark.parametrize('first, second', [
    ('flip_start.txt', 'flip_end.txt'),
    ('forward_path.txt', 'backward_path.txt'),
    ('forward_path.txt', 'complete3.txt'),
])
def test_cli_matches_library(run, path, first, second):
    g1, g2 = read_graph(path(first)), read_graph(path(second))
    _, out, _ = run('equiv', path(first), path(second))
    assert out['equivalent'] == model_equiv(g1, g2)
    _, out, _ = run('markov', path(first), path(second))
    assert out['markov_equivalent'] == markov_equiv(g1, g2)
    for name, g in ((first, g1), (second, g2)):
        _, out, _ = run('identifiable', path(name))
        assert out['identifiable'] == is_identifiable(g)
        _, out, _ = run('class', path(name))
        assert out['size'] == len(equivalence_class(g))


def test_class_of_four_node_type(run, path):
    _, out, _ = run('class', path('four_node_type1.txt'))
    assert out['size'] == 2
    assert sorted(out['members']) == [['1->4', '2->3', '2->4', '3->4'], ['1->4', '2->4', '3->2', '3->4']]
