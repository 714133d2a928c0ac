import argparse
import json
import math
import os
from unittest.mock import patch

import pytest

from zecap.cli import RunConfig, get_arg_parse, main
from zecap.corpus import get_entry
from zecap.dp import read_trace_csv, run_value_iteration


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_capacity_example2(capsys, corpus_dir):
    'capacity prints both the positivity decision and the bounds'
    code, out, _ = run(capsys, 'capacity', corpus_dir / 'example2.json',
                       '--iters', 100, '--tol', 1e-3)
    assert code == 0
    report = json.loads(out)
    assert report['positivity']['decision'] == 'CapacityPositive'
    capacity = report['capacity']
    assert capacity['converged'] is True
    phi = math.log2((1 + math.sqrt(5)) / 2)
    assert capacity['point_estimate'] == pytest.approx(phi, abs=1e-4)
    assert capacity['lower'] <= capacity['point_estimate'] <= \
        capacity['upper']
    assert capacity['upper'] - capacity['lower'] <= 2e-4


def test_capacity_point_tolerance(capsys, corpus_dir):
    'a looser --point-tol stops earlier, the error stays within it'
    phi = math.log2((1 + math.sqrt(5)) / 2)
    code, out, _ = run(capsys, 'capacity', corpus_dir / 'example2.json',
                       '--iters', 100, '--tol', 1e-3, '--point-tol', 1e-2)
    assert code == 0
    loose = json.loads(out)['capacity']
    assert loose['point_estimate'] == pytest.approx(phi, abs=1e-2)

    code, out, _ = run(capsys, 'capacity', corpus_dir / 'example2.json',
                       '--iters', 100, '--tol', 1e-3, '--point-tol', 1e-6)
    assert code == 0
    tight = json.loads(out)['capacity']
    assert tight['point_estimate'] == pytest.approx(phi, abs=1e-6)
    assert tight['iterations'] > loose['iterations']


def test_capacity_not_converged(capsys, corpus_dir):
    'exit code 4 when the gain interval stays too wide'
    code, out, _ = run(capsys, 'capacity', corpus_dir / 'example2.json',
                       '--iters', 2, '--tol', 1e-12)
    assert code == 4
    assert json.loads(out)['capacity']['converged'] is False


def test_capacity_outputs(capsys, corpus_dir, tmp_path):
    'trace CSV, W table and LP dump'
    trace_path = tmp_path / 'trace.csv'
    lp_path = tmp_path / 'lp.txt'
    code, out, _ = run(capsys, 'capacity', corpus_dir / 'example1.json',
                       '--iters', 10, '--tol', 1e-9,
                       '--trace', trace_path, '--w-table', 4,
                       '--dump-lp', lp_path)
    assert code == 0
    report = json.loads(out)
    assert report['w_table'] == {'0': [1, 1, 2, 2, 4], '1': [1, 2, 2, 4, 4]}

    with open(trace_path) as f:
        trace = read_trace_csv(f)
    ch = get_entry('example1').channel
    expected = run_value_iteration(ch, 10, gap_tol=1e-9).bounds
    assert trace == expected.rounded()

    with open(lp_path) as f:
        text = f.read()
    assert text.count('# channel') == 2


def test_output_is_deterministic(capsys, corpus_dir):
    'the same invocation prints the same bytes'
    argv = ('capacity', corpus_dir / 'example3_reconstructed.json',
            '--iters', 30, '--threads', 2)
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first[1] == second[1]


def test_positivity_exit_codes(capsys, corpus_dir):
    'exit 2 when the capacity is zero'
    code, out, _ = run(capsys, 'positivity', corpus_dir / 'all_adjacent.json')
    assert code == 2
    assert json.loads(out)['decision'] == 'CapacityZero'

    code, out, _ = run(capsys, 'positivity', corpus_dir / 'example1.json')
    assert code == 0
    assert json.loads(out)['v_table'] == [[0, 0], [0, 1], [1, 1]]

    code, out, _ = run(capsys, 'positivity', corpus_dir / 'example1.json',
                       '--horizon', 4)
    assert len(json.loads(out)['v_table']) == 5


def test_bellman(capsys, corpus_dir, tmp_path):
    'candidate files pass with exit 0 and fail with exit 3'
    good = tmp_path / 'good.json'
    good.write_text(json.dumps({'g': {'0': 0, '1': 0.5}, 'rho': 0.5}))
    code, out, _ = run(capsys, 'bellman', corpus_dir / 'example1.json',
                       '--candidate', good)
    assert code == 0
    report = json.loads(out)
    assert report['verdict'] == 'pass'
    assert report['max_abs_residual'] <= 1e-9

    bad = tmp_path / 'bad.json'
    bad.write_text(json.dumps({'g': {'0': 0, '1': 0.5}, 'rho': 0.4}))
    code, out, _ = run(capsys, 'bellman', corpus_dir / 'example1.json',
                       '--candidate', bad)
    assert code == 3
    assert json.loads(out)['verdict'] == 'fail'


def test_bellman_extracted_candidate(capsys, corpus_dir):
    'without --candidate the value iteration provides one'
    code, out, _ = run(capsys, 'bellman', corpus_dir / 'example2.json',
                       '--iters', 60, '--tol', 1e-8)
    assert code == 0
    assert json.loads(out)['candidate']['rho'] == \
        pytest.approx(math.log2((1 + math.sqrt(5)) / 2), abs=1e-9)


def test_dmc(capsys, corpus_dir):
    'single state channels, other channels are an error'
    code, out, _ = run(capsys, 'dmc', corpus_dir / 'pentagon.json')
    assert code == 0
    report = json.loads(out)
    assert report['capacity'] == pytest.approx(math.log2(2.5), abs=1e-9)
    assert report['g']['0'] == ['0', '1']

    code, out, err = run(capsys, 'dmc', corpus_dir / 'example1.json')
    assert code == 1
    assert out == ''
    assert '"code": "NotSingleState"' in err


def test_oracle(capsys, corpus_dir):
    'message counts and a verified code tree'
    code, out, _ = run(capsys, 'oracle', corpus_dir / 'example2.json',
                       '--horizon', 5, '--tree', 1)
    assert code == 0
    report = json.loads(out)
    assert report['m'] == {'0': [1, 1, 2, 3, 5, 8],
                           '1': [1, 2, 3, 5, 8, 13]}
    assert report['verification']['verdict'] == 'pass'
    assert report['tree']['messages'] == 13

    with pytest.raises(SystemExit):
        main(['oracle', str(corpus_dir / 'example2.json'), '--tree', '9'])


def test_validate(capsys, corpus_dir, tmp_path):
    'valid channels exit 0, violations exit 1'
    code, out, _ = run(capsys, 'validate',
                       corpus_dir / 'example3_reconstructed.json')
    assert code == 0
    assert json.loads(out)['support_only'] is True

    broken = tmp_path / 'broken.json'
    broken.write_text(json.dumps({
        'states': ['0'], 'inputs': ['0'], 'outputs': ['0'],
        'transitions': [{'s': '0', 'x': '0', 'y': '0', 's_next': '0',
                         'p': 0.5}],
    }))
    code, out, _ = run(capsys, 'validate', broken)
    assert code == 1
    assert json.loads(out)['errors'][0]['code'] == 'BadProbabilitySum'


def test_w_table_horizon_out_of_range(capsys, corpus_dir):
    'a --w-table horizon above the limit is a structured error'
    code, out, err = run(capsys, 'capacity', corpus_dir / 'example1.json',
                         '--iters', 10, '--w-table', 100)
    assert code == 1
    assert out == ''
    error = json.loads(err[err.index('{'):])['errors'][0]
    assert error['code'] == 'HorizonOutOfRange'
    assert (error['horizon'], error['limit']) == (100, 60)


def test_value_errors_are_reported(capsys, corpus_dir):
    'other ValueErrors are rendered like the package errors'
    with patch('zecap.dp.w_table', side_effect=ValueError('no table')):
        code, out, err = run(capsys, 'capacity',
                             corpus_dir / 'example1.json',
                             '--iters', 10, '--w-table', 3)
    assert code == 1
    assert out == ''
    assert json.loads(err[err.index('{'):]) == {
        'errors': [{'message': 'no table', 'code': 'ValueError'}]}


def test_invalid_channel_is_reported(capsys, tmp_path):
    'commands render channel errors on stderr'
    broken = tmp_path / 'broken.json'
    broken.write_text(json.dumps({
        'states': ['0'], 'inputs': ['0', '1'], 'outputs': ['0'],
        'transitions': [{'s': '0', 'x': '0', 'y': '0', 's_next': '0'}],
    }))
    code, out, err = run(capsys, 'capacity', broken)
    assert code == 1
    assert out == ''
    assert '"code": "MissingInputRow"' in err


def test_malformed_json(tmp_path):
    'invalid JSON exits with a message'
    broken = tmp_path / 'broken.json'
    broken.write_text('{')
    with pytest.raises(SystemExit) as excinfo:
        main(['positivity', str(broken)])
    assert 'invalid JSON' in str(excinfo.value.code)


def test_corpus_commands(capsys, tmp_path):
    'corpus list and export'
    code, out, _ = run(capsys, 'corpus', 'list')
    assert code == 0
    assert len(json.loads(out)['entries']) == 7

    code, out, _ = run(capsys, 'corpus', 'export', tmp_path / 'channels')
    assert code == 0
    assert (tmp_path / 'channels' / 'example2.json').exists()


def test_usage_errors():
    'usage errors exit with 1'
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['capacity', '--iters', '0'])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['capacity', '--tol', '-1'])
    assert excinfo.value.code == 1
    with pytest.raises(SystemExit) as excinfo:
        main(['capacity', '--point-tol', '0'])
    assert excinfo.value.code == 1


def test_run_config_threads_environment():
    'ZECAP_THREADS is the default for --threads'
    args = argparse.Namespace(command='capacity', threads=None, verbose=0,
                              iters=10, tol=0.1)
    assert RunConfig.from_args(args, environ={}).threads == 1
    assert RunConfig.from_args(
        args, environ={'ZECAP_THREADS': '3'}).threads == 3
    with patch.dict(os.environ, {'ZECAP_THREADS': '2'}):
        assert RunConfig.from_args(args).threads == 2
    with pytest.raises(ValueError):
        RunConfig.from_args(args, environ={'ZECAP_THREADS': 'many'})

    args.threads = 4
    config = RunConfig.from_args(args, environ={'ZECAP_THREADS': '3'})
    assert (config.threads, config.iters, config.tol) == (4, 10, 0.1)


def test_run_config_defaults():
    'options a command does not declare keep their defaults'
    args = get_arg_parse().parse_args(['corpus', 'list'])
    config = RunConfig.from_args(args, environ={})
    assert config.command == 'corpus'
    assert config.iters == 200
    assert config.point_tol == 1e-4
    assert config.horizon is None
    with pytest.raises(ValueError):
        RunConfig(command='oracle', horizon=-1)
