import io
import json
import math

import pytest

from zecap.corpus import get_entry, load_corpus
from zecap.dp import run_value_iteration
from zecap.dp.bellman import (
    BellmanCandidate, example1_candidate, example2_candidate,
    example3_candidate, extract_candidate, load_candidate,
    solve_example3_gain, verify,
)


@pytest.mark.parametrize('name, candidate', [
    ('example1', example1_candidate),
    ('example2', example2_candidate),
    ('example3_reconstructed', example3_candidate),
])
def test_analytical_candidates_pass(name, candidate):
    'the closed form solutions satisfy the Bellman equation'
    ch = get_entry(name).channel
    report = verify(ch, candidate(), tol=1e-8)
    assert report.passed
    assert report.max_abs_residual <= 1e-8
    assert report.gain_spread <= 2e-8


def test_wrong_gain_fails():
    'a wrong rho leaves a uniform residual'
    ch = get_entry('example1').channel
    report = verify(ch, BellmanCandidate([0, 0.5], 0.4), tol=1e-9)
    assert not report.passed
    assert report.max_abs_residual == pytest.approx(0.1, abs=1e-9)
    assert report.gain_spread == pytest.approx(0, abs=1e-9)
    assert report.to_json(ch)['verdict'] == 'fail'


def test_wrong_bias_fails():
    'a wrong g spreads the gains'
    ch = get_entry('example2').channel
    report = verify(ch, BellmanCandidate([0, 0], 0.5), tol=1e-6)
    assert not report.passed
    assert report.gain_spread > 0.1


def test_candidates_are_normalized():
    'shifting g does not change the verdict'
    ch = get_entry('example1').channel
    report = verify(ch, BellmanCandidate([10, 10.5], 0.5), tol=1e-9)
    assert report.passed
    assert report.candidate.g.tolist() == [0.0, 0.5]


def test_verify_checks_length():
    'one value per state'
    with pytest.raises(ValueError):
        verify(get_entry('example1').channel, BellmanCandidate([0], 0.5))


def test_candidate_rejects_non_finite():
    'g and rho must be finite'
    with pytest.raises(ValueError):
        BellmanCandidate([0, math.inf], 0.5)
    with pytest.raises(ValueError):
        BellmanCandidate([0, 0], math.nan)


def test_extract_candidate_example2():
    'value iteration yields a candidate passing the check'
    ch = get_entry('example2').channel
    est = run_value_iteration(ch, max_iters=60, gap_tol=None)
    cand = extract_candidate(est)
    assert cand.rho == pytest.approx(math.log2((1 + math.sqrt(5)) / 2),
                                     abs=1e-9)
    assert cand.g.tolist() == pytest.approx([0, cand.rho], abs=1e-9)
    assert verify(ch, cand, tol=1e-8).passed


def test_extract_candidate_example3():
    'the extracted bias approaches (rho, rho / 2, 0)'
    ch = get_entry('example3_reconstructed').channel
    est = run_value_iteration(ch, max_iters=200, gap_tol=None)
    cand = extract_candidate(est.trace)
    _, rho = solve_example3_gain()
    assert cand.rho == pytest.approx(rho, abs=1e-4)
    assert cand.g.tolist() == pytest.approx([rho, rho / 2, 0], abs=1e-3)


def test_solve_example3_gain():
    'a1 is the root of a = (1 - a) ** 3'
    a1, rho = solve_example3_gain()
    assert a1 == pytest.approx((1 - a1) ** 3, abs=1e-12)
    assert rho == pytest.approx(-2 * math.log2(1 - a1), abs=1e-12)
    assert rho == pytest.approx(1.102926, abs=1e-6)


def test_load_candidate():
    'candidates are keyed by state identifiers'
    ch = get_entry('example1').channel
    cand = load_candidate(io.StringIO(json.dumps(
        {'g': {'0': 0, '1': 0.5}, 'rho': 0.5})), ch)
    assert cand.g.tolist() == [0.0, 0.5]
    assert cand.rho == 0.5
    assert cand.to_json(ch) == {'g': {'0': 0.0, '1': 0.5}, 'rho': 0.5}

    cand = load_candidate(io.StringIO('{"g": [0, 0.5], "rho": 0.5}'), ch)
    assert cand.g.tolist() == [0.0, 0.5]


@pytest.mark.parametrize('text', [
    '{',
    '[]',
    '{"g": {"0": 0}, "rho": 0.5}',
    '{"g": {"0": 0, "1": 0, "2": 0}, "rho": 0.5}',
    '{"g": [0], "rho": 0.5}',
    '{"g": [0, 0], "rho": "x"}',
])
def test_load_candidate_malformed(text):
    'malformed candidate files exit with a message'
    with pytest.raises(SystemExit):
        load_candidate(io.StringIO(text), get_entry('example1').channel)


@pytest.mark.parametrize('entry', load_corpus(), ids=lambda e: e.name)
def test_extract_candidate_corpus(entry):
    'after 100 iterations every reference channel yields a candidate'
    est = run_value_iteration(entry.channel, max_iters=100, gap_tol=None)
    cand = extract_candidate(est)
    assert verify(entry.channel, cand, tol=1e-2).passed
    assert cand.rho <= est.upper + 1e-9
    assert cand.rho <= entry.expected_capacity + 1e-9
    assert cand.rho == pytest.approx(entry.expected_capacity, abs=1e-2)
