'''
Bellman Equation
================

If a bounded ``g`` and a scalar ``rho`` satisfy

.. math::

   g(s) + \\rho = (T \\circ g)(s) \\quad \\forall s

then ``J_n / n`` converges to ``rho`` for every initial state and
``rho`` is the zero-error feedback capacity. :func:`verify` checks a
candidate ``(g, rho)`` with a single application of ``T``; it never
iterates. Since ``T(g + c) = T(g) + c``, candidates are shifted so that
``min g = 0`` before checking.

>>> from zecap.corpus import get_entry
>>> ch = get_entry('example1').channel
>>> report = verify(ch, BellmanCandidate([0, 0.5], 0.5), tol=1e-9)
>>> report.passed, round(report.max_abs_residual, 12)
(True, 0.0)
>>> report = verify(ch, BellmanCandidate([0, 0.5], 0.4), tol=1e-9)
>>> report.passed, round(report.max_abs_residual, 12)
(False, 0.1)

Candidates are also extracted from a value iteration trace:

>>> from zecap.dp import run_value_iteration
>>> est = run_value_iteration(ch, max_iters=10, gap_tol=None)
>>> extract_candidate(est.trace, 10)
BellmanCandidate(g=[0.0, 0.5], rho=0.5)

Command line usage, where the candidate file is
``{"g": {"0": 0, "1": 0.5}, "rho": 0.5}``:

.. code-block:: shell

   zecap bellman example1.json --candidate candidate.json

Exits with ``0`` if the candidate passes and ``3`` otherwise. Without
``--candidate`` the candidate is extracted from the value iteration.

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'DEFAULT_TOL', 'BellmanCandidate', 'BellmanReport', 'verify',
    'extract_candidate', 'solve_example3_gain', 'load_candidate',
    'example1_candidate', 'example2_candidate', 'example3_candidate',
    'add_arguments', 'handle_command',
)

import argparse
import json
import logging
import math
import sys

import numpy as np

from ..channel.io import load_channel
from ..report import dump_report, fmt_float
from . import DEFAULT_MAX_ITERS, apply_t, run_value_iteration

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
BISECTION_TOL = 1e-14
EXIT_BELLMAN_FAIL = 3


class BellmanCandidate:
    '''Bias ``g`` (one entry per state) and gain ``rho``.'''

    __slots__ = ('g', 'rho')

    def __init__(self, g, rho):
        g = np.array(g, dtype=float)
        if g.ndim != 1 or not np.all(np.isfinite(g)):
            raise ValueError('g must be a finite vector: %r' % (g,))
        rho = float(rho)
        if not math.isfinite(rho):
            raise ValueError('rho must be finite: %r' % (rho,))
        self.g = g
        self.rho = rho

    def __repr__(self):
        return '%s(g=%s, rho=%s)' % (
            self.__class__.__name__,
            [float(fmt_float(v)) for v in self.g], fmt_float(self.rho))

    def normalized(self):
        '''Same candidate with ``min g = 0``.'''
        return self.__class__(self.g - self.g.min(), self.rho)

    @classmethod
    def from_json(cls, data, ch):
        '''Parse ``{"g": {state: value}, "rho": value}``.

        ``g`` may also be a list in state order.

        :raise SystemExit: if states are missing or unknown.
        '''
        if not isinstance(data, dict) or 'g' not in data or \
                'rho' not in data:
            raise SystemExit('candidate must be an object with "g" and '
                             '"rho"')
        g = data['g']
        if isinstance(g, dict):
            unknown = set(g) - set(ch.states)
            missing = set(ch.states) - set(g)
            if unknown or missing:
                raise SystemExit(
                    'candidate states do not match the channel: '
                    'missing %s, unknown %s' % (
                        sorted(missing), sorted(unknown)))
            g = [g[s] for s in ch.states]
        elif len(g) != ch.num_states:
            raise SystemExit('candidate has %d values, channel has %d '
                             'states' % (len(g), ch.num_states))
        try:
            return cls(g, data['rho'])
        except (TypeError, ValueError) as exc:
            raise SystemExit('invalid candidate: %s' % (exc,)) from exc

    def to_json(self, ch):
        return {'g': {ch.states[s]: float(v) for s, v in enumerate(self.g)},
                'rho': self.rho}


class BellmanReport:
    '''Outcome of :func:`verify`.

    :ivar residuals: ``(T o g)(s) - g(s) - rho`` per state.
    :ivar gains: ``(T o g)(s) - g(s)`` per state.
    :ivar max_abs_residual: largest absolute residual.
    :ivar gain_spread: ``max(gains) - min(gains)``, at most ``2 * tol``
      for passing candidates.
    :ivar passed: ``max_abs_residual <= tol``.
    '''

    def __init__(self, candidate, residuals, gains, tol):
        self.candidate = candidate
        self.residuals = residuals
        self.gains = gains
        self.tol = tol
        self.max_abs_residual = float(np.abs(residuals).max())
        self.gain_spread = float(gains.max() - gains.min())
        self.passed = self.max_abs_residual <= tol

    def __repr__(self):
        return '%s(passed=%s, max_abs_residual=%s)' % (
            self.__class__.__name__, self.passed,
            fmt_float(self.max_abs_residual))

    def to_json(self, ch):
        return {
            'candidate': self.candidate.to_json(ch),
            'residuals': {ch.states[s]: float(v)
                          for s, v in enumerate(self.residuals)},
            'max_abs_residual': self.max_abs_residual,
            'gain_spread': self.gain_spread,
            'tol': self.tol,
            'verdict': 'pass' if self.passed else 'fail',
        }


def verify(ch, cand, tol=DEFAULT_TOL):
    '''Check the Bellman equation for a candidate.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param cand: the candidate, ``g`` is shifted to ``min g = 0``.
    :type cand: :class:`BellmanCandidate`

    :param tol: largest absolute residual to pass.
    :type tol: float

    :rtype: :class:`BellmanReport`
    '''
    if len(cand.g) != ch.num_states:
        raise ValueError('candidate has %d values, channel has %d states'
                         % (len(cand.g), ch.num_states))
    cand = cand.normalized()
    tg, _ = apply_t(ch, cand.g)
    gains = tg.values - cand.g
    report = BellmanReport(cand, gains - cand.rho, gains, tol)
    logger.info('bellman candidate rho=%s: %s (max residual %s)',
                fmt_float(cand.rho), 'pass' if report.passed else 'fail',
                fmt_float(report.max_abs_residual))
    return report


def extract_candidate(trace, n=None):
    '''Relative value candidate from iteration ``n`` of a trace.

    ``rho`` is the smallest gain estimate and ``g`` the midpoint of
    ``J_n`` and ``J_{n-1}`` shifted to a zero minimum, see
    :class:`zecap.dp.ValueTrace`.

    :param trace: :class:`zecap.dp.ValueTrace` (or a
      :class:`zecap.dp.CapacityEstimate` carrying one).

    :param n: iteration, at least 2. Defaults to the last one.

    :raise zecap.errors.IterationOutOfRange: if ``n`` is not available.
    '''
    trace = getattr(trace, 'trace', trace)
    g = trace.bias(n)
    rho = float(trace.gains(n).min())
    return BellmanCandidate(g, rho)


def solve_example3_gain():
    '''Root ``a1`` of ``a = (1 - a) ** 3`` and the gain
    ``rho = log2((1 - a1) / a1)`` of the three state example.

    >>> a1, rho = solve_example3_gain()
    >>> round(a1, 6), round(rho, 6)
    (0.317672, 1.102926)
    '''
    def f(a):
        return a - (1 - a) ** 3

    lo, hi = 0.0, 1.0
    assert f(lo) < 0 < f(hi)
    while hi - lo > BISECTION_TOL:
        mid = (lo + hi) / 2
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    a1 = (lo + hi) / 2
    rho = math.log2((1 - a1) / a1)
    assert abs(a1 - 0.317672) <= 1e-5
    assert abs(rho - 1.102926) <= 1e-5
    return a1, rho


def example1_candidate():
    '''``g = (0, 1/2)``, ``rho = 1/2``.'''
    return BellmanCandidate([0.0, 0.5], 0.5)


def example2_candidate():
    '''``g = (0, rho)`` with ``rho`` the log2 of the golden ratio.'''
    rho = math.log2((1 + math.sqrt(5)) / 2)
    return BellmanCandidate([0.0, rho], rho)


def example3_candidate():
    '''``g = (rho, rho / 2, 0)``, see :func:`solve_example3_gain`.'''
    _, rho = solve_example3_gain()
    return BellmanCandidate([rho, rho / 2, 0.0], rho)


def load_candidate(in_file, ch):
    '''Read a candidate JSON file for channel ``ch``.'''
    try:
        data = json.load(in_file)
    except ValueError as exc:
        raise SystemExit('%s: invalid JSON: %s' % (
            getattr(in_file, 'name', '<candidate>'), exc)) from exc
    return BellmanCandidate.from_json(data, ch)


def add_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'),
                    help='The channel JSON file.')
    ap.add_argument('--candidate', type=argparse.FileType('r'),
                    default=None,
                    help=('Candidate JSON file {"g": {state: value}, '
                          '"rho": value}. Defaults to the candidate '
                          'extracted from the value iteration.'))
    ap.add_argument('--tol', type=float, default=DEFAULT_TOL,
                    help='Largest residual to pass. Default: %(default)s')
    ap.add_argument('--iters', type=int, default=DEFAULT_MAX_ITERS,
                    help=('Iterations used to extract a candidate when '
                          '--candidate is not given. Default: %(default)s'))


def handle_command(args, out=None):
    config = args.config
    out = out or sys.stdout
    ch = load_channel(args.channel)
    if args.candidate is not None:
        cand = load_candidate(args.candidate, ch)
    else:
        est = run_value_iteration(ch, max(config.iters, 2), gap_tol=None,
                                  threads=config.threads)
        cand = extract_candidate(est.trace)

    report = verify(ch, cand, config.tol)
    dump_report(report.to_json(ch), out)
    return 0 if report.passed else EXIT_BELLMAN_FAIL
