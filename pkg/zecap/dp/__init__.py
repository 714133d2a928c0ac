'''
Value Iteration
===============

The operator ``T`` maps a value vector ``j`` (log2 domain, one entry
per state) to the vector of optima of
:func:`zecap.lp.inner.solve_inner`:

.. math::

   (T \\circ j)(s) = \\max_f \\min_{s'} \\left( j(s') - \\log_2 \\max_y
   \\sum_{x \\in G(y, s'|s)} f(x) \\right)

Starting at ``J_0 = 0``, ``J_n = T \\circ J_{n-1}`` is the logarithm of
the number ``W(n, s)`` of messages that can be sent in ``n`` uses of the
channel starting at state ``s``, and the capacity is the limit of
``min_s J_n(s) / n``. Two intervals bracket the capacity at every
iteration:

 - ``[min_s J_n(s) / n, max_s J_n(s) / n]``;

 - the gain interval ``[min_s g_n(s), max_s g_n(s)]`` with
   ``g_n = (J_n - J_{n-2}) / 2`` (``J_1 - J_0`` at ``n = 1``). The two
   step window absorbs channels whose states alternate, where
   ``J_n - J_{n-1}`` oscillates. The gain interval shrinks monotonically
   and converges much faster.

The point estimate is the midpoint of the intersection of both
brackets, so its error is at most half the width of that intersection.
The iteration stops once the gain interval is narrower than both
``gap_tol`` and twice ``point_tol``.

>>> from zecap.corpus import get_entry
>>> est = run_value_iteration(get_entry('example1').channel, max_iters=10,
...                           gap_tol=None)
>>> est.point_estimate, est.lower, est.upper, est.iterations
(0.5, 0.5, 0.5, 10)
>>> w_table(get_entry('example2').channel, 5).round(9).tolist()
[[1.0, 1.0], [1.0, 2.0], [2.0, 3.0], [3.0, 5.0], [5.0, 8.0], [8.0, 13.0]]

Command line usage:

.. code-block:: shell

   zecap capacity example2.json --iters 100 --tol 1e-3 --trace out.csv

Exits with ``4`` if the gain interval is still wider than ``--tol``
after ``--iters`` iterations. ``--point-tol`` bounds the error of the
reported point estimate.

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'DEFAULT_MAX_ITERS', 'DEFAULT_GAP_TOL', 'DEFAULT_POINT_TOL',
    'MAX_W_HORIZON',
    'ValueFunction', 'PolicyTable', 'BoundsRow', 'BoundsTrace',
    'ValueTrace', 'CapacityEstimate', 'apply_t', 'iterate_values',
    'run_value_iteration', 'w_table', 'dmc_capacity',
    'write_trace_csv', 'read_trace_csv',
    'add_arguments', 'handle_command',
    'add_dmc_arguments', 'handle_dmc_command',
)

import argparse
import collections
import concurrent.futures
import csv
import logging
import sys
import time

import numpy as np

from ..channel import as_dmc
from ..channel.io import load_channel
from ..errors import HorizonOutOfRange, IterationOutOfRange, Overflow
from ..lp.inner import build_inner_lp, solve_inner
from ..positivity import decide_positivity
from ..report import dump_report, fmt_float

logger = logging.getLogger(__name__)

DEFAULT_MAX_ITERS = 200
DEFAULT_GAP_TOL = 1e-3
DEFAULT_POINT_TOL = 1e-4
MAX_W_HORIZON = 60

EXIT_NOT_CONVERGED = 4


class ValueFunction:
    '''Values ``J_n(s)`` (log2 domain) at iteration ``n``.

    >>> j = ValueFunction([0, 1], 1)
    >>> j
    ValueFunction(n=1, values=[0.0, 1.0])
    >>> (j + 5).values.tolist()
    [5.0, 6.0]
    '''

    __slots__ = ('values', 'n')

    def __init__(self, values, n=None):
        values = np.array(values, dtype=float)
        values.setflags(write=False)
        self.values = values
        self.n = n

    def __repr__(self):
        return '%s(n=%s, values=%s)' % (
            self.__class__.__name__, self.n, self.values.tolist())

    def __len__(self):
        return len(self.values)

    def __getitem__(self, s):
        return self.values[s]

    def __add__(self, c):
        return self.__class__(self.values + c, self.n)

    def __sub__(self, other):
        '''Difference of values, an array.'''
        return self.values - np.asarray(getattr(other, 'values', other))

    def exp2(self):
        '''``W(n, s) = 2 ** J_n(s)``.'''
        with np.errstate(over='ignore'):
            return np.exp2(self.values)


class PolicyTable:
    '''Input pmf per state: ``matrix[s, x] = P(x|s)``.

    :ivar n: iteration that produced it, if any.
    '''

    __slots__ = ('matrix', 'n')

    def __init__(self, matrix, n=None):
        matrix = np.array(matrix, dtype=float)
        matrix.setflags(write=False)
        self.matrix = matrix
        self.n = n

    def __repr__(self):
        return '%s(n=%s, matrix=%s)' % (
            self.__class__.__name__, self.n, self.matrix.round(6).tolist())

    def __getitem__(self, s):
        return self.matrix[s]

    def __len__(self):
        return len(self.matrix)

    def to_json(self, ch):
        return {ch.states[s]: {ch.inputs[x]: float(p)
                               for x, p in enumerate(row)}
                for s, row in enumerate(self.matrix)}


BoundsRow = collections.namedtuple(
    'BoundsRow', 'n lower upper gain_lo gain_hi')


class BoundsTrace:
    '''Per iteration bounds, see :class:`BoundsRow`.

    ``lower``/``upper`` are ``min_s J_n(s) / n`` and ``max_s J_n(s) / n``
    while ``gain_lo``/``gain_hi`` bound the gain.
    '''

    columns = BoundsRow._fields

    def __init__(self, rows=()):
        self.rows = [BoundsRow(*r) for r in rows]

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def __eq__(self, other):
        return isinstance(other, BoundsTrace) and self.rows == other.rows

    def __repr__(self):
        return '%s(%d rows)' % (self.__class__.__name__, len(self.rows))

    def append(self, row):
        self.rows.append(BoundsRow(*row))

    def column(self, name):
        return np.array([getattr(r, name) for r in self.rows])

    def rounded(self):
        '''Copy with every float at 12 significant digits.'''
        return BoundsTrace(
            (r.n,) + tuple(float(fmt_float(v)) for v in r[1:])
            for r in self.rows)


class ValueTrace:
    '''Every ``J_n`` and policy computed by the value iteration.

    :ivar values: list of :class:`ValueFunction`, ``J_0`` first.
    :ivar policies: list of :class:`PolicyTable`, ``policies[n]`` is the
      maximizer used to compute ``J_n`` (``policies[0]`` is ``None``).
    :ivar bounds: :class:`BoundsTrace` for ``n >= 1``.
    '''

    def __init__(self, j0):
        self.values = [j0]
        self.policies = [None]
        self.bounds = BoundsTrace()

    @property
    def last(self):
        return len(self.values) - 1

    def gains(self, n=None):
        '''Gain estimates ``g_n(s)``, see the module documentation.'''
        n = self.last if n is None else n
        if not 1 <= n <= self.last:
            raise IterationOutOfRange(n, self.last)
        if n == 1:
            return self.values[1] - self.values[0]
        return (self.values[n] - self.values[n - 2]) / 2

    def bias(self, n=None):
        '''Relative values at iteration ``n``, from the midpoint of
        ``J_n`` and ``J_{n-1}``, shifted to a zero minimum.
        '''
        n = self.last if n is None else n
        if not 2 <= n <= self.last:
            raise IterationOutOfRange(n, self.last)
        mid = (self.values[n].values + self.values[n - 1].values) / 2
        return mid - mid.min()

    def append(self, j, policy):
        self.values.append(j)
        self.policies.append(policy)
        n = self.last
        gains = self.gains(n)
        row = BoundsRow(n, float(j.values.min() / n),
                        float(j.values.max() / n),
                        float(gains.min()), float(gains.max()))
        self.bounds.append(row)
        return row


class CapacityEstimate:
    '''Result of :func:`run_value_iteration`.

    :ivar lower: best lower bound, the largest of ``min_s J_n(s) / n``
      and ``min_s g_n(s)``.
    :ivar upper: best upper bound, the smallest of ``max_s J_n(s) / n``
      and ``max_s g_n(s)``.
    :ivar point_estimate: midpoint of ``[lower, upper]``.
    :ivar gain_lo: last ``min_s g_n(s)``.
    :ivar gain_hi: last ``max_s g_n(s)``.
    :ivar iterations: number of iterations run.
    :ivar converged: whether ``gain_hi - gain_lo <= gap_tol``, ``None``
      if no tolerance was given.
    :ivar decision: the :class:`zecap.positivity.Decision`.
    :ivar trace: the :class:`ValueTrace`.
    '''

    def __init__(self, lower, upper, point_estimate, gain_lo, gain_hi,
                 iterations, converged, decision, trace):
        self.lower = lower
        self.upper = upper
        self.point_estimate = point_estimate
        self.gain_lo = gain_lo
        self.gain_hi = gain_hi
        self.iterations = iterations
        self.converged = converged
        self.decision = decision
        self.trace = trace

    @property
    def bounds(self):
        return self.trace.bounds

    @property
    def policies(self):
        '''Policy sequence, ``policies[n - 1]`` produced ``J_n``.'''
        return self.trace.policies[1:]

    def __repr__(self):
        return ('%s(lower=%s, upper=%s, point_estimate=%s, '
                'iterations=%d, converged=%s)') % (
                    self.__class__.__name__, fmt_float(self.lower),
                    fmt_float(self.upper), fmt_float(self.point_estimate),
                    self.iterations, self.converged)

    def to_json(self, ch):
        last = self.trace.bounds[-1] if len(self.trace.bounds) else None
        d = {
            'decision': self.decision.value,
            'lower': self.lower,
            'upper': self.upper,
            'point_estimate': self.point_estimate,
            'gain_lo': self.gain_lo,
            'gain_hi': self.gain_hi,
            'iterations': self.iterations,
            'converged': self.converged,
        }
        if last is not None:
            d['jn_lower'] = last.lower
            d['jn_upper'] = last.upper
            d['policy'] = self.trace.policies[-1].to_json(ch)
        return d


def apply_t(ch, j, executor=None):
    '''One application of the operator ``T``.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param j: finite values over the states.
    :type j: :class:`ValueFunction` or array-like

    :param executor: optional :class:`concurrent.futures.Executor` to
      solve the states concurrently. Results do not depend on it.

    :return: the new values (iteration ``j.n + 1`` if known) and the
      maximizing policy.
    :rtype: tuple(:class:`ValueFunction`, :class:`PolicyTable`)
    '''
    if not isinstance(j, ValueFunction):
        j = ValueFunction(j)
    if not np.all(np.isfinite(j.values)):
        raise ValueError('values must be finite: %s' % (j.values,))

    def solve(s):
        return solve_inner(ch, s, j)

    states = range(ch.num_states)
    if executor is None:
        solutions = [solve(s) for s in states]
    else:
        solutions = list(executor.map(solve, states))

    n = None if j.n is None else j.n + 1
    values = ValueFunction([v for v, _ in solutions], n)
    policy = PolicyTable([pmf for _, pmf in solutions], n)
    return values, policy


def iterate_values(ch, j0=None, executor=None):
    '''Generate ``(J_n, policy_n)`` for ``n = 1, 2, ...`` forever.

    :param j0: initial values, defaults to all zeros.
    '''
    if j0 is None:
        j = ValueFunction(np.zeros(ch.num_states), 0)
    elif isinstance(j0, ValueFunction):
        j = j0 if j0.n is not None else ValueFunction(j0.values, 0)
    else:
        j = ValueFunction(j0, 0)
    while True:
        j, policy = apply_t(ch, j, executor)
        yield j, policy


def _run(ch, max_iters, gap_tol, point_tol, executor):
    trace = ValueTrace(ValueFunction(np.zeros(ch.num_states), 0))
    stop_tol = gap_tol
    if gap_tol is not None and point_tol is not None:
        stop_tol = min(gap_tol, 2 * point_tol)
    for j, policy in iterate_values(ch, trace.values[0], executor):
        row = trace.append(j, policy)
        logger.debug('n=%d lower=%s upper=%s gain=[%s, %s]', row.n,
                     fmt_float(row.lower), fmt_float(row.upper),
                     fmt_float(row.gain_lo), fmt_float(row.gain_hi))
        if stop_tol is not None and row.n >= 2 and \
                row.gain_hi - row.gain_lo <= stop_tol:
            break
        if row.n >= max_iters:
            break
    if gap_tol is None:
        return trace, None
    last = trace.bounds[-1]
    return trace, last.n >= 2 and last.gain_hi - last.gain_lo <= gap_tol


def run_value_iteration(ch, max_iters=DEFAULT_MAX_ITERS,
                        gap_tol=DEFAULT_GAP_TOL, threads=1,
                        positivity=None, point_tol=DEFAULT_POINT_TOL):
    '''Iterate ``T`` until the gain interval is narrower than both
    ``gap_tol`` and ``2 * point_tol``, or ``max_iters`` iterations were
    done.

    If the capacity is zero (see :mod:`zecap.positivity`), the iteration
    still runs to produce the trace but the estimate is forced to zero.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param max_iters: maximum number of iterations, at least 1.
    :type max_iters: int

    :param gap_tol: gain interval width that counts as converged;
      ``None`` runs all ``max_iters`` iterations.
    :type gap_tol: float

    :param threads: number of threads solving the states of each
      iteration.
    :type threads: int

    :param positivity: result of
      :func:`zecap.positivity.decide_positivity`, computed if not given.

    :param point_tol: wanted error of the point estimate; ``None`` stops
      on ``gap_tol`` alone.
    :type point_tol: float

    :return: the estimate, with the complete trace.
    :rtype: :class:`CapacityEstimate`
    '''
    if max_iters < 1:
        raise ValueError('max_iters must be positive, got %r' % (max_iters,))
    if point_tol is not None and not point_tol > 0:
        raise ValueError('point_tol must be positive, got %r' % (point_tol,))
    if positivity is None:
        positivity = decide_positivity(ch)

    if threads > 1:
        with concurrent.futures.ThreadPoolExecutor(threads) as executor:
            trace, converged = _run(ch, max_iters, gap_tol, point_tol,
                                    executor)
    else:
        trace, converged = _run(ch, max_iters, gap_tol, point_tol, None)

    last = trace.bounds[-1]
    if not positivity.positive:
        logger.info('capacity of %s is zero, estimate forced to 0',
                    ch.name or '<unnamed>')
        return CapacityEstimate(0.0, 0.0, 0.0, last.gain_lo, last.gain_hi,
                                last.n, True, positivity.decision, trace)

    lower = max(last.lower, last.gain_lo)
    upper = min(last.upper, last.gain_hi)
    point = (lower + upper) / 2
    if converged is False:
        logger.warning('not converged after %d iterations: gain interval '
                       '[%s, %s] wider than %s', last.n,
                       fmt_float(last.gain_lo), fmt_float(last.gain_hi),
                       gap_tol)
    else:
        logger.info('capacity of %s: %s in [%s, %s] after %d iterations',
                    ch.name or '<unnamed>', fmt_float(point),
                    fmt_float(lower), fmt_float(upper), last.n)
    return CapacityEstimate(lower, upper, point, last.gain_lo, last.gain_hi,
                            last.n, converged, positivity.decision, trace)


def w_table(ch, horizon, trace=None):
    '''Table of ``W(n, s) = 2 ** J_n(s)`` for ``n = 0..horizon``.

    :param trace: optional :class:`ValueTrace` with at least ``horizon``
      iterations, computed if not given.

    :return: array of shape ``(horizon + 1, |S|)``.

    :raise zecap.errors.Overflow: if some ``W`` is not representable.
    '''
    if not 0 <= horizon <= MAX_W_HORIZON:
        raise HorizonOutOfRange(horizon, MAX_W_HORIZON)
    if trace is None or trace.last < horizon:
        trace = ValueTrace(ValueFunction(np.zeros(ch.num_states), 0))
        values = iterate_values(ch)
        for _ in range(horizon):
            trace.append(*next(values))

    table = np.empty((horizon + 1, ch.num_states))
    for n in range(horizon + 1):
        row = trace.values[n].exp2()
        if not np.all(np.isfinite(row)):
            raise Overflow(n, float(trace.values[n].values.max()))
        table[n] = row
    return table


def dmc_capacity(ch):
    '''Zero-error feedback capacity of a single state channel:

    .. math::

       C_0 = -\\log_2 \\min_f \\max_y \\sum_{x \\in G(y)} f(x)

    if some pair of inputs is not adjacent, else ``0``.

    >>> from zecap.corpus import get_entry
    >>> round(dmc_capacity(get_entry('pentagon').channel), 9)
    1.321928095

    :raise zecap.errors.NotSingleState: if the channel has more states.
    '''
    as_dmc(ch)
    positivity = decide_positivity(ch)
    if not positivity.positive:
        return 0.0
    return solve_inner(ch, 0, [0.0]).value


def write_trace_csv(bounds, out):
    '''Write the :class:`BoundsTrace` as CSV with a header row.'''
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(BoundsTrace.columns)
    for row in bounds:
        writer.writerow([row.n] + [fmt_float(v) for v in row[1:]])


def read_trace_csv(in_file):
    '''Read a CSV written by :func:`write_trace_csv`.'''
    reader = csv.DictReader(in_file)
    missing = set(BoundsTrace.columns) - set(reader.fieldnames or ())
    if missing:
        raise SystemExit('trace CSV misses columns: %s' % (
            ', '.join(sorted(missing)),))
    return BoundsTrace(
        (int(r['n']),) + tuple(float(r[c]) for c in BoundsTrace.columns[1:])
        for r in reader)


def _dump_lps(ch, trace, out):
    j = trace.values[trace.last - 1]
    for s in range(ch.num_states):
        problem, _, _ = build_inner_lp(ch, s, j)
        out.write(problem.to_text())
        out.write('\n')


def add_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'), nargs='?',
                    help='The channel JSON file. Defaults to stdin.',
                    default=sys.stdin)
    ap.add_argument('--iters', type=int, default=DEFAULT_MAX_ITERS,
                    help='Maximum number of iterations. Default: %(default)s')
    ap.add_argument('--tol', type=float, default=DEFAULT_GAP_TOL,
                    help=('Gain interval width counted as converged. '
                          'Default: %(default)s'))
    ap.add_argument('--point-tol', type=float, default=DEFAULT_POINT_TOL,
                    help=('Wanted error of the point estimate, the '
                          'iteration runs until the gain interval is '
                          'narrower than twice this. Default: %(default)s'))
    ap.add_argument('--trace', type=argparse.FileType('w'), default=None,
                    help=('Write the per iteration bounds to this CSV file '
                          '(columns: %s).' % ', '.join(BoundsTrace.columns)))
    ap.add_argument('--w-table', type=int, default=None, metavar='N',
                    help='Also print W(n, s) for n = 0..N.')
    ap.add_argument('--dump-lp', type=argparse.FileType('w'), default=None,
                    help='Write the inner linear programs of the last '
                         'iteration to this file.')
    ap.add_argument('--threads', type=int, default=None,
                    help=('Threads solving the states of an iteration. '
                          'Default: $ZECAP_THREADS or 1'))


def handle_command(args, out=None):
    config = args.config
    out = out or sys.stdout
    ch = load_channel(args.channel)
    positivity = decide_positivity(ch)

    started = time.perf_counter()
    est = run_value_iteration(ch, config.iters, config.tol,
                              threads=config.threads,
                              positivity=positivity,
                              point_tol=config.point_tol)
    logger.info('value iteration took %.3fs', time.perf_counter() - started)

    report = {
        'channel': ch.name,
        'positivity': positivity.to_json(ch),
        'capacity': est.to_json(ch),
    }
    if args.w_table is not None:
        table = w_table(ch, args.w_table, est.trace)
        report['w_table'] = {ch.states[s]: table[:, s]
                             for s in range(ch.num_states)}
    dump_report(report, out)

    if args.trace:
        write_trace_csv(est.bounds, args.trace)
        args.trace.close()
    if args.dump_lp:
        _dump_lps(ch, est.trace, args.dump_lp)
        args.dump_lp.close()

    if est.converged is False:
        return EXIT_NOT_CONVERGED
    return 0


def add_dmc_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'), nargs='?',
                    help='The single state channel JSON file.',
                    default=sys.stdin)


def handle_dmc_command(args, out=None):
    out = out or sys.stdout
    ch = load_channel(args.channel)
    dmc = as_dmc(ch)
    capacity = dmc_capacity(ch)
    dump_report({
        'channel': ch.name,
        'capacity': capacity,
        'g': {ch.outputs[y]: [ch.inputs[x] for x in sorted(g)]
              for y, g in enumerate(dmc.g)},
    }, out)
    return 0
