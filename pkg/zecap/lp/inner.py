'''
Inner Max-Min Step
==================

One step of the value iteration solves, for a state ``s`` and a value
vector ``j`` (log2 domain):

.. math::

   \\max_f \\min_{s'} \\left( j(s') - \\log_2 \\max_y
   \\sum_{x \\in G(y, s'|s)} f(x) \\right)

over input probability mass functions ``f``. Next states that can't be
reached from ``s`` (every ``G(y, s'|s)`` is empty) are ignored, as are
``(y, s')`` pairs with empty ``G``.

With ``j~ = j - min(j)`` this is the linear program:

.. math::

   \\min u \\quad \\text{s.t.} \\quad
   \\sum_{x \\in G(y, s'|s)} f(x) \\le u \\, 2^{\\tilde j(s')}, \\;
   \\sum_x f(x) = 1, \\; f \\ge 0

and the value is ``min(j) - log2(u*)``.

Inputs that belong to exactly the same ``G`` sets at ``s`` are
interchangeable, thus they share one LP column and the mass is given to
the highest index input of the class.

>>> from zecap.corpus import get_entry
>>> ch = get_entry('example2').channel
>>> value, pmf = solve_inner(ch, 1, [0, 1])
>>> bool(round(value, 9) == round(np.log2(3), 9)), pmf.round(9).tolist()
(True, [0.333333333, 0.666666667])

>>> value, pmf = grid_oracle(ch, 1, [0, 1], resolution=3)
>>> bool(round(value, 9) == round(np.log2(3), 9)), pmf.round(9).tolist()
(True, [0.333333333, 0.666666667])

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'InnerSolution', 'MAX_GRID_POINTS', 'build_inner_lp', 'solve_inner',
    'evaluate_pmf', 'grid_oracle',
)

import collections
import logging
import math

import numpy as np

from ..channel import support_index
from ..errors import AlphabetTooLarge
from . import LpProblem, solve_lp

logger = logging.getLogger(__name__)

PMF_DRIFT_TOL = 1e-9
MAX_GRID_POINTS = 5000000

InnerSolution = collections.namedtuple('InnerSolution', 'value pmf')
InnerSolution.__doc__ = '''Optimal ``value`` and the input ``pmf``
(numpy array over the inputs) attaining it.
'''


def _values(j):
    return np.asarray(getattr(j, 'values', j), dtype=float)


def _constraint_rows(idx, s):
    '''Unique ``(s_next, G)`` pairs, in ``(s_next, y)`` order.'''
    rows = collections.OrderedDict()
    for s_next, _, g in idx.constraint_groups(s):
        rows.setdefault((s_next, g), None)
    return list(rows)


def build_inner_lp(ch, s, j):
    '''Build the linear program of :func:`solve_inner`.

    :return: ``(problem, classes, shift)`` where ``classes`` are the
      input classes matching the first LP columns (the last one is
      ``u``) and ``shift`` is ``min(j)``.
    '''
    j = _values(j)
    idx = support_index(ch)
    classes = idx.input_classes(s)
    shift = float(j.min())
    scale = np.exp2(j - shift)

    rows = _constraint_rows(idx, s)
    a_ub = np.zeros((len(rows), len(classes) + 1))
    for r, (s_next, g) in enumerate(rows):
        for k, members in enumerate(classes):
            if members[0] in g:
                a_ub[r, k] = 1
        a_ub[r, -1] = -scale[s_next]

    a_eq = np.ones((1, len(classes) + 1))
    a_eq[0, -1] = 0
    c = np.zeros(len(classes) + 1)
    c[-1] = 1

    names = ['f(%s)' % ','.join(ch.inputs[x] for x in members)
             for members in classes] + ['u']
    problem = LpProblem(c, a_ub, np.zeros(len(rows)), a_eq, [1],
                        names=names,
                        title='channel %s, state %s, shift %s' % (
                            ch.name or '<unnamed>', ch.states[s], shift))
    return problem, classes, shift


def _normalized(pmf):
    pmf = np.clip(pmf, 0.0, None)
    total = pmf.sum()
    if abs(total - 1.0) > PMF_DRIFT_TOL:
        logger.warning('renormalizing input pmf summing to %r', total)
    return pmf / total


def solve_inner(ch, s, j):
    '''Solve the inner max-min problem at state ``s``.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param s: state index.
    :type s: int

    :param j: finite values over the states, array-like or
      :class:`zecap.dp.ValueFunction`.

    :return: the optimum and the canonical maximizing pmf.
    :rtype: :class:`InnerSolution`

    :raise zecap.errors.LpError: if the linear program fails, which
      does not happen for validated channels.
    '''
    problem, classes, shift = build_inner_lp(ch, s, j)
    solution = solve_lp(problem)
    u = solution.x[-1]

    pmf = np.zeros(ch.num_inputs)
    for members, mass in zip(classes, solution.x[:-1]):
        pmf[members[-1]] = mass
    pmf = _normalized(pmf)

    value = float(shift - math.log2(u))
    return InnerSolution(value, pmf)


def _evaluate(ch, s, j, pmfs):
    '''Objective of the inner problem for each row of ``pmfs``.'''
    idx = support_index(ch)
    terms = {}
    for s_next, _, g in idx.constraint_groups(s):
        mass = pmfs[:, sorted(g)].sum(axis=1)
        prev = terms.get(s_next)
        terms[s_next] = mass if prev is None else np.maximum(prev, mass)

    value = np.full(len(pmfs), np.inf)
    with np.errstate(divide='ignore'):
        for s_next, mass in terms.items():
            value = np.minimum(value, j[s_next] - np.log2(mass))
    return value


def evaluate_pmf(ch, s, j, pmf):
    '''The inner objective at a given input pmf.

    >>> from zecap.corpus import get_entry
    >>> ch = get_entry('example1').channel
    >>> float(evaluate_pmf(ch, 1, [0, 0], [0.5, 0.5]))
    1.0
    '''
    pmf = np.asarray(pmf, dtype=float).reshape(1, -1)
    return float(_evaluate(ch, s, _values(j), pmf)[0])


def _simplex_grid(k, total):
    '''All non-negative integer vectors of size ``k`` summing to
    ``total``, in lexicographic order.
    '''
    if k == 1:
        return np.array([[total]])
    if k == 2:
        first = np.arange(total + 1)
        return np.column_stack([first, total - first])
    parts = []
    for first in range(total + 1):
        rest = _simplex_grid(k - 1, total - first)
        parts.append(np.column_stack(
            [np.full(len(rest), first), rest]))
    return np.vstack(parts)


def _max_inputs(resolution, max_points):
    k = 1
    while math.comb(resolution + k, k) <= max_points:
        k += 1
    return k


def grid_oracle(ch, s, j, resolution, max_points=MAX_GRID_POINTS):
    '''Exhaustive search over pmfs whose entries are multiples of
    ``1 / resolution``. An independent check of :func:`solve_inner`.

    :param resolution: grid resolution, ``1`` only evaluates the
      deterministic inputs.
    :type resolution: int

    :param max_points: maximum number of grid points to evaluate.

    :return: the best grid point (first one in lexicographic order on
      ties) and its value.
    :rtype: :class:`InnerSolution`

    :raise zecap.errors.AlphabetTooLarge: if the grid has more than
      ``max_points`` points.
    '''
    if resolution < 1:
        raise ValueError('resolution must be positive, got %r' %
                         (resolution,))
    k = ch.num_inputs
    points = math.comb(resolution + k - 1, k - 1)
    if points > max_points:
        raise AlphabetTooLarge(k, _max_inputs(resolution, max_points))

    pmfs = _simplex_grid(k, resolution) / resolution
    values = _evaluate(ch, s, _values(j), pmfs)
    best = int(np.argmax(values))
    logger.debug('grid oracle state %d: %d points, best %r', s, points,
                 values[best])
    return InnerSolution(float(values[best]), pmfs[best])
