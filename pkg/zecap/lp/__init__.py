'''
Dense Linear Programs
=====================

A small two-phase primal simplex over a dense :mod:`numpy` tableau, for
the tiny problems solved at each step of the value iteration (at most
a few hundred variables).

Problems are given in the form:

.. math::

   \\min_x c^T x \\quad \\text{s.t.} \\quad
   A_{ub} x \\le b_{ub}, \\; A_{eq} x = b_{eq}, \\; x \\ge 0

The entering column is the lowest index with a negative reduced cost
and the leaving row is the minimum ratio, ties broken by the lowest
basic variable (Bland's rule), so the solver terminates and the
returned basic solution only depends on the problem.

>>> p = LpProblem(c=[0, 1], a_ub=[[1, -1]], b_ub=[0],
...               a_eq=[[1, 0]], b_eq=[1], names=['f', 'u'])
>>> sol = solve_lp(p)
>>> round(sol.optimum, 12), sol.x.tolist()
(1.0, [1.0, 1.0])

>>> try:
...     solve_lp(LpProblem(c=[-1], a_ub=[[0]], b_ub=[1]))
... except LpError as exc:
...     print(exc.code, exc.column)
Unbounded 0

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'FEASIBILITY_TOL', 'OPTIMALITY_TOL', 'LpProblem', 'LpSolution',
    'solve_lp',
)

import collections
import logging

import numpy as np

from ..errors import Infeasible, IterationCapExceeded, LpError, Unbounded
from ..report import fmt_float

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-10
OPTIMALITY_TOL = 1e-10
PIVOT_TOL = 1e-12

LpSolution = collections.namedtuple('LpSolution', 'optimum x iterations')


def _matrix(rows, num_cols, what):
    if rows is None:
        return np.zeros((0, num_cols))
    a = np.array(rows, dtype=float)
    if a.size == 0:
        return np.zeros((0, num_cols))
    if a.ndim != 2 or a.shape[1] != num_cols:
        raise ValueError('%s must have shape (rows, %d), got %s' % (
            what, num_cols, a.shape))
    return a


def _vector(values, size, what):
    b = np.array(values if values is not None else (), dtype=float)
    if b.shape != (size,):
        raise ValueError('%s must have %d entries, got %s' % (
            what, size, b.shape))
    if not np.all(np.isfinite(b)):
        raise ValueError('%s must be finite' % (what,))
    return b


class LpProblem:
    '''Minimize ``c @ x`` subject to ``a_ub @ x <= b_ub``,
    ``a_eq @ x == b_eq`` and ``x >= 0``.

    :param names: optional column names, used by :meth:`to_text`.
    '''

    def __init__(self, c, a_ub=None, b_ub=None, a_eq=None, b_eq=None,
                 names=None, title=''):
        self.c = np.array(c, dtype=float)
        if self.c.ndim != 1 or not len(self.c):
            raise ValueError('objective must be a non-empty vector')
        n = len(self.c)
        self.a_ub = _matrix(a_ub, n, 'a_ub')
        self.b_ub = _vector(b_ub, len(self.a_ub), 'b_ub')
        self.a_eq = _matrix(a_eq, n, 'a_eq')
        self.b_eq = _vector(b_eq, len(self.a_eq), 'b_eq')
        if names is None:
            names = ['x%d' % i for i in range(n)]
        if len(names) != n:
            raise ValueError('expected %d names, got %d' % (n, len(names)))
        self.names = tuple(names)
        self.title = title

    @property
    def num_vars(self):
        return len(self.c)

    def __repr__(self):
        return '%s(vars=%d, ub=%d, eq=%d)' % (
            self.__class__.__name__, self.num_vars, len(self.a_ub),
            len(self.a_eq))

    def to_text(self):
        '''Plain text tableau, one constraint per line.'''
        width = max(12, max(len(n) for n in self.names) + 1)

        def row(values):
            return ' '.join(fmt_float(v).rjust(width) for v in values)

        lines = []
        if self.title:
            lines.append('# %s' % (self.title,))
        lines.append('%-6s %s' % ('', ' '.join(
            n.rjust(width) for n in self.names)))
        lines.append('%-6s %s' % ('min', row(self.c)))
        for i, (a, b) in enumerate(zip(self.a_ub, self.b_ub)):
            lines.append('%-6s %s <= %s' % (
                'ub%d' % i, row(a), fmt_float(b)))
        for i, (a, b) in enumerate(zip(self.a_eq, self.b_eq)):
            lines.append('%-6s %s  = %s' % (
                'eq%d' % i, row(a), fmt_float(b)))
        return '\n'.join(lines) + '\n'


class _Tableau:
    '''Rows ``[A | b]`` followed by the reduced costs ``[d | -z]``.'''

    logger = logging.getLogger(__name__ + '.tableau')

    def __init__(self, p):
        n = p.num_vars
        m_ub = len(p.a_ub)
        m_eq = len(p.a_eq)
        m = m_ub + m_eq

        a = np.vstack([p.a_ub, p.a_eq]) if m else np.zeros((0, n))
        b = np.concatenate([p.b_ub, p.b_eq])
        slack = np.vstack([np.eye(m_ub), np.zeros((m_eq, m_ub))])

        flip = b < 0
        a[flip] *= -1
        b[flip] *= -1
        slack[flip] *= -1

        # rows whose slack can't start in the basis need an artificial
        needs_art = [i for i in range(m) if i >= m_ub or flip[i]]
        art = np.zeros((m, len(needs_art)))
        for k, i in enumerate(needs_art):
            art[i, k] = 1

        self.num_structural = n
        self.num_slack = m_ub
        self.first_art = n + m_ub
        self.num_cols = n + m_ub + len(needs_art)

        self.t = np.zeros((m + 1, self.num_cols + 1))
        self.t[:m, :n] = a
        self.t[:m, n:n + m_ub] = slack
        self.t[:m, n + m_ub:self.num_cols] = art
        self.t[:m, -1] = b

        self.basis = []
        art_of_row = {i: k for k, i in enumerate(needs_art)}
        for i in range(m):
            if i in art_of_row:
                self.basis.append(self.first_art + art_of_row[i])
            else:
                self.basis.append(n + i)

        self.iterations = 0
        self.cap = 10 * (m + self.num_cols) ** 2

    @property
    def num_rows(self):
        return len(self.basis)

    def pivot(self, row, col):
        t = self.t
        t[row] /= t[row, col]
        factors = t[:, col].copy()
        factors[row] = 0
        t -= np.outer(factors, t[row])
        t[:, col] = 0
        t[row, col] = 1
        self.basis[row] = col
        self.iterations += 1
        if self.iterations > self.cap:
            raise IterationCapExceeded(self.cap)

    def run(self, num_cols):
        '''Bland's rule over the first ``num_cols`` columns.'''
        t = self.t
        while True:
            reduced = t[-1, :num_cols]
            entering = np.flatnonzero(reduced < -OPTIMALITY_TOL)
            if not len(entering):
                return
            col = int(entering[0])

            best = None
            for i in range(self.num_rows):
                a = t[i, col]
                if a > PIVOT_TOL:
                    ratio = max(t[i, -1], 0.0) / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                raise Unbounded(col)
            self.logger.debug('pivot row %d col %d ratio %g',
                              best[1], col, best[0][0])
            self.pivot(best[1], col)

    def phase1(self):
        t = self.t
        t[-1] = 0
        if self.first_art == self.num_cols:
            return
        t[-1, self.first_art:self.num_cols] = 1
        for i, col in enumerate(self.basis):
            if col >= self.first_art:
                t[-1] -= t[i]
        self.run(self.num_cols)

        residual = -t[-1, -1]
        scale = max(1.0, float(np.abs(t[:-1, -1]).max(initial=0.0)))
        if residual > FEASIBILITY_TOL * scale:
            raise Infeasible(float(residual))
        self._drive_out_artificials()

    def _drive_out_artificials(self):
        t = self.t
        redundant = []
        for i, col in enumerate(self.basis):
            if col < self.first_art:
                continue
            candidates = np.flatnonzero(
                np.abs(t[i, :self.first_art]) > PIVOT_TOL)
            if len(candidates):
                self.pivot(i, int(candidates[0]))
            else:
                redundant.append(i)
        if redundant:
            self.logger.debug('dropping redundant rows %s', redundant)
            keep = [i for i in range(self.num_rows) if i not in redundant]
            self.t = np.vstack([t[keep], t[-1:]])
            self.basis = [self.basis[i] for i in keep]
        self.t = np.delete(self.t, np.s_[self.first_art:self.num_cols],
                           axis=1)
        self.num_cols = self.first_art

    def phase2(self, c):
        t = self.t
        t[-1] = 0
        t[-1, :len(c)] = c
        for i, col in enumerate(self.basis):
            if col < len(c) and c[col] != 0:
                t[-1] -= c[col] * t[i]
        self.run(self.num_cols)

    def solution(self):
        x = np.zeros(self.num_structural)
        for i, col in enumerate(self.basis):
            if col < self.num_structural:
                x[col] = max(self.t[i, -1], 0.0)
        return x


def solve_lp(p):
    '''Solve the linear program.

    :param p: the problem.
    :type p: :class:`LpProblem`

    :return: ``(optimum, x, iterations)``, ``x`` is a basic optimal
      solution.
    :rtype: :class:`LpSolution`

    :raise zecap.errors.Infeasible: no ``x`` satisfies the constraints.
    :raise zecap.errors.Unbounded: the objective decreases indefinitely.
    :raise zecap.errors.IterationCapExceeded: more than
      ``10 * (rows + cols) ** 2`` pivots.
    '''
    tableau = _Tableau(p)
    tableau.phase1()
    tableau.phase2(p.c)
    x = tableau.solution()
    optimum = float(p.c @ x)
    logger.debug('%r solved in %d pivots: %s', p, tableau.iterations,
                 fmt_float(optimum))
    return LpSolution(optimum, x, tableau.iterations)
