'''
Message Count Oracle
====================

Exact maximum number ``M(n, s)`` of messages that can be sent without
error in ``n`` uses of the channel starting at state ``s``, with
feedback and the state known at both ends.

A code sends ``u(x)`` of the messages with input ``x`` first. After
observing ``(y, s')`` the messages still possible are those whose input
is in ``G(y, s'|s)``, and they must be resolved in the ``n - 1`` uses
left, starting at ``s'``:

.. math::

   M(n, s) = \\max_{u \\in \\mathbb{N}^X} \\sum_x u(x) \\quad \\text{s.t.}
   \\sum_{x \\in G(y, s'|s)} u(x) \\le M(n - 1, s'), \\quad M(0, s) = 1

:func:`exact_message_count` solves each integer program by branch and
bound. :func:`enumerate_message_count` enumerates every input
assignment of labelled messages instead, a cross-check for tiny
channels. Both never exceed ``W(n, s)``
(:func:`zecap.dp.w_table`).

>>> from zecap.corpus import get_entry
>>> exact_message_count(get_entry('example2').channel, 5).m.T.tolist()
[[1, 1, 2, 3, 5, 8], [1, 2, 3, 5, 8, 13]]

Command line usage:

.. code-block:: shell

   zecap oracle example2.json --horizon 5 --tree 1

Prints the ``M`` table and, with ``--tree``, the code tree for the
given initial state together with its verification.

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'DEFAULT_NODE_BUDGET', 'ENUMERATION_BUDGET', 'MessageCountTable',
    'exact_message_count', 'enumerate_message_count',
    'add_arguments', 'handle_command',
)

import argparse
import functools
import itertools
import logging
import sys

import numpy as np

from ..channel import support_index
from ..channel.io import load_channel
from ..errors import SearchBudgetExceeded
from ..report import dump_report
from .tree import build_code_tree, tree_to_json, verify_code_tree

logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 1000000
ENUMERATION_BUDGET = 1 << 16


class MessageCountTable:
    '''Exact integers ``m[n, s] = M(n, s)`` for ``n = 0..horizon``.'''

    def __init__(self, m):
        self.m = np.array(m, dtype=np.int64)

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, self.m.tolist())

    @property
    def horizon(self):
        return len(self.m) - 1

    def __getitem__(self, key):
        return self.m[key]

    def log2(self):
        return np.log2(self.m)

    def a(self, n):
        '''``a_n = min_s log2 M(n, s)``.'''
        return float(np.log2(self.m[n]).min())

    def to_json(self, ch):
        return {ch.states[s]: self.m[:, s].tolist()
                for s in range(self.m.shape[1])}


class _IntegerProgram:
    '''``max sum(u)`` s.t. ``sum(u[k] for k in row) <= cap[row]``.'''

    def __init__(self, rows, caps, num_vars, budget):
        self.rows = rows
        self.caps = caps
        self.rows_of_var = [
            [r for r, members in enumerate(rows) if k in members]
            for k in range(num_vars)
        ]
        self.num_vars = num_vars
        self.budget = budget
        self.nodes = 0
        self.best = 0

    def _var_cap(self, k, remaining):
        return min(remaining[r] for r in self.rows_of_var[k])

    def _search(self, k, total, remaining):
        self.nodes += 1
        if self.nodes > self.budget:
            raise SearchBudgetExceeded('nodes', self.budget)

        if k == self.num_vars - 1:
            self.best = max(self.best, total + self._var_cap(k, remaining))
            return

        bound = total + sum(self._var_cap(i, remaining)
                            for i in range(k, self.num_vars))
        if bound <= self.best:
            return

        rows = self.rows_of_var[k]
        for v in range(self._var_cap(k, remaining), -1, -1):
            if total + v + sum(self._var_cap(i, remaining)
                               for i in range(k + 1, self.num_vars)) \
                    <= self.best:
                break
            for r in rows:
                remaining[r] -= v
            self._search(k + 1, total + v, remaining)
            for r in rows:
                remaining[r] += v

    def solve(self):
        self._search(0, 0, list(self.caps))
        return self.best


def _step(idx, s, prev, budget):
    classes = idx.input_classes(s)
    class_of = {x: k for k, members in enumerate(classes) for x in members}
    rows = []
    caps = []
    for s_next, _, g in idx.constraint_groups(s):
        rows.append(frozenset(class_of[x] for x in g))
        caps.append(int(prev[s_next]))
    program = _IntegerProgram(rows, caps, len(classes), budget)
    best = program.solve()
    return best, program.nodes


def exact_message_count(ch, horizon, node_budget=DEFAULT_NODE_BUDGET):
    '''``M(n, s)`` for ``n = 0..horizon``.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param horizon: last ``n``.
    :type horizon: int

    :param node_budget: maximum branch and bound nodes per ``(n, s)``.

    :rtype: :class:`MessageCountTable`

    :raise zecap.errors.SearchBudgetExceeded: if some integer program
      needs more than ``node_budget`` nodes.
    '''
    if horizon < 0:
        raise ValueError('horizon must not be negative, got %r' % (horizon,))
    idx = support_index(ch)
    m = np.ones((horizon + 1, ch.num_states), dtype=np.int64)
    for n in range(1, horizon + 1):
        for s in range(ch.num_states):
            m[n, s], nodes = _step(idx, s, m[n - 1], node_budget)
            logger.debug('M(%d, %d) = %d (%d nodes)', n, s, m[n, s], nodes)
    return MessageCountTable(m)


def enumerate_message_count(ch, horizon, budget=ENUMERATION_BUDGET):
    '''``M(n, s)`` by enumerating input assignments of labelled messages.

    ``k`` messages fit in ``n`` uses from ``s`` if some assignment of an
    input to each message leaves, for every ``(y, s')``, a set of
    messages that fits in ``n - 1`` uses from ``s'``. Only practical for
    tiny channels: ``|X| ** (|X| ** horizon)`` assignments are tried in
    the worst case.

    >>> from zecap.corpus import get_entry
    >>> enumerate_message_count(get_entry('example1').channel, 3).m.tolist()
    [[1, 1], [1, 2], [2, 2], [2, 4]]

    :raise zecap.errors.SearchBudgetExceeded: if the worst case exceeds
      ``budget`` assignments.
    '''
    num_inputs = ch.num_inputs
    max_messages = num_inputs ** horizon
    if num_inputs ** max_messages > budget:
        raise SearchBudgetExceeded('assignments', budget)

    idx = support_index(ch)

    @functools.lru_cache(maxsize=None)
    def fits(n, s, k):
        if k <= 1:
            return True
        if n == 0:
            return False
        groups = idx.constraint_groups(s)
        for assignment in itertools.product(range(num_inputs), repeat=k):
            if all(fits(n - 1, s_next,
                        sum(1 for x in assignment if x in g))
                   for s_next, _, g in groups):
                return True
        return False

    m = np.ones((horizon + 1, ch.num_states), dtype=np.int64)
    for n in range(1, horizon + 1):
        for s in range(ch.num_states):
            k = 1
            while k < max_messages and fits(n, s, k + 1):
                k += 1
            m[n, s] = k
    return MessageCountTable(m)


def add_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'), nargs='?',
                    help='The channel JSON file. Defaults to stdin.',
                    default=sys.stdin)
    ap.add_argument('--horizon', type=int, default=4,
                    help='Number of channel uses. Default: %(default)s')
    ap.add_argument('--tree', default=None, metavar='S0',
                    help=('Also build and verify the code tree for the '
                          'initial state S0.'))


def handle_command(args, out=None):
    out = out or sys.stdout
    ch = load_channel(args.channel)
    horizon = args.config.horizon
    table = exact_message_count(ch, horizon)
    report = {'channel': ch.name, 'horizon': horizon,
              'm': table.to_json(ch)}

    if args.tree is not None:
        if args.tree not in ch.states:
            raise SystemExit('unknown state %r, channel states: %s' % (
                args.tree, ', '.join(ch.states)))
        s0 = ch.states.index(args.tree)
        tree = build_code_tree(ch, s0, horizon)
        verdict = verify_code_tree(ch, tree)
        report['tree'] = tree_to_json(ch, tree)
        report['verification'] = verdict.to_json()
        if not verdict.passed:
            logger.error('code tree for state %s is not zero-error',
                         args.tree)
            dump_report(report, out)
            return 1

    dump_report(report, out)
    return 0
