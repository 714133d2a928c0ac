'''
Positivity Game
===============

Decides whether the zero-error feedback capacity is positive.

The encoder (maximizer) picks the input, nature (minimizer) picks the
next state among those the input may lead to, and the encoder collects
a reward of 1 every time the game visits a *positive state*
(:func:`zecap.channel.is_positive_state`):

.. math::

   V_0(s) = 0, \\quad
   V_n(s) = r(s) + \\max_x \\min_{s' \\in S(s, x)} V_{n-1}(s')

Values only grow with ``n`` and the zero sets ``S_n = {s: V_n(s) = 0}``
only shrink, stabilizing within ``|S|`` rounds. If ``min_s V_{|S|}(s)``
is positive, every play reaches a positive state, where two messages
are split by a non-adjacent input pair, so the capacity is positive.

The converse does not hold. The game lets nature move to any state an
input may reach, while two messages sent with inputs ``x1`` and ``x2``
stay confused only on the outcomes ``(y, s')`` both inputs share. The
decision therefore comes from :func:`separation_levels`, which computes
for every state the fewest channel uses that tell two messages apart:

.. math::

   D_n(s) = \\exists x_1, x_2: \\forall (y, s') \\text{ with }
   x_1, x_2 \\in G(y, s'|s): D_{n-1}(s')

with ``D_0`` false. The capacity is positive if and only if every state
has a level, that is ``M(|S|, s) >= 2`` for every ``s``. A positive game
always implies positive levels.

>>> from zecap.corpus import get_entry
>>> res = decide_positivity(get_entry('example1').channel)
>>> res.decision
<Decision.CAPACITY_POSITIVE: 'CapacityPositive'>
>>> res.v_table.tolist()
[[0, 0], [0, 1], [1, 1]]
>>> res.witness.tolist()
[0, 0]
>>> res.levels.tolist(), res.pairs.tolist()
([2, 1], [[0, 0], [0, 1]])

>>> res = decide_positivity(get_entry('all_adjacent').channel)
>>> res.decision.value, res.n_star, res.follower.tolist()
('CapacityZero', 0, [[0, 0]])

Ties are resolved by the lowest index, thus results are deterministic.

Command line usage:

.. code-block:: shell

   zecap positivity example1.json

Exits with ``0`` if the capacity is positive and ``2`` if it is zero.

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'Decision', 'PositivityResult', 'reward', 'rewards', 'iterate_v',
    'separation_levels', 'decide_positivity', 'add_arguments',
    'handle_command',
)

import argparse
import enum
import itertools
import logging
import sys

import numpy as np

from .channel import is_positive_state, support_index
from .channel.io import load_channel
from .report import dump_report

logger = logging.getLogger(__name__)

EXIT_CAPACITY_ZERO = 2


class Decision(enum.Enum):
    CAPACITY_ZERO = 'CapacityZero'
    CAPACITY_POSITIVE = 'CapacityPositive'


class PositivityResult:
    '''Outcome of the positivity game and of the separation levels.

    :ivar rewards: integer array ``r(s)``.
    :ivar v_table: integer array ``V_n(s)``, shape ``(horizon + 1, |S|)``.
    :ivar strategy: integer array with the encoder's maximizing input
      ``strategy[n, s]`` used to compute ``V_n(s)``; row 0 is ``-1``.
    :ivar zero_sets: tuple of frozensets ``S_n``, ``n = 0..horizon``.
    :ivar n_star: first ``n`` with ``S_n == S_{n+1}``, ``None`` if the
      horizon is too short to tell.
    :ivar follower: nature's strategy ``A_2(s, x)``, integer array shape
      ``(|S|, |X|)`` keeping the play inside ``S_{n*}``; ``-1`` where
      undefined (``s`` outside ``S_{n*}``). ``None`` if ``S_{n*}`` is
      empty or unknown.
    :ivar levels: integer array, see :func:`separation_levels`.
    :ivar pairs: integer array of shape ``(|S|, 2)``, see
      :func:`separation_levels`.
    :ivar decision: :class:`Decision`, positive if every state has a
      separation level.
    '''

    def __init__(self, rewards, v_table, strategy, zero_sets, n_star,
                 follower, levels, pairs):
        self.rewards = rewards
        self.v_table = v_table
        self.strategy = strategy
        self.zero_sets = zero_sets
        self.n_star = n_star
        self.follower = follower
        self.levels = levels
        self.pairs = pairs
        if np.all(levels > 0):
            self.decision = Decision.CAPACITY_POSITIVE
        else:
            self.decision = Decision.CAPACITY_ZERO

    @property
    def horizon(self):
        return len(self.v_table) - 1

    @property
    def positive(self):
        return self.decision is Decision.CAPACITY_POSITIVE

    @property
    def game_positive(self):
        '''Whether ``min_s V_horizon(s) > 0``.'''
        return bool(self.v_table[-1].min() > 0)

    def separable(self, s):
        '''Whether two messages can be told apart starting at ``s``.'''
        return bool(self.levels[s] > 0)

    @property
    def witness(self):
        '''Encoder inputs realizing ``V_horizon`` if the game is
        positive, the separating input pairs if only the levels are,
        otherwise the follower strategy.
        '''
        if self.game_positive:
            return self.strategy[-1]
        if self.positive:
            return self.pairs
        return self.follower

    def __repr__(self):
        return '%s(decision=%s, horizon=%d, min_v=%d)' % (
            self.__class__.__name__, self.decision.value, self.horizon,
            self.v_table[-1].min())

    def to_json(self, ch):
        '''Report using the channel's state and input identifiers.'''
        def state_names(indices):
            return [ch.states[s] for s in sorted(indices)]

        d = {
            'decision': self.decision.value,
            'game_decision': (Decision.CAPACITY_POSITIVE.value
                              if self.game_positive
                              else Decision.CAPACITY_ZERO.value),
            'rewards': {ch.states[s]: int(r)
                        for s, r in enumerate(self.rewards)},
            'v_table': self.v_table.tolist(),
            'zero_sets': [state_names(z) for z in self.zero_sets],
            'n_star': self.n_star,
            'levels': {ch.states[s]: (int(level) if level > 0 else None)
                       for s, level in enumerate(self.levels)},
        }
        if self.game_positive:
            d['witness'] = {
                'encoder': {ch.states[s]: ch.inputs[x]
                            for s, x in enumerate(self.strategy[-1])},
            }
        elif self.positive:
            d['witness'] = {
                'pairs': {ch.states[s]: [ch.inputs[x] for x in pair]
                          for s, pair in enumerate(self.pairs)},
            }
        else:
            follower = {}
            if self.follower is not None:
                for s, row in enumerate(self.follower):
                    follower[ch.states[s]] = {
                        ch.inputs[x]: (ch.states[t] if t >= 0 else None)
                        for x, t in enumerate(row)
                    }
            d['witness'] = {'follower': follower}
        return d


def reward(ch, s):
    '''``1`` if ``s`` is a positive state, else ``0``.'''
    return int(is_positive_state(ch, s))


def rewards(ch):
    return np.array([reward(ch, s) for s in range(ch.num_states)],
                    dtype=int)


def _follower(ch, idx, zero_set):
    follower = np.full((ch.num_states, ch.num_inputs), -1, dtype=int)
    for s in sorted(zero_set):
        for x in range(ch.num_inputs):
            candidates = idx.reachable_by_input(s, x) & zero_set
            follower[s, x] = min(candidates)
    return follower


def separation_levels(ch):
    '''Fewest channel uses telling two messages apart, per state.

    ``levels[s]`` is the smallest ``n`` with ``D_n(s)`` (see the module
    documentation), ``-1`` if there is none. ``pairs[s]`` holds the
    inputs ``(x1, x2)``, ``x1 <= x2``, sent for the two messages at that
    level: every outcome they share leads to a state of lower level.
    Pairs are tried in lexicographic order, so a positive state gets its
    first non-adjacent pair and level 1. Levels never exceed ``|S|``.

    >>> from zecap.corpus import get_entry
    >>> levels, pairs = separation_levels(get_entry('example2').channel)
    >>> levels.tolist(), pairs.tolist()
    ([2, 1], [[0, 1], [0, 1]])

    :rtype: tuple(numpy array, numpy array)
    '''
    idx = support_index(ch)
    num_states = ch.num_states
    candidates = list(itertools.combinations_with_replacement(
        range(ch.num_inputs), 2))
    shared = [
        [frozenset(s_next for s_next, _, g in idx.constraint_groups(s)
                   if x1 in g and x2 in g)
         for x1, x2 in candidates]
        for s in range(num_states)
    ]

    levels = np.full(num_states, -1, dtype=int)
    pairs = np.full((num_states, 2), -1, dtype=int)
    separated = frozenset()
    for n in range(1, num_states + 1):
        found = {}
        for s in range(num_states):
            if levels[s] > 0:
                continue
            for k, pair in enumerate(candidates):
                if shared[s][k] <= separated:
                    found[s] = pair
                    break
        if not found:
            break
        for s, pair in found.items():
            levels[s] = n
            pairs[s] = pair
        separated = separated | frozenset(found)
    return levels, pairs


def iterate_v(ch, horizon):
    '''Run the positivity game for ``horizon`` rounds.

    The game verdict is only meaningful for ``horizon >= |S|``. The
    decision comes from :func:`separation_levels`, which does not depend
    on the horizon.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param horizon: number of rounds.
    :type horizon: int

    :rtype: :class:`PositivityResult`
    '''
    if horizon < 1:
        raise ValueError('horizon must be positive, got %r' % (horizon,))

    idx = support_index(ch)
    r = rewards(ch)
    num_states = ch.num_states
    next_states = [
        [np.array(sorted(idx.reachable_by_input(s, x)), dtype=int)
         for x in range(ch.num_inputs)]
        for s in range(num_states)
    ]

    v_table = np.zeros((horizon + 1, num_states), dtype=int)
    strategy = np.full((horizon + 1, num_states), -1, dtype=int)
    for n in range(1, horizon + 1):
        prev = v_table[n - 1]
        for s in range(num_states):
            worst = [prev[t].min() for t in next_states[s]]
            x = int(np.argmax(worst))  # first maximum
            strategy[n, s] = x
            v_table[n, s] = r[s] + worst[x]

    zero_sets = tuple(frozenset(int(s) for s in np.flatnonzero(row == 0))
                      for row in v_table)
    n_star = None
    for n in range(horizon):
        if zero_sets[n] == zero_sets[n + 1]:
            n_star = n
            break
    else:
        if not zero_sets[horizon]:
            n_star = horizon

    follower = None
    if n_star is not None and zero_sets[n_star]:
        follower = _follower(ch, idx, zero_sets[n_star])

    levels, pairs = separation_levels(ch)
    result = PositivityResult(r, v_table, strategy, zero_sets, n_star,
                              follower, levels, pairs)
    logger.debug('positivity game %s: V=%s, levels=%s', ch.name,
                 v_table.tolist(), levels.tolist())
    return result


def decide_positivity(ch):
    '''Run :func:`iterate_v` for ``|S|`` rounds and decide.

    :rtype: :class:`PositivityResult`
    '''
    result = iterate_v(ch, ch.num_states)
    if result.positive and not result.game_positive:
        logger.info('channel %s: the game stays at zero but every state '
                    'separates two messages', ch.name or '<unnamed>')
    logger.info('channel %s: %s (min V_%d = %d)', ch.name or '<unnamed>',
                result.decision.value, result.horizon,
                result.v_table[-1].min())
    return result


def add_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'), nargs='?',
                    help='The channel JSON file. Defaults to stdin.',
                    default=sys.stdin)
    ap.add_argument('--horizon', type=int, default=None,
                    help=('Number of rounds to play. Defaults to the '
                          'number of states, which is enough to decide.'))


def handle_command(args, out=None):
    out = out or sys.stdout
    ch = load_channel(args.channel)
    horizon = args.config.horizon
    if horizon is None:
        result = decide_positivity(ch)
    else:
        result = iterate_v(ch, max(horizon, 1))
    dump_report(result.to_json(ch), out)
    return 0 if result.positive else EXIT_CAPACITY_ZERO
