'''
Channel Corpus
==============

Channels with known zero-error feedback capacity, used by the tests
and available from the command line:

``example1``
  Two states. State 0 is a binary symmetric channel that always moves
  to state 1; state 1 is noiseless and moves to state 0 with
  probability ``p``. Capacity 1/2.

``example2``
  Two states, the next state is the output. State 0 is a Z-channel,
  state 1 is noiseless. Capacity ``log2`` of the golden ratio.

``example3_reconstructed``
  Three states and ternary alphabets, support-only. Its topology is
  rebuilt from its published Bellman equations and optimal policy.
  Capacity ``log2((1 - a1) / a1)`` where
  ``a1 = (1 - a1) ** 3``.

``pentagon``
  Single state, five inputs, ``G(y) = {y, y + 1 mod 5}``. Capacity
  ``log2(5 / 2)``.

``identity2``, ``identity3``
  Single state noiseless channels. Capacity ``log2(k)``.

``all_adjacent``
  Single state binary symmetric channel, every pair of inputs is
  adjacent. Capacity 0.

Every expected value carries a provenance tag in the notes:
``[PUBLISHED]`` for values published with the examples,
``[DERIVED]`` for values derived from them and ``[TRIVIAL]`` for
analytically forced ones.

>>> [e.name for e in load_corpus()]  # doctest: +NORMALIZE_WHITESPACE
['example1', 'example2', 'example3_reconstructed', 'pentagon',
 'identity2', 'identity3', 'all_adjacent']
>>> round(get_entry('example2').expected_capacity, 6)
0.694242

Command line usage:

.. code-block:: shell

   zecap corpus list
   zecap corpus export channels/

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'CorpusEntry', 'example1_channel', 'example2_channel',
    'example3_channel', 'pentagon_channel', 'identity_channel',
    'all_adjacent_channel', 'load_corpus', 'get_entry', 'export_corpus',
    'add_arguments', 'handle_command',
)

import functools
import logging
import math
import os
import sys

from ..channel import Channel, validate
from ..channel.io import dump_channel
from ..dp.bellman import (
    example1_candidate, example2_candidate, example3_candidate,
    solve_example3_gain,
)
from ..report import dump_report

logger = logging.getLogger(__name__)

GOLDEN_RATIO = (1 + math.sqrt(5)) / 2


class CorpusEntry:
    '''A channel with its expected analytical results.

    :ivar expected_capacity: capacity in bits per channel use.
    :ivar expected_tables: dict of expected tables (``w``, ``m``, ``v``,
      ``policy``...) keyed by state identifier where applicable.
    :ivar notes: list of strings, each one starting with its
      provenance tag.
    :ivar candidate: analytical :class:`zecap.dp.bellman.BellmanCandidate`
      or ``None``.
    '''

    def __init__(self, name, channel, expected_capacity, expected_tables=None,
                 notes=(), candidate=None):
        self.name = name
        self.channel = channel
        self.expected_capacity = expected_capacity
        self.expected_tables = expected_tables or {}
        self.notes = tuple(notes)
        self.candidate = candidate

    def __repr__(self):
        return '%s(%s, expected_capacity=%r)' % (
            self.__class__.__name__, self.name, self.expected_capacity)

    def to_json(self):
        return {
            'name': self.name,
            'expected_capacity': self.expected_capacity,
            'expected_tables': self.expected_tables,
            'notes': list(self.notes),
            'states': len(self.channel.states),
            'inputs': len(self.channel.inputs),
            'outputs': len(self.channel.outputs),
        }


def _names(k):
    return [str(i) for i in range(k)]


def example1_channel(p=0.5, crossover=0.1):
    '''Noisy state 0 forced to state 1, noiseless state 1 returning to
    state 0 with probability ``p``. The support, hence the zero-error
    capacity, does not depend on ``p`` nor ``crossover``.
    '''
    transitions = []
    for x in range(2):
        transitions.append(('0', str(x), str(x), '1', 1 - crossover))
        transitions.append(('0', str(x), str(1 - x), '1', crossover))
        transitions.append(('1', str(x), str(x), '0', p))
        transitions.append(('1', str(x), str(x), '1', 1 - p))
    return validate(Channel(_names(2), _names(2), _names(2), transitions,
                            name='example1'))


def example2_channel(p=0.5):
    '''Z-channel state 0 and noiseless state 1, next state is the
    output.
    '''
    transitions = [
        ('0', '0', '0', '0', p),
        ('0', '0', '1', '1', 1 - p),
        ('0', '1', '1', '1', 1.0),
        ('1', '0', '0', '0', 1.0),
        ('1', '1', '1', '1', 1.0),
    ]
    return validate(Channel(_names(2), _names(2), _names(2), transitions,
                            name='example2'))


def example3_channel():
    '''Support-only three state channel:

     - from state 0 input ``x`` yields output ``x`` and next state ``x``;
     - from state 1 inputs 0 and 1 yield output 0 and next state 2,
       input 2 yields output 1 and next state 0;
     - from state 2 every input yields output 0 and next state 0.
    '''
    transitions = []
    for x in range(3):
        transitions.append(('0', str(x), str(x), str(x)))
        if x < 2:
            transitions.append(('1', str(x), '0', '2'))
        else:
            transitions.append(('1', str(x), '1', '0'))
        transitions.append(('2', str(x), '0', '0'))
    return validate(Channel(_names(3), _names(3), _names(3), transitions,
                            name='example3_reconstructed'))


def pentagon_channel():
    '''Input ``x`` yields output ``x`` or ``x - 1 mod 5``.'''
    transitions = []
    for x in range(5):
        transitions.append(('0', str(x), str(x), '0', 0.5))
        transitions.append(('0', str(x), str((x - 1) % 5), '0', 0.5))
    return validate(Channel(['0'], _names(5), _names(5), transitions,
                            name='pentagon'))


def identity_channel(k):
    '''Noiseless single state channel with ``k`` inputs.'''
    transitions = [('0', str(x), str(x), '0', 1.0) for x in range(k)]
    return validate(Channel(['0'], _names(k), _names(k), transitions,
                            name='identity%d' % (k,)))


def all_adjacent_channel(crossover=0.1):
    '''Single state binary symmetric channel.'''
    transitions = []
    for x in range(2):
        transitions.append(('0', str(x), str(x), '0', 1 - crossover))
        transitions.append(('0', str(x), str(1 - x), '0', crossover))
    return validate(Channel(['0'], _names(2), _names(2), transitions,
                            name='all_adjacent'))


def _example3_policy():
    a1, _ = solve_example3_gain()
    r = a1 / (1 - a1)
    return [[r, a1, r * r], [0.0, a1, 1 - a1], [0.0, 0.0, 1.0]]


def _build():
    _, rho3 = solve_example3_gain()
    return [
        CorpusEntry(
            'example1', example1_channel(), 0.5,
            {
                'w': {'0': [2 ** (n // 2) for n in range(1, 7)],
                      '1': [2 ** ((n + 1) // 2) for n in range(1, 7)]},
                'v': [[0, 0], [0, 1], [1, 1]],
            },
            ['[PUBLISHED] capacity 1/2',
             '[PUBLISHED] W(n, 0) = 2 ** floor(n / 2), '
             'W(n, 1) = 2 ** ceil(n / 2)',
             '[DERIVED] positivity table from the game recursion',
             '[DERIVED] support independent of p and crossover'],
            example1_candidate()),
        CorpusEntry(
            'example2', example2_channel(), math.log2(GOLDEN_RATIO),
            {
                'w': {'0': [1, 2, 3, 5, 8], '1': [2, 3, 5, 8, 13]},
                'm': {'0': [1, 2, 3, 5, 8], '1': [2, 3, 5, 8, 13]},
                'v': [[0, 0], [0, 1], [1, 2]],
                'p1': (3 - math.sqrt(5)) / 2,
            },
            ['[PUBLISHED] capacity log2 of the golden ratio, 0.6942',
             '[PUBLISHED] W(n, s) and M(n, s) Fibonacci tables, n = 1..5',
             '[PUBLISHED] optimal P(x=0|s=1) = (3 - sqrt(5)) / 2',
             '[DERIVED] V_2 = (1, 2) from the game recursion',
             '[DERIVED] Bellman bias g = (0, rho)'],
            example2_candidate()),
        CorpusEntry(
            'example3_reconstructed', example3_channel(), rho3,
            {
                'gain_50': 1.1028,
                'policy': _example3_policy(),
            },
            ['[PUBLISHED] capacity 1.102926, J_50 - J_49 = 1.1028',
             '[PUBLISHED] optimal policy rows (0.4656, 0.3177, 0.2167), '
             '(0, 0.3177, 0.6823), (0, 0, 1)',
             '[DERIVED] topology rebuilt from the Bellman equations and '
             'the zero entries of the optimal policy',
             '[DERIVED] gain log2((1 - a1) / a1) = -2 log2(1 - a1), '
             'bias g = (rho, rho / 2, 0)'],
            example3_candidate()),
        CorpusEntry(
            'pentagon', pentagon_channel(), math.log2(5 / 2),
            {},
            ['[DERIVED] min-max of adjacent pair masses is 2/5, '
             'attained by the uniform pmf']),
        CorpusEntry(
            'identity2', identity_channel(2), 1.0, {},
            ['[TRIVIAL] disjoint G(y), capacity log2(2)']),
        CorpusEntry(
            'identity3', identity_channel(3), math.log2(3), {},
            ['[TRIVIAL] disjoint G(y), capacity log2(3)']),
        CorpusEntry(
            'all_adjacent', all_adjacent_channel(), 0.0,
            {'v': [[0], [0]]},
            ['[PUBLISHED] capacity zero if any two inputs share an output',
             '[TRIVIAL] positivity decided at horizon 1']),
    ]


@functools.lru_cache(maxsize=None)
def _entries():
    return tuple(_build())


def load_corpus():
    '''All corpus entries, in a fixed order.

    :rtype: list of :class:`CorpusEntry`
    '''
    return list(_entries())


def get_entry(name):
    '''Corpus entry by name.

    :raise KeyError: unknown name.
    '''
    for entry in _entries():
        if entry.name == name:
            return entry
    raise KeyError('unknown corpus entry %r, available: %s' % (
        name, ', '.join(e.name for e in _entries())))


def export_corpus(directory):
    '''Write every channel to ``directory/<name>.json``.

    :return: list of written paths.
    '''
    os.makedirs(directory, exist_ok=True)
    paths = []
    for entry in _entries():
        path = os.path.join(directory, entry.name + '.json')
        dump_channel(entry.channel, path)
        logger.info('wrote %s', path)
        paths.append(path)
    return paths


def add_arguments(ap):
    sub = ap.add_subparsers(title='action', dest='action')
    sub.required = True
    sub.add_parser('list', help='List the entries and expected values.')
    export = sub.add_parser('export', help='Write the channel files.')
    export.add_argument('directory', help='Output directory.')


def handle_command(args, out=None):
    out = out or sys.stdout
    if args.action == 'export':
        paths = export_corpus(args.directory)
        dump_report({'exported': paths}, out)
    else:
        dump_report({'entries': [e.to_json() for e in _entries()]}, out)
    return 0
