'''
Finite State Channels
=====================

A finite state channel (FSC) has a state ``s`` from a finite set and,
given the current input ``x`` and state, produces the output ``y`` and
the next state ``s'`` according to ``p(y, s'|x, s)``, independently of
the past. The zero-error problem only depends on the *support* of that
distribution, thus :class:`Channel` accepts either probabilities or
"support-only" transitions.

States, inputs and outputs are identified by strings in files and
reports, but are mapped to dense indices (their position in the
declared alphabet) once :func:`validate` certifies the channel. All
the other modules work on indices.

The derived structures are:

 - :class:`SupportIndex`: the sets ``G(y, s'|s)`` of inputs that can
   produce output ``y`` and next state ``s'`` from state ``s``, and the
   states reachable from each state.

 - :func:`adjacent`: two inputs are adjacent at ``s`` if they can
   produce a common ``(y, s')`` pair, thus can't be told apart after
   one use of the channel.

 - :func:`is_positive_state`: a state with at least two non-adjacent
   inputs, where one bit can be sent without error.

 - :func:`as_dmc`: the discrete memoryless channel view of a single
   state channel.

Example with the Z-channel/noiseless channel pair whose next state is
the output:

>>> ch = validate(Channel(
...     states=['0', '1'], inputs=['0', '1'], outputs=['0', '1'],
...     transitions=[
...         ('0', '0', '0', '0'), ('0', '0', '1', '1'),
...         ('0', '1', '1', '1'),
...         ('1', '0', '0', '0'), ('1', '1', '1', '1'),
...     ], name='example2'))
>>> ch
Channel(name=example2, states=2, inputs=2, outputs=2, support-only)
>>> idx = support_index(ch)
>>> sorted(idx.g_sets[0, 1, 1])
[0, 1]
>>> sorted(idx.reachable[0])
[0, 1]
>>> adjacent(ch, 0, 0, 1), adjacent(ch, 1, 0, 1)
(True, False)
>>> is_positive_state(ch, 0), is_positive_state(ch, 1)
(False, True)

Validation reports every problem, raising the first one:

>>> try:
...     validate(Channel(['s0'], ['x0', 'x1', 'x1'], ['y0'],
...                      [('s0', 'x0', 'y0', 's0')]))
... except ChannelError as exc:
...     for v in exc.violations:
...         print(v.code, '-', v)
DuplicateSymbol - 'x1' appears more than once in inputs

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'Transition', 'Channel', 'SupportIndex', 'DmcView',
    'check_channel', 'validate', 'support_index', 'adjacent',
    'is_positive_state', 'non_adjacent_pair', 'as_dmc',
)

import collections
import itertools
import logging
import math

import numpy as np

from ..errors import (
    BadProbabilitySum, ChannelError, DuplicateEntry, DuplicateSymbol,
    EmptyAlphabet, MissingInputRow, MixedWeights, NonPositiveWeight,
    NotSingleState, UnknownSymbol,
)

logger = logging.getLogger(__name__)

PROBABILITY_SUM_TOL = 1e-9

Transition = collections.namedtuple('Transition', 's x y s_next p')
Transition.__doc__ = '''One support entry of ``p(y, s'|x, s)``.

``p`` is the probability, or ``None`` for support-only channels.
'''


def _as_transition(entry):
    if isinstance(entry, Transition):
        return entry
    if isinstance(entry, dict):
        return Transition(entry.get('s'), entry.get('x'), entry.get('y'),
                          entry.get('s_next'), entry.get('p'))
    entry = tuple(entry)
    if len(entry) == 4:
        return Transition(*entry, None)
    return Transition(*entry)


def _symbol(v):
    return v if v is None else str(v)


class Channel:
    '''Finite state channel description.

    A freshly constructed channel holds the declared alphabets and the
    transitions as given; :func:`validate` returns a new, immutable
    instance which additionally carries the dense ``support`` array
    (boolean, indexed ``[s, x, y, s']``) and, for probabilistic
    channels, the ``weights`` array with the same layout.
    '''

    __slots__ = ('name', 'states', 'inputs', 'outputs', 'transitions',
                 '_support', '_weights', '_index')

    def __init__(self, states, inputs, outputs, transitions, name=''):
        '''
        :param states: ordered state identifiers.
        :type states: iterable of str

        :param inputs: ordered input identifiers.
        :type inputs: iterable of str

        :param outputs: ordered output identifiers.
        :type outputs: iterable of str

        :param transitions: entries ``(s, x, y, s_next[, p])``, either
          as tuples, :class:`Transition` or dicts with those keys. ``p``
          is omitted (or ``None``) for support-only channels.

        :param name: optional name used in reports.
        :type name: str
        '''
        self.name = name or ''
        self.states = tuple(str(v) for v in states)
        self.inputs = tuple(str(v) for v in inputs)
        self.outputs = tuple(str(v) for v in outputs)
        self.transitions = tuple(
            Transition(_symbol(t.s), _symbol(t.x), _symbol(t.y),
                       _symbol(t.s_next), t.p)
            for t in (_as_transition(e) for e in transitions)
        )
        self._support = None
        self._weights = None
        self._index = None

    @classmethod
    def from_json(cls, data):
        '''Create from the JSON channel file structure:

        .. code-block:: json

           {"name": "...", "states": ["0"], "inputs": ["0", "1"],
            "outputs": ["0", "1"],
            "transitions": [{"s": "0", "x": "0", "y": "0", "s_next": "0",
                             "p": 1.0}]}
        '''
        return cls(data.get('states') or (), data.get('inputs') or (),
                   data.get('outputs') or (), data.get('transitions') or (),
                   name=data.get('name', ''))

    def to_json(self):
        '''Inverse of :meth:`from_json`. Support-only entries omit ``p``.'''
        transitions = []
        for t in self.transitions:
            d = {'s': t.s, 'x': t.x, 'y': t.y, 's_next': t.s_next}
            if t.p is not None:
                d['p'] = t.p
            transitions.append(d)
        d = {
            'states': list(self.states),
            'inputs': list(self.inputs),
            'outputs': list(self.outputs),
            'transitions': transitions,
        }
        if self.name:
            d['name'] = self.name
        return d

    def __repr__(self):
        return '%s(name=%s, states=%d, inputs=%d, outputs=%d, %s)' % (
            self.__class__.__name__, self.name or '<unnamed>',
            len(self.states), len(self.inputs), len(self.outputs),
            'support-only' if self.support_only else 'probabilistic')

    @property
    def is_validated(self):
        return self._support is not None

    @property
    def support_only(self):
        return all(t.p is None for t in self.transitions)

    @property
    def support(self):
        '''Boolean array ``[s, x, y, s']``, true where ``p > 0``.'''
        if self._support is None:
            raise ValueError('channel %r was not validated' % (self.name,))
        return self._support

    @property
    def weights(self):
        '''Probability array ``[s, x, y, s']`` or ``None``.'''
        if self._support is None:
            raise ValueError('channel %r was not validated' % (self.name,))
        return self._weights

    @property
    def num_states(self):
        return len(self.states)

    @property
    def num_inputs(self):
        return len(self.inputs)

    @property
    def num_outputs(self):
        return len(self.outputs)

    def state_index(self, state):
        '''Dense index of a state given its identifier or index.'''
        if isinstance(state, (int, np.integer)):
            if not 0 <= state < len(self.states):
                raise IndexError('state index %d out of range' % (state,))
            return int(state)
        return self.states.index(str(state))

    def _validated(self, support, weights):
        ch = self.__class__(self.states, self.inputs, self.outputs,
                            self.transitions, name=self.name)
        support.setflags(write=False)
        if weights is not None:
            weights.setflags(write=False)
        ch._support = support
        ch._weights = weights
        return ch


def _check_alphabets(ch):
    violations = []
    for alphabet in ('states', 'inputs', 'outputs'):
        symbols = getattr(ch, alphabet)
        if not symbols:
            violations.append(EmptyAlphabet(alphabet))
            continue
        seen = set()
        for symbol in symbols:
            if symbol in seen:
                violations.append(DuplicateSymbol(alphabet, symbol))
            seen.add(symbol)
    return violations


def _check_entries(ch, lookup):
    '''Returns ``(violations, rows)`` where rows are dense entries.'''
    violations = []
    rows = []
    with_p = sum(1 for t in ch.transitions if t.p is not None)
    if 0 < with_p < len(ch.transitions):
        violations.append(MixedWeights(with_p, len(ch.transitions) - with_p))

    seen = set()
    for i, t in enumerate(ch.transitions):
        key = []
        for field, alphabet in (('s', 'states'), ('x', 'inputs'),
                                ('y', 'outputs'), ('s_next', 'states')):
            symbol = getattr(t, field)
            idx = lookup[alphabet].get(symbol)
            if idx is None:
                violations.append(UnknownSymbol(alphabet, symbol, i))
            key.append(idx)
        if None in key:
            continue

        key = tuple(key)
        if key in seen:
            violations.append(DuplicateEntry(t.s, t.x, t.y, t.s_next))
            continue
        seen.add(key)

        if t.p is not None:
            try:
                p = float(t.p)
            except (TypeError, ValueError):
                p = math.nan
            if not p > 0 or math.isinf(p):
                violations.append(
                    NonPositiveWeight(t.s, t.x, t.y, t.s_next, t.p))
                continue
        else:
            p = None
        rows.append((key, p))
    return violations, rows


def _check_rows(ch, rows, probabilistic):
    violations = []
    totals = {}
    for (s, x, _, _), p in rows:
        totals[s, x] = totals.get((s, x), 0.0) + (p or 0.0)
    for s, x in itertools.product(range(ch.num_states),
                                  range(ch.num_inputs)):
        if (s, x) not in totals:
            violations.append(MissingInputRow(ch.states[s], ch.inputs[x]))
        elif probabilistic and \
                abs(totals[s, x] - 1.0) > PROBABILITY_SUM_TOL:
            violations.append(BadProbabilitySum(
                ch.states[s], ch.inputs[x], totals[s, x]))
    return violations


def check_channel(ch):
    '''Check every channel invariant, returning the list of violations.

    The list contains :exc:`zecap.errors.ChannelError` instances, which
    may be converted to plain dicts with ``to_dict()``. An empty list
    means the channel is valid.

    :param ch: the channel to check.
    :type ch: :class:`Channel` or dict (JSON structure)

    :return: list of violations, in the order they were found.
    :rtype: list
    '''
    if isinstance(ch, dict):
        ch = Channel.from_json(ch)
    violations = _check_alphabets(ch)
    if violations:
        return violations

    lookup = {
        alphabet: {v: i for i, v in enumerate(getattr(ch, alphabet))}
        for alphabet in ('states', 'inputs', 'outputs')
    }
    violations, rows = _check_entries(ch, lookup)
    probabilistic = not ch.support_only and \
        not any(isinstance(v, MixedWeights) for v in violations)
    violations.extend(_check_rows(ch, rows, probabilistic))
    return violations


def validate(ch):
    '''Certify the channel invariants and build its dense arrays.

    :param ch: the channel to validate.
    :type ch: :class:`Channel` or dict (JSON structure)

    :return: a new validated (immutable) channel. An already validated
      channel is returned as is.
    :rtype: :class:`Channel`

    :raise zecap.errors.ChannelError: the first violation found, with
      the complete list in its ``violations`` attribute.
    '''
    if isinstance(ch, dict):
        ch = Channel.from_json(ch)
    if ch.is_validated:
        return ch

    violations = check_channel(ch)
    if violations:
        logger.warning('channel %s has %d violation(s)',
                       ch.name or '<unnamed>', len(violations))
        for v in violations:
            logger.debug('  %s: %s', v.code, v)
        first = violations[0]
        first.violations = tuple(violations)
        raise first

    shape = (ch.num_states, ch.num_inputs, ch.num_outputs, ch.num_states)
    support = np.zeros(shape, dtype=bool)
    weights = None if ch.support_only else np.zeros(shape)
    lookup = {
        alphabet: {v: i for i, v in enumerate(getattr(ch, alphabet))}
        for alphabet in ('states', 'inputs', 'outputs')
    }
    for t in ch.transitions:
        key = (lookup['states'][t.s], lookup['inputs'][t.x],
               lookup['outputs'][t.y], lookup['states'][t.s_next])
        support[key] = True
        if weights is not None:
            weights[key] = float(t.p)
    return ch._validated(support, weights)


class SupportIndex:
    '''The sets ``G(y, s'|s)`` of a validated channel.

    :ivar g_sets: dict ``(s, s_next, y) -> frozenset`` of input indices,
      only non-empty sets are stored (missing keys mean empty set).
    :ivar reachable: dict ``s -> frozenset`` of next states ``s'`` with
      some non-empty ``G(y, s'|s)``.
    '''

    __slots__ = ('g_sets', 'reachable', '_by_input', '_groups')

    def __init__(self, support):
        num_states, num_inputs, num_outputs, _ = support.shape
        self.g_sets = {}
        self._groups = {}
        for s in range(num_states):
            groups = []
            for s_next in range(num_states):
                for y in range(num_outputs):
                    xs = np.flatnonzero(support[s, :, y, s_next])
                    if len(xs):
                        g = frozenset(int(x) for x in xs)
                        self.g_sets[s, s_next, y] = g
                        groups.append((s_next, y, g))
            self._groups[s] = tuple(groups)

        self.reachable = {
            s: frozenset(s_next for s_next, _, _ in self._groups[s])
            for s in range(num_states)
        }
        self._by_input = {
            (s, x): frozenset(int(v) for v in np.flatnonzero(
                support[s, x].any(axis=0)))
            for s in range(num_states) for x in range(num_inputs)
        }

    def g(self, s, s_next, y):
        '''``G(y, s'|s)``, possibly empty.'''
        return self.g_sets.get((s, s_next, y), frozenset())

    def reachable_by_input(self, s, x):
        '''The set ``S(s, x)`` of next states input ``x`` may lead to.'''
        return self._by_input[s, x]

    def constraint_groups(self, s):
        '''Non-empty ``(s_next, y, G)`` triples of state ``s``, ordered by
        ``(s_next, y)``.
        '''
        return self._groups[s]

    def input_classes(self, s):
        '''Group inputs that belong to exactly the same ``G`` sets at
        ``s``. Such inputs can't be told apart at that state.

        :return: tuple of tuples of input indices, each sorted and the
          classes ordered by their first member.
        '''
        signatures = collections.OrderedDict()
        members = {}
        for i, (_, _, g) in enumerate(self._groups[s]):
            for x in g:
                members.setdefault(x, []).append(i)
        for x in sorted(members):
            signatures.setdefault(tuple(members[x]), []).append(x)
        return tuple(tuple(xs) for xs in signatures.values())


def support_index(ch):
    '''Build (or return the cached) :class:`SupportIndex` of ``ch``.

    :param ch: validated channel.
    :type ch: :class:`Channel`
    '''
    if ch._index is None:
        ch._index = SupportIndex(ch.support)
    return ch._index


def adjacent(ch, s, x1, x2):
    '''Whether inputs ``x1`` and ``x2`` may produce a common ``(y, s')``
    at state ``s``.

    :raise ValueError: if ``x1 == x2``.
    '''
    if x1 == x2:
        raise ValueError('adjacency is defined for distinct inputs')
    support = ch.support
    return bool(np.any(support[s, x1] & support[s, x2]))


def non_adjacent_pair(ch, s):
    '''The lexicographically first non-adjacent input pair at ``s``, or
    ``None`` if the state is not positive.
    '''
    for x1, x2 in itertools.combinations(range(ch.num_inputs), 2):
        if not adjacent(ch, s, x1, x2):
            return x1, x2
    return None


def is_positive_state(ch, s):
    '''Whether some pair of inputs is not adjacent at state ``s``.'''
    return non_adjacent_pair(ch, s) is not None


class DmcView:
    '''Discrete memoryless channel view of a single state channel.

    :ivar g: tuple indexed by output with the frozenset ``G(y)`` of
      inputs that can produce it.
    '''

    __slots__ = ('channel', 'g')

    def __init__(self, channel):
        self.channel = channel
        idx = support_index(channel)
        self.g = tuple(idx.g(0, 0, y) for y in range(channel.num_outputs))

    def __repr__(self):
        return '%s(%s)' % (self.__class__.__name__, ', '.join(
            '%s: {%s}' % (self.channel.outputs[y], ', '.join(
                self.channel.inputs[x] for x in sorted(g)))
            for y, g in enumerate(self.g)))


def as_dmc(ch):
    '''Expose ``G(y) = G(y, s|s)`` of a single state channel.

    >>> from zecap.corpus import get_entry
    >>> as_dmc(get_entry('identity2').channel)
    DmcView(0: {0}, 1: {1})

    :raise zecap.errors.NotSingleState: if the channel has more states.
    '''
    if ch.num_states != 1:
        raise NotSingleState(ch.num_states)
    return DmcView(ch)
