'''
Feedback Code Trees
===================

A code tree is an adaptive encoding strategy: each node knows the
current state and the messages still possible given the observations
so far, and assigns an input to each of them. After the channel use,
the decoder (which also sees the output and the next state) moves to
the child for the observed ``(y, s')``. A message is decoded without
error when every observation path it can produce ends at a leaf holding
just that message.

:func:`build_code_tree` follows the value iteration policies: at stage
``k`` of ``n`` the live messages are split among the inputs in
proportion to the maximizer of iteration ``n + 1 - k``
(:func:`partition_messages`). Messages still confused after ``n``
stages are resolved by a cleanup phase. The messages are split in two
groups sent with the separating input pairs of
:func:`zecap.positivity.separation_levels` until one group is ruled
out, which takes at most ``|S|`` stages and halves them.

>>> from zecap.corpus import get_entry
>>> ch = get_entry('example2').channel
>>> tree = build_code_tree(ch, 1, 5)
>>> tree
CodeTree(s0=1, horizon=5, messages=13)
>>> verify_code_tree(ch, tree)
TreeVerdict(passed=True, depth=5, max_ambiguity=1)

>>> partition_messages(5, [0.618, 0.382]).tolist()
[3, 2]

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'CodeNode', 'CodeTree', 'TreeVerdict', 'partition_messages',
    'build_code_tree', 'verify_code_tree', 'tree_to_json',
)

import logging
import math

import numpy as np

from ..channel import support_index
from ..dp import run_value_iteration, w_table
from ..errors import CleanupBudgetExceeded, TooManyMessages
from ..positivity import decide_positivity

logger = logging.getLogger(__name__)

COUNT_SLACK = 1e-9


def partition_messages(count, pmf):
    '''Split ``count`` messages among inputs proportionally to ``pmf``.

    Largest remainder apportionment: each input gets the floor of its
    quota and the remaining messages go to the largest fractional
    parts, lowest index first on ties. Inputs with zero mass get none
    and every size is within one message of its quota.

    >>> partition_messages(8, [0.5, 0.5]).tolist()
    [4, 4]
    >>> partition_messages(3, [0, 1]).tolist()
    [0, 3]

    :rtype: numpy array of ints
    '''
    pmf = np.asarray(pmf, dtype=float)
    if count < 0:
        raise ValueError('count must not be negative, got %r' % (count,))
    if np.any(pmf < 0) or pmf.sum() <= 0:
        raise ValueError('invalid pmf %r' % (pmf,))
    pmf = pmf / pmf.sum()

    quotas = count * pmf
    sizes = np.floor(quotas).astype(np.int64)
    left = count - int(sizes.sum())
    fractions = quotas - sizes
    order = sorted((i for i in range(len(pmf)) if pmf[i] > 0),
                   key=lambda i: (-fractions[i], i))
    for i in order[:left]:
        sizes[i] += 1
    return sizes


class CodeNode:
    '''A node of a :class:`CodeTree`.

    :ivar state: state index at this node.
    :ivar messages: sorted tuple of live messages.
    :ivar assignment: dict message to input index, empty for leaves.
    :ivar children: dict ``(y, s_next)`` to :class:`CodeNode`.
    :ivar cleanup: whether the node belongs to the cleanup phase.
    '''

    __slots__ = ('state', 'messages', 'assignment', 'children', 'cleanup')

    def __init__(self, state, messages, assignment=None, children=None,
                 cleanup=False):
        self.state = state
        self.messages = tuple(sorted(messages))
        self.assignment = dict(assignment or {})
        self.children = dict(children or {})
        self.cleanup = cleanup

    @property
    def is_leaf(self):
        return not self.assignment

    def __repr__(self):
        return '%s(state=%d, messages=%d, children=%d)' % (
            self.__class__.__name__, self.state, len(self.messages),
            len(self.children))

    def iter_nodes(self):
        yield self
        for key in sorted(self.children):
            yield from self.children[key].iter_nodes()


class CodeTree:
    '''Feedback code for ``len(root.messages)`` messages from ``s0``.

    :ivar horizon: number of stages following the policies.
    :ivar cleanup_stages: most extra stages used by the cleanup phase.
    '''

    def __init__(self, root, s0, horizon, cleanup_stages=0):
        self.root = root
        self.s0 = s0
        self.horizon = horizon
        self.cleanup_stages = cleanup_stages

    @property
    def count(self):
        return len(self.root.messages)

    def __repr__(self):
        return '%s(s0=%d, horizon=%d, messages=%d)' % (
            self.__class__.__name__, self.s0, self.horizon, self.count)

    def nodes(self):
        return self.root.iter_nodes()


def _split(node, groups, messages_of_input):
    '''Create the children of ``node`` for the given input assignment.'''
    children = {}
    for s_next, y, g in groups:
        live = [m for x in sorted(g) for m in messages_of_input.get(x, ())]
        if live:
            children[y, s_next] = CodeNode(s_next, live)
    node.children = children
    return children


class _Builder:
    logger = logging.getLogger(__name__ + '.builder')

    def __init__(self, ch, horizon, policies, positivity):
        self.ch = ch
        self.idx = support_index(ch)
        self.horizon = horizon
        self.policies = policies
        self.positivity = positivity
        self.cleanup_stages = 0

    def assign(self, node, inputs):
        '''Assign ``inputs[i]`` to the i-th live message and split.'''
        node.assignment = dict(zip(node.messages, inputs))
        messages_of_input = {}
        for m, x in node.assignment.items():
            messages_of_input.setdefault(x, []).append(m)
        return _split(node, self.idx.constraint_groups(node.state),
                      messages_of_input)

    def grow(self, node, stage):
        if len(node.messages) <= 1:
            return
        if stage > self.horizon:
            self.start_cleanup(node)
            return
        policy = self.policies[self.horizon - stage]
        sizes = partition_messages(len(node.messages), policy[node.state])
        inputs = [int(x) for x in np.repeat(np.arange(len(sizes)), sizes)]
        for child in self.assign(node, inputs).values():
            self.grow(child, stage + 1)

    def start_cleanup(self, node):
        residual = len(node.messages)
        budget = self.ch.num_states * math.ceil(math.log2(residual))
        self.logger.debug('cleanup of %d messages at state %d',
                          residual, node.state)
        self.halve(node, 0, residual, budget)

    def halve(self, node, stages, residual, budget):
        node.cleanup = True
        if len(node.messages) <= 1:
            self.cleanup_stages = max(self.cleanup_stages, stages)
            return
        if stages >= budget:
            raise CleanupBudgetExceeded(residual, stages + 1, budget)
        half = math.ceil(len(node.messages) / 2)
        self.separate(node, node.messages[:half], node.messages[half:],
                      stages, residual, budget)

    def separate(self, node, first, second, stages, residual, budget):
        '''Play the separating pairs until one group is ruled out.

        Shared outcomes lead to states of lower level, so this takes at
        most ``levels[state]`` stages.
        '''
        node.cleanup = True
        if not self.positivity.separable(node.state):
            raise TooManyMessages(len(node.messages),
                                  self.ch.states[node.state])
        x1, x2 = (int(x) for x in self.positivity.pairs[node.state])
        inputs = [x1] * len(first) + [x2] * len(second)
        for child in self.assign(node, inputs).values():
            live = set(child.messages)
            child_first = [m for m in first if m in live]
            child_second = [m for m in second if m in live]
            if child_first and child_second:
                self.separate(child, child_first, child_second,
                              stages + 1, residual, budget)
            else:
                self.halve(child, stages + 1, residual, budget)


def build_code_tree(ch, s0, n, policies=None, count=None, positivity=None):
    '''Build a zero-error feedback code from the value iteration.

    :param ch: validated channel.
    :type ch: :class:`zecap.channel.Channel`

    :param s0: initial state index.
    :type s0: int

    :param n: number of stages following the policies.
    :type n: int

    :param policies: sequence of :class:`zecap.dp.PolicyTable` where
      ``policies[k - 1]`` produced ``J_k``, ``k = 1..n`` (as in
      :attr:`zecap.dp.CapacityEstimate.policies`). Computed if not
      given.

    :param count: number of messages, defaults to ``floor(W(n, s0))``.

    :param positivity: :class:`zecap.positivity.PositivityResult`,
      computed if not given.

    :rtype: :class:`CodeTree`

    :raise zecap.errors.TooManyMessages: if messages remain confused at
      a state where two messages cannot be told apart.

    :raise zecap.errors.CleanupBudgetExceeded: if the cleanup of ``Z``
      confused messages takes more than ``|S| * ceil(log2(Z))`` stages.
    '''
    if positivity is None:
        positivity = decide_positivity(ch)
    if n >= 1 and (policies is None or len(policies) < n):
        policies = run_value_iteration(ch, n, gap_tol=None,
                                       positivity=positivity).policies
    if count is None:
        count = int(math.floor(w_table(ch, n)[n, s0] + COUNT_SLACK))
    if count > 1 and not positivity.separable(s0):
        raise TooManyMessages(count, ch.states[s0])

    root = CodeNode(s0, range(count))
    builder = _Builder(ch, n, policies, positivity)
    builder.grow(root, 1)
    tree = CodeTree(root, s0, n, builder.cleanup_stages)
    logger.debug('%r built, %d cleanup stages', tree, tree.cleanup_stages)
    return tree


class TreeVerdict:
    '''Outcome of :func:`verify_code_tree`.

    :ivar passed: every message is decoded on every path.
    :ivar depth: longest path to a leaf.
    :ivar max_ambiguity: largest number of messages at a leaf reached
      by some message.
    :ivar failures: descriptions of the problems found.
    '''

    def __init__(self, passed, depth, max_ambiguity, failures):
        self.passed = passed
        self.depth = depth
        self.max_ambiguity = max_ambiguity
        self.failures = failures

    def __repr__(self):
        return '%s(passed=%s, depth=%d, max_ambiguity=%d)' % (
            self.__class__.__name__, self.passed, self.depth,
            self.max_ambiguity)

    def to_json(self):
        return {
            'verdict': 'pass' if self.passed else 'fail',
            'depth': self.depth,
            'max_ambiguity': self.max_ambiguity,
            'failures': list(self.failures),
        }


def verify_code_tree(ch, tree):
    '''Walk every observation path each message can produce.

    :rtype: :class:`TreeVerdict`
    '''
    idx = support_index(ch)
    failures = []
    depth = 0
    ambiguity = 0

    for node in tree.nodes():
        if not node.is_leaf and \
                sorted(node.assignment) != list(node.messages):
            failures.append('node at state %d assigns %d of %d messages' % (
                node.state, len(node.assignment), len(node.messages)))

    def walk(m, node, d):
        nonlocal depth, ambiguity
        if m not in node.messages:
            failures.append('message %d reached a node without it' % (m,))
            return
        if node.is_leaf:
            depth = max(depth, d)
            ambiguity = max(ambiguity, len(node.messages))
            if node.messages != (m,):
                failures.append('message %d ends confused with %d others' %
                                (m, len(node.messages) - 1))
            return
        x = node.assignment.get(m)
        if x is None:
            return
        for s_next, y, g in idx.constraint_groups(node.state):
            if x not in g:
                continue
            child = node.children.get((y, s_next))
            if child is None:
                failures.append('message %d: no branch for output %s, '
                                'state %s' % (m, ch.outputs[y],
                                              ch.states[s_next]))
                continue
            walk(m, child, d + 1)

    for m in tree.root.messages:
        walk(m, tree.root, 0)
    return TreeVerdict(not failures, depth, ambiguity, failures)


def tree_to_json(ch, tree):
    '''Nested structure with message sets and input assignments.'''
    def node_json(node):
        d = {'state': ch.states[node.state],
             'messages': list(node.messages)}
        if node.cleanup:
            d['cleanup'] = True
        if not node.is_leaf:
            d['assignment'] = {str(m): ch.inputs[x]
                               for m, x in sorted(node.assignment.items())}
            d['children'] = [
                {'y': ch.outputs[y], 's_next': ch.states[s_next],
                 'node': node_json(node.children[y, s_next])}
                for y, s_next in sorted(node.children, key=lambda k: (
                    k[1], k[0]))
            ]
        return d

    return {'s0': ch.states[tree.s0], 'horizon': tree.horizon,
            'messages': tree.count,
            'cleanup_stages': tree.cleanup_stages,
            'root': node_json(tree.root)}
