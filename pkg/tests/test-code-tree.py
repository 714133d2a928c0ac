import json
import math

import numpy as np
import pytest

from zecap.corpus import get_entry
from zecap.dp import w_table
from zecap.errors import TooManyMessages
from zecap.oracle.tree import (
    CodeNode, CodeTree, build_code_tree, partition_messages,
    tree_to_json, verify_code_tree,
)
from zecap.positivity import decide_positivity


def test_partition_messages_random():
    'sizes add up and stay within one message of the quota'
    rng = np.random.default_rng(41)
    for _ in range(1000):
        k = int(rng.integers(1, 6))
        pmf = rng.random(k) * (rng.random(k) < 0.7)
        if pmf.sum() == 0:
            pmf[0] = 1
        count = int(rng.integers(0, 200))
        sizes = partition_messages(count, pmf)
        quotas = count * pmf / pmf.sum()
        assert sizes.sum() == count
        assert np.all(np.abs(sizes - quotas) < 1)
        assert np.all(sizes[pmf == 0] == 0)


def test_partition_messages_invalid():
    'negative counts and empty pmfs are rejected'
    with pytest.raises(ValueError):
        partition_messages(-1, [1])
    with pytest.raises(ValueError):
        partition_messages(3, [0, 0])
    with pytest.raises(ValueError):
        partition_messages(3, [-0.5, 1.5])


@pytest.mark.parametrize('name, horizons', [
    ('example1', (1, 2, 5, 8)),
    ('example2', (1, 3, 5, 8)),
    ('example3_reconstructed', (1, 4, 8)),
    ('pentagon', (1, 3, 5)),
    ('identity2', (3, 5)),
    ('identity3', (2, 4)),
])
def test_code_trees_decode(name, horizons):
    'floor(W(n, s)) messages are decoded without error'
    ch = get_entry(name).channel
    for n in horizons:
        w = w_table(ch, n)
        for s0 in range(ch.num_states):
            tree = build_code_tree(ch, s0, n)
            assert tree.count == math.floor(w[n, s0] + 1e-9)
            verdict = verify_code_tree(ch, tree)
            assert verdict.passed, (name, n, s0, verdict.failures)
            assert verdict.max_ambiguity == 1


def test_noiseless_trees_need_no_cleanup():
    'with k ** n messages every leaf is reached after n uses'
    ch = get_entry('identity3').channel
    tree = build_code_tree(ch, 0, 3)
    assert tree.count == 27
    assert tree.cleanup_stages == 0
    assert verify_code_tree(ch, tree).depth == 3


def test_cleanup_resolves_extra_messages():
    'messages beyond W are split at positive states'
    ch = get_entry('example2').channel
    tree = build_code_tree(ch, 1, 3, count=20)
    verdict = verify_code_tree(ch, tree)
    assert verdict.passed
    assert tree.cleanup_stages > 0
    assert verdict.depth > 3
    assert any(node.cleanup for node in tree.nodes())


def test_zero_capacity_tree():
    'a single message fits, more is an error'
    ch = get_entry('all_adjacent').channel
    tree = build_code_tree(ch, 0, 3)
    assert tree.count == 1
    assert tree.root.is_leaf
    assert verify_code_tree(ch, tree).passed
    with pytest.raises(ValueError):
        build_code_tree(ch, 0, 3, count=2)


def test_tree_when_game_stays_zero(shared_exit_channel):
    'trees decode from a state the positivity game scores zero'
    ch = shared_exit_channel
    for n in range(1, 7):
        for s0 in range(ch.num_states):
            tree = build_code_tree(ch, s0, n)
            assert tree.count == 2 ** ((n + s0) // 2)
            verdict = verify_code_tree(ch, tree)
            assert verdict.passed, (n, s0, verdict.failures)

    tree = build_code_tree(ch, 0, 2, count=9)
    assert verify_code_tree(ch, tree).passed
    assert tree.cleanup_stages > 0


def test_trees_decode_on_random_channels(random_channels):
    'every state of a positive capacity channel gets a decodable tree'
    for ch in random_channels(40, seed=5):
        positivity = decide_positivity(ch)
        if not positivity.positive:
            continue
        for s0 in range(ch.num_states):
            tree = build_code_tree(ch, s0, 3, positivity=positivity)
            verdict = verify_code_tree(ch, tree)
            assert verdict.passed, (s0, verdict.failures)


def test_too_many_messages():
    'only the starting state matters when it cannot split two messages'
    with pytest.raises(TooManyMessages) as excinfo:
        build_code_tree(get_entry('all_adjacent').channel, 0, 2, count=3)
    assert excinfo.value.to_dict()['count'] == 3
    assert excinfo.value.state == '0'


def test_verify_detects_confusion():
    'leaves with more than one message fail'
    ch = get_entry('identity2').channel
    tree = CodeTree(CodeNode(0, [0, 1]), 0, 0)
    verdict = verify_code_tree(ch, tree)
    assert not verdict.passed
    assert verdict.max_ambiguity == 2

    root = CodeNode(0, [0, 1], assignment={0: 0, 1: 0},
                    children={(0, 0): CodeNode(0, [0, 1])})
    verdict = verify_code_tree(ch, CodeTree(root, 0, 1))
    assert not verdict.passed
    assert verdict.depth == 1
    assert verdict.to_json()['verdict'] == 'fail'


def test_verify_detects_missing_branch():
    'every observation a message can produce needs a child'
    ch = get_entry('all_adjacent').channel
    root = CodeNode(0, [0], assignment={0: 1},
                    children={(1, 0): CodeNode(0, [0])})
    verdict = verify_code_tree(ch, CodeTree(root, 0, 1))
    assert not verdict.passed
    assert 'no branch' in verdict.failures[0]


def test_tree_to_json():
    'the tree serializes with identifiers'
    ch = get_entry('example2').channel
    tree = build_code_tree(ch, 1, 2)
    data = json.loads(json.dumps(tree_to_json(ch, tree)))
    assert data['s0'] == '1'
    assert data['messages'] == 3
    root = data['root']
    assert root['messages'] == [0, 1, 2]
    assert set(root['assignment']) == {'0', '1', '2'}
    assert [(c['s_next'], c['y']) for c in root['children']] == \
        sorted((c['s_next'], c['y']) for c in root['children'])
