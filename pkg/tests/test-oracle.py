import math

import numpy as np
import pytest

from zecap.corpus import get_entry, load_corpus
from zecap.dp import w_table
from zecap.errors import SearchBudgetExceeded
from zecap.oracle import enumerate_message_count, exact_message_count


def test_example2_fibonacci():
    'exact message counts of the Z-channel example'
    entry = get_entry('example2')
    table = exact_message_count(entry.channel, 5)
    assert table.horizon == 5
    assert table[1:, 0].tolist() == entry.expected_tables['m']['0']
    assert table[1:, 1].tolist() == entry.expected_tables['m']['1']
    assert table.a(5) == 3.0
    assert table.to_json(entry.channel) == {
        '0': [1, 1, 2, 3, 5, 8],
        '1': [1, 2, 3, 5, 8, 13],
    }


def test_example1_counts():
    'one bit every other use'
    table = exact_message_count(get_entry('example1').channel, 6)
    assert table.m.tolist() == [[1, 1], [1, 2], [2, 2], [2, 4], [4, 4],
                                [4, 8], [8, 8]]


def test_identity_and_all_adjacent():
    'k ** n messages without noise, a single one when all inputs clash'
    assert exact_message_count(get_entry('identity3').channel, 4)[4, 0] == 81
    table = exact_message_count(get_entry('all_adjacent').channel, 4)
    assert table.m.ravel().tolist() == [1] * 5


def test_pentagon_counts():
    'the 5-cycle sends 2 messages in one use and 5 in two'
    table = exact_message_count(get_entry('pentagon').channel, 3)
    assert table.m.ravel().tolist()[:3] == [1, 2, 5]
    assert table[3, 0] <= math.floor(2.5 ** 3)


@pytest.mark.parametrize('name', ['example1', 'example2', 'all_adjacent'])
def test_enumeration_agrees(name):
    'labelled enumeration gives the same counts'
    ch = get_entry(name).channel
    assert np.array_equal(enumerate_message_count(ch, 3).m,
                          exact_message_count(ch, 3).m)


def test_enumeration_agrees_random(random_channels):
    'both searches agree on tiny random channels'
    for ch in random_channels(20, seed=31, max_inputs=2):
        assert np.array_equal(enumerate_message_count(ch, 3).m,
                              exact_message_count(ch, 3).m)


def test_converse_on_corpus():
    'M(n, s) never exceeds W(n, s)'
    for entry in load_corpus():
        horizon = 3 if entry.channel.num_inputs > 3 else 4
        m = exact_message_count(entry.channel, horizon).m
        w = w_table(entry.channel, horizon)
        assert np.all(m <= np.floor(w + 1e-9)), entry.name


def test_converse_random(random_channels):
    'M(n, s) never exceeds W(n, s) on random channels'
    for ch in random_channels(50, seed=32):
        m = exact_message_count(ch, 4).m
        w = w_table(ch, 4)
        assert np.all(m <= np.floor(w + 1e-9))
        assert np.all(np.diff(m, axis=0) >= 0)


def test_search_budgets():
    'searches stop at their budgets'
    with pytest.raises(SearchBudgetExceeded) as excinfo:
        exact_message_count(get_entry('example2').channel, 3, node_budget=1)
    assert excinfo.value.what == 'nodes'
    with pytest.raises(SearchBudgetExceeded) as excinfo:
        enumerate_message_count(get_entry('identity3').channel, 3)
    assert excinfo.value.budget == 65536
    with pytest.raises(ValueError):
        exact_message_count(get_entry('example2').channel, -1)


def test_min_log_counts_super_additive(random_channels, shared_exit_channel):
    'min_s log2 M(n + m, s) >= min_s log2 M(n, s) + min_s log2 M(m, s)'
    channels = [get_entry(name).channel
                for name in ('example1', 'example2',
                             'example3_reconstructed', 'identity2',
                             'all_adjacent')]
    channels.append(shared_exit_channel)
    channels += random_channels(10, seed=33)
    for ch in channels:
        table = exact_message_count(ch, 6)
        for n in range(1, 6):
            for m in range(1, 7 - n):
                assert table.a(n + m) >= table.a(n) + table.a(m) - 1e-12, \
                    (ch.name, n, m)
