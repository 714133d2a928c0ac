import numpy as np
import pytest

from zecap.channel import Channel, validate
from zecap.corpus import export_corpus


def _names(k):
    return [str(i) for i in range(k)]


def make_random_channel(rng, max_states=3, max_inputs=3, max_outputs=3,
                        density=0.3):
    '''Random support-only channel, every (s, x) row non-empty.'''
    num_states = int(rng.integers(1, max_states + 1))
    num_inputs = int(rng.integers(1, max_inputs + 1))
    num_outputs = int(rng.integers(1, max_outputs + 1))
    shape = (num_states, num_inputs, num_outputs, num_states)
    support = rng.random(shape) < density
    for s in range(num_states):
        for x in range(num_inputs):
            if not support[s, x].any():
                y = rng.integers(num_outputs)
                s_next = rng.integers(num_states)
                support[s, x, y, s_next] = True

    transitions = [tuple(str(int(v)) for v in key)
                   for key in np.argwhere(support)]
    return validate(Channel(_names(num_states), _names(num_inputs),
                            _names(num_outputs), transitions,
                            name='random'))


@pytest.fixture
def random_channels():
    '''Factory: ``random_channels(count, seed, **limits)``.'''
    def factory(count, seed=0, **kwargs):
        rng = np.random.default_rng(seed)
        return [make_random_channel(rng, **kwargs) for _ in range(count)]
    return factory


@pytest.fixture
def corpus_dir(tmp_path):
    '''Directory with every corpus channel as ``<name>.json``.'''
    export_corpus(str(tmp_path))
    return tmp_path


@pytest.fixture
def shared_exit_channel():
    '''State 0 is not positive: its inputs share the output 1 moving to
    state 1, and each may also stay in state 0. State 1 is noiseless and
    always moves to state 0. The positivity game stays at zero in state
    0 while the capacity is 1/2, with ``M(n, 0) = 2 ** floor(n / 2)``.
    '''
    return validate(Channel(['0', '1'], ['0', '1'], ['0', '1', '2'], [
        ('0', '0', '0', '0'),
        ('0', '0', '1', '1'),
        ('0', '1', '2', '0'),
        ('0', '1', '1', '1'),
        ('1', '0', '0', '0'),
        ('1', '1', '1', '0'),
    ], name='shared_exit'))
