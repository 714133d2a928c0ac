'''
This package computes the zero-error feedback capacity of finite state
channels whose state is known to both the encoder and the decoder. The
source code is documented module by module, so to get started, have a
look at the following:

* :mod:`zecap.channel` declares the channel model: alphabets, the
  support of ``p(y, s'|x, s)``, the sets ``G(y, s'|s)`` and the
  adjacency and positivity predicates derived from them.
  :mod:`zecap.channel.io` reads and writes channel files (JSON).

* :mod:`zecap.positivity` decides whether the capacity is positive by
  playing the finite-horizon max-min game between encoder and Nature.

* :mod:`zecap.lp` holds a small dense simplex solver and
  :mod:`zecap.lp.inner` uses it to solve the per-state max-min problem
  over input distributions.

* :mod:`zecap.dp` runs the value iteration ``J_n = T J_{n-1}``,
  reporting lower/upper bounds on the capacity, and
  :mod:`zecap.dp.bellman` checks candidate fixed points
  ``g + rho = T g``.

* :mod:`zecap.oracle` computes the exact number of zero-error messages
  by integer search and :mod:`zecap.oracle.tree` builds and checks
  explicit feedback code trees.

* :mod:`zecap.corpus` ships reference channels with their known
  capacities, and :mod:`zecap.cli` is the ``zecap`` command line tool.

:license: ISC
'''

__docformat__ = 'reStructuredText en'
__version__ = '1.0'
