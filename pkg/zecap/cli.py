'''
Command Line
============

The ``zecap`` command wires every module as a sub-command:

.. code-block:: shell

   zecap validate example2.json
   zecap positivity example2.json
   zecap capacity example2.json --iters 100 --tol 1e-3 --trace out.csv
   zecap dmc pentagon.json
   zecap bellman example1.json --candidate candidate.json
   zecap oracle example2.json --horizon 5 --tree 1
   zecap corpus export channels/

Results are printed as JSON on the standard output, floats with 12
significant digits. Diagnostics, timing included, go to the standard
error, so the same invocation always prints the same bytes.

Exit codes:

 - ``0``: success, Bellman candidate passed;
 - ``1``: usage error, invalid file or failed computation, the errors
   are printed on the standard error as ``{"errors": [...]}``;
 - ``2``: the capacity is zero (``positivity``);
 - ``3``: the Bellman candidate failed (``bellman``);
 - ``4``: the value iteration did not converge (``capacity``).

The number of threads used by ``capacity`` and ``bellman`` defaults to
the ``ZECAP_THREADS`` environment variable, else 1.

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = ('EXIT_ERROR', 'RunConfig', 'get_arg_parse', 'main')

import argparse
import dataclasses
import logging
import os
import sys

from . import __version__, corpus, dp, oracle, positivity
from .channel import io as channel_io
from .dp import bellman
from .errors import ZecapError
from .report import dump_report

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
THREADS_ENV = 'ZECAP_THREADS'


@dataclasses.dataclass(frozen=True)
class RunConfig:
    '''Validated settings shared by the sub-commands.

    >>> RunConfig(command='capacity', iters=0)
    Traceback (most recent call last):
      ...
    ValueError: iters must be at least 1, got 0
    '''

    command: str
    iters: int = dp.DEFAULT_MAX_ITERS
    tol: float = dp.DEFAULT_GAP_TOL
    point_tol: float = dp.DEFAULT_POINT_TOL
    horizon: int = None
    threads: int = 1
    verbose: int = 0

    def __post_init__(self):
        if self.iters < 1:
            raise ValueError('iters must be at least 1, got %r' % (
                self.iters,))
        if not self.tol > 0:
            raise ValueError('tol must be positive, got %r' % (self.tol,))
        if not self.point_tol > 0:
            raise ValueError('point_tol must be positive, got %r' % (
                self.point_tol,))
        if self.horizon is not None and self.horizon < 0:
            raise ValueError('horizon must not be negative, got %r' % (
                self.horizon,))
        if self.threads < 1:
            raise ValueError('threads must be at least 1, got %r' % (
                self.threads,))

    @classmethod
    def from_args(cls, args, environ=None):
        '''Build from the parsed arguments.

        Options a sub-command does not declare keep their defaults.
        ``--threads`` falls back to ``$ZECAP_THREADS``.
        '''
        environ = os.environ if environ is None else environ
        threads = getattr(args, 'threads', None)
        if threads is None:
            value = environ.get(THREADS_ENV, '1')
            try:
                threads = int(value)
            except ValueError as exc:
                raise ValueError('%s must be an integer, got %r' % (
                    THREADS_ENV, value)) from exc

        tol = getattr(args, 'tol', None)
        iters = getattr(args, 'iters', None)
        point_tol = getattr(args, 'point_tol', None)
        return cls(
            command=args.command,
            iters=dp.DEFAULT_MAX_ITERS if iters is None else iters,
            tol=dp.DEFAULT_GAP_TOL if tol is None else tol,
            point_tol=(dp.DEFAULT_POINT_TOL if point_tol is None
                       else point_tol),
            horizon=getattr(args, 'horizon', None),
            threads=threads,
            verbose=args.verbose,
        )


class ArgumentParser(argparse.ArgumentParser):
    '''Usage errors exit with ``1``, ``2`` means a zero capacity.'''

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, '%s: error: %s\n' % (self.prog, message))


def get_arg_parse():
    ap = ArgumentParser(
        prog='zecap',
        description=('Zero-error feedback capacity of finite state '
                     'channels'),
    )
    ap.add_argument('--version', action='version',
                    version='%(prog)s ' + __version__)
    ap.add_argument('--verbose', '-v',
                    help='Increase verbosity',
                    action='count',
                    default=0)
    subparsers = ap.add_subparsers(dest='command')
    subparsers.required = True

    commands = (
        ('validate', 'Check a channel file and print its summary',
         channel_io.add_arguments, channel_io.handle_command),
        ('positivity', 'Decide whether the capacity is positive',
         positivity.add_arguments, positivity.handle_command),
        ('capacity', 'Bound the capacity by value iteration',
         dp.add_arguments, dp.handle_command),
        ('dmc', 'Capacity of a single state channel',
         dp.add_dmc_arguments, dp.handle_dmc_command),
        ('bellman', 'Verify a solution of the Bellman equation',
         bellman.add_arguments, bellman.handle_command),
        ('oracle', 'Exact message counts and code trees',
         oracle.add_arguments, oracle.handle_command),
        ('corpus', 'Reference channels with known capacity',
         corpus.add_arguments, corpus.handle_command),
    )
    for name, help_text, add_arguments, handle_command in commands:
        sp = subparsers.add_parser(name, help=help_text)
        sp.set_defaults(func=handle_command)
        add_arguments(sp)

    return ap


def _error_dict(exc):
    if isinstance(exc, ZecapError):
        return exc.to_dict()
    return {'message': str(exc), 'code': exc.__class__.__name__}


def _report_error(exc):
    logger.error('%s', exc)
    errors = getattr(exc, 'violations', ()) or (exc,)
    dump_report({'errors': [_error_dict(e) for e in errors]}, sys.stderr)


def main(argv=None):
    '''Run the command line, return the exit code.'''
    ap = get_arg_parse()
    args = ap.parse_args(argv)

    logfmt = '%(levelname)s: %(message)s'
    logging.basicConfig(format=logfmt, stream=sys.stderr,
                        level=max(10, 40 - (args.verbose * 10)))

    try:
        args.config = RunConfig.from_args(args)
    except ValueError as exc:
        ap.error(str(exc))

    try:
        return args.func(args)
    except (ZecapError, ValueError) as exc:
        _report_error(exc)
        return EXIT_ERROR
