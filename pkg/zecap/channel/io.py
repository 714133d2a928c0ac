'''
Channel Files
=============

Channels are stored as JSON objects:

.. code-block:: json

   {
     "name": "example2",
     "states": ["0", "1"],
     "inputs": ["0", "1"],
     "outputs": ["0", "1"],
     "transitions": [
       {"s": "0", "x": "0", "y": "0", "s_next": "0", "p": 0.5},
       {"s": "0", "x": "0", "y": "1", "s_next": "1", "p": 0.5}
     ]
   }

A channel is *support-only* if every transition omits ``p``. Files
with some probabilities and some omissions are rejected by
:func:`zecap.channel.validate`.

Command line usage:

.. code-block:: shell

   zecap validate example2.json

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'read_channel', 'load_channel', 'channel_to_json', 'dump_channel',
    'add_arguments', 'handle_command',
)

import argparse
import json
import logging
import sys

from . import Channel, check_channel, validate

logger = logging.getLogger(__name__)


def _open(path_or_file, mode='r'):
    if hasattr(path_or_file, 'read') or hasattr(path_or_file, 'write'):
        return path_or_file, False
    return open(path_or_file, mode), True


def read_channel(path_or_file):
    '''Read the raw (not validated) channel.

    :raise SystemExit: if the file is not a JSON object, like other
      malformed input files.
    '''
    in_file, owned = _open(path_or_file)
    try:
        try:
            data = json.load(in_file)
        except ValueError as exc:
            raise SystemExit('%s: invalid JSON: %s' % (
                getattr(in_file, 'name', '<channel>'), exc)) from exc
    finally:
        if owned:
            in_file.close()

    if not isinstance(data, dict):
        raise SystemExit('channel must be a JSON object')
    if not isinstance(data.get('transitions', []), list):
        raise SystemExit('channel "transitions" must be a JSON array')
    return Channel.from_json(data)


def load_channel(path_or_file):
    '''Read and validate a channel file.

    :param path_or_file: path or open text file.

    :return: validated channel.
    :rtype: :class:`zecap.channel.Channel`

    :raise zecap.errors.ChannelError: see :func:`zecap.channel.validate`.
    '''
    ch = read_channel(path_or_file)
    if not ch.name:
        name = getattr(path_or_file, 'name', path_or_file)
        if isinstance(name, str) and not name.startswith('<'):
            ch.name = name
    ch = validate(ch)
    logger.debug('loaded %r', ch)
    return ch


def channel_to_json(ch):
    '''JSON structure of the channel, see :meth:`Channel.to_json`.'''
    return ch.to_json()


def dump_channel(ch, path_or_file):
    '''Write the channel file, sorted keys and 2 spaces indentation.'''
    out_file, owned = _open(path_or_file, 'w')
    try:
        json.dump(channel_to_json(ch), out_file, sort_keys=True, indent=2)
        out_file.write('\n')
    finally:
        if owned:
            out_file.close()


def add_arguments(ap):
    ap.add_argument('channel', type=argparse.FileType('r'), nargs='?',
                    help='The channel JSON file. Defaults to stdin.',
                    default=sys.stdin)


def handle_command(args, out=None):
    '''Print the channel summary, or the list of violations.

    :return: exit code, ``0`` if valid, ``1`` otherwise.
    '''
    out = out or sys.stdout
    ch = read_channel(args.channel)
    violations = check_channel(ch)
    if violations:
        json.dump({'errors': [v.to_dict() for v in violations]}, out,
                  sort_keys=True, indent=2)
        out.write('\n')
        return 1

    ch = validate(ch)
    summary = {
        'name': ch.name,
        'states': list(ch.states),
        'inputs': list(ch.inputs),
        'outputs': list(ch.outputs),
        'support_only': ch.support_only,
        'transitions': len(ch.transitions),
    }
    json.dump(summary, out, sort_keys=True, indent=2)
    out.write('\n')
    return 0
