'''
Reports
=======

Helpers shared by the command line handlers to print structured text
(JSON) and CSV. Every float is printed with 12 significant digits so
outputs compare byte by byte across platforms.

>>> round_floats({'a': [1 / 3, 2], 'b': (0.5, None)})
{'a': [0.333333333333, 2], 'b': [0.5, None]}
>>> fmt_float(2 ** 0.5)
'1.41421356237'

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = ('SIGNIFICANT_DIGITS', 'fmt_float', 'round_floats', 'dump_report')

import json

import numpy as np

SIGNIFICANT_DIGITS = 12


def fmt_float(v):
    return '%.*g' % (SIGNIFICANT_DIGITS, v)


def round_floats(obj):
    '''Recursively round floats (and numpy scalars/arrays) for output.'''
    if isinstance(obj, np.ndarray):
        return round_floats(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(fmt_float(obj))
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def dump_report(data, out):
    '''Write ``data`` as JSON, sorted keys, 2 spaces indentation.'''
    json.dump(round_floats(data), out, sort_keys=True, indent=2)
    out.write('\n')
