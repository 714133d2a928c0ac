'''
Errors
======

All errors raised by :mod:`zecap` derive from :exc:`ZecapError`. Each
carries the fields that identify the failure and can be converted to a
plain JSON-serializeable dict with :meth:`ZecapError.to_dict`, shaped
like a GraphQL error: ``{"message": "...", "code": "..."}`` plus the
extra fields.

>>> err = MissingInputRow('s0', 'x1')
>>> err.to_dict() == {'message': 'no transition for state s0, input x1',
...                   'code': 'MissingInputRow', 's': 's0', 'x': 'x1'}
True

:license: ISC
'''

__docformat__ = 'reStructuredText en'

__all__ = (
    'ZecapError', 'ChannelError', 'EmptyAlphabet', 'UnknownSymbol',
    'MissingInputRow', 'BadProbabilitySum', 'NonPositiveWeight',
    'DuplicateEntry', 'DuplicateSymbol', 'MixedWeights', 'NotSingleState',
    'LpError', 'Infeasible', 'Unbounded', 'IterationCapExceeded',
    'NumericalFailure', 'AlphabetTooLarge', 'Overflow',
    'IterationOutOfRange', 'SearchBudgetExceeded',
    'CleanupBudgetExceeded', 'HorizonOutOfRange', 'TooManyMessages',
)


class ZecapError(Exception):
    '''Base class of every error reported by the package.

    Subclasses declare ``fields``, the names of the constructor
    arguments, and ``template``, used to build the message.
    '''

    fields = ()
    template = ''

    def __init__(self, *args):
        if len(args) != len(self.fields):
            raise TypeError('%s expects %d arguments (%s), got %d' % (
                self.__class__.__name__, len(self.fields),
                ', '.join(self.fields), len(args)))
        self.values = dict(zip(self.fields, args))
        super().__init__(self.template.format(**self.values))

    def __getattr__(self, name):
        try:
            return self.__dict__['values'][name]
        except KeyError as exc:
            raise AttributeError(name) from exc

    @property
    def message(self):
        return str(self)

    @property
    def code(self):
        return self.__class__.__name__

    def to_dict(self):
        '''Convert to ``{"message": ..., "code": ..., **fields}``.'''
        d = {'message': self.message, 'code': self.code}
        d.update(self.values)
        return d


class ChannelError(ZecapError):
    '''Problems with a channel description.

    :func:`zecap.channel.validate` collects every violation and raises
    the first one, with the whole list in ``violations``.
    '''

    violations = ()


class EmptyAlphabet(ChannelError):
    fields = ('alphabet',)
    template = 'alphabet {alphabet} is empty'


class UnknownSymbol(ChannelError):
    fields = ('alphabet', 'symbol', 'entry')
    template = 'entry #{entry}: {symbol!r} is not in {alphabet}'


class MissingInputRow(ChannelError):
    fields = ('s', 'x')
    template = 'no transition for state {s}, input {x}'


class BadProbabilitySum(ChannelError):
    fields = ('s', 'x', 'total')
    template = 'probabilities for state {s}, input {x} sum to {total!r}'


class NonPositiveWeight(ChannelError):
    fields = ('s', 'x', 'y', 's_next', 'p')
    template = ('transition ({s}, {x}, {y}, {s_next}) has '
                'non-positive probability {p!r}')


class DuplicateEntry(ChannelError):
    fields = ('s', 'x', 'y', 's_next')
    template = 'transition ({s}, {x}, {y}, {s_next}) is given twice'


class MixedWeights(ChannelError):
    fields = ('with_p', 'without_p')
    template = ('{with_p} transitions have "p" and {without_p} do not: '
                'give all probabilities or none')


class NotSingleState(ChannelError):
    fields = ('states',)
    template = 'a DMC has exactly one state, channel has {states}'


class LpError(ZecapError):
    '''Linear program could not be solved.'''


class Infeasible(LpError):
    fields = ('residual',)
    template = 'linear program is infeasible (phase 1 residual {residual!r})'


class Unbounded(LpError):
    fields = ('column',)
    template = 'linear program is unbounded along column {column}'


class IterationCapExceeded(LpError):
    fields = ('iterations',)
    template = 'simplex did not finish within {iterations} pivots'


NumericalFailure = IterationCapExceeded


class AlphabetTooLarge(ZecapError):
    fields = ('size', 'limit')
    template = 'input alphabet of size {size} exceeds the limit {limit}'


class Overflow(ZecapError):
    fields = ('n', 'value')
    template = 'W at iteration {n} is 2**{value!r}, not representable'


class IterationOutOfRange(ZecapError):
    fields = ('n', 'available')
    template = 'iteration {n} is not in the trace (need 2..{available})'


class SearchBudgetExceeded(ZecapError):
    fields = ('what', 'budget')
    template = 'search exceeded its budget of {budget} {what}'


class CleanupBudgetExceeded(ZecapError):
    fields = ('residual', 'stages', 'budget')
    template = ('cleanup of {residual} messages took {stages} stages, '
                'more than the {budget} allowed')


class DuplicateSymbol(ChannelError):
    fields = ('alphabet', 'symbol')
    template = '{symbol!r} appears more than once in {alphabet}'


class HorizonOutOfRange(ZecapError, ValueError):
    fields = ('horizon', 'limit')
    template = 'horizon must be in 0..{limit}, got {horizon!r}'


class TooManyMessages(ZecapError, ValueError):
    fields = ('count', 'state')
    template = ('no zero-error code for {count} messages: two messages '
                'cannot be told apart from state {state}')
