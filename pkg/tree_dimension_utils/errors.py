#!/usr/bin/env python3

'''
Exceptions raised by the tree dimension utils.

Each class carries the exit code the command-line interface returns when
it escapes a command.
'''


class TreeDimensionError(Exception):
    exit_code = 1


class PreconditionError(TreeDimensionError, ValueError):
    exit_code = 2


class DepthExceededError(PreconditionError):
    pass


class IncompatibleError(PreconditionError):
    pass


class DefinitionError(PreconditionError):
    pass


class NonMemberError(PreconditionError):
    pass


class HypothesisError(PreconditionError):
    pass


class MissingConjugatorError(HypothesisError):
    pass


class InapplicableError(PreconditionError):
    pass


class NotAUnitError(PreconditionError):
    pass


class SearchExhaustedError(TreeDimensionError):
    '''
    A bounded search finished without a result.

    Args:
    - message: what was searched for
    - bound: the bound that was exhausted
    '''
    exit_code = 3

    def __init__(self, message, bound=None):
        if bound is not None:
            message = f'{message} (search bound = {bound})'
        super().__init__(message)
        self.bound = bound


class BudgetExceededError(TreeDimensionError):
    exit_code = 4


class FormatError(TreeDimensionError):
    exit_code = 5


def exit_code_for(exc: BaseException) -> int:
    '''
    Maps an exception to the CLI exit status.

    >>> exit_code_for(MissingConjugatorError('no conjugators'))
    2
    >>> exit_code_for(FileNotFoundError('x.rep'))
    5
    '''
    if isinstance(exc, TreeDimensionError):
        return exc.exit_code
    if isinstance(exc, OSError):
        return 5
    return 1
