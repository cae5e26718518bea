#!/usr/bin/env python3

'''
Run configuration: environment defaults, the per-command RunConfig and
timing stats.
'''

from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
import logging
import os
import time
from typing import (
    Any,
    Mapping,
    Optional,
    Sequence,
)

from .errors import DepthExceededError, PreconditionError

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


MAX_LEAVES = int(os.getenv('TREE_DIM_MAX_LEAVES', '4096'))
MAX_DEPTH_OVERRIDE = os.getenv('TREE_DIM_MAX_DEPTH')
SEARCH_BOUND = int(os.getenv('TREE_DIM_SEARCH_BOUND', '8'))
ENUMERATION_LIMIT = int(os.getenv('TREE_DIM_ENUMERATION_LIMIT', '1000000'))
SEED = int(os.getenv('TREE_DIM_SEED', '0'))

COMMANDS = [
    'dim',
    'rist',
    'evidence',
    'ineq',
    'lift',
    'ncrep',
    'matcheck',
    'maxvn',
    'center',
    'law',
    'branchscan',
]

# parameters each command cannot run without; `source` is --group or
# --automaton
REQUIRED_PARAMS = {
    'dim': ['source', 'depth'],
    'rist': ['source', 'depth', 'level'],
    'evidence': ['source', 'n_max', 'margin'],
    'ineq': ['source', 'depth'],
    'lift': ['source', 'depth', 'level'],
    'ncrep': ['source', 'depth', 'n'],
    'matcheck': ['file'],
    'maxvn': ['prime', 'degree'],
    'center': ['source', 'depth'],
    'law': ['source', 'depth', 'word'],
    'branchscan': ['source', 'level', 'margin'],
}


def max_depth_for(degrees: Sequence[int]) -> int:
    '''
    Largest supported truncation depth for a branching sequence: the
    deepest level whose size stays within TREE_DIM_MAX_LEAVES, unless
    TREE_DIM_MAX_DEPTH overrides it.

    >>> max_depth_for([2] * 20)
    12
    >>> max_depth_for([3] * 20)
    7
    '''
    if MAX_DEPTH_OVERRIDE is not None:
        return int(MAX_DEPTH_OVERRIDE)

    depth, size = 0, 1
    for m in degrees:
        if size * m > MAX_LEAVES:
            break
        size *= m
        depth += 1
    return depth


@dataclass
class RunStats:
    command: str
    time: float = None

    @contextmanager
    def measure(self):
        t0 = time.time()
        yield
        self.time = time.time() - t0


@dataclass
class RunConfig:
    command: str
    group: Optional[str] = None
    automaton: Optional[str] = None
    branching: int = 2
    prime: Optional[int] = None
    depth: Optional[int] = None
    level: Optional[int] = None
    n: Optional[int] = None
    n_max: Optional[int] = None
    margin: Optional[int] = None
    vertex: str = ''
    word: Optional[str] = None
    method: str = 'lifting'
    file: Optional[str] = None
    degree: Optional[int] = None
    output: Optional[str] = None
    format: str = 'table'
    search_bound: int = SEARCH_BOUND
    seed: int = SEED
    extra: Mapping[str, Any] = field(default_factory=dict)

    @classmethod
    def from_args(cls, args) -> 'RunConfig':
        '''
        Builds the config from an argparse namespace, ignoring attributes
        the command does not declare.
        '''
        names = cls.__dataclass_fields__.keys()
        values = {
            k: v for k, v in vars(args).items()
            if k in names and v is not None
        }
        return cls(**values)

    def validate(self):
        '''
        Checks that every parameter the command requires is present.
        '''
        if self.command not in REQUIRED_PARAMS:
            raise PreconditionError(f'Unknown command {self.command!r}')

        for param in REQUIRED_PARAMS[self.command]:
            if param == 'source':
                if bool(self.group) == bool(self.automaton):
                    raise PreconditionError(
                        f'{self.command}: exactly one of --group or '
                        '--automaton is required')
            elif getattr(self, param) is None:
                flag = '--' + param.replace('_', '-')
                raise PreconditionError(f'{self.command}: {flag} is required')

        if self.format not in ('table', 'record'):
            raise PreconditionError(f'Unknown output format {self.format!r}')
        if self.search_bound < 1:
            raise PreconditionError('--search-bound must be positive')

        return self

    def check_depth(self, degrees: Sequence[int], depth: int):
        '''
        Raises DepthExceededError when depth goes past the configured maximum
        for the given branching sequence.
        '''
        limit = max_depth_for(degrees)
        if depth > limit:
            raise DepthExceededError(
                f'depth {depth} exceeds the configured maximum {limit} '
                f'(TREE_DIM_MAX_LEAVES={MAX_LEAVES})')

    def echo(self) -> Mapping[str, Any]:
        '''
        The config record embedded in every output. `depth`, `margin` and
        `search_bound` are always present.
        '''
        record = asdict(self)
        record.pop('extra')
        record.update(self.extra)
        return {k: v for k, v in sorted(record.items())}
