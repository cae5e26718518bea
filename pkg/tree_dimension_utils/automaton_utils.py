#!/usr/bin/env python3

'''
Groups acting on rooted trees: self-similar automaton definitions, levelwise
definitions of the full and Sylow iterated wreath products, the catalog of
test groups and the TreeGroup truncations they unfold to.
'''

from dataclasses import dataclass, field
from functools import cached_property
import json
import logging
import os
from pathlib import Path
from typing import (
    Any,
    Dict,
    Mapping,
    NamedTuple,
    Sequence,
    Tuple,
    Union,
)

from sympy import isprime

from .errors import DefinitionError, DepthExceededError, FormatError
from .perm_utils import (
    Perm,
    PermGroup,
    check_perm,
    identity_perm,
    is_identity,
    parse_perm,
)
from .tree_utils import (
    Portrait,
    TreeShape,
    format_shape,
    from_level_perm,
    truncate,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


IDENTITY_STATE = 'e'

CATALOG_NAMES = [
    'full',
    'sylow_p',
    'odometer',
    'grigorchuk',
    'gupta_sidki_3',
    'abelian_diagonal',
]


@dataclass(frozen=True)
class TreeGroup:
    '''
    Subgroup of the automorphisms of a truncated tree, given by generator
    portraits of a common shape and depth.
    '''
    shape: TreeShape
    depth: int
    generators: Tuple[Portrait, ...]
    names: Tuple[str, ...] = ()
    label: str = 'group'
    _groups: Dict[int, PermGroup] = field(
        default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self):
        self.shape.check_depth(self.depth)
        object.__setattr__(self, 'shape', self.shape.truncate(self.depth))
        object.__setattr__(self, 'generators', tuple(self.generators))
        if not self.names:
            object.__setattr__(self, 'names', tuple(
                f'g{i}' for i in range(len(self.generators))))
        if len(self.names) != len(self.generators):
            raise DefinitionError('one name per generator is required')
        for g in self.generators:
            if g.depth != self.depth or g.shape != self.shape:
                raise DefinitionError(
                    'generators must share the group shape and depth')

    @classmethod
    def from_level_perms(
        cls,
        shape: TreeShape,
        depth: int,
        perms: Sequence[Sequence[int]],
        label: str = 'group',
    ) -> 'TreeGroup':
        '''
        Builds a group from permutations of the level-depth vertices,
        dropping identities and repeats.
        '''
        seen = set()
        generators = []
        for p in perms:
            p = tuple(p)
            if is_identity(p) or p in seen:
                continue
            seen.add(p)
            generators.append(from_level_perm(shape, depth, p))
        return cls(shape, depth, tuple(generators), label=label)

    @cached_property
    def leaf_perms(self) -> Tuple[Perm, ...]:
        return tuple(g.leaf_perm for g in self.generators)

    @property
    def leaf_count(self) -> int:
        return self.shape.level_size(self.depth)

    def level_group(self, n: int) -> PermGroup:
        '''
        Action of the generators on the level-n vertices.
        '''
        if not 0 <= n <= self.depth:
            raise DepthExceededError(
                f'level {n} outside 0..{self.depth} of {self.label}')
        if n not in self._groups:
            self._groups[n] = PermGroup(
                self.shape.level_size(n),
                [g.level_perm(n) for g in self.generators],
            )
        return self._groups[n]

    @property
    def leaf_group(self) -> PermGroup:
        return self.level_group(self.depth)

    def truncate(self, depth: int) -> 'TreeGroup':
        if depth > self.depth:
            raise DepthExceededError(
                f'{self.label} is only known to depth {self.depth}')
        return TreeGroup(
            self.shape,
            depth,
            tuple(truncate(g, depth) for g in self.generators),
            self.names,
            self.label,
        )

    def is_trivial(self) -> bool:
        return all(g.is_identity() for g in self.generators)


class State(NamedTuple):
    perm: Perm
    sections: Tuple[str, ...]


@dataclass(frozen=True)
class AutomatonGroup:
    '''
    Self-similar group over an alphabet of size degree: each state has a
    root permutation and one section per letter, naming a state or 'e'.

    Args:
    - name: label of the group
    - degree: alphabet size, the constant branching of the tree
    - states: {STATE_NAME: State}
    - generators: states generating the group (default: all of them)
    '''
    name: str
    degree: int
    states: Mapping[str, State]
    generators: Tuple[str, ...] = ()

    def __post_init__(self):
        if self.degree < 2:
            raise DefinitionError(f'degree must be >= 2, got {self.degree}')
        if IDENTITY_STATE in self.states:
            raise DefinitionError(f'{IDENTITY_STATE!r} is reserved')

        for state_name, state in self.states.items():
            try:
                check_perm(state.perm, self.degree)
            except ValueError as e:
                raise DefinitionError(
                    f'state {state_name}: {e}') from e
            if len(state.sections) != self.degree:
                raise DefinitionError(
                    f'state {state_name} needs {self.degree} sections')
            for s in state.sections:
                if s != IDENTITY_STATE and s not in self.states:
                    raise DefinitionError(
                        f'state {state_name} refers to undefined state {s!r}')

        generators = tuple(self.generators) or tuple(self.states)
        for g in generators:
            if g not in self.states:
                raise DefinitionError(f'undefined generator {g!r}')
        object.__setattr__(self, 'generators', generators)

    def shape(self, depth: int) -> TreeShape:
        return TreeShape.constant(self.degree, depth)

    def unfold_states(self, depth: int) -> Dict[str, Portrait]:
        '''
        Depth-d portraits of every state, the identity state included.

        A state at depth k carries its root permutation and, below child x,
        the depth k-1 portrait of its x-th section.
        '''
        shape = self.shape(depth)
        identity = identity_perm(self.degree)
        levels = {s: () for s in self.states}
        levels[IDENTITY_STATE] = ()

        for k in range(1, depth + 1):
            levels = {
                s: (
                    (identity if s == IDENTITY_STATE else self.states[s].perm,),
                ) + tuple(
                    tuple(
                        p
                        for child in self._sections(s)
                        for p in levels[child][j]
                    )
                    for j in range(k - 1)
                )
                for s in levels
            }

        return {
            s: Portrait(shape, depth, state_levels)
            for s, state_levels in levels.items()
        }

    def _sections(self, state: str) -> Tuple[str, ...]:
        if state == IDENTITY_STATE:
            return (IDENTITY_STATE,) * self.degree
        return self.states[state].sections

    def unfold(self, depth: int) -> TreeGroup:
        '''
        The truncation of the group at the given depth.
        '''
        portraits = self.unfold_states(depth)
        return TreeGroup(
            self.shape(depth),
            depth,
            tuple(portraits[g] for g in self.generators),
            self.generators,
            self.name,
        )


@dataclass(frozen=True)
class LevelwiseGroup:
    '''
    Group generated by fixed permutations placed at the leftmost vertex of
    every level: with (0 1) and an m-cycle it is the full iterated wreath
    product, with a p-cycle the Sylow p-subgroup.
    '''
    name: str
    degrees: Tuple[int, ...]
    labels: Tuple[Tuple[Perm, ...], ...]

    def shape(self, depth: int) -> TreeShape:
        if depth > len(self.degrees):
            raise DepthExceededError(
                f'{self.name} is defined to depth {len(self.degrees)}')
        return TreeShape(self.degrees[:depth])

    def unfold(self, depth: int) -> TreeGroup:
        shape = self.shape(depth)
        generators = []
        names = []
        for k in range(depth):
            for j, p in enumerate(self.labels[k]):
                generators.append(Portrait.from_labels(
                    shape, depth, {(0,) * k: p}))
                names.append(f'x{k}_{j}')
        return TreeGroup(shape, depth, tuple(generators), tuple(names),
                         self.name)


GroupDefinition = Union[AutomatonGroup, LevelwiseGroup]


def cycle(m: int) -> Perm:
    '''
    >>> cycle(3)
    (1, 2, 0)
    '''
    return tuple((i + 1) % m for i in range(m))


def transposition(m: int) -> Perm:
    return (1, 0) + tuple(range(2, m))


def full_group(degrees: Sequence[int]) -> LevelwiseGroup:
    labels = []
    for m in degrees:
        gens = [transposition(m)]
        if cycle(m) != transposition(m):
            gens.append(cycle(m))
        labels.append(tuple(gens))
    return LevelwiseGroup('full', tuple(degrees), tuple(labels))


def sylow_group(p: int, depth: int) -> LevelwiseGroup:
    return LevelwiseGroup(
        f'sylow_{p}', (p,) * depth, ((cycle(p),),) * depth)


def catalog(
    name: str,
    branching: int = 2,
    max_depth: int = 16,
) -> GroupDefinition:
    '''
    Definition of a catalog group.

    Args:
    - name: one of CATALOG_NAMES
    - branching: tree degree for `full` and `sylow_p` (the prime p)
    - max_depth: deepest level the levelwise definitions cover

    >>> catalog('odometer').unfold(3).leaf_group.order()
    8
    '''
    if name == 'full':
        return full_group((branching,) * max_depth)

    if name == 'sylow_p':
        if not isprime(branching):
            raise DefinitionError(
                f'sylow_p needs a prime branching, got {branching}')
        return sylow_group(branching, max_depth)

    if name == 'odometer':
        return AutomatonGroup('odometer', 2, {
            'a': State((1, 0), ('e', 'a')),
        })

    if name == 'grigorchuk':
        return AutomatonGroup('grigorchuk', 2, {
            'a': State((1, 0), ('e', 'e')),
            'b': State((0, 1), ('a', 'c')),
            'c': State((0, 1), ('a', 'd')),
            'd': State((0, 1), ('e', 'b')),
        })

    if name == 'gupta_sidki_3':
        return AutomatonGroup('gupta_sidki_3', 3, {
            'a': State((1, 2, 0), ('e', 'e', 'e')),
            'A': State((2, 0, 1), ('e', 'e', 'e')),
            't': State((0, 1, 2), ('a', 'A', 't')),
        }, generators=('a', 't'))

    if name == 'abelian_diagonal':
        # d = a^3, so the group is the cyclic ternary adding machine
        return AutomatonGroup('abelian_diagonal', 3, {
            'a': State((1, 2, 0), ('e', 'e', 'a')),
            'd': State((0, 1, 2), ('a', 'a', 'a')),
        })

    raise DefinitionError(
        f'Unknown catalog group {name!r}; expected one of {CATALOG_NAMES}')


def parse_automaton(document: Mapping[str, Any]) -> AutomatonGroup:
    '''
    Builds an automaton from its document form:

        {
            "name": "odometer",
            "shape": [2],
            "states": {"a": {"perm": "1,0", "sections": ["e", "a"]}},
            "generators": ["a"]
        }

    `shape` is a constant degree given as an integer, a list or a
    comma-separated string; `perm` is one-line notation as a string or a
    list.
    '''
    try:
        shape = document['shape']
        raw_states = document['states']
        if isinstance(shape, str):
            shape = [int(m) for m in shape.split(',') if m.strip()]
        elif isinstance(shape, int):
            shape = [shape]
        degrees = {int(m) for m in shape}
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f'automaton needs `shape` and `states`: {e}') from e

    if len(degrees) != 1:
        raise DefinitionError(
            f'self-similar definitions need a constant degree, got {shape}')
    degree = degrees.pop()

    states = {}
    try:
        for state_name, state in raw_states.items():
            perm = state.get('perm', identity_perm(degree))
            if isinstance(perm, str):
                perm = parse_perm(perm)
            sections = state.get('sections', [IDENTITY_STATE] * degree)
            states[state_name] = State(
                tuple(int(x) for x in perm), tuple(sections))
        name = document.get('name', 'automaton')
        generators = tuple(document.get('generators', ()))
    except (AttributeError, TypeError, ValueError) as e:
        raise FormatError(f'malformed automaton states: {e}') from e

    return AutomatonGroup(name, degree, states, generators)


def load_automaton(path: Union[str, Path]) -> AutomatonGroup:
    '''
    Reads an automaton document (JSON) from disk.
    '''
    path = Path(path)
    LOGGER.info('Loading automaton from %s', path)
    try:
        document = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise FormatError(f'{path}: {e}') from e
    automaton = parse_automaton(document)
    LOGGER.debug(
        'Automaton %s: degree %s, states %s',
        automaton.name, automaton.degree, list(automaton.states))
    return automaton


def describe(group: TreeGroup) -> Mapping[str, Any]:
    return {
        'group': group.label,
        'shape': format_shape(group.shape),
        'depth': group.depth,
        'generators': list(group.names),
    }
