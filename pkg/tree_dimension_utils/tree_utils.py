#!/usr/bin/env python3

'''
Bounded spherically homogeneous rooted trees and their automorphisms.

Vertices are tuples of 0-based digits, the root being the empty tuple, and
the vertices of a level are ordered lexicographically. An automorphism
truncated at depth d is a Portrait: one permutation label per vertex above
level d. Automorphisms act on the right, so compose(g, h) applies g and
then h, and its label at v is label_g(v) followed by label_h(v^g).
'''

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import logging
import math
import os
import re
from typing import (
    Iterable,
    Iterator,
    List,
    Mapping,
    NamedTuple,
    Sequence,
    Tuple,
)

from .errors import DepthExceededError, FormatError, IncompatibleError
from .perm_utils import (
    Perm,
    check_perm,
    format_perm,
    identity_perm,
    is_identity,
    parse_perm,
    perm_inv,
    perm_mul,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


Vertex = Tuple[int, ...]
ROOT_SYMBOL = 'ε'


@dataclass(frozen=True)
class TreeShape:
    '''
    Branching sequence (m_0, m_1, ...) of a bounded rooted tree, one entry
    per level; its length is the deepest supported level.

    >>> shape = TreeShape((2, 3))
    >>> [shape.level_size(n) for n in range(3)]
    [1, 2, 6]
    '''
    degrees: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'degrees', tuple(self.degrees))
        for m in self.degrees:
            if not isinstance(m, int) or m < 2:
                raise ValueError(
                    f'degrees must be integers >= 2, got {self.degrees}')

    @classmethod
    def constant(cls, m: int, depth: int) -> 'TreeShape':
        return cls((m,) * depth)

    @property
    def max_depth(self) -> int:
        return len(self.degrees)

    @property
    def bound(self) -> int:
        return max(self.degrees, default=0)

    def degree(self, level: int) -> int:
        return self.degrees[level]

    def level_size(self, n: int) -> int:
        self.check_depth(n)
        return math.prod(self.degrees[:n])

    def check_depth(self, n: int):
        if not 0 <= n <= self.max_depth:
            raise DepthExceededError(
                f'level {n} outside 0..{self.max_depth} for shape '
                f'{format_shape(self)}')

    def truncate(self, depth: int) -> 'TreeShape':
        self.check_depth(depth)
        return TreeShape(self.degrees[:depth])

    def subshape(self, level: int) -> 'TreeShape':
        '''
        Shape of the subtree hanging from a vertex at the given level.
        '''
        self.check_depth(level)
        return TreeShape(self.degrees[level:])

    def vertices(self, n: int) -> List[Vertex]:
        '''
        Vertices of level n in lexicographic order.

        >>> TreeShape((2, 2)).vertices(2)
        [(0, 0), (0, 1), (1, 0), (1, 1)]
        '''
        self.check_depth(n)
        return list(itertools.product(*(range(m) for m in self.degrees[:n])))

    def check_vertex(self, v: Sequence[int]) -> Vertex:
        v = tuple(v)
        self.check_depth(len(v))
        for k, digit in enumerate(v):
            if not 0 <= digit < self.degrees[k]:
                raise ValueError(
                    f'digit {digit} at level {k} of {format_vertex(v)} is '
                    f'outside 0..{self.degrees[k] - 1}')
        return v

    def vertex_index(self, v: Sequence[int]) -> int:
        '''
        Position of v in the lexicographic order of its level.

        >>> TreeShape((2, 3)).vertex_index((1, 2))
        5
        '''
        index = 0
        for k, digit in enumerate(self.check_vertex(v)):
            index = index * self.degrees[k] + digit
        return index

    def vertex_at(self, n: int, index: int) -> Vertex:
        digits = []
        for m in reversed(self.degrees[:n]):
            index, digit = divmod(index, m)
            digits.append(digit)
        return tuple(reversed(digits))

    def leaf_block(self, v: Sequence[int], depth: int) -> range:
        '''
        Indices of the level-depth vertices below v.

        >>> TreeShape((2, 2, 2)).leaf_block((1,), 3)
        range(4, 8)
        '''
        v = self.check_vertex(v)
        size = self.level_size(depth) // self.level_size(len(v))
        start = self.vertex_index(v) * size
        return range(start, start + size)


def format_shape(shape: TreeShape) -> str:
    return ','.join(str(m) for m in shape.degrees)


def parse_shape(text: str) -> TreeShape:
    try:
        return TreeShape(tuple(int(m) for m in text.split(',') if m.strip()))
    except ValueError as e:
        raise FormatError(f'Invalid shape {text!r}: {e}') from e


def format_vertex(v: Sequence[int]) -> str:
    '''
    >>> format_vertex(())
    'ε'
    >>> format_vertex((0, 1, 1))
    '011'
    '''
    if not v:
        return ROOT_SYMBOL
    if all(d < 10 for d in v):
        return ''.join(str(d) for d in v)
    return '.'.join(str(d) for d in v)


def parse_vertex(text: str) -> Vertex:
    '''
    >>> parse_vertex('ε')
    ()
    >>> parse_vertex('101')
    (1, 0, 1)
    >>> parse_vertex('10.2')
    (10, 2)
    '''
    text = text.strip()
    if text in ('', ROOT_SYMBOL):
        return ()
    if not re.fullmatch(r'\d+(\.\d+)*', text):
        raise FormatError(f'Invalid vertex {text!r}')
    if '.' in text:
        return tuple(int(d) for d in text.split('.'))
    return tuple(int(d) for d in text)


@dataclass(frozen=True)
class Portrait:
    '''
    Depth-d tree automorphism: levels[k][i] is the label of the i-th
    level-k vertex, a permutation of degree m_k. The shape is cut to the
    portrait's depth.
    '''
    shape: TreeShape
    depth: int
    levels: Tuple[Tuple[Perm, ...], ...] = field(repr=False)

    def __post_init__(self):
        self.shape.check_depth(self.depth)
        object.__setattr__(self, 'shape', self.shape.truncate(self.depth))
        levels = tuple(tuple(tuple(p) for p in level) for level in self.levels)
        object.__setattr__(self, 'levels', levels)

        if len(levels) != self.depth:
            raise ValueError(
                f'expected {self.depth} levels of labels, got {len(levels)}')
        for k, level in enumerate(levels):
            if len(level) != self.shape.level_size(k):
                raise ValueError(
                    f'level {k} needs {self.shape.level_size(k)} labels, '
                    f'got {len(level)}')
            for p in level:
                check_perm(p, self.shape.degree(k))

    @classmethod
    def identity(cls, shape: TreeShape, depth: int) -> 'Portrait':
        return cls(shape, depth, tuple(
            (identity_perm(shape.degree(k)),) * shape.level_size(k)
            for k in range(depth)
        ))

    @classmethod
    def from_labels(
        cls,
        shape: TreeShape,
        depth: int,
        labels: Mapping[Vertex, Sequence[int]],
    ) -> 'Portrait':
        '''
        Builds a portrait from the labels of some vertices; every other
        vertex is labelled by the identity.
        '''
        levels = [
            [identity_perm(shape.degree(k))] * shape.level_size(k)
            for k in range(depth)
        ]
        for v, p in labels.items():
            v = shape.check_vertex(v)
            if len(v) >= depth:
                raise DepthExceededError(
                    f'vertex {format_vertex(v)} is not above depth {depth}')
            levels[len(v)][shape.vertex_index(v)] = tuple(p)
        return cls(shape, depth, tuple(tuple(level) for level in levels))

    def label(self, v: Sequence[int]) -> Perm:
        v = self.shape.check_vertex(v)
        if len(v) >= self.depth:
            raise DepthExceededError(
                f'vertex {format_vertex(v)} is not above depth {self.depth}')
        return self.levels[len(v)][self.shape.vertex_index(v)]

    def labels(self) -> Iterator[Tuple[Vertex, Perm]]:
        '''
        Yields (vertex, label) for every non-identity label, level by level.
        '''
        for k, level in enumerate(self.levels):
            for i, p in enumerate(level):
                if not is_identity(p):
                    yield self.shape.vertex_at(k, i), p

    def is_identity(self) -> bool:
        return all(is_identity(p) for level in self.levels for p in level)

    @cached_property
    def level_perms(self) -> Tuple[Perm, ...]:
        '''
        Permutations induced on each level 0..depth, in lexicographic
        vertex order.
        '''
        perms = [(0,)]
        for k, level in enumerate(self.levels):
            m = self.shape.degree(k)
            upper = perms[-1]
            perms.append(tuple(
                upper[i] * m + level[i][x]
                for i in range(len(upper))
                for x in range(m)
            ))
        return tuple(perms)

    def level_perm(self, n: int) -> Perm:
        if not 0 <= n <= self.depth:
            raise DepthExceededError(
                f'level {n} outside 0..{self.depth}')
        return self.level_perms[n]

    @property
    def leaf_perm(self) -> Perm:
        return self.level_perms[self.depth]


def from_level_perm(shape: TreeShape, n: int, perm: Sequence[int]) -> Portrait:
    '''
    The depth-n portrait inducing perm on level n. perm must preserve the
    tree structure (it must come from a tree automorphism).

    >>> g = from_level_perm(TreeShape((2, 2)), 2, (2, 3, 1, 0))
    >>> g.label(()), g.label((0,)), g.label((1,))
    ((1, 0), (0, 1), (1, 0))
    '''
    perm = tuple(perm)
    size = shape.level_size(n)
    if len(perm) != size:
        raise ValueError(
            f'expected a permutation of the {size} level-{n} vertices')

    levels = []
    for k in range(n):
        m = shape.degree(k)
        below = size // shape.level_size(k + 1)
        level = []
        for i in range(shape.level_size(k)):
            level.append(tuple(
                (perm[(i * m + x) * below] // below) % m for x in range(m)))
        levels.append(tuple(level))

    g = Portrait(shape, n, tuple(levels))
    if g.level_perms[n] != perm:
        raise ValueError('permutation does not preserve the tree structure')
    return g


def check_compatible(g: Portrait, h: Portrait):
    if g.depth != h.depth or g.shape != h.shape:
        raise IncompatibleError(
            f'portraits on shapes {format_shape(g.shape)} (depth {g.depth}) '
            f'and {format_shape(h.shape)} (depth {h.depth}) cannot be combined')


def act(g: Portrait, v: Sequence[int]) -> Vertex:
    '''
    Image v^g: each digit is moved by the label found at the original
    prefix above it.

    >>> a = Portrait.from_labels(TreeShape((2, 2)), 2, {(): (1, 0)})
    >>> act(a, (0, 1))
    (1, 1)
    '''
    v = tuple(v)
    if len(v) > g.depth:
        raise DepthExceededError(
            f'vertex {format_vertex(v)} is deeper than depth {g.depth}')
    v = g.shape.check_vertex(v)

    image = []
    index = 0
    for k, digit in enumerate(v):
        image.append(g.levels[k][index][digit])
        index = index * g.shape.degree(k) + digit
    return tuple(image)


def compose(g: Portrait, h: Portrait) -> Portrait:
    '''
    Applies g, then h.
    '''
    check_compatible(g, h)
    levels = []
    for k in range(g.depth):
        moved = g.level_perms[k]
        levels.append(tuple(
            perm_mul(p, h.levels[k][moved[i]])
            for i, p in enumerate(g.levels[k])
        ))
    return Portrait(g.shape, g.depth, tuple(levels))


def compose_all(portraits: Iterable[Portrait], shape: TreeShape, depth: int):
    result = Portrait.identity(shape, depth)
    for g in portraits:
        result = compose(result, g)
    return result


def invert(g: Portrait) -> Portrait:
    levels = []
    for k in range(g.depth):
        moved = g.level_perms[k]
        level = [None] * len(g.levels[k])
        for i, p in enumerate(g.levels[k]):
            level[moved[i]] = perm_inv(p)
        levels.append(tuple(level))
    return Portrait(g.shape, g.depth, tuple(levels))


def truncate(g: Portrait, depth: int) -> Portrait:
    if depth > g.depth:
        raise DepthExceededError(
            f'cannot truncate depth {g.depth} portrait to depth {depth}')
    return Portrait(g.shape, depth, g.levels[:depth])


def section(g: Portrait, v: Sequence[int]) -> Portrait:
    '''
    The section g|_v, a portrait of depth d - |v| on the subtree below v.
    '''
    v = tuple(v)
    if len(v) >= g.depth:
        raise DepthExceededError(
            f'no section at {format_vertex(v)} for depth {g.depth}')
    v = g.shape.check_vertex(v)

    level = len(v)
    index = g.shape.vertex_index(v)
    subshape = g.shape.subshape(level)
    levels = []
    for j in range(g.depth - level):
        width = subshape.level_size(j)
        levels.append(g.levels[level + j][index * width:(index + 1) * width])
    return Portrait(subshape, g.depth - level, tuple(levels))


class PsiDecomposition(NamedTuple):
    sections: Tuple[Portrait, ...]
    top: Perm


def psi_decompose(g: Portrait, k: int) -> PsiDecomposition:
    '''
    Sections at all level-k vertices, in lexicographic order, and the
    permutation induced on level k.
    '''
    if k > g.depth:
        raise DepthExceededError(f'level {k} is deeper than depth {g.depth}')

    subshape = g.shape.subshape(k)
    sections = []
    for i in range(g.shape.level_size(k)):
        levels = []
        for j in range(g.depth - k):
            width = subshape.level_size(j)
            levels.append(g.levels[k + j][i * width:(i + 1) * width])
        sections.append(Portrait(subshape, g.depth - k, tuple(levels)))
    return PsiDecomposition(tuple(sections), g.level_perms[k])


def psi_assemble(
    shape: TreeShape,
    sections: Sequence[Portrait],
    top: Sequence[int],
) -> Portrait:
    '''
    Inverse of psi_decompose. shape is the shape of the whole tree.
    '''
    count = len(sections)
    k = 0
    while shape.level_size(k) < count:
        k += 1
    if shape.level_size(k) != count:
        raise IncompatibleError(f'{count} sections do not fill a level')

    subdepth = sections[0].depth
    subshape = shape.subshape(k).truncate(subdepth)
    for s in sections:
        if s.depth != subdepth or s.shape != subshape:
            raise IncompatibleError('sections differ in shape or depth')

    upper = from_level_perm(shape, k, top).levels
    lower = tuple(
        tuple(p for s in sections for p in s.levels[j])
        for j in range(subdepth)
    )
    return Portrait(shape, k + subdepth, upper + lower)


def dump_portrait(g: Portrait, header: bool = True) -> str:
    '''
    Text form: `shape:` and `depth:` headers, then `v -> p` for each
    non-identity label.

    >>> g = Portrait.from_labels(TreeShape((2, 2)), 2, {(1,): (1, 0)})
    >>> print(dump_portrait(g))
    shape: 2,2
    depth: 2
    1 -> 1,0
    '''
    lines = []
    if header:
        lines += [f'shape: {format_shape(g.shape)}', f'depth: {g.depth}']
    lines += [f'{format_vertex(v)} -> {format_perm(p)}' for v, p in g.labels()]
    return '\n'.join(lines)


LABEL_RX = re.compile(r'^\s*(?P<vertex>\S+)\s*->\s*(?P<perm>[\d,\s]+)$')


def parse_portrait_labels(
    lines: Iterable[str],
    shape: TreeShape,
    depth: int,
) -> Portrait:
    labels = {}
    for line in lines:
        m = LABEL_RX.match(line)
        if not m:
            raise FormatError(f'Invalid portrait label line {line!r}')
        v = parse_vertex(m.group('vertex'))
        if len(v) >= depth:
            raise FormatError(
                f'vertex {format_vertex(v)} is not above depth {depth}')
        labels[v] = parse_perm(m.group('perm'), shape.degree(len(v)))
    try:
        return Portrait.from_labels(shape, depth, labels)
    except ValueError as e:
        raise FormatError(str(e)) from e


def load_portrait(text: str) -> Portrait:
    '''
    Parses the output of dump_portrait.
    '''
    shape, depth, body = None, None, []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if line.startswith('shape:'):
            shape = parse_shape(line.partition(':')[2])
        elif line.startswith('depth:'):
            try:
                depth = int(line.partition(':')[2])
            except ValueError as e:
                raise FormatError(f'Invalid depth line {line!r}') from e
        else:
            body.append(line)

    if shape is None or depth is None:
        raise FormatError('portrait needs `shape:` and `depth:` headers')
    if depth > shape.max_depth:
        raise FormatError(f'depth {depth} exceeds the shape length')
    return parse_portrait_labels(body, shape, depth)
