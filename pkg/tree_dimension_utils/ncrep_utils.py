#!/usr/bin/env python3

'''
Non-commuting representations of graphs: labellings f of the vertices by
group elements with f(v) f(w) != f(w) f(v) exactly on the edges.

Targets are tree portraits, matrices (see matrix_utils) or plain
permutations. The constructors build V_n, n disjoint edges, inside
truncated tree groups.
'''

from dataclasses import dataclass, field
import itertools
import logging
import os
import re
from typing import (
    Any,
    Callable,
    FrozenSet,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from .automaton_utils import TreeGroup
from .config_utils import SEARCH_BOUND
from .errors import (
    FormatError,
    HypothesisError,
    IncompatibleError,
    PreconditionError,
    SearchExhaustedError,
)
from .group_utils import rigid_level_stabilizer
from .lifting_utils import LiftWitness, tree_lifting
from .matrix_utils import (
    ExactMatrix,
    check_common,
    format_matrix,
    parse_matrix,
    parse_ring,
)
from .perm_utils import (
    Perm,
    commutator,
    commute,
    dedupe_generators,
    format_perm,
    is_identity,
    parse_perm,
    perm_mul,
)
from .tree_utils import (
    Portrait,
    Vertex,
    check_compatible,
    dump_portrait,
    format_shape,
    format_vertex,
    from_level_perm,
    parse_portrait_labels,
    parse_shape,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


POOL_LIMIT = 4096
EDGE_RX = re.compile(r'^(\d+)-(\d+)$')
VERTEX_RX = re.compile(r'^vertex\s+(?P<index>\d+)\s*:\s*(?P<body>.*)$')


@dataclass(frozen=True)
class Graph:
    '''
    Simple undirected graph on the vertices 0..size-1.

    >>> Graph.vn(2).edge_list()
    [(0, 1), (2, 3)]
    '''
    size: int
    edges: FrozenSet[Tuple[int, int]] = frozenset()

    def __post_init__(self):
        normalized = set()
        for i, j in self.edges:
            if i == j:
                raise PreconditionError(f'loop at vertex {i}')
            if not (0 <= i < self.size and 0 <= j < self.size):
                raise PreconditionError(
                    f'edge {i}-{j} outside 0..{self.size - 1}')
            normalized.add((min(i, j), max(i, j)))
        object.__setattr__(self, 'edges', frozenset(normalized))

    @classmethod
    def vn(cls, n: int) -> 'Graph':
        '''
        n disjoint edges: vertex 2i is a_{i+1}, vertex 2i+1 is b_{i+1}.
        '''
        return cls(2 * n, frozenset((2 * i, 2 * i + 1) for i in range(n)))

    def adjacent(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def edge_list(self) -> List[Tuple[int, int]]:
        return sorted(self.edges)


def target_of(labels: Sequence[Any]) -> str:
    kinds = set()
    for x in labels:
        if isinstance(x, Portrait):
            kinds.add('portrait')
        elif isinstance(x, ExactMatrix):
            kinds.add('matrix')
        elif isinstance(x, tuple):
            kinds.add('perm')
        else:
            raise IncompatibleError(f'unsupported label type {type(x)}')
    if len(kinds) > 1:
        raise IncompatibleError(f'labels of mixed targets: {sorted(kinds)}')
    return kinds.pop() if kinds else 'perm'


def labels_commute(x, y) -> bool:
    if isinstance(x, Portrait):
        check_compatible(x, y)
        return commute(x.leaf_perm, y.leaf_perm)
    if isinstance(x, ExactMatrix):
        return x.commutes(y)
    if len(x) != len(y):
        raise IncompatibleError('permutations of different degrees')
    return commute(x, y)


@dataclass
class NCRep:
    graph: Graph
    labels: List[Any]
    meta: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.labels) != self.graph.size:
            raise PreconditionError(
                f'{len(self.labels)} labels for {self.graph.size} vertices')

    @property
    def target(self) -> str:
        return target_of(self.labels)


@dataclass
class Verification:
    ok: bool
    violation: Optional[Tuple[int, int]] = None


def verify(rep: NCRep) -> Verification:
    '''
    Checks every vertex pair: adjacent exactly when the labels do not
    commute.

    >>> rep = NCRep(Graph.vn(1), [(1, 0, 2), (1, 2, 0)])
    >>> verify(rep).ok
    True
    '''
    target = rep.target
    if target == 'matrix':
        check_common(rep.labels)
    for i, j in itertools.combinations(range(rep.graph.size), 2):
        if labels_commute(rep.labels[i], rep.labels[j]) == \
                rep.graph.adjacent(i, j):
            LOGGER.debug('Representation fails at vertices %s, %s', i, j)
            return Verification(False, (i, j))
    return Verification(True)


def _word_search(
    seeds: Sequence[Perm],
    search_bound: int,
) -> Optional[Tuple[Perm, Perm]]:
    '''
    Products of seeds by increasing length up to search_bound, each new
    element checked against the earlier ones for a non-commuting pair.
    '''
    pool: List[Perm] = []
    seen = set()
    frontier: List[Perm] = []
    for length in range(1, search_bound + 1):
        if length == 1:
            candidates = list(seeds)
        else:
            candidates = [perm_mul(w, s) for w in frontier for s in seeds]
        next_frontier = []
        for x in candidates:
            if x in seen or is_identity(x):
                continue
            for y in pool:
                if not commute(x, y):
                    return y, x
            seen.add(x)
            pool.append(x)
            next_frontier.append(x)
            if len(pool) >= POOL_LIMIT:
                return None
        if not next_frontier:
            break
        frontier = next_frontier
    return None


def find_noncommuting_pair(
    generators: Sequence[Perm],
    search_bound: int = SEARCH_BOUND,
    member: Callable[[Perm], bool] = None,
    derived: bool = False,
) -> Optional[Tuple[Perm, Perm]]:
    '''
    Searches a group for two non-commuting elements.

    Without derived, words in the generators come first, then words in
    their commutators. With derived, the search stays inside the derived
    subgroup: commutators of generators first, then commutators of those
    with the generators. member filters the seeds of each phase.
    '''
    generators = dedupe_generators(generators)
    commutators = dedupe_generators(
        commutator(x, y) for x, y in itertools.combinations(generators, 2))
    if derived:
        phases = [
            commutators,
            dedupe_generators(
                commutator(c, g) for c in commutators for g in generators),
        ]
    else:
        phases = [generators, commutators]

    for seeds in phases:
        if member is not None:
            seeds = [s for s in seeds if member(s)]
        pair = _word_search(seeds, search_bound)
        if pair:
            return pair
    return None


@dataclass
class PairChoice:
    vertex: Vertex
    a: Perm
    b: Perm


def _choose_pairs(
    T: TreeGroup,
    n: int,
    search_bound: int,
    member: Callable[[Perm], bool] = None,
    derived: bool = False,
) -> Tuple[int, List[PairChoice], bool]:
    '''
    Shallowest level of T with n vertices whose rigid stabilizers hold a
    non-commuting pair, vertices in lexicographic order.

    Returns: (level, pairs, evidence)
    - evidence: whether some level had n nontrivial rigid stabilizers
    '''
    evidence = False
    for level in range(1, T.depth):
        rists = [r for r in rigid_level_stabilizer(T, level)
                 if not r.is_trivial()]
        if len(rists) < n:
            continue
        evidence = True
        pairs = []
        for r in rists:
            pair = find_noncommuting_pair(
                r.leaf_generators, search_bound, member, derived)
            if pair:
                pairs.append(PairChoice(r.vertex, *pair))
                LOGGER.debug(
                    'Non-commuting pair in rist(%s)', format_vertex(r.vertex))
            if len(pairs) == n:
                return level, pairs, evidence
    return None, [], evidence


def construct_vn_weakly_branch(
    G: TreeGroup,
    n: int,
    search_bound: int = SEARCH_BOUND,
) -> NCRep:
    '''
    V_n from non-commuting pairs in the rigid stabilizers of n distinct
    same-level vertices. Distinct rigid stabilizers of one level commute,
    so only the pairs themselves are edges.
    '''
    if n < 1:
        raise PreconditionError(f'n must be positive, got {n}')
    level, pairs, _ = _choose_pairs(G, n, search_bound)
    if not pairs:
        raise SearchExhaustedError(
            f'no level of {G.label} at depth {G.depth} has {n} rigid '
            'stabilizers with non-commuting pairs', bound=search_bound)

    labels = []
    for choice in pairs:
        labels += [from_level_perm(G.shape, G.depth, choice.a),
                   from_level_perm(G.shape, G.depth, choice.b)]
    rep = NCRep(Graph.vn(n), labels, {
        'method': 'weakly_branch',
        'level': level,
        'vertices': [format_vertex(c.vertex) for c in pairs],
    })
    assert verify(rep).ok, 'constructed labelling does not realize V_n'
    LOGGER.info('V_%s in %s from level-%s rigid stabilizers',
                n, G.label, level)
    return rep


def block_tree_group(G: TreeGroup, witness: LiftWitness, level: int):
    '''
    The block-0 group of a tree lifting as a group on the subtree below the
    all-zeros vertex.
    '''
    return TreeGroup.from_level_perms(
        G.shape.subshape(level),
        G.depth - level,
        witness.blocked.block_groups[0].generators,
        label=f'{G.label}@{format_vertex((0,) * level)}',
    )


def construct_vn_via_lifting(
    G: TreeGroup,
    n: int,
    level: int,
    search_bound: int = SEARCH_BOUND,
) -> NCRep:
    '''
    V_n through the lifting of St_G(level): non-commuting pairs a_i, b_i in
    rist_L(v_i)' inside N, for n vertices v_i below the all-zeros vertex,
    each lifted to (a, 1, ..., 1, b_1, ..., b_{k-i}) in St_G(level). The
    lifts commute exactly when their block-0 components do.
    '''
    if n < 1:
        raise PreconditionError(f'n must be positive, got {n}')
    witness = tree_lifting(G, level)
    L = block_tree_group(G, witness, level)

    sublevel, pairs, evidence = _choose_pairs(
        L, n, search_bound, member=witness.N.contains, derived=True)
    if not evidence:
        raise HypothesisError(
            f'the block projection {L.label} shows no level with {n} '
            'nontrivial rigid stabilizers')
    if not pairs:
        raise SearchExhaustedError(
            f'no {n} rigid stabilizers of {L.label} hold non-commuting '
            'pairs of N', bound=search_bound)

    labels = []
    for choice in pairs:
        for x in (choice.a, choice.b):
            g = witness.resolve(x)
            labels.append(from_level_perm(G.shape, G.depth, g))
            LOGGER.debug('Lifted %s to %s', format_perm(x), format_perm(g))

    rep = NCRep(Graph.vn(n), labels, {
        'method': 'lifting',
        'level': level,
        'index': witness.index,
        'sublevel': sublevel,
        'vertices': [format_vertex((0,) * level + c.vertex) for c in pairs],
    })
    assert verify(rep).ok, 'lifted labelling does not realize V_n'
    LOGGER.info(
        'V_%s in %s lifted from level %s (i = %s)',
        n, G.label, level, witness.index)
    return rep


def dump_ncrep(rep: NCRep) -> str:
    '''
    Text form: `graph:`, `edges:` and `target:` headers, then the target
    headers and one `vertex i:` entry per vertex.

    >>> print(dump_ncrep(NCRep(Graph.vn(1), [(1, 0, 2), (1, 2, 0)])))
    graph: 2
    edges: 0-1
    target: perm
    degree: 3
    vertex 0: 1,0,2
    vertex 1: 1,2,0
    '''
    target = rep.target
    lines = [
        f'graph: {rep.graph.size}',
        'edges: ' + ' '.join(f'{i}-{j}' for i, j in rep.graph.edge_list()),
        f'target: {target}',
    ]
    labels = rep.labels
    if target == 'portrait':
        lines += [f'shape: {format_shape(labels[0].shape)}',
                  f'depth: {labels[0].depth}']
        for i, g in enumerate(labels):
            lines.append(f'vertex {i}:')
            body = dump_portrait(g, header=False)
            lines += ['  ' + line for line in body.splitlines()]
    elif target == 'matrix':
        lines += [f'ring: {labels[0].ring.tag}',
                  f'degree: {labels[0].degree}']
        lines += [f'vertex {i}: {format_matrix(M)}'
                  for i, M in enumerate(labels)]
    else:
        lines.append(f'degree: {len(labels[0]) if labels else 0}')
        lines += [f'vertex {i}: {format_perm(p)}'
                  for i, p in enumerate(labels)]
    return '\n'.join(lines)


def load_ncrep(text: str) -> NCRep:
    '''
    Parses the output of dump_ncrep.
    '''
    headers = {}
    bodies: List[Tuple[int, List[str]]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith('#'):
            continue
        m = VERTEX_RX.match(line)
        if m:
            bodies.append((int(m.group('index')), []))
            if m.group('body'):
                bodies[-1][1].append(m.group('body'))
        elif bodies and raw[:1].isspace():
            bodies[-1][1].append(line)
        elif ':' in line:
            key, _, value = line.partition(':')
            headers[key.strip()] = value.strip()
        else:
            raise FormatError(f'Unexpected line {line!r}')

    try:
        size = int(headers['graph'])
        target = headers['target']
    except (KeyError, ValueError) as e:
        raise FormatError(
            f'representation needs `graph:` and `target:`: {e}') from e

    edges = set()
    for token in headers.get('edges', '').split():
        m = EDGE_RX.match(token)
        if not m:
            raise FormatError(f'Invalid edge {token!r}')
        edges.add((int(m.group(1)), int(m.group(2))))

    if sorted(i for i, _ in bodies) != list(range(size)):
        raise FormatError(f'expected one `vertex i:` entry for 0..{size - 1}')
    bodies.sort()

    try:
        if target == 'portrait':
            shape = parse_shape(headers['shape'])
            depth = int(headers['depth'])
            labels = [parse_portrait_labels(lines, shape, depth)
                      for _, lines in bodies]
        elif target == 'matrix':
            ring = parse_ring(headers['ring'])
            degree = int(headers['degree'])
            labels = [parse_matrix(' '.join(lines), ring, degree)
                      for _, lines in bodies]
        elif target == 'perm':
            degree = int(headers['degree'])
            labels = [parse_perm(' '.join(lines), degree)
                      for _, lines in bodies]
        else:
            raise FormatError(f'Unknown target {target!r}')
    except KeyError as e:
        raise FormatError(f'{target} representation needs {e}') from e
    except ValueError as e:
        raise FormatError(str(e)) from e

    return NCRep(Graph(size, frozenset(edges)), labels)
