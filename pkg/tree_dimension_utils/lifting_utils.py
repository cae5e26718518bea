#!/usr/bin/env python3

'''
Lifting normal subgroups out of subdirect products.

For H inside L_0 x L_1 x ... x L_k, projecting onto every factor, there is
a largest i and a nontrivial normal subgroup N of L_0 such that every a in
N extends to a unique element (a, 1, ..., 1, b_1, ..., b_{k-i}) of H with i
trivial blocks after the first. lift_decompose finds i and N by peeling
blocks off the end; lift_oracle finds the largest admissible i by
enumeration.
'''

from dataclasses import dataclass, field
import logging
import os
from typing import (
    Any,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from .automaton_utils import TreeGroup
from .config_utils import ENUMERATION_LIMIT
from .errors import (
    BudgetExceededError,
    HypothesisError,
    MissingConjugatorError,
    NonMemberError,
)
from .group_utils import leaf_transversal, level_stabilizer, is_level_transitive
from .perm_utils import (
    Perm,
    PermGroup,
    conjugate,
    format_perm,
    is_identity,
    perm_inv,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


@dataclass
class BlockedGroup:
    '''
    A subgroup H of an ambient permutation group, with its support split
    into ordered blocks B_0, ..., B_k of equal size that H leaves invariant.

    Args:
    - ambient: the group the conjugators come from
    - blocks: point lists; block j point t corresponds to local point t
    - H: the subdirect product
    - block_groups: declared projections L_j (local labels); derived from H
    when omitted
    - conjugators: for j >= 1, an ambient element mapping B_j onto B_0 and
    normalizing H, keyed by j
    '''
    ambient: PermGroup
    blocks: List[Tuple[int, ...]]
    H: PermGroup
    block_groups: Optional[List[PermGroup]] = None
    conjugators: Optional[Mapping[int, Perm]] = None

    def __post_init__(self):
        self.blocks = [tuple(b) for b in self.blocks]
        sizes = {len(b) for b in self.blocks}
        if len(sizes) != 1:
            raise HypothesisError(f'blocks must have equal sizes, got {sizes}')
        points = [p for b in self.blocks for p in b]
        if len(set(points)) != len(points):
            raise HypothesisError('blocks overlap')
        if sorted(points) != list(range(self.ambient.degree)):
            raise HypothesisError('blocks must cover the ambient points')
        if not self.H.is_subgroup_of(self.ambient):
            raise NonMemberError('H is not a subgroup of the ambient group')

        projections = []
        for j, b in enumerate(self.blocks):
            try:
                projections.append(self.H.restrict(b))
            except ValueError as e:
                raise HypothesisError(f'block {j} is not H-invariant') from e
        if self.block_groups is None:
            self.block_groups = projections
        elif len(self.block_groups) != len(self.blocks):
            raise HypothesisError('one block group per block is required')
        else:
            for j, (P, L) in enumerate(zip(projections, self.block_groups)):
                if not P.same_group(L):
                    raise HypothesisError(
                        f'H does not project onto the block {j} group '
                        f'(order {P.order()} of {L.order()})')

    @property
    def k(self) -> int:
        return len(self.blocks) - 1

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    def block_points(self, first: int, last: int) -> List[int]:
        '''
        Points of blocks first..last inclusive.
        '''
        return [p for b in self.blocks[first:last + 1] for p in b]

    def component(self, h: Perm, j: int) -> Perm:
        index = {p: t for t, p in enumerate(self.blocks[j])}
        return tuple(index[h[p]] for p in self.blocks[j])

    def trivial_on(self, h: Perm, first: int, last: int) -> bool:
        return all(h[p] == p for p in self.block_points(first, last))

    def fixing(self, first: int, last: int) -> PermGroup:
        '''
        Elements of H trivial on blocks first..last.
        '''
        if last < first:
            return self.H
        return self.H.pointwise_stabilizer(self.block_points(first, last))

    def projection0(self, K: PermGroup) -> PermGroup:
        return PermGroup(
            self.block_size, [self.component(h, 0) for h in K.generators])


@dataclass
class LiftWitness:
    '''
    Index i, the normal subgroup N of the block-0 group, and the resolver
    a -> (a, 1^i, b_1, ..., b_{k-i}) in H.
    '''
    blocked: BlockedGroup
    index: int
    N: PermGroup
    _lifts: Dict[Perm, Perm] = field(default_factory=dict, repr=False)

    def resolve(self, a: Sequence[int]) -> Perm:
        '''
        The unique element of H with block 0 equal to a and blocks 1..i
        trivial.
        '''
        a = tuple(a)
        if a in self._lifts:
            return self._lifts[a]
        if not self.N.contains(a):
            raise NonMemberError(f'{format_perm(a)} is not in N')

        B = self.blocked
        images = {p: B.blocks[0][a[t]] for t, p in enumerate(B.blocks[0])}
        images.update({p: p for p in B.block_points(1, self.index)})
        g = B.H.extend_partial(images)
        assert g is not None, f'no lift of {format_perm(a)} in H'
        self._lifts[a] = g
        return g

    def lifts(self) -> List[Tuple[Perm, Perm]]:
        return [(a, self.resolve(a)) for a in self.N.generators]

    def to_record(self) -> Mapping[str, Any]:
        return {
            'index': self.index,
            'k': self.blocked.k,
            'block_size': self.blocked.block_size,
            'N_order': self.N.order(),
            'N_generators': [format_perm(a) for a in self.N.generators],
            'lifts': [
                {'a': format_perm(a), 'lift': format_perm(g)}
                for a, g in self.lifts()
            ],
        }


def _kernel_seed(B: BlockedGroup, j: int, E: PermGroup) -> Optional[Perm]:
    '''
    Block-0 component of the lexicographically least generator of E (trivial
    on blocks 0..j-1), moved to block 0 by the conjugator of block j. None
    when the conjugate is not trivial on blocks 1..j.
    '''
    if not B.conjugators or j not in B.conjugators:
        raise MissingConjugatorError(
            f'kernel at block {j} is nontrivial and no conjugator maps '
            f'block {j} to block 0')
    c = B.conjugators[j]
    if sorted(c[p] for p in B.blocks[j]) != sorted(B.blocks[0]):
        raise HypothesisError(f'conjugator {j} does not map block {j} to 0')

    x = min(E.generators)
    y = conjugate(x, c)
    LOGGER.debug('Kernel seed at block %s: %s', j, format_perm(x))
    if not B.H.contains(y):
        raise HypothesisError(f'conjugator {j} does not normalize H')
    if not B.trivial_on(y, 1, j):
        return None
    return B.component(y, 0)


def lift_decompose(B: BlockedGroup) -> LiftWitness:
    '''
    Walks j = k, ..., 1. While the elements of H trivial on blocks 0..j-1
    are trivial, block j is determined by the blocks before it and is
    dropped. At the first j with a nontrivial such element x, x moved to
    block 0 by the conjugator of block j seeds N, its normal closure in the
    block-0 group, and i = j. If no such j exists, i = 0 and N is the whole
    block-0 group.
    '''
    if B.H.is_trivial():
        raise HypothesisError('H is trivial')
    L0 = B.block_groups[0]
    if L0.is_trivial():
        raise HypothesisError('the block-0 group is trivial')

    for j in range(B.k, 0, -1):
        E = B.fixing(0, j - 1)
        if E.is_trivial():
            LOGGER.debug('Block %s is determined by blocks 0..%s', j, j - 1)
            continue

        a = _kernel_seed(B, j, E)
        if a is None:
            D = B.fixing(1, j)
            candidates = [
                B.component(h, 0) for h in sorted(D.generators)
                if not B.trivial_on(h, 0, 0)
            ]
            # no candidate: D_j is trivial and E_{j-1} is not, so no index
            # <= j is admissible
            if not candidates:
                raise HypothesisError(
                    f'no element of H is supported on block 0 and blocks '
                    f'{j + 1}..{B.k}')
            a = candidates[0]
            LOGGER.warning(
                'Conjugated kernel element at block %s is not trivial on '
                'blocks 1..%s; seeding N from the block-0 stabilizer instead',
                j, j)

        N = L0.normal_closure([a])
        assert N.is_subgroup_of(B.projection0(B.fixing(1, j))), \
            'N x 1 x ... x 1 is not contained in H'
        LOGGER.info('Lift at i = %s with |N| = %s', j, N.order())
        return LiftWitness(B, j, N)

    LOGGER.info('Lift at i = 0: H projects isomorphically onto block 0')
    return LiftWitness(B, 0, L0)


@dataclass
class OracleResult:
    index: int
    core: PermGroup


def lift_oracle(B: BlockedGroup, limit: int = None) -> OracleResult:
    '''
    Largest i with E_i trivial and a nontrivial core of proj_0(D_i) in the
    block-0 group, by enumerating H. D_i is the part of H trivial on blocks
    1..i and E_i the part trivial on blocks 0..i.
    '''
    limit = ENUMERATION_LIMIT if limit is None else limit
    for j, L in enumerate(B.block_groups):
        if L.order() > 10 ** 4:
            raise BudgetExceededError(
                f'block group {j} of order {L.order()} is too large for the '
                'oracle')
    elements = B.H.elements(limit)
    L0 = B.block_groups[0]

    for i in range(B.k, -1, -1):
        if any(not is_identity(h) and B.trivial_on(h, 0, i)
               for h in elements):
            continue
        D0 = PermGroup(B.block_size, {
            B.component(h, 0) for h in elements if B.trivial_on(h, 1, i)
        })
        core = L0.normal_core(D0)
        if not core.is_trivial():
            return OracleResult(i, core)

    raise HypothesisError('no admissible index: H is not a subdirect product')


def tree_lifting(G: TreeGroup, level: int) -> LiftWitness:
    '''
    Lifting for H = St_G(level) acting on the leaf blocks of the level
    vertices, block 0 under the all-zeros vertex. The conjugator of block j
    is the inverse of the transversal element sending the all-zeros vertex
    to vertex j.
    '''
    if level < 1 or level + 2 > G.depth:
        raise HypothesisError(
            f'lifting at level {level} needs depth >= {level + 2}, '
            f'got {G.depth}')
    if not is_level_transitive(G, level):
        raise HypothesisError(f'{G.label} is not transitive on level {level}')

    blocks = [
        tuple(G.shape.leaf_block(v, G.depth)) for v in G.shape.vertices(level)
    ]
    transversal = leaf_transversal(G, (0,) * level)
    conjugators = {j: perm_inv(u) for j, u in transversal.items() if j}
    H = level_stabilizer(G, level)
    LOGGER.info(
        'Lifting %s at level %s: %s blocks of %s leaves, |H| = %s',
        G.label, level, len(blocks), len(blocks[0]), H.order())
    return lift_decompose(BlockedGroup(
        G.leaf_group, blocks, H, conjugators=conjugators))
