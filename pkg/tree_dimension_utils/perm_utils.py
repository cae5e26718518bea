#!/usr/bin/env python3

'''
Exact finite permutation groups on the points 0..degree-1.

Permutations are tuples in one-line image notation and multiply left to
right: perm_mul(p, q) applies p first, then q. Group computations run on
sympy's permutation groups; the stabilizer chains are built with the
incremental Schreier-Sims algorithm, which is deterministic for a given
generator order and base prefix.
'''

from functools import cached_property
import logging
import math
import os
from typing import (
    Dict,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from sympy.combinatorics import Permutation, PermutationGroup
from sympy.combinatorics.util import (
    _distribute_gens_by_base,
    _orbits_transversals_from_bsgs,
    _strip,
)

from .config_utils import ENUMERATION_LIMIT
from .errors import BudgetExceededError, FormatError, NonMemberError

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


Perm = Tuple[int, ...]


def check_perm(p: Sequence[int], degree: int = None) -> Perm:
    '''
    Returns p as a tuple, raising ValueError if it isn't a bijection on
    0..degree-1.

    >>> check_perm([1, 2, 0])
    (1, 2, 0)
    '''
    p = tuple(p)
    if degree is not None and len(p) != degree:
        raise ValueError(f'expected a permutation of degree {degree}: {p}')
    if set(p) != set(range(len(p))):
        raise ValueError(f'not a permutation: {p}')
    return p


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == j for i, j in enumerate(p))


def perm_mul(p: Perm, q: Perm) -> Perm:
    '''
    Applies p, then q.

    >>> perm_mul((1, 0, 2), (0, 2, 1))
    (2, 0, 1)
    '''
    return tuple(q[i] for i in p)


def perm_mul_all(perms: Iterable[Perm], degree: int) -> Perm:
    w = identity_perm(degree)
    for p in perms:
        w = perm_mul(w, p)
    return w


def perm_inv(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_pow(p: Perm, n: int) -> Perm:
    '''
    >>> perm_pow((1, 2, 0), 2)
    (2, 0, 1)
    >>> perm_pow((1, 2, 0), -1)
    (2, 0, 1)
    '''
    if n < 0:
        return perm_pow(perm_inv(p), -n)
    result = identity_perm(len(p))
    base = p
    while n:
        if n & 1:
            result = perm_mul(result, base)
        base = perm_mul(base, base)
        n >>= 1
    return result


def conjugate(p: Perm, c: Perm) -> Perm:
    '''
    p^c = c^-1 p c.
    '''
    return perm_mul(perm_mul(perm_inv(c), p), c)


def commutator(p: Perm, q: Perm) -> Perm:
    '''
    [p, q] = p^-1 q^-1 p q.

    >>> commutator((1, 0, 2), (1, 2, 0))
    (2, 0, 1)
    '''
    return perm_mul(
        perm_mul(perm_inv(p), perm_inv(q)),
        perm_mul(p, q),
    )


def commute(p: Perm, q: Perm) -> bool:
    return perm_mul(p, q) == perm_mul(q, p)


def format_perm(p: Perm) -> str:
    '''
    >>> format_perm((1, 0, 2))
    '1,0,2'
    '''
    return ','.join(str(i) for i in p)


def parse_perm(text: str, degree: int = None) -> Perm:
    '''
    Parses a one-line permutation such as "1,0,2".

    >>> parse_perm('2, 0, 1')
    (2, 0, 1)
    '''
    try:
        images = [int(part) for part in text.split(',')]
        return check_perm(images, degree)
    except ValueError as e:
        raise FormatError(f'Invalid permutation {text!r}: {e}') from e


def to_sympy(p: Perm) -> Permutation:
    return Permutation(list(p))


def from_sympy(p: Permutation, degree: int) -> Perm:
    af = list(p.array_form)
    return tuple(af + list(range(len(af), degree)))


def dedupe_generators(generators: Iterable[Perm]) -> Tuple[Perm, ...]:
    '''
    Drops identities and repeats, keeping the first occurrence order.
    '''
    seen = set()
    result = []
    for g in generators:
        g = tuple(g)
        if g in seen or is_identity(g):
            continue
        seen.add(g)
        result.append(g)
    return tuple(result)


class StabilizerChain:
    '''
    Base, strong generating set, basic orbits and transversals of a
    permutation group.

    Sifting against the chain decides membership; sifting a partial map
    reconstructs group elements from their images on a base prefix.
    '''

    def __init__(self, degree: int, base: Sequence[int], strong_gens):
        self.degree = degree
        self.base = list(base)
        self.strong_gens = list(strong_gens)

        if self.strong_gens:
            distributed = _distribute_gens_by_base(
                self.base, self.strong_gens)
            self.orbits, self.transversals = _orbits_transversals_from_bsgs(
                self.base, distributed)
        else:
            identity = Permutation(degree - 1)
            self.orbits = [[b] for b in self.base]
            self.transversals = [{b: identity} for b in self.base]

    @classmethod
    def build(
        cls,
        degree: int,
        generators: Sequence[Perm],
        base: Sequence[int] = (),
    ) -> 'StabilizerChain':
        '''
        Runs the incremental Schreier-Sims algorithm.

        Args:
        - degree: number of points
        - generators: group generators in one-line notation
        - base: points forced at the start of the base, in order
        '''
        gens = [to_sympy(g) for g in dedupe_generators(generators)]
        if not gens:
            return cls(degree, list(base), [])

        group = PermutationGroup(gens)
        chain_base, strong = group.schreier_sims_incremental(
            base=list(base), gens=gens)
        return cls(degree, chain_base, strong)

    def extend(self, p: Perm) -> 'StabilizerChain':
        '''
        Chain of the group generated by this one and p.
        '''
        gens = [from_sympy(g, self.degree) for g in self.strong_gens]
        return StabilizerChain.build(self.degree, gens + [p], self.base)

    def order(self) -> int:
        return math.prod(len(orbit) for orbit in self.orbits)

    def contains(self, p: Perm) -> bool:
        if len(p) != self.degree:
            return False
        if not self.strong_gens:
            return is_identity(p)
        h, level = _strip(
            to_sympy(p), self.base, self.orbits, self.transversals)
        return level == len(self.base) + 1 and h.is_Identity

    def lift_partial(self, images: Mapping[int, int]) -> Optional[Perm]:
        '''
        Returns a group element mapping each key of images to its value, or
        None if there is none.

        Base points missing from images are left where the sifted remainder
        puts them, so the result is unique only when the pointwise
        stabilizer of the given points is trivial.
        '''
        remainder = dict(images)
        factors = []

        for i, b in enumerate(self.base):
            if b not in remainder:
                break
            beta = remainder[b]
            if beta not in self.transversals[i]:
                return None
            u = self.transversals[i][beta]
            u_inv = (~u).array_form
            remainder = {p: u_inv[x] for p, x in remainder.items()}
            factors.append(u)

        if any(p != x for p, x in remainder.items()):
            return None

        h = Permutation(self.degree - 1)
        for u in factors:
            h = u * h
        return from_sympy(h, self.degree)


class PermGroup:
    '''
    Finite permutation group on the points 0..degree-1.

    >>> G = PermGroup(3, [(1, 0, 2), (1, 2, 0)])
    >>> G.order()
    6
    >>> G.pointwise_stabilizer([2]).order()
    2
    '''

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        '''
        Args:
        - degree: number of points, at least 1
        - generators: permutations in one-line notation; identities and
        repeats are dropped
        '''
        if degree < 1:
            raise ValueError(f'degree must be positive, got {degree}')
        self.degree = degree
        self.generators = dedupe_generators(
            check_perm(g, degree) for g in generators)
        self._chains: Dict[Tuple[int, ...], StabilizerChain] = {}

    def __repr__(self):
        return (
            f'PermGroup(degree={self.degree}, '
            f'generators={list(self.generators)})'
        )

    @cached_property
    def chain(self) -> StabilizerChain:
        return self.chain_for(())

    @cached_property
    def sympy_group(self) -> PermutationGroup:
        gens = [to_sympy(g) for g in self.generators]
        return PermutationGroup(gens or [Permutation(self.degree - 1)])

    def chain_for(self, base: Sequence[int]) -> StabilizerChain:
        '''
        Stabilizer chain whose base starts with the given points.
        '''
        key = tuple(base)
        if key not in self._chains:
            self._chains[key] = StabilizerChain.build(
                self.degree, self.generators, key)
        return self._chains[key]

    @property
    def identity(self) -> Perm:
        return identity_perm(self.degree)

    def order(self) -> int:
        return self.chain.order()

    def is_trivial(self) -> bool:
        return not self.generators

    def is_abelian(self) -> bool:
        return all(
            commute(g, h)
            for i, g in enumerate(self.generators)
            for h in self.generators[i + 1:]
        )

    def contains(self, p: Sequence[int]) -> bool:
        return self.chain.contains(tuple(p))

    def is_subgroup_of(self, other: 'PermGroup') -> bool:
        return (
            self.degree == other.degree
            and all(other.contains(g) for g in self.generators)
        )

    def same_group(self, other: 'PermGroup') -> bool:
        return (
            self.is_subgroup_of(other)
            and self.order() == other.order()
        )

    def is_normal_in(self, other: 'PermGroup') -> bool:
        return self.is_subgroup_of(other) and all(
            self.contains(conjugate(h, g))
            for h in self.generators
            for g in other.generators
        )

    def orbit_transversal(self, point: int) -> Dict[int, Perm]:
        '''
        Breadth-first orbit of a point, mapping every orbit point q to an
        element sending point to q. Iteration order is the discovery order.
        '''
        transversal = {point: self.identity}
        queue = [point]
        for q in queue:
            u = transversal[q]
            for g in self.generators:
                image = g[q]
                if image not in transversal:
                    transversal[image] = perm_mul(u, g)
                    queue.append(image)
        return transversal

    def orbit(self, point: int) -> Tuple[int, ...]:
        return tuple(sorted(self.orbit_transversal(point)))

    def orbits(self) -> List[Tuple[int, ...]]:
        seen = set()
        result = []
        for p in range(self.degree):
            if p not in seen:
                orbit = self.orbit(p)
                seen.update(orbit)
                result.append(orbit)
        return result

    def stabilizer(self, point: int) -> 'PermGroup':
        return self.pointwise_stabilizer([point])

    def pointwise_stabilizer(self, points: Iterable[int]) -> 'PermGroup':
        '''
        Subgroup fixing every given point. The generators are the strong
        generators of a chain whose base starts with the points.

        >>> PermGroup(2, [(1, 0)]).pointwise_stabilizer([0]).is_trivial()
        True
        '''
        points = sorted(set(points))
        for p in points:
            if not 0 <= p < self.degree:
                raise ValueError(f'point {p} outside 0..{self.degree - 1}')
        chain = self.chain_for(points)
        gens = [
            from_sympy(g, self.degree) for g in chain.strong_gens
            if all(g.array_form[p] == p for p in points)
        ] if points else list(self.generators)
        return PermGroup(self.degree, gens)

    def extend_partial(
        self,
        images: Mapping[int, int],
        base: Sequence[int] = None,
    ) -> Optional[Perm]:
        '''
        An element of the group agreeing with the partial map images, or
        None. base fixes the base prefix used (defaults to the sorted keys).
        '''
        base = sorted(images) if base is None else list(base)
        return self.chain_for(base).lift_partial(images)

    def restrict(self, points: Sequence[int]) -> 'PermGroup':
        '''
        Action on an invariant set of points, relabelled 0..len(points)-1 in
        the given order.

        >>> PermGroup(4, [(1, 0, 3, 2)]).restrict([2, 3]).generators
        ((1, 0),)
        '''
        index = {p: i for i, p in enumerate(points)}
        gens = []
        for g in self.generators:
            try:
                gens.append(tuple(index[g[p]] for p in points))
            except KeyError:
                raise ValueError('points are not invariant under the group')
        return PermGroup(len(points), gens)

    def conjugate(self, c: Perm) -> 'PermGroup':
        return PermGroup(
            self.degree, [conjugate(g, c) for g in self.generators])

    def elements(self, limit: int = None) -> List[Perm]:
        '''
        All elements, sorted. Fails with BudgetExceededError past the limit.
        '''
        limit = ENUMERATION_LIMIT if limit is None else limit
        order = self.order()
        if order > limit:
            raise BudgetExceededError(
                f'group of order {order} exceeds the enumeration limit {limit}')
        return sorted(
            from_sympy(p, self.degree) for p in self.sympy_group.generate())

    def normal_closure(self, elements: Iterable[Sequence[int]]) -> 'PermGroup':
        '''
        Smallest normal subgroup containing the elements.

        New conjugates by the generators are added until the subgroup is
        closed; each addition extends the stabilizer chain incrementally.

        >>> G = PermGroup(3, [(1, 0, 2), (1, 2, 0)])
        >>> G.normal_closure([(1, 2, 0)]).order()
        3
        '''
        elements = [tuple(e) for e in elements]
        for e in elements:
            if not self.contains(e):
                raise NonMemberError(
                    f'{format_perm(e)} is not an element of the group')

        gens = list(dedupe_generators(elements))
        chain = StabilizerChain.build(self.degree, gens)
        queue = list(gens)

        while queue:
            z = queue.pop(0)
            for g in self.generators:
                c = conjugate(z, g)
                if not chain.contains(c):
                    LOGGER.debug(
                        'Normal closure grows by %s', format_perm(c))
                    gens.append(c)
                    queue.append(c)
                    chain = chain.extend(c)

        closure = PermGroup(self.degree, gens)
        closure.__dict__['chain'] = chain
        return closure

    def derived_subgroup(self) -> 'PermGroup':
        return self.normal_closure(
            commutator(g, h)
            for i, g in enumerate(self.generators)
            for h in self.generators[i + 1:]
        )

    def center(self) -> 'PermGroup':
        '''
        >>> PermGroup(3, [(1, 2, 0)]).center().order()
        3
        >>> PermGroup(3, [(1, 0, 2), (1, 2, 0)]).center().order()
        1
        '''
        if self.is_trivial():
            return self
        center = self.sympy_group.center()
        return PermGroup(
            self.degree,
            [from_sympy(g, self.degree) for g in center.generators],
        )

    def right_coset_action(
        self,
        subgroup: 'PermGroup',
        limit: int = None,
    ) -> Tuple[List[Perm], List[Perm]]:
        '''
        Action of the generators on the right cosets of subgroup.

        Returns: (representatives, actions)
        - representatives: one element per coset, the first being identity
        - actions: one permutation of the coset indices per generator
        '''
        limit = ENUMERATION_LIMIT if limit is None else limit
        index = self.order() // subgroup.order()
        if index > limit:
            raise BudgetExceededError(
                f'subgroup index {index} exceeds the enumeration limit {limit}')

        reps = [self.identity]
        images = [[] for _ in self.generators]

        def locate(x):
            for i, r in enumerate(reps):
                if subgroup.contains(perm_mul(x, perm_inv(r))):
                    return i
            reps.append(x)
            return len(reps) - 1

        for i in range(index):
            for j, g in enumerate(self.generators):
                images[j].append(locate(perm_mul(reps[i], g)))

        assert len(reps) == index
        return reps, [tuple(a) for a in images]

    def normal_core(self, subgroup: 'PermGroup') -> 'PermGroup':
        '''
        Largest subgroup of subgroup normal in this group: the kernel of the
        action on the right cosets of subgroup.

        >>> G = PermGroup(3, [(1, 0, 2), (1, 2, 0)])
        >>> G.normal_core(PermGroup(3, [(1, 0, 2)])).order()
        1
        '''
        if not subgroup.is_subgroup_of(self):
            raise NonMemberError('not a subgroup of the ambient group')
        if subgroup.order() == self.order():
            return subgroup

        _, actions = self.right_coset_action(subgroup)
        index = len(actions[0])

        combined = PermGroup(self.degree + index, [
            g + tuple(self.degree + i for i in a)
            for g, a in zip(self.generators, actions)
        ])
        kernel = combined.pointwise_stabilizer(
            range(self.degree, self.degree + index))
        return kernel.restrict(range(self.degree))
