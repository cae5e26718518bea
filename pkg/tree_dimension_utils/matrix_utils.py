#!/usr/bin/env python3

'''
Exact matrices over integral domains and the linear-independence bound
for non-commuting representations of V_n in GL_k(R): such a labelling
needs k^2 >= n.

Supported rings are the integers (`ZZ`), prime fields (`GF(p)`) and
polynomials over prime fields (`GF(p)[x]`); arithmetic runs on sympy's
domains and DomainMatrix.
'''

from dataclasses import dataclass
from functools import cached_property
import itertools
import logging
import math
import os
import random
import re
from typing import (
    Any,
    List,
    Optional,
    Sequence,
    Tuple,
)

from sympy import GF, ZZ, isprime, prime, symbols
from sympy.polys.matrices import DomainMatrix

from .config_utils import ENUMERATION_LIMIT, SEED
from .errors import (
    BudgetExceededError,
    FormatError,
    IncompatibleError,
    NotAUnitError,
    PreconditionError,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


RING_RX = re.compile(r'^\s*(?:(?P<zz>ZZ)|GF\((?P<p>\d+)\)(?P<poly>\[x\])?)\s*$')
POLY_ENTRY_RX = re.compile(r'^\[(?P<coeffs>[-\d,\s]*)\]$')


@dataclass(frozen=True)
class Ring:
    '''
    An integral domain given by its tag: `ZZ`, `GF(p)` or `GF(p)[x]`.

    >>> parse_ring('GF(5)[x]').prime
    5
    '''
    tag: str
    prime: Optional[int] = None
    polynomial: bool = False

    @cached_property
    def domain(self):
        if self.prime is None:
            return ZZ
        field = GF(self.prime, symmetric=False)
        if self.polynomial:
            return field[symbols('x')]
        return field

    def element(self, value):
        '''
        Domain element of an integer, or of a coefficient list (low to high
        degree) in the polynomial ring.
        '''
        K = self.domain
        if not self.polynomial:
            if not isinstance(value, int):
                raise FormatError(f'{self.tag} entries are integers: {value!r}')
            return K(value)
        if isinstance(value, int):
            value = [value]
        return K.ring.from_dict({
            (i,): K.domain(c) for i, c in enumerate(value) if c % self.prime
        })

    def to_python(self, a) -> Any:
        if self.prime is None:
            return int(a)
        if not self.polynomial:
            return int(self.domain.to_int(a)) % self.prime
        coeffs = {m[0]: int(self.domain.domain.to_int(c)) % self.prime
                  for m, c in a.terms()}
        size = max(coeffs, default=-1) + 1
        return [coeffs.get(i, 0) for i in range(size)]

    def render(self, a) -> str:
        value = self.to_python(a)
        if isinstance(value, list):
            return '[' + ','.join(str(c) for c in value) + ']'
        return str(value)

    def parse_entry(self, text: str):
        text = text.strip()
        m = POLY_ENTRY_RX.match(text)
        try:
            if m:
                if not self.polynomial:
                    raise FormatError(
                        f'polynomial entry {text!r} over {self.tag}')
                coeffs = m.group('coeffs').strip()
                return self.element(
                    [int(c) for c in coeffs.split(',')] if coeffs else [])
            return self.element(int(text))
        except ValueError as e:
            raise FormatError(f'Invalid {self.tag} entry {text!r}') from e


def parse_ring(tag: str) -> Ring:
    '''
    >>> parse_ring('ZZ').prime is None
    True
    >>> parse_ring('GF(4)')
    Traceback (most recent call last):
    ...
    tree_dimension_utils.errors.PreconditionError: GF(4): modulus 4 is not prime
    '''
    m = RING_RX.match(tag)
    if not m:
        raise FormatError(f'Unknown ring tag {tag!r}')
    if m.group('zz'):
        return Ring('ZZ')
    p = int(m.group('p'))
    if not isprime(p):
        raise PreconditionError(f'{tag.strip()}: modulus {p} is not prime')
    polynomial = bool(m.group('poly'))
    return Ring(f'GF({p})[x]' if polynomial else f'GF({p})', p, polynomial)


@dataclass(frozen=True)
class ExactMatrix:
    ring: Ring
    matrix: DomainMatrix

    @classmethod
    def from_rows(cls, ring: Ring, rows: Sequence[Sequence[Any]]):
        k = len(rows)
        if any(len(row) != k for row in rows):
            raise FormatError(f'matrix rows must have length {k}')
        return cls(ring, DomainMatrix(
            [[ring.element(e) for e in row] for row in rows],
            (k, k),
            ring.domain,
        ))

    @classmethod
    def from_flat(cls, ring: Ring, degree: int, entries: Sequence[Any]):
        if len(entries) != degree * degree:
            raise FormatError(
                f'expected {degree * degree} entries, got {len(entries)}')
        return cls.from_rows(ring, [
            entries[i * degree:(i + 1) * degree] for i in range(degree)])

    @classmethod
    def identity(cls, ring: Ring, degree: int) -> 'ExactMatrix':
        return cls.from_rows(
            ring, [[int(i == j) for j in range(degree)] for i in range(degree)])

    @property
    def degree(self) -> int:
        return self.matrix.shape[0]

    def flat(self) -> List[Any]:
        return self.matrix.to_list_flat()

    def key(self) -> Tuple[str, ...]:
        return tuple(self.ring.render(a) for a in self.flat())

    def rows(self) -> List[List[Any]]:
        return [[self.ring.to_python(a) for a in row]
                for row in self.matrix.to_list()]

    def __mul__(self, other: 'ExactMatrix') -> 'ExactMatrix':
        check_common([self, other])
        return ExactMatrix(self.ring, self.matrix * other.matrix)

    def commutes(self, other: 'ExactMatrix') -> bool:
        return (self * other).flat() == (other * self).flat()

    def det(self):
        return self.matrix.det()

    def is_invertible(self) -> bool:
        return self.ring.domain.is_unit(self.det())


def check_common(mats: Sequence[ExactMatrix]):
    '''
    Raises IncompatibleError unless all matrices share ring and degree.
    '''
    if not mats:
        return
    ring, degree = mats[0].ring, mats[0].degree
    for M in mats[1:]:
        if M.ring != ring or M.degree != degree:
            raise IncompatibleError(
                f'mixed matrices: {ring.tag} degree {degree} and '
                f'{M.ring.tag} degree {M.degree}')


def format_matrix(M: ExactMatrix) -> str:
    '''
    Row-major entries separated by spaces.
    '''
    return ' '.join(M.ring.render(a) for a in M.flat())


def parse_matrix(text: str, ring: Ring, degree: int) -> ExactMatrix:
    entries = [ring.parse_entry(e) for e in text.split()]
    if len(entries) != degree * degree:
        raise FormatError(
            f'expected {degree * degree} entries, got {len(entries)}')
    return ExactMatrix(ring, DomainMatrix(
        [entries[i * degree:(i + 1) * degree] for i in range(degree)],
        (degree, degree),
        ring.domain,
    ))


def vn_violation(mats: Sequence[ExactMatrix]) -> Optional[Tuple[int, int]]:
    '''
    First pair (i, j) breaking the V_n commutation pattern of the labelling
    a_1, b_1, a_2, b_2, ...: vertices 2t and 2t+1 must not commute, every
    other pair must.
    '''
    for i, j in itertools.combinations(range(len(mats)), 2):
        edge = i // 2 == j // 2
        if mats[i].commutes(mats[j]) == edge:
            return i, j
    return None


def verify_pattern(mats: Sequence[ExactMatrix]) -> bool:
    '''
    Whether invertible matrices a_1, b_1, ..., a_n, b_n realize V_n.

    >>> verify_pattern(block_construction(2))
    True
    '''
    if len(mats) % 2:
        raise PreconditionError(
            f'a V_n labelling has an even number of labels, got {len(mats)}')
    check_common(mats)
    for i, M in enumerate(mats):
        if not M.is_invertible():
            raise NotAUnitError(
                f'label {i} has determinant {M.ring.render(M.det())}, '
                f'not a unit of {M.ring.tag}')

    violation = vn_violation(mats)
    if violation:
        LOGGER.debug('V_n pattern broken at labels %s', violation)
    return violation is None


def bareiss_rank(rows: List[List[Any]], K) -> int:
    '''
    Rank over the fraction field of K by fraction-free elimination: every
    division is exact in K.
    '''
    rows = [list(r) for r in rows]
    if not rows:
        return 0
    n_rows, n_cols = len(rows), len(rows[0])
    rank, previous = 0, K.one

    for col in range(n_cols):
        pivot = next(
            (r for r in range(rank, n_rows) if rows[r][col]), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        top = rows[rank]
        for r in range(rank + 1, n_rows):
            row = rows[r]
            for c in range(col + 1, n_cols):
                row[c] = K.exquo(top[col] * row[c] - row[col] * top[c],
                                 previous)
            row[col] = K.zero
        previous = top[col]
        rank += 1
        if rank == n_rows:
            break
    return rank


def independence_rank(mats: Sequence[ExactMatrix]) -> int:
    '''
    Rank of the matrices as k^2-vectors over the fraction field.

    >>> I = ExactMatrix.identity(parse_ring('ZZ'), 2)
    >>> independence_rank([I, ExactMatrix.from_rows(I.ring, [[2, 0], [0, 2]])])
    1
    '''
    if not mats:
        return 0
    check_common(mats)
    return bareiss_rank([M.flat() for M in mats], mats[0].ring.domain)


def choose_primes(seed: int = None, count: int = 3) -> List[int]:
    rng = random.Random(SEED if seed is None else seed)
    return sorted({prime(rng.randrange(1000, 5000)) for _ in range(count)})


def modular_rank(mats: Sequence[ExactMatrix], p: int) -> int:
    '''
    Rank of integer matrices reduced mod p, computed by DomainMatrix.
    '''
    check_common(mats)
    if mats and mats[0].ring.prime is not None:
        raise IncompatibleError('modular rank is defined for ZZ matrices')
    K = GF(p, symmetric=False)
    rows = [[K(int(a)) for a in M.flat()] for M in mats]
    if not rows:
        return 0
    return DomainMatrix(rows, (len(rows), len(rows[0])), K).rank()


def assert_sqrt_bound(mats: Sequence[ExactMatrix]) -> bool:
    '''
    For a verified V_n labelling in degree k: the a-side is linearly
    independent and n <= k^2. A False result contradicts the bound and is
    logged as an error.
    '''
    if not verify_pattern(mats):
        raise PreconditionError('labelling does not realize V_n')
    n = len(mats) // 2
    if not n:
        return True
    k = mats[0].degree
    rank = independence_rank(mats[0::2])
    ok = rank == n and n <= k * k
    if not ok:
        LOGGER.error(
            'sqrt bound violated: n = %s, degree %s, a-side rank %s',
            n, k, rank)
    return ok


def block_construction(n: int) -> List[ExactMatrix]:
    '''
    V_n labelling in degree 2n over the integers: the i-th pair is the two
    elementary unipotent matrices in the i-th 2x2 diagonal block.
    '''
    if n < 1:
        raise PreconditionError(f'n must be positive, got {n}')
    ring = parse_ring('ZZ')
    k = 2 * n
    mats = []
    for i in range(n):
        for r, c in ((2 * i, 2 * i + 1), (2 * i + 1, 2 * i)):
            rows = [[int(x == y) for y in range(k)] for x in range(k)]
            rows[r][c] = 1
            mats.append(ExactMatrix.from_rows(ring, rows))
    return mats


def gl_order(p: int, k: int) -> int:
    '''
    >>> gl_order(2, 2), gl_order(3, 2)
    (6, 48)
    '''
    return math.prod(p ** k - p ** i for i in range(k))


def general_linear_group(p: int, k: int, limit: int = None) -> List[ExactMatrix]:
    '''
    Elements of GL_k(F_p), in lexicographic order of their entries.
    '''
    limit = ENUMERATION_LIMIT if limit is None else limit
    if p ** (k * k) > limit:
        raise BudgetExceededError(
            f'{p}^{k * k} matrices exceed the enumeration limit {limit}')
    ring = parse_ring(f'GF({p})')
    elements = []
    for entries in itertools.product(range(p), repeat=k * k):
        M = ExactMatrix.from_flat(ring, k, list(entries))
        if M.is_invertible():
            elements.append(M)
    assert len(elements) == gl_order(p, k)
    return elements


@dataclass
class MaxVnResult:
    prime: int
    degree: int
    order: int
    n: int
    witness: List[ExactMatrix]

    @property
    def within_bound(self) -> bool:
        return self.n <= self.degree ** 2


def exhaustive_max_vn(
    p: int,
    k: int,
    order_limit: int = 10 ** 4,
) -> MaxVnResult:
    '''
    Largest n with a V_n labelling in GL_k(F_p), by backtracking: each new
    pair is a non-commuting pair inside the centralizer of the pairs
    already chosen, pairs taken in increasing index order.

    >>> exhaustive_max_vn(2, 1).n
    0
    '''
    order = gl_order(p, k)
    if order > order_limit:
        raise BudgetExceededError(
            f'GL_{k}(F_{p}) has order {order}, over the limit {order_limit}')

    elements = general_linear_group(p, k)
    size = len(elements)
    commutes = [[True] * size for _ in range(size)]
    for i, j in itertools.combinations(range(size), 2):
        commutes[i][j] = commutes[j][i] = elements[i].commutes(elements[j])

    best: List[Tuple[int, int]] = []

    def search(candidates: List[int], chosen: List[Tuple[int, int]]):
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
        # elements central in the candidates never enter a non-commuting pair
        live = [x for x in candidates
                if not all(commutes[x][y] for y in candidates)]
        if len(chosen) + len(live) // 2 <= len(best):
            return
        for a, b in itertools.combinations(live, 2):
            if commutes[a][b] or (chosen and (a, b) <= chosen[-1]):
                continue
            rest = [x for x in live if commutes[x][a] and commutes[x][b]]
            search(rest, chosen + [(a, b)])

    search(list(range(size)), [])
    witness = [elements[x] for pair in best for x in pair]
    result = MaxVnResult(p, k, order, len(best), witness)
    LOGGER.info(
        'GL_%s(F_%s), order %s: largest V_n has n = %s', k, p, order, result.n)
    if witness and not assert_sqrt_bound(witness):
        LOGGER.error('maximal witness over GL_%s(F_%s) fails the bound', k, p)
    return result
