#!/usr/bin/env python3

'''
Logarithmic indices and dimension profiles of truncated tree groups.

Every logarithm here is the log of an exact integer, kept as that integer
plus a closed form; ratios are exact fractions when numerator and
denominator are commensurable and 128-bit reals otherwise.
'''

from collections import defaultdict
import csv
from dataclasses import dataclass, field
from fractions import Fraction
import io
import logging
import math
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

import mpmath
from sympy import factorint

from .automaton_utils import TreeGroup
from .errors import DepthExceededError, InapplicableError, PreconditionError
from .group_utils import level_image, projection, rigid_level_stabilizer
from .tree_utils import TreeShape, Vertex, format_shape, format_vertex

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


PRECISION_BITS = 128
TOLERANCE = mpmath.mpf('1e-20')
CSV_HEADER = ['n', 'log_num', 'log_den', 'ratio']


@dataclass(frozen=True)
class LogIndex:
    '''
    log(value) for a positive integer value, with its closed form as
    (coefficient, base) terms: sum of coefficient * log(base).

    >>> str(LogIndex.of(128))
    '7*log(2)'
    >>> str(LogIndex.of(2) + LogIndex.of(36))
    'log(2) + 2*log(6)'
    '''
    value: int
    terms: Tuple[Tuple[int, int], ...] = ()

    @classmethod
    def of(cls, value: int) -> 'LogIndex':
        '''
        Logarithm of an integer, written over its prime factorization. A
        perfect power of a single integer stays in that base.
        '''
        if value < 1:
            raise ValueError(f'log index of a non-positive value {value}')
        if value == 1:
            return cls(1)
        factors = factorint(value)
        g = math.gcd(*factors.values())
        base = math.prod(p ** (e // g) for p, e in factors.items())
        return cls(value, ((g, base),))

    def __add__(self, other: 'LogIndex') -> 'LogIndex':
        coefficients = defaultdict(int)
        for c, b in self.terms + other.terms:
            coefficients[b] += c
        return LogIndex(
            self.value * other.value,
            tuple((c, b) for b, c in sorted(coefficients.items())),
        )

    def scaled(self, c: int) -> 'LogIndex':
        '''
        c * log(value), without factoring value ** c.

        >>> str(LogIndex.of(12).scaled(3))
        '3*log(12)'
        '''
        if c < 0:
            raise ValueError(f'negative scale {c}')
        if c == 0 or self.value == 1:
            return LogIndex(1)
        return LogIndex(
            self.value ** c, tuple((c * e, b) for e, b in self.terms))

    def __le__(self, other: 'LogIndex') -> bool:
        return self.value <= other.value

    def __lt__(self, other: 'LogIndex') -> bool:
        return self.value < other.value

    def __str__(self):
        if self.value == 1:
            return '0'
        return ' + '.join(
            f'log({b})' if c == 1 else f'{c}*log({b})'
            for c, b in self.terms
        )

    def approx(self) -> mpmath.mpf:
        with mpmath.workprec(PRECISION_BITS):
            return mpmath.log(self.value)


@dataclass(frozen=True)
class Ratio:
    '''
    Ratio of two log indices: exact when commensurable, else a 128-bit real
    rendered with a `~128b` tag.
    '''
    exact: Optional[Fraction]
    approx: mpmath.mpf

    def __str__(self):
        if self.exact is not None:
            return str(self.exact)
        with mpmath.workprec(PRECISION_BITS):
            return mpmath.nstr(self.approx, 30) + '~128b'

    def in_unit_interval(self) -> bool:
        if self.exact is not None:
            return 0 <= self.exact <= 1
        return -TOLERANCE <= self.approx <= 1 + TOLERANCE


def _exponent_ratio(num: int, den: int) -> Optional[Fraction]:
    '''
    c with num = den^c when both factor over the same primes with
    proportional exponents, else None.

    >>> _exponent_ratio(8, 128)
    Fraction(3, 7)
    >>> _exponent_ratio(2, 6) is None
    True
    '''
    if num == 1:
        return Fraction(0)
    fn, fd = factorint(num), factorint(den)
    if set(fn) != set(fd):
        return None
    ratios = {Fraction(fn[p], fd[p]) for p in fn}
    return ratios.pop() if len(ratios) == 1 else None


def log_ratio(num: LogIndex, den: LogIndex) -> Ratio:
    if den.value == 1:
        raise PreconditionError('ratio over a zero log index')
    exact = _exponent_ratio(num.value, den.value)
    with mpmath.workprec(PRECISION_BITS):
        if exact is not None:
            approx = mpmath.mpf(exact.numerator) / exact.denominator
        else:
            approx = num.approx() / den.approx()
    return Ratio(exact, approx)


def ambient_log_index(shape: TreeShape, n: int) -> LogIndex:
    '''
    log|Aut T : St(n)| = sum over k < n of N_k * log(m_k!).

    >>> str(ambient_log_index(TreeShape((2, 2, 2)), 3))
    '7*log(2)'
    >>> str(ambient_log_index(TreeShape((3, 3)), 2))
    '4*log(6)'
    >>> str(ambient_log_index(TreeShape((2, 3)), 2))
    'log(2) + 2*log(6)'
    '''
    shape.check_depth(n)
    coefficients = defaultdict(int)
    for k in range(n):
        coefficients[math.factorial(shape.degree(k))] += shape.level_size(k)
    value = math.prod(b ** c for b, c in coefficients.items())
    return LogIndex(
        value, tuple((c, b) for b, c in sorted(coefficients.items())))


def image_log_index(G: TreeGroup, n: int) -> LogIndex:
    '''
    log|G_d : St_{G_d}(n)|, the log of the level-n image order.
    '''
    return LogIndex.of(level_image(G, n).order())


@dataclass
class DimensionRecord:
    n: int
    log_num: LogIndex
    log_den: LogIndex
    ratio: Ratio

    def row(self) -> List[str]:
        return [str(self.n), str(self.log_num), str(self.log_den),
                str(self.ratio)]


@dataclass
class DimensionProfile:
    '''
    Ratios r_n for n = 1..n_max of one truncation, with min, max and last
    over the trailing window of ceil(n_max / 3) levels. No limits are
    estimated.
    '''
    label: str
    shape: TreeShape
    depth: int
    records: List[DimensionRecord] = field(default_factory=list)

    @property
    def window(self) -> List[DimensionRecord]:
        size = math.ceil(len(self.records) / 3)
        return self.records[-size:] if size else []

    @property
    def window_min(self) -> Ratio:
        return min((r.ratio for r in self.window), key=lambda r: r.approx)

    @property
    def window_max(self) -> Ratio:
        return max((r.ratio for r in self.window), key=lambda r: r.approx)

    @property
    def last(self) -> Ratio:
        return self.records[-1].ratio

    def ratio(self, n: int) -> Ratio:
        return self.records[n - 1].ratio

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator='\n')
        writer.writerow(CSV_HEADER)
        for r in self.records:
            writer.writerow(r.row())
        return out.getvalue()

    def to_record(self) -> Mapping[str, Any]:
        return {
            'group': self.label,
            'shape': format_shape(self.shape),
            'depth': self.depth,
            'records': [dict(zip(CSV_HEADER, r.row())) for r in self.records],
            'window': {
                'levels': [r.n for r in self.window],
                'min': str(self.window_min),
                'max': str(self.window_max),
                'last': str(self.last),
            },
        }


def dimension_profile(G: TreeGroup, n_max: int) -> DimensionProfile:
    '''
    >>> from tree_dimension_utils.automaton_utils import catalog
    >>> profile = dimension_profile(catalog('odometer').unfold(4), 4)
    >>> [str(r.ratio) for r in profile.records]
    ['1', '2/3', '3/7', '4/15']
    '''
    if not 1 <= n_max <= G.depth:
        raise DepthExceededError(
            f'n_max {n_max} outside 1..{G.depth} of {G.label}')

    profile = DimensionProfile(G.label, G.shape, G.depth)
    for n in range(1, n_max + 1):
        num = image_log_index(G, n)
        den = ambient_log_index(G.shape, n)
        profile.records.append(DimensionRecord(n, num, den, log_ratio(num, den)))
        LOGGER.debug('%s: r_%s = %s', G.label, n, profile.records[-1].ratio)
    LOGGER.info(
        'Profile of %s at depth %s: last ratio %s', G.label, G.depth,
        profile.last)
    return profile


@dataclass
class InequalityCheck:
    '''
    Both sides of a finite-depth log-index inequality left <= right.
    '''
    name: str
    params: Mapping[str, Any]
    left: LogIndex
    right: LogIndex

    @property
    def holds(self) -> bool:
        return self.left <= self.right

    @property
    def equality(self) -> bool:
        return self.left.value == self.right.value

    def to_record(self) -> Mapping[str, Any]:
        return {
            'check': self.name,
            **self.params,
            'left': str(self.left),
            'right': str(self.right),
            'holds': self.holds,
        }


class LevelIndexTable:
    '''
    Level-image orders of G and of its level-k projections, computed once
    and shared by every (k, n) check. The level-m action of a truncation
    only depends on the first m levels, so all checks read the full-depth
    group.

    >>> from tree_dimension_utils.automaton_utils import catalog
    >>> table = LevelIndexTable(catalog('odometer').unfold(4))
    >>> [c.holds for c in table.sweep()].count(False)
    0
    '''

    def __init__(self, G: TreeGroup):
        self.G = G
        self._projections: Dict[int, List[Tuple[TreeGroup, int]]] = {}

    def projections(self, k: int) -> List[Tuple[TreeGroup, int]]:
        '''
        (G_v, orbit size) for one vertex v per orbit on level k. Projections
        at vertices of one orbit are conjugate.
        '''
        if k not in self._projections:
            self._projections[k] = [
                (projection(self.G, self.G.shape.vertex_at(k, orbit[0])),
                 len(orbit))
                for orbit in self.G.level_group(k).orbits()
            ]
            LOGGER.debug(
                '%s: %s projections at level %s',
                self.G.label, len(self._projections[k]), k)
        return self._projections[k]

    def check(self, k: int, n: int) -> InequalityCheck:
        if k + n > self.G.depth:
            raise DepthExceededError(
                f'k + n = {k + n} exceeds depth {self.G.depth} of '
                f'{self.G.label}')
        left = LogIndex.of(
            level_image(self.G, k + n).order()
            // level_image(self.G, k).order())
        right = LogIndex(1)
        if n:
            for P, size in self.projections(k):
                right = right + LogIndex.of(
                    level_image(P, n).order()).scaled(size)
        check = InequalityCheck(
            'level_index', {'k': k, 'n': n, 'depth': k + n}, left, right)
        LOGGER.debug(
            '%s, k=%s n=%s: %s <= %s is %s',
            self.G.label, k, n, left, right, check.holds)
        return check

    def sweep(self, total: int = None) -> List[InequalityCheck]:
        '''
        Checks for every k >= 0, n >= 1 with k + n <= total (default: the
        depth).
        '''
        total = self.G.depth if total is None else total
        return [
            self.check(k, n)
            for k in range(total)
            for n in range(1, total - k + 1)
        ]


def check_level_index_inequality(
    G: TreeGroup,
    k: int,
    n: int,
) -> InequalityCheck:
    '''
    log|St_G(k) : St_G(k+n)| <= sum over v in L_k of log|G_v : St_{G_v}(n)|,
    on the truncation at depth k + n.
    '''
    return LevelIndexTable(G).check(k, n)


def level_index_sweep(G: TreeGroup, total: int = None) -> List[InequalityCheck]:
    return LevelIndexTable(G).sweep(total)


def rist_level_one_trivial(P: TreeGroup) -> bool:
    return all(r.is_trivial() for r in rigid_level_stabilizer(P, 1))


def trivial_rist_projection_bound(
    G: TreeGroup,
    v: Sequence[int],
    n: int,
) -> InequalityCheck:
    '''
    When Rist_{G_v}(1) is trivial, dropping the last child embeds
    St_{G_v}(1) in the product of the other child projections:

    log|St_{G_v}(1) : St_{G_v}(1+n)| <= sum over the first m-1 children w of
    log|G_{vw} : St(n)|.

    Computed on the truncation at depth |v| + 1 + n.
    '''
    v = tuple(v)
    if n < 1:
        raise PreconditionError(f'n must be positive, got {n}')
    depth = len(v) + 1 + n
    if depth > G.depth:
        raise DepthExceededError(
            f'|v| + 1 + n = {depth} exceeds depth {G.depth} of {G.label}')

    P = projection(G.truncate(depth), v)
    if not rist_level_one_trivial(P):
        raise InapplicableError(
            f'Rist(1) of the projection at {format_vertex(v)} is nontrivial')

    left = LogIndex.of(
        level_image(P, 1 + n).order() // level_image(P, 1).order())
    right = LogIndex(1)
    for w in range(P.shape.degree(0) - 1):
        right = right + LogIndex.of(
            level_image(projection(P, (w,)), n).order())
    return InequalityCheck(
        'trivial_rist_projection',
        {'vertex': format_vertex(v), 'n': n, 'depth': depth},
        left,
        right,
    )


@dataclass
class DecayStep:
    vertex: Vertex
    trivial_rist: bool
    factor: Fraction
    left: LogIndex
    right: LogIndex

    @property
    def holds(self) -> bool:
        return self.left <= self.right


@dataclass
class DecayCertificate:
    '''
    Finite-depth decay chain along a path.

    Step j checks X_j <= log(m_j!) + sum of X over the counted children of
    v_j, X being the log order of a projection at the truncation depth.
    Every child counts except the last one below vertices with trivial
    Rist(1); on level-transitive projections this reads
    X_j <= log(m_j!) + c_j * m_j * X_{j+1} with c_j = (m_j - 1) / m_j on
    those vertices and 1 elsewhere. product is the product of the c_j.
    '''
    label: str
    path: Vertex
    depth: int
    steps: List[DecayStep]
    product: Fraction
    r_root: Ratio
    r_end: Ratio

    @property
    def holds(self) -> bool:
        return all(s.holds for s in self.steps)

    @property
    def trivial_rist_vertices(self) -> List[Vertex]:
        return [s.vertex for s in self.steps if s.trivial_rist]

    def to_record(self) -> Mapping[str, Any]:
        return {
            'group': self.label,
            'path': format_vertex(self.path),
            'depth': self.depth,
            'steps': [{
                'vertex': format_vertex(s.vertex),
                'trivial_rist': s.trivial_rist,
                'factor': str(s.factor),
                'left': str(s.left),
                'right': str(s.right),
                'holds': s.holds,
            } for s in self.steps],
            'product': str(self.product),
            'r_root': str(self.r_root),
            'r_end': str(self.r_end),
            'holds': self.holds,
        }


def decay_certificate(
    G: TreeGroup,
    path: Sequence[int],
    n_levels: int,
) -> DecayCertificate:
    '''
    Walks the first n_levels digits of path. Needs depth >= n_levels + 1 so
    that each visited projection has a level-1 rigid stabilizer to inspect.
    With no trivial-Rist vertex on the path the product is 1 and only the
    recurrence is checked.
    '''
    path = tuple(path)
    if len(path) < n_levels:
        raise PreconditionError(
            f'path {format_vertex(path)} is shorter than {n_levels} levels')
    if n_levels + 1 > G.depth:
        raise DepthExceededError(
            f'{n_levels} levels need depth {n_levels + 1}, got {G.depth}')
    G.shape.check_vertex(path[:n_levels])

    steps = []
    product = Fraction(1)
    P = G
    for j in range(n_levels):
        v = path[:j]
        m = P.shape.degree(0)
        trivial = rist_level_one_trivial(P)
        factor = Fraction(m - 1, m) if trivial else Fraction(1)
        product *= factor

        children = [projection(P, (w,)) for w in range(m)]
        counted = children[:-1] if trivial else children
        right = LogIndex.of(math.factorial(m))
        for C in counted:
            right = right + LogIndex.of(C.leaf_group.order())
        step = DecayStep(
            v, trivial, factor, LogIndex.of(P.leaf_group.order()), right)
        if not step.holds:
            LOGGER.error(
                'Decay step at %s of %s fails: %s > %s',
                format_vertex(v), G.label, step.left, step.right)
        steps.append(step)
        P = children[path[j]]

    certificate = DecayCertificate(
        G.label,
        path[:n_levels],
        G.depth,
        steps,
        product,
        log_ratio(LogIndex.of(G.leaf_group.order()),
                  ambient_log_index(G.shape, G.depth)),
        log_ratio(LogIndex.of(P.leaf_group.order()),
                  ambient_log_index(P.shape, P.depth)),
    )
    LOGGER.info(
        'Decay certificate for %s along %s: product %s, r_root %s, r_end %s',
        G.label, format_vertex(certificate.path), product,
        certificate.r_root, certificate.r_end)
    return certificate
