#!/usr/bin/env python3

'''
Level images, stabilizers, projections and rigid stabilizers of truncated
tree groups, with finite-depth evidence for weak branchness.

Group elements are handled in the leaf action of the truncation: a portrait
of depth d is determined by the permutation it induces on the level-d
vertices, and every stabilizer is a stabilizer of leaves.
'''

from dataclasses import dataclass, field
from functools import cached_property
import itertools
import logging
import os
import re
from typing import (
    Any,
    Callable,
    Dict,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

from .config_utils import ENUMERATION_LIMIT
from .errors import (
    BudgetExceededError,
    DepthExceededError,
    FormatError,
    PreconditionError,
)
from .automaton_utils import TreeGroup
from .perm_utils import (
    Perm,
    PermGroup,
    commutator,
    conjugate,
    dedupe_generators,
    identity_perm,
    is_identity,
    perm_inv,
    perm_mul,
    perm_pow,
)
from .tree_utils import (
    Portrait,
    TreeShape,
    Vertex,
    format_vertex,
    from_level_perm,
)

LOGGER = logging.getLogger(__name__)
LOGGER.setLevel(os.getenv('LOG_LEVEL', 'INFO'))


@dataclass
class LevelImage:
    group: PermGroup
    level: int
    label: str
    depth: int

    def order(self) -> int:
        return self.group.order()


def level_image(G: TreeGroup, n: int) -> LevelImage:
    '''
    Action of G on the level-n vertices; its order is |G_d : St_{G_d}(n)|.
    '''
    if n > G.depth:
        raise DepthExceededError(
            f'level {n} is deeper than the truncation depth {G.depth}')
    return LevelImage(G.level_group(n), n, G.label, G.depth)


def leaf_to_level(p: Perm, block: int) -> Perm:
    '''
    Permutation of a level induced by a leaf permutation; block is the
    number of leaves under each vertex of that level.

    >>> leaf_to_level((2, 3, 1, 0), 2)
    (1, 0)
    '''
    return tuple(p[i * block] // block for i in range(len(p) // block))


def restrict_to_block(p: Perm, block: range) -> Perm:
    '''
    Action on the leaves of a block that p maps onto itself, relabelled
    from 0.
    '''
    start = block.start
    return tuple(p[i] - start for i in block)


def _vertex_check(G: TreeGroup, v: Sequence[int]) -> Vertex:
    v = tuple(v)
    if len(v) > G.depth:
        raise DepthExceededError(
            f'vertex {format_vertex(v)} is deeper than depth {G.depth}')
    return G.shape.check_vertex(v)


def leaf_transversal(G: TreeGroup, v: Sequence[int]) -> Dict[int, Perm]:
    '''
    Breadth-first orbit of v over the generators, as {index of v^g in its
    level: leaf permutation of g}. Iteration order is the discovery order.
    '''
    v = _vertex_check(G, v)
    level = len(v)
    block = G.leaf_count // G.shape.level_size(level)
    start = G.shape.vertex_index(v)

    transversal = {start: identity_perm(G.leaf_count)}
    queue = [start]
    for q in queue:
        u = transversal[q]
        for s in G.leaf_perms:
            image = s[q * block] // block
            if image not in transversal:
                transversal[image] = perm_mul(u, s)
                queue.append(image)
    return transversal


def orbit_transversal(G: TreeGroup, v: Sequence[int]) -> Dict[Vertex, Portrait]:
    '''
    Deterministic transversal of the orbit of v: {w: element mapping v to w}.
    '''
    v = _vertex_check(G, v)
    return {
        G.shape.vertex_at(len(v), q): from_level_perm(G.shape, G.depth, u)
        for q, u in leaf_transversal(G, v).items()
    }


def is_level_transitive(G: TreeGroup, n: int) -> bool:
    '''
    Whether the orbit of the all-zeros level-n vertex is the whole level.
    '''
    if n > G.depth:
        raise DepthExceededError(
            f'level {n} is deeper than the truncation depth {G.depth}')
    return len(G.level_group(n).orbit(0)) == G.shape.level_size(n)


def schreier_generators(
    generators: Sequence[Perm],
    transversal: Mapping[Any, Perm],
    act: Callable[[Any, Perm], Any],
) -> Tuple[Perm, ...]:
    '''
    Schreier generators u_q s u_{q^s}^-1 of a point stabilizer, from a
    transversal {q: u_q} of the orbit and the action of a generator s on
    orbit points.
    '''
    gens = []
    for q, u in transversal.items():
        for s in generators:
            image = act(q, s)
            gens.append(perm_mul(perm_mul(u, s), perm_inv(transversal[image])))
    return dedupe_generators(gens)


def vertex_stabilizer(G: TreeGroup, v: Sequence[int]) -> PermGroup:
    '''
    st_G(v) in the leaf action, generated by Schreier generators.
    '''
    v = _vertex_check(G, v)
    block = G.leaf_count // G.shape.level_size(len(v))
    gens = schreier_generators(
        G.leaf_perms,
        leaf_transversal(G, v),
        lambda q, s: s[q * block] // block,
    )
    return PermGroup(G.leaf_count, gens)


def level_stabilizer(
    G: TreeGroup,
    n: int,
    limit: int = None,
) -> PermGroup:
    '''
    St_G(n) in the leaf action: Schreier generators over a transversal of
    the level-n image, enumerated breadth-first.
    '''
    limit = ENUMERATION_LIMIT if limit is None else limit
    if n > G.depth:
        raise DepthExceededError(
            f'level {n} is deeper than the truncation depth {G.depth}')
    image_order = G.level_group(n).order()
    if image_order > limit:
        raise BudgetExceededError(
            f'level-{n} image of order {image_order} exceeds the enumeration '
            f'limit {limit}')

    block = G.leaf_count // G.shape.level_size(n)

    def act(q, s):
        return perm_mul(q, leaf_to_level(s, block))

    identity = identity_perm(G.shape.level_size(n))
    transversal = {identity: identity_perm(G.leaf_count)}
    queue = [identity]
    for q in queue:
        u = transversal[q]
        for s in G.leaf_perms:
            image = act(q, s)
            if image not in transversal:
                transversal[image] = perm_mul(u, s)
                queue.append(image)

    assert len(transversal) == image_order
    gens = schreier_generators(G.leaf_perms, transversal, act)
    LOGGER.debug(
        'St(%s) of %s at depth %s: %s Schreier generators',
        n, G.label, G.depth, len(gens))
    return PermGroup(G.leaf_count, gens)


def projection(G: TreeGroup, v: Sequence[int]) -> TreeGroup:
    '''
    G_v: sections at v of the stabilizer of v, a group on the subtree below
    v truncated at depth d - |v|.
    '''
    v = _vertex_check(G, v)
    if len(v) >= G.depth:
        raise DepthExceededError(
            f'no subtree below {format_vertex(v)} at depth {G.depth}')
    if not v:
        return G

    block = G.shape.leaf_block(v, G.depth)
    subshape = G.shape.subshape(len(v))
    sections = [
        restrict_to_block(h, block)
        for h in vertex_stabilizer(G, v).generators
    ]
    return TreeGroup.from_level_perms(
        subshape,
        G.depth - len(v),
        sections,
        label=f'{G.label}@{format_vertex(v)}',
    )


@dataclass(frozen=True)
class RigidStabilizer:
    '''
    rist(v) of a truncation: elements fixing every leaf outside the
    subtree of v.
    '''
    vertex: Vertex
    shape: TreeShape
    depth: int
    leaf_generators: Tuple[Perm, ...]

    @property
    def block(self) -> range:
        return self.shape.leaf_block(self.vertex, self.depth)

    @cached_property
    def group(self) -> PermGroup:
        return PermGroup(self.shape.level_size(self.depth), self.leaf_generators)

    @cached_property
    def subtree_group(self) -> PermGroup:
        '''
        Induced action on the leaves below the vertex.
        '''
        return PermGroup(len(self.block), [
            restrict_to_block(h, self.block) for h in self.leaf_generators
        ])

    @cached_property
    def generators(self) -> Tuple[Portrait, ...]:
        return tuple(
            from_level_perm(self.shape, self.depth, h)
            for h in self.leaf_generators
        )

    def is_trivial(self) -> bool:
        return not self.leaf_generators

    def order(self) -> int:
        return self.group.order()


def rigid_stabilizer(G: TreeGroup, v: Sequence[int]) -> RigidStabilizer:
    '''
    Pointwise stabilizer of the leaves outside the subtree of v. Fixing
    those leaves fixes every vertex outside the subtree.
    '''
    v = _vertex_check(G, v)
    if len(v) >= G.depth and G.depth > 0:
        raise DepthExceededError(
            f'no subtree below {format_vertex(v)} at depth {G.depth}')
    block = G.shape.leaf_block(v, G.depth)
    outside = [p for p in range(G.leaf_count) if p not in block]
    stabilizer = G.leaf_group.pointwise_stabilizer(outside)
    return RigidStabilizer(v, G.shape, G.depth, stabilizer.generators)


def rigid_level_stabilizer(G: TreeGroup, n: int) -> List[RigidStabilizer]:
    '''
    rist(v) for every level-n vertex, in lexicographic order.

    One pointwise stabilizer is computed per orbit of the level; the other
    vertices of the orbit get it conjugated by a transversal element, since
    rist(v^g) = rist(v)^g.
    '''
    if n >= G.depth and G.depth > 0:
        raise DepthExceededError(
            f'level {n} leaves no subtree at depth {G.depth}')

    results: Dict[int, RigidStabilizer] = {}
    for index, v in enumerate(G.shape.vertices(n)):
        if index in results:
            continue
        base = rigid_stabilizer(G, v)
        results[index] = base
        for q, u in leaf_transversal(G, v).items():
            if q not in results:
                results[q] = RigidStabilizer(
                    G.shape.vertex_at(n, q),
                    G.shape,
                    G.depth,
                    dedupe_generators(
                        conjugate(h, u) for h in base.leaf_generators),
                )

    LOGGER.debug(
        'Rist(%s) of %s at depth %s: trivial flags %s',
        n, G.label, G.depth,
        [results[i].is_trivial() for i in range(len(results))])
    return [results[i] for i in range(G.shape.level_size(n))]


@dataclass
class LevelEvidence:
    level: int
    transitive: bool
    rist_trivial_flags: Tuple[bool, ...]
    depth: int
    margin: int

    @property
    def positive(self) -> bool:
        return self.transitive and not any(self.rist_trivial_flags)

    def to_record(self) -> Mapping[str, Any]:
        return {
            'level': self.level,
            'transitive': self.transitive,
            'rist_trivial_flags': list(self.rist_trivial_flags),
            'depth': self.depth,
            'margin': self.margin,
        }


@dataclass
class EvidenceReport:
    '''
    Weak-branchness evidence at finite depth. A positive verdict is never a
    proof: truncated rigid stabilizers over-approximate the true ones.
    '''
    label: str
    records: List[LevelEvidence] = field(default_factory=list)

    @property
    def positive(self) -> bool:
        return all(r.positive for r in self.records)

    @property
    def verdict(self) -> str:
        if self.positive:
            return 'positive-evidence-at-depth'
        return 'negative-evidence-at-depth'


def _level_evidence(H: TreeGroup, n: int, margin: int) -> LevelEvidence:
    return LevelEvidence(
        level=n,
        transitive=is_level_transitive(H, n),
        rist_trivial_flags=tuple(
            r.is_trivial() for r in rigid_level_stabilizer(H, n)),
        depth=H.depth,
        margin=margin,
    )


def weakly_branch_evidence(
    G: TreeGroup,
    n_max: int,
    margin: int,
) -> EvidenceReport:
    '''
    Level-transitivity and Rist nontriviality flags for n = 1..n_max, each
    level computed on the truncation at depth n + margin.
    '''
    if margin < 1:
        raise PreconditionError(f'margin must be positive, got {margin}')
    if n_max + margin > G.depth:
        raise DepthExceededError(
            f'n_max + margin = {n_max + margin} exceeds depth {G.depth}')

    report = EvidenceReport(G.label)
    for n in range(1, n_max + 1):
        report.records.append(
            _level_evidence(G.truncate(n + margin), n, margin))
    LOGGER.info('Evidence for %s: %s', G.label, report.verdict)
    return report


def projection_branch_level(
    G: TreeGroup,
    max_level: int,
    margin: int,
) -> Tuple[Optional[int], List[EvidenceReport]]:
    '''
    First level k whose projection at the leftmost level-k vertex shows
    weak-branch evidence at levels 1..margin-1, each projection computed
    from the truncation at depth k + margin.

    Returns: (level, reports)
    - level: the first such k, or None when none is found up to max_level
    - reports: one evidence report per scanned level
    '''
    if margin < 2:
        raise PreconditionError(f'margin must be at least 2, got {margin}')
    if max_level + margin > G.depth:
        raise DepthExceededError(
            f'max_level + margin = {max_level + margin} exceeds depth '
            f'{G.depth}')

    reports = []
    for k in range(max_level + 1):
        H = projection(G.truncate(k + margin), (0,) * k)
        report = EvidenceReport(H.label, [
            _level_evidence(H, n, margin - n) for n in range(1, margin)
        ])
        reports.append(report)
        if report.positive:
            return k, reports
    return None, reports


def check_rist_in_normal_closure(
    G: TreeGroup,
    g: Portrait,
    v: Sequence[int],
) -> bool:
    '''
    Whether the commutators of rist(v) generators all lie in the normal
    closure of g; since that closure is normal, this decides whether it
    contains rist(v)'.
    '''
    v = _vertex_check(G, v)
    if g.depth != G.depth or g.shape != G.shape:
        raise PreconditionError('g must be a portrait of the truncation')
    if g.is_identity():
        raise PreconditionError('g must be nontrivial in the truncation')
    if len(G.level_group(len(v)).orbit(G.shape.vertex_index(v))) == 1:
        raise PreconditionError(
            f'vertex {format_vertex(v)} is not moved by the group')

    closure = G.leaf_group.normal_closure([g.leaf_perm])
    rist = rigid_stabilizer(G, v).leaf_generators
    for i, x in enumerate(rist):
        for y in rist[i + 1:]:
            c = commutator(x, y)
            if not is_identity(c) and not closure.contains(c):
                LOGGER.info(
                    'Commutator of rist(%s) outside the normal closure',
                    format_vertex(v))
                return False
    return True


@dataclass
class CenterRecord:
    level: int
    order: int


def center_level_profile(
    G: TreeGroup,
    n_max: int = None,
    limit: int = None,
) -> List[CenterRecord]:
    '''
    Orders of Z(G_d) ∩ St(n) for n = 0..n_max, G_d the leaf image.
    '''
    n_max = G.depth if n_max is None else n_max
    if n_max > G.depth:
        raise DepthExceededError(f'n_max {n_max} exceeds depth {G.depth}')

    center = G.leaf_group.center()
    elements = center.elements(limit)
    records = []
    for n in range(n_max + 1):
        block = G.leaf_count // G.shape.level_size(n)
        order = sum(
            1 for z in elements if is_identity(leaf_to_level(z, block)))
        records.append(CenterRecord(n, order))
    return records


WORD_TOKEN_RX = re.compile(r'\s*(?:(?P<letter>[a-z])|(?P<power>\^-?\d+)|'
                           r'(?P<punct>[\[\],()*]))')


def parse_word(text: str):
    '''
    Parses a group word into a tree of ('var', x), ('mul', [...]),
    ('pow', node, k) and ('comm', u, v) nodes. Letters are variables,
    juxtaposition or `*` multiplies, `^k` takes powers and `[u,v]` is the
    commutator u^-1 v^-1 u v.

    >>> parse_word('[x,y]^2')
    ('pow', ('comm', ('var', 'x'), ('var', 'y')), 2)
    '''
    tokens = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = WORD_TOKEN_RX.match(text, pos)
        if not m or m.end() == pos:
            raise FormatError(f'Invalid character in word {text!r} at {pos}')
        tokens.append(m.group('letter') or m.group('power') or m.group('punct'))
        pos = m.end()

    def parse_product(i):
        factors = []
        while i < len(tokens) and tokens[i] not in (']', ',', ')'):
            if tokens[i] == '*':
                i += 1
                continue
            node, i = parse_factor(i)
            factors.append(node)
        if not factors:
            raise FormatError(f'Empty subword in {text!r}')
        node = factors[0] if len(factors) == 1 else ('mul', factors)
        return node, i

    def parse_factor(i):
        token = tokens[i]
        if token == '[':
            left, i = parse_product(i + 1)
            if i >= len(tokens) or tokens[i] != ',':
                raise FormatError(f'Expected "," in {text!r}')
            right, i = parse_product(i + 1)
            if i >= len(tokens) or tokens[i] != ']':
                raise FormatError(f'Expected "]" in {text!r}')
            node, i = ('comm', left, right), i + 1
        elif token == '(':
            node, i = parse_product(i + 1)
            if i >= len(tokens) or tokens[i] != ')':
                raise FormatError(f'Expected ")" in {text!r}')
            i += 1
        elif re.fullmatch('[a-z]', token):
            node, i = ('var', token), i + 1
        else:
            raise FormatError(f'Unexpected {token!r} in {text!r}')

        while i < len(tokens) and tokens[i].startswith('^'):
            node, i = ('pow', node, int(tokens[i][1:])), i + 1
        return node, i

    node, i = parse_product(0)
    if i != len(tokens):
        raise FormatError(f'Unbalanced word {text!r}')
    return node


def word_variables(node) -> List[str]:
    kind = node[0]
    if kind == 'var':
        return [node[1]]
    if kind == 'mul':
        names = [x for child in node[1] for x in word_variables(child)]
    elif kind == 'pow':
        names = word_variables(node[1])
    else:
        names = word_variables(node[1]) + word_variables(node[2])
    return sorted(set(names))


def evaluate_word(node, assignment: Mapping[str, Perm], degree: int) -> Perm:
    kind = node[0]
    if kind == 'var':
        return assignment[node[1]]
    if kind == 'mul':
        result = identity_perm(degree)
        for child in node[1]:
            result = perm_mul(result, evaluate_word(child, assignment, degree))
        return result
    if kind == 'pow':
        return perm_pow(evaluate_word(node[1], assignment, degree), node[2])
    return commutator(
        evaluate_word(node[1], assignment, degree),
        evaluate_word(node[2], assignment, degree),
    )


@dataclass
class LawCheck:
    word: str
    level: int
    holds: bool
    counterexample: Optional[Mapping[str, Perm]] = None


def law_holds(
    G: TreeGroup,
    word: str,
    n: int,
    limit: int = None,
) -> LawCheck:
    '''
    Evaluates the word on every tuple of elements of the level-n image.
    '''
    limit = ENUMERATION_LIMIT if limit is None else limit
    node = parse_word(word)
    variables = word_variables(node)
    image = level_image(G, n).group
    order = image.order()
    if order ** len(variables) > limit:
        raise BudgetExceededError(
            f'{order}^{len(variables)} assignments exceed the enumeration '
            f'limit {limit}')

    elements = image.elements(limit)
    for values in itertools.product(elements, repeat=len(variables)):
        assignment = dict(zip(variables, values))
        if not is_identity(evaluate_word(node, assignment, image.degree)):
            return LawCheck(word, n, False, assignment)
    return LawCheck(word, n, True)
