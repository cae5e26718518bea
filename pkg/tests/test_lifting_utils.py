import itertools
import logging

import pytest

from tree_dimension_utils.automaton_utils import TreeGroup
from tree_dimension_utils.errors import (
    HypothesisError,
    MissingConjugatorError,
    NonMemberError,
)
from tree_dimension_utils.lifting_utils import (
    BlockedGroup,
    lift_decompose,
    lift_oracle,
    tree_lifting,
)
from tree_dimension_utils.perm_utils import PermGroup, identity_perm, perm_mul
from tree_dimension_utils.tree_utils import TreeShape
from .common_utils import (
    DIHEDRAL4,
    SYM3,
    SYM3_CUBE_KINDS,
    block_swap,
    embed,
    even_weight_cube,
    subdirect_squares,
    sym3_cube,
    sym3_cube_ambient,
)


def check_witness(witness):
    '''
    Compares the witness with the enumeration oracle and checks the lifts
    elementwise: unique tails and a homomorphic resolver.
    '''
    B = witness.blocked
    oracle = lift_oracle(B)
    assert witness.index == oracle.index
    assert not witness.N.is_trivial()
    assert witness.N.is_subgroup_of(oracle.core)
    assert witness.N.is_normal_in(B.block_groups[0])

    H = B.H.elements()
    N = witness.N.elements()
    for a in N:
        g = witness.resolve(a)
        assert B.component(g, 0) == a
        assert B.trivial_on(g, 1, witness.index)
        matches = [
            h for h in H
            if B.component(h, 0) == a and B.trivial_on(h, 1, witness.index)
        ]
        assert matches == [g]
    for a, b in itertools.product(N, repeat=2):
        assert witness.resolve(perm_mul(a, b)) == \
            perm_mul(witness.resolve(a), witness.resolve(b))


@pytest.mark.parametrize('generators,degree', [(SYM3, 3), (DIHEDRAL4, 4)])
def test_subdirect_squares_match_oracle(generators, degree):
    corpus = subdirect_squares(generators, degree)
    assert corpus
    indices = set()
    for B in corpus:
        witness = lift_decompose(B)
        check_witness(witness)
        indices.add(witness.index)
    assert indices == {0, 1}


@pytest.mark.parametrize('kind', SYM3_CUBE_KINDS)
def test_sym3_cube(kind):
    B, expected = sym3_cube(kind)
    witness = lift_decompose(B)
    assert witness.index == expected
    check_witness(witness)
    if kind == 'sign_product':
        assert witness.N.order() == 3


def test_block_zero_stabilizer_seeds_kernel(caplog):
    B = even_weight_cube()
    with caplog.at_level(logging.WARNING):
        witness = lift_decompose(B)
    assert 'seeding N from the block-0 stabilizer' in caplog.text
    assert witness.index == 1
    assert witness.N.order() == 2
    check_witness(witness)


def test_diagonal_lifts_whole_block_group():
    B, _ = sym3_cube('diagonal')
    witness = lift_decompose(B)
    assert witness.N.same_group(B.block_groups[0])
    assert witness.resolve((1, 0, 2)) == embed([(1, 0, 2)] * 3, 3)


def test_resolve_rejects_non_members():
    witness = lift_decompose(sym3_cube('sign_product')[0])
    with pytest.raises(NonMemberError):
        witness.resolve((1, 0, 2))


def test_non_normalizing_conjugator():
    e = identity_perm(3)
    H = PermGroup(9, [embed([g, e, e], 3) for g in SYM3] +
                  [embed([e, g, g], 3) for g in SYM3])
    B = BlockedGroup(
        sym3_cube_ambient(),
        [tuple(range(3 * j, 3 * j + 3)) for j in range(3)],
        H,
        conjugators={j: block_swap(0, j, 3, 3) for j in (1, 2)},
    )
    with pytest.raises(HypothesisError, match='does not normalize'):
        lift_decompose(B)


def test_missing_conjugator():
    e = identity_perm(3)
    gens = [embed([g, e], 3) for g in SYM3] + [embed([e, g], 3) for g in SYM3]
    H = PermGroup(6, gens)
    B = BlockedGroup(H, [(0, 1, 2), (3, 4, 5)], H)
    with pytest.raises(MissingConjugatorError):
        lift_decompose(B)


def test_blocked_group_errors():
    e = identity_perm(3)
    S3xS3 = PermGroup(6, [embed([g, e], 3) for g in SYM3] +
                      [embed([e, g], 3) for g in SYM3])
    with pytest.raises(HypothesisError, match='equal sizes'):
        BlockedGroup(S3xS3, [(0, 1), (2, 3, 4, 5)], S3xS3)
    with pytest.raises(HypothesisError, match='cover'):
        BlockedGroup(S3xS3, [(0, 1, 2)], S3xS3)

    swap = block_swap(0, 1, 2, 3)
    wreath = PermGroup(6, list(S3xS3.generators) + [swap])
    with pytest.raises(HypothesisError, match='invariant'):
        BlockedGroup(wreath, [(0, 1, 2), (3, 4, 5)], wreath)
    with pytest.raises(HypothesisError, match='does not project'):
        BlockedGroup(S3xS3, [(0, 1, 2), (3, 4, 5)], S3xS3,
                     block_groups=[PermGroup(3, SYM3), PermGroup(3, [(1, 2, 0)])])


def test_odometer_lift_is_degenerate(unfold):
    witness = tree_lifting(unfold('odometer', 3), 1)
    assert witness.index == 0
    assert witness.N.order() == 4
    assert witness.N.same_group(witness.blocked.block_groups[0])


def test_grigorchuk_lift(unfold):
    witness = tree_lifting(unfold('grigorchuk', 4), 1)
    assert witness.index == 1
    check_witness(witness)

    record = witness.to_record()
    assert record['k'] == 1
    assert record['block_size'] == 8
    assert record['N_order'] == witness.N.order()
    assert len(record['lifts']) == len(witness.N.generators)


def test_tree_lifting_preconditions(unfold):
    with pytest.raises(HypothesisError):
        tree_lifting(unfold('odometer', 3), 2)
    left_swap = TreeGroup.from_level_perms(
        TreeShape((2, 2, 2)), 3, [(2, 3, 0, 1, 4, 5, 6, 7)])
    with pytest.raises(HypothesisError, match='transitive'):
        tree_lifting(left_swap, 1)
