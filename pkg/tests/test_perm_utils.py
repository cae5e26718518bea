from hypothesis import given, strategies as st
import pytest

from tree_dimension_utils.errors import BudgetExceededError, FormatError
from tree_dimension_utils.perm_utils import (
    PermGroup,
    commutator,
    commute,
    conjugate,
    identity_perm,
    parse_perm,
    perm_inv,
    perm_mul,
    perm_pow,
)
from .common_utils import (
    DIHEDRAL4,
    SYM3,
    closure,
    conjugate_closure,
)


perms5 = st.permutations(range(5)).map(tuple)


@given(perms5, perms5, perms5)
def test_perm_mul_is_associative(p, q, r):
    assert perm_mul(perm_mul(p, q), r) == perm_mul(p, perm_mul(q, r))


@given(perms5)
def test_perm_inv(p):
    assert perm_mul(p, perm_inv(p)) == identity_perm(5)
    assert perm_pow(p, -3) == perm_inv(perm_pow(p, 3))


@given(perms5, perms5)
def test_commutator_vanishes_iff_commute(p, q):
    assert (commutator(p, q) == identity_perm(5)) == commute(p, q)


def test_parse_perm_rejects_non_permutations():
    with pytest.raises(FormatError):
        parse_perm('0,0,1')
    with pytest.raises(FormatError):
        parse_perm('1,0', degree=3)


@pytest.mark.parametrize('generators,degree,order', [
    (SYM3, 3, 6),
    (DIHEDRAL4, 4, 8),
    ([(1, 2, 3, 4, 0)], 5, 5),
    ([(1, 0, 2, 3), (0, 1, 3, 2)], 4, 4),
])
def test_order_matches_closure(generators, degree, order):
    G = PermGroup(degree, generators)
    assert G.order() == order == len(closure(generators, degree))
    assert set(G.elements()) == closure(generators, degree)


def test_membership_and_subgroups():
    G = PermGroup(4, DIHEDRAL4)
    assert G.contains((2, 3, 0, 1))
    assert not G.contains((1, 0, 2, 3))

    rotations = PermGroup(4, [(1, 2, 3, 0)])
    assert rotations.is_subgroup_of(G)
    assert rotations.is_normal_in(G)
    assert not PermGroup(4, [(0, 3, 2, 1)]).is_normal_in(G)


def test_normal_closure_matches_exhaustive_conjugation():
    elements = closure(DIHEDRAL4, 4)
    G = PermGroup(4, DIHEDRAL4)
    reflection = (0, 3, 2, 1)
    N = G.normal_closure([reflection])
    assert set(N.elements()) == conjugate_closure({reflection}, elements)
    assert N.order() == 4


def test_derived_center_and_core():
    S4 = PermGroup(4, [(1, 0, 2, 3), (1, 2, 3, 0)])
    assert S4.derived_subgroup().order() == 12
    assert S4.center().is_trivial()

    D4 = PermGroup(4, DIHEDRAL4)
    assert D4.center().elements() == sorted([(0, 1, 2, 3), (2, 3, 0, 1)])
    core = S4.normal_core(D4)
    assert core.order() == 4
    assert core.is_normal_in(S4)


def test_pointwise_stabilizer_and_extension():
    S4 = PermGroup(4, [(1, 0, 2, 3), (1, 2, 3, 0)])
    assert S4.pointwise_stabilizer([0, 1]).order() == 2
    g = S4.extend_partial({0: 2, 1: 3})
    assert g[:2] == (2, 3)
    assert S4.contains(g)

    C4 = PermGroup(4, [(1, 2, 3, 0)])
    assert C4.extend_partial({0: 1, 1: 3}) is None


def test_orbits_and_restriction():
    G = PermGroup(6, [(1, 0, 2, 4, 5, 3)])
    assert G.orbits() == [(0, 1), (2,), (3, 4, 5)]
    assert G.restrict([3, 4, 5]).order() == 3
    with pytest.raises(ValueError):
        G.restrict([0, 2])


def test_conjugate_group():
    G = PermGroup(3, [(1, 0, 2)])
    c = (1, 2, 0)
    H = G.conjugate(c)
    assert H.generators == (conjugate((1, 0, 2), c),)


def test_elements_budget():
    S5 = PermGroup(5, [(1, 0, 2, 3, 4), (1, 2, 3, 4, 0)])
    with pytest.raises(BudgetExceededError):
        S5.elements(limit=100)
