import pytest

from tree_dimension_utils.errors import (
    FormatError,
    HypothesisError,
    IncompatibleError,
    PreconditionError,
    SearchExhaustedError,
)
from tree_dimension_utils.matrix_utils import block_construction
from tree_dimension_utils.ncrep_utils import (
    Graph,
    NCRep,
    construct_vn_via_lifting,
    construct_vn_weakly_branch,
    dump_ncrep,
    find_noncommuting_pair,
    load_ncrep,
    verify,
)
from tree_dimension_utils.perm_utils import commute
from tree_dimension_utils.tree_utils import Portrait, TreeShape


def test_graph():
    assert Graph.vn(3).edge_list() == [(0, 1), (2, 3), (4, 5)]
    G = Graph(3, frozenset({(2, 0)}))
    assert G.adjacent(0, 2) and G.adjacent(2, 0)
    assert not G.adjacent(0, 1)
    with pytest.raises(PreconditionError):
        Graph(2, frozenset({(1, 1)}))
    with pytest.raises(PreconditionError):
        Graph(2, frozenset({(0, 2)}))


def test_verify_permutations():
    path = Graph(3, frozenset({(0, 1), (1, 2)}))
    rep = NCRep(path, [(1, 0, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)])
    assert verify(rep).ok

    rep = NCRep(Graph.vn(2), [(1, 0, 2), (1, 2, 0), (1, 0, 2), (1, 2, 0)])
    result = verify(rep)
    assert not result.ok
    assert result.violation == (0, 3)

    with pytest.raises(PreconditionError):
        NCRep(Graph.vn(1), [(1, 0)])


def test_verify_mixed_targets():
    g = Portrait.identity(TreeShape((2,)), 1)
    with pytest.raises(IncompatibleError):
        verify(NCRep(Graph.vn(1), [g, (1, 0)]))


def test_verify_matrices():
    rep = NCRep(Graph.vn(3), block_construction(3))
    assert rep.target == 'matrix'
    assert verify(rep).ok


def test_find_noncommuting_pair():
    x, y = find_noncommuting_pair([(1, 0, 2), (0, 2, 1)])
    assert not commute(x, y)
    assert find_noncommuting_pair([(1, 2, 0)]) is None

    # Sym(4)' = Alt(4) is non-abelian
    x, y = find_noncommuting_pair([(1, 0, 2, 3), (1, 2, 3, 0)], derived=True)
    assert not commute(x, y)
    assert sorted(x) == [0, 1, 2, 3]


def test_weakly_branch_construction(unfold):
    rep = construct_vn_weakly_branch(unfold('grigorchuk', 5), 2)
    assert verify(rep).ok
    assert rep.meta['method'] == 'weakly_branch'
    assert rep.meta['level'] == 1
    assert rep.meta['vertices'] == ['0', '1']

    rep = construct_vn_weakly_branch(unfold('full', 4), 4)
    assert verify(rep).ok
    assert rep.graph == Graph.vn(4)


def test_weakly_branch_construction_fails_on_odometer(unfold):
    with pytest.raises(SearchExhaustedError):
        construct_vn_weakly_branch(unfold('odometer', 4), 1)
    with pytest.raises(PreconditionError):
        construct_vn_weakly_branch(unfold('grigorchuk', 4), 0)


def test_lifting_construction_needs_branching(unfold):
    with pytest.raises(HypothesisError):
        construct_vn_via_lifting(unfold('odometer', 4), 1, 1)


def test_grigorchuk_v3_by_lifting(unfold):
    G = unfold('grigorchuk', 9)
    rep = construct_vn_via_lifting(G, 3, 1)
    assert verify(rep).ok
    assert rep.graph == Graph.vn(3)
    assert rep.meta['method'] == 'lifting'
    assert all(v.startswith('0') for v in rep.meta['vertices'])
    for g in rep.labels:
        assert g.depth == 9
        assert g.level_perm(1) == (0, 1)


def test_portrait_text_round_trip(unfold):
    rep = construct_vn_weakly_branch(unfold('grigorchuk', 4), 1)
    text = dump_ncrep(rep)
    assert text.splitlines()[:5] == [
        'graph: 2', 'edges: 0-1', 'target: portrait', 'shape: 2,2,2,2',
        'depth: 4']
    loaded = load_ncrep(text)
    assert loaded.labels == rep.labels
    assert loaded.graph == rep.graph


def test_matrix_text_round_trip():
    rep = NCRep(Graph.vn(1), block_construction(1))
    text = dump_ncrep(rep)
    assert text.splitlines() == [
        'graph: 2',
        'edges: 0-1',
        'target: matrix',
        'ring: ZZ',
        'degree: 2',
        'vertex 0: 1 1 0 1',
        'vertex 1: 1 0 1 1',
    ]
    loaded = load_ncrep('# V_1\n' + text)
    assert [M.key() for M in loaded.labels] == [M.key() for M in rep.labels]
    assert verify(loaded).ok


@pytest.mark.parametrize('text', [
    'edges: 0-1\ntarget: perm\ndegree: 2\nvertex 0: 0,1\nvertex 1: 1,0',
    'graph: 2\nedges: 0-1\ntarget: perm\ndegree: 2\nvertex 0: 0,1',
    'graph: 2\nedges: 0:1\ntarget: perm\ndegree: 2\nvertex 0: 0,1\nvertex 1: 1,0',
    'graph: 2\ntarget: lie\nvertex 0: 0,1\nvertex 1: 1,0',
    'graph: 2\ntarget: matrix\nvertex 0: 1\nvertex 1: 1',
    'graph: 1\ntarget: perm\ndegree: 2\nvertex 0: 0,0',
    'graph: 1\ntarget: perm\nnonsense\nvertex 0: 0,1',
])
def test_load_errors(text):
    with pytest.raises(FormatError):
        load_ncrep(text)
