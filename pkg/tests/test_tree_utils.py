from hypothesis import given, strategies as st
import pytest

from tree_dimension_utils.errors import (
    DepthExceededError,
    FormatError,
    IncompatibleError,
)
from tree_dimension_utils.perm_utils import perm_mul
from tree_dimension_utils.tree_utils import (
    Portrait,
    TreeShape,
    act,
    compose,
    dump_portrait,
    from_level_perm,
    invert,
    load_portrait,
    parse_shape,
    psi_assemble,
    psi_decompose,
    section,
    truncate,
)


SHAPE = TreeShape((2, 3, 2))


@st.composite
def portraits(draw, shape=SHAPE, depth=3):
    levels = []
    for k in range(depth):
        m = shape.degree(k)
        levels.append(tuple(
            tuple(draw(st.permutations(range(m))))
            for _ in range(shape.level_size(k))
        ))
    return Portrait(shape, depth, tuple(levels))


@given(portraits(), portraits())
def test_compose_matches_leaf_action(g, h):
    gh = compose(g, h)
    assert gh.leaf_perm == perm_mul(g.leaf_perm, h.leaf_perm)
    for v in SHAPE.vertices(3):
        assert act(gh, v) == act(h, act(g, v))


@given(portraits())
def test_invert(g):
    assert compose(g, invert(g)).is_identity()


@given(portraits())
def test_leaf_perm_determines_portrait(g):
    assert from_level_perm(SHAPE, 3, g.leaf_perm) == g


@given(portraits())
def test_psi_round_trip(g):
    for k in range(4):
        sections, top = psi_decompose(g, k)
        if k < 3:
            assert psi_assemble(SHAPE, sections, top) == g
        assert top == g.level_perm(k)


@given(portraits())
def test_section_rule(g):
    # (vw)^g = v^g w^(g|v)
    for v in SHAPE.vertices(1):
        s = section(g, v)
        for w in s.shape.vertices(2):
            assert act(g, v + w) == act(g, v) + act(s, w)


def test_level_sizes_and_vertices():
    assert [SHAPE.level_size(n) for n in range(4)] == [1, 2, 6, 12]
    assert SHAPE.vertex_at(2, 4) == (1, 1)
    with pytest.raises(DepthExceededError):
        SHAPE.level_size(4)
    with pytest.raises(ValueError):
        SHAPE.check_vertex((2,))


def test_truncate():
    g = Portrait.from_labels(SHAPE, 3, {(): (1, 0), (0, 1): (1, 0)})
    t = truncate(g, 2)
    assert t.depth == 2
    assert t.level_perm(1) == (1, 0)
    assert t.level_perm(2) == g.level_perm(2)
    with pytest.raises(DepthExceededError):
        truncate(t, 3)


def test_incompatible_portraits():
    g = Portrait.identity(SHAPE, 3)
    h = Portrait.identity(SHAPE, 2)
    with pytest.raises(IncompatibleError):
        compose(g, h)


def test_from_level_perm_rejects_non_tree_perms():
    with pytest.raises(ValueError):
        from_level_perm(TreeShape((2, 2)), 2, (0, 2, 1, 3))


def test_dump_and_load():
    g = Portrait.from_labels(SHAPE, 3, {(1,): (2, 0, 1), (1, 2): (1, 0)})
    text = dump_portrait(g)
    assert text.splitlines() == [
        'shape: 2,3,2',
        'depth: 3',
        '1 -> 2,0,1',
        '12 -> 1,0',
    ]
    assert load_portrait(text) == g


def test_load_errors():
    with pytest.raises(FormatError):
        load_portrait('depth: 2\nε -> 1,0')
    with pytest.raises(FormatError):
        load_portrait('shape: 2,2\ndepth: 2\n00 -> 1,0')
    with pytest.raises(FormatError):
        load_portrait('shape: 2,2\ndepth: two\nε -> 1,0')
    with pytest.raises(FormatError):
        parse_shape('2,x')
