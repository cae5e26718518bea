import json

import pytest

from tree_dimension_utils.automaton_utils import (
    CATALOG_NAMES,
    catalog,
    describe,
    load_automaton,
    parse_automaton,
)
from tree_dimension_utils.errors import DefinitionError, FormatError
from tree_dimension_utils.perm_utils import identity_perm, perm_mul
from .common_utils import closure


@pytest.mark.parametrize('n,order', [(1, 2), (2, 8), (3, 128), (4, 4096)])
def test_grigorchuk_level_orders(unfold, n, order):
    G = unfold('grigorchuk', 4)
    assert G.level_group(n).order() == order
    if n <= 3:
        gens = [g.level_perm(n) for g in G.generators]
        assert len(closure(gens, 2 ** n)) == order


def test_grigorchuk_relations(unfold):
    G = unfold('grigorchuk', 5)
    a, b, c, d = G.leaf_perms
    e = identity_perm(32)
    for x in (a, b, c, d):
        assert perm_mul(x, x) == e
    assert perm_mul(b, c) == d
    assert perm_mul(perm_mul(a, d), perm_mul(a, d)) != e


def test_odometer_is_cyclic(unfold):
    G = unfold('odometer', 6)
    assert G.leaf_group.order() == 64
    assert G.leaf_group.is_abelian()


@pytest.mark.parametrize('name,branching,depth,order', [
    ('full', 2, 3, 2 ** 7),
    ('full', 3, 2, 6 ** 4),
    ('sylow_p', 3, 2, 3 ** 4),
    ('abelian_diagonal', 3, 3, 27),
])
def test_catalog_orders(name, branching, depth, order):
    G = catalog(name, branching, max_depth=depth).unfold(depth)
    assert G.leaf_group.order() == order


def test_abelian_diagonal_is_abelian():
    G = catalog('abelian_diagonal').unfold(3)
    assert G.leaf_group.is_abelian()


def test_gupta_sidki_first_level(gupta_sidki):
    assert gupta_sidki.level_group(1).order() == 3
    assert gupta_sidki.level_group(3).orbits() == [tuple(range(27))]


def test_catalog_errors():
    with pytest.raises(DefinitionError):
        catalog('sylow_p', branching=4)
    with pytest.raises(DefinitionError):
        catalog('lamplighter')
    assert 'grigorchuk' in CATALOG_NAMES


def test_truncate(unfold):
    G = unfold('grigorchuk', 5)
    assert G.truncate(3).leaf_group.order() == 128
    assert describe(G.truncate(3)) == {
        'group': 'grigorchuk',
        'shape': '2,2,2',
        'depth': 3,
        'generators': ['a', 'b', 'c', 'd'],
    }


def test_parse_automaton_matches_catalog(tmp_path):
    document = {
        'name': 'adding_machine',
        'shape': 2,
        'states': {'a': {'perm': '1,0', 'sections': ['e', 'a']}},
    }
    path = tmp_path / 'odometer.json'
    path.write_text(json.dumps(document))

    G = load_automaton(path).unfold(4)
    assert G.label == 'adding_machine'
    assert G.leaf_perms == catalog('odometer').unfold(4).leaf_perms


def test_parse_automaton_errors(tmp_path):
    with pytest.raises(FormatError):
        parse_automaton({'shape': [2]})
    with pytest.raises(DefinitionError):
        parse_automaton({
            'shape': [2, 3],
            'states': {'a': {'perm': '1,0'}},
        })
    with pytest.raises(DefinitionError):
        parse_automaton({
            'shape': '2',
            'states': {'a': {'perm': '1,0', 'sections': ['e', 'b']}},
        })
    path = tmp_path / 'broken.json'
    path.write_text('{"shape": ')
    with pytest.raises(FormatError):
        load_automaton(path)


@pytest.mark.parametrize('document', [
    {'shape': 'two', 'states': {'a': {'perm': '1,0'}}},
    {'shape': [2], 'states': ['a']},
    {'shape': [2], 'states': {'a': 'swap'}},
    {'shape': [2], 'states': {'a': {'perm': 5}}},
    {'shape': [2], 'states': {'a': {'perm': ['x', 'y']}}},
    {'shape': [2], 'states': {'a': {'sections': 3}}},
    ['shape', 'states'],
])
def test_parse_automaton_malformed_fields(document):
    with pytest.raises(FormatError):
        parse_automaton(document)
