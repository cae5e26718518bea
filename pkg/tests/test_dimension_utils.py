from fractions import Fraction
import itertools

import pytest

from tree_dimension_utils.automaton_utils import TreeGroup
from tree_dimension_utils.dimension_utils import (
    LevelIndexTable,
    LogIndex,
    ambient_log_index,
    check_level_index_inequality,
    decay_certificate,
    dimension_profile,
    level_index_sweep,
    log_ratio,
    trivial_rist_projection_bound,
)
from tree_dimension_utils.errors import (
    DepthExceededError,
    InapplicableError,
    PreconditionError,
)
from tree_dimension_utils.tree_utils import TreeShape


def test_log_index_arithmetic():
    assert str(LogIndex.of(1)) == '0'
    assert str(LogIndex.of(12)) == 'log(12)'
    assert str(LogIndex.of(4096)) == '12*log(2)'
    total = LogIndex.of(8) + LogIndex.of(9)
    assert total.value == 72
    assert str(total) == '3*log(2) + 2*log(3)'
    assert LogIndex.of(8) < LogIndex.of(9)
    with pytest.raises(ValueError):
        LogIndex.of(0)


def test_ratio_exactness():
    assert log_ratio(LogIndex.of(8), LogIndex.of(128)).exact == Fraction(3, 7)
    inexact = log_ratio(LogIndex.of(3), LogIndex.of(6))
    assert inexact.exact is None
    assert str(inexact).endswith('~128b')
    assert str(inexact).startswith('0.6131471927')
    assert inexact.in_unit_interval()
    with pytest.raises(PreconditionError):
        log_ratio(LogIndex.of(2), LogIndex.of(1))


@pytest.mark.parametrize('n', range(1, 9))
def test_ambient_binary(n):
    index = ambient_log_index(TreeShape((2,) * 8), n)
    assert index.value == 2 ** (2 ** n - 1)
    assert str(index) == ('log(2)' if n == 1 else f'{2 ** n - 1}*log(2)')


def test_full_group_has_ratio_one(unfold):
    profile = dimension_profile(unfold('full', 7), 7)
    assert all(str(r.ratio) == '1' for r in profile.records)
    assert str(profile.window_min) == str(profile.window_max) == '1'


def test_odometer_profile(unfold):
    profile = dimension_profile(unfold('odometer', 10), 10)
    for r in profile.records:
        assert r.ratio.exact == Fraction(r.n, 2 ** r.n - 1)
    assert profile.ratio(3).exact == Fraction(3, 7)
    assert profile.last.approx < 0.01
    assert [r.n for r in profile.window] == [7, 8, 9, 10]


def test_grigorchuk_profile(unfold):
    profile = dimension_profile(unfold('grigorchuk', 6), 6)
    assert [str(r.ratio) for r in profile.records] == [
        '1', '1', '1', '4/5', '22/31', '2/3']


def test_grigorchuk_window_at_depth_8(unfold):
    profile = dimension_profile(unfold('grigorchuk', 8), 8)
    assert [r.n for r in profile.window] == [6, 7, 8]
    assert 0.6 <= profile.window_min.approx <= profile.window_max.approx <= 0.9
    assert str(profile.last) == '54/85'


def test_inexact_profile(unfold):
    profile = dimension_profile(unfold('sylow_p', 2, branching=3), 2)
    assert all(str(r.ratio).endswith('~128b') for r in profile.records)
    assert all(r.ratio.in_unit_interval() for r in profile.records)


def test_profile_export(unfold):
    profile = dimension_profile(unfold('odometer', 3), 3)
    assert profile.to_csv().splitlines() == [
        'n,log_num,log_den,ratio',
        '1,log(2),log(2),1',
        '2,2*log(2),3*log(2),2/3',
        '3,3*log(2),7*log(2),3/7',
    ]
    record = profile.to_record()
    assert record['group'] == 'odometer'
    assert record['window'] == {
        'levels': [3], 'min': '3/7', 'max': '3/7', 'last': '3/7'}
    with pytest.raises(DepthExceededError):
        dimension_profile(unfold('odometer', 3), 4)


@pytest.mark.parametrize('name,depth,branching', [
    ('full', 8, 2),
    ('odometer', 8, 2),
    ('grigorchuk', 8, 2),
    ('sylow_p', 8, 2),
    ('full', 4, 3),
    ('sylow_p', 5, 3),
    ('gupta_sidki_3', 5, 3),
    ('abelian_diagonal', 5, 3),
])
def test_level_index_inequality(unfold, name, depth, branching):
    checks = level_index_sweep(unfold(name, depth, branching))
    assert len(checks) == depth * (depth + 1) // 2
    assert [c.to_record() for c in checks if not c.holds] == []


def test_level_index_checks_do_not_depend_on_depth(unfold):
    G = unfold('grigorchuk', 5)
    table = LevelIndexTable(G)
    for k in range(4):
        for n in range(1, 5 - k):
            check = table.check(k, n)
            truncated = check_level_index_inequality(G.truncate(k + n), k, n)
            assert check.left.value == truncated.left.value
            assert check.right.value == truncated.right.value
            assert check.params == truncated.params


def test_level_index_inequality_is_equality_for_full_group(unfold):
    check = check_level_index_inequality(unfold('full', 4), 1, 2)
    assert check.equality
    with pytest.raises(DepthExceededError):
        check_level_index_inequality(unfold('full', 4), 2, 3)


def test_trivial_rist_projection_bound(unfold):
    check = trivial_rist_projection_bound(unfold('odometer', 4), (), 2)
    assert str(check.left) == str(check.right) == '2*log(2)'
    assert check.holds and check.equality

    with pytest.raises(InapplicableError):
        trivial_rist_projection_bound(unfold('grigorchuk', 4), (), 2)
    with pytest.raises(DepthExceededError):
        trivial_rist_projection_bound(unfold('odometer', 4), (0,), 3)


def test_decay_certificate(unfold):
    certificate = decay_certificate(unfold('odometer', 4), (0, 0, 0), 3)
    assert certificate.holds
    assert certificate.product == Fraction(1, 8)
    assert certificate.trivial_rist_vertices == [(), (0,), (0, 0)]
    assert str(certificate.r_root) == '4/15'
    assert str(certificate.r_end) == '1'

    certificate = decay_certificate(unfold('full', 4), (1, 0), 2)
    assert certificate.holds
    assert certificate.product == 1
    assert certificate.trivial_rist_vertices == []
    assert all(s.left == s.right for s in certificate.steps)

    with pytest.raises(DepthExceededError):
        decay_certificate(unfold('odometer', 4), (0, 0, 0, 0), 4)
    with pytest.raises(PreconditionError):
        decay_certificate(unfold('odometer', 4), (0,), 2)


def subgroup(G, indices):
    return TreeGroup(
        G.shape,
        G.depth,
        tuple(G.generators[i] for i in indices),
        tuple(G.names[i] for i in indices),
        label=f'{G.label}<{",".join(G.names[i] for i in indices)}>',
    )


@pytest.mark.parametrize('name,depth,branching', [
    ('grigorchuk', 6, 2),
    ('full', 4, 2),
    ('gupta_sidki_3', 4, 3),
])
def test_adding_generators_never_decreases_ratios(unfold, name, depth, branching):
    G = unfold(name, depth, branching)
    count = len(G.generators)
    profiles = {
        subset: dimension_profile(subgroup(G, subset), depth)
        for size in range(1, count + 1)
        for subset in itertools.combinations(range(count), size)
    }
    for subset, profile in profiles.items():
        for i in set(range(count)) - set(subset):
            larger = profiles[tuple(sorted(subset + (i,)))]
            for r, s in zip(profile.records, larger.records):
                assert r.log_den.value == s.log_den.value
                assert r.log_num <= s.log_num, (subset, i, r.n)


def test_decay_certificate_abelian_diagonal(unfold):
    certificate = decay_certificate(unfold('abelian_diagonal', 3, 3), (0, 0), 2)
    assert certificate.holds
    assert certificate.trivial_rist_vertices == [(), (0,)]
    assert [s.factor for s in certificate.steps] == [Fraction(2, 3)] * 2
    assert certificate.product == Fraction(4, 9)
    # |G_v| = 3^(3 - j) on a cyclic adding machine; two of three children count
    assert [(s.left.value, s.right.value) for s in certificate.steps] == [
        (27, 6 * 9 * 9),
        (9, 6 * 3 * 3),
    ]
    assert [str(s.right) for s in certificate.steps] == [
        '4*log(3) + log(6)',
        '2*log(3) + log(6)',
    ]
    assert str(certificate.r_end).startswith('0.61314719')
    assert str(certificate.r_end).endswith('~128b')
