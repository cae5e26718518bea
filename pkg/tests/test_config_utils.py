from argparse import Namespace

import pytest

from tree_dimension_utils.config_utils import RunConfig, RunStats, max_depth_for
from tree_dimension_utils.errors import DepthExceededError, PreconditionError


def test_from_args_ignores_unknown_and_missing_values():
    args = Namespace(command='dim', group='odometer', depth=5, margin=None,
                     unrelated='x')
    config = RunConfig.from_args(args)
    assert config.depth == 5
    assert config.margin is None
    assert config.format == 'table'


@pytest.mark.parametrize('config', [
    RunConfig('dim', depth=3),
    RunConfig('dim', group='odometer'),
    RunConfig('evidence', group='odometer', n_max=2),
    RunConfig('matcheck'),
    RunConfig('dim', group='odometer', depth=3, format='yaml'),
    RunConfig('dim', group='odometer', depth=3, search_bound=0),
    RunConfig('plot', group='odometer', depth=3),
])
def test_validate(config):
    with pytest.raises(PreconditionError):
        config.validate()


def test_check_depth():
    config = RunConfig('dim', group='odometer', depth=12).validate()
    config.check_depth([2] * 12, 12)
    with pytest.raises(DepthExceededError):
        config.check_depth([2] * 13, 13)
    assert max_depth_for([3, 2, 2]) == 3


def test_echo_is_sorted_and_complete():
    config = RunConfig('lift', group='grigorchuk', depth=5, level=1,
                       extra={'derived': True})
    echo = config.echo()
    assert list(echo) == sorted(echo)
    assert echo['derived'] is True
    assert {'depth', 'margin', 'search_bound'} <= set(echo)


def test_run_stats():
    stats = RunStats('dim')
    with stats.measure():
        pass
    assert stats.time >= 0
