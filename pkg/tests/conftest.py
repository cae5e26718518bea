from hypothesis import settings, Verbosity
import pytest

from tree_dimension_utils.automaton_utils import catalog


settings.register_profile(
    'default',
    max_examples=10,
    deadline=9000,
    verbosity=Verbosity.verbose,
)


@pytest.fixture(scope='session')
def unfold():
    '''
    Cached catalog truncations: unfold(name, depth, branching=2).
    '''
    cache = {}

    def inner(name, depth, branching=2):
        key = (name, depth, branching)
        if key not in cache:
            cache[key] = catalog(name, branching, max_depth=depth).unfold(depth)
        return cache[key]

    return inner


@pytest.fixture(scope='session')
def odometer(unfold):
    return unfold('odometer', 4)


@pytest.fixture(scope='session')
def grigorchuk(unfold):
    return unfold('grigorchuk', 5)


@pytest.fixture(scope='session')
def full_binary(unfold):
    return unfold('full', 4)


@pytest.fixture(scope='session')
def gupta_sidki(unfold):
    return unfold('gupta_sidki_3', 3)
