import functools

import pytest

from apndesigns.affine import orbit
from apndesigns.blocks import construct
from apndesigns.gf2n import make_field


@functools.lru_cache(maxsize=None)
def design(label):
    return orbit(construct(label))


@pytest.fixture(scope="session")
def F5():
    return make_field(5)


@pytest.fixture(scope="session")
def F7():
    return make_field(7)
