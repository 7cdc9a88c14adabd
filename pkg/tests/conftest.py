"""
Shared fixtures for rbm-trace.

Read more about conftest.py under:
- https://docs.pytest.org/en/stable/fixture.html
- https://docs.pytest.org/en/stable/writing_plugins.html
"""

import pytest

from rbm_trace.common.utils import set_quiet
from rbm_trace.geometry import make_koch_snowflake, make_product, make_square


@pytest.fixture(autouse=True)
def quiet_logs():
    set_quiet(True)
    yield
    set_quiet(False)


@pytest.fixture(scope="session")
def unit_square():
    return make_square(1.0)


@pytest.fixture(scope="session")
def snowflake3():
    return make_koch_snowflake(3)


@pytest.fixture(scope="session")
def square_slab(unit_square):
    return make_product(unit_square, 1.0)
