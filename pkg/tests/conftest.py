import pytest

from hogsos.mutcl_syntax import SortedPool


@pytest.fixture(scope="session")
def pool():
    return SortedPool(8, 4)
