import pytest

from duffing_freq import weak_series


@pytest.fixture(scope="session")
def series20():
    return weak_series(20)


@pytest.fixture(scope="session")
def series100():
    return weak_series(100)
