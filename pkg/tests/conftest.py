import pytest

from divilab import build_sieve


@pytest.fixture(scope="session")
def sieve_1e4():
    return build_sieve(10**4)


@pytest.fixture(scope="session")
def sieve_1e5():
    return build_sieve(10**5)
