import pytest


@pytest.fixture(scope="session")
def spec8():
    from packbound.magic import magic_spec
    return magic_spec(8)


@pytest.fixture(scope="session")
def spec24():
    from packbound.magic import magic_spec
    return magic_spec(24)
