import pytest

from trapcouple import load_database


@pytest.fixture(scope="session")
def db():
    return load_database()
