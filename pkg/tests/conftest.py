import pytest
from hypothesis import settings

from gtmprod.dirichlet import DirichletCache

settings.register_profile("suite", max_examples=60, deadline=None)
settings.load_profile("suite")


@pytest.fixture(scope="session")
def cache():
    """Session-wide in-memory Dirichlet cache so ladders are built once."""
    return DirichletCache()
