"""Fixtures for lyapid tests."""

import os

import pytest

from lyapid.database import Session
from lyapid.database.db import Base, connect
from lyapid.graph import Digraph


@pytest.fixture(scope='session')
def data_dir():
    return os.path.join(os.path.dirname(__file__), 'data')


@pytest.fixture
def forward_path():
    return Digraph(3, frozenset([(1, 2), (2, 3)]))


@pytest.fixture
def backward_path():
    return Digraph(3, frozenset([(3, 2), (2, 1)]))


@pytest.fixture
def collider():
    return Digraph(3, frozenset([(1, 3), (2, 3)]))


@pytest.fixture
def flip_start():
    return Digraph(6, frozenset([(1, 2), (1, 3), (1, 4), (1, 5), (2, 3), (2, 4), (2, 5), (3, 4), (3, 5), (6, 4)]))


@pytest.fixture
def flip_middle(flip_start):
    return flip_start.flip_edge((2, 3))


@pytest.fixture
def flip_end():
    return Digraph(6, frozenset([(1, 2), (3, 1), (1, 4), (1, 5), (3, 2), (2, 4), (2, 5), (3, 4), (3, 5), (6, 4)]))


@pytest.fixture(scope='function')
def db():
    """Provides an isolated, empty in-memory database to tests."""
    engine = connect('sqlite://', create_tables=False)
    Base.metadata.create_all(engine)
    try:
        yield engine
    finally:
        Base.metadata.drop_all(engine)
        engine.dispose()
        Session._connected = False
