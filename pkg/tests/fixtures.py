import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker
from sqlalchemy.pool import StaticPool

from rescomp.crud.crud import Crud


def _memory_engine():
    # one shared connection, so rows written by sweep threads stay visible
    return create_engine(
        "sqlite:///:memory:", connect_args={"check_same_thread": False}, poolclass=StaticPool
    )


@pytest.fixture(scope="function")
def crud_in_memory():
    crud = Crud(_memory_engine())
    yield crud


@pytest.fixture(scope="function")
def crud_session_in_memory():
    engine = _memory_engine()
    crud = Crud(engine)
    session = sessionmaker(bind=engine)
    yield (crud, session)
