# load fixtures
from tests.fixtures import crud_in_memory, crud_session_in_memory  # noqa: F401
