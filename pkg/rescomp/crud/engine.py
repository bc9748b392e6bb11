from sqlalchemy import create_engine as sql_create_engine
from sqlalchemy.engine import make_url

from rescomp.config import settings


def create_engine(url: str = settings.db_url, echo: bool = settings.sql_echo):
    connect_args = {}
    # sweeps are stored from the runner thread
    if make_url(url).get_backend_name() == "sqlite":
        connect_args["check_same_thread"] = False
    return sql_create_engine(url, echo=echo, connect_args=connect_args)
