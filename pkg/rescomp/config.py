import logging
import sys

from pydantic import BaseModel, ConfigDict

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class Settings(BaseModel):
    """Tunable constants of the workbench.

    Attributes:
        bit_op_constant (int): k in the k*|n|^2 charge of every digital step.
        analogue_time_units (int): abstract time charged for wave propagation.
        space_units (int): space charged for the n-independent apparatus.
        mc_samples (int): default number of Monte-Carlo samples.
        mc_chunk_size (int): samples drawn from one seed substream.
        db_url (str): default database for persisted ledgers and sweeps.
        sql_echo (bool): echo SQL statements through SQLAlchemy's logger.
    """

    model_config = ConfigDict(frozen=True)

    bit_op_constant: int = 4
    analogue_time_units: int = 1
    space_units: int = 1
    mc_samples: int = 100_000
    mc_chunk_size: int = 10_000
    db_url: str = "sqlite:///rescomp.db"
    sql_echo: bool = False


settings = Settings()


def configure_logging(verbose: bool = False) -> None:
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format=LOG_FORMAT,
        stream=sys.stderr,
    )
