from .engine import create_engine
from .model import Base, EventRecord, LedgerRecord, SweepRecord
from .crud import Crud, IntegrityError, NoResultFound
