from .cli_types import Analyze, Command, ExitReport, Factorize, Protocol, Sweep
from .main import UsageError, build_parser, execute, main, parse_args
