import argparse
import json
import logging
import os
import sys
import tempfile
from typing import Callable, Dict, List, Optional, Sequence, TextIO

from pydantic import ValidationError
from sqlalchemy.exc import SQLAlchemyError

from rescomp.config import configure_logging
from rescomp.core import ComplexityFunction, dominant_resources, overall_complexity
from rescomp.crud import Crud, create_engine
from rescomp.errors import RescompError
from rescomp.factorizer import (
    SweepRunner,
    profile_from_rows,
    read_sweep_csv,
    run_device,
    write_sweep_csv,
)
from rescomp.ledger import ledger_to_json, observable_flow, run_toy_rsa, security_vector
from rescomp.precision import Draw

from . import cli_types as CliTypes

logger = logging.getLogger("rescomp.cli")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rescomp", description="Resource-centric complexity workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", dest="json_output", action="store_true")
    common.add_argument("--verbose", action="store_true")

    factorize = sub.add_parser("factorize", parents=[common], help="run the analogue factorizer")
    factorize.add_argument("--n", type=int, required=True)
    factorize.add_argument("--epsilon-lambda", type=float, default=0.0)
    factorize.add_argument("--epsilon-c", type=float, default=0.0)
    factorize.add_argument("--draw", choices=["exact", "worst", "random"], default="exact")

    sweep = sub.add_parser("sweep", parents=[common], help="zero-error runs over a range of n")
    sweep.add_argument("--from", dest="n_from", type=int, required=True)
    sweep.add_argument("--to", dest="n_to", type=int, required=True)
    sweep.add_argument("--step", type=int, default=2)
    sweep.add_argument("--out", dest="out_path", required=True)
    sweep.add_argument("--format", choices=["csv", "json"], default="csv")
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--db", default=None)

    analyze = sub.add_parser("analyze", parents=[common], help="growth classes of a sweep CSV")
    analyze.add_argument("--in", dest="sweep_csv_path", required=True)

    protocol = sub.add_parser("protocol", parents=[common], help="ledgered toy RSA exchange")
    protocol.add_argument("--modulus-bits", type=int, required=True)
    protocol.add_argument("--message", type=int, required=True)
    protocol.add_argument("--out", dest="out_path", required=True)
    protocol.add_argument("--db", default=None)
    return parser


_COMMANDS = {
    "factorize": CliTypes.Factorize,
    "sweep": CliTypes.Sweep,
    "analyze": CliTypes.Analyze,
    "protocol": CliTypes.Protocol,
}


def parse_args(argv: Sequence[str]) -> CliTypes.Command:
    """Parse a command line into a Command.

    Raises:
        UsageError: unknown flag, missing required flag or out-of-range value.
    """
    namespace = vars(build_parser().parse_args(list(argv)))
    try:
        return _COMMANDS[namespace["command"]](**namespace)
    except ValidationError as error:
        raise UsageError(str(error)) from error


def _write_atomic(path: str, write: Callable[[TextIO], None]) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    with tempfile.NamedTemporaryFile(
        "w", dir=directory, delete=False, newline="", suffix=".tmp"
    ) as stream:
        try:
            write(stream)
        except BaseException:
            stream.close()
            os.unlink(stream.name)
            raise
    os.replace(stream.name, path)


def _emit(text: str, out: TextIO) -> None:
    out.write(text)
    if not text.endswith("\n"):
        out.write("\n")


def _analysis(profile: Dict[str, ComplexityFunction]) -> dict:
    growth = {
        name: (function.growth.tag if function.growth is not None else None)
        for name, function in sorted(profile.items())
    }
    if any(tag is None for tag in growth.values()):
        return {"growth": growth, "dominant": None, "overall": None}
    return {
        "growth": growth,
        "dominant": sorted(dominant_resources(profile)),
        "overall": overall_complexity(profile).growth.tag,
    }


def _analysis_text(analysis: dict) -> str:
    lines = [f"{name}: {tag or 'unclassified'}" for name, tag in analysis["growth"].items()]
    if analysis["dominant"] is None:
        lines.append("dominant: undetermined; overall: undetermined")
    else:
        dominant = ", ".join(analysis["dominant"])
        lines.append(f"dominant: {dominant}; overall: {analysis['overall']}")
    return "\n".join(lines)


def _factorize(cmd: CliTypes.Factorize, out: TextIO) -> str:
    draw = {
        "exact": Draw.exact(),
        "worst": Draw.worst_case(),
        "random": Draw.random(cmd.seed),
    }[cmd.draw]
    outcome = run_device(cmd.n, (cmd.epsilon_lambda, cmd.epsilon_c), draw)
    _emit(outcome.model_dump_json(indent=2), out)
    return outcome.summary()


def _sweep(cmd: CliTypes.Sweep, out: TextIO) -> str:
    crud = Crud(create_engine(cmd.db)) if cmd.db else None
    label = f"sweep-{cmd.n_from}-{cmd.n_to}-{cmd.step}"
    runner = SweepRunner(
        range(cmd.n_from, cmd.n_to + 1, cmd.step), crud=crud, run_label=label, workers=cmd.workers
    )
    rows = runner.run()
    if not rows:
        raise RescompError(f"empty range {cmd.n_from}..{cmd.n_to}")

    if cmd.format == "json":
        _write_atomic(
            cmd.out_path,
            lambda stream: stream.write(
                json.dumps([row.model_dump() for row in rows], indent=2) + "\n"
            ),
        )
    else:
        _write_atomic(cmd.out_path, lambda stream: write_sweep_csv(rows, stream))

    analysis = _analysis(profile_from_rows(rows))
    _emit(json.dumps(analysis, indent=2) if cmd.json_output else _analysis_text(analysis), out)
    return f"swept {len(rows)} values into {cmd.out_path}"


def _analyze(cmd: CliTypes.Analyze, out: TextIO) -> str:
    try:
        with open(cmd.sweep_csv_path, newline="") as stream:
            rows = read_sweep_csv(stream)
    except OSError as error:
        raise RescompError(f"cannot read {cmd.sweep_csv_path}: {error.strerror}") from error
    analysis = _analysis(profile_from_rows(rows))
    _emit(json.dumps(analysis, indent=2) if cmd.json_output else _analysis_text(analysis), out)
    return f"analyzed {len(rows)} rows"


def _protocol(cmd: CliTypes.Protocol, out: TextIO) -> str:
    ledger, transcript = run_toy_rsa(cmd.modulus_bits, cmd.message, cmd.seed)
    if cmd.db:
        crud = Crud(create_engine(cmd.db))
        crud.add_ledger(f"toy-rsa-{cmd.modulus_bits}-{cmd.message}-{cmd.seed}", ledger)
    _write_atomic(cmd.out_path, lambda stream: stream.write(ledger_to_json(ledger) + "\n"))
    vector = security_vector(ledger, observable_flow)
    _emit(json.dumps(vector.to_json_dict(), indent=2 if cmd.json_output else None), out)
    return (
        f"{len(ledger)} events, modulus {transcript.modulus}, "
        f"security vector {vector.flag.value}"
    )


_EXECUTORS = {
    "factorize": _factorize,
    "sweep": _sweep,
    "analyze": _analyze,
    "protocol": _protocol,
}


def execute(cmd: CliTypes.Command, out: Optional[TextIO] = None) -> CliTypes.ExitReport:
    """Run a parsed command, writing its primary output to `out`.

    Domain errors never escape: they come back as exit code 2 with the
    module's message as summary.
    """
    out = out if out is not None else sys.stdout
    try:
        summary = _EXECUTORS[cmd.command](cmd, out)
    except RescompError as error:
        logger.debug("%s failed", cmd.command, exc_info=True)
        return CliTypes.ExitReport(exit_code=2, summary=str(error))
    except ValidationError as error:
        return CliTypes.ExitReport(exit_code=2, summary=str(error))
    except SQLAlchemyError as error:
        logger.error("database error in %s", cmd.command)
        return CliTypes.ExitReport(exit_code=2, summary=str(getattr(error, "orig", None) or error))
    except OSError as error:
        return CliTypes.ExitReport(exit_code=2, summary=f"{error.filename}: {error.strerror}")
    return CliTypes.ExitReport(exit_code=0, summary=summary)


def main(argv: Optional[List[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cmd = parse_args(argv)
    except UsageError as error:
        print(f"usage error: {error}", file=sys.stderr)
        return 1
    configure_logging(cmd.verbose)
    report = execute(cmd)
    print(report.summary, file=sys.stderr)
    return report.exit_code
