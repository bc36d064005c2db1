"""Helpers shared by the command bodies."""

import logging
import sys
from pathlib import Path
from typing import List, Optional, TextIO, Tuple

from disco.core.exceptions import (
    ContractViolation,
    DiscoError,
    DiscoParseError,
    LearningTimeout,
    ResourceGuardError,
)
from disco.core.timing import Stats
from disco.schemas.bias import Bias
from disco.schemas.property import MinerConfig
from disco.schemas.report import ExitCode, RunReport
from disco.services.constraints import ConstraintSet
from disco.services.evaluator import ground_model
from disco.services.fact_store import FactStore
from disco.services.miner import PropertyAssertion, mine_properties
from disco.services.parser import parse_bias, parse_facts, parse_program

logger = logging.getLogger(__name__)


def read_text(path: str) -> str:
    """Read a UTF-8 input file; IO problems surface as input errors."""
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise DiscoParseError(f"cannot read input: {e}", source=path) from e


def parse_bk(text: str, source: Optional[str] = None) -> FactStore:
    """
    Background facts of ``text``, with any rules in it grounded.

    Files without ``:-`` go through the line-based facts reader. Anything it
    cannot read, such as a fact spread over several lines, is parsed again
    as a full program so diagnostics come from the program reader.
    """
    if ":-" not in text:
        try:
            return parse_facts(text, source=source)
        except DiscoParseError:
            logger.debug("Facts reader failed, parsing as a program")
    program = parse_program(text, source=source)
    if not program.rules:
        return program.facts
    logger.info(f"Grounding {len(program.rules)} background rules")
    return ground_model(program.rules, program.facts)


def load_bk(path: str, stats: Stats) -> FactStore:
    """Read and parse a background knowledge file."""
    with stats.duration("load"):
        store = parse_bk(read_text(path), source=path)
    stats.count("facts_loaded", store.fact_count())
    logger.info(f"Loaded {store.fact_count()} facts from {path}")
    return store


def load_bias(path: str) -> Bias:
    return parse_bias(read_text(path), source=path)


def miner_config(
    store: FactStore, bias: Optional[Bias], threads: Optional[int] = None
) -> MinerConfig:
    """Candidates are the bias body predicates, or every relation without a bias."""
    if bias is None:
        candidates = store.names()
        excluded: List[str] = []
    else:
        candidates = bias.candidate_relations()
        excluded = [bias.head.name]
    options = {"candidates": candidates, "excluded": excluded}
    if threads is not None:
        options["threads"] = threads
    try:
        return MinerConfig(**options)
    except ValueError as e:
        raise ContractViolation(f"invalid discovery settings: {e}") from e


def discover_constraints(
    store: FactStore, config: MinerConfig, stats: Stats
) -> Tuple[List[PropertyAssertion], ConstraintSet]:
    """Mine properties and compile them; the discovery phase of every command."""
    with stats.duration("discovery"):
        assertions = mine_properties(store, config)
        constraints = ConstraintSet.from_assertions(assertions)
    stats.count("properties_found", len(assertions))
    stats.count("constraints_compiled", len(constraints))
    return assertions, constraints


def exit_code_for(error: BaseException) -> ExitCode:
    """Exit status for an error raised by a command."""
    if isinstance(error, (DiscoParseError, ContractViolation)):
        return ExitCode.INPUT_ERROR
    if isinstance(error, LearningTimeout):
        return ExitCode.NO_SOLUTION
    if isinstance(error, ResourceGuardError):
        return ExitCode.RESOURCE_GUARD
    return ExitCode.FAILURE


def failed_report(command: str, error: BaseException, stats: Stats) -> RunReport:
    """Report for a command that stopped on ``error``."""
    if isinstance(error, DiscoError):
        logger.error(f"{command} failed: {error}")
    else:
        logger.exception(f"{command} failed unexpectedly: {error}")
    return RunReport(
        command=command,
        success=False,
        exit_code=exit_code_for(error),
        phases=stats.phases(),
        counters=stats.totals(),
        total_time=stats.elapsed(),
        error=str(error),
    )


def finished_report(command: str, stats: Stats, **fields) -> RunReport:
    return RunReport(
        command=command,
        phases=stats.phases(),
        counters=stats.totals(),
        total_time=stats.elapsed(),
        **fields,
    )


def output_stream(out: Optional[TextIO]) -> TextIO:
    """``out`` or the current standard output."""
    return out if out is not None else sys.stdout


def write_lines(lines: List[str], path: Optional[str], out: Optional[TextIO]) -> None:
    """Write lines to ``path`` when given, otherwise to the output stream."""
    text = "".join(f"{line}\n" for line in lines)
    if path:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as e:
            raise DiscoParseError(f"cannot write output: {e}", source=path) from e
    else:
        output_stream(out).write(text)
