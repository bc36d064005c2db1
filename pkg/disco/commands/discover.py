"""Property discovery command."""

import logging
from typing import List, Optional, TextIO

from disco.commands.common import (
    discover_constraints,
    failed_report,
    finished_report,
    load_bias,
    load_bk,
    miner_config,
    write_lines,
)
from disco.core.exceptions import ContractViolation
from disco.core.timing import Stats
from disco.schemas.property import ConstraintRecord
from disco.schemas.report import RunReport
from disco.services.constraints import ConstraintSet
from disco.services.miner import PropertyAssertion, explain_failures

logger = logging.getLogger(__name__)

FORMATS = ("json", "asp")


def render_properties(
    assertions: List[PropertyAssertion],
    constraints: Optional[ConstraintSet],
    fmt: str = "json",
) -> List[str]:
    """Output lines for mined properties and, optionally, their constraints."""
    if fmt == "asp":
        lines = [a.to_asp() for a in assertions]
        if constraints is not None:
            lines.extend(c.to_asp() for c in constraints)
        return lines

    lines = [a.to_record().model_dump_json(exclude_none=True) for a in assertions]
    if constraints is not None:
        for c in constraints:
            record = ConstraintRecord(
                constraint=c.to_asp(),
                mode=c.mode.value,
                property=c.provenance.kind.asp_name,
                relations=list(c.provenance.relations),
            )
            lines.append(record.model_dump_json())
    return lines


def cmd_discover(
    bk_path: str,
    bias_path: Optional[str] = None,
    output_path: Optional[str] = None,
    fmt: str = "json",
    with_constraints: bool = False,
    explain: bool = False,
    threads: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Discover the properties of the background relations and write them out.

    Args:
        bk_path: Background knowledge file
        bias_path: Optional bias file restricting the candidate relations
        output_path: Output file; standard output when omitted
        fmt: ``json`` (one record per line) or ``asp`` (``prop/2`` facts)
        with_constraints: Also write the compiled constraints
        explain: Log a counter-example for every property that fails
        threads: Worker threads for the checks
        out: Stream used instead of standard output

    Returns:
        RunReport with discovery timings and counts
    """
    stats = Stats()
    logger.info(f"Starting discovery on {bk_path}")
    try:
        if fmt not in FORMATS:
            raise ContractViolation(f"unknown format {fmt!r}")
        store = load_bk(bk_path, stats)
        bias = load_bias(bias_path) if bias_path else None
        config = miner_config(store, bias, threads)
        assertions, constraints = discover_constraints(store, config, stats)

        details = {}
        if explain:
            witnesses = explain_failures(store, config)
            for witness in witnesses:
                logger.info(
                    f"{witness.kind.asp_name}({','.join(witness.relations)}) fails: {witness}"
                )
            details["counterexamples"] = {
                f"{w.kind.asp_name}({','.join(w.relations)})": str(w) for w in witnesses
            }

        lines = render_properties(
            assertions, constraints if with_constraints else None, fmt
        )
        write_lines(lines, output_path, out)
        logger.info(
            f"Discovery finished: {len(assertions)} properties, "
            f"{len(constraints)} constraints"
        )
        return finished_report("discover", stats, details=details)

    except Exception as e:
        return failed_report("discover", e, stats)
