"""Synthetic background knowledge command."""

import logging
from typing import Optional, TextIO

from disco.commands.common import failed_report, finished_report, output_stream
from disco.core.timing import Stats
from disco.schemas.report import RunReport
from disco.services.genbk import count_facts, write_facts

logger = logging.getLogger(__name__)


def cmd_genbk(
    alphabet: int,
    max_length: int,
    output_path: Optional[str] = None,
    force: bool = False,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Write string facts over an alphabet of ``alphabet`` symbols.

    Args:
        alphabet: Alphabet size n
        max_length: Maximum string length L
        output_path: Output file; standard output when omitted
        force: Write even beyond the size guard
        out: Stream used instead of standard output

    Returns:
        RunReport whose ``facts_written`` counter matches :func:`count_facts`
    """
    stats = Stats()
    try:
        with stats.duration("generate"):
            target = output_path if output_path else output_stream(out)
            written = write_facts(alphabet, max_length, target, force=force)
        stats.count("facts_written", written)
        logger.info(f"Wrote {written} facts")
        return finished_report(
            "genbk",
            stats,
            details={
                "alphabet": alphabet,
                "max_length": max_length,
                "expected_facts": count_facts(alphabet, max_length),
            },
        )
    except Exception as e:
        return failed_report("genbk", e, stats)
