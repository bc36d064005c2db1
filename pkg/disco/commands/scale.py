"""Discovery time against background knowledge size."""

import logging
import time
from typing import List, Optional, TextIO

import pandas as pd

from disco.commands.common import failed_report, finished_report, output_stream
from disco.core.exceptions import ContractViolation
from disco.core.timing import Stats
from disco.schemas.property import MinerConfig
from disco.schemas.report import RunReport
from disco.services.genbk import count_facts, generate_text
from disco.services.miner import mine_properties
from disco.services.parser import parse_facts

logger = logging.getLogger(__name__)

COLUMNS = ["alphabet", "facts", "load_seconds", "discovery_seconds", "properties"]


def scale_table(
    alphabets: List[int], max_length: int, threads: Optional[int] = None
) -> pd.DataFrame:
    """Generate, load and mine synthetic string BK for each alphabet size."""
    rows = []
    for alphabet in alphabets:
        text = generate_text(alphabet, max_length)

        started = time.perf_counter()
        store = parse_facts(text, source=f"genbk(n={alphabet},L={max_length})")
        load_seconds = time.perf_counter() - started

        options = {"candidates": store.names()}
        if threads is not None:
            options["threads"] = threads
        config = MinerConfig(**options)
        started = time.perf_counter()
        found = mine_properties(store, config)
        discovery_seconds = time.perf_counter() - started

        logger.info(
            f"n={alphabet}: {store.fact_count()} facts, "
            f"discovery {discovery_seconds:.3f}s"
        )
        rows.append(
            {
                "alphabet": alphabet,
                "facts": store.fact_count(),
                "load_seconds": round(load_seconds, 4),
                "discovery_seconds": round(discovery_seconds, 4),
                "properties": len(found),
            }
        )
    return pd.DataFrame(rows, columns=COLUMNS)


def cmd_scale(
    alphabets: List[int],
    max_length: int = 4,
    csv_path: Optional[str] = None,
    threads: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Scaling study over synthetic string BK.

    Args:
        alphabets: Alphabet sizes, one table row each
        max_length: Maximum string length shared by all rows
        csv_path: Also write the table as CSV
        threads: Worker threads for discovery
        out: Stream used instead of standard output

    Returns:
        RunReport with the table rows in ``details``
    """
    stats = Stats()
    try:
        if not alphabets:
            raise ContractViolation("at least one alphabet size is required")
        planned = sum(count_facts(n, max_length) for n in alphabets)
        logger.info(f"Scaling study over {planned} facts in total")

        with stats.duration("scale"):
            table = scale_table(sorted(alphabets), max_length, threads)
        output_stream(out).write(table.to_string(index=False) + "\n")
        if csv_path:
            table.to_csv(csv_path, index=False)
        stats.count("facts_loaded", int(table["facts"].sum()))
        return finished_report(
            "scale", stats, details={"rows": table.to_dict(orient="records")}
        )
    except Exception as e:
        return failed_report("scale", e, stats)
