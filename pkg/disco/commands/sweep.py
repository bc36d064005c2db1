"""Learning cost and effort as the maximum rule size grows."""

import logging
from typing import List, Optional, TextIO

import pandas as pd

from disco.commands.common import (
    discover_constraints,
    failed_report,
    finished_report,
    load_bias,
    load_bk,
    miner_config,
    output_stream,
    read_text,
)
from disco.core.exceptions import ContractViolation
from disco.core.timing import Stats
from disco.schemas.bias import Bias
from disco.schemas.report import RunReport
from disco.services.constraints import ConstraintSet
from disco.services.learner import Learner, Task
from disco.services.parser import parse_examples

logger = logging.getLogger(__name__)

COLUMNS = [
    "max_body",
    "cost",
    "tested_without",
    "tested_with",
    "seconds_without",
    "seconds_with",
]


def _solve(task: Task, constraints: ConstraintSet, timeout: Optional[float]):
    learner = Learner(task, constraints, timeout=timeout)
    solution = learner.run()
    return solution, learner.tested, learner.stats.elapsed()


def sweep_table(
    task: Task,
    constraints: ConstraintSet,
    body_sizes: List[int],
    timeout: Optional[float] = None,
) -> pd.DataFrame:
    """One row per maximum body size: learning with and without constraints."""
    rows = []
    for size in body_sizes:
        bias: Bias = task.bias.model_copy(update={"max_body": size})
        sized = Task(pos=task.pos, neg=task.neg, bk=task.bk, bias=bias)
        solution, tested_without, seconds_without = _solve(sized, ConstraintSet(), timeout)
        pruned, tested_with, seconds_with = _solve(sized, constraints, timeout)
        if (solution is None) != (pruned is None) or (
            solution is not None and pruned is not None and solution.cost != pruned.cost
        ):
            logger.warning(f"Solutions differ in cost at max_body={size}")
        rows.append(
            {
                "max_body": size,
                "cost": pruned.cost if pruned is not None else None,
                "tested_without": tested_without,
                "tested_with": tested_with,
                "seconds_without": round(seconds_without, 4),
                "seconds_with": round(seconds_with, 4),
            }
        )
    return pd.DataFrame(rows, columns=COLUMNS)


def cmd_sweep(
    bk_path: str,
    examples_path: str,
    bias_path: str,
    min_body: int = 1,
    max_body: int = 3,
    timeout: Optional[float] = None,
    csv_path: Optional[str] = None,
    threads: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Tabulate programs tested and learning time for a range of rule sizes.

    Args:
        bk_path: Background knowledge file
        examples_path: Examples file
        bias_path: Bias directives; ``max_body`` is overridden per row
        min_body: Smallest maximum body size
        max_body: Largest maximum body size
        timeout: Per-run budget in seconds
        csv_path: Also write the table as CSV
        threads: Worker threads for discovery
        out: Stream used instead of standard output

    Returns:
        RunReport with the table rows in ``details``
    """
    stats = Stats()
    try:
        if not 1 <= min_body <= max_body:
            raise ContractViolation(f"invalid body size range {min_body}..{max_body}")
        store = load_bk(bk_path, stats)
        bias = load_bias(bias_path)
        pos, neg = parse_examples(read_text(examples_path), source=examples_path)
        task = Task(pos=pos, neg=neg, bk=store, bias=bias)
        _, constraints = discover_constraints(
            store, miner_config(store, bias, threads), stats
        )

        with stats.duration("learn"):
            table = sweep_table(
                task, constraints, list(range(min_body, max_body + 1)), timeout
            )
        output_stream(out).write(table.to_string(index=False) + "\n")
        if csv_path:
            table.to_csv(csv_path, index=False)
        return finished_report(
            "sweep", stats, details={"rows": table.to_dict(orient="records")}
        )
    except Exception as e:
        return failed_report("sweep", e, stats)
