"""Learning command: discovery followed by the optimal rule search."""

import logging
from typing import Optional, TextIO

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
from disco.core.timing import Stats
from disco.schemas.report import ExitCode, RunReport
from disco.services.constraints import ConstraintSet
from disco.services.learner import Learner, Task
from disco.services.parser import parse_examples

logger = logging.getLogger(__name__)

NO_SOLUTION = "no solution"


def cmd_learn(
    bk_path: str,
    examples_path: str,
    bias_path: str,
    discovery: bool = True,
    timeout: Optional[float] = None,
    threads: Optional[int] = None,
    subsumption: Optional[bool] = None,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Learn an optimal program for a task.

    Args:
        bk_path: Background knowledge file (facts and rules)
        examples_path: File of ``pos(...)`` and ``neg(...)`` examples
        bias_path: Bias directives
        discovery: Prune with discovered constraints; off is the plain baseline
        timeout: Wall-clock budget for the search in seconds
        threads: Worker threads for discovery
        subsumption: Use subsumption for learned constraints
        out: Stream used instead of standard output

    Returns:
        RunReport with the solution, timings per phase and counters
    """
    stats = Stats()
    logger.info(f"Starting learning on {examples_path}")
    try:
        store = load_bk(bk_path, stats)
        bias = load_bias(bias_path)
        pos, neg = parse_examples(read_text(examples_path), source=examples_path)
        task = Task(pos=pos, neg=neg, bk=store, bias=bias)

        constraints = ConstraintSet()
        if discovery:
            config = miner_config(store, bias, threads)
            _, constraints = discover_constraints(store, config, stats)

        learner = Learner(task, constraints, timeout=timeout, subsumption=subsumption)
        try:
            solution = learner.run()
        finally:
            # Fold the learner's phases and counters into the command's,
            # also when the search runs out of time
            for phase, seconds in learner.stats.phases().items():
                stats.durations[phase] += seconds
            for name, value in learner.stats.totals().items():
                stats.count(name, value)

        stream = output_stream(out)
        if solution is None:
            stream.write(f"{NO_SOLUTION}\n")
            return finished_report(
                "learn",
                stats,
                success=False,
                exit_code=ExitCode.NO_SOLUTION,
                error=NO_SOLUTION,
            )

        for rule in solution.rules:
            stream.write(f"{rule}\n")
        return finished_report(
            "learn",
            stats,
            solution=[str(rule) for rule in solution.rules],
            cost=solution.cost,
        )

    except Exception as e:
        return failed_report("learn", e, stats)
