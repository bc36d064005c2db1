"""Rule-space size with and without discovered constraints."""

import logging
from typing import Dict, Optional, TextIO

from disco.commands.common import (
    discover_constraints,
    failed_report,
    finished_report,
    load_bias,
    load_bk,
    miner_config,
    output_stream,
)
from disco.core.timing import Stats
from disco.schemas.report import RunReport
from disco.services.constraints import ConstraintSet
from disco.services.enumerator import rule_space

logger = logging.getLogger(__name__)


def reduction_percent(without: int, with_constraints: int) -> float:
    """Share of the rule space removed, rounded to 0.1%."""
    if without == 0:
        return 0.0
    return round(100.0 * (without - with_constraints) / without, 1)


def cmd_rulespace(
    bias_path: str,
    bk_path: str,
    threads: Optional[int] = None,
    out: Optional[TextIO] = None,
) -> RunReport:
    """
    Count the rules the bias allows, before and after pruning.

    Args:
        bias_path: Bias directives
        bk_path: Background knowledge to discover constraints from
        threads: Worker threads for discovery
        out: Stream used instead of standard output

    Returns:
        RunReport whose details hold both counts, per size and in total
    """
    stats = Stats()
    try:
        store = load_bk(bk_path, stats)
        bias = load_bias(bias_path)
        _, constraints = discover_constraints(
            store, miner_config(store, bias, threads), stats
        )

        with stats.duration("generate"):
            plain: Dict[int, int] = rule_space(bias, ConstraintSet())
            pruned: Dict[int, int] = rule_space(bias, constraints)
        without = sum(plain.values())
        with_constraints = sum(pruned.values())
        reduction = reduction_percent(without, with_constraints)
        stats.count("rules_without", without)
        stats.count("rules_with", with_constraints)

        stream = output_stream(out)
        stream.write(f"rules without constraints: {without}\n")
        stream.write(f"rules with constraints: {with_constraints}\n")
        stream.write(f"reduction: {reduction:.1f}%\n")
        logger.info(f"Rule space {without} -> {with_constraints} ({reduction:.1f}%)")

        return finished_report(
            "rulespace",
            stats,
            details={
                "without": without,
                "with": with_constraints,
                "reduction_percent": reduction,
                "by_size_without": {str(k): v for k, v in plain.items()},
                "by_size_with": {str(k): v for k, v in pruned.items()},
            },
        )
    except Exception as e:
        return failed_report("rulespace", e, stats)
