"""Optimal generate-test-constrain rule learner.

Hypotheses are enumerated by increasing literal count. Every tested
hypothesis that fails adds learned constraints which prune later candidates:

* generalisation: the hypothesis entails a negative example, so does every
  hypothesis containing it, and every hypothesis with a rule more general
  than a failed single rule;
* specialisation: a single rule misses a positive example, so does every
  more specific single rule;
* redundancy: a single rule covers no positive example, so any
  non-recursive hypothesis using a specialisation of it is beaten by the
  same hypothesis without that rule.
"""

import logging
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterator, List, Optional, Sequence, Tuple

from disco.core.config import settings
from disco.core.exceptions import ContractViolation, LearningTimeout
from disco.core.timing import Stats
from disco.schemas.bias import Bias
from disco.services.constraints import ConstraintSet, LiteralTemplate, match_templates
from disco.services.enumerator import enumerate_rules
from disco.services.evaluator import ground_model
from disco.services.fact_store import FactStore
from disco.services.terms import Atom, Rule, Var, render_atom

logger = logging.getLogger(__name__)


@dataclass
class Task:
    """Examples, background facts and bias of one learning problem."""

    pos: List[Atom]
    neg: List[Atom]
    bk: FactStore
    bias: Bias

    def __post_init__(self) -> None:
        self.pos = list(dict.fromkeys(self.pos))
        self.neg = list(dict.fromkeys(self.neg))
        clash = set(self.pos) & set(self.neg)
        if clash:
            shown = ", ".join(sorted(render_atom(a) for a in clash))
            raise ContractViolation(f"examples are both positive and negative: {shown}")
        head = self.bias.head
        for example in self.pos + self.neg:
            if example.predicate != head.name or example.arity != head.arity:
                raise ContractViolation(
                    f"example {render_atom(example)} does not match head {head}"
                )
            if not example.is_ground():
                raise ContractViolation(f"example {render_atom(example)} is not ground")


@dataclass(frozen=True)
class Hypothesis:
    """A set of canonical rules; the cost is the total literal count."""

    rules: Tuple[Rule, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "rules", tuple(sorted(set(self.rules))))

    @property
    def cost(self) -> int:
        return sum(rule.size for rule in self.rules)

    @property
    def is_recursive(self) -> bool:
        return any(rule.is_recursive for rule in self.rules)

    def sort_key(self) -> Tuple:
        return (self.cost, len(self.rules), tuple(r.encoding() for r in self.rules))

    def __len__(self) -> int:
        return len(self.rules)

    def __str__(self) -> str:
        return "\n".join(str(rule) for rule in self.rules)


@dataclass(frozen=True)
class CoverageReport:
    """Which examples a hypothesis entails."""

    covered_pos: FrozenSet[int]
    covered_neg: FrozenSet[int]
    total_pos: int
    total_neg: int

    @property
    def complete(self) -> bool:
        return len(self.covered_pos) == self.total_pos

    @property
    def consistent(self) -> bool:
        return not self.covered_neg

    @property
    def is_solution(self) -> bool:
        return self.complete and self.consistent


class AnchorKind(str, Enum):
    GENERALISATION = "generalisation"
    SPECIALISATION = "specialisation"
    REDUNDANCY = "redundancy"


@dataclass(frozen=True)
class LearnedConstraint:
    """A failed hypothesis used to prune related candidates."""

    kind: AnchorKind
    anchor: Tuple[Rule, ...]

    def __post_init__(self) -> None:
        if not self.anchor:
            raise ContractViolation("a learned constraint needs a nonempty anchor")


def _coverage(model: FactStore, task: Task) -> CoverageReport:
    return CoverageReport(
        covered_pos=frozenset(i for i, e in enumerate(task.pos) if model.contains_fact(e)),
        covered_neg=frozenset(i for i, e in enumerate(task.neg) if model.contains_fact(e)),
        total_pos=len(task.pos),
        total_neg=len(task.neg),
    )


def test_hypothesis(h: Hypothesis, task: Task) -> CoverageReport:
    """
    Entailment of every example by the hypothesis and the background facts.

    One least model is computed and reused for all examples.

    Args:
        h: Rules to test
        task: Examples and background facts

    Returns:
        The covered positive and negative example indices
    """
    model = ground_model(h.rules, task.bk)
    return _coverage(model, task)


# Not a test function for pytest
test_hypothesis.__test__ = False  # type: ignore[attr-defined]


def subsumes(general: Rule, specific: Rule, renaming_only: bool = True) -> bool:
    """
    Whether ``general`` is at least as general as ``specific``.

    Head variables map to themselves. With ``renaming_only`` the body of
    ``general`` must reappear in ``specific`` up to a variable renaming;
    otherwise any substitution is allowed.
    """
    if general.head != specific.head:
        return False
    if len(general.body) > len(specific.body):
        return False
    templates = [
        LiteralTemplate(lit.predicate, tuple(t.index for t in lit.args if isinstance(t, Var)))
        for lit in general.body
    ]
    if any(t.arity != lit.arity for t, lit in zip(templates, general.body)):
        # Constants in bodies are compared literally
        return set(general.body) <= set(specific.body)
    initial = {i: Var(i) for i in general.head.variables()}
    for mapping, _ in match_templates(templates, (), specific.body, initial=initial):
        if not renaming_only:
            return True
        if len(set(mapping.values())) == len(mapping):
            return True
    return False


@dataclass
class SearchState:
    """Learned constraints accumulated during one search."""

    subsumption: bool = False
    constraints: List[LearnedConstraint] = field(default_factory=list)
    inconsistent_sets: List[FrozenSet[Rule]] = field(default_factory=list)
    inconsistent_rules: List[Rule] = field(default_factory=list)
    incomplete_rules: List[Rule] = field(default_factory=list)
    barren_rules: List[Rule] = field(default_factory=list)

    def add(self, constraint: LearnedConstraint) -> None:
        self.constraints.append(constraint)
        anchor = constraint.anchor
        single = anchor[0] if len(anchor) == 1 and not anchor[0].is_recursive else None
        if constraint.kind == AnchorKind.GENERALISATION:
            self.inconsistent_sets.append(frozenset(anchor))
            if single is not None:
                self.inconsistent_rules.append(single)
        elif constraint.kind == AnchorKind.SPECIALISATION:
            if single is not None:
                self.incomplete_rules.append(single)
        elif single is not None:
            self.barren_rules.append(single)

    def _more_general(self, general: Rule, specific: Rule) -> bool:
        return subsumes(general, specific, renaming_only=not self.subsumption)

    def pruned_by(self, h: Hypothesis) -> Optional[AnchorKind]:
        """The kind of learned constraint excluding ``h``, if any."""
        rules = frozenset(h.rules)
        for anchor in self.inconsistent_sets:
            if anchor <= rules:
                return AnchorKind.GENERALISATION
        for anchor_rule in self.inconsistent_rules:
            if any(self._more_general(r, anchor_rule) for r in h.rules):
                return AnchorKind.GENERALISATION
        if len(h.rules) == 1 and not h.is_recursive:
            (only,) = h.rules
            for anchor_rule in self.incomplete_rules:
                if self._more_general(anchor_rule, only):
                    return AnchorKind.SPECIALISATION
        if not h.is_recursive:
            for anchor_rule in self.barren_rules:
                if any(self._more_general(anchor_rule, r) for r in h.rules):
                    return AnchorKind.REDUNDANCY
        return None


def constrain_update(
    state: SearchState, h: Hypothesis, report: CoverageReport
) -> List[LearnedConstraint]:
    """
    Record learned constraints for a failed hypothesis.

    Args:
        state: Constraints learned so far, updated in place
        h: The tested hypothesis
        report: Its coverage

    Returns:
        The constraints added
    """
    added: List[LearnedConstraint] = []
    if not h.rules:
        return added
    if not report.complete:
        added.append(LearnedConstraint(AnchorKind.SPECIALISATION, h.rules))
        if not report.covered_pos and len(h.rules) == 1:
            added.append(LearnedConstraint(AnchorKind.REDUNDANCY, h.rules))
    if not report.consistent:
        added.append(LearnedConstraint(AnchorKind.GENERALISATION, h.rules))
    for constraint in added:
        state.add(constraint)
    return added


class Learner:
    """One generate-test-constrain search over a task."""

    def __init__(
        self,
        task: Task,
        discovered: Optional[ConstraintSet] = None,
        timeout: Optional[float] = None,
        subsumption: Optional[bool] = None,
        record_skips: bool = False,
    ):
        self.task = task
        self.discovered = discovered if discovered is not None else ConstraintSet()
        self.timeout = timeout if timeout is not None else settings.LEARN_TIMEOUT
        use_subsumption = settings.LEARN_SUBSUMPTION if subsumption is None else subsumption
        self.state = SearchState(subsumption=use_subsumption)
        self.stats = Stats()
        self.record_skips = record_skips
        self.skipped: List[Tuple[Hypothesis, AnchorKind]] = []
        self._rules_by_size: Dict[int, List[Rule]] = {}
        self._rule_coverage: Dict[Rule, CoverageReport] = {}
        self._deadline: Optional[float] = None

    @property
    def tested(self) -> int:
        return self.stats.counters.get("programs_tested", 0)

    def _check_time(self) -> None:
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise LearningTimeout(
                f"no solution within {self.timeout:g}s after {self.tested} programs"
            )

    def rules_of_size(self, size: int) -> List[Rule]:
        found = self._rules_by_size.get(size)
        if found is None:
            with self.stats.duration("generate"):
                found = sorted(enumerate_rules(self.task.bias, self.discovered, size))
            self._rules_by_size[size] = found
            self.stats.count("rules_enumerated", len(found))
        return found

    def candidates(self, cost: int) -> Iterator[Hypothesis]:
        """Hypotheses of exactly ``cost`` literals, by rule count then encoding."""
        bias = self.task.bias
        for count in range(1, bias.max_rules + 1):
            if count * 2 > cost:
                break
            pool: List[Rule] = []
            for size in range(2, min(cost, bias.max_body + 1) + 1):
                pool.extend(self.rules_of_size(size))
            pool.sort()
            yield from self._combinations(pool, count, cost)

    def _combinations(
        self, pool: Sequence[Rule], count: int, cost: int
    ) -> Iterator[Hypothesis]:
        def extend(start: int, chosen: List[Rule], budget: int) -> Iterator[Hypothesis]:
            remaining = count - len(chosen)
            if remaining == 0:
                if budget == 0:
                    yield Hypothesis(tuple(chosen))
                return
            for i in range(start, len(pool)):
                rule = pool[i]
                rest = budget - rule.size
                if rest < 2 * (remaining - 1) or (remaining == 1 and rest != 0):
                    continue
                chosen.append(rule)
                yield from extend(i + 1, chosen, rest)
                chosen.pop()

        yield from extend(0, [], cost)

    def test(self, h: Hypothesis) -> CoverageReport:
        """Coverage of ``h``, reusing single-rule results for non-recursive sets."""
        if h.is_recursive or not h.rules:
            return test_hypothesis(h, self.task)
        reports = []
        for rule in h.rules:
            cached = self._rule_coverage.get(rule)
            if cached is None:
                cached = test_hypothesis(Hypothesis((rule,)), self.task)
                self._rule_coverage[rule] = cached
            reports.append(cached)
        if len(reports) == 1:
            return reports[0]
        return CoverageReport(
            covered_pos=frozenset().union(*(r.covered_pos for r in reports)),
            covered_neg=frozenset().union(*(r.covered_neg for r in reports)),
            total_pos=len(self.task.pos),
            total_neg=len(self.task.neg),
        )

    def run(self) -> Optional[Hypothesis]:
        """
        Search for an optimal solution.

        Returns:
            A complete and consistent hypothesis of minimum cost, or None when
            none exists within the bias bounds

        Raises:
            LearningTimeout: When the time budget runs out
        """
        bias = self.task.bias
        if self.timeout is not None:
            self._deadline = time.monotonic() + self.timeout

        if not self.task.pos:
            empty = Hypothesis()
            self.stats.count("programs_tested")
            if self.test(empty).is_solution:
                return empty

        for cost in range(2, bias.total_literals + 1):
            logger.debug(f"Searching hypotheses of {cost} literals")
            for h in self.candidates(cost):
                self._check_time()
                with self.stats.duration("constrain"):
                    pruned = self.state.pruned_by(h)
                if pruned is not None:
                    self.stats.count("programs_pruned")
                    if self.record_skips:
                        self.skipped.append((h, pruned))
                    continue
                if h.is_recursive and all(r.is_recursive for r in h.rules):
                    continue

                with self.stats.duration("test"):
                    report = self.test(h)
                self.stats.count("programs_tested")
                if report.is_solution:
                    logger.info(
                        f"Found a solution of {h.cost} literals after "
                        f"{self.tested} programs"
                    )
                    return h
                with self.stats.duration("constrain"):
                    constrain_update(self.state, h, report)

        logger.info(f"No solution within the bias after {self.tested} programs")
        return None


def learn(
    task: Task,
    discovered: Optional[ConstraintSet] = None,
    timeout: Optional[float] = None,
) -> Optional[Hypothesis]:
    """Optimal solution of ``task``, pruning with ``discovered`` constraints."""
    return Learner(task, discovered, timeout=timeout).run()


def brute_force(task: Task, max_cost: Optional[int] = None) -> Optional[Hypothesis]:
    """Minimum-cost solution by testing every hypothesis in order, no pruning."""
    learner = Learner(task)
    limit = max_cost if max_cost is not None else task.bias.total_literals
    if not task.pos and test_hypothesis(Hypothesis(), task).is_solution:
        return Hypothesis()
    for cost in range(2, limit + 1):
        for h in learner.candidates(cost):
            if h.is_recursive and all(r.is_recursive for r in h.rules):
                continue
            if test_hypothesis(h, task).is_solution:
                return h
    return None
