"""Compile discovered properties into rule-space constraints.

A constraint is a set of body-literal templates over pattern variables. A rule
violates it when its body contains an image of every template. Uniqueness and
singleton properties instead bound how many distinct argument tuples one
predicate may take in a rule.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Tuple

from disco.services.evaluator import sat_body
from disco.services.fact_store import FactStore
from disco.services.miner import Family, PropertyAssertion
from disco.services.terms import Atom, Rule, Term, Var, var_name

logger = logging.getLogger(__name__)

Pattern = Tuple[Tuple["LiteralTemplate", ...], Tuple[Tuple[int, int], ...]]


@dataclass(frozen=True)
class LiteralTemplate:
    """``predicate(slots)`` where slots are pattern-variable indices."""

    predicate: str
    slots: Tuple[int, ...]

    @property
    def arity(self) -> int:
        return len(self.slots)

    def to_atom(self) -> Atom:
        return Atom(self.predicate, tuple(Var(s) for s in self.slots))

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(var_name(s) for s in self.slots)})"


class ConstraintMode(str, Enum):
    PATTERN = "pattern"
    COUNT = "count"


@dataclass(frozen=True)
class CountBound:
    """At most ``limit`` distinct completions per binding of ``grouping``."""

    predicate: str
    arity: int
    grouping: Tuple[int, ...]
    limit: int = 1

    @property
    def completing(self) -> Tuple[int, ...]:
        return tuple(c for c in range(self.arity) if c not in self.grouping)


@dataclass(frozen=True)
class HypothesisConstraint:
    """A pruning constraint scoped to a single rule.

    Count-bound constraints keep the two-literal witness of their first
    dependent column in ``templates`` for display; matching uses ``count``.
    """

    templates: Tuple[LiteralTemplate, ...]
    diseqs: Tuple[Tuple[int, int], ...]
    provenance: PropertyAssertion
    count: Optional[CountBound] = None

    @property
    def mode(self) -> ConstraintMode:
        return ConstraintMode.COUNT if self.count is not None else ConstraintMode.PATTERN

    def predicates(self) -> FrozenSet[str]:
        return frozenset(t.predicate for t in self.templates)

    def witnesses(self) -> List[Pattern]:
        """Patterns whose unsatisfiability in the store certifies the constraint."""
        if self.count is None:
            return [(self.templates, self.diseqs)]
        return _count_witnesses(self.count)

    def to_asp(self) -> str:
        return render_asp(self)

    def __str__(self) -> str:
        items = [str(t) for t in self.templates]
        items.extend(f"{var_name(a)}!={var_name(b)}" for a, b in self.diseqs)
        return f":- {', '.join(items)}."


def _count_witnesses(bound: CountBound) -> List[Pattern]:
    """Two literals agreeing on the grouping columns and differing in one other."""
    arity = bound.arity
    first = LiteralTemplate(bound.predicate, tuple(range(arity)))
    patterns: List[Pattern] = []
    for column in bound.completing:
        slots = []
        fresh = arity
        for c in range(arity):
            if c in bound.grouping:
                slots.append(c)
            else:
                slots.append(fresh)
                fresh += 1
        second = LiteralTemplate(bound.predicate, tuple(slots))
        patterns.append(((first, second), ((column, slots[column]),)))
    return patterns


def compile_constraint(assertion: PropertyAssertion) -> HypothesisConstraint:
    """
    Build the constraint implied by a property.

    Count bounds treat distinct variables as distinct values, so a body
    that only satisfies the bound when two variables are equal is pruned.

    Args:
        assertion: A property mined from the background knowledge

    Returns:
        The constraint whose matching bodies are unsatisfiable in that store
    """
    kind = assertion.kind
    p = assertion.relations[0]
    arity = kind.arity
    columns = tuple(range(arity))

    if kind.family == Family.IRREFLEXIVE:
        return HypothesisConstraint((LiteralTemplate(p, (0,) * arity),), (), assertion)
    if kind.family == Family.ANTITRANSITIVE:
        templates = (
            LiteralTemplate(p, (0, 1)),
            LiteralTemplate(p, (1, 2)),
            LiteralTemplate(p, (0, 2)),
        )
        return HypothesisConstraint(templates, (), assertion)
    if kind.family == Family.ANTITRIANGULAR:
        templates = (
            LiteralTemplate(p, (0, 1)),
            LiteralTemplate(p, (1, 2)),
            LiteralTemplate(p, (2, 0)),
        )
        return HypothesisConstraint(templates, (), assertion)
    if kind.family == Family.ASYMMETRIC:
        templates = (LiteralTemplate(p, columns), LiteralTemplate(p, kind.columns))
        return HypothesisConstraint(templates, (), assertion)
    if kind.family == Family.EXCLUSIVE:
        q = assertion.relations[1]
        templates = (LiteralTemplate(p, columns), LiteralTemplate(q, columns))
        return HypothesisConstraint(templates, (), assertion)

    if kind.family == Family.UNIQUE:
        bound = CountBound(p, arity, kind.columns)
    else:
        bound = CountBound(p, arity, ())
    templates, diseqs = _count_witnesses(bound)[0]
    return HypothesisConstraint(templates, diseqs, assertion, count=bound)


def match_templates(
    templates: Sequence[LiteralTemplate],
    diseqs: Iterable[Tuple[int, int]],
    body: Sequence[Atom],
    injective: bool = False,
    initial: Optional[Dict[int, Term]] = None,
) -> Iterator[Tuple[Dict[int, Term], Tuple[int, ...]]]:
    """
    Yield every mapping of pattern variables onto rule terms that embeds the
    templates in ``body``.

    Two templates may land on the same body literal unless ``injective`` is
    set. Disequal pattern variables must map to different terms. ``initial``
    fixes some pattern variables in advance.

    Yields:
        Tuples of (pattern variable mapping, body positions used per template)
    """
    diseq_list = list(diseqs)
    by_predicate: Dict[Tuple[str, int], List[int]] = {}
    for position, lit in enumerate(body):
        by_predicate.setdefault((lit.predicate, lit.arity), []).append(position)

    def extend(
        depth: int, mapping: Dict[int, Term], used: Tuple[int, ...]
    ) -> Iterator[Tuple[Dict[int, Term], Tuple[int, ...]]]:
        if depth == len(templates):
            if all(mapping[a] != mapping[b] for a, b in diseq_list):
                yield dict(mapping), used
            return
        template = templates[depth]
        for position in by_predicate.get((template.predicate, template.arity), ()):
            if injective and position in used:
                continue
            added = []
            consistent = True
            for slot, term in zip(template.slots, body[position].args):
                bound = mapping.get(slot)
                if bound is None:
                    mapping[slot] = term
                    added.append(slot)
                elif bound != term:
                    consistent = False
                    break
            if consistent:
                yield from extend(depth + 1, mapping, used + (position,))
            for slot in added:
                del mapping[slot]

    yield from extend(0, dict(initial or {}), ())


def _count_violation(bound: CountBound, body: Sequence[Atom]) -> Optional[Tuple[Atom, Atom]]:
    groups: Dict[Tuple[Term, ...], Dict[Tuple[Term, ...], Atom]] = {}
    for lit in body:
        if lit.predicate != bound.predicate or lit.arity != bound.arity:
            continue
        key = tuple(lit.args[c] for c in bound.grouping)
        completion = tuple(lit.args[c] for c in bound.completing)
        seen = groups.setdefault(key, {})
        seen.setdefault(completion, lit)
        if len(seen) > bound.limit:
            first, second = list(seen.values())[:2]
            return first, second
    return None


def violates(rule: Rule, constraint: HypothesisConstraint) -> bool:
    """Whether the body of ``rule`` matches ``constraint``; the head is ignored."""
    if constraint.count is not None:
        return _count_violation(constraint.count, rule.body) is not None
    for _ in match_templates(constraint.templates, constraint.diseqs, rule.body):
        return True
    return False


def violation_core(
    rule: Rule, constraint: HypothesisConstraint
) -> Optional[Tuple[List[Atom], List[Tuple[int, int]]]]:
    """
    The body literals a violation uses, with the disequalities it implies.

    Returns:
        (matched literals, variable pairs that must differ) or None when the
        rule does not violate the constraint
    """
    if constraint.count is not None:
        found = _count_violation(constraint.count, rule.body)
        if found is None:
            return None
        first, second = found
        pairs = [
            (a.index, b.index)
            for a, b in zip(first.args, second.args)
            if isinstance(a, Var) and isinstance(b, Var) and a != b
        ]
        return [first, second], pairs[:1]

    for mapping, used in match_templates(
        constraint.templates, constraint.diseqs, rule.body
    ):
        pairs = []
        for a, b in constraint.diseqs:
            ta, tb = mapping[a], mapping[b]
            if isinstance(ta, Var) and isinstance(tb, Var):
                pairs.append((ta.index, tb.index))
        literals = [rule.body[p] for p in sorted(set(used))]
        return literals, pairs
    return None


def verify_unsat(constraint: HypothesisConstraint, store: FactStore) -> bool:
    """True iff no witness pattern of ``constraint`` is satisfiable in ``store``."""
    for templates, diseqs in constraint.witnesses():
        body = [t.to_atom() for t in templates]
        if sat_body(body, diseqs, store):
            return False
    return True


def _asp_args(slots: Sequence[int]) -> str:
    names = [var_name(s) for s in slots]
    if len(names) == 1:
        return f"({names[0]},)"
    return f"({','.join(names)})"


def render_asp(constraint: HypothesisConstraint) -> str:
    """Render in the hypothesis-constraint meta-language (``body_literal/4``)."""
    bound = constraint.count
    if bound is None:
        items = [
            f"body_literal(Rule,{t.predicate},_,{_asp_args(t.slots)})"
            for t in constraint.templates
        ]
        items.extend(f"{var_name(a)}!={var_name(b)}" for a, b in constraint.diseqs)
        return f":- {', '.join(items)}."

    p = bound.predicate
    if not bound.grouping:
        return (
            f":- body_literal(Rule,{p},_,_), "
            f"#count{{Vars : body_literal(Rule,{p},_,Vars)}} > {bound.limit}."
        )
    guard = tuple(
        var_name(c) if c in bound.grouping else "_" for c in range(bound.arity)
    )
    counted = ",".join(var_name(c) for c in bound.completing)
    full = _asp_args(tuple(range(bound.arity)))
    guard_text = f"({','.join(guard)},)" if bound.arity == 1 else f"({','.join(guard)})"
    return (
        f":- body_literal(Rule,{p},_,{guard_text}), "
        f"#count{{{counted} : body_literal(Rule,{p},_,{full})}} > {bound.limit}."
    )


class ConstraintSet:
    """Compiled constraints, indexed by the predicates they mention."""

    def __init__(self, constraints: Iterable[HypothesisConstraint] = ()):
        unique = {c: None for c in constraints}
        self.constraints: Tuple[HypothesisConstraint, ...] = tuple(unique)
        self._index: Dict[str, List[HypothesisConstraint]] = {}
        for constraint in self.constraints:
            for predicate in sorted(constraint.predicates()):
                self._index.setdefault(predicate, []).append(constraint)

    @classmethod
    def from_assertions(cls, assertions: Iterable[PropertyAssertion]) -> "ConstraintSet":
        constraints = [compile_constraint(a) for a in assertions]
        logger.debug(f"Compiled {len(constraints)} constraints")
        return cls(constraints)

    def __len__(self) -> int:
        return len(self.constraints)

    def __iter__(self) -> Iterator[HypothesisConstraint]:
        return iter(self.constraints)

    def __bool__(self) -> bool:
        return bool(self.constraints)

    def candidates(self, body: Sequence[Atom]) -> List[HypothesisConstraint]:
        """Constraints all of whose predicates occur in ``body``."""
        present = {lit.predicate for lit in body}
        seen: Dict[HypothesisConstraint, None] = {}
        for predicate in sorted(present):
            for constraint in self._index.get(predicate, ()):
                if constraint.predicates() <= present:
                    seen[constraint] = None
        return list(seen)

    def violated_by(self, rule: Rule) -> Optional[HypothesisConstraint]:
        """The first constraint ``rule`` violates, if any."""
        for constraint in self.candidates(rule.body):
            if violates(rule, constraint):
                return constraint
        return None

    def body_violates(self, body: Sequence[Atom]) -> bool:
        """Violation test on a bare body, for pruning partial rules."""
        for constraint in self.candidates(body):
            if constraint.count is not None:
                if _count_violation(constraint.count, body) is not None:
                    return True
            else:
                for _ in match_templates(constraint.templates, constraint.diseqs, body):
                    return True
        return False
