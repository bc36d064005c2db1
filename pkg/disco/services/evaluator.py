"""Bottom-up evaluation of function-free Datalog over a :class:`FactStore`."""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from disco.services.fact_store import FactStore, Relation, Row
from disco.services.terms import Atom, Const, Rule, Var

logger = logging.getLogger(__name__)

Binding = Dict[int, int]


@dataclass
class _Step:
    """One literal of a join plan."""

    relation: Relation
    # (column, is_variable, variable index or constant id) known before the step
    probes: List[Tuple[int, bool, int]] = field(default_factory=list)
    # (column, variable) first bound here
    binds: List[Tuple[int, int]] = field(default_factory=list)
    # (column, variable) repeating a variable bound earlier in the same literal
    repeats: List[Tuple[int, int]] = field(default_factory=list)
    # disequalities whose variables are all bound after this step
    diseqs: List[Tuple[int, int]] = field(default_factory=list)
    fully_bound: bool = False


class JoinPlan:
    """A fixed evaluation order for a conjunction of literals.

    Literals are taken greedily: most bound arguments first, then the smallest
    relation, then source order.
    """

    def __init__(
        self,
        literals: Sequence[Tuple[Atom, Relation]],
        diseqs: Iterable[Tuple[int, int]] = (),
        bound: Iterable[int] = (),
    ):
        self.initially_bound: Set[int] = set(bound)
        self.steps: List[_Step] = []
        self.unsatisfiable = False
        self.initial_diseqs: List[Tuple[int, int]] = []

        pending = list(range(len(literals)))
        known = set(self.initially_bound)
        remaining_diseqs = []
        for a, b in diseqs:
            if a == b:
                self.unsatisfiable = True
            elif a in known and b in known:
                self.initial_diseqs.append((a, b))
            else:
                remaining_diseqs.append((a, b))

        while pending:

            def score(i: int) -> Tuple[int, int, int]:
                atom, rel = literals[i]
                bound_args = sum(
                    1
                    for t in atom.args
                    if isinstance(t, Const) or (isinstance(t, Var) and t.index in known)
                )
                return (-bound_args, len(rel), i)

            choice = min(pending, key=score)
            pending.remove(choice)
            atom, rel = literals[choice]
            step = _Step(relation=rel)
            seen_here: Set[int] = set()
            for column, term in enumerate(atom.args):
                if isinstance(term, Const):
                    step.probes.append((column, False, term.symbol))
                elif term.index in known:
                    step.probes.append((column, True, term.index))
                elif term.index in seen_here:
                    step.repeats.append((column, term.index))
                else:
                    step.binds.append((column, term.index))
                    seen_here.add(term.index)
            known |= seen_here
            step.fully_bound = not step.binds and not step.repeats
            still = []
            for a, b in remaining_diseqs:
                if a in known and b in known:
                    step.diseqs.append((a, b))
                else:
                    still.append((a, b))
            remaining_diseqs = still
            self.steps.append(step)

        if remaining_diseqs:
            # Disequalities over variables no literal binds cannot be decided
            raise ValueError(
                f"disequality variables {remaining_diseqs} do not occur in the body"
            )

    def solutions(self, binding: Optional[Binding] = None) -> Iterator[Binding]:
        """Yield every extension of ``binding`` satisfying all literals.

        The yielded dictionary is reused between solutions; copy it to keep it.
        """
        if self.unsatisfiable:
            return
        current: Binding = dict(binding or {})
        for a, b in self.initial_diseqs:
            if current[a] == current[b]:
                return
        yield from self._solve(0, current)

    def _solve(self, depth: int, binding: Binding) -> Iterator[Binding]:
        if depth == len(self.steps):
            yield binding
            return
        step = self.steps[depth]
        rel = step.relation

        if step.fully_bound:
            row = [0] * rel.arity
            for column, is_var, value in step.probes:
                row[column] = binding[value] if is_var else value
            if tuple(row) in rel.tuples:
                if all(binding[a] != binding[b] for a, b in step.diseqs):
                    yield from self._solve(depth + 1, binding)
            return

        candidates: Sequence[Row]
        if step.probes:
            candidates = None  # type: ignore[assignment]
            for column, is_var, value in step.probes:
                bucket = rel.lookup(column, binding[value] if is_var else value)
                if not bucket:
                    return
                if candidates is None or len(bucket) < len(candidates):
                    candidates = bucket
        else:
            candidates = rel.rows

        probes, binds, repeats, diseqs = step.probes, step.binds, step.repeats, step.diseqs
        for row in candidates:
            if any(
                row[column] != (binding[value] if is_var else value)
                for column, is_var, value in probes
            ):
                continue
            for column, var in binds:
                binding[var] = row[column]
            if any(row[column] != binding[var] for column, var in repeats):
                continue
            if any(binding[a] == binding[b] for a, b in diseqs):
                continue
            yield from self._solve(depth + 1, binding)


def _relations_for(
    body: Sequence[Atom], store: FactStore
) -> Optional[List[Tuple[Atom, Relation]]]:
    literals = []
    for atom in body:
        rel = store.relation(atom.predicate)
        if rel is None or rel.arity != atom.arity or not len(rel):
            return None
        literals.append((atom, rel))
    return literals


def solve_body(
    body: Sequence[Atom],
    diseqs: Iterable[Tuple[int, int]],
    store: FactStore,
    binding: Optional[Binding] = None,
) -> Iterator[Binding]:
    """All substitutions making ``body`` true in ``store`` (closed world)."""
    literals = _relations_for(body, store)
    if literals is None:
        return iter(())
    plan = JoinPlan(literals, diseqs, (binding or {}).keys())
    return plan.solutions(binding)


def sat_body(
    body: Sequence[Atom],
    diseqs: Iterable[Tuple[int, int]],
    store: FactStore,
    binding: Optional[Binding] = None,
) -> bool:
    """
    Decide whether a conjunction has a model in the store.

    Args:
        body: Atoms over store relations
        diseqs: Variable pairs that must take distinct constants
        store: The facts, read under the closed-world assumption
        binding: Optional variables fixed in advance

    Returns:
        True iff some substitution makes every atom a stored fact and keeps
        every disequality pair distinct
    """
    for _ in solve_body(body, diseqs, store, binding):
        return True
    return False


def unify_head(head: Atom, fact: Atom) -> Optional[Binding]:
    """Match a rule head against a ground atom."""
    if head.predicate != fact.predicate or head.arity != fact.arity:
        return None
    binding: Binding = {}
    for term, value in zip(head.args, fact.args):
        assert isinstance(value, Const)
        if isinstance(term, Const):
            if term.symbol != value.symbol:
                return None
        else:
            seen = binding.setdefault(term.index, value.symbol)
            if seen != value.symbol:
                return None
    return binding


def rule_covers(rule: Rule, store: FactStore, fact: Atom) -> bool:
    """Whether one application of ``rule`` over ``store`` derives ``fact``."""
    binding = unify_head(rule.head, fact)
    if binding is None:
        return False
    return sat_body(rule.body, rule.diseqs, store, binding)


def _head_row(head: Atom, binding: Binding) -> Row:
    return tuple(
        binding[t.index] if isinstance(t, Var) else t.symbol for t in head.args
    )


def _fire(
    rule: Rule,
    literals: Sequence[Tuple[Atom, Relation]],
) -> Iterator[Row]:
    plan = JoinPlan(literals, rule.diseqs)
    for binding in plan.solutions():
        yield _head_row(rule.head, binding)


def ground_model(rules: Iterable[Rule], store: FactStore) -> FactStore:
    """
    Least Herbrand model of ``rules`` together with the facts of ``store``.

    Semi-naive fixpoint: after a first full round, each round only joins
    against the facts derived in the previous one. The result is a private
    store layered on ``store``; ``store`` itself is not modified.

    Args:
        rules: Function-free definite rules
        store: The base facts

    Returns:
        A store holding the base facts and every derivable fact
    """
    ordered = sorted(set(rules))
    model = FactStore(parent=store)
    if not ordered:
        return model

    for rule in ordered:
        model.declare(rule.head.predicate, rule.head.arity)

    # First round: every rule over the full store
    derived: Dict[str, List[Row]] = {}
    for rule in ordered:
        literals = _relations_for(rule.body, model)
        if literals is None:
            continue
        derived.setdefault(rule.head.predicate, []).extend(_fire(rule, literals))
    delta = _merge(model, derived)

    rounds = 1
    while delta:
        rounds += 1
        derived = {}
        for rule in ordered:
            for position, lit in enumerate(rule.body):
                changed = delta.get(lit.predicate)
                if changed is None or changed.arity != lit.arity:
                    continue
                literals = []
                for other_position, other in enumerate(rule.body):
                    if other_position == position:
                        literals.append((other, changed))
                        continue
                    rel = model.relation(other.predicate)
                    if rel is None or rel.arity != other.arity or not len(rel):
                        literals = []
                        break
                    literals.append((other, rel))
                if not literals:
                    continue
                derived.setdefault(rule.head.predicate, []).extend(
                    _fire(rule, literals)
                )
        delta = _merge(model, derived)

    logger.debug(f"Fixpoint of {len(ordered)} rules reached after {rounds} rounds")
    return model


def _merge(model: FactStore, derived: Dict[str, List[Row]]) -> Dict[str, Relation]:
    """Insert derived rows into ``model``; returns the genuinely new ones."""
    delta: Dict[str, Relation] = {}
    for name in sorted(derived):
        rows = derived[name]
        if not rows:
            continue
        target = model.declare(name, len(rows[0]))
        fresh = Relation(name, target.arity)
        for row in rows:
            if target.add(row):
                fresh.add(row)
        if len(fresh):
            delta[name] = fresh
    return delta


def naive_model(rules: Iterable[Rule], store: FactStore) -> FactStore:
    """Least model by re-running every rule until nothing changes.

    The straightforward fixpoint, kept as a reference for :func:`ground_model`.
    """
    ordered = sorted(set(rules))
    model = store.copy()
    for rule in ordered:
        model.declare(rule.head.predicate, rule.head.arity)
    changed = True
    while changed:
        changed = False
        for rule in ordered:
            literals = _relations_for(rule.body, model)
            if literals is None:
                continue
            for row in list(_fire(rule, literals)):
                if model.add(rule.head.predicate, row):
                    changed = True
    return model


def entails(rules: Iterable[Rule], store: FactStore, goal: Atom) -> bool:
    """Whether ``goal`` is in the least model of ``rules`` and ``store``.

    An unknown goal predicate is simply false under the closed world.
    """
    rules = list(rules)
    if not any(rule.head.predicate == goal.predicate for rule in rules):
        return store.contains_fact(goal)
    return ground_model(rules, store).contains_fact(goal)
