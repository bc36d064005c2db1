"""Rule-space enumeration under a language bias."""

import logging
from typing import Dict, Iterator, List, Optional, Tuple

from disco.schemas.bias import Bias, PredicateDecl
from disco.services.constraints import ConstraintSet
from disco.services.terms import (
    Atom,
    LiteralKey,
    Rule,
    Var,
    is_connected,
    literal_key,
    make_rule,
)

logger = logging.getLogger(__name__)


def head_atom(bias: Bias) -> Atom:
    """The head literal of every rule: distinct variables A, B, ..."""
    return Atom(bias.head.name, tuple(Var(i) for i in range(bias.head.arity)))


def _argument_tuples(
    arity: int, next_var: int, max_vars: int
) -> Iterator[Tuple[int, ...]]:
    """Argument tuples that reuse known variables or introduce the next fresh one."""
    if arity == 0:
        yield ()
        return

    def extend(prefix: Tuple[int, ...], fresh: int) -> Iterator[Tuple[int, ...]]:
        if len(prefix) == arity:
            yield prefix
            return
        for index in range(fresh):
            yield from extend(prefix + (index,), fresh)
        if fresh < max_vars:
            yield from extend(prefix + (fresh,), fresh + 1)

    yield from extend((), next_var)


def enumerate_rules(
    bias: Bias, discovered: Optional[ConstraintSet] = None, size: int = 2
) -> List[Rule]:
    """
    Every canonical rule with exactly ``size`` literals.

    Bodies are built as strictly increasing literal sequences whose fresh
    variables appear in order, so each rule is produced once, in its
    canonical form. A body prefix that violates a discovered constraint is
    abandoned: every extension would violate it too.

    Args:
        bias: Head, body predicates and bounds
        discovered: Constraints to prune with; none when omitted
        size: Literal count including the head

    Returns:
        The rules in generation order
    """
    body_size = size - 1
    if body_size < 1 or body_size > bias.max_body:
        return []

    head = head_atom(bias)
    head_vars = bias.head.arity
    decls: List[PredicateDecl] = bias.body_declarations()
    constraints = discovered if discovered else None
    rules: List[Rule] = []

    def extend(body: List[Atom], last: Optional[LiteralKey], next_var: int) -> None:
        if len(body) == body_size:
            rule = _admit(head, body)
            if rule is not None:
                rules.append(rule)
            return
        for decl in decls:
            for args in _argument_tuples(decl.arity, next_var, bias.max_vars):
                lit = Atom(decl.name, tuple(Var(i) for i in args))
                key = literal_key(lit)
                if last is not None and key <= last:
                    continue
                if lit == head:
                    continue
                body.append(lit)
                if constraints is None or not constraints.body_violates(body):
                    extend(body, key, max([next_var, *(a + 1 for a in args)]))
                body.pop()

    extend([], None, head_vars)
    logger.debug(f"Enumerated {len(rules)} rules of size {size}")
    return rules


def _admit(head: Atom, body: List[Atom]) -> Optional[Rule]:
    """The rule for ``body`` if it is safe, connected and already canonical."""
    body_vars = set()
    for lit in body:
        body_vars.update(lit.variables())
    if any(v not in body_vars for v in head.variables()):
        return None
    if not is_connected(head, body):
        return None
    rule = make_rule(head, body, validate=False)
    if rule.body != tuple(body):
        return None
    return rule


def rule_space(
    bias: Bias, discovered: Optional[ConstraintSet] = None
) -> Dict[int, int]:
    """Rule counts per size, from 2 to ``1 + max_body``."""
    return {
        size: len(enumerate_rules(bias, discovered, size))
        for size in range(2, bias.max_body + 2)
    }
