"""Symbols, terms, atoms and rules of function-free Datalog.

Rules are always kept in canonical form: head variables are numbered left to
right, body literals are sorted, and the remaining variables are numbered by
first occurrence along that sorted order. Two rules that differ only by a
variable renaming or by body order therefore compare equal.
"""

import threading
from dataclasses import dataclass
from typing import (
    Dict,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
    Union,
)

from disco.core.exceptions import RuleValidationError


class SymbolTable:
    """Bijective interning of identifier strings to small integers."""

    def __init__(self) -> None:
        self._ids: Dict[str, int] = {}
        self._texts: List[str] = []
        self._lock = threading.Lock()

    def intern(self, text: str) -> int:
        """Return the id for ``text``, allocating one on first use."""
        found = self._ids.get(text)
        if found is not None:
            return found
        with self._lock:
            found = self._ids.get(text)
            if found is None:
                found = len(self._texts)
                self._texts.append(text)
                self._ids[text] = found
            return found

    def text(self, symbol_id: int) -> str:
        return self._texts[symbol_id]

    def __len__(self) -> int:
        return len(self._texts)


# Process-wide table shared by stores, rules and examples
symbols = SymbolTable()


@dataclass(frozen=True)
class Var:
    """A variable; index 0 renders as A, 1 as B, ..."""

    __slots__ = ("index",)
    index: int


@dataclass(frozen=True)
class Const:
    """A constant, held as an interned symbol id."""

    __slots__ = ("symbol",)
    symbol: int


Term = Union[Var, Const]
TermKey = Tuple[int, Union[int, str]]
LiteralKey = Tuple[str, int, Tuple[TermKey, ...]]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to a tuple of terms."""

    predicate: str
    args: Tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> List[int]:
        """Variable indices in order of occurrence (duplicates kept)."""
        return [t.index for t in self.args if isinstance(t, Var)]

    def is_ground(self) -> bool:
        return all(isinstance(t, Const) for t in self.args)

    def __str__(self) -> str:
        return render_atom(self)


def var_name(index: int) -> str:
    """Render a variable index: A..Z, then V26, V27, ..."""
    if index < 26:
        return chr(ord("A") + index)
    return f"V{index}"


def render_term(term: Term) -> str:
    if isinstance(term, Var):
        return var_name(term.index)
    return symbols.text(term.symbol)


def render_atom(atom: Atom) -> str:
    if not atom.args:
        return atom.predicate
    return f"{atom.predicate}({','.join(render_term(t) for t in atom.args)})"


def term_key(term: Term) -> TermKey:
    if isinstance(term, Var):
        return (0, term.index)
    return (1, symbols.text(term.symbol))


def literal_key(atom: Atom) -> LiteralKey:
    return (atom.predicate, len(atom.args), tuple(term_key(t) for t in atom.args))


@dataclass(frozen=True)
class Rule:
    """A definite clause in canonical form.

    Build rules with :func:`make_rule`; the constructor trusts its input.
    """

    head: Atom
    body: Tuple[Atom, ...]
    diseqs: Tuple[Tuple[int, int], ...] = ()

    @property
    def size(self) -> int:
        """Literal count: one head plus the body."""
        return 1 + len(self.body)

    @property
    def is_recursive(self) -> bool:
        return any(lit.predicate == self.head.predicate for lit in self.body)

    def variables(self) -> Set[int]:
        found = set(self.head.variables())
        for lit in self.body:
            found.update(lit.variables())
        return found

    def encoding(self) -> Tuple:
        """Total order key used for deterministic iteration."""
        return (
            literal_key(self.head),
            tuple(literal_key(lit) for lit in self.body),
            self.diseqs,
        )

    def __lt__(self, other: "Rule") -> bool:
        return self.encoding() < other.encoding()

    def __str__(self) -> str:
        return render_rule(self)


def render_rule(rule: Rule) -> str:
    """Render as ``head:-lit1,lit2,A!=B.``"""
    items = [render_atom(lit) for lit in rule.body]
    items.extend(f"{var_name(a)}!={var_name(b)}" for a, b in rule.diseqs)
    return f"{render_atom(rule.head)}:-{','.join(items)}."


def _rename(atom: Atom, mapping: Dict[int, int]) -> Atom:
    return Atom(
        atom.predicate,
        tuple(Var(mapping[t.index]) if isinstance(t, Var) else t for t in atom.args),
    )


def _encode(
    atom: Atom, mapping: Dict[int, int], next_index: int
) -> Tuple[LiteralKey, Dict[int, int]]:
    """Encode ``atom`` under ``mapping``, numbering unmapped variables from ``next_index``."""
    fresh: Dict[int, int] = {}
    keys = []
    for term in atom.args:
        if isinstance(term, Var):
            mapped = mapping.get(term.index)
            if mapped is None:
                mapped = fresh.get(term.index)
                if mapped is None:
                    mapped = next_index + len(fresh)
                    fresh[term.index] = mapped
            keys.append((0, mapped))
        else:
            keys.append((1, symbols.text(term.symbol)))
    return (atom.predicate, len(atom.args), tuple(keys)), fresh


def _canonical_orders(
    body: Sequence[Atom], mapping: Dict[int, int], next_index: int
) -> List[Tuple[Tuple[LiteralKey, ...], Dict[int, int]]]:
    """All minimal body encodings, branching only where literals tie."""
    best: List[Tuple[Tuple[LiteralKey, ...], Dict[int, int]]] = []
    best_prefix: List[Optional[Tuple[LiteralKey, ...]]] = [None]

    def extend(
        remaining: Tuple[Atom, ...],
        mapping: Dict[int, int],
        nxt: int,
        prefix: Tuple[LiteralKey, ...],
    ) -> None:
        bound = best_prefix[0]
        if bound is not None and prefix > bound[: len(prefix)]:
            return
        if not remaining:
            if bound is None or prefix < bound:
                best_prefix[0] = prefix
                best.clear()
            best.append((prefix, mapping))
            return
        scored = [(_encode(lit, mapping, nxt), i) for i, lit in enumerate(remaining)]
        low = min(key for (key, _), _ in scored)
        for (key, fresh), i in scored:
            if key != low:
                continue
            extended = dict(mapping)
            extended.update(fresh)
            extend(
                remaining[:i] + remaining[i + 1 :],
                extended,
                nxt + len(fresh),
                prefix + (key,),
            )

    extend(tuple(body), mapping, next_index, ())
    return best


def validate_rule(
    head: Atom, body: Sequence[Atom], diseqs: Iterable[Tuple[int, int]] = ()
) -> None:
    """Check the definite-rule invariants, raising :class:`RuleValidationError`."""
    if not body:
        raise RuleValidationError(f"rule for {head.predicate} has an empty body")

    body_vars: Set[int] = set()
    for lit in body:
        body_vars.update(lit.variables())

    for index in head.variables():
        if index not in body_vars:
            raise RuleValidationError(
                f"head variable {var_name(index)} of {render_atom(head)} "
                "does not occur in the body"
            )
    for a, b in diseqs:
        for index in (a, b):
            if index not in body_vars:
                raise RuleValidationError(
                    f"disequality variable {var_name(index)} does not occur in the body"
                )

    if not is_connected(head, body):
        raise RuleValidationError(
            f"body of the rule for {render_atom(head)} is not connected: "
            + ", ".join(render_atom(lit) for lit in body)
        )


def is_connected(head: Atom, body: Sequence[Atom]) -> bool:
    """Every body literal must be reachable from the head through shared variables.

    With a variable-free head the body literals must form one component.
    """
    literal_vars = [set(lit.variables()) for lit in body]
    reached = set(head.variables())
    pending = list(range(len(body)))
    if not reached:
        if len(body) <= 1:
            return True
        reached = set(literal_vars[0])
        pending = pending[1:]
    progress = True
    while pending and progress:
        progress = False
        still = []
        for i in pending:
            if literal_vars[i] & reached:
                reached |= literal_vars[i]
                progress = True
            else:
                still.append(i)
        pending = still
    return not pending


def make_rule(
    head: Atom,
    body: Iterable[Atom],
    diseqs: Iterable[Tuple[int, int]] = (),
    validate: bool = True,
) -> Rule:
    """
    Build a canonical rule.

    Args:
        head: Head atom
        body: Body atoms; duplicates are dropped
        diseqs: Pairs of variable indices that must differ
        validate: Check safety and connectivity first

    Returns:
        The canonical rule

    Raises:
        RuleValidationError: When the clause is not an admissible rule
    """
    unique_body = list(dict.fromkeys(body))
    diseq_list = [(a, b) for a, b in diseqs]
    if validate:
        validate_rule(head, unique_body, diseq_list)

    mapping: Dict[int, int] = {}
    for index in head.variables():
        if index not in mapping:
            mapping[index] = len(mapping)

    candidates = _canonical_orders(unique_body, mapping, len(mapping))
    best_rule: Optional[Rule] = None
    for _, full in candidates:
        renamed_diseqs = tuple(
            sorted(
                {
                    (min(full[a], full[b]), max(full[a], full[b]))
                    for a, b in diseq_list
                }
            )
        )
        body_atoms = sorted(
            (_rename(lit, full) for lit in unique_body), key=literal_key
        )
        rule = Rule(_rename(head, full), tuple(body_atoms), renamed_diseqs)
        if best_rule is None or rule.diseqs < best_rule.diseqs:
            best_rule = rule
    assert best_rule is not None
    return best_rule
