"""Relational property and functional dependency discovery.

Every property is a universally quantified statement about one relation (or a
pair of relations) of the background knowledge. Under the closed world it
holds exactly when the store contains no counter-example, so each check
searches for one.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from disco.core.exceptions import ContractViolation
from disco.schemas.property import MinerConfig, PropertyRecord
from disco.services.fact_store import FactStore, Relation, Row
from disco.services.terms import Atom, Const, render_atom

logger = logging.getLogger(__name__)

LETTERS = "abcdefghijklmnopqrstuvwxyz"


class Family(str, Enum):
    """Property families."""

    IRREFLEXIVE = "irreflexive"
    ANTITRANSITIVE = "antitransitive"
    ANTITRIANGULAR = "antitriangular"
    ASYMMETRIC = "asymmetric"
    UNIQUE = "unique"
    EXCLUSIVE = "exclusive"
    SINGLETON = "singleton"


_FAMILY_ORDER = {family: i for i, family in enumerate(Family)}


def _letters(columns: Iterable[int]) -> str:
    return "".join(LETTERS[c] for c in columns)


@dataclass(frozen=True)
class PropertyKind:
    """A property family instantiated for one arity.

    ``columns`` is the permutation image for asymmetry (``(1, 0)`` is
    ab->ba) and the determinant columns for uniqueness; ``dependents`` holds
    the determined columns of a uniqueness property.
    """

    family: Family
    arity: int
    columns: Tuple[int, ...] = ()
    dependents: Tuple[int, ...] = ()

    @classmethod
    def irreflexive(cls, arity: int = 2) -> "PropertyKind":
        return cls(Family.IRREFLEXIVE, arity)

    @classmethod
    def antitransitive(cls) -> "PropertyKind":
        return cls(Family.ANTITRANSITIVE, 2)

    @classmethod
    def antitriangular(cls) -> "PropertyKind":
        return cls(Family.ANTITRIANGULAR, 2)

    @classmethod
    def asymmetric(cls, permutation: Sequence[int] = (1, 0)) -> "PropertyKind":
        return cls(Family.ASYMMETRIC, len(permutation), tuple(permutation))

    @classmethod
    def unique(
        cls, determinant: Sequence[int], dependents: Sequence[int]
    ) -> "PropertyKind":
        return cls(
            Family.UNIQUE,
            len(determinant) + len(dependents),
            tuple(sorted(determinant)),
            tuple(sorted(dependents)),
        )

    @classmethod
    def exclusive(cls, arity: int) -> "PropertyKind":
        return cls(Family.EXCLUSIVE, arity)

    @classmethod
    def singleton(cls, arity: int) -> "PropertyKind":
        return cls(Family.SINGLETON, arity)

    @property
    def relation_count(self) -> int:
        return 2 if self.family == Family.EXCLUSIVE else 1

    @property
    def detail(self) -> Optional[str]:
        """Column pattern: ``ab_ba`` for asymmetry, ``a_b`` for uniqueness."""
        if self.family == Family.ASYMMETRIC:
            return f"{_letters(range(self.arity))}_{_letters(self.columns)}"
        if self.family == Family.UNIQUE:
            return f"{_letters(self.columns)}_{_letters(self.dependents)}"
        if self.family == Family.IRREFLEXIVE and self.arity > 2:
            return "a" * self.arity
        return None

    @property
    def asp_name(self) -> str:
        """Name used by the ASP property encoding."""
        if self.family == Family.EXCLUSIVE:
            return "unsat_pair"
        detail = self.detail
        return f"{self.family.value}_{detail}" if detail else self.family.value

    def sort_key(self) -> Tuple:
        return (_FAMILY_ORDER[self.family], self.arity, self.columns, self.dependents)

    def __str__(self) -> str:
        return self.asp_name


def kinds_for_arity(arity: int, max_arity: int = 3) -> List[PropertyKind]:
    """Single-relation properties worth checking for a relation of ``arity``."""
    kinds: List[PropertyKind] = []
    if arity >= 2:
        kinds.append(PropertyKind.irreflexive(arity))
    if arity == 2 and max_arity >= 2:
        kinds.append(PropertyKind.antitransitive())
        kinds.append(PropertyKind.antitriangular())
    if 2 <= arity <= min(3, max_arity):
        identity = tuple(range(arity))
        for perm in itertools.permutations(identity):
            if perm != identity:
                kinds.append(PropertyKind.asymmetric(perm))
        for size in range(1, arity):
            for determinant in itertools.combinations(identity, size):
                dependents = tuple(c for c in identity if c not in determinant)
                kinds.append(PropertyKind.unique(determinant, dependents))
    if arity >= 1:
        kinds.append(PropertyKind.singleton(arity))
    return sorted(kinds, key=PropertyKind.sort_key)


@dataclass(frozen=True)
class PropertyAssertion:
    """A property that holds in the mined store.

    ``relations`` holds one name, or two sorted names for exclusivity.
    """

    kind: PropertyKind
    relations: Tuple[str, ...]

    def sort_key(self) -> Tuple:
        return (self.relations, self.kind.sort_key())

    def to_record(self) -> PropertyRecord:
        return PropertyRecord(
            property=self.kind.family.value,
            relations=list(self.relations),
            arity=self.kind.arity,
            detail=self.kind.detail,
        )

    def to_asp(self) -> str:
        """``prop(name,p).``; exclusive pairs list the larger name first."""
        names = sorted(self.relations, reverse=True)
        return f"prop({self.kind.asp_name},{','.join(names)})."

    def __str__(self) -> str:
        return f"{self.kind.asp_name}({','.join(self.relations)})"


@dataclass(frozen=True)
class Counterexample:
    """Facts that refute a property."""

    kind: PropertyKind
    relations: Tuple[str, ...]
    facts: Tuple[Atom, ...]

    def __str__(self) -> str:
        return ", ".join(render_atom(fact) for fact in self.facts)


def _relations_checked(
    store: FactStore, kind: PropertyKind, relations: Sequence[str]
) -> Optional[List[Relation]]:
    """Resolve names, enforce arities; None when the nonempty guard fails."""
    if len(relations) != kind.relation_count:
        raise ContractViolation(
            f"{kind} relates {kind.relation_count} relation(s), got {len(relations)}"
        )
    resolved = []
    for name in relations:
        rel = store.relation(name)
        if rel is None or not len(rel):
            return None
        if rel.arity != kind.arity:
            raise ContractViolation(
                f"{kind} needs arity {kind.arity} but {name} has arity {rel.arity}"
            )
        resolved.append(rel)
    return resolved


def _row_keys(array: np.ndarray, base: int) -> Optional[np.ndarray]:
    """One int64 key per row, or None when the keys would overflow."""
    if array.shape[1] == 0:
        return np.zeros(array.shape[0], dtype=np.int64)
    if base ** array.shape[1] >= 2**63:
        return None
    keys = np.zeros(array.shape[0], dtype=np.int64)
    for column in range(array.shape[1] - 1, -1, -1):
        keys = keys * base + array[:, column]
    return keys


def _key_base(*arrays: np.ndarray) -> int:
    return int(max(int(a.max()) if a.size else 0 for a in arrays)) + 1


def _holds(kind: PropertyKind, rels: List[Relation]) -> bool:
    """Counter-example search over the relation arrays."""
    family = kind.family
    rel = rels[0]

    if family == Family.SINGLETON:
        return len(rel) == 1

    if family in (Family.ANTITRANSITIVE, Family.ANTITRIANGULAR):
        return _transitive_witness(rel, family) is None

    data = rel.as_array()
    if family == Family.IRREFLEXIVE:
        return not bool(np.all(data == data[:, :1], axis=1).any())

    if family == Family.UNIQUE:
        # Rows are distinct, so the determinant must identify every row
        keys = _row_keys(data[:, list(kind.columns)], _key_base(data))
        if keys is None:
            return _unique_witness(rel, kind) is None
        return int(np.unique(keys).size) == len(rel)

    if family == Family.ASYMMETRIC:
        base = _key_base(data)
        keys = _row_keys(data, base)
        if keys is None:
            return _asymmetric_witness(rel, kind) is None
        permuted = _row_keys(data[:, list(kind.columns)], base)
        return not bool(np.isin(permuted, keys).any())

    if family == Family.EXCLUSIVE:
        other = rels[1].as_array()
        base = _key_base(data, other)
        left, right = _row_keys(data, base), _row_keys(other, base)
        if left is None or right is None:
            return rel.tuples.isdisjoint(rels[1].tuples)
        return int(np.intersect1d(left, right).size) == 0

    raise ContractViolation(f"unknown property family {family}")


def check_property(
    store: FactStore, kind: PropertyKind, relations: Sequence[str]
) -> bool:
    """
    Decide whether a property holds for the named relations.

    Args:
        store: The background facts
        kind: Property to check
        relations: One relation name, two for exclusivity

    Returns:
        True iff every relation is nonempty and no counter-example exists

    Raises:
        ContractViolation: When the relation arities do not fit the property
    """
    rels = _relations_checked(store, kind, relations)
    if rels is None:
        return False
    return _holds(kind, rels)


def _transitive_witness(rel: Relation, family: Family) -> Optional[Tuple[Row, ...]]:
    for a, b in rel.rows:
        for _, c in rel.lookup(0, b):
            closing = (a, c) if family == Family.ANTITRANSITIVE else (c, a)
            if closing in rel.tuples:
                return ((a, b), (b, c), closing)
    return None


def _asymmetric_witness(rel: Relation, kind: PropertyKind) -> Optional[Tuple[Row, ...]]:
    for row in rel.rows:
        image = tuple(row[c] for c in kind.columns)
        if image in rel.tuples:
            return (row, image) if image != row else (row,)
    return None


def _unique_witness(rel: Relation, kind: PropertyKind) -> Optional[Tuple[Row, ...]]:
    first: Dict[Row, Row] = {}
    for row in rel.rows:
        key = tuple(row[c] for c in kind.columns)
        seen = first.setdefault(key, row)
        if seen != row:
            return (seen, row)
    return None


def find_counterexample(
    store: FactStore, kind: PropertyKind, relations: Sequence[str]
) -> Optional[Counterexample]:
    """
    Concrete facts refuting a property.

    Returns:
        The first counter-example in store order, or None when the property
        holds or a relation is empty

    Raises:
        ContractViolation: When the relation arities do not fit the property
    """
    rels = _relations_checked(store, kind, relations)
    if rels is None:
        return None
    rel = rels[0]
    names: Tuple[str, ...] = tuple(relations[:1])
    rows: Optional[Tuple[Row, ...]] = None
    family = kind.family

    if family == Family.IRREFLEXIVE:
        rows = next(((r,) for r in rel.rows if len(set(r)) == 1), None)
    elif family in (Family.ANTITRANSITIVE, Family.ANTITRIANGULAR):
        rows = _transitive_witness(rel, family)
    elif family == Family.ASYMMETRIC:
        rows = _asymmetric_witness(rel, kind)
    elif family == Family.UNIQUE:
        rows = _unique_witness(rel, kind)
    elif family == Family.SINGLETON:
        rows = tuple(rel.rows[:2]) if len(rel) > 1 else None
    elif family == Family.EXCLUSIVE:
        shared = next((r for r in rel.rows if r in rels[1].tuples), None)
        if shared is not None:
            names = tuple(relations)
            facts = tuple(Atom(name, tuple(Const(v) for v in shared)) for name in names)
            return Counterexample(kind, tuple(sorted(relations)), facts)

    if rows is None:
        return None
    facts = tuple(Atom(names[0], tuple(Const(v) for v in row)) for row in rows)
    return Counterexample(kind, names, facts)


def plan_checks(
    store: FactStore, config: MinerConfig
) -> List[Tuple[PropertyKind, Tuple[str, ...]]]:
    """Every (property, relations) pair to examine, guards already applied."""
    present: List[Relation] = []
    for name in config.candidates:
        if name in config.excluded:
            continue
        rel = store.relation(name)
        if rel is None or not len(rel):
            logger.warning(f"Candidate relation {name} is missing or empty, skipped")
            continue
        if rel.arity == 0 or not config.arity_enabled(rel.arity):
            continue
        present.append(rel)

    checks: List[Tuple[PropertyKind, Tuple[str, ...]]] = []
    for rel in present:
        for kind in kinds_for_arity(rel.arity, config.max_arity):
            checks.append((kind, (rel.name,)))
    for left, right in itertools.combinations(present, 2):
        if left.arity == right.arity:
            pair = tuple(sorted((left.name, right.name)))
            checks.append((PropertyKind.exclusive(left.arity), pair))
    return checks


def _sorted_assertions(found: Iterable[PropertyAssertion]) -> List[PropertyAssertion]:
    return sorted(set(found), key=PropertyAssertion.sort_key)


def mine_properties(store: FactStore, config: MinerConfig) -> List[PropertyAssertion]:
    """
    Discover the properties that hold for the candidate relations.

    Args:
        store: Background facts under the closed-world assumption
        config: Candidates, arity limits and thread count

    Returns:
        The assertions, sorted by relation names and then by property
    """
    checks = plan_checks(store, config)
    if not checks:
        return []

    # Materialise arrays and indexes before the threads share the relations
    for kind, names in checks:
        for name in names:
            rel = store.relation(name)
            assert rel is not None
            rel.as_array()
            if kind.family in (Family.ANTITRANSITIVE, Family.ANTITRIANGULAR):
                rel.column_index(0)

    def run(check: Tuple[PropertyKind, Tuple[str, ...]]) -> Optional[PropertyAssertion]:
        kind, names = check
        if check_property(store, kind, names):
            return PropertyAssertion(kind, names)
        return None

    if config.threads > 1 and len(checks) > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, checks))
    else:
        results = [run(check) for check in checks]

    found = _sorted_assertions(r for r in results if r is not None)
    logger.info(
        f"Checked {len(checks)} properties over {len(config.candidates)} "
        f"candidates, {len(found)} hold"
    )
    return found


def explain_failures(
    store: FactStore, config: MinerConfig
) -> List[Counterexample]:
    """Counter-examples for every planned property that does not hold."""
    witnesses = []
    for kind, names in plan_checks(store, config):
        witness = find_counterexample(store, kind, names)
        if witness is not None:
            witnesses.append(witness)
    return witnesses


def _oracle_holds(kind: PropertyKind, rows: List[List[Row]]) -> bool:
    """Exhaustive scans over plain tuple lists."""
    p = rows[0]
    family = kind.family
    if family == Family.SINGLETON:
        return len(p) == 1
    if family == Family.IRREFLEXIVE:
        return not any(all(v == t[0] for v in t) for t in p)
    if family == Family.ANTITRANSITIVE:
        for t1 in p:
            for t2 in p:
                if t1[1] == t2[0] and (t1[0], t2[1]) in p:
                    return False
        return True
    if family == Family.ANTITRIANGULAR:
        for t1 in p:
            for t2 in p:
                if t1[1] == t2[0] and (t2[1], t1[0]) in p:
                    return False
        return True
    if family == Family.ASYMMETRIC:
        for t in p:
            if tuple(t[c] for c in kind.columns) in p:
                return False
        return True
    if family == Family.UNIQUE:
        for t1 in p:
            for t2 in p:
                same = all(t1[c] == t2[c] for c in kind.columns)
                differ = any(t1[c] != t2[c] for c in kind.dependents)
                if same and differ:
                    return False
        return True
    if family == Family.EXCLUSIVE:
        return not any(t in rows[1] for t in p)
    raise ContractViolation(f"unknown property family {family}")


def oracle_mine(store: FactStore, config: MinerConfig) -> List[PropertyAssertion]:
    """Brute-force reference for :func:`mine_properties`, for small stores only."""
    found = []
    for kind, names in plan_checks(store, config):
        rows = []
        for name in names:
            rel = store.relation(name)
            assert rel is not None
            rows.append(list(rel.rows))
        if _oracle_holds(kind, rows):
            found.append(PropertyAssertion(kind, names))
    return _sorted_assertions(found)
