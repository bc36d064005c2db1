"""Ground relation storage with per-column indexes."""

import logging
from typing import Dict, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from disco.core.exceptions import ArityMismatchError
from disco.services.terms import Atom, Const, render_atom, symbols

logger = logging.getLogger(__name__)

Row = Tuple[int, ...]

_EMPTY: List[Row] = []


class RelationInfo(NamedTuple):
    """Catalog entry for one relation."""

    name: str
    arity: int
    size: int


class Relation:
    """A duplicate-free set of tuples of one arity.

    Column indexes map a constant to the list of tuples holding it in that
    column. They are built on first use and never change afterwards, so a
    loaded relation can be read from several threads.
    """

    def __init__(self, name: str, arity: int):
        self.name = name
        self.arity = arity
        self.tuples: set = set()
        self.rows: List[Row] = []
        self._index: Dict[int, Dict[int, List[Row]]] = {}
        self._array: Optional[np.ndarray] = None

    def add(self, row: Row) -> bool:
        """Insert ``row``; returns False when it was already present."""
        if row in self.tuples:
            return False
        self.tuples.add(row)
        self.rows.append(row)
        if self._index:
            for column, index in self._index.items():
                index.setdefault(row[column], []).append(row)
        self._array = None
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def __contains__(self, row: object) -> bool:
        return row in self.tuples

    def __iter__(self) -> Iterator[Row]:
        return iter(self.rows)

    def column_index(self, column: int) -> Dict[int, List[Row]]:
        index = self._index.get(column)
        if index is None:
            index = {}
            for row in self.rows:
                index.setdefault(row[column], []).append(row)
            self._index[column] = index
        return index

    def lookup(self, column: int, value: int) -> List[Row]:
        """Tuples whose ``column`` holds ``value``."""
        return self.column_index(column).get(value, _EMPTY)

    def as_array(self) -> np.ndarray:
        """The tuples as an ``(n, arity)`` int64 array, in insertion order."""
        if self._array is None:
            if self.rows:
                self._array = np.asarray(self.rows, dtype=np.int64).reshape(
                    len(self.rows), self.arity
                )
            else:
                self._array = np.empty((0, self.arity), dtype=np.int64)
        return self._array

    def copy(self) -> "Relation":
        clone = Relation(self.name, self.arity)
        clone.tuples = set(self.tuples)
        clone.rows = list(self.rows)
        return clone


class FactStore:
    """The ground facts of a background knowledge base.

    A store may sit on top of a parent store: relations it does not hold are
    read from the parent, and writing to such a relation first copies it. This
    is how derived models are kept private without copying the whole BK.
    """

    def __init__(self, parent: Optional["FactStore"] = None):
        self.parent = parent
        self._relations: Dict[str, Relation] = {}

    def relation(self, name: str) -> Optional[Relation]:
        found = self._relations.get(name)
        if found is None and self.parent is not None:
            return self.parent.relation(name)
        return found

    def arity_of(self, name: str) -> Optional[int]:
        rel = self.relation(name)
        return rel.arity if rel is not None else None

    def _writable(self, name: str, arity: int) -> Relation:
        rel = self._relations.get(name)
        if rel is None:
            inherited = self.parent.relation(name) if self.parent is not None else None
            if inherited is not None:
                if inherited.arity != arity:
                    raise ArityMismatchError(
                        f"{name} used with arity {arity} but declared with "
                        f"arity {inherited.arity}"
                    )
                rel = inherited.copy()
            else:
                rel = Relation(name, arity)
            self._relations[name] = rel
        elif rel.arity != arity:
            raise ArityMismatchError(
                f"{name} used with arity {arity} but declared with arity {rel.arity}"
            )
        return rel

    def declare(self, name: str, arity: int) -> Relation:
        """Make sure ``name/arity`` exists, possibly empty."""
        return self._writable(name, arity)

    def add(self, name: str, row: Row) -> bool:
        """Add one tuple of constant ids; returns False for a duplicate."""
        return self._writable(name, len(row)).add(row)

    def add_fact(self, atom: Atom) -> bool:
        """Add a ground atom."""
        row = []
        for term in atom.args:
            if not isinstance(term, Const):
                raise ValueError(f"fact {render_atom(atom)} is not ground")
            row.append(term.symbol)
        return self.add(atom.predicate, tuple(row))

    def add_texts(self, name: str, values: Sequence[str]) -> bool:
        """Add a tuple given as constant texts."""
        return self.add(name, tuple(symbols.intern(v) for v in values))

    def contains(self, name: str, row: Row) -> bool:
        rel = self.relation(name)
        return rel is not None and row in rel.tuples

    def contains_fact(self, atom: Atom) -> bool:
        if not atom.is_ground():
            return False
        row = tuple(t.symbol for t in atom.args)  # type: ignore[union-attr]
        return self.contains(atom.predicate, row)

    def names(self) -> List[str]:
        """Relation names visible from this store, sorted."""
        found = set(self._relations)
        if self.parent is not None:
            found.update(self.parent.names())
        return sorted(found)

    def catalog(self) -> List[RelationInfo]:
        infos = []
        for name in self.names():
            rel = self.relation(name)
            assert rel is not None
            infos.append(RelationInfo(name, rel.arity, len(rel)))
        return infos

    def fact_count(self) -> int:
        return sum(info.size for info in self.catalog())

    def texts(self, name: str) -> List[Tuple[str, ...]]:
        """Tuples of ``name`` rendered as text, sorted."""
        rel = self.relation(name)
        if rel is None:
            return []
        return sorted(tuple(symbols.text(v) for v in row) for row in rel.rows)

    def copy(self) -> "FactStore":
        """A flat, independent copy."""
        clone = FactStore()
        for name in self.names():
            rel = self.relation(name)
            assert rel is not None
            clone._relations[name] = rel.copy()
        return clone

    def same_facts(self, other: "FactStore") -> bool:
        """Equality of the visible non-empty relations."""
        mine = {n for n in self.names() if len(self.relation(n) or ()) > 0}
        theirs = {n for n in other.names() if len(other.relation(n) or ()) > 0}
        if mine != theirs:
            return False
        return all(
            self.relation(n).tuples == other.relation(n).tuples  # type: ignore[union-attr]
            for n in mine
        )

    @classmethod
    def from_texts(cls, facts: Iterable[Tuple[str, Sequence[str]]]) -> "FactStore":
        """Build a store from ``(predicate, constant texts)`` pairs."""
        store = cls()
        for name, values in facts:
            store.add_texts(name, values)
        return store

    def __repr__(self) -> str:
        return f"<FactStore(relations={len(self.names())}, facts={self.fact_count()})>"
