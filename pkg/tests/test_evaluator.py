"""Tests for bottom-up evaluation."""

import random

import pytest

from disco.core.exceptions import RuleValidationError
from disco.services.evaluator import (
    entails,
    ground_model,
    naive_model,
    rule_covers,
    sat_body,
    solve_body,
)
from disco.services.fact_store import FactStore
from disco.services.parser import parse_atom, parse_facts, parse_program, parse_rule
from disco.services.terms import Atom, Const, Var, make_rule, symbols
from tests.conftest import random_store

CHAIN = "e(a,b).\ne(b,c).\ne(c,d).\n"


def _body(text: str):
    return list(parse_rule(f"goal:-{text}.").body)


def _random_body(rng: random.Random, store: FactStore):
    body = []
    for _ in range(rng.randint(1, 3)):
        name = rng.choice(store.names())
        arity = store.arity_of(name)
        body.append(Atom(name, tuple(Var(rng.randrange(3)) for _ in range(arity))))
    return body


def _with_more_facts(rng: random.Random, store: FactStore) -> FactStore:
    larger = store.copy()
    for _ in range(rng.randint(1, 4)):
        name = rng.choice(store.names())
        larger.add_texts(
            name, [f"c{rng.randrange(5)}" for _ in range(store.arity_of(name))]
        )
    return larger


def _random_program(rng: random.Random, store: FactStore):
    relations = [(name, store.arity_of(name)) for name in store.names()]
    relations += [("d0", 2), ("d1", 2)]
    rules = []
    for _ in range(rng.randint(1, 4)):
        head = Atom(rng.choice(["d0", "d1"]), (Var(0), Var(1)))
        body = []
        for _ in range(rng.randint(1, 3)):
            name, arity = rng.choice(relations)
            body.append(Atom(name, tuple(Var(rng.randrange(3)) for _ in range(arity))))
        try:
            rules.append(make_rule(head, body))
        except RuleValidationError:
            continue
    return rules


class TestSatBody:
    """Test conjunctive query satisfiability."""

    def test_join(self):
        """Shared variables join."""
        store = parse_facts(CHAIN)

        assert sat_body(_body("e(A,B),e(B,C)"), [], store)
        assert not sat_body(_body("e(A,B),e(B,C),e(C,D),e(D,F)"), [], store)

    def test_repeated_variable(self):
        """A variable twice in one literal needs equal columns."""
        store = parse_facts(CHAIN)

        assert not sat_body(_body("e(A,A)"), [], store)
        store.add_texts("e", ["d", "d"])
        assert sat_body(_body("e(A,A)"), [], store)

    def test_disequality(self):
        """Disequal variables take distinct constants."""
        store = parse_facts("p(a,b).\n")
        body = _body("p(A,B),p(A,C)")

        assert sat_body(body, [], store)
        assert not sat_body(body, [(1, 2)], store)

    def test_unknown_relation(self):
        """Missing relations are empty."""
        assert not sat_body(_body("nope(A)"), [], FactStore())

    def test_prebound_variables(self):
        """A binding fixes variables in advance."""
        store = parse_facts(CHAIN)
        body = _body("e(A,B)")
        a, c = symbols.intern("a"), symbols.intern("c")

        assert sat_body(body, [], store, {0: a})
        assert not sat_body(body, [], store, {0: a, 1: c})

    def test_all_solutions(self):
        """Every substitution is produced once."""
        store = parse_facts(CHAIN)
        found = {tuple(sorted(b.items())) for b in solve_body(_body("e(A,B)"), [], store)}

        assert len(found) == 3

    def test_monotone_in_facts(self):
        """Adding facts never makes a satisfiable body unsatisfiable."""
        rng = random.Random(7)
        for _ in range(1000):
            store = random_store(rng, relations=3, max_arity=2, max_facts=12, constants=4)
            body = _random_body(rng, store)
            larger = _with_more_facts(rng, store)
            if sat_body(body, [], store):
                assert sat_body(body, [], larger)

    def test_agrees_with_least_model(self):
        """A body is satisfiable for a binding iff the rule derives its head."""
        rng = random.Random(13)
        constants = [symbols.intern(f"c{i}") for i in range(4)]
        for _ in range(200):
            store = random_store(rng, relations=3, max_arity=2, max_facts=12, constants=4)
            body = _random_body(rng, store)
            variables = sorted({v for lit in body for v in lit.variables()})
            rule = make_rule(Atom("w", tuple(Var(v) for v in variables)), body)
            model = ground_model([rule], store)

            derived = len(model.relation("w") or ())
            assert sat_body(rule.body, [], store) == bool(derived)
            for _ in range(10):
                row = tuple(rng.choice(constants) for _ in rule.head.args)
                binding = {t.index: value for t, value in zip(rule.head.args, row)}
                found = sat_body(rule.body, [], store, binding)
                assert model.contains("w", row) == found


class TestGroundModel:
    """Test least-model computation."""

    def test_transitive_closure(self):
        """Recursion reaches the fixpoint."""
        program = parse_program(CHAIN + "r(A,B):-e(A,B).\nr(A,B):-e(A,C),r(C,B).\n")
        model = ground_model(program.rules, program.facts)

        assert model.texts("r") == [
            ("a", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "d"),
        ]

    def test_base_store_untouched(self):
        """Derived facts stay in the model."""
        program = parse_program(CHAIN + "r(A,B):-e(A,B).\n")
        ground_model(program.rules, program.facts)

        assert program.facts.relation("r") is None

    def test_no_rules(self):
        """The model of no rules is the store itself."""
        store = parse_facts(CHAIN)

        assert ground_model([], store).same_facts(store)

    def test_matches_naive_fixpoint(self):
        """Semi-naive and naive evaluation agree on random programs."""
        rng = random.Random(11)
        for _ in range(100):
            store = random_store(rng, relations=3, max_arity=2, max_facts=40, constants=6)
            rules = _random_program(rng, store)
            assert ground_model(rules, store).same_facts(naive_model(rules, store))

    def test_entails(self):
        """Goals are checked against the least model."""
        program = parse_program(CHAIN + "r(A,B):-e(A,C),e(C,B).\n")

        assert entails(program.rules, program.facts, parse_atom("r(a,c)"))
        assert not entails(program.rules, program.facts, parse_atom("r(a,d)"))
        assert not entails(program.rules, program.facts, parse_atom("s(a)"))

    def test_entailment_monotone_in_facts(self):
        """Adding facts never retracts an entailed goal."""
        rng = random.Random(17)
        for _ in range(1000):
            store = random_store(rng, relations=3, max_arity=2, max_facts=12, constants=4)
            rules = _random_program(rng, store)
            larger = _with_more_facts(rng, store)
            goal = Atom(
                rng.choice(["d0", "d1"]),
                tuple(Const(symbols.intern(f"c{rng.randrange(4)}")) for _ in range(2)),
            )
            if entails(rules, store, goal):
                assert entails(rules, larger, goal)

    def test_rule_covers(self):
        """One application of a rule derives the fact."""
        store = parse_facts(CHAIN)
        rule = parse_rule("r(A,B):-e(A,C),e(C,B).")

        assert rule_covers(rule, store, parse_atom("r(a,c)"))
        assert not rule_covers(rule, store, parse_atom("r(a,b)"))
        assert not rule_covers(rule, store, parse_atom("s(a,c)"))


@pytest.mark.slow
class TestLargeStore:
    """Test evaluation over a larger store."""

    def test_long_chain_closure(self):
        """Closure of a 60-edge chain has 60*61/2 facts."""
        facts = "".join(f"e(n{i},n{i + 1}).\n" for i in range(60))
        program = parse_program(facts + "r(A,B):-e(A,B).\nr(A,B):-e(A,C),r(C,B).\n")
        model = ground_model(program.rules, program.facts)

        assert len(model.relation("r")) == 60 * 61 // 2
