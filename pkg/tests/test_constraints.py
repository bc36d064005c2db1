"""Tests for constraint compilation and matching."""

import random

from disco.schemas.bias import Bias
from disco.schemas.property import MinerConfig
from disco.services.constraints import (
    ConstraintMode,
    ConstraintSet,
    LiteralTemplate,
    compile_constraint,
    match_templates,
    violates,
    violation_core,
)
from disco.services.enumerator import enumerate_rules
from disco.services.evaluator import sat_body
from disco.services.miner import PropertyAssertion, PropertyKind, mine_properties
from disco.services.parser import parse_rule
from disco.services.terms import Atom, Rule, Var
from tests.conftest import body_decls, random_store


def _assertion(kind, *relations):
    return PropertyAssertion(kind, tuple(relations))


ASYMMETRIC_TAIL = _assertion(PropertyKind.asymmetric(), "tail")
ANTITRANSITIVE_TAIL = _assertion(PropertyKind.antitransitive(), "tail")
FUNCTIONAL_TAIL = _assertion(PropertyKind.unique((0,), (1,)), "tail")
INJECTIVE_TAIL = _assertion(PropertyKind.unique((1,), (0,)), "tail")
IRREFLEXIVE_TAIL = _assertion(PropertyKind.irreflexive(), "tail")
EXCLUSIVE_PARITY = _assertion(PropertyKind.exclusive(1), "even", "odd")
SINGLETON_ONE = _assertion(PropertyKind.singleton(1), "one")


class TestCompileConstraint:
    """Test the constraint built for each family."""

    def test_asymmetric(self):
        """Both orientations of one pair."""
        constraint = compile_constraint(ASYMMETRIC_TAIL)

        assert constraint.mode == ConstraintMode.PATTERN
        assert str(constraint) == ":- tail(A,B), tail(B,A)."
        assert constraint.to_asp() == (
            ":- body_literal(Rule,tail,_,(A,B)), body_literal(Rule,tail,_,(B,A))."
        )

    def test_antitransitive(self):
        """A transitive triangle."""
        constraint = compile_constraint(ANTITRANSITIVE_TAIL)

        assert str(constraint) == ":- tail(A,B), tail(B,C), tail(A,C)."

    def test_antitriangular(self):
        """A directed cycle of three."""
        constraint = compile_constraint(_assertion(PropertyKind.antitriangular(), "tail"))

        assert str(constraint) == ":- tail(A,B), tail(B,C), tail(C,A)."

    def test_irreflexive(self):
        """A repeated variable."""
        constraint = compile_constraint(IRREFLEXIVE_TAIL)

        assert str(constraint) == ":- tail(A,A)."

    def test_exclusive(self):
        """The same arguments in both relations."""
        constraint = compile_constraint(EXCLUSIVE_PARITY)

        assert str(constraint) == ":- even(A), odd(A)."
        assert constraint.to_asp() == (
            ":- body_literal(Rule,even,_,(A,)), body_literal(Rule,odd,_,(A,))."
        )

    def test_unique_counts(self):
        """Functional dependencies bound the completions per key."""
        constraint = compile_constraint(FUNCTIONAL_TAIL)

        assert constraint.mode == ConstraintMode.COUNT
        assert constraint.count.grouping == (0,)
        assert str(constraint) == ":- tail(A,B), tail(A,C), B!=C."
        assert constraint.to_asp() == (
            ":- body_literal(Rule,tail,_,(A,_)), "
            "#count{B : body_literal(Rule,tail,_,(A,B))} > 1."
        )

    def test_singleton_counts(self):
        """A singleton allows one argument tuple."""
        constraint = compile_constraint(SINGLETON_ONE)

        assert constraint.count.grouping == ()
        assert constraint.to_asp() == (
            ":- body_literal(Rule,one,_,_), "
            "#count{Vars : body_literal(Rule,one,_,Vars)} > 1."
        )

    def test_ternary_unique_witnesses(self):
        """One witness per determined column."""
        kind = PropertyKind.unique((0,), (1, 2))
        constraint = compile_constraint(_assertion(kind, "p"))

        assert len(constraint.witnesses()) == 2


class TestViolates:
    """Test rule-level matching."""

    def test_asymmetric_pair(self):
        """Symmetric use of an asymmetric relation."""
        constraint = compile_constraint(ASYMMETRIC_TAIL)

        assert violates(parse_rule("f(A):-tail(A,B),tail(B,A)."), constraint)
        assert not violates(parse_rule("f(A,B):-tail(A,C),tail(C,B)."), constraint)

    def test_antitransitive_triangle(self):
        """A shortcut next to a path."""
        constraint = compile_constraint(ANTITRANSITIVE_TAIL)

        assert violates(parse_rule("f(A,B):-tail(A,C),tail(C,B),tail(A,B)."), constraint)
        assert not violates(parse_rule("f(A,B):-tail(A,C),tail(C,B)."), constraint)

    def test_head_is_ignored(self):
        """Only the body counts."""
        constraint = compile_constraint(IRREFLEXIVE_TAIL)

        assert violates(parse_rule("tail(A,B):-tail(A,A),tail(A,B)."), constraint)
        assert not violates(parse_rule("tail(A,A):-tail(A,B)."), constraint)

    def test_count_bounds(self):
        """Two completions for one key break a dependency."""
        functional = compile_constraint(FUNCTIONAL_TAIL)
        injective = compile_constraint(INJECTIVE_TAIL)
        forked = parse_rule("f(A):-tail(A,B),tail(A,C).")
        joined = parse_rule("f(A):-tail(A,B),tail(C,B).")

        assert violates(forked, functional)
        assert not violates(forked, injective)
        assert violates(joined, injective)
        assert not violates(joined, functional)

    def test_count_bounds_read_variables_as_distinct(self, intro_store):
        """A body satisfiable only by merging two variables is still pruned."""
        rule = parse_rule("f(A):-tail(A,B),tail(A,C).")

        assert sat_body(rule.body, [], intro_store)
        assert violates(rule, compile_constraint(FUNCTIONAL_TAIL))

    def test_singleton_bound(self):
        """Two distinct tuples of a singleton relation."""
        constraint = compile_constraint(SINGLETON_ONE)

        assert violates(parse_rule("f(A):-one(A),p(A,B),one(B)."), constraint)
        assert not violates(parse_rule("f(A):-one(A),p(A,B)."), constraint)

    def test_homomorphic_matching(self):
        """Templates may share a literal unless matching is injective."""
        templates = [LiteralTemplate("p", (0, 1)), LiteralTemplate("p", (1, 0))]
        body = [Atom("p", (Var(2), Var(2)))]

        assert list(match_templates(templates, [], body))
        assert not list(match_templates(templates, [], body, injective=True))

    def test_renaming_invariance(self):
        """Matching does not depend on variable names."""
        rng = random.Random(4)
        constraints = [
            compile_constraint(a)
            for a in (ASYMMETRIC_TAIL, ANTITRANSITIVE_TAIL, FUNCTIONAL_TAIL, IRREFLEXIVE_TAIL)
        ]
        for _ in range(200):
            body = tuple(
                Atom("tail", (Var(rng.randrange(4)), Var(rng.randrange(4))))
                for _ in range(rng.randint(1, 4))
            )
            permutation = list(range(4))
            rng.shuffle(permutation)
            renamed = tuple(
                Atom("tail", tuple(Var(permutation[t.index]) for t in lit.args))
                for lit in reversed(body)
            )
            head = Atom("f", ())
            for constraint in constraints:
                assert violates(Rule(head, body), constraint) == violates(
                    Rule(head, renamed), constraint
                )


class TestConstraintSet:
    """Test the indexed constraint collection."""

    def test_candidates_need_every_predicate(self):
        """Exclusivity applies only when both relations occur."""
        constraints = ConstraintSet.from_assertions([EXCLUSIVE_PARITY, SINGLETON_ONE])
        body = [Atom("even", (Var(0),))]

        assert constraints.candidates(body) == []
        assert len(constraints.candidates(body + [Atom("odd", (Var(0),))])) == 1

    def test_violated_by(self):
        """The first violated constraint is reported."""
        constraints = ConstraintSet.from_assertions([EXCLUSIVE_PARITY])
        rule = parse_rule("f(A):-even(A),odd(A).")

        assert constraints.violated_by(rule).provenance == EXCLUSIVE_PARITY
        assert constraints.violated_by(parse_rule("f(A):-even(A).")) is None

    def test_duplicates_collapse(self):
        """A constraint is stored once."""
        constraints = ConstraintSet.from_assertions([EXCLUSIVE_PARITY, EXCLUSIVE_PARITY])

        assert len(constraints) == 1
        assert bool(constraints)
        assert not ConstraintSet()

    def test_body_violation_is_monotone(self):
        """Adding literals keeps a violating body violating."""
        constraints = ConstraintSet.from_assertions(
            [ASYMMETRIC_TAIL, FUNCTIONAL_TAIL, EXCLUSIVE_PARITY]
        )
        rng = random.Random(8)
        literals = [
            Atom("tail", (Var(a), Var(b))) for a in range(3) for b in range(3)
        ] + [Atom("even", (Var(a),)) for a in range(3)] + [
            Atom("odd", (Var(a),)) for a in range(3)
        ]
        for _ in range(300):
            body = rng.sample(literals, rng.randint(1, 4))
            if constraints.body_violates(body):
                extra = rng.choice(literals)
                assert constraints.body_violates(body + [extra])


class TestViolationCore:
    """Test the literals a violation uses."""

    def test_count_core(self):
        """Count cores pair the two literals and their differing variables."""
        rule = parse_rule("f(A):-tail(A,B),tail(A,C).")
        literals, pairs = violation_core(rule, compile_constraint(FUNCTIONAL_TAIL))

        assert [str(lit) for lit in literals] == ["tail(A,B)", "tail(A,C)"]
        assert pairs == [(1, 2)]

    def test_no_core_without_violation(self):
        """Clean rules have no core."""
        rule = parse_rule("f(A):-tail(A,B).")

        assert violation_core(rule, compile_constraint(ASYMMETRIC_TAIL)) is None

    def test_cores_are_unsatisfiable(self):
        """The core of every violating rule has no model in the mined store."""
        rng = random.Random(12)
        for _ in range(40):
            store = random_store(rng, relations=3, max_arity=2, max_facts=30, constants=5)
            config = MinerConfig(candidates=store.names(), threads=1)
            constraints = ConstraintSet.from_assertions(mine_properties(store, config))
            bias = Bias(
                head={"name": "goal", "arity": 1},
                body=body_decls(store),
                max_vars=3,
                max_body=2,
            )
            for size in (2, 3):
                for rule in enumerate_rules(bias, None, size):
                    for constraint in constraints:
                        core = violation_core(rule, constraint)
                        if core is None:
                            continue
                        literals, pairs = core
                        assert not sat_body(literals, pairs, store)
