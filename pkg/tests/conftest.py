"""Shared fixtures."""

import random
from pathlib import Path
from typing import Callable, List, Tuple

import pytest

from disco.schemas.bias import Bias, PredicateDecl
from disco.services.evaluator import ground_model
from disco.services.fact_store import FactStore
from disco.services.learner import Task
from disco.services.parser import parse_bias, parse_examples, parse_facts, parse_program

INTRO_BK = """\
% strings with their first letter and their tail
head(ijcai,i).
head(ecai,e).
head(cai,c).
tail(ijcai,jcai).
tail(ecai,cai).
tail(jcai,cai).
tail(ai,i).
tail(cai,ai).
even(2).
even(4).
odd(1).
odd(3).
"""

TOY_BK = """\
length(l1,1).
length(l2,2).
one(1).
two(2).
"""

TOY_EXAMPLES = """\
pos(f(l1)).
neg(f(l2)).
"""

TOY_BIAS = """\
head_pred(f,1).
body_pred(length,2).
body_pred(one,1).
body_pred(two,1).
max_vars(3).
max_body(2).
"""

SUCC_BK = "".join(f"succ({i},{i + 1}).\n" for i in range(1, 9))

SUCC_BIAS = """\
head_pred(f,2).
body_pred(succ,2).
max_vars(3).
max_body(3).
"""

ODD_EVEN_BK = """\
odd(1).
odd(3).
even(2).
even(4).
"""

ODD_EVEN_BIAS = """\
head_pred(f,1).
body_pred(odd,1).
body_pred(even,1).
max_vars(1).
max_body(2).
"""


@pytest.fixture
def intro_store() -> FactStore:
    return parse_facts(INTRO_BK)


@pytest.fixture
def succ_store() -> FactStore:
    return parse_facts(SUCC_BK)


@pytest.fixture
def succ_bias() -> Bias:
    return parse_bias(SUCC_BIAS)


@pytest.fixture
def odd_even_store() -> FactStore:
    return parse_facts(ODD_EVEN_BK)


@pytest.fixture
def odd_even_bias() -> Bias:
    return parse_bias(ODD_EVEN_BIAS)


def make_task(bk: str, examples: str, bias: str) -> Task:
    """Build a task from program, example and bias texts."""
    program = parse_program(bk)
    store = program.facts
    if program.rules:
        store = ground_model(program.rules, store)
    pos, neg = parse_examples(examples)
    return Task(pos=pos, neg=neg, bk=store, bias=parse_bias(bias))


@pytest.fixture
def toy_task() -> Task:
    return make_task(TOY_BK, TOY_EXAMPLES, TOY_BIAS)


@pytest.fixture
def write_file(tmp_path: Path) -> Callable[[str, str], str]:
    """Write ``text`` to ``tmp_path/name`` and return the path."""

    def write(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return write


def random_store(
    rng: random.Random,
    relations: int = 5,
    max_arity: int = 3,
    max_facts: int = 500,
    constants: int = 8,
) -> FactStore:
    """A store of up to ``relations`` random relations over a small domain."""
    store = FactStore()
    budget = rng.randint(1, max_facts)
    specs: List[Tuple[str, int]] = [
        (f"r{i}", rng.randint(1, max_arity)) for i in range(rng.randint(1, relations))
    ]
    for name, arity in specs:
        store.declare(name, arity)
        size = rng.randint(1, max(1, budget // len(specs)))
        for _ in range(size):
            row = [f"c{rng.randrange(constants)}" for _ in range(arity)]
            store.add_texts(name, row)
    return store


def body_decls(store: FactStore) -> List[PredicateDecl]:
    return [PredicateDecl(name=name, arity=store.arity_of(name)) for name in store.names()]
