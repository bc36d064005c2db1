"""Readers for facts, programs, examples and bias files."""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, NamedTuple, Optional, Tuple

from pydantic import ValidationError

from disco.core.exceptions import (
    ArityMismatchError,
    ContractViolation,
    DiscoParseError,
    RuleValidationError,
)
from disco.schemas.bias import Bias, PredicateDecl
from disco.services.fact_store import FactStore
from disco.services.terms import Atom, Const, Rule, Term, Var, make_rule, symbols

logger = logging.getLogger(__name__)

NAME = r"[a-z][a-zA-Z0-9_]*"
CONSTANT = r"[a-z0-9][a-zA-Z0-9_]*"

# One fact per line, the common case for large BK files
FACT_LINE = re.compile(
    rf"\s*({NAME})\s*(?:\(\s*({CONSTANT}(?:\s*,\s*{CONSTANT})*)\s*\))?\s*\.\s*(?:%.*)?"
)

TOKEN_SPEC = [
    ("COMMENT", r"%[^\n]*"),
    ("NEWLINE", r"\n"),
    ("SPACE", r"[ \t\r\f\v]+"),
    ("IMPLIES", r":-"),
    ("NEQ", r"!="),
    ("NAME", NAME),
    ("NUMBER", r"[0-9][a-zA-Z0-9_]*"),
    ("VAR", r"[A-Z][a-zA-Z0-9_]*"),
    ("LPAR", r"\("),
    ("RPAR", r"\)"),
    ("COMMA", r","),
    ("DOT", r"\."),
    ("SEMI", r";"),
    ("MISMATCH", r"."),
]
TOKEN_RE = re.compile("|".join(f"(?P<{kind}>{pattern})" for kind, pattern in TOKEN_SPEC))


class Token(NamedTuple):
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str, source: Optional[str] = None, first_line: int = 1) -> List[Token]:
    """Split ``text`` into tokens, dropping blanks and comments."""
    tokens = []
    line = first_line
    line_start = 0
    for match in TOKEN_RE.finditer(text):
        kind = match.lastgroup
        value = match.group()
        column = match.start() - line_start + 1
        if kind == "NEWLINE":
            line += 1
            line_start = match.end()
            continue
        if kind in ("SPACE", "COMMENT"):
            continue
        if kind == "MISMATCH":
            raise DiscoParseError(
                f"unexpected character {value!r}", line=line, column=column, source=source
            )
        assert kind is not None
        tokens.append(Token(kind, value, line, column))
    tokens.append(Token("EOF", "", line, 1))
    return tokens


@dataclass
class Clause:
    """A parsed clause before it is turned into a fact or a rule."""

    head: Atom
    body: List[Atom] = field(default_factory=list)
    diseqs: List[Tuple[int, int]] = field(default_factory=list)
    line: int = 0
    has_body: bool = False


class _ClauseParser:
    """Recursive-descent parser over a token list."""

    def __init__(self, tokens: List[Token], source: Optional[str] = None):
        self.tokens = tokens
        self.pos = 0
        self.source = source
        self.var_names: Dict[str, int] = {}

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> DiscoParseError:
        token = token or self.peek()
        return DiscoParseError(
            message, line=token.line, column=token.column, source=self.source
        )

    def expect(self, kind: str, what: str) -> Token:
        token = self.peek()
        if token.kind != kind:
            shown = token.text or "end of input"
            raise self.error(f"expected {what}, found {shown!r}")
        return self.advance()

    def at_end(self) -> bool:
        return self.peek().kind == "EOF"

    def term(self) -> Term:
        token = self.peek()
        if token.kind in ("NAME", "NUMBER"):
            self.advance()
            return Const(symbols.intern(token.text))
        if token.kind == "VAR":
            self.advance()
            index = self.var_names.setdefault(token.text, len(self.var_names))
            return Var(index)
        raise self.error(f"expected a term, found {token.text or 'end of input'!r}")

    def atom(self) -> Atom:
        token = self.peek()
        if token.kind == "VAR":
            raise self.error(
                f"predicate symbols must start with a lower-case letter, found {token.text!r}"
            )
        name = self.expect("NAME", "a predicate symbol").text
        args: List[Term] = []
        if self.peek().kind == "LPAR":
            self.advance()
            args.append(self.term())
            while self.peek().kind == "COMMA":
                self.advance()
                args.append(self.term())
            self.expect("RPAR", "')'")
        return Atom(name, tuple(args))

    def body_item(self, clause: Clause) -> None:
        token = self.peek()
        if token.kind == "VAR" and self.tokens[self.pos + 1].kind == "NEQ":
            left = self.term()
            self.advance()
            right = self.term()
            if not isinstance(left, Var) or not isinstance(right, Var):
                raise self.error("disequalities relate two variables", token)
            clause.diseqs.append((left.index, right.index))
            return
        clause.body.append(self.atom())

    def clause(self) -> Clause:
        self.var_names = {}
        start = self.peek()
        if start.kind == "IMPLIES":
            raise self.error("not a definite clause: the clause has no head")
        clause = Clause(head=self.atom(), line=start.line)
        token = self.peek()
        if token.kind in ("SEMI", "COMMA"):
            raise self.error("not a definite clause: only one head literal is allowed")
        if token.kind == "IMPLIES":
            self.advance()
            clause.has_body = True
            self.body_item(clause)
            while self.peek().kind == "COMMA":
                self.advance()
                self.body_item(clause)
        self.expect("DOT", "'.' at the end of the clause")
        return clause

    def clauses(self) -> Iterator[Clause]:
        while not self.at_end():
            yield self.clause()


class _ArityTracker:
    """Remembers the first arity seen for every predicate."""

    def __init__(self, source: Optional[str] = None):
        self.arities: Dict[str, int] = {}
        self.source = source

    def check(self, atom: Atom, line: int) -> None:
        known = self.arities.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            raise ArityMismatchError(
                f"{atom.predicate} used with arity {atom.arity} but earlier with arity {known}",
                line=line,
                source=self.source,
            )


def parse_facts(text: str, source: Optional[str] = None) -> FactStore:
    """
    Parse a facts file into a store.

    Args:
        text: Lines of ``pred(c1,...,cN).`` with ``%`` comments and blank lines
        source: File name used in diagnostics

    Returns:
        A store holding exactly the distinct facts

    Raises:
        DiscoParseError: On syntax errors, variables in facts or arity conflicts
    """
    store = FactStore()
    tracker = _ArityTracker(source)
    intern = symbols.intern

    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        match = FACT_LINE.fullmatch(line)
        if match is not None:
            name, args = match.group(1), match.group(2)
            values = tuple(intern(a.strip()) for a in args.split(",")) if args else ()
            known = tracker.arities.setdefault(name, len(values))
            if known != len(values):
                raise ArityMismatchError(
                    f"{name} used with arity {len(values)} but earlier with arity {known}",
                    line=number,
                    source=source,
                )
            store.add(name, values)
            continue

        # Slow path: exact diagnostics, or several facts on one line
        parser = _ClauseParser(tokenize(raw, source, number), source)
        for clause in parser.clauses():
            if clause.has_body:
                raise DiscoParseError(
                    "rules are not allowed in a facts file", line=number, source=source
                )
            for term in clause.head.args:
                if isinstance(term, Var):
                    raise DiscoParseError(
                        "facts must be ground; upper-case tokens are variables",
                        line=number,
                        source=source,
                    )
            tracker.check(clause.head, number)
            store.add_fact(clause.head)

    logger.debug(f"Parsed {store.fact_count()} facts from {source or 'text'}")
    return store


@dataclass
class Program:
    """Rules and ground facts read from one program text."""

    rules: Tuple[Rule, ...]
    facts: FactStore


def parse_program(text: str, source: Optional[str] = None) -> Program:
    """
    Parse rules and facts.

    Rules are canonicalized; bare ground clauses go to ``Program.facts``.

    Raises:
        DiscoParseError: On syntax errors
        RuleValidationError: For unsafe, disconnected or non-definite clauses
    """
    parser = _ClauseParser(tokenize(text, source), source)
    tracker = _ArityTracker(source)
    facts = FactStore()
    rules: Dict[Rule, None] = {}

    for clause in parser.clauses():
        tracker.check(clause.head, clause.line)
        for lit in clause.body:
            tracker.check(lit, clause.line)
        if not clause.has_body:
            if not clause.head.is_ground():
                raise RuleValidationError(
                    f"fact {clause.head} is not ground",
                    line=clause.line,
                    source=source,
                )
            facts.add_fact(clause.head)
            continue
        try:
            rule = make_rule(clause.head, clause.body, clause.diseqs)
        except RuleValidationError as e:
            raise RuleValidationError(e.message, line=clause.line, source=source) from e
        rules[rule] = None

    return Program(tuple(rules), facts)


def parse_rule(text: str) -> Rule:
    """Parse exactly one rule."""
    program = parse_program(text)
    if len(program.rules) != 1 or program.facts.fact_count():
        raise DiscoParseError(f"expected exactly one rule in {text!r}")
    return program.rules[0]


def parse_atom(text: str) -> Atom:
    """Parse one atom such as ``f(a,b)``."""
    parser = _ClauseParser(tokenize(text))
    atom = parser.atom()
    if not parser.at_end():
        raise parser.error("unexpected text after the atom")
    return atom


def parse_examples(
    text: str, source: Optional[str] = None
) -> Tuple[List[Atom], List[Atom]]:
    """
    Parse ``pos(f(args)).`` and ``neg(f(args)).`` lines.

    Returns:
        Tuple of (positive examples, negative examples) in file order, deduplicated
    """
    parser = _ClauseParser(tokenize(text, source), source)
    tracker = _ArityTracker(source)
    found: Dict[str, Dict[Atom, None]] = {"pos": {}, "neg": {}}

    while not parser.at_end():
        token = parser.expect("NAME", "'pos' or 'neg'")
        if token.text not in found:
            raise parser.error(f"unknown example label {token.text!r}", token)
        parser.expect("LPAR", "'('")
        example = parser.atom()
        parser.expect("RPAR", "')'")
        parser.expect("DOT", "'.'")
        if not example.is_ground():
            raise DiscoParseError(
                f"example {example} is not ground", line=token.line, source=source
            )
        tracker.check(example, token.line)
        found[token.text][example] = None

    return list(found["pos"]), list(found["neg"])


_BIAS_INTEGER_DIRECTIVES = {
    "max_vars": "max_vars",
    "max_body": "max_body",
    "max_rules": "max_rules",
    "max_literals": "max_literals",
}


def parse_bias(text: str, source: Optional[str] = None) -> Bias:
    """
    Parse bias directives into a validated :class:`Bias`.

    Known directives: ``head_pred(f,1).``, ``body_pred(p,2).``, ``max_vars(N).``,
    ``max_body(N).``, ``max_rules(N).``, ``max_literals(N).``, ``enable_recursion.``

    Raises:
        DiscoParseError: On syntax errors or unknown directives
        ContractViolation: When the directives describe an invalid bias
    """
    parser = _ClauseParser(tokenize(text, source), source)
    head: Optional[PredicateDecl] = None
    body: List[PredicateDecl] = []
    values: Dict[str, object] = {}

    for clause in parser.clauses():
        directive = clause.head
        if clause.has_body:
            raise DiscoParseError(
                f"bias directive {directive.predicate} cannot have a body",
                line=clause.line,
                source=source,
            )
        args = [symbols.text(t.symbol) for t in directive.args if isinstance(t, Const)]
        if len(args) != directive.arity:
            raise DiscoParseError(
                f"bias directive {directive.predicate} takes constants only",
                line=clause.line,
                source=source,
            )
        name = directive.predicate

        if name in ("head_pred", "body_pred"):
            if len(args) != 2 or not args[1].isdigit():
                raise DiscoParseError(
                    f"{name} expects (predicate, arity)", line=clause.line, source=source
                )
            try:
                decl = PredicateDecl(name=args[0], arity=int(args[1]))
            except ValidationError as e:
                raise ContractViolation(f"invalid {name} directive: {e}") from e
            if name == "head_pred":
                if head is not None:
                    raise DiscoParseError(
                        "only one head_pred directive is allowed",
                        line=clause.line,
                        source=source,
                    )
                head = decl
            else:
                body.append(decl)
        elif name in _BIAS_INTEGER_DIRECTIVES:
            if len(args) != 1 or not args[0].isdigit():
                raise DiscoParseError(
                    f"{name} expects one integer", line=clause.line, source=source
                )
            values[_BIAS_INTEGER_DIRECTIVES[name]] = int(args[0])
        elif name == "enable_recursion":
            if args:
                raise DiscoParseError(
                    "enable_recursion takes no arguments", line=clause.line, source=source
                )
            values["allow_recursion"] = True
        else:
            raise DiscoParseError(
                f"unknown bias directive {name}/{len(args)}",
                line=clause.line,
                source=source,
            )

    if head is None:
        raise ContractViolation("bias has no head_pred directive")
    try:
        return Bias(head=head, body=body, **values)
    except ValidationError as e:
        raise ContractViolation(f"invalid bias: {e}") from e
