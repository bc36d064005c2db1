"""Language bias schemas."""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


class PredicateDecl(BaseModel):
    """A predicate symbol with its arity."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(
        ..., pattern=r"^[a-z][a-zA-Z0-9_]*$", description="Predicate symbol"
    )
    arity: int = Field(..., ge=0, description="Number of arguments")

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


class Bias(BaseModel):
    """Bounds of the hypothesis space."""

    model_config = ConfigDict(frozen=True)

    head: PredicateDecl = Field(..., description="Head predicate of learned rules")
    body: List[PredicateDecl] = Field(
        default_factory=list, description="Predicates allowed in rule bodies"
    )
    max_vars: int = Field(6, ge=1, description="Maximum variables per rule")
    max_body: int = Field(6, ge=1, description="Maximum body literals per rule")
    max_rules: int = Field(1, ge=1, description="Maximum rules per hypothesis")
    max_literals: Optional[int] = Field(
        None, ge=1, description="Maximum literals in a hypothesis"
    )
    allow_recursion: bool = Field(
        False, description="Whether the head predicate may appear in bodies"
    )

    @model_validator(mode="after")
    def check_declarations(self) -> "Bias":
        """Reject inconsistent declarations."""
        names = [decl.name for decl in self.body]
        if len(set(names)) != len(names):
            raise ValueError("a body predicate is declared twice")
        if self.head.name in names and not self.allow_recursion:
            raise ValueError(
                f"head predicate {self.head} is a body predicate but recursion is disabled"
            )
        for decl in self.body:
            if decl.name == self.head.name and decl.arity != self.head.arity:
                raise ValueError(f"{decl.name} is declared with two arities")
        if self.max_vars < self.head.arity:
            raise ValueError(
                f"max_vars {self.max_vars} is below the head arity {self.head.arity}"
            )
        return self

    @property
    def total_literals(self) -> int:
        """Maximum hypothesis size in literals."""
        if self.max_literals is not None:
            return self.max_literals
        return (1 + self.max_body) * self.max_rules

    def body_declarations(self) -> List[PredicateDecl]:
        """Body predicates sorted by name, with the head added when recursion is on."""
        decls = {decl.name: decl for decl in self.body}
        if self.allow_recursion:
            decls[self.head.name] = self.head
        return [decls[name] for name in sorted(decls)]

    def candidate_relations(self) -> List[str]:
        """Body predicates that property discovery may examine."""
        return sorted(decl.name for decl in self.body if decl.name != self.head.name)
