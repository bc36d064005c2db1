"""Property discovery schemas."""

from typing import List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from disco.core.config import settings


class MinerConfig(BaseModel):
    """Which relations to examine and which property families to try."""

    candidates: List[str] = Field(
        default_factory=list, description="Relations that may appear in a hypothesis"
    )
    excluded: List[str] = Field(
        default_factory=list, description="Head predicates, never examined"
    )
    max_arity: int = Field(
        default_factory=lambda: settings.MAX_PROPERTY_ARITY,
        ge=1,
        le=3,
        description="Largest arity for the permutation and dependency families",
    )
    arities: Optional[List[int]] = Field(
        None, description="Relation arities to examine; all when unset"
    )
    threads: int = Field(
        default_factory=lambda: settings.DISCO_THREADS,
        ge=1,
        description="Worker threads for the checks",
    )

    @field_validator("candidates", "excluded")
    def sort_names(cls, v: List[str]) -> List[str]:
        """Keep names sorted and unique."""
        return sorted(set(v))

    @model_validator(mode="after")
    def check_candidates(self) -> "MinerConfig":
        """Head predicates are not candidates."""
        overlap = set(self.candidates) & set(self.excluded)
        if overlap:
            raise ValueError(
                f"head predicates cannot be candidates: {', '.join(sorted(overlap))}"
            )
        return self

    def arity_enabled(self, arity: int) -> bool:
        return self.arities is None or arity in self.arities


class PropertyRecord(BaseModel):
    """One discovered property as written to a JSON-lines report."""

    property: str = Field(..., description="Property family, e.g. asymmetric")
    relations: List[str] = Field(..., description="Relation names, sorted")
    arity: int = Field(..., ge=0, description="Arity of the relations")
    detail: Optional[str] = Field(
        None, description="Column pattern, e.g. a_b or ab_ba"
    )
    counterexample: Optional[str] = Field(
        None, description="Witness facts, only for failed checks"
    )


class ConstraintRecord(BaseModel):
    """One compiled constraint as written to a JSON-lines report."""

    constraint: str = Field(..., description="Constraint in the meta-language")
    mode: str = Field(..., description="pattern or count")
    property: str = Field(..., description="Originating property name")
    relations: List[str] = Field(..., description="Relations of the property")
