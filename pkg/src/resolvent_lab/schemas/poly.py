"""JSON term trees for resolvent polynomials: {coeff: [re, im], factors: [{z: [re, im], f: [...]}]}."""

from pydantic import BaseModel, ConfigDict, Field

from ..models.algebra import Monomial, ResolventGenerator, ResolventPoly


def _pair(value: complex) -> list[float]:
    value = complex(value)
    return [value.real, value.imag]


class FactorSchema(BaseModel):
    """One generator R(z, f)."""

    model_config = ConfigDict(extra="forbid")

    z: list[float] = Field(min_length=2, max_length=2)
    f: list[float] = Field(min_length=1)


class TermSchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coeff: list[float] = Field(min_length=2, max_length=2)
    factors: list[FactorSchema] = Field(default_factory=list)


class PolySchema(BaseModel):
    model_config = ConfigDict(extra="forbid")

    terms: list[TermSchema] = Field(default_factory=list)

    @classmethod
    def from_poly(cls, poly: ResolventPoly) -> "PolySchema":
        return cls(
            terms=[
                TermSchema(
                    coeff=_pair(term.coeff),
                    factors=[FactorSchema(z=_pair(g.z), f=list(g.f)) for g in term.factors],
                )
                for term in poly.terms
            ]
        )

    def to_poly(self) -> ResolventPoly:
        return ResolventPoly(
            tuple(
                Monomial(
                    complex(*term.coeff),
                    tuple(ResolventGenerator(complex(*factor.z), tuple(factor.f)) for factor in term.factors),
                )
                for term in self.terms
            )
        )
