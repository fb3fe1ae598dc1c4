from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum

from ..core.config import settings
from ..core.errors import InvalidGeneratorError
from .symplectic import FieldVector

KEY_DECIMALS = 10


def _round(x: float) -> float:
    value = round(float(x), KEY_DECIMALS)
    return 0.0 if value == 0.0 else value


@dataclass(frozen=True, eq=False)
class ResolventGenerator:
    """R(z, f) with Re z ≠ 0."""

    z: complex
    f: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "z", complex(self.z))
        object.__setattr__(self, "f", tuple(float(c) for c in self.f))
        if _round(self.z.real) == 0.0:
            raise InvalidGeneratorError(f"Spectral parameter {self.z} lies on the imaginary axis")

    @classmethod
    def of(cls, z, f: FieldVector | Sequence) -> ResolventGenerator:
        coords = f.coords if isinstance(f, FieldVector) else f
        return cls(complex(z), tuple(float(c) for c in coords))

    @property
    def key(self) -> tuple:
        """Canonical order: coordinates of f, then Re z, then Im z."""
        return (tuple(_round(c) for c in self.f), _round(self.z.real), _round(self.z.imag))

    @property
    def ray_key(self) -> tuple[float, ...]:
        return tuple(_round(c) for c in self.f)

    @property
    def is_zero_vector(self) -> bool:
        return all(_round(c) == 0.0 for c in self.f)

    @property
    def norm(self) -> float:
        """‖R(z, f)‖ = |Re z|⁻¹."""
        return 1.0 / abs(self.z.real)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ResolventGenerator) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def __lt__(self, other: ResolventGenerator) -> bool:
        return self.key < other.key

    def __repr__(self) -> str:
        z = self.z.real if self.z.imag == 0 else self.z
        return f"R({z:g}, ({', '.join(f'{c:g}' for c in self.f)}))"


@dataclass(frozen=True)
class Monomial:
    """coeff · R(z₁, f₁) ⋯ R(z_k, f_k); the empty product is 𝟙."""

    coeff: complex
    factors: tuple[ResolventGenerator, ...] = ()

    @property
    def degree(self) -> int:
        return len(self.factors)

    @property
    def word(self) -> tuple:
        return tuple(g.key for g in self.factors)

    def scaled(self, c: complex) -> Monomial:
        return Monomial(self.coeff * c, self.factors)

    def __mul__(self, other: Monomial) -> Monomial:
        return Monomial(self.coeff * other.coeff, self.factors + other.factors)

    def __repr__(self) -> str:
        body = "·".join(repr(g) for g in self.factors) or "𝟙"
        return f"({self.coeff:.6g})·{body}"


def merge_terms(terms: Iterable[Monomial], tol: float | None = None) -> tuple[Monomial, ...]:
    """Combine equal words and drop coefficients negligible against the input scale."""
    tol = settings.MERGE_TOL if tol is None else tol
    combined: dict[tuple, Monomial] = {}
    scale = 1.0
    for term in terms:
        scale = max(scale, abs(term.coeff))
        existing = combined.get(term.word)
        if existing is None:
            combined[term.word] = term
        else:
            combined[term.word] = Monomial(existing.coeff + term.coeff, existing.factors)
    kept = [m for m in combined.values() if abs(m.coeff) > tol * scale]
    return tuple(sorted(kept, key=lambda m: (m.degree, m.word)))


@dataclass(frozen=True)
class ResolventPoly:
    """Finite complex-linear combination of monomials, canonically merged."""

    terms: tuple[Monomial, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", merge_terms(self.terms))

    @classmethod
    def zero(cls) -> ResolventPoly:
        return cls(())

    @classmethod
    def identity(cls, coeff: complex = 1.0) -> ResolventPoly:
        return cls((Monomial(complex(coeff)),))

    @classmethod
    def generator(cls, z, f: FieldVector | Sequence, coeff: complex = 1.0) -> ResolventPoly:
        return cls((Monomial(complex(coeff), (ResolventGenerator.of(z, f),)),))

    @classmethod
    def product(cls, *generators: ResolventGenerator, coeff: complex = 1.0) -> ResolventPoly:
        return cls((Monomial(complex(coeff), tuple(generators)),))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((m.degree for m in self.terms), default=0)

    def generators(self) -> set[ResolventGenerator]:
        return {g for m in self.terms for g in m.factors}

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: ResolventPoly) -> ResolventPoly:
        return ResolventPoly(self.terms + other.terms)

    def __neg__(self) -> ResolventPoly:
        return ResolventPoly(tuple(m.scaled(-1) for m in self.terms))

    def __sub__(self, other: ResolventPoly) -> ResolventPoly:
        return self + (-other)

    def __mul__(self, other: ResolventPoly | complex | float | int) -> ResolventPoly:
        if isinstance(other, ResolventPoly):
            return ResolventPoly(tuple(a * b for a in self.terms for b in other.terms))
        return ResolventPoly(tuple(m.scaled(complex(other)) for m in self.terms))

    def __rmul__(self, scalar: complex | float | int) -> ResolventPoly:
        return self * scalar

    def __pow__(self, n: int) -> ResolventPoly:
        result = ResolventPoly.identity()
        for _ in range(n):
            result = result * self
        return result

    def structurally_equal(self, other: ResolventPoly, tol: float = 1e-10) -> bool:
        return (self - other).max_coeff() <= tol

    def max_coeff(self) -> float:
        return max((abs(m.coeff) for m in self.terms), default=0.0)

    def __repr__(self) -> str:
        return " + ".join(repr(m) for m in self.terms) or "0"


class Verdict(str, Enum):
    PROVED = "symbolically-proved"
    NUMERICALLY_CONFIRMED = "numerically-confirmed"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class SimplifyResult:
    poly: ResolventPoly
    fully_normalized: bool
    steps: int
    budget_exhausted: bool = False
    degree_capped: bool = False


@dataclass(frozen=True)
class IdentityCheck:
    verdict: Verdict
    residuals: tuple[float, ...] = ()
    cutoffs: tuple[int, ...] = ()
    simplified: ResolventPoly | None = None
