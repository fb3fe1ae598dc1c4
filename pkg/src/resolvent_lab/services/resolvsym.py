"""Symbolic resolvent algebra: directed rewriting, *-operations, automorphisms and identity checks.

Rewriting runs in two phases. The tame phase applies rules that either lower the degree or keep
it and strictly decrease the word in the canonical generator order, so it always terminates:

* ``R(z, 0) → −(i/z)𝟙``
* ``R(z, νf̂) → (1/ν) R(z/ν, f̂)`` with the first nonzero coordinate of f̂ equal to 1
* ``R(z, f)R(w, f) → (R(z, f) − R(w, f)) / (i(w − z))`` for z ≠ w
* ``ZA²B → (AB/β − ZA − (α/β)ZB) / iσ(f_A, f_B)`` when Z = R(αz_A + βz_B, αf_A + βf_B)
* ``XY²X → YX²Y`` when X sorts after Y
* ``YX → XY`` when σ(f_X, f_Y) = 0 and Y sorts after X

The second phase tries the commutation rule ``YX → XY − iσ(f_X, f_Y) XY²X``, which grows the
poly before cancelling it. A move is only kept when the tame normal form of the result has
strictly fewer terms. Expanding a product by the sum relation needs no move of its own, since
the fold rule returns any such expansion to the product it came from.

The relation set is not known to be confluent, so two polys with different normal forms are
not thereby distinct; ``check_identity`` falls back to the Fock oracle in that case.
"""

import logging
from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..core.config import Tolerances, settings
from ..core.errors import InvalidGeneratorError, NonSymplecticMapError, OutOfDiskError
from ..models.algebra import (
    IdentityCheck,
    Monomial,
    ResolventGenerator,
    ResolventPoly,
    SimplifyResult,
    Verdict,
)
from ..models.symplectic import FieldVector, SymplecticSpace
from ..utils import linalg
from . import fockrep

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-10


@dataclass
class _Budget:
    limit: int
    used: int = 0

    def spend(self) -> bool:
        if self.used >= self.limit:
            return False
        self.used += 1
        return True

    @property
    def exhausted(self) -> bool:
        return self.used >= self.limit


@dataclass
class _Rewriter:
    space: SymplecticSpace
    budget: _Budget
    degree_cap: int
    form: np.ndarray = field(init=False)
    tame_cache: dict[tuple, tuple[Monomial, ...]] = field(default_factory=dict)
    capped: bool = False
    truncated: bool = False

    def __post_init__(self) -> None:
        self.form = self.space.form_array()

    def sigma(self, a: ResolventGenerator, b: ResolventGenerator) -> float:
        value = float(np.asarray(a.f) @ self.form @ np.asarray(b.f))
        return 0.0 if abs(value) <= ZERO_TOL else value

    # tame phase

    @staticmethod
    def normalize_factors(term: Monomial) -> Monomial:
        coeff = term.coeff
        factors = []
        for gen in term.factors:
            if gen.is_zero_vector:
                coeff *= -1j / gen.z
                continue
            nu = next(c for c in gen.f if round(c, 10) != 0.0)
            if nu != 1.0:
                coeff /= nu
                gen = ResolventGenerator(gen.z / nu, tuple(c / nu for c in gen.f))
            factors.append(gen)
        return Monomial(coeff, tuple(factors))

    @staticmethod
    def span_coefficients(
        target: tuple[float, ...], x: ResolventGenerator, y: ResolventGenerator
    ) -> tuple[float, float] | None:
        """(α, β), both nonzero, with target = αf_x + βf_y."""
        columns = np.column_stack([np.asarray(x.f), np.asarray(y.f)])
        goal = np.asarray(target)
        (a, b), *_ = np.linalg.lstsq(columns, goal, rcond=None)
        if np.linalg.norm(columns @ np.array([a, b]) - goal) > 1e-9 * max(1.0, float(np.linalg.norm(goal))):
            return None
        if abs(a) < ZERO_TOL or abs(b) < ZERO_TOL:
            return None
        return float(a), float(b)

    def fold(self, factors: tuple[ResolventGenerator, ...], i: int) -> list[Monomial] | None:
        """Contract Z A² B at position i back to degree two through the sum relation."""
        z, a, a2, b = factors[i : i + 4]
        if a2 != a or len({z.ray_key, a.ray_key, b.ray_key}) < 3:
            return None
        sig = self.sigma(a, b)
        if sig == 0.0:
            return None
        coeffs = self.span_coefficients(z.f, a, b)
        if coeffs is None:
            return None
        alpha, beta = coeffs
        if abs(alpha * a.z + beta * b.z - z.z) > 1e-9 * max(1.0, abs(z.z)):
            return None
        scale = 1.0 / (1j * sig)
        head, tail = factors[:i], factors[i + 4 :]
        return [
            Monomial(scale / beta, head + (a, b) + tail),
            Monomial(-scale, head + (z, a) + tail),
            Monomial(-scale * alpha / beta, head + (z, b) + tail),
        ]

    def tame_step(self, factors: tuple[ResolventGenerator, ...]) -> list[Monomial] | None:
        n = len(factors)
        for i in range(n - 1):
            x, y = factors[i], factors[i + 1]
            if x.ray_key == y.ray_key and x != y:
                scale = 1.0 / (1j * (y.z - x.z))
                head, tail = factors[:i], factors[i + 2 :]
                return [Monomial(scale, head + (x,) + tail), Monomial(-scale, head + (y,) + tail)]
        for i in range(n - 3):
            folded = self.fold(factors, i)
            if folded is not None:
                return folded
        for i in range(n - 3):
            x, y = factors[i], factors[i + 1]
            if factors[i + 2] == y and factors[i + 3] == x and x.key > y.key and x.ray_key != y.ray_key:
                return [Monomial(1.0, factors[:i] + (y, x, x, y) + factors[i + 4 :])]
        for i in range(n - 1):
            x, y = factors[i], factors[i + 1]
            if x.key > y.key and x.ray_key != y.ray_key and self.sigma(x, y) == 0.0:
                return [Monomial(1.0, factors[:i] + (y, x) + factors[i + 2 :])]
        return None

    def tame_word(self, factors: tuple[ResolventGenerator, ...]) -> tuple[Monomial, ...]:
        """Tame normal form of the monomial 1·factors (already normalized)."""
        key = tuple(g.key for g in factors)
        cached = self.tame_cache.get(key)
        if cached is not None:
            return cached
        outputs = self.tame_step(factors)
        if outputs is None:
            result = (Monomial(1.0, factors),)
        elif not self.budget.spend():
            self.truncated = True
            return (Monomial(1.0, factors),)
        else:
            collected: list[Monomial] = []
            for out in outputs:
                normalized = self.normalize_factors(out)
                for sub in self.tame_word(normalized.factors):
                    collected.append(sub.scaled(normalized.coeff))
            result = tuple(ResolventPoly(tuple(collected)).terms)
        self.tame_cache[key] = result
        return result

    def tame(self, terms: Sequence[Monomial]) -> ResolventPoly:
        collected: list[Monomial] = []
        for term in terms:
            normalized = self.normalize_factors(term)
            for sub in self.tame_word(normalized.factors):
                collected.append(sub.scaled(normalized.coeff))
        return ResolventPoly(tuple(collected))

    # cancellation phase

    def commutation_move(self, factors: tuple[ResolventGenerator, ...], i: int) -> list[Monomial]:
        """AB → BA − iσ(f_B, f_A) B A² B."""
        a, b = factors[i], factors[i + 1]
        head, tail = factors[:i], factors[i + 2 :]
        return [
            Monomial(1.0, head + (b, a) + tail),
            Monomial(-1j * self.sigma(b, a), head + (b, a, a, b) + tail),
        ]

    def candidates(self, poly: ResolventPoly) -> Iterator[tuple[int, list[Monomial]]]:
        for index, term in enumerate(poly.terms):
            factors = term.factors
            for i in range(len(factors) - 1):
                x, y = factors[i], factors[i + 1]
                if x.ray_key != y.ray_key and x.key > y.key and self.sigma(x, y) != 0.0:
                    yield index, [m.scaled(term.coeff) for m in self.commutation_move(factors, i)]

    def cancel(self, poly: ResolventPoly) -> ResolventPoly:
        current = poly
        while not current.is_zero and not self.budget.exhausted:
            best: ResolventPoly | None = None
            for index, replacement in self.candidates(current):
                if max(m.degree for m in replacement) > self.degree_cap:
                    self.capped = True
                    continue
                rest = current.terms[:index] + current.terms[index + 1 :]
                trial = self.tame(rest + tuple(replacement))
                if len(trial) < len(current) and (best is None or len(trial) < len(best)):
                    best = trial
                    if best.is_zero:
                        break
            if best is None or not self.budget.spend():
                break
            logger.debug(f"Cancellation move: {len(current)} → {len(best)} terms")
            current = best
        return current

    def unresolved_inversions(self, poly: ResolventPoly) -> int:
        count = 0
        for term in poly.terms:
            f = term.factors
            for j in range(len(f) - 1):
                a, b = f[j], f[j + 1]
                if a.key <= b.key or a.ray_key == b.ray_key or self.sigma(a, b) == 0.0:
                    continue
                # the closing pair of a sandwich B A A B is already in normal position
                if j >= 2 and f[j - 2] == b and f[j - 1] == a:
                    continue
                count += 1
        return count


def simplify(
    p: ResolventPoly, space: SymplecticSpace, budget: int | None = None, degree_cap: int | None = None
) -> SimplifyResult:
    """Rewrite p toward canonical factor order using the defining relations.

    The result is always equal to p in the algebra; ``fully_normalized`` is False when the
    step budget or degree cap cut rewriting short, or noncommuting factors remain out of order.
    """
    budget = settings.REWRITE_BUDGET if budget is None else budget
    if budget <= 0:
        raise ValueError("Rewrite budget must be positive")
    for gen in p.generators():
        space.check(FieldVector(gen.f))
    rewriter = _Rewriter(space, _Budget(budget), degree_cap or settings.DEGREE_CAP)
    result = rewriter.cancel(rewriter.tame(p.terms))
    exhausted = rewriter.budget.exhausted or rewriter.truncated
    inversions = rewriter.unresolved_inversions(result)
    fully = not exhausted and not rewriter.capped and inversions == 0
    if exhausted:
        logger.warning(f"Rewrite budget of {budget} steps exhausted; result not fully normalized")
    return SimplifyResult(
        poly=result,
        fully_normalized=fully or result.is_zero,
        steps=rewriter.budget.used,
        budget_exhausted=exhausted,
        degree_capped=rewriter.capped,
    )


def adjoint(p: ResolventPoly) -> ResolventPoly:
    """Reverse factor order, conjugate coefficients, map each z to −z̄."""
    return ResolventPoly(
        tuple(
            Monomial(
                complex(term.coeff).conjugate(),
                tuple(ResolventGenerator(-complex(g.z).conjugate(), g.f) for g in reversed(term.factors)),
            )
            for term in p.terms
        )
    )


def commutator(p: ResolventPoly, q: ResolventPoly) -> ResolventPoly:
    return p * q - q * p


def generator_norm(gen: ResolventGenerator) -> float:
    return gen.norm


def von_neumann_expand(gen: ResolventGenerator, base: float, order: int) -> tuple[ResolventPoly, float]:
    """R(λ, f) = Σ_{n≤K} (λ₀−λ)ⁿ iⁿ R(λ₀, f)^{n+1} + tail, for |λ₀ − λ| < |λ₀|."""
    if gen.z.imag != 0.0:
        raise InvalidGeneratorError("Von Neumann expansion needs a real spectral parameter")
    lam = gen.z.real
    if base == 0.0:
        raise InvalidGeneratorError("Expansion base must be nonzero")
    ratio = abs(base - lam) / abs(base)
    if ratio >= 1.0:
        raise OutOfDiskError(f"|λ₀ − λ| = {abs(base - lam)} is not below |λ₀| = {abs(base)}")
    if order < 0:
        raise ValueError("Expansion order must be nonnegative")
    pivot = ResolventGenerator(complex(base), gen.f)
    terms = tuple(Monomial(((base - lam) * 1j) ** n, (pivot,) * (n + 1)) for n in range(order + 1))
    remainder = ratio ** (order + 1) / (1.0 - ratio) / abs(base)
    return ResolventPoly(terms), float(remainder)


def _exact_matrix(matrix: Sequence[Sequence]) -> list[list]:
    return [[linalg.to_scalar(v) for v in row] for row in matrix]


def is_symplectic_map(space: SymplecticSpace, transform: Sequence[Sequence], tol: float = 1e-10) -> bool:
    """Tᵀ·form·T = form."""
    rows = _exact_matrix(transform)
    if len(rows) != space.dim or any(len(r) != space.dim for r in rows):
        return False
    if space.exact and linalg.rows_exact(rows):
        t = linalg.to_sympy(rows)
        return t.T * linalg.to_sympy(space.form) * t == linalg.to_sympy(space.form)
    t = linalg.to_array(rows)
    return bool(np.max(np.abs(t.T @ space.form_array() @ t - space.form_array())) <= tol)


def apply_symplectic_automorphism(p: ResolventPoly, transform: Sequence[Sequence], space: SymplecticSpace) -> ResolventPoly:
    """α_T(R(z, f)) = R(z, Tf) for symplectic T."""
    if not is_symplectic_map(space, transform):
        raise NonSymplecticMapError("Transformation does not preserve σ")
    t = linalg.to_array(_exact_matrix(transform))
    return ResolventPoly(
        tuple(
            Monomial(term.coeff, tuple(ResolventGenerator(g.z, tuple(t @ np.asarray(g.f))) for g in term.factors))
            for term in p.terms
        )
    )


def apply_shift_automorphism(p: ResolventPoly, covector: Sequence) -> ResolventPoly:
    """β_h(R(z, f)) = R(z + ih(f), f)."""
    h = np.array([float(linalg.to_scalar(c)) for c in covector])
    return ResolventPoly(
        tuple(
            Monomial(term.coeff, tuple(ResolventGenerator(g.z + 1j * float(h @ np.asarray(g.f)), g.f) for g in term.factors))
            for term in p.terms
        )
    )


def weyl_shift_covector(space: SymplecticSpace, f: FieldVector) -> np.ndarray:
    """Covector of h ↦ σ(h, f), the shift implemented by Ad W(f)."""
    return space.form_array() @ f.as_array()


@dataclass(frozen=True)
class OracleConfig:
    budget: int | None = None
    cutoffs: tuple[int, int] | None = None
    tolerances: Tolerances | None = None
    decay_ratio: float = 0.5
    # growth between cutoffs still counted as non-increasing, relative to the oracle tolerance
    noise_fraction: float = 1e-3


def oracle_verdict(r_small: float, r_large: float, tol: float, decay_ratio: float = 0.5, noise_fraction: float = 1e-3) -> Verdict:
    """Confirmed when both residuals are below tol and the larger cutoff is no worse up to a noise floor."""
    if r_small < tol and r_large < tol and r_large <= r_small + noise_fraction * tol:
        return Verdict.NUMERICALLY_CONFIRMED
    if r_small > tol and r_large > decay_ratio * r_small:
        return Verdict.REFUTED
    return Verdict.INCONCLUSIVE


def check_identity(
    lhs: ResolventPoly, rhs: ResolventPoly, space: SymplecticSpace, cfg: OracleConfig | None = None
) -> IdentityCheck:
    """Bounded rewriting first, then the Fock oracle at two cutoffs on a fixed low-level compression."""
    cfg = cfg or OracleConfig()
    tolerances = cfg.tolerances or Tolerances.from_settings()
    result = simplify(lhs - rhs, space, budget=cfg.budget)
    if result.poly.is_zero:
        return IdentityCheck(Verdict.PROVED, (), (), result.poly)

    small, large = cfg.cutoffs or fockrep.oracle_cutoffs(space.modes)
    levels = max(2, int(small * settings.COMPRESSION_FRACTION))
    basis = None
    residuals = []
    for cutoff in (small, large):
        rep = fockrep.build_rep(space, basis, cutoff)
        basis = list(rep.basis)
        residuals.append(fockrep.compressed_norm(rep, fockrep.poly_matrix(rep, result.poly), levels))
    r_small, r_large = residuals
    logger.debug(f"Oracle residuals at cutoffs {small}, {large}: {r_small:.3e}, {r_large:.3e}")
    verdict = oracle_verdict(r_small, r_large, tolerances.oracle_tol, cfg.decay_ratio, cfg.noise_fraction)
    return IdentityCheck(verdict, tuple(residuals), (small, large), result.poly)


def relation_instances(
    space: SymplecticSpace, lam: float, mu: float, f: FieldVector, g: FieldVector
) -> dict[str, ResolventPoly]:
    """Each defining relation, written as lhs − rhs, at one parameter choice. λ + μ must be nonzero."""
    x = ResolventPoly.generator(lam, f)
    y_same = ResolventPoly.generator(mu, f)
    y = ResolventPoly.generator(mu, g)
    sig = float(linalg.bilinear(f.coords, space.form, g.coords))
    nu = mu / lam if mu != lam else 2.0
    relations = {
        "identity": ResolventPoly.generator(lam, space.zero()) - ResolventPoly.identity(-1j / lam),
        "involution": adjoint(x) - ResolventPoly.generator(-lam, f),
        "homogeneity": nu * ResolventPoly.generator(nu * lam, nu * f) - x,
        "resolvent": x - y_same - (1j * (mu - lam)) * (x * y_same),
        "commutation": x * y - y * x - (1j * sig) * (x * y * y * x),
        "adjoint_product": x - adjoint(x) + (2j * lam) * (x * adjoint(x)),
    }
    if lam + mu != 0:
        z = ResolventPoly.generator(lam + mu, f + g)
        relations["sum"] = x * y - z * (x + y + (1j * sig) * (x * x * y))
    return relations


def complex_relation_instances(
    space: SymplecticSpace, z: complex, w: complex, f: FieldVector, g: FieldVector
) -> dict[str, ResolventPoly]:
    """The defining relations with complex spectral parameters."""
    x = ResolventPoly.generator(z, f)
    y_same = ResolventPoly.generator(w, f)
    y = ResolventPoly.generator(w, g)
    sig = float(linalg.bilinear(f.coords, space.form, g.coords))
    relations = {
        "identity": ResolventPoly.generator(z, space.zero()) - ResolventPoly.identity(-1j / z),
        "involution": adjoint(x) - ResolventPoly.generator(-complex(z).conjugate(), f),
        "homogeneity": 3 * ResolventPoly.generator(3 * z, Fraction(3) * f) - x,
        "resolvent": x - y_same - (1j * (w - z)) * (x * y_same),
        "commutation": x * y - y * x - (1j * sig) * (x * y * y * x),
        "adjoint_product": x - adjoint(x) + (1j * (z + complex(z).conjugate())) * (x * adjoint(x)),
    }
    if (z + w).real != 0:
        s = ResolventPoly.generator(z + w, f + g)
        relations["sum"] = x * y - s * (x + y + (1j * sig) * (x * x * y))
    return relations
