"""
Character-sum equidistribution.

``character_sum`` evaluates ``E_{n in Phi_N} chi_1(p_1(n)) ... chi_k(p_k(n))``
exactly (phases are exact rationals reduced mod 1). The two reductions used to
prove that such averages vanish are exposed as operations on specs: Weyl
differencing down to linear polynomials, and the coset decomposition that
removes a character relation over a good ring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import (Character, ConfigurationError, FolnerSequence, Ideal, Ring, RingKind,
                      frac_part)
from .averages import PhaseTable
from .polynomials import PolySystem, RingPolynomial, difference, is_independent


class IntegrityError(ArithmeticError):
    """A reduction step produced something that should have been impossible."""


def default_threshold(size: int) -> float:
    """Decay threshold ``max(0.05, 8 / sqrt(|Phi_N|))``."""
    return max(0.05, 8.0 / math.sqrt(size))


@dataclass(frozen=True)
class CosetFolner:
    """``A_N = {x : b x + r in Phi_N}`` for a base Folner sequence."""

    base: FolnerSequence
    b: object
    r: object

    @property
    def ring(self) -> Ring:
        return self.base.ring

    def elements(self, N: int) -> list:
        ring = self.ring
        J = Ideal(ring, self.b)
        r = ring.coerce(self.r)
        out = []
        for x in self.base.elements(N):
            d = x - r
            if J.contains(d):
                q = d / self.b if ring.kind is RingKind.GAUSSIAN_INTEGERS else d // self.b
                out.append(ring.coerce(q))
        return out

    def size(self, N: int) -> int:
        return len(self.elements(N))

    def describe(self) -> str:
        return (f"{{x : {self.ring.format(self.b)} x + {self.ring.format(self.r)} in Phi_N}}"
                f" for {self.base.describe()}")


@dataclass
class CharacterSumSpec:
    """Characters ``chi_j`` paired with polynomials ``p_j`` over a Folner sequence."""

    ring: Ring
    characters: list
    polys: PolySystem
    folner: FolnerSequence | CosetFolner
    factor: Fraction = Fraction(0)  # constant phase multiplying every term
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.polys, PolySystem):
            self.polys = PolySystem(tuple(self.polys))
        self.characters = list(self.characters)
        if len(self.characters) != len(self.polys):
            raise ConfigurationError(
                f"{len(self.characters)} characters but {len(self.polys)} polynomials")
        for chi in self.characters:
            if chi.ring != self.ring:
                raise ConfigurationError("character over a different ring")
        if self.polys.ring != self.ring or self.folner.ring != self.ring:
            raise ConfigurationError("polynomials and Folner sequence must share the ring")
        if self.polys.nvars != 1:
            raise ConfigurationError("character sums take one-variable polynomials")

    def validate_hypotheses(self) -> None:
        """Independence and ``p_j(0) = 0``; raises with the dependence witness."""
        ok, witness = is_independent(self.polys)
        if not ok:
            raise ConfigurationError(f"polynomials are dependent: witness {witness}")
        for p in self.polys:
            if p.constant_term != 0:
                raise ConfigurationError(f"{p.to_text(['n'])} does not vanish at 0")

    def all_trivial(self) -> bool:
        return all(chi.is_trivial() for chi in self.characters)

    def describe(self) -> str:
        chis = ", ".join(str(tuple(str(f) for f in c.frequency)) for c in self.characters)
        return f"chars [{chis}] on {self.polys.to_text(['n'])} over {self.folner.describe()}"


def character_sum(spec: CharacterSumSpec, N: int, threads: int | None = None) -> complex:
    """``e(factor) * E_{n in Phi_N} prod_j chi_j(p_j(n))``, exact up to the final exponentials."""
    elements = spec.folner.elements(N)
    if not elements:
        raise ConfigurationError(f"Folner set is empty at N={N}")
    table = PhaseTable(spec.ring, list(spec.polys), elements)
    value = table.average([chi.frequency for chi in spec.characters], threads)
    ph = frac_part(spec.factor)
    if ph:
        value *= complex(math.cos(2 * math.pi * ph), math.sin(2 * math.pi * ph))
    return value


@dataclass
class SumRow:
    N: int
    size: int
    value: complex
    threshold: float

    @property
    def passed(self) -> bool:
        return abs(self.value) < self.threshold

    def row(self) -> dict:
        return {"N": self.N, "size": self.size, "re": repr(self.value.real),
                "im": repr(self.value.imag), "abs": repr(abs(self.value)),
                "threshold": repr(self.threshold), "pass": str(self.passed).lower()}


def character_sum_sweep(spec: CharacterSumSpec, schedule: Sequence[int],
                        thresholds: Sequence[float] | None = None,
                        threads: int | None = None) -> list:
    rows = []
    for i, N in enumerate(schedule):
        size = spec.folner.size(N)
        thr = thresholds[i] if thresholds else default_threshold(size)
        rows.append(SumRow(N, size, character_sum(spec, N, threads), thr))
    return rows


# ---------------------------------------------------------- Weyl differencing


def weyl_difference_reduce(spec: CharacterSumSpec, shifts: Sequence) -> CharacterSumSpec:
    """
    Difference every polynomial along ``h_1, ..., h_{d-1}`` (``d`` the top
    degree) so that all become ``a n + b``; top-degree members keep ``a != 0``.
    """
    d = int(spec.polys.degree)
    if len(shifts) != d - 1:
        raise ValueError(f"need {d - 1} shifts for degree {d}, got {len(shifts)}")
    ring = spec.ring
    hs = [ring.coerce(h) for h in shifts]
    if any(not h for h in hs):
        raise ValueError("Weyl differencing shifts must be nonzero")
    out = []
    for p in spec.polys:
        q = p
        for h in hs:
            q = difference(q, [h])
        if q.degree > 1:
            raise IntegrityError("differencing did not linearize")
        if p.degree == d and q.coefficient((1,)) == 0:
            raise IntegrityError(f"leading coefficient of {p.to_text(['n'])} vanished")
        out.append(q)
    return CharacterSumSpec(ring, spec.characters, PolySystem(tuple(out)), spec.folner,
                            spec.factor, spec.name + "/weyl" if spec.name else "")


def linear_coefficients(spec: CharacterSumSpec) -> list:
    """``[(a_j, b_j)]`` for a linear spec ``p_j(n) = a_j n + b_j``."""
    if spec.polys.degree > 1:
        raise ValueError("spec is not linear")
    return [(p.coefficient((1,)), p.constant_term) for p in spec.polys]


# ------------------------------------------------------------ coset reduction


def is_relation(characters: Sequence[Character], b: Sequence) -> bool:
    """``prod_j chi_j(b_j x) == 1`` for every ``x``."""
    ring = characters[0].ring
    total = [Fraction(0)] * ring.dim
    for chi, bj in zip(characters, b):
        sc = chi.scaled(bj)
        total = [t + f for t, f in zip(total, sc.frequency)]
    return Character(ring, tuple(total)).is_trivial()


@dataclass
class CosetReduction:
    eliminated: int  # 0-based index of the removed character
    b: tuple
    representatives: list
    specs: list  # one CharacterSumSpec per coset, character ``eliminated`` removed
    ideal: Ideal = field(repr=False, default=None)

    def weights(self, N: int) -> list:
        """``|A_N(i)| / |Phi_N|``; they sum to 1."""
        sizes = [s.folner.size(N) for s in self.specs]
        total = sum(sizes)
        return [Fraction(x, total) for x in sizes]

    def recombine(self, N: int, threads: int | None = None) -> complex:
        """``sum_i |A_N(i)|/|Phi_N| * E_{A_N(i)}[...]``; equals the original sum."""
        total = 0j
        for w, s in zip(self.weights(N), self.specs):
            if w:
                total += float(w) * character_sum(s, N, threads)
        return total


def coset_reduction(spec: CharacterSumSpec, b: Sequence, eliminate: int | None = None
                    ) -> CosetReduction:
    """
    Remove one character using a relation ``prod_j chi_j(b_j .) == 1``.

    With ``k = eliminate`` (default: the last index with ``b_k != 0``) and
    representatives ``r_i`` of ``R / (b_k)``, coset ``i`` carries
    ``p_{j,i}(n) = p_j(b_k n + r_i) - p_j(r_i)`` and
    ``p_{k,i}(n) = (p_k(b_k n + r_i) - p_k(r_i)) / b_k``. Since
    ``chi_k(b_k y) = prod_{j != k} chi_j(-b_j y)``, character ``j`` ends up on
    ``p_{j,i} - b_j p_{k,i}``, and the recentring constants form a phase
    factor.
    """
    ring = spec.ring
    if not ring.is_good():
        raise ConfigurationError("coset reduction needs a good ring")
    if isinstance(spec.folner, CosetFolner):
        raise ConfigurationError("reduce from a plain Folner sequence")
    b = tuple(ring.coerce(x) for x in b)
    chis = spec.characters
    if len(b) != len(chis):
        raise ValueError("relation witness length must match the characters")
    nz = [j for j, x in enumerate(b) if x]
    if not nz:
        raise ValueError("relation witness is zero")
    k = nz[-1] if eliminate is None else eliminate
    if not b[k]:
        raise ValueError(f"cannot eliminate index {k}: b_k = 0")
    if not is_relation(chis, b):
        raise IntegrityError(f"{b} is not a relation among the characters")
    bk = b[k]
    J = Ideal(ring, bk)
    reps = J.coset_representatives()
    x = RingPolynomial.variable(ring, 1, 0)
    polys = list(spec.polys)
    d = spec.polys.degree
    remaining = [j for j in range(len(chis)) if j != k]
    if any(polys[j].degree == d for j in range(len(polys))) and \
            not any(polys[j].degree == d for j in remaining) and \
            all(not chis[j].is_trivial() for j in range(len(chis))):
        raise IntegrityError("reduction would remove every top-degree character")
    specs = []
    for r in reps:
        lin = x * bk + r
        shifted = [p.substitute([lin]) - p.evaluate([r]) for p in polys]
        try:
            pk = shifted[k].divide_exact(bk)
        except ArithmeticError as exc:
            raise IntegrityError(f"division by {ring.format(bk)} not exact: {exc}") from None
        new_polys = [shifted[j] - pk * b[j] for j in remaining]
        factor = sum((chis[j].phase(polys[j].evaluate([r])) for j in range(len(chis))),
                     Fraction(0)) + spec.factor
        specs.append(CharacterSumSpec(ring, [chis[j] for j in remaining],
                                      PolySystem(tuple(new_polys)),
                                      CosetFolner(spec.folner, bk, r), frac_part(factor)))
    return CosetReduction(eliminated=k, b=b, representatives=reps, specs=specs, ideal=J)


# --------------------------------------------------------- single character


def single_character_average(chi: Character, folner: FolnerSequence, N: int,
                             threads: int | None = None) -> complex:
    """``E_{n in Phi_N} chi(n)`` for a nontrivial character."""
    if chi.is_trivial():
        raise ValueError("character is trivial: its average is identically 1, "
                         "there is no q with chi(q) != 1 to force cancellation")
    spec = CharacterSumSpec(chi.ring, [chi], PolySystem((RingPolynomial.variable(chi.ring, 1, 0),)),
                            folner)
    return character_sum(spec, N, threads)


def dirichlet_ratio(alpha: float, N: int) -> float:
    """``sin((2N+1) pi a) / ((2N+1) sin(pi a))``: the centered-box average of ``e(a n)``."""
    s = math.sin(math.pi * alpha)
    if abs(s) < 1e-300:
        return 1.0
    return math.sin((2 * N + 1) * math.pi * alpha) / ((2 * N + 1) * s)

