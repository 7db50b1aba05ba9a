"""
Gowers-Host-Kra seminorms of trigonometric observables on rotation systems.

Writing ``f = sum_k c_k e(k . x)`` and ``sigma_eps = (-1)^{|eps|}``, the cube
integral factorizes:

    int Delta_{n_1..n_s} f = sum over (k_eps) with sum_eps sigma_eps k_eps = 0 of
        prod_eps C^{|eps|} c_{k_eps} * e(sum_j lambda_j . phi(n_j)),
    lambda_j = sum_{eps_j = 1} sigma_eps k_eps.

Averaging over ``n_j in Phi_N`` replaces each exponential by
``D(lambda_j) = E_{n in Phi_N} e(lambda_j . phi(n))``. As ``N -> infinity``,
``D(lambda) -> 1`` when ``lambda . phi`` is trivial on the ring and 0
otherwise, which gives the closed form.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import ConfigurationError, FolnerSequence, ideal_generated_by
from .averages import PhaseTable
from .polynomials import RingPolynomial
from .systems import RotationSystem, SupportBudgetError, TrigObservable, act, multiply

NEGATIVE_TOLERANCE = 1e-6
SELECTION_BUDGET = 2_000_000


class NumericalIntegrityError(ArithmeticError):
    """A quantity that must be non-negative came out clearly negative."""


class SeminormMethod(enum.Enum):
    RECURSIVE = "recursive"  # single-limit combined average over Phi_N^s
    FEJER = "fejer"  # same average over difference sets Phi_N - Phi_N
    ITERATED = "iterated"  # one limit per level
    EARLY_STOP = "early_stop"  # E_{n in Phi^{s-2}} |||Delta_n f|||_2^4
    CLOSED_FORM = "closed_form"


@dataclass
class SeminormEstimate:
    s: int
    value: float
    power: float  # value ** (2 ** s) before the root, after clamping
    N: tuple
    method: SeminormMethod
    raw: complex = 0j  # unclamped average
    reference: float | None = None

    def row(self, observable_id: str) -> dict:
        return {"observable": observable_id, "s": self.s,
                "N": "/".join(map(str, self.N)) if self.N else "",
                "method": self.method.value, "value": repr(float(self.value))}


# ------------------------------------------------------------------- cubes


@dataclass(frozen=True)
class CubeIndex:
    """A vertex ``eps`` of ``{0,1}^s``."""

    eps: tuple

    @property
    def s(self) -> int:
        return len(self.eps)

    @property
    def weight(self) -> int:
        return sum(self.eps)

    @property
    def conjugated(self) -> bool:
        return self.weight % 2 == 1

    def dot(self, ns: Sequence):
        total = 0
        for e_, n in zip(self.eps, ns):
            if e_:
                total = total + n
        return total


def cube(s: int) -> list:
    return [CubeIndex(eps) for eps in itertools.product((0, 1), repeat=s)]


def conj_power(f: TrigObservable, k: int) -> TrigObservable:
    """``C^k f``: ``f`` for even ``k``, ``conj(f)`` for odd ``k``."""
    return f.conj() if k % 2 else f


def delta(sys: RotationSystem, f: TrigObservable, n) -> TrigObservable:
    """``Delta_n f = f * T_n conj(f)``."""
    return multiply(f, act(sys, n, f).conj())


def delta_iterated(sys: RotationSystem, f: TrigObservable, ns: Sequence,
                   check: bool = True, tol: float = 1e-12) -> TrigObservable:
    """
    ``Delta_{n_1} ... Delta_{n_s} f``, computed by repeated :func:`delta` and,
    when ``check`` is set, also as the cube product
    ``prod_eps C^{|eps|} T_{eps . n} f``; the two must agree.
    """
    out = f
    for n in ns:
        out = delta(sys, out, n)
    if check:
        direct = TrigObservable.constant(f.dim, 1.0)
        for v in cube(len(ns)):
            direct = multiply(direct, conj_power(act(sys, v.dot(ns), f), v.weight))
        if out.distance(direct) > tol * max(1.0, f.sup_bound() ** (2 ** len(ns))):
            raise AssertionError("recursive and cube-product differences disagree")
    return out


# ---------------------------------------------------------- cube selections


def _cube_terms(f: TrigObservable, s: int, budget: int = SELECTION_BUDGET):
    """
    Yield ``(coefficient, lambdas)`` for every frequency assignment to the
    cube vertices whose signed total vanishes.
    """
    verts = cube(s)
    items = sorted(f.items())
    if len(items) ** len(verts) > budget:
        raise SupportBudgetError(
            f"{len(items)}^{len(verts)} cube selections exceed budget {budget}")
    m = f.dim
    signs = [(-1) ** v.weight for v in verts]
    coefs = [[(c.conjugate() if v.conjugated else c) for _, c in items] for v in verts]
    freqs = [k for k, _ in items]
    # depth-first over vertices with pruning on nothing but the final sum
    for choice in itertools.product(range(len(items)), repeat=len(verts)):
        total = [0] * m
        for sg, ci in zip(signs, choice):
            for t in range(m):
                total[t] += sg * freqs[ci][t]
        if any(total):
            continue
        coef = 1 + 0j
        for vi, ci in enumerate(choice):
            coef *= coefs[vi][ci]
        lambdas = []
        for j in range(s):
            lam = [0] * m
            for vi, v in enumerate(verts):
                if v.eps[j]:
                    for t in range(m):
                        lam[t] += signs[vi] * freqs[choice[vi]][t]
            lambdas.append(tuple(lam))
        yield coef, lambdas


def annihilates(sys: RotationSystem, lam: Sequence[int]) -> bool:
    """True when ``r -> e(lam . phi(r))`` is the trivial character."""
    row = sys.kappa_row(lam)
    if sys.ring.is_field():
        return all(x == 0 for x in row)
    return all(x.denominator == 1 for x in row)


class _DirichletCache:
    """``D(lambda) = E_{n in Phi_N} e(lambda . phi(n))`` with memoization."""

    def __init__(self, sys, folner, N, threads=None):
        self.sys = sys
        elements = folner.elements(N)
        self.table = PhaseTable(sys, [RingPolynomial.variable(sys.ring, 1, 0)], elements)
        self.cache: dict = {}
        self.threads = threads

    def __call__(self, lam) -> complex:
        lam = tuple(lam)
        if lam not in self.cache:
            if not any(lam):
                self.cache[lam] = 1 + 0j
            else:
                self.cache[lam] = self.table.average([self.sys.kappa_row(lam)], self.threads)
        return self.cache[lam]


def _finish(raw: complex, s: int, N, method, imag_tol: float = 1e-9,
            neg_tol: float = NEGATIVE_TOLERANCE) -> SeminormEstimate:
    if abs(raw.imag) > imag_tol * max(1.0, abs(raw)):
        raise NumericalIntegrityError(f"imaginary part {raw.imag:.3e} in a real average")
    re_ = raw.real
    if re_ < -neg_tol:
        raise NumericalIntegrityError(
            f"seminorm power {re_:.3e} is below -{neg_tol}; truncation too coarse")
    power = max(re_, 0.0)
    return SeminormEstimate(s=s, value=power ** (1.0 / 2 ** s), power=power,
                            N=tuple(N), method=method, raw=raw)


# ----------------------------------------------------------------- estimates


def seminorm_truncated(sys: RotationSystem, f: TrigObservable, s: int, N: int | Sequence[int],
                       folner: FolnerSequence | None = None,
                       method: SeminormMethod | str = SeminormMethod.FEJER,
                       threads: int | None = None) -> SeminormEstimate:
    """
    Finite-N estimate of ``|||f|||_s``.

    ``recursive``
        ``E_{n in Phi_N^s} int Delta_n f``: each factor is ``D(lambda)``.
        Clamped at 0 with an integrity threshold of ``-1e-6``.
    ``fejer``
        the same average with every ``n_j`` ranging over differences of two
        independent points of ``Phi_N``; each factor becomes ``|D(lambda)|^2``,
        so the value is non-negative at every ``N`` (default).
    ``iterated``
        level-by-level limits, ``N`` a schedule of length ``s``.
    ``early_stop``
        ``E_{n in Phi_N^{s-2}} |||Delta_n f|||_2^4`` with the inner seminorm in
        closed form (``2 <= s <= 3``).
    """
    method = SeminormMethod(method)
    if s < 1:
        raise ValueError("s must be >= 1")
    folner = folner or _default_folner(sys)
    if method is SeminormMethod.ITERATED:
        sched = [N] * s if isinstance(N, int) else list(N)
        if len(sched) != s:
            raise ValueError("iterated estimate needs one N per level")
        raw = _iterated_power(sys, f, s, sched, folner)
        return _finish(complex(raw), s, sched, method)
    if not isinstance(N, int):
        N = list(N)[0]
    if method is SeminormMethod.EARLY_STOP:
        if not 2 <= s <= 3:
            raise ValueError("early-stop path is implemented for s = 2, 3")
        if s == 2:
            raw = closed_form_power(sys, f, 2, require_ergodic=False)
            return _finish(complex(raw), s, [], method)
        vals = [closed_form_power(sys, delta(sys, f, n), 2, require_ergodic=False)
                for n in folner.elements(N)]
        return _finish(complex(math.fsum(vals) / len(vals)), s, [N], method)
    D = _DirichletCache(sys, folner, N, threads)
    total = 0j
    for coef, lambdas in _cube_terms(f, s):
        w = 1 + 0j
        for lam in lambdas:
            d = D(lam)
            w *= (abs(d) ** 2) if method is SeminormMethod.FEJER else d
        total += coef * w
    return _finish(total, s, [N], method)


def _default_folner(sys):
    from .algebra import FolnerFamily

    fam = FolnerFamily.RATIONAL_LADDER if sys.ring.is_field() else FolnerFamily.CENTERED_BOX
    return FolnerSequence(sys.ring, fam)


def _iterated_power(sys, f, s, sched, folner) -> complex:
    """``E_{n in Phi_{N_1}} |||Delta_n f|||_{s-1}^{2^{s-1}}`` down to ``|||.|||_0 = int``."""
    if s == 0:
        return f.integral()
    elements = folner.elements(sched[0])
    acc = [_iterated_power(sys, delta(sys, f, n), s - 1, sched[1:], folner) for n in elements]
    re_ = math.fsum(a.real for a in acc) / len(acc)
    im = math.fsum(a.imag for a in acc) / len(acc)
    return complex(re_, im)


def closed_form_power(sys: RotationSystem, f: TrigObservable, s: int,
                      require_ergodic: bool = True) -> float:
    """
    ``|||f|||_s^{2^s}`` as the limit of the cube average: the sum over cube
    selections whose every ``lambda_j . phi`` is trivial.
    """
    if require_ergodic and not sys.is_ergodic():
        raise ConfigurationError("closed form requested for a non-ergodic rotation")
    if s == 0:
        return f.integral().real
    cache: dict = {}
    total = 0j
    for coef, lambdas in _cube_terms(f, s):
        ok = True
        for lam in lambdas:
            if lam not in cache:
                cache[lam] = annihilates(sys, lam)
            if not cache[lam]:
                ok = False
                break
        if ok:
            total += coef
    return total.real


def seminorm_closed_form_rotation(sys: RotationSystem, f: TrigObservable, s: int,
                                  require_ergodic: bool = True) -> SeminormEstimate:
    """
    Exact ``|||f|||_s`` on a rotation; for ``s = 2`` this is
    ``(sum_k |c_k|^4)^{1/4}`` on an ergodic rotation.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    power = closed_form_power(sys, f, s, require_ergodic)
    est = _finish(complex(power), s, [], SeminormMethod.CLOSED_FORM)
    est.reference = est.value
    return est


def power_sum_seminorm(f: TrigObservable, s: int) -> float:
    """``(sum_k |c_k|^{2^s})^{1/2^s}``; equals the seminorm for ``s = 2`` only."""
    return sum(abs(c) ** (2 ** s) for _, c in f.items()) ** (1.0 / 2 ** s)


# --------------------------------------------------- linear seminorm identity


@dataclass
class LinearIdentityResult:
    lhs: float
    rhs: float
    gap: float
    bound_factor: int  # 1 on fields, [R:J] on good rings
    holds: bool
    ideal: object = None
    details: dict = field(default_factory=dict)


def linear_seminorm_identity_check(sys: RotationSystem, f: TrigObservable, p: RingPolynomial,
                                   k: int, N: int, folner: FolnerSequence | None = None,
                                   tol: float = 0.05) -> LinearIdentityResult:
    """
    Compare ``E_{g in Phi_N} |||f . T_{p(g)} conj(f)|||_k^{2^k}`` with
    ``|||f|||_{k+1}^{2^{k+1}}``.

    Over a field the two agree in the limit; over a good ring the left side
    is at most ``[R:J]`` times the right, ``J`` the ideal of the
    coefficients of ``p``. Inner seminorms use the closed form.
    """
    if p.degree != 1:
        raise ValueError("p must have degree one")
    if p.constant_term != 0:
        raise ValueError("p must vanish at 0")
    ring = sys.ring
    folner = folner or _default_folner(sys)
    vals = []
    for g in folner.elements(N):
        pt = [g] if p.nvars == 1 else list(g)
        h = multiply(f, act(sys, p.evaluate(pt), f).conj())
        vals.append(closed_form_power(sys, h, k, require_ergodic=False))
    lhs = math.fsum(vals) / len(vals)
    rhs = closed_form_power(sys, f, k + 1, require_ergodic=False)
    if ring.is_field():
        factor, J = 1, None
        holds = abs(lhs - rhs) <= tol
    else:
        coeffs = [c for e, c in p.items() if sum(e) == 1]
        J = ideal_generated_by(ring, coeffs)
        factor = int(J.index())
        holds = lhs <= factor * rhs + 1e-9
    return LinearIdentityResult(lhs=lhs, rhs=rhs, gap=abs(lhs - rhs), bound_factor=factor,
                                holds=holds, ideal=J)
