"""
Multiple ergodic averages on rotation systems.

For observables ``f_i = sum_k c_{i,k} e(k . x)`` and polynomials ``p_i``,

    E_{n in Phi_N} prod_i f_i(x + phi(p_i(n)))
        = sum_{k_1..k_l} prod_i c_{i,k_i} * E_n e(sum_i k_i . phi(p_i(n))) * e((sum_i k_i) . x),

so the Fourier path reduces to one exact character sum per frequency
selection. The grid path evaluates the same average pointwise and serves
as an independent oracle.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .algebra import ConfigurationError, FolnerFamily, FolnerSequence, Ring, RingKind, folner_set
from .numerics import chunked_sum, exp_sum
from .polynomials import RingPolynomial
from .systems import (DEFAULT_SUPPORT_BUDGET, RotationSystem, SupportBudgetError, TrigObservable,
                      _frac)


@dataclass
class AverageResult:
    """One finite-N multiple ergodic average."""

    N: int
    size: int
    target: complex
    l2_distance_to_product: float
    value: TrigObservable | None = None
    grid: np.ndarray | None = None
    method: str = "fourier"
    wall_time_ms: float = 0.0

    def recompute_distance(self) -> float:
        if self.value is not None:
            return self.value.distance(TrigObservable.constant(self.value.dim, self.target))
        return float(np.sqrt(np.mean(np.abs(self.grid - self.target) ** 2)))

    def row(self) -> dict:
        """CSV row; timing is kept out so reruns are byte-identical."""
        return {"N": self.N, "size": self.size,
                "l2_distance": repr(float(self.l2_distance_to_product)),
                "target": format_complex(self.target)}


def format_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return repr(z.real)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}j"


# ------------------------------------------------------------ exact phases


class PhaseTable:
    """
    Exact coordinates of ``p_i(n)`` for all ``n`` in a Folner set, stored as
    integers over a per-coordinate common denominator.
    """

    def __init__(self, sys: RotationSystem | Ring, polys: Sequence[RingPolynomial],
                 elements: list):
        self.ring = sys if isinstance(sys, Ring) else sys.ring
        self.size = len(elements)
        self.cols = []  # per (i, j): (int list, denominator)
        for p in polys:
            values = [p.evaluate([n]) for n in elements] if p.nvars == 1 else \
                [p.evaluate(list(n)) for n in elements]
            coords = [self.ring.embed(v) for v in values]
            per_poly = []
            for j in range(self.ring.dim):
                col = [Fraction(c[j]) for c in coords]
                den = 1
                for x in col:
                    den = math.lcm(den, x.denominator)
                per_poly.append(([int(x * den) for x in col], den))
            self.cols.append(per_poly)

    def numerators(self, rows: Sequence[Sequence[Fraction]]):
        """
        Integer numerators and common denominator of
        ``sum_i rows[i] . coords(p_i(n))`` for every ``n``.
        """
        terms = []
        q = 1
        for i, row in enumerate(rows):
            for j, a in enumerate(row):
                if a == 0:
                    continue
                ints, den = self.cols[i][j]
                d = a.denominator * den
                terms.append((a.numerator, ints, d))
                q = math.lcm(q, d)
        if not terms:
            return None, 1
        total = [0] * self.size
        for num, ints, d in terms:
            mult = num * (q // d)
            if mult % q == 0:
                continue
            total = [t + mult * x for t, x in zip(total, ints)]
        return total, q

    def average(self, rows, threads=None) -> complex:
        """``E_n e(sum_i rows[i] . coords(p_i(n)))``."""
        nums, q = self.numerators(rows)
        if nums is None:
            return complex(1.0)
        return exp_sum(nums, q, threads) / self.size


def _selection_rows(sys: RotationSystem, kappas) -> list:
    return [sys.kappa_row(k) for k in kappas]


def _check_inputs(sys, polys, obs):
    polys = list(polys)
    obs = list(obs)
    if len(polys) != len(obs):
        raise ValueError(f"{len(polys)} polynomials but {len(obs)} observables")
    if not polys:
        raise ValueError("need at least one polynomial")
    for f in obs:
        if f.dim != sys.dim:
            raise ValueError(f"observable on T^{f.dim} but system on T^{sys.dim}")
    for p in polys:
        if p.ring != sys.ring:
            raise ValueError("polynomials and system use different rings")
    return polys, obs


def _elements(folner: FolnerSequence, N: int, ring):
    if folner.ring != ring:
        raise ConfigurationError("Folner sequence and system use different rings")
    return folner_set(folner, N)


def multi_average_fourier(sys: RotationSystem, polys, obs: Sequence[TrigObservable],
                          folner: FolnerSequence, N: int, *, threads: int | None = None,
                          budget: int = DEFAULT_SUPPORT_BUDGET, table: PhaseTable | None = None
                          ) -> AverageResult:
    """
    ``E_{n in Phi_N} prod_i T_{p_i(n)} f_i`` as a trigonometric polynomial.

    Raises
    ------
    SupportBudgetError
        more than ``budget`` frequency selections (use the grid path).
    """
    t0 = time.perf_counter()
    polys, obs = _check_inputs(sys, polys, obs)
    nsel = math.prod(len(f) for f in obs)
    if nsel > budget:
        raise SupportBudgetError(f"{nsel} frequency selections exceed budget {budget}; "
                                 "use multi_average_grid")
    elements = _elements(folner, N, sys.ring)
    table = table or PhaseTable(sys, polys, elements)
    out: dict = {}
    supports = [sorted(f.items()) for f in obs]
    for sel in itertools.product(*supports):
        coef = math.prod((c for _, c in sel), start=1 + 0j)
        kappas = [k for k, _ in sel]
        avg = table.average(_selection_rows(sys, kappas), threads)
        total = tuple(sum(col) for col in zip(*kappas))
        out[total] = out.get(total, 0j) + coef * avg
    value = TrigObservable(sys.dim, out)
    target = math.prod((f.integral() for f in obs), start=1 + 0j)
    dist = value.distance(TrigObservable.constant(sys.dim, target))
    return AverageResult(N=N, size=len(elements), target=target, l2_distance_to_product=dist,
                         value=value, method="fourier",
                         wall_time_ms=(time.perf_counter() - t0) * 1e3)


def required_grid_points(obs: Sequence[TrigObservable]) -> int:
    return 2 * sum(f.max_frequency() for f in obs) + 1


def multi_average_grid(sys: RotationSystem, polys, obs: Sequence[TrigObservable],
                       folner: FolnerSequence, N: int, grid_points: int | None = None, *,
                       threads: int | None = None, chunk: int = 512) -> AverageResult:
    """
    The same average evaluated pointwise on a uniform grid of ``T^m``.

    The L2 distance uses grid quadrature, which is exact once
    ``grid_points >= 2 * sum_i maxfreq(f_i) + 1``.
    """
    t0 = time.perf_counter()
    polys, obs = _check_inputs(sys, polys, obs)
    need = required_grid_points(obs)
    G = need if grid_points is None else int(grid_points)
    if G < need:
        raise ValueError(f"grid of {G} points per dimension aliases; need at least {need}")
    elements = _elements(folner, N, sys.ring)
    m = sys.dim
    axes = [np.arange(G) / G] * m
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, m)
    per_poly = []
    for p, f in zip(polys, obs):
        ks = np.array([k for k, _ in sorted(f.items())], dtype=np.float64).reshape(-1, m)
        cs = np.array([c for _, c in sorted(f.items())], dtype=np.complex128)
        basis = np.exp(2j * math.pi * (ks @ mesh.T))  # (supp, grid)
        rot = np.array([[float(x) for x in sys.rotation(p.evaluate([n]))] for n in elements],
                       dtype=np.float64).reshape(-1, m)
        per_poly.append((ks, cs, basis, rot))

    def part(a, b):
        prod = np.ones((b - a, mesh.shape[0]), dtype=np.complex128)
        for ks, cs, basis, rot in per_poly:
            coef = cs[None, :] * np.exp(2j * math.pi * (rot[a:b] @ ks.T))
            prod *= coef @ basis
        return prod.sum(axis=0)

    total = chunked_sum(part, len(elements), threads, chunk=chunk)
    avg = total / len(elements)
    target = math.prod((f.integral() for f in obs), start=1 + 0j)
    dist = float(np.sqrt(np.mean(np.abs(avg - target) ** 2)))
    return AverageResult(N=N, size=len(elements), target=target, l2_distance_to_product=dist,
                         grid=avg.reshape((G,) * m), method="grid",
                         wall_time_ms=(time.perf_counter() - t0) * 1e3)


def average_sweep(sys, polys, obs, folner, schedule: Sequence[int], method: str = "fourier",
                  threads: int | None = None) -> list:
    fn = multi_average_fourier if method == "fourier" else multi_average_grid
    return [fn(sys, polys, obs, folner, N, threads=threads) for N in schedule]


# ---------------------------------------------------------- counterexample


def counterexample_dependent(sys: RotationSystem, a: int, N: int,
                             folner: FolnerSequence | None = None,
                             threads: int | None = None) -> AverageResult:
    """
    Average for ``p_1 = n``, ``p_2 = a n`` with ``f = e(a x)``, ``g = e(-x)``.

    The two phases cancel for every ``n``, so the average is ``e((a-1) x)``
    and its distance to the product of integrals (0) is 1 at every ``N``.
    """
    if sys.ring.kind is not RingKind.INTEGERS or sys.dim != 1:
        raise ConfigurationError("the dependent counterexample runs on a circle rotation by Z")
    a = int(a)
    if a == 1:
        raise ValueError("a = 1 is degenerate: f * g is constant")
    ring = sys.ring
    polys = [RingPolynomial.variable(ring, 1, 0), RingPolynomial.variable(ring, 1, 0) * a]
    obs = [TrigObservable.character(a), TrigObservable.character(-1)]
    folner = folner or FolnerSequence(ring, FolnerFamily.CENTERED_BOX)
    return multi_average_fourier(sys, polys, obs, folner, N, threads=threads)


# ------------------------------------------------------------ mean ergodic


def invariant_projection(sys: RotationSystem, f: TrigObservable) -> TrigObservable:
    """Orthogonal projection onto invariant functions: keep frequencies fixed by every ``T_r``."""
    ring = sys.ring
    keep = {}
    for k, c in f.items():
        row = sys.kappa_row(k)
        if ring.is_field():
            fixed = all(x == 0 for x in row)
        else:
            fixed = all(_frac(sum((a * x for a, x in zip(row, ring.embed(g))), Fraction(0))) == 0
                        for g in ring.additive_generators())
        if fixed:
            keep[k] = c
    return TrigObservable(f.dim, keep)


@dataclass
class MeanErgodicResult:
    N: int
    size: int
    average: TrigObservable
    projection: TrigObservable
    deviation: float


def mean_ergodic_check(sys: RotationSystem, f: TrigObservable, folner: FolnerSequence, N: int,
                       threads: int | None = None) -> MeanErgodicResult:
    """``E_{g in Phi_N} T_g f`` against its limit, the invariant projection of ``f``."""
    ring = sys.ring
    polys = [RingPolynomial.variable(ring, 1, 0)]
    res = multi_average_fourier(sys, polys, [f], folner, N, threads=threads)
    proj = invariant_projection(sys, f)
    return MeanErgodicResult(N=N, size=res.size, average=res.value, projection=proj,
                             deviation=res.value.distance(proj))


# -------------------------------------------------------------- van der Corput


@dataclass
class VectorFamily:
    """
    Vectors ``x_g`` on a box of Z or Z[i], zero outside.

    ``values`` has shape ``box_shape + (D,)``; ``lower`` is the ring
    coordinate of ``values[0, ...]``.
    """

    ring: object
    values: np.ndarray
    lower: tuple

    @classmethod
    def from_function(cls, ring, radius: int, fn: Callable, dim: int) -> VectorFamily:
        side = 2 * radius + 1
        shape = (side,) * ring.dim + (dim,)
        vals = np.zeros(shape, dtype=np.complex128)
        for idx in itertools.product(range(side), repeat=ring.dim):
            coords = tuple(i - radius for i in idx)
            vals[idx] = fn(ring.from_coords(coords))
        return cls(ring, vals, (-radius,) * ring.dim)

    @classmethod
    def random(cls, ring, radius: int, dim: int, rng: np.random.Generator) -> VectorFamily:
        side = 2 * radius + 1
        shape = (side,) * ring.dim + (dim,)
        vals = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        return cls(ring, vals, (-radius,) * ring.dim)

    def sup_norm_sq(self) -> float:
        return float(np.max(np.sum(np.abs(self.values) ** 2, axis=-1)))

    def window(self, bounds) -> tuple:
        """Values on the box ``bounds`` (inclusive per coordinate), zero-padded; also the padded count."""
        sl, pads, outside = [], [], 1
        inside = 1
        for (lo, hi), low, n in zip(bounds, self.lower, self.values.shape[:-1]):
            a, b = lo - low, hi - low + 1
            ca, cb = max(a, 0), min(b, n)
            sl.append(slice(ca, max(cb, ca)))
            pads.append((ca - a if cb > ca else b - a, b - cb if cb > ca else 0))
            inside *= max(cb - ca, 0)
            outside *= b - a
        block = self.values[tuple(sl)]
        block = np.pad(block, pads + [(0, 0)])
        return block, outside - inside


def _box_sum(arr: np.ndarray, widths: Sequence[int]) -> np.ndarray:
    """Sliding-window sums of the given widths along the leading axes."""
    out = arr
    for ax, w in enumerate(widths):
        c = np.cumsum(out, axis=ax)
        zero = np.zeros_like(np.take(c, [0], axis=ax))
        c = np.concatenate([zero, c], axis=ax)
        n = out.shape[ax] - w + 1
        out = np.take(c, range(w, w + n), axis=ax) - np.take(c, range(0, n), axis=ax)
    return out


@dataclass
class VdcResult:
    lhs: float
    rhs: float
    remainder: float  # rigorous finite-N remainder (2 rho + rho^2) S^2
    remainder_stated: float  # S^2 rho
    holds: bool
    holds_stated: bool
    slack: float
    boundary_points: int
    rho: float
    sup_sq: float


def vdc_inequality_check(x: VectorFamily, folner_N: FolnerSequence, N: int,
                         folner_M: FolnerSequence, M: int, tol: float = 1e-9) -> VdcResult:
    """
    Finite-N van der Corput inequality

        ||E_{n in Phi_N} x_n||^2 <= E_{h' in Phi_M} E_{h in Phi_M - h'} E_{n in Phi_N + h'} <x_{n+h}, x_n>
                                     + remainder.

    The triple average equals ``E_{n in Phi_N} ||E_{m in Phi_M} x_{n+m}||^2``.
    With ``S^2 = sup ||x_g||^2`` and ``rho = E_{m in Phi_M} |Phi_N D (Phi_N+m)|/|Phi_N|``
    both ``S^2 rho`` and the bound ``(2 rho + rho^2) S^2`` that follows from
    ``||a|| <= ||b|| + S rho`` are reported; ``holds`` uses the latter.
    """
    bN = folner_N.box_bounds(N)
    bM = folner_M.box_bounds(M)
    blockN, outN = x.window(bN)
    lhs = float(np.sum(np.abs(blockN.reshape(-1, blockN.shape[-1]).mean(axis=0)) ** 2))
    big = tuple((a + c, b + d) for (a, b), (c, d) in zip(bN, bM))
    block, out_big = x.window(big)
    widths = [d - c + 1 for c, d in bM]
    win = _box_sum(block, widths) / math.prod(widths)
    rhs = float(np.mean(np.sum(np.abs(win) ** 2, axis=-1)))
    side = [b - a + 1 for a, b in bN]
    # |Phi_N D (Phi_N + m)| for a box with side lengths L_j and shift m
    ms = [np.arange(c, d + 1) for c, d in bM]
    grids = np.meshgrid(*ms, indexing="ij")
    overlap = np.ones_like(grids[0], dtype=np.float64)
    for L, g in zip(side, grids):
        overlap = overlap * np.clip(L - np.abs(g), 0, None)
    size = math.prod(side)
    rho = float(np.mean(2 * (size - overlap) / size))
    S2 = x.sup_norm_sq()
    rem_stated = S2 * rho
    rem = (2 * rho + rho * rho) * S2
    slack = rhs + rem - lhs
    return VdcResult(lhs=lhs, rhs=rhs, remainder=rem, remainder_stated=rem_stated,
                     holds=slack >= -tol, holds_stated=rhs + rem_stated - lhs >= -tol,
                     slack=slack, boundary_points=int(out_big), rho=rho, sup_sq=S2)


@dataclass
class PeriodicFamily:
    """
    ``x_g = values[g mod period]`` on Z (or Z[i] with period lattice ``period * Z[i]``).
    """

    ring: object
    period: int
    values: np.ndarray  # shape (period,)*ring.dim + (D,)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim == self.ring.dim:
            self.values = self.values[..., None]
        if self.values.shape[:-1] != (self.period,) * self.ring.dim:
            raise ValueError("values must cover one period in each coordinate")

    def at(self, g) -> np.ndarray:
        idx = tuple(int(c) % self.period for c in self.ring.embed(g))
        return self.values[idx]


@dataclass
class FiniteSetResult:
    lhs: float
    rhs: float
    holds: bool
    exact_equality: bool = field(default=False)


def vdc_finite_set_check(x, S: Sequence, folner: FolnerSequence, N: int,
                         tol: float = 1e-12) -> FiniteSetResult:
    """
    ``limsup ||E_{g in Phi_N} x_g||^2 <= limsup E_{(h,h') in S^2} E_{g in Phi_N} <x_{g+h}, x_{g+h'}>``
    for periodic families, where box averages over whole periods equal the limits.

    Raises
    ------
    ConfigurationError
        ``x`` is not a :class:`PeriodicFamily`, or the box side is not a
        multiple of the period.
    """
    if not isinstance(x, PeriodicFamily):
        raise ConfigurationError("the limsup is only finitely checkable on periodic families")
    ring = x.ring
    bounds = folner.box_bounds(N)
    for lo, hi in bounds:
        if (hi - lo + 1) % x.period:
            raise ConfigurationError(
                f"box side {hi - lo + 1} is not a multiple of the period {x.period}")
    elements = folner_set(folner, N)
    vals = np.array([x.at(g) for g in elements])
    lhs = float(np.sum(np.abs(vals.mean(axis=0)) ** 2))
    S = [ring.coerce(h) for h in S]
    shifted = np.array([[x.at(g + h) for g in elements] for h in S])  # (|S|, |Phi|, D)
    mean_over_S = shifted.mean(axis=0)
    rhs = float(np.mean(np.sum(np.abs(mean_over_S) ** 2, axis=-1)))
    return FiniteSetResult(lhs=lhs, rhs=rhs, holds=lhs <= rhs + tol,
                           exact_equality=abs(lhs - rhs) <= tol)
