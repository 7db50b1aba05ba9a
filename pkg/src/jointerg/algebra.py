"""
Exact arithmetic for the integers, the Gaussian integers and the rationals.

Elements are plain Python values: ``int`` for Z, :class:`Gaussian` for Z[i]
and :class:`fractions.Fraction` for Q. A :class:`Ring` knows how to coerce,
embed and enumerate them; Følner sets, characters and principal ideals are
built on top.
"""

from __future__ import annotations

import cmath
import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence, Union

import numpy as np


class ConfigurationError(ValueError):
    """Unsupported combination of ring, Følner family or parameters."""


class BudgetError(ConfigurationError):
    """An enumeration would exceed its configured size budget."""


class Gaussian:
    """
    Element ``a + b*i`` with rational (usually integral) parts.

    Instances are immutable and hashable; parts are stored as ``int`` when
    integral so that Gaussian integers hash and print like integers.
    """

    __slots__ = ("_re", "_im")

    def __init__(self, re=0, im=0):
        self._re = _normalize(re)
        self._im = _normalize(im)

    @property
    def real(self):
        return self._re

    @property
    def imag(self):
        return self._im

    @property
    def is_integral(self) -> bool:
        return isinstance(self._re, int) and isinstance(self._im, int)

    def conjugate(self) -> Gaussian:
        return Gaussian(self._re, -self._im)

    def norm(self):
        return self._re * self._re + self._im * self._im

    def __repr__(self) -> str:
        return f"Gaussian({self._re!r}, {self._im!r})"

    def __str__(self) -> str:
        return format_gaussian(self)

    def __eq__(self, other) -> bool:
        other = _as_gaussian(other)
        if other is NotImplemented:
            return False
        return self._re == other._re and self._im == other._im

    def __hash__(self) -> int:
        if self._im == 0:
            return hash(self._re)
        return hash((self._re, self._im))

    def __bool__(self) -> bool:
        return bool(self._re) or bool(self._im)

    def __neg__(self) -> Gaussian:
        return Gaussian(-self._re, -self._im)

    def __pos__(self) -> Gaussian:
        return self

    def __add__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        return Gaussian(self._re + other._re, self._im + other._im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        return Gaussian(self._re - other._re, self._im - other._im)

    def __rsub__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        a, b, c, d = self._re, self._im, other._re, other._im
        return Gaussian(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        n = other.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian")
        num = self * other.conjugate()
        return Gaussian(Fraction(num._re) / n, Fraction(num._im) / n)

    def __rtruediv__(self, other):
        other = _as_gaussian(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int) -> Gaussian:
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result = Gaussian(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __complex__(self) -> complex:
        return complex(float(self._re), float(self._im))


def _normalize(x):
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _normalize(Fraction(x))
    raise TypeError(f"Gaussian parts must be rational, got {type(x).__name__}")


def _as_gaussian(x):
    if isinstance(x, Gaussian):
        return x
    if isinstance(x, (int, Fraction)):
        return Gaussian(x, 0)
    return NotImplemented


I = Gaussian(0, 1)


def format_gaussian(z: Gaussian) -> str:
    re, im = z.real, z.imag
    if im == 0:
        return str(re)
    imag = "i" if im == 1 else "-i" if im == -1 else f"{im}i"
    if re == 0:
        return imag
    sign = "-" if im < 0 else "+"
    mag = "i" if abs(im) == 1 else f"{abs(im)}i"
    return f"{re}{sign}{mag}"


RingElement = Union[int, Fraction, Gaussian]


class RingKind(enum.Enum):
    INTEGERS = "integers"
    GAUSSIAN_INTEGERS = "gaussian_integers"
    RATIONALS = "rationals"


_RING_ALIASES = {
    "z": RingKind.INTEGERS,
    "integers": RingKind.INTEGERS,
    "zi": RingKind.GAUSSIAN_INTEGERS,
    "z[i]": RingKind.GAUSSIAN_INTEGERS,
    "gaussian": RingKind.GAUSSIAN_INTEGERS,
    "gaussian_integers": RingKind.GAUSSIAN_INTEGERS,
    "q": RingKind.RATIONALS,
    "rationals": RingKind.RATIONALS,
}


@dataclass(frozen=True)
class Ring:
    """One of the three supported countable rings of characteristic zero."""

    kind: RingKind

    @classmethod
    def from_name(cls, name: str) -> Ring:
        try:
            return cls(_RING_ALIASES[name.strip().lower()])
        except KeyError:
            known = ", ".join(sorted(_RING_ALIASES))
            raise ConfigurationError(f"unknown ring {name!r}; known: {known}") from None

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def symbol(self) -> str:
        return {RingKind.INTEGERS: "Z", RingKind.GAUSSIAN_INTEGERS: "Z[i]",
                RingKind.RATIONALS: "Q"}[self.kind]

    @property
    def dim(self) -> int:
        """Rank used for box Følner sets and for the real embedding."""
        return 2 if self.kind is RingKind.GAUSSIAN_INTEGERS else 1

    def is_field(self) -> bool:
        return self.kind is RingKind.RATIONALS

    def is_good(self) -> bool:
        # every nonzero ideal of Z and Z[i] has finite index
        return not self.is_field()

    characteristic = 0

    @property
    def zero(self) -> RingElement:
        return self.coerce(0)

    @property
    def one(self) -> RingElement:
        return self.coerce(1)

    def coerce(self, x) -> RingElement:
        """Convert ``x`` to the canonical representation, rejecting non-members."""
        if self.kind is RingKind.INTEGERS:
            if isinstance(x, Gaussian):
                if x.imag != 0:
                    raise ValueError(f"{x} is not an integer")
                x = x.real
            if isinstance(x, Fraction):
                if x.denominator != 1:
                    raise ValueError(f"{x} is not an integer")
                return x.numerator
            if isinstance(x, int):
                return int(x)
            raise TypeError(f"cannot coerce {x!r} into Z")
        if self.kind is RingKind.GAUSSIAN_INTEGERS:
            z = x if isinstance(x, Gaussian) else Gaussian(_normalize(x))
            if not z.is_integral:
                raise ValueError(f"{z} is not a Gaussian integer")
            return z
        if isinstance(x, Gaussian):
            if x.imag != 0:
                raise ValueError(f"{x} is not rational")
            x = x.real
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        raise TypeError(f"cannot coerce {x!r} into Q")

    def contains(self, x) -> bool:
        try:
            self.coerce(x)
        except (TypeError, ValueError):
            return False
        return True

    def embed(self, x) -> tuple:
        """Real coordinates of ``x`` as exact rationals (length ``dim``)."""
        x = self.coerce(x)
        if self.kind is RingKind.GAUSSIAN_INTEGERS:
            return (x.real, x.imag)
        return (x,)

    def from_coords(self, coords: Sequence) -> RingElement:
        if self.kind is RingKind.GAUSSIAN_INTEGERS:
            return Gaussian(coords[0], coords[1])
        return self.coerce(coords[0])

    def additive_generators(self) -> tuple:
        """Generators of (R,+) as a module over Z (topological for Q)."""
        if self.kind is RingKind.GAUSSIAN_INTEGERS:
            return (Gaussian(1), I)
        return (self.one,)

    def format(self, x) -> str:
        if isinstance(x, Gaussian):
            return format_gaussian(x)
        return str(x)

    def nonzero_elements(self, count: int) -> list:
        """The first ``count`` nonzero elements in a fixed enumeration."""
        out = []
        if self.kind is RingKind.GAUSSIAN_INTEGERS:
            radius = 1
            seen = set()
            while len(out) < count:
                ring = sorted(
                    (Gaussian(a, b) for a in range(-radius, radius + 1)
                     for b in range(-radius, radius + 1)
                     if (a, b) != (0, 0) and (a, b) not in seen),
                    key=lambda z: (z.norm(), z.real, z.imag))
                for z in ring:
                    seen.add((z.real, z.imag))
                out.extend(ring)
                radius += 1
            return out[:count]
        for k in itertools.count(1):
            out.extend([self.coerce(k), self.coerce(-k)])
            if len(out) >= count:
                return out[:count]
        return out

    def __str__(self) -> str:
        return self.symbol


INTEGERS = Ring(RingKind.INTEGERS)
GAUSSIAN_INTEGERS = Ring(RingKind.GAUSSIAN_INTEGERS)
RATIONALS = Ring(RingKind.RATIONALS)


def parse_real(text) -> Fraction:
    """Exact rational from a decimal or fraction literal ("0.4142...", "1/3")."""
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        return Fraction(text)
    return Fraction(str(text).strip())


def frac_part(x: Fraction) -> Fraction:
    return x - math.floor(x)


def e(x) -> complex:
    """``exp(2*pi*i*x)``; rationals are reduced mod 1 before rounding to float."""
    if isinstance(x, Fraction):
        x = frac_part(x)
        return cmath.exp(2j * math.pi * (x.numerator / x.denominator))
    return cmath.exp(2j * math.pi * x)


# --------------------------------------------------------------------- Følner


class FolnerFamily(enum.Enum):
    CENTERED_BOX = "centered_box"
    SHIFTED_BOX = "shifted_box"
    RATIONAL_LADDER = "rational_ladder"


@dataclass(frozen=True)
class FolnerSequence:
    """
    A concrete Følner sequence ``N -> Phi_N``.

    ``centered_box``
        ``{-N..N}`` on Z, ``{a+bi : |a|,|b| <= N}`` on Z[i].
    ``shifted_box``
        the centered box translated by ``N * offset``.
    ``rational_ladder``
        ``{k/N! : |k| <= N*N!}`` on Q.

    With ``half_open=True`` the right endpoint of every coordinate range is
    dropped (``{-N..N-1}`` for boxes). A half-open ladder is exactly ``2N``
    periods of every character ``r -> e(m r)`` whose denominator divides
    ``N!``, and a half-open box has even side length.
    """

    ring: Ring
    family: FolnerFamily = FolnerFamily.CENTERED_BOX
    offset: RingElement | None = None
    half_open: bool = False
    max_size: int = 200_000

    def __post_init__(self):
        fam = self.family
        if isinstance(fam, str):
            try:
                fam = FolnerFamily(fam)
            except ValueError:
                raise ConfigurationError(f"unknown Følner family {fam!r}") from None
            object.__setattr__(self, "family", fam)
        if fam is FolnerFamily.RATIONAL_LADDER and not self.ring.is_field():
            raise ConfigurationError("rational_ladder requires the rationals")
        if fam in (FolnerFamily.CENTERED_BOX, FolnerFamily.SHIFTED_BOX) and self.ring.is_field():
            raise ConfigurationError(
                f"{fam.value} is not a Følner sequence in Q; use rational_ladder")
        if fam is FolnerFamily.SHIFTED_BOX:
            if self.offset is None:
                raise ConfigurationError("shifted_box needs an offset")
            object.__setattr__(self, "offset", self.ring.coerce(self.offset))

    def size(self, N: int) -> int:
        if N < 1:
            raise ValueError("N must be >= 1")
        if self.family is FolnerFamily.RATIONAL_LADDER:
            return 2 * N * math.factorial(N) + (0 if self.half_open else 1)
        side = 2 * N if self.half_open else 2 * N + 1
        return side ** self.ring.dim

    def box_bounds(self, N: int) -> tuple:
        """Inclusive ``(lo, hi)`` per coordinate for box families."""
        if self.family is FolnerFamily.RATIONAL_LADDER:
            raise ConfigurationError("rational_ladder is not a box")
        hi = N - 1 if self.half_open else N
        shift = self.ring.embed(self.offset * N) if self.family is FolnerFamily.SHIFTED_BOX \
            else (0,) * self.ring.dim
        return tuple((-N + int(c), hi + int(c)) for c in shift)

    def elements(self, N: int) -> list:
        size = self.size(N)
        if size > self.max_size:
            raise BudgetError(
                f"Phi_{N} has {size} elements, above the budget of {self.max_size}")
        fam = self.family
        if fam is FolnerFamily.RATIONAL_LADDER:
            q = math.factorial(N)
            stop = N * q if self.half_open else N * q + 1
            return [Fraction(k, q) for k in range(-N * q, stop)]
        stop = N if self.half_open else N + 1
        if self.ring.kind is RingKind.GAUSSIAN_INTEGERS:
            box = [Gaussian(a, b) for a in range(-N, stop) for b in range(-N, stop)]
        else:
            box = list(range(-N, stop))
        if fam is FolnerFamily.SHIFTED_BOX:
            shift = self.offset * N
            box = [x + shift for x in box]
        return box

    def describe(self) -> str:
        extra = ""
        if self.family is FolnerFamily.SHIFTED_BOX:
            extra = f"(offset={self.ring.format(self.offset)})"
        if self.half_open:
            extra += "(half-open)"
        return f"{self.family.value}{extra} on {self.ring}"


def folner_set(seq: FolnerSequence, N: int) -> list:
    return seq.elements(N)


def folner_defect(seq: FolnerSequence, N: int, g) -> Fraction:
    """``|Phi_N symmetric-difference (g + Phi_N)| / |Phi_N|`` computed exactly."""
    g = seq.ring.coerce(g)
    phi = set(seq.elements(N))
    shifted = {x + g for x in phi}
    return Fraction(len(phi ^ shifted), len(phi))


# ------------------------------------------------------------------ characters


@dataclass(frozen=True)
class Character:
    """
    Additive character ``r -> e(<frequency, embed(r)>)``.

    Frequencies are exact rationals; irrational frequencies are entered as
    long decimal literals so that every phase is computed exactly mod 1.
    """

    ring: Ring
    frequency: tuple

    def __post_init__(self):
        freq = tuple(parse_real(f) for f in self.frequency)
        if len(freq) != self.ring.dim:
            raise ConfigurationError(
                f"{self.ring} characters need {self.ring.dim} frequencies, got {len(freq)}")
        object.__setattr__(self, "frequency", freq)

    def phase(self, r) -> Fraction:
        coords = self.ring.embed(r)
        return frac_part(sum((f * c for f, c in zip(self.frequency, coords)), Fraction(0)))

    def __call__(self, r) -> complex:
        return e(self.phase(r))

    def is_trivial(self) -> bool:
        if self.ring.is_field():
            return all(f == 0 for f in self.frequency)
        return all(self.phase(g) == 0 for g in self.ring.additive_generators())

    def scaled(self, b) -> Character:
        """The character ``r -> chi(b r)``."""
        b = self.ring.coerce(b)
        if self.ring.kind is RingKind.GAUSSIAN_INTEGERS:
            # chi(b r) = e(<f, embed(b r)>) with b r = (x u - y v) + (x v + y u) i
            x, y = b.real, b.imag
            f1, f2 = self.frequency
            return Character(self.ring, (f1 * x + f2 * y, -f1 * y + f2 * x))
        return Character(self.ring, (self.frequency[0] * b,))


def char_is_irrational(chi: Character, probe_budget: int = 1000,
                       probe_points: int = 100, tol: float = 1e-9):
    """
    Budgeted search for ``b != 0`` with ``chi(b n) == 1`` for all probed ``n``.

    Returns ``(True, None)`` when no such ``b`` was found among the first
    ``probe_budget`` multipliers, else ``(False, b)``.
    """
    ring = chi.ring
    if not ring.is_good():
        raise ConfigurationError("irrationality of characters is defined for good rings")
    gens = ring.additive_generators()
    positives = (ring.coerce(k) for k in range(1, probe_budget + 1))
    candidates = list(positives if ring.kind is RingKind.INTEGERS
                      else ring.nonzero_elements(probe_budget))
    # probes are k * g for generators g: chi(b k g) = e(k theta) with theta = phase(b g) exact
    theta = np.array([[float(chi.phase(b * g)) for g in gens] for b in candidates])
    ks = np.arange(1, probe_points + 1, dtype=np.float64)
    dev = np.abs(np.exp(2j * np.pi * theta[:, :, None] * ks) - 1).max(axis=(1, 2))
    hits = np.nonzero(dev < tol)[0]
    if hits.size:
        return False, candidates[int(hits[0])]
    return True, None


# --------------------------------------------------------------------- ideals


@dataclass(frozen=True)
class Ideal:
    """Principal ideal ``(generator)`` of Z or Z[i]."""

    ring: Ring
    generator: RingElement
    _basis: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.ring.is_good():
            raise ConfigurationError("field has no proper finite-index ideals")
        gen = self.ring.coerce(self.generator)
        object.__setattr__(self, "generator", gen)
        object.__setattr__(self, "_basis", _lattice_basis(self.ring, gen))

    @property
    def is_zero(self) -> bool:
        return not self.generator

    def index(self):
        """``[R : J]`` as an int, or ``math.inf`` for the zero ideal."""
        if self.is_zero:
            return math.inf
        if self.ring.kind is RingKind.GAUSSIAN_INTEGERS:
            return self.generator.norm()
        return abs(self.generator)

    def contains(self, x) -> bool:
        return self.residue(x) == self.ring.zero

    def residue(self, x):
        """Canonical representative of ``x + J``."""
        if self.is_zero:
            raise ValueError("zero ideal has no finite coset decomposition")
        x = self.ring.coerce(x)
        if self.ring.kind is RingKind.INTEGERS:
            return x % abs(self.generator)
        p, q, r = self._basis
        re, im = x.real, x.imag
        t = im // r
        re, im = re - t * q, im - t * r
        return Gaussian(re % p, im)

    def coset_representatives(self) -> list:
        if self.is_zero:
            raise ValueError("zero ideal has infinitely many cosets")
        if self.ring.kind is RingKind.INTEGERS:
            return list(range(abs(self.generator)))
        p, _, r = self._basis
        return [Gaussian(a, b) for b in range(r) for a in range(p)]

    def __str__(self) -> str:
        return f"({self.ring.format(self.generator)})"


def _lattice_basis(ring: Ring, gen):
    """
    Hermite basis ``{(p, 0), (q, r)}`` of ``gen * Z[i]`` viewed in Z^2, so the
    residues ``a + b i`` with ``0 <= a < p`` and ``0 <= b < r`` are canonical.
    """
    if ring.kind is not RingKind.GAUSSIAN_INTEGERS or not gen:
        return ()
    a, b = gen.real, gen.imag
    # gen * (u + v i) = (a u - b v) + (a v + b u) i
    r, s, t = _ext_gcd(b, a)  # s*b + t*a = r, so (u, v) = (s, t)
    if r < 0:
        r, s, t = -r, -s, -t
    p = gen.norm() // r
    q = (a * s - b * t) % p
    return (p, q, r)


def _ext_gcd(x: int, y: int):
    old_r, r = x, y
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        quo = old_r // r
        old_r, r = r, old_r - quo * r
        old_s, s = s, old_s - quo * s
        old_t, t = t, old_t - quo * t
    return old_r, old_s, old_t


def ideal_index(J: Ideal):
    return J.index()


def coset_decompose(elements: Iterable, J: Ideal) -> dict:
    """Partition ``elements`` by residue mod ``J`` (insertion order kept)."""
    if J.is_zero:
        raise ValueError("cannot decompose along the zero ideal")
    parts: dict = {}
    for x in elements:
        parts.setdefault(J.residue(x), []).append(x)
    return parts


def ideal_generated_by(ring: Ring, elements: Iterable) -> Ideal:
    """Principal generator of the ideal spanned by ``elements`` (Z and Z[i] are PIDs)."""
    g = ring.zero
    for x in elements:
        g = ring_gcd(ring, g, ring.coerce(x))
    return Ideal(ring, g)


def ring_gcd(ring: Ring, x, y):
    if ring.kind is RingKind.INTEGERS:
        return math.gcd(x, y)
    if ring.kind is RingKind.GAUSSIAN_INTEGERS:
        while y:
            q = x / y
            q = Gaussian(round(q.real), round(q.imag))
            x, y = y, x - q * y
        return x
    raise ConfigurationError("gcd of ideals is only defined for good rings")
