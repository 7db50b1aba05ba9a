"""
Rotation systems on the torus and trigonometric-polynomial observables.

A :class:`RotationSystem` realizes a ring action ``T_r x = x + phi(r) mod 1``
on ``T^m`` where ``phi`` is linear in the coordinates of ``r``. All
rotation angles are exact rationals (irrational angles enter as long
decimal strings), so phases are reduced mod 1 exactly and only the final
``e(.)`` is floating point.
"""

from __future__ import annotations

import cmath
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .algebra import Character, ConfigurationError, Ring, e, parse_real

DEFAULT_SUPPORT_BUDGET = 200_000


class SupportBudgetError(RuntimeError):
    """A Fourier-side product would exceed the support budget; use the grid path."""


# --------------------------------------------------------------- observables


class TrigObservable:
    """
    Finite Fourier sum ``f(x) = sum_k c_k e(k . x)`` on ``T^m``.

    Coefficients are complex; frequencies are integer tuples of length ``m``.
    """

    __slots__ = ("dim", "_coeffs")

    def __init__(self, dim: int, coeffs: Mapping | None = None, tol: float = 0.0):
        if dim < 1:
            raise ValueError("torus dimension must be >= 1")
        self.dim = dim
        clean = {}
        for k, c in (coeffs or {}).items():
            k = (int(k),) if isinstance(k, (int, np.integer)) else tuple(int(x) for x in k)
            if len(k) != dim:
                raise ValueError(f"frequency {k} does not match dimension {dim}")
            c = complex(c)
            if abs(c) > tol:
                clean[k] = clean.get(k, 0j) + c
        self._coeffs = {k: c for k, c in clean.items() if abs(c) > tol}

    # constructors
    @classmethod
    def constant(cls, dim: int, c=1.0) -> TrigObservable:
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def character(cls, kappa: Sequence[int] | int, c=1.0) -> TrigObservable:
        kappa = (kappa,) if isinstance(kappa, int) else tuple(kappa)
        return cls(len(kappa), {kappa: c})

    @classmethod
    def parse(cls, text: str, dim: int | None = None) -> TrigObservable:
        return parse_observable(text, dim)

    # queries
    @property
    def coeffs(self) -> dict:
        return dict(self._coeffs)

    def items(self):
        return self._coeffs.items()

    @property
    def support(self) -> list:
        return sorted(self._coeffs)

    def __len__(self) -> int:
        return len(self._coeffs)

    def coefficient(self, kappa) -> complex:
        kappa = (kappa,) if isinstance(kappa, int) else tuple(kappa)
        return self._coeffs.get(kappa, 0j)

    def integral(self) -> complex:
        return self._coeffs.get((0,) * self.dim, 0j)

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self._coeffs.values()))

    def sup_bound(self) -> float:
        """``sum |c_k|``, an upper bound for the sup norm."""
        return sum(abs(c) for c in self._coeffs.values())

    def max_frequency(self) -> int:
        return max((max(abs(x) for x in k) for k in self._coeffs), default=0)

    def is_constant(self) -> bool:
        return all(not any(k) for k in self._coeffs)

    # algebra
    def conj(self) -> TrigObservable:
        return TrigObservable(self.dim, {tuple(-x for x in k): c.conjugate()
                                         for k, c in self._coeffs.items()})

    def scale(self, a) -> TrigObservable:
        return TrigObservable(self.dim, {k: a * c for k, c in self._coeffs.items()})

    def __add__(self, other) -> TrigObservable:
        if not isinstance(other, TrigObservable):
            other = TrigObservable.constant(self.dim, other)
        _check_dim(self, other)
        out = dict(self._coeffs)
        for k, c in other._coeffs.items():
            out[k] = out.get(k, 0j) + c
        return TrigObservable(self.dim, out)

    __radd__ = __add__

    def __neg__(self) -> TrigObservable:
        return self.scale(-1)

    def __sub__(self, other) -> TrigObservable:
        return self + (-other if isinstance(other, TrigObservable) else -complex(other))

    def __mul__(self, other) -> TrigObservable:
        if isinstance(other, TrigObservable):
            return multiply(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def distance(self, other: TrigObservable) -> float:
        """L2 distance, exact by Parseval."""
        return (self - other).l2_norm()

    def allclose(self, other: TrigObservable, tol: float = 1e-12) -> bool:
        return self.distance(other) <= tol

    def __eq__(self, other) -> bool:
        return isinstance(other, TrigObservable) and self.dim == other.dim \
            and self._coeffs == other._coeffs

    __hash__ = None

    # evaluation
    def evaluate(self, x) -> np.ndarray:
        """Values at points ``x`` of shape ``(..., dim)`` (or ``(...)`` when ``dim == 1``)."""
        x = np.asarray(x, dtype=np.float64)
        if self.dim == 1 and (x.ndim == 0 or x.shape[-1] != 1):
            x = x[..., None]
        out = np.zeros(x.shape[:-1], dtype=np.complex128)
        for k, c in sorted(self._coeffs.items()):
            out += c * np.exp(2j * math.pi * (x @ np.asarray(k, dtype=np.float64)))
        return out

    def grid_values(self, points: int) -> np.ndarray:
        """Values on the uniform grid ``(Z/points)^dim`` as an array of shape ``(points,)*dim``."""
        axes = [np.arange(points) / points] * self.dim
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        return self.evaluate(mesh)

    def to_text(self, digits: int = 12) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for k in sorted(self._coeffs):
            c = self._coeffs[k]
            cs = _format_complex(c, digits)
            freq = ",".join(map(str, k))
            parts.append(f"{cs}*e({freq})")
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"TrigObservable({self.to_text(6)!r})"


def _check_dim(f, g):
    if f.dim != g.dim:
        raise ValueError(f"torus dimensions differ: {f.dim} vs {g.dim}")


def _format_complex(c: complex, digits: int) -> str:
    re_, im = round(c.real, digits), round(c.imag, digits)
    if im == 0:
        return repr(float(re_))
    if re_ == 0:
        return f"{im!r}i"
    sign = "+" if im >= 0 else "-"
    return f"({re_!r}{sign}{abs(im)!r}i)"


def multiply(f: TrigObservable, g: TrigObservable,
             budget: int = DEFAULT_SUPPORT_BUDGET) -> TrigObservable:
    """Pointwise product (convolution of coefficient maps)."""
    _check_dim(f, g)
    if len(f) * len(g) > budget:
        raise SupportBudgetError(
            f"product of supports {len(f)}x{len(g)} exceeds budget {budget}; use the grid path")
    out: dict = {}
    for k1, c1 in f._coeffs.items():
        for k2, c2 in g._coeffs.items():
            k = tuple(a + b for a, b in zip(k1, k2))
            out[k] = out.get(k, 0j) + c1 * c2
    return TrigObservable(f.dim, out)


_TERM = re.compile(r"e\(\s*([-+]?\d+(?:\s*,\s*[-+]?\d+)*)\s*\)")


def parse_observable(text: str, dim: int | None = None) -> TrigObservable:
    """
    Parse ``"1*e(1) + 0.5*e(2)"``; frequency vectors as ``e(1,-2)`` on ``T^2``.

    Coefficients are real or complex literals (``0.5``, ``-2i``,
    ``(0.5+0.5i)``); a bare number is a constant term.
    """
    src = text.strip()
    if not src:
        raise ValueError("empty observable")
    terms = []
    depth, start = 0, 0
    for pos, ch in enumerate(src):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch in "+-" and depth == 0 and pos > start \
                and src[:pos].rstrip()[-1:] not in ("", "e", "E", "*", "(", "+", "-"):
            terms.append((start, src[start:pos]))
            start = pos
    terms.append((start, src[start:]))
    coeffs: dict = {}
    found_dim = dim
    for offset, term in terms:
        t = term.strip()
        if not t:
            continue
        m = _TERM.search(t)
        if m:
            freq = tuple(int(x) for x in m.group(1).split(","))
            coef_text = t[:m.start()].strip()
            if t[m.end():].strip():
                raise ValueError(f"trailing text after e(...) at position {offset + m.end()}: {text!r}")
            if coef_text.endswith("*"):
                coef_text = coef_text[:-1].strip()
            if coef_text in ("", "+"):
                c = 1.0
            elif coef_text == "-":
                c = -1.0
            else:
                c = _parse_complex(coef_text, text, offset)
        else:
            freq = None
            c = _parse_complex(t, text, offset)
        if freq is not None:
            if found_dim is None:
                found_dim = len(freq)
            elif len(freq) != found_dim:
                raise ValueError(f"frequency {freq} has wrong dimension at position {offset}: {text!r}")
        coeffs[freq] = coeffs.get(freq, 0j) + c
    found_dim = found_dim or 1
    if None in coeffs:
        coeffs[(0,) * found_dim] = coeffs.get((0,) * found_dim, 0j) + coeffs.pop(None)
    return TrigObservable(found_dim, coeffs)


def _parse_complex(s: str, text: str, offset: int) -> complex:
    t = s.replace(" ", "").replace("i", "j")
    if t.startswith("+"):
        t = t[1:]
    try:
        return complex(t)
    except ValueError:
        neg = t.startswith("-")
        inner = t[1:] if neg else t
        try:
            v = complex(inner)
        except ValueError:
            raise ValueError(f"bad coefficient {s!r} at position {offset}: {text!r}") from None
        return -v if neg else v


# ------------------------------------------------------------------ systems


@dataclass(frozen=True)
class RotationSystem:
    """
    ``T_r x = x + phi(r) mod 1`` on ``T^m``.

    ``phi`` is an ``m x ring.dim`` matrix of exact rationals acting on the
    coordinates :meth:`Ring.embed` of ``r``.
    """

    ring: Ring
    phi: tuple

    def __post_init__(self):
        rows = self.phi
        if rows and not isinstance(rows[0], (tuple, list)):
            rows = [rows] if self.ring.dim > 1 else [[x] for x in rows]
        rows = tuple(tuple(parse_real(x) for x in row) for row in rows)
        if not rows:
            raise ConfigurationError("rotation needs at least one torus coordinate")
        if any(len(row) != self.ring.dim for row in rows):
            raise ConfigurationError(
                f"each row of phi needs {self.ring.dim} entries for {self.ring.name}")
        object.__setattr__(self, "phi", rows)

    @classmethod
    def circle(cls, ring: Ring, *angles) -> RotationSystem:
        """One-dimensional torus; ``angles`` has one entry per ring coordinate."""
        if not angles:
            angles = (1,) * ring.dim if ring.is_field() else angles
        return cls(ring, (tuple(angles),))

    @property
    def dim(self) -> int:
        return len(self.phi)

    def rotation(self, r) -> tuple:
        """``phi(r) mod 1`` as exact fractions."""
        coords = self.ring.embed(r)
        return tuple(_frac(sum((a * x for a, x in zip(row, coords)), Fraction(0)))
                     for row in self.phi)

    def kappa_row(self, kappa: Sequence[int]) -> tuple:
        """The linear form ``kappa . phi`` on ring coordinates."""
        kappa = _as_kappa(kappa, self.dim)
        return tuple(sum((k * row[j] for k, row in zip(kappa, self.phi)), Fraction(0))
                     for j in range(self.ring.dim))

    def phase(self, r, kappa: Sequence[int]) -> Fraction:
        """``kappa . phi(r) mod 1``."""
        row = self.kappa_row(kappa)
        coords = self.ring.embed(r)
        return _frac(sum((a * x for a, x in zip(row, coords)), Fraction(0)))

    def character(self, kappa: Sequence[int]) -> Character:
        """The eigenvalue character ``r -> e(kappa . phi(r))``."""
        return Character(self.ring, self.kappa_row(kappa))

    def act(self, r, f: TrigObservable) -> TrigObservable:
        return act(self, r, f)

    def is_ergodic(self, kappa_bound: int = 20) -> bool:
        if self.ring.is_field():
            # a character of Q is trivial only when its frequency vanishes
            return not any(all(x == 0 for x in self.kappa_row(k))
                           for k in _kappa_box(self.dim, kappa_bound))
        ok, _ = _relation_search(self, [self.ring.one], kappa_bound, 1)
        return ok

    def describe(self) -> dict:
        return {"ring": self.ring.name,
                "phi": [[str(x) for x in row] for row in self.phi]}


def _frac(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _as_kappa(kappa, dim) -> tuple:
    kappa = (kappa,) if isinstance(kappa, (int, np.integer)) else tuple(int(k) for k in kappa)
    if len(kappa) != dim:
        raise ValueError(f"frequency {kappa} does not match torus dimension {dim}")
    return kappa


def act(sys: RotationSystem, r, f: TrigObservable) -> TrigObservable:
    """``f o T_r``: each coefficient picks up ``e(kappa . phi(r))``."""
    if f.dim != sys.dim:
        raise ValueError(f"observable lives on T^{f.dim}, system on T^{sys.dim}")
    rot = sys.rotation(r)
    out = {}
    for k, c in f.items():
        ph = _frac(sum((a * b for a, b in zip(k, rot)), Fraction(0)))
        out[k] = c * e(ph)
    return TrigObservable(f.dim, out)


def spectrum_eigenfunction(sys: RotationSystem, kappa, probes: Iterable | None = None,
                           tol: float = 1e-12):
    """
    Eigenfunction ``e(kappa . x)`` and its eigenvalue character.

    The relation ``act(r, f) = chi(r) f`` is verified on ``probes``
    (default: a few small ring elements).
    """
    kappa = _as_kappa(kappa, sys.dim)
    f = TrigObservable.character(kappa)
    chi = sys.character(kappa)
    probes = list(probes) if probes is not None else sys.ring.nonzero_elements(8)
    for r in probes:
        if act(sys, r, f).distance(f.scale(chi(r))) > tol:
            raise AssertionError(f"eigen-relation fails at r={r}")
    return f, chi


def _kappa_box(dim: int, bound: int):
    """Nonzero integer vectors ordered by max-norm, then lexicographically."""
    for radius in range(1, bound + 1):
        shell = [k for k in itertools.product(range(-radius, radius + 1), repeat=dim)
                 if max(abs(x) for x in k) == radius]
        shell.sort(key=lambda k: [(abs(x), x < 0) for x in k])
        yield from shell


def _relation_search(sys, generators_of_ideals, kappa_bound, _unused):
    """Find ``kappa != 0`` and an ideal generator ``b`` with ``kappa . phi(J) in Z``."""
    ring = sys.ring
    for kappa in _kappa_box(sys.dim, kappa_bound):
        row = sys.kappa_row(kappa)
        for b in generators_of_ideals:
            gens = [b * g for g in ring.additive_generators()]
            if all(_frac(sum((a * x for a, x in zip(row, ring.embed(ring.coerce(g)))),
                             Fraction(0))) == 0 for g in gens):
                return False, {"kappa": kappa, "ideal": b}
    return True, None


def check_total_ergodicity(sys: RotationSystem, index_bound: int = 10, kappa_bound: int = 10):
    """
    Look for a finite-index ideal ``J`` on which the action is not ergodic.

    For good rings, principal ideals ``(b)`` of index at most ``index_bound``
    are scanned against frequencies ``kappa`` with ``|kappa|_inf <= kappa_bound``;
    ``(False, witness)`` reports the first ``kappa . phi`` trivial on ``J``.
    A field has no proper finite-index subgroups, so only ergodicity is
    checked there (``kappa . phi = 0``).
    """
    ring = sys.ring
    if ring.is_field():
        for kappa in _kappa_box(sys.dim, kappa_bound):
            if all(x == 0 for x in sys.kappa_row(kappa)):
                return False, {"kappa": kappa, "ideal": ring.one}
        return True, None
    from .algebra import Ideal

    gens = []
    seen = set()
    for b in ring.nonzero_elements(10 * index_bound * index_bound + 10):
        idx = Ideal(ring, b).index()
        if idx > index_bound:
            continue
        b = _canonical_associate(ring, b)
        if b in seen:
            continue
        seen.add(b)
        gens.append((idx, b))
    gens.sort(key=lambda t: t[0])
    return _relation_search(sys, [b for _, b in gens], kappa_bound, None)


def _canonical_associate(ring, b):
    """The associate of ``b`` with positive real part and non-negative imaginary part."""
    from .algebra import Gaussian, RingKind

    if ring.kind is RingKind.INTEGERS:
        return abs(b)
    z = Gaussian(b) if not isinstance(b, Gaussian) else b
    for u in (Gaussian(1, 0), Gaussian(0, 1), Gaussian(-1, 0), Gaussian(0, -1)):
        w = u * z
        if w.real > 0 and w.imag >= 0:
            return w
    return z


def parse_rotation(ring: Ring, spec) -> RotationSystem:
    """
    Build a rotation from a config value: a list of angle rows, or a single
    string like ``"0.4142..."`` / ``"0.41, 0.73"`` for a one-dimensional torus.
    """
    if isinstance(spec, str):
        parts = [p.strip() for p in spec.split(";")]
        rows = [tuple(x.strip() for x in p.split(",")) for p in parts]
    else:
        rows = [tuple(r) if isinstance(r, (list, tuple)) else (r,) for r in spec]
    return RotationSystem(ring, tuple(rows))


def unit_phase(c: complex) -> float:
    return cmath.phase(c) / (2 * math.pi)
