"""
Multivariate polynomials with exact coefficients over Z, Z[i] or Q.

Terms are stored as ``{exponent tuple: coefficient}`` with no zero
coefficients. Coefficients may temporarily live in the fraction field
(Q or Q(i)); :meth:`RingPolynomial.in_ring` checks integrality.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .algebra import Gaussian, Ring, RingKind, format_gaussian

NEG_INF = -math.inf  # degree of the zero polynomial


def _clean(c):
    if isinstance(c, Gaussian) and c.imag == 0:
        return c.real
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


class RingPolynomial:
    """Immutable polynomial in ``nvars`` variables."""

    __slots__ = ("ring", "nvars", "_terms", "_hash")

    def __init__(self, ring: Ring, nvars: int, terms: Mapping | None = None):
        if nvars < 1:
            raise ValueError("nvars must be >= 1")
        self.ring = ring
        self.nvars = nvars
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(exp)
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} has wrong arity for {nvars} variables")
            if c:
                clean[exp] = _clean(c)
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def constant(cls, ring: Ring, nvars: int, c) -> RingPolynomial:
        return cls(ring, nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, ring: Ring, nvars: int, j: int) -> RingPolynomial:
        exp = [0] * nvars
        exp[j] = 1
        return cls(ring, nvars, {tuple(exp): 1})

    @classmethod
    def monomial(cls, ring: Ring, exp: Sequence[int], c=1) -> RingPolynomial:
        return cls(ring, len(exp), {tuple(exp): c})

    @classmethod
    def _raw(cls, ring, nvars, terms):
        p = cls.__new__(cls)
        p.ring, p.nvars, p._terms, p._hash = ring, nvars, terms, None
        return p

    # -- basic queries ------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def coefficient(self, exp) -> object:
        return self._terms.get(tuple(exp), 0)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(e) for e in self._terms)

    def degree_in(self, variables: Sequence[int]):
        """Total degree in the given subset of variables."""
        if not self._terms:
            return NEG_INF
        return max(sum(exp[j] for j in variables) for exp in self._terms)

    def is_constant(self) -> bool:
        return self.degree <= 0

    @property
    def constant_term(self):
        return self._terms.get((0,) * self.nvars, 0)

    def in_ring(self) -> bool:
        return all(self.ring.contains(c) for c in self._terms.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, RingPolynomial):
            return self.nvars == other.nvars and self._terms == other._terms
        if not self._terms:
            return other == 0
        return self.is_constant() and self.constant_term == other

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> RingPolynomial:
        if isinstance(other, RingPolynomial):
            if other.nvars != self.nvars:
                raise ValueError("polynomials have different numbers of variables")
            return other
        return RingPolynomial.constant(self.ring, self.nvars, other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for exp, c in other._terms.items():
            s = out.get(exp, 0) + c
            if s:
                out[exp] = _clean(s)
            else:
                out.pop(exp, None)
        return RingPolynomial._raw(self.ring, self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return RingPolynomial._raw(self.ring, self.nvars,
                                   {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RingPolynomial):
            if not other:
                return RingPolynomial._raw(self.ring, self.nvars, {})
            return RingPolynomial._raw(self.ring, self.nvars,
                                       {e: _clean(c * other) for e, c in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                exp = tuple(a + b for a, b in zip(e1, e2))
                out[exp] = out.get(exp, 0) + c1 * c2
        return RingPolynomial(self.ring, self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = RingPolynomial.constant(self.ring, self.nvars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def divide_exact(self, c) -> RingPolynomial:
        """Divide every coefficient by the ring element ``c``; result must stay in the ring."""
        def div(v):
            if isinstance(c, Gaussian) or isinstance(v, Gaussian):
                v = v if isinstance(v, Gaussian) else Gaussian(v, 0)
                return _clean(v / c)
            return _clean(Fraction(v) / c)

        out = RingPolynomial(self.ring, self.nvars, {e: div(v) for e, v in self._terms.items()})
        if not out.in_ring():
            raise ArithmeticError(f"{self} is not divisible by {c} in {self.ring}")
        return out

    # -- evaluation and substitution ---------------------------------------
    def evaluate(self, point: Sequence):
        if not isinstance(point, (list, tuple)):
            point = (point,)  # scalar argument for one-variable polynomials
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} values, got {len(point)}")
        total = 0
        for exp, c in self._terms.items():
            term = c
            for x, k in zip(point, exp):
                if k:
                    term = term * x ** k
            total = total + term
        return _clean(total)

    __call__ = evaluate

    def substitute(self, images: Sequence[RingPolynomial]) -> RingPolynomial:
        """Compose: variable ``j`` is replaced by ``images[j]`` (all in one variable space)."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        nv = images[0].nvars
        ring = self.ring
        affine = _affine_images(images)
        if affine is not None:
            return self._substitute_affine(affine, nv)
        cache: dict = {}

        def power(j, k):
            key = (j, k)
            if key not in cache:
                cache[key] = images[j] ** k
            return cache[key]

        total = RingPolynomial(ring, nv)
        for exp, c in self._terms.items():
            term = RingPolynomial.constant(ring, nv, c)
            for j, k in enumerate(exp):
                if k:
                    term = term * power(j, k)
            total = total + term
        return total

    def _substitute_affine(self, affine, nv) -> RingPolynomial:
        # binomial expansion of prod_j (x_{v_j} + c_j)^{k_j}, avoiding polynomial powers
        expansions: dict = {}
        out: dict = {}
        for exp, c in self._terms.items():
            factors = []
            for j, k in enumerate(exp):
                if not k:
                    continue
                key = (j, k)
                if key not in expansions:
                    var, const = affine[j]
                    expansions[key] = [(var, i, math.comb(k, i) * const ** (k - i))
                                       for i in range(k + 1) if const or i == k]
                factors.append(expansions[key])
            for combo in itertools.product(*factors):
                new = [0] * nv
                coef = c
                for var, i, w in combo:
                    new[var] += i
                    coef = coef * w
                key = tuple(new)
                out[key] = out.get(key, 0) + coef
        return RingPolynomial(self.ring, nv, out)

    def shift(self, offsets: Sequence) -> RingPolynomial:
        """``p(x + offsets)`` for constant ring-element offsets."""
        nv = self.nvars
        images = [RingPolynomial.variable(self.ring, nv, j) + offsets[j] for j in range(nv)]
        return self.substitute(images)

    def extend(self, nvars: int, positions: Sequence[int] | None = None) -> RingPolynomial:
        """Re-embed into ``nvars`` variables; old variable ``j`` becomes ``positions[j]``."""
        positions = list(range(self.nvars)) if positions is None else list(positions)
        out = {}
        for exp, c in self._terms.items():
            new = [0] * nvars
            for j, k in zip(positions, exp):
                new[j] += k
            out[tuple(new)] = c
        return RingPolynomial._raw(self.ring, nvars, out)

    def split(self, active: Sequence[int]) -> dict:
        """
        Group terms by their exponent in the ``active`` variables.

        Returns ``{active exponent: polynomial in the remaining variables}``
        where the coefficient polynomials keep the full variable space.
        """
        active = list(active)
        act = set(active)
        out: dict = {}
        for exp, c in self._terms.items():
            key = tuple(exp[j] for j in active)
            rest = tuple(0 if j in act else k for j, k in enumerate(exp))
            out.setdefault(key, {})[rest] = c
        return {k: RingPolynomial._raw(self.ring, self.nvars, v) for k, v in out.items()}

    def homogeneous_part(self, degree: int, active: Sequence[int] | None = None) -> RingPolynomial:
        active = range(self.nvars) if active is None else active
        return RingPolynomial._raw(
            self.ring, self.nvars,
            {e: c for e, c in self._terms.items() if sum(e[j] for j in active) == degree})

    def drop_constant(self, active: Sequence[int] | None = None) -> RingPolynomial:
        """Remove all terms of degree 0 in the ``active`` variables."""
        active = range(self.nvars) if active is None else active
        return RingPolynomial._raw(
            self.ring, self.nvars,
            {e: c for e, c in self._terms.items() if sum(e[j] for j in active) > 0})

    # -- display ------------------------------------------------------------
    def to_text(self, names: Sequence[str] | None = None) -> str:
        names = list(names) if names is not None else default_names(self.nvars)
        if not self._terms:
            return "0"
        parts = []
        for exp in sorted(self._terms, key=lambda e: (-sum(e), tuple(-k for k in e))):
            c = self._terms[exp]
            mono = "*".join(names[j] if k == 1 else f"{names[j]}^{k}"
                            for j, k in enumerate(exp) if k)
            parts.append(_format_term(c, mono))
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"RingPolynomial({self.ring.symbol}, {self.to_text()!r})"


def _format_term(c, mono: str) -> str:
    if isinstance(c, Gaussian):
        cs = format_gaussian(c)
        if not mono:
            return cs
        if c.real != 0 and c.imag != 0:
            return f"({cs})*{mono}"
        if cs == "i" or cs == "-i":
            return f"{cs}*{mono}"
        return f"{cs}*{mono}"
    if not mono:
        return str(c)
    if c == 1:
        return mono
    if c == -1:
        return "-" + mono
    if isinstance(c, Fraction):
        return f"({c})*{mono}" if c > 0 else f"-({-c})*{mono}"
    return f"{c}*{mono}"


def default_names(nvars: int) -> list:
    return ["n"] if nvars == 1 else [f"g{j + 1}" for j in range(nvars)]


# ---------------------------------------------------------------------- parse


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, text: str, position: int):
        super().__init__(f"{message} at position {position}: {text!r}")
        self.text = text
        self.position = position


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9']*)|(\*\*|[-+*/^()]))")


def parse_polynomial(text: str, ring: Ring, names: Sequence[str] | None = None,
                     nvars: int | None = None) -> RingPolynomial:
    """
    Parse ``"3*n^2 + (1+i)*n"``-style text.

    Variables are ``n`` for one variable or ``g1..gd``; pass ``names`` to
    use another alphabet. ``i`` is the imaginary unit and is only accepted
    over Z[i]. Division is allowed by constants only.
    """
    if names is None:
        nvars = nvars or _infer_nvars(text)
        names = default_names(nvars)
    names = list(names)
    return _Parser(text, ring, names).parse()


def _infer_nvars(text: str) -> int:
    idx = [int(m) for m in re.findall(r"\bg(\d+)\b", text)]
    return max(idx) if idx else 1


class _Parser:
    def __init__(self, text, ring, names):
        self.text, self.ring, self.names = text, ring, names
        self.tokens = []
        pos = 0
        stripped = text.rstrip()
        while pos < len(stripped):
            m = _TOKEN.match(stripped, pos)
            if not m or m.end() == pos:
                raise PolynomialSyntaxError("unexpected character", text, pos)
            start = m.start(m.lastindex)
            self.tokens.append((m.group(m.lastindex), start, m.lastindex))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, len(self.text), 0)

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def parse(self) -> RingPolynomial:
        if not self.tokens:
            raise PolynomialSyntaxError("empty polynomial", self.text, 0)
        p = self.expr()
        tok, pos, _ = self.peek()
        if tok is not None:
            raise PolynomialSyntaxError(f"unexpected {tok!r}", self.text, pos)
        if not p.in_ring():
            raise PolynomialSyntaxError(f"coefficients not in {self.ring}", self.text, 0)
        return p

    def expr(self):
        tok, _, _ = self.peek()
        sign = 1
        if tok in ("+", "-"):
            self.take()
            sign = -1 if tok == "-" else 1
        p = self.term() * sign
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def term(self):
        p = self.factor()
        while True:
            tok, pos, _ = self.peek()
            if tok == "*":
                self.take()
                p = p * self.factor()
            elif tok == "/":
                self.take()
                q = self.factor()
                if not q.is_constant() or q.is_zero():
                    raise PolynomialSyntaxError("division by a non-constant or zero", self.text, pos)
                c = q.constant_term
                p = p * (1 / Fraction(c) if not isinstance(c, Gaussian) else Gaussian(1) / c)
            elif tok is not None and (tok == "(" or self.peek()[2] == 2):
                # implicit multiplication: "2n", "3(n+1)", "2i"
                p = p * self.factor()
            else:
                return p

    def factor(self):
        base = self.atom()
        tok, pos, _ = self.peek()
        if tok in ("^", "**"):
            self.take()
            etok, epos, kind = self.take()
            if kind != 1:
                raise PolynomialSyntaxError("exponent must be a non-negative integer", self.text, epos)
            return base ** int(etok)
        return base

    def atom(self):
        tok, pos, kind = self.take()
        nv = len(self.names)
        if tok is None:
            raise PolynomialSyntaxError("unexpected end of input", self.text, pos)
        if kind == 1:
            return RingPolynomial.constant(self.ring, nv, int(tok))
        if kind == 2:
            if tok in self.names:
                return RingPolynomial.variable(self.ring, nv, self.names.index(tok))
            if tok == "i":
                if self.ring.kind is not RingKind.GAUSSIAN_INTEGERS:
                    raise PolynomialSyntaxError(f"'i' is not an element of {self.ring}", self.text, pos)
                return RingPolynomial.constant(self.ring, nv, Gaussian(0, 1))
            raise PolynomialSyntaxError(f"unknown variable {tok!r}", self.text, pos)
        if tok == "(":
            p = self.expr()
            close, cpos, _ = self.take()
            if close != ")":
                raise PolynomialSyntaxError("expected ')'", self.text, cpos)
            return p
        if tok == "-":
            return -self.factor()
        raise PolynomialSyntaxError(f"unexpected {tok!r}", self.text, pos)


# ------------------------------------------------------------------- systems


@dataclass(frozen=True)
class PolySystem:
    """Ordered family of polynomials sharing a ring and a variable space."""

    polys: tuple

    def __post_init__(self):
        polys = tuple(self.polys)
        if polys:
            ring, nv = polys[0].ring, polys[0].nvars
            if any(p.ring != ring or p.nvars != nv for p in polys):
                raise ValueError("system members must share ring and variable count")
        object.__setattr__(self, "polys", polys)

    @classmethod
    def parse(cls, texts: Iterable[str] | str, ring: Ring, names=None) -> PolySystem:
        if isinstance(texts, str):
            texts = split_top_level(texts)
        texts = list(texts)
        if names is None:
            nv = max(_infer_nvars(t) for t in texts) if texts else 1
            names = default_names(nv)
        return cls(tuple(parse_polynomial(t, ring, names) for t in texts))

    def __len__(self) -> int:
        return len(self.polys)

    def __iter__(self):
        return iter(self.polys)

    def __getitem__(self, i):
        return self.polys[i]

    @property
    def ring(self) -> Ring:
        return self.polys[0].ring

    @property
    def nvars(self) -> int:
        return self.polys[0].nvars

    @property
    def degree(self):
        return max((p.degree for p in self.polys), default=NEG_INF)

    def to_text(self, names=None) -> str:
        return "{" + ", ".join(p.to_text(names) for p in self.polys) + "}"

    def __str__(self) -> str:
        return self.to_text()


def split_top_level(text: str) -> list:
    """Split a comma/semicolon separated list, ignoring separators inside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text.strip().strip("{}[]"):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch in ",;" and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        out.append("".join(cur).strip())
    return out


def _affine_images(images):
    """``[(v_j, c_j)]`` when every image is ``x_{v_j} + c_j``, else ``None``."""
    out = []
    for im in images:
        var, const = None, 0
        for e, c in im._terms.items():
            deg = sum(e)
            if deg == 0:
                const = c
            elif deg == 1 and c == 1 and var is None:
                var = e.index(1)
            else:
                return None
        if var is None:
            return None
        out.append((var, const))
    return out


# ---------------------------------------------------------------- operations


def evaluate(p: RingPolynomial, g: Sequence):
    return p.evaluate([p.ring.coerce(x) for x in g])


def difference(p: RingPolynomial, h: Sequence) -> RingPolynomial:
    """``(Delta_h p)(n) = p(n + h) - p(n)``."""
    if len(h) != p.nvars:
        raise ValueError(f"shift has {len(h)} entries, polynomial has {p.nvars} variables")
    return p.shift([p.ring.coerce(x) for x in h]) - p


def is_essentially_distinct(system: PolySystem) -> bool:
    polys = list(system)
    return all(not (polys[i] - polys[j]).is_constant()
               for i in range(len(polys)) for j in range(i + 1, len(polys)))


def is_independent(system: PolySystem):
    """
    Decide whether no nonzero ``b`` (over the fraction field) makes
    ``sum b_i p_i`` constant.

    Returns ``(True, None)`` or ``(False, witness)``; the witness is scaled to
    a primitive integral vector whose first nonzero entry is positive (or to
    Gaussian integers over Z[i]).
    """
    polys = list(system)
    if not polys:
        raise ValueError("empty system")
    monomials = sorted({e for p in polys for e in p._terms if sum(e) > 0})
    # rows: monomials, columns: polynomials; kernel vectors are the witnesses
    matrix = [[p.coefficient(m) for p in polys] for m in monomials]
    kernel = nullspace(matrix, len(polys))
    if not kernel:
        return True, None
    return False, _primitive(kernel[0])


def _to_field(x):
    if isinstance(x, Gaussian):
        return x
    return Fraction(x)


def nullspace(matrix: list, ncols: int) -> list:
    """Exact right kernel basis of ``matrix`` by Gauss-Jordan elimination."""
    rows = [[_to_field(x) for x in row] for row in matrix]
    pivots = []
    r = 0
    for col in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = rows[r][col]
        rows[r] = [x / inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][col] != 0:
                f = rows[i][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fc]
        basis.append(vec)
    return basis


def _primitive(vec: list) -> tuple:
    if any(isinstance(x, Gaussian) for x in vec):
        g = [x if isinstance(x, Gaussian) else Gaussian(x) for x in vec]
        lead = next(x for x in g if x)
        g = [x / lead for x in g]
        den = 1
        for x in g:
            for part in (x.real, x.imag):
                den = math.lcm(den, Fraction(part).denominator)
        return tuple(_clean(x * den) for x in g)
    den = 1
    for x in vec:
        den = math.lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in vec]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    if lead < 0:
        ints = [-x for x in ints]
    return tuple(ints)
