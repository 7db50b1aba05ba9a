"""
Symbolic PET induction.

A system lives in a polynomial ring whose variables split into *active*
variables (the ``g`` the polynomials are functions of) and *parameters*
(formal van der Corput shifts ``h``, ``h'`` introduced along the way).
Degrees, equivalence classes and weights are computed in the active
variables with coefficients in the parameter ring, i.e. generically.
Parameter values where a generic statement fails are recorded as
explicit nonzero-ness constraints.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import Ring
from .polynomials import NEG_INF, PolySystem, RingPolynomial, default_names


class PetError(ValueError):
    """Input system is outside the domain of the PET engine."""


class PetBudgetError(RuntimeError):
    """The reduction exceeded its size or depth budget."""

    def __init__(self, message: str, trace: "ReductionNode | None" = None, depth: int = 0):
        super().__init__(message)
        self.trace = trace
        self.depth = depth


# --------------------------------------------------------------- weights


@dataclass(frozen=True, order=False)
class Weight:
    """``(w_1, ..., w_m)``: number of equivalence classes of each degree."""

    entries: tuple

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(int(x) for x in self.entries))
        if any(x < 0 for x in self.entries):
            raise ValueError("weight entries are non-negative")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __lt__(self, other: "Weight") -> bool:
        return weight_less(self, other)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.entries)) + ")"


def weight_less(w, w2) -> bool:
    """
    Well-ordering on weight vectors.

    Shorter vectors are smaller; equal-length vectors compare
    lexicographically starting from the top-degree entry.
    """
    a, b = tuple(w), tuple(w2)
    if len(a) != len(b):
        return len(a) < len(b)
    for x, y in zip(reversed(a), reversed(b)):
        if x != y:
            return x < y
    return False


# ------------------------------------------------------- generic structure


def _active(system, active):
    return tuple(range(system[0].nvars)) if active is None else tuple(active)


def _top(p: RingPolynomial, active) -> RingPolynomial:
    return p.homogeneous_part(p.degree_in(active), active)


def _parameter_coefficients(p: RingPolynomial, active) -> list:
    """Coefficients of ``p`` as a polynomial in the active variables."""
    return list(p.split(active).values())


def _witness_coefficient(p: RingPolynomial, active):
    """
    A single parameter polynomial whose non-vanishing keeps ``p`` nonzero.

    Returns ``None`` when ``p`` has a nonzero constant coefficient (never vanishes).
    """
    best = None
    for c in _parameter_coefficients(p, active):
        if c.is_constant():
            return None
        if best is None or len(c._terms) < len(best._terms):
            best = c
    return best


def equivalence_classes(system, active: Sequence[int] | None = None) -> list:
    """
    Partition indices by ``p ~ q iff deg p = deg q and deg(p - q) < deg p``.

    Classes are returned in order of first appearance, as lists of
    0-based indices.
    """
    polys = list(system)
    act = _active(polys, active)
    keys = {}
    order = []
    for idx, p in enumerate(polys):
        deg = p.degree_in(act)
        if deg <= 0:
            raise PetError(f"polynomial {idx + 1} ({p}) is constant in the active variables")
        key = (deg, _top(p, act))
        if key not in keys:
            keys[key] = []
            order.append(key)
        keys[key].append(idx)
    classes = [keys[k] for k in order]
    if len(polys) <= 48:
        _assert_relation(polys, act, classes)
    return classes


def _equivalent(p, q, act) -> bool:
    d = p.degree_in(act)
    return d == q.degree_in(act) and (p - q).degree_in(act) < d


def _assert_relation(polys, act, classes):
    label = {}
    for c, members in enumerate(classes):
        for i in members:
            label[i] = c
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            if _equivalent(polys[i], polys[j], act) != (label[i] == label[j]):
                raise AssertionError("equivalence relation is not transitive on this system")


def weight(system, active: Sequence[int] | None = None) -> Weight:
    polys = list(system)
    act = _active(polys, active)
    classes = equivalence_classes(polys, act)
    top = max(polys[c[0]].degree_in(act) for c in classes)
    counts = [0] * top
    for c in classes:
        counts[polys[c[0]].degree_in(act) - 1] += 1
    return Weight(tuple(counts))


def is_essentially_distinct_in(system, active) -> bool:
    polys = list(system)
    act = _active(polys, active)
    seen = set()
    for p in polys:
        key = p.drop_constant(act)
        if key in seen:
            return False
        seen.add(key)
    return True


def is_standard(system, active: Sequence[int] | None = None) -> bool:
    """Nonconstant, essentially distinct, and ``deg p_1 = deg P``."""
    polys = list(system)
    if not polys:
        return False
    act = _active(polys, active)
    degs = [p.degree_in(act) for p in polys]
    if min(degs) <= 0:
        return False
    if degs[0] != max(degs):
        return False
    return is_essentially_distinct_in(polys, act)


def _repeated_pair(polys, act):
    seen = {}
    for idx, p in enumerate(polys):
        key = p.drop_constant(act)
        if key in seen:
            return seen[key], idx
        seen[key] = idx
    return None


def generic_constraints(system, active, *, pair_limit: int = 64) -> list:
    """
    Parameter polynomials that must not vanish for the generic degrees,
    classes and essential distinctness of ``system`` to persist.

    Pairwise distinctness constraints are only collected when the system
    has at most ``pair_limit`` members, and class-separation constraints
    when it has at most ``4 * pair_limit`` classes.
    """
    polys = list(system)
    act = tuple(active)
    out: dict = {}

    def add(p):
        c = _witness_coefficient(p, act)
        if c is not None:
            out.setdefault(c, None)

    classes = equivalence_classes(polys, act)
    tops = [_top(polys[c[0]], act) for c in classes]
    degs = [polys[c[0]].degree_in(act) for c in classes]
    for t in tops:
        add(t)
    if len(tops) <= 4 * pair_limit:
        for a in range(len(tops)):
            for b in range(a + 1, len(tops)):
                if degs[a] == degs[b]:
                    add(tops[a] - tops[b])
    if len(polys) <= pair_limit:
        for i in range(len(polys)):
            for j in range(i + 1, len(polys)):
                add((polys[i] - polys[j]).drop_constant(act))
    return list(out)


# -------------------------------------------------------------- vdC step


@dataclass
class VdcStep:
    """Result of one van der Corput step."""

    shifted: list  # P_{h,h'} in its pinned order
    child: list  # P' = {q_j - q_s}
    i0: int  # 1-based index of the subtracted polynomial
    nvars: int
    names: list
    constraints: list
    parent_weight: Weight
    child_weight: Weight


def _shift_images(ring, nvars, active, offsets):
    return [RingPolynomial.variable(ring, nvars, j)
            + (RingPolynomial.variable(ring, nvars, offsets[active.index(j)])
               if j in active else 0)
            for j in range(nvars)]


def _constant_shift_images(ring, nvars, active, values):
    return [RingPolynomial.variable(ring, nvars, j)
            + (values[active.index(j)] if j in active else 0)
            for j in range(nvars)]


def choose_i0(polys, act) -> int:
    """
    0-based index of the polynomial subtracted in the next step.

    Minimal degree among ``p_2..p_r``; if all degrees agree, prefer one not
    equivalent to ``p_1``; lowest index breaks ties. A single polynomial
    is subtracted from its own shifted copy.
    """
    r = len(polys)
    if r == 1:
        return 0
    degs = [p.degree_in(act) for p in polys]
    dmin = min(degs[1:])
    cands = [i for i in range(1, r) if degs[i] == dmin]
    if all(d == degs[0] for d in degs):
        inequiv = [i for i in cands if not _equivalent(polys[0], polys[i], act)]
        if inequiv:
            return inequiv[0]
    return cands[0]


def vdc_step(system, active: Sequence[int] | None = None, names: Sequence[str] | None = None,
             tag: str | int = 1, shift_values: Sequence | None = None) -> VdcStep:
    """
    One van der Corput reduction of a standard system of degree at least 2.

    Fresh parameter variables ``h<tag>`` and ``h<tag>'`` (one per active
    variable) are appended to the variable space. With ``shift_values``
    (``2 * len(active)`` ring elements: ``h`` then ``h'``) the shifts are
    concrete instead and no variables are added.
    """
    polys = list(system)
    if not polys:
        raise PetError("empty system")
    ring = polys[0].ring
    act = list(_active(polys, active))
    nv = polys[0].nvars
    names = list(names) if names is not None else default_names(nv)
    if not is_standard(polys, act):
        raise PetError("vdc_step needs a standard system")
    deg = max(p.degree_in(act) for p in polys)
    if deg <= 1:
        raise PetError("degree-1 system: use linear base case")
    parent_weight = weight(polys, act)
    i0 = choose_i0(polys, act)

    d = len(act)
    if shift_values is None:
        sfx = "" if d == 1 else "_"
        new_h = [f"h{tag}{sfx}{j + 1}" if d > 1 else f"h{tag}" for j in range(d)]
        new_hp = [f"h{tag}'{sfx}{j + 1}" if d > 1 else f"h{tag}'" for j in range(d)]
        nv2 = nv + 2 * d
        ext = [p.extend(nv2) for p in polys]
        img_h = _shift_images(ring, nv2, act, list(range(nv, nv + d)))
        img_hp = _shift_images(ring, nv2, act, list(range(nv + d, nv2)))
    else:
        if len(shift_values) != 2 * d:
            raise ValueError(f"need {2 * d} shift values")
        new_h, new_hp, nv2, ext = [], [], nv, polys
        img_h = _constant_shift_images(ring, nv, act, shift_values[:d])
        img_hp = _constant_shift_images(ring, nv, act, shift_values[d:])

    shifted = []
    last = None
    for i, p in enumerate(ext):
        with_hp = p.substitute(img_hp)
        if p.degree_in(act) > 1:
            shifted.append(p.substitute(img_h))
        if i == i0:
            last = with_hp
        else:
            shifted.append(with_hp)
    shifted.append(last)
    qs = shifted[-1]
    child = [q - qs for q in shifted[:-1]]
    for idx, q in enumerate(child):
        if q.degree_in(act) <= 0:
            raise PetError(f"degenerate reduction: member {idx + 1} of the child system is constant")
    child_weight = weight(child, act)
    if not weight_less(child_weight, parent_weight):
        raise AssertionError(f"weight did not decrease: {child_weight} vs {parent_weight}")
    constraints = generic_constraints(child, act) if shift_values is None else []
    return VdcStep(shifted=shifted, child=child, i0=i0 + 1, nvars=nv2,
                   names=names + new_h + new_hp, constraints=constraints,
                   parent_weight=parent_weight, child_weight=child_weight)


# ------------------------------------------------------------- reduction


@dataclass
class ReductionNode:
    """One system in a PET trace."""

    polys: list
    names: list
    active: list
    weight: Weight
    kind: str = "vdc"  # "root", "doubling" or "vdc"
    i0: int | None = None
    constraints: list = field(default_factory=list)
    children: list = field(default_factory=list)
    k: int | None = None

    @property
    def size(self) -> int:
        return len(self.polys)

    @property
    def degree(self) -> int:
        return max(p.degree_in(self.active) for p in self.polys)

    def depth(self) -> int:
        """Number of edges on the longest root-to-leaf path."""
        return 1 + max(c.depth() for c in self.children) if self.children else 0

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()

    def edges(self):
        for c in self.children:
            yield self, c
            yield from c.edges()

    def to_dict(self, max_listed: int = 64) -> dict:
        out = {
            "kind": self.kind,
            "size": self.size,
            "degree": self.degree,
            "weight": list(self.weight.entries),
            "active": [self.names[j] for j in self.active],
            "i0": self.i0,
        }
        if self.size <= max_listed:
            out["polys"] = [p.to_text(self.names) for p in self.polys]
        if len(self.constraints) <= max_listed:
            out["constraints"] = [c.to_text(self.names) for c in self.constraints]
        else:
            out["constraint_count"] = len(self.constraints)
        if self.k is not None:
            out["k"] = self.k
        out["children"] = [c.to_dict(max_listed) for c in self.children]
        return out


@dataclass
class PetResult:
    k: int
    trace: ReductionNode
    depth: int
    degree_bound: int | None = None


def double_system(polys, names, degree_bound: int):
    """
    Standardize a nonstandard system on ``F^d`` as a system on ``F^{3d}``.

    Builds ``{p_i(g+h) + q(g), p_i(g+h') + q(g)}`` with ``q(g) = g_1^b``;
    ``h`` and ``h'`` are new active variables.
    """
    ring = polys[0].ring
    nv = polys[0].nvars
    d = nv
    nv3 = 3 * d
    if d == 1:
        new_names = list(names) + ["m", "m'"]
    else:
        new_names = list(names) + [f"m{j + 1}" for j in range(d)] + [f"m{j + 1}'" for j in range(d)]
    ext = [p.extend(nv3) for p in polys]
    act = list(range(d))
    img_h = _shift_images(ring, nv3, act, list(range(d, 2 * d)))
    img_hp = _shift_images(ring, nv3, act, list(range(2 * d, 3 * d)))
    q = RingPolynomial.variable(ring, nv3, 0) ** degree_bound
    out = [p.substitute(img_h) + q for p in ext] + [p.substitute(img_hp) + q for p in ext]
    return out, new_names


def pet_reduce(system, degree_bound: int | None = None, *, max_depth: int = 64,
               max_size: int = 4096, names: Sequence[str] | None = None,
               mode: str = "symbolic", seed: int = 0) -> PetResult:
    """
    Run PET induction to a degree-1 system and return the seminorm step ``k``.

    Nonstandard input is first doubled (see :func:`double_system`) with a
    degree-``b`` polynomial ``q``; ``b`` defaults to ``deg P``. A degree-1
    leaf of ``s`` polynomials contributes ``k = s + 1``.

    ``mode="symbolic"`` keeps every shift as a formal variable.
    ``mode="specialized"`` draws each shift from a seeded generator
    (integers in ``[1, 10**9]``) so the polynomials stay in the active
    variables only; weights, depth and ``k`` agree with the symbolic run
    unless a draw lands on an exceptional set, which the weight-decrease
    assertion would catch.

    Raises
    ------
    PetError
        constant members or a pair differing by a constant.
    PetBudgetError
        the trace exceeds ``max_depth`` steps or ``max_size`` polynomials.
    """
    polys = list(system)
    if not polys:
        raise PetError("empty system")
    nv = polys[0].nvars
    names = list(names) if names is not None else default_names(nv)
    act = list(range(nv))
    for idx, p in enumerate(polys):
        if p.degree <= 0:
            raise PetError(f"polynomial {idx + 1} ({p.to_text(names)}) is constant")
    pair = _repeated_pair(polys, act)
    if pair is not None:
        i, j = pair
        raise PetError(f"polynomials {i + 1} and {j + 1} differ by a constant: "
                       f"{polys[i].to_text(names)}, {polys[j].to_text(names)}")
    deg = max(p.degree for p in polys)
    root = ReductionNode(polys, names, act, weight(polys, act), kind="root")
    node = root
    depth = 0
    b = None
    if not is_standard(polys, act):
        b = deg if degree_bound is None else int(degree_bound)
        if b < deg:
            raise PetError(f"degree bound {b} is below the system degree {deg}")
        doubled, new_names = double_system(polys, names, b)
        new_act = list(range(3 * nv))
        child = ReductionNode(doubled, new_names, new_act, weight(doubled, new_act),
                              kind="doubling",
                              constraints=generic_constraints(doubled, new_act))
        if not is_standard(doubled, new_act):
            raise AssertionError("doubled system is not standard")
        node.children.append(child)
        node = child
        depth = 1
    if mode not in ("symbolic", "specialized"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    tag = 0
    while node.degree > 1:
        if depth >= max_depth:
            raise PetBudgetError(f"depth budget {max_depth} exceeded", root, depth)
        tag += 1
        values = None
        if mode == "specialized":
            ring = node.polys[0].ring
            values = [ring.coerce(rng.randint(1, 10 ** 9)) for _ in range(2 * len(node.active))]
        step = vdc_step(node.polys, node.active, node.names, tag=tag, shift_values=values)
        node.i0 = step.i0
        child = ReductionNode(step.child, step.names, node.active, step.child_weight,
                              constraints=step.constraints)
        node.children.append(child)
        node = child
        depth += 1
        if node.size > max_size:
            raise PetBudgetError(f"system size {node.size} exceeds budget {max_size} "
                                 f"at depth {depth} (weight {node.weight})", root, depth)
    if not is_essentially_distinct_in(node.polys, node.active):
        raise AssertionError("degree-1 leaf is not essentially distinct")
    node.k = node.size + 1
    return PetResult(k=node.k, trace=root, depth=depth, degree_bound=b)


# ------------------------------------------------------------ utilities


def specialize(polys, values: dict) -> list:
    """Substitute ring values for the variables listed in ``values`` (index -> value)."""
    out = []
    for p in polys:
        ring, nv = p.ring, p.nvars
        images = [RingPolynomial.constant(ring, nv, values[j]) if j in values
                  else RingPolynomial.variable(ring, nv, j) for j in range(nv)]
        out.append(p.substitute(images))
    return out


def random_parameters(ring: Ring, params: Sequence[int], constraints, rng: random.Random,
                      bound: int = 50, attempts: int = 100) -> dict:
    """Random integer values for ``params`` at which no constraint vanishes."""
    for _ in range(attempts):
        vals = {j: ring.coerce(rng.randint(-bound, bound)) for j in params}
        ok = True
        for c in constraints:
            if c.is_zero():
                continue
            point = [vals.get(j, 0) for j in range(c.nvars)]
            if c.evaluate(point) == 0:
                ok = False
                break
        if ok:
            return vals
    raise RuntimeError("could not avoid the exceptional set")


def random_system(ring: Ring, rng: random.Random, max_degree: int = 3, max_size: int = 3,
                  coeff_bound: int = 3, standard: bool | None = None) -> PolySystem:
    """
    Random essentially distinct system of nonconstant one-variable
    polynomials with zero constant term.

    ``standard=True`` forces ``deg p_1 = deg P``; ``False`` forces the
    opposite (needs size at least 2); ``None`` leaves it to chance.
    """
    while True:
        size = rng.randint(1, max_size)
        polys = []
        for _ in range(size):
            deg = rng.randint(1, max_degree)
            coeffs = {}
            for e in range(1, deg + 1):
                c = rng.randint(-coeff_bound, coeff_bound)
                if e == deg and c == 0:
                    c = rng.choice([-1, 1]) * rng.randint(1, coeff_bound)
                if c:
                    coeffs[(e,)] = ring.coerce(c)
            polys.append(RingPolynomial(ring, 1, coeffs))
        if _repeated_pair(polys, [0]) is not None:
            continue
        std = is_standard(polys, [0])
        if standard is None or std == standard:
            return PolySystem(tuple(polys))


def trace_depth(node: ReductionNode) -> int:
    return node.depth()


__all__ = [
    "NEG_INF", "PetBudgetError", "PetError", "PetResult", "ReductionNode", "VdcStep",
    "Weight", "choose_i0", "double_system", "equivalence_classes", "generic_constraints",
    "is_standard", "pet_reduce", "random_parameters", "random_system", "specialize",
    "trace_depth", "vdc_step", "weight", "weight_less",
]
