import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jointerg.algebra import GAUSSIAN_INTEGERS, INTEGERS, RATIONALS
from jointerg.pet import (PetBudgetError, PetError, Weight, equivalence_classes, is_standard,
                          pet_reduce, random_system, vdc_step, weight, weight_less)
from jointerg.polynomials import PolySystem

weights = st.lists(st.integers(0, 4), min_size=1, max_size=4).map(Weight)


def chain(result):
    node, out = result.trace, []
    while True:
        out.append((node.kind, str(node.weight), node.size))
        if not node.children:
            return out
        node = node.children[0]


@given(weights, weights, weights)
def test_weight_order_is_strict_total(a, b, c):
    assert not weight_less(a, a)
    assert not (weight_less(a, b) and weight_less(b, a))
    if tuple(a) != tuple(b):
        assert weight_less(a, b) or weight_less(b, a)
    if weight_less(a, b) and weight_less(b, c):
        assert weight_less(a, c)


def test_weight_order_examples():
    assert weight_less(Weight((5, 0)), Weight((0, 1)))  # top degree dominates
    assert weight_less(Weight((9,)), Weight((0, 1)))  # shorter is smaller
    assert not weight_less(Weight((1, 1)), Weight((0, 1)))


def test_weight_and_classes():
    sys = PolySystem.parse("n^2, n^2 + n, 2n^2, n", INTEGERS)
    assert equivalence_classes(sys) == [[0, 1], [2], [3]]
    assert weight(sys).entries == (1, 2)


@pytest.mark.parametrize("ring", [INTEGERS, GAUSSIAN_INTEGERS, RATIONALS])
@pytest.mark.parametrize("r", [1, 2, 3, 4, 5])
def test_linear_systems_give_r_plus_one(ring, r):
    texts = [f"{j}*n" for j in range(1, r + 1)]
    res = pet_reduce(PolySystem.parse(texts, ring))
    assert res.k == r + 1 and res.depth == 0


def test_golden_n2_n():
    res = pet_reduce(PolySystem.parse("n^2, n", INTEGERS))
    assert res.k == 4
    assert chain(res) == [("root", "(1,1)", 2), ("vdc", "(0,1)", 2), ("vdc", "(3)", 3)]
    assert [n.i0 for n in res.trace.walk()] == [2, 2, None]


def test_golden_n2_single():
    res = pet_reduce(PolySystem.parse("n^2", INTEGERS))
    assert res.k == 2
    assert chain(res) == [("root", "(0,1)", 1), ("vdc", "(1)", 1)]


def test_golden_n2_2n2():
    res = pet_reduce(PolySystem.parse("n^2, 2n^2", INTEGERS))
    assert res.k == 8
    assert [w for _, w, _ in chain(res)] == ["(0,2)", "(1,1)", "(0,1)", "(7)"]


def test_nonstandard_system_is_doubled():
    res = pet_reduce(PolySystem.parse("n, n^2", INTEGERS), mode="specialized")
    assert res.k == 4096
    assert res.trace.children[0].kind == "doubling"
    assert res.degree_bound == 2
    assert is_standard(res.trace.children[0].polys)


def test_every_vdc_edge_decreases_weight():
    # symbolic runs at degree 3 are slow; shifts are specialized there
    for text in ("n^2, n", "n^3, n", "n, n^2", "(1+i)*n^2, n"):
        ring = GAUSSIAN_INTEGERS if "i" in text else INTEGERS
        res = pet_reduce(PolySystem.parse(text, ring), mode="specialized")
        for parent, child in res.trace.edges():
            if child.kind == "vdc":
                assert weight_less(child.weight, parent.weight)


def test_specialized_matches_symbolic():
    for text in ("n^2, n", "n^2, 2n^2", "n^3", "n^2 + n, n^2, n"):
        sys = PolySystem.parse(text, INTEGERS)
        a = pet_reduce(sys)
        b = pet_reduce(sys, mode="specialized", seed=3)
        assert (a.k, a.depth) == (b.k, b.depth)
        assert [w for _, w, _ in chain(a)] == [w for _, w, _ in chain(b)]


def test_vdc_step_shapes():
    step = vdc_step(PolySystem.parse("n^2, n", INTEGERS))
    assert step.i0 == 2
    assert len(step.child) == 2
    assert step.names == ["n", "h1", "h1'"]


@pytest.mark.parametrize("text", ["n, 3", "n^2, n^2 + 1"])
def test_invalid_systems_rejected(text):
    with pytest.raises(PetError):
        pet_reduce(PolySystem.parse(text, INTEGERS))


def test_budget_errors():
    sys = PolySystem.parse("n, n^2", INTEGERS)
    with pytest.raises(PetBudgetError):
        pet_reduce(sys, max_size=50, mode="specialized")
    with pytest.raises(PetBudgetError):
        pet_reduce(sys, max_depth=2, mode="specialized")


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_random_standard_degree2_terminate(seed):
    rng = random.Random(seed)
    sys = random_system(INTEGERS, rng, max_degree=2, max_size=2, standard=True)
    res = pet_reduce(sys, mode="specialized", seed=seed, max_size=512)
    leaf = list(res.trace.walk())[-1]
    assert leaf.degree == 1 and res.k == leaf.size + 1
    for parent, child in res.trace.edges():
        assert weight_less(child.weight, parent.weight)
