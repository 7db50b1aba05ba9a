"""
PET induction on a few small polynomial systems.

Each van der Corput step replaces a system by differences against one
reference polynomial. The weight vector counts classes per degree with
degree 1 first. It strictly drops along every edge when compared from the
top degree down, so the reduction terminates at a linear system. A linear leaf with s polynomials needs the seminorm of
order s + 1, which is the ``k`` reported here.
"""
from jointerg.algebra import INTEGERS
from jointerg.pet import pet_reduce, weight_less
from jointerg.polynomials import PolySystem


def show(node, indent=0):
    label = f"{node.kind:8s} weight {node.weight}  size {node.size}"
    if node.k is not None:
        label += f"  k = {node.k}"
    print("  " * indent + label)
    for child in node.children:
        show(child, indent + 1)


for text in ("n, 2n, 3n", "n^2, n", "n^2, 2n^2"):
    res = pet_reduce(PolySystem.parse(text, INTEGERS))
    print(f"{{{text}}}: k = {res.k}, depth {res.depth}")
    show(res.trace, 1)
    assert all(weight_less(c.weight, p.weight) for p, c in res.trace.edges() if c.kind == "vdc")
    print()

# cubic systems blow up symbolically; drawing the shifts at random keeps them small
res = pet_reduce(PolySystem.parse("n^3, n", INTEGERS), mode="specialized", seed=1)
print(f"{{n^3, n}} with specialized shifts: k = {res.k}, depth {res.depth}")
