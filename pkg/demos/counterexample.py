"""
Why independence matters for joint ergodicity.

On the circle rotation by alpha = sqrt(2) - 1 we average
``f(x + n alpha) g(x + a n alpha)`` with ``f = e(a x)`` and ``g = e(-x)``.
Both observables have zero mean, so a jointly ergodic pair would drive the
average to 0 in L^2. The pair {n, a n} is linearly dependent and the two
phases cancel for every n, which pins the distance at exactly 1. Swapping
in the independent pair {n, n^2} with the same observables decays.
"""
from jointerg.algebra import INTEGERS, FolnerSequence
from jointerg.averages import counterexample_dependent, multi_average_fourier
from jointerg.polynomials import PolySystem
from jointerg.systems import RotationSystem, parse_observable

ALPHA = "0.41421356237309504880168872420969807856967"
sys = RotationSystem(INTEGERS, ((ALPHA,),))
folner = FolnerSequence(INTEGERS)

print("dependent pair {n, a n}")
for a in (2, 3):
    dists = [counterexample_dependent(sys, a, N).l2_distance_to_product for N in (1, 10, 100, 1000)]
    print(f"  a = {a}: " + "  ".join(f"{d:.15f}" for d in dists))

print("independent pair {n, n^2} with f = e(2x), g = e(-x)")
polys = list(PolySystem.parse("n, n^2", INTEGERS))
obs = [parse_observable("e(2)"), parse_observable("e(-1)")]
for N in (16, 64, 256, 1024):
    res = multi_average_fourier(sys, polys, obs, folner, N)
    print(f"  N = {N:5d}  |Phi_N| = {res.size:5d}  distance = {res.l2_distance_to_product:.5f}")
