"""
Uniformity seminorms of trigonometric observables on an irrational rotation.

For a rotation the cube average has a closed form, a sum over frequency
selections whose signed total vanishes. We compare it with the truncated
Fejer estimator at growing N and watch the seminorm grow with s. A single
character e(kx) has seminorm 0 at s = 1 (its mean is 0) and 1 from s = 2 on.
"""
from jointerg.algebra import INTEGERS
from jointerg.seminorms import seminorm_closed_form_rotation, seminorm_truncated
from jointerg.systems import RotationSystem, parse_observable

ALPHA = "0.41421356237309504880168872420969807856967"
sys = RotationSystem(INTEGERS, ((ALPHA,),))

for text in ("e(1)", "e(1) + 0.5*e(2)", "0.7 + 0.3*e(1)"):
    f = parse_observable(text)
    print(text)
    for s in (1, 2, 3):
        exact = seminorm_closed_form_rotation(sys, f, s).value
        est = "  ".join(f"N={N}: {seminorm_truncated(sys, f, s, N).value:.4f}" for N in (20, 100, 500))
        print(f"  s = {s}  closed form {exact:.4f}   {est}")
