"""Stability of a rank 2 sheaf on a singular weighted surface.

The fan has rays e1, e2, e2 - 2 e1, -e2, so two of its cones carry
multiplicity 2 and intersection numbers become half-integers.  The sheaf is
strictly semistable for the given polarisation; perturbing the polarisation
in different directions makes it stable or unstable.
"""

from toricstab.chow import TDivisor, intersection_number
from toricstab.fan import identity_morphism
from toricstab.fixtures import example_3_6
from toricstab.klyachko import slope, subspace_slope
from toricstab.stability import adiabatic_verdict, make_setup, stability_verdict

ws = example_3_6()
D = [TDivisor.ray(ws.fan, i) for i in range(4)]
print("intersection table D_i . D_j")
for i in range(4):
    print("  ", [str(intersection_number([D[i], D[j]])) for j in range(4)])

E, L = ws.sheaf, ws.polarisation
print("slope of E:", slope(E, L))
for name in ("F1", "F2", "F3"):
    print(f"slope of E_{name}:", subspace_slope(E, ws.subspaces[name], L))

v = stability_verdict(E, L)
print("verdict:", v.kind.value, "witness", [c.subspace for c, _ in v.witnesses])

# perturb L by eps (a D3 + b D4)
for a, b in ((1, 2), (2, 1), (1, 1)):
    w = example_3_6(a, b)
    Lp = TDivisor(w.fan, tuple(w.eps_divisor))
    setup = make_setup([identity_morphism(w.fan)], w.sheaf, w.polarisation, Lp)
    av = adiabatic_verdict(setup)
    print(f"a={a} b={b}: slope {av.slope}, {av.kind.value}")
