"""Point blow-ups and saturation of pulled back subsheaves.

A strictly semistable sheaf stays semistable after blowing up fixed points
exactly when every equal-slope subsheaf pulls back to a saturated subsheaf.
We show a non-saturated example and then the first Chern class shift that
appears on threefolds for sheaves which are not locally free at the centre.
"""

from toricstab.fixtures import example_4_4, p2_nonsaturated, projective_space
from toricstab.klyachko import EquivariantSheaf
from toricstab.linalg import Subspace
from toricstab.pullback import blowup, chern_shift, pullback_defect, reflexive_pullback_blowup
from toricstab.stability import adiabatic_verdict, make_setup

ws = example_4_4()
b = blowup(ws.fan, ws.blowups[0])
E1 = reflexive_pullback_blowup(b, ws.sheaf)
print("exceptional filtration of E:", [(j, v.dim) for j, v in E1.filtrations[b.new_ray].jumps])
d = pullback_defect(b, ws.sheaf, ws.subspaces["F"])
print("saturation defect of F:", dict(d.levels), "total", d.total)

for centre in ((0, 1), (1, 2)):
    w = p2_nonsaturated(centre)
    setup = make_setup([blowup(w.fan, list(centre))], w.sheaf, w.polarisation)
    print(f"P^2 sheaf blown up at {centre}:", adiabatic_verdict(setup).kind.value)

# three lines in general position at a fixed point of P^3
f = projective_space(3)
full = Subspace.full(2)
s = EquivariantSheaf.from_steps(f, 2, [
    [(0, [(1, 0)]), (1, full)],
    [(0, [(0, 1)]), (1, full)],
    [(0, [(1, 1)]), (1, full)],
    [(0, full)],
])
print("c_1 shift at the point {0,1,2}:", chern_shift(blowup(f, [0, 1, 2]), s))
print("c_1 shift along the line {0,1}:", chern_shift(blowup(f, [0, 1]), s))
