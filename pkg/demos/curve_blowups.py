"""Blowing up an invariant curve can stabilise or destabilise.

The tangent sheaf of P(O^r + O(1)) over P^1 is strictly semistable at the
wall nu = 1/(r+1).  Along a blow-up of an invariant curve the sign of a
single rational number decides what happens to the pullback.
"""

from toricstab.fixtures import picard_two
from toricstab.pullback import blowup
from toricstab.stability import adiabatic_verdict, curve_blowup_criterion, make_setup, stability_verdict

for r in (2, 3):
    ws = picard_two(r)
    v = stability_verdict(ws.sheaf, ws.polarisation)
    print(f"r={r}: tangent sheaf at the wall is {v.kind.value}")
    for centre in ("stabilising", "destabilising"):
        ws = picard_two(r, centre=centre)
        b = blowup(ws.fan, ws.blowups[0])
        crit = curve_blowup_criterion(b, ws.sheaf, ws.subspaces["F"])
        av = adiabatic_verdict(make_setup([b], ws.sheaf, ws.polarisation))
        print(f"  blow up {ws.blowups[0]} ({centre}): criterion {crit}, pullback {av.kind.value}")
