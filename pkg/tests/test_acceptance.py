"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every comparison is exact (rational or rational-coefficient polynomial
equality, tolerance 0).  Runtime limits are wall-clock seconds measured
around the computation being judged.
"""

import random
import time
from fractions import Fraction

from oracles import polygon_area
from toricstab.chow import TDivisor, degree, intersection_number, is_ample, pullback_divisor
from toricstab.fan import identity_morphism
from toricstab.fixtures import (
    example_3_6,
    example_4_4,
    hirzebruch,
    picard_two,
    projective_space,
)
from toricstab.klyachko import slope, subsheaf_from_subspace, subspace_slope
from toricstab.linalg import Subspace
from toricstab.polynomial import EpsPoly
from toricstab.pullback import (
    blowup,
    blowup_chain,
    exceptional_filtration,
    is_pullback_saturated,
    pullback_defect,
    reflexive_pullback_blowup,
)
from toricstab.sampling import random_sheaf
from toricstab.stability import (
    VerdictKind,
    adiabatic_slope_gap,
    adiabatic_verdict,
    audit_candidates,
    curve_blowup_criterion,
    make_setup,
    stability_verdict,
)

STABLE, SS, UNSTABLE = VerdictKind.STABLE, VerdictKind.STRICTLY_SEMISTABLE, VerdictKind.UNSTABLE
EXACT = "tolerance 0 (exact)"


def report(number, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    assert ok, detail


def timed(fn, *args, **kwargs):
    t = time.perf_counter()
    out = fn(*args, **kwargs)
    return out, time.perf_counter() - t


def weighted_setup(a, b):
    ws = example_3_6(a, b)
    Lp = TDivisor(ws.fan, tuple(ws.eps_divisor))
    return ws, make_setup([identity_morphism(ws.fan)], ws.sheaf, ws.polarisation, Lp)


def test_criterion_01_weighted_surface_intersection_table():
    t = time.perf_counter()
    ws = example_3_6()
    D = [TDivisor.ray(ws.fan, i) for i in range(4)]
    got = {
        "D3.D4": intersection_number([D[2], D[3]]),
        "D3.D2": intersection_number([D[2], D[1]]),
        "D3.D3": intersection_number([D[2], D[2]]),
        "D4.D1": intersection_number([D[3], D[0]]),
        "D4.D4": intersection_number([D[3], D[3]]),
    }
    elapsed = time.perf_counter() - t
    want = {"D3.D4": Fraction(1, 2), "D3.D2": Fraction(1, 2), "D3.D3": 0, "D4.D1": 1, "D4.D4": Fraction(1, 2)}
    ok = got == want and elapsed < 1
    report(1, ok, f"table {({k: str(v) for k, v in got.items()})}, {EXACT}, {elapsed:.3f}s < 1s")


def test_criterion_02_weighted_surface_slopes_and_verdict():
    t = time.perf_counter()
    ws = example_3_6()
    E, L = ws.sheaf, ws.polarisation
    mu = slope(E, L)
    sub = {name: subspace_slope(E, ws.subspaces[name], L) for name in ("F1", "F2", "F3")}
    v = stability_verdict(E, L)
    elapsed = time.perf_counter() - t
    witnesses = [c.subspace for c, _ in v.witnesses]
    ok = (mu == 3 and sub == {"F1": 2, "F2": 3, "F3": 1} and v.kind is SS
          and witnesses == [Subspace.span([ws.fan.rays[1]])] and elapsed < 1)
    report(2, ok, f"mu = {mu}, subsheaf slopes {({k: str(x) for k, x in sub.items()})}, "
                  f"{v.kind.value} with witness {witnesses}, {EXACT}, {elapsed:.3f}s < 1s")


def test_criterion_03_weighted_surface_perturbations():
    eps = EpsPoly.eps()
    lines, ok = [], True
    a, b = Fraction(1), Fraction(2)
    ws, setup = weighted_setup(a, b)
    mu = slope(setup.pulled_back_sheaf(), setup.L_eps())
    mu_f2 = mu - adiabatic_slope_gap(setup, ws.subspaces["F2"])
    ok &= mu == 3 + (b + a / 2) * eps and mu_f2 == 3 + (a + b / 2) * eps
    lines.append(f"mu(E) = {mu}, mu(E_F2) = {mu_f2}")
    for (a, b), kind in (((1, 2), STABLE), ((2, 1), UNSTABLE), ((1, 1), SS)):
        _, setup = weighted_setup(a, b)
        v = adiabatic_verdict(setup)
        ok &= v.kind is kind
        if kind is not SS:
            ok &= isinstance(v.epsilon_bound, Fraction) and v.epsilon_bound > 0
        lines.append(f"(a,b)=({a},{b}) {v.kind.value} eps0={v.epsilon_bound}")
    report(3, ok, "; ".join(lines) + f", {EXACT}")


def test_criterion_04_picard_two_stability():
    lines, ok = [], True
    for r in (2, 3):
        nu0 = Fraction(1, r + 1)
        for nu, kind in ((nu0 / 2, STABLE), (nu0, SS), (2 * nu0, UNSTABLE)):
            ws = picard_two(r, nu)
            v, elapsed = timed(stability_verdict, ws.sheaf, ws.polarisation)
            good = v.kind is kind and elapsed < 5
            if kind is SS:
                good &= ws.subspaces["F"] in [c.subspace for c, _ in v.witnesses]
            ok &= good
            lines.append(f"r={r} nu={nu}: {v.kind.value} ({v.certainty.value}, {elapsed:.2f}s)")
    report(4, ok, "; ".join(lines) + f", {EXACT}, each < 5s")


def test_criterion_05_curve_blowups():
    lines, ok = [], True
    for r in (2, 3):
        for centre, crit, kind in (("stabilising", Fraction(1, r), STABLE),
                                   ("destabilising", Fraction(-1, r + 1), UNSTABLE)):
            ws = picard_two(r, centre=centre)
            b = blowup(ws.fan, ws.blowups[0])
            x = curve_blowup_criterion(b, ws.sheaf, ws.subspaces["F"])
            v = adiabatic_verdict(make_setup([b], ws.sheaf, ws.polarisation))
            ok &= x == crit and v.kind is kind
            lines.append(f"r={r} {centre}: criterion {x}, {v.kind.value}")
    report(5, ok, "; ".join(lines) + f", {EXACT}")


def test_criterion_06_nonsaturated_point_blowup():
    ws = example_4_4()
    b = blowup(ws.fan, ws.blowups[0])
    E1 = reflexive_pullback_blowup(b, ws.sheaf)
    jumps = [(j, v.dim) for j, v in E1.filtrations[b.new_ray].jumps]
    F = ws.subspaces["F"]
    f_jumps = exceptional_filtration(subsheaf_from_subspace(ws.sheaf, F), b.center_rays).positions
    saturated = is_pullback_saturated(b, ws.sheaf, F)
    d = pullback_defect(b, ws.sheaf, F)
    ok = jumps == [(3, 1), (4, 2)] and f_jumps == (5,) and not saturated and d.total == 1
    report(6, ok, f"E jumps {jumps}, F jumps {list(f_jumps)}, saturated={saturated}, "
                  f"defect {dict(d.levels)} total {d.total}, {EXACT}")


def _point_blowup_property(f, centres, split, seed, wanted=10):
    """Shift polynomial and saturation logic on ``wanted`` strictly semistable sheaves."""
    rng = random.Random(seed)
    L = TDivisor.ray(f, 0)
    chain = blowup_chain(f, centres)
    single = [blowup(f, c) for c in centres]
    sampled = semistable = mismatches = shifts = 0
    while semistable < wanted:
        s = random_sheaf(rng, f, rng.randint(2, 3), (-2, 2), split_rays=split)
        sampled += 1
        v = stability_verdict(s, L)
        if v.kind is not SS:
            continue
        semistable += 1
        setup = make_setup(chain, s, L)
        av = adiabatic_verdict(setup)
        if not (EpsPoly.coerce(av.slope) - slope(s, L)).is_zero():
            shifts += 1
        equal = [c.subspace for c, g in v.gaps if g == 0 and not c.virtual]
        saturated = all(pullback_defect(b, s, F).total == 0 for b in single for F in equal)
        if av.kind is not (SS if saturated else UNSTABLE):
            mismatches += 1
    return sampled, shifts, mismatches


def test_criterion_07_point_blowups_preserve_slope():
    lines, ok = [], True
    cases = (
        ("P2 at two points", projective_space(2), [[0, 1], [1, 2]], ()),
        # locally free at the centre: see the decisions ledger on the c_1 identity
        ("P3 at a point", projective_space(3), [[0, 1, 2]], (0, 1, 2)),
    )
    for seed, (name, f, centres, split) in enumerate(cases, start=1):
        sampled, shifts, mismatches = _point_blowup_property(f, centres, split, seed)
        ok &= shifts == 0 and mismatches == 0
        lines.append(f"{name}: 10 strictly semistable of {sampled} sampled, "
                     f"nonzero shifts {shifts}, verdict/saturation mismatches {mismatches}")
    report(7, ok, "; ".join(lines) + f", {EXACT}")


def test_criterion_08_line_blowup_expansion():
    f = projective_space(3)
    b = blowup(f, [0, 1])
    H = TDivisor.ray(f, 3)
    pH = pullback_divisor(b.morphism, H)
    D0 = TDivisor.ray(b.source, b.new_ray)
    L_eps = pH - EpsPoly.eps() * D0
    deg_h = degree(pH, L_eps)
    deg_d0 = degree(D0, L_eps)
    ok = deg_h == EpsPoly((1, 0, -1)) and deg_d0.leading_term() == (1, 2)
    report(8, ok, f"deg(pi*H) = {deg_h}, deg(D0) = {deg_d0} (leading 2*eps), {EXACT}")


def test_criterion_09_volume_oracle():
    rng = random.Random(2024)
    lines, ok = [], True
    for name, f in (("P2", projective_space(2)), ("P1xP1", hirzebruch(0)), ("F2", hirzebruch(2))):
        count = 0
        while count < 3:
            L = TDivisor(f, tuple(rng.randint(0, 5) for _ in f.rays))
            if not is_ample(L):
                continue
            count += 1
            lhs = intersection_number([L, L])
            rhs = 2 * polygon_area(f.rays, L.coeffs)
            ok &= lhs == rhs
            lines.append(f"{name} {list(map(str, L.coeffs))}: {lhs} vs {rhs}")
    report(9, ok, "; ".join(lines) + f", {EXACT}")


def test_criterion_10_random_line_audit():
    rng = random.Random(10)
    f = projective_space(2)
    L = TDivisor.ray(f, 0)
    violations, samples = 0, 0
    for i in range(50):
        s = random_sheaf(rng, f, 2)
        v = stability_verdict(s, L)
        audit = audit_candidates(s, L, v.gaps, 10_000, seed=i, dims=[1])
        violations += audit.violations
        samples += audit.samples
    ok = violations == 0 and samples == 50 * 10_000
    report(10, ok, f"50 rank-2 sheaves on P2, {samples} random lines, {violations} violations (must be 0)")
