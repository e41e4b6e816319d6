"""Command line interface: ``toricstab <command> [options]``.

Exit codes: 0 stable (or success), 1 strictly semistable, 2 unstable,
64 malformed input, 65 violated mathematical precondition, 66 unsupported
construction.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import chow, klyachko, pullback, stability
from .chow import TDivisor
from .errors import PreconditionError, SchemaError, UnsupportedError
from .fan import FanError, identity_morphism, is_complete, is_smooth, validate_fan
from .fixtures import FIXTURES, load_fixture, picard_two
from .linalg import Subspace
from .polynomial import EpsPoly
from .serialization import (
    Workspace,
    divisor_from_json,
    divisor_to_json,
    fan_from_json,
    fan_to_json,
    parse_rat,
    rat_str,
    scalar_json,
    sheaf_from_json,
    sheaf_to_json,
    subspace_from_json,
    subspace_to_json,
)

EXIT_SCHEMA, EXIT_PRECONDITION, EXIT_UNSUPPORTED = 64, 65, 66


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_SCHEMA)


# ---------------------------------------------------------------------------
# input assembly


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise SchemaError(f"cannot read {path}: {e}") from None
    except json.JSONDecodeError as e:
        raise SchemaError(f"{path}: invalid JSON: {e}") from None


def _parse_cone(text: str) -> list[int]:
    try:
        return sorted(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise SchemaError(f"a cone is a comma separated list of ray indices, got {text!r}") from None


def _parse_rows(text: str, n: int) -> Subspace:
    rows = [r for r in text.split(";") if r.strip()]
    try:
        vecs = [[parse_rat(x.strip()) for x in r.split(",")] for r in rows]
    except SchemaError:
        raise SchemaError(f"cannot parse subspace {text!r}; use rows like '1,1;0,1'") from None
    if any(len(v) != n for v in vecs):
        raise SchemaError(f"subspace vectors must have {n} entries")
    return Subspace.span(vecs, n)


def build_workspace(args) -> Workspace:
    if args.fixture:
        if args.fixture not in FIXTURES:
            raise SchemaError(f"unknown fixture {args.fixture!r}; known: {', '.join(sorted(FIXTURES))}")
        if args.nu is not None:
            if not args.fixture.startswith("picard2-r"):
                raise SchemaError("--nu only applies to the picard2 fixtures")
            parts = args.fixture.split("-")
            r = int(parts[1][1:])
            centre = {"stabilising": "stabilising", "destabilising": "destabilising"}.get(
                parts[2] if len(parts) > 2 else None)
            ws = picard_two(r, parse_rat(args.nu), centre)
        else:
            ws = load_fixture(args.fixture)
    elif args.workspace:
        ws = Workspace.from_json(_read_json(args.workspace))
    elif args.fan:
        ws = Workspace(fan_from_json(_read_json(args.fan)))
    else:
        raise SchemaError("give --fixture, --workspace or --fan")
    fan = ws.fan
    if args.sheaf:
        ws.sheaf = sheaf_from_json(_read_json(args.sheaf), fan)
    if args.pol:
        ws.polarisation = divisor_from_json(_read_json(args.pol), fan)
    if args.blowup_tau:
        ws.blowups = [_parse_cone(t) for t in args.blowup_tau]
    if args.a is not None or args.b is not None:
        if ws.eps_divisor is None or len(ws.eps_divisor) != 4:
            raise SchemaError("--a/--b only apply to the example-3-6 fixture")
        a = parse_rat(args.a) if args.a is not None else ws.eps_divisor[2]
        b = parse_rat(args.b) if args.b is not None else ws.eps_divisor[3]
        ws.eps_divisor = [Fraction(0), Fraction(0), a, b]
    if args.candidates:
        n = ws.sheaf.ambient_dim if ws.sheaf is not None else fan.rank
        extra = _read_json(args.candidates)
        ws.candidates = list(ws.candidates) + [subspace_from_json(v, n) for v in extra]
    return ws


def _need(value, what: str):
    if value is None:
        raise SchemaError(f"this command needs {what}")
    return value


def _subspaces(args, ws: Workspace) -> dict:
    """Named subspaces to report on: --subspace (name or rows) or the workspace's own."""
    n = ws.sheaf.ambient_dim if ws.sheaf is not None else ws.fan.rank
    if args.subspace:
        out = {}
        for text in args.subspace:
            out[text] = ws.subspaces[text] if text in ws.subspaces else _parse_rows(text, n)
        return out
    return dict(ws.subspaces)


def _steps(ws: Workspace):
    return pullback.blowup_chain(ws.fan, ws.blowups)


def _eps_divisor(args, ws: Workspace, fan) -> TDivisor | None:
    if args.eps_div:
        return divisor_from_json(_read_json(args.eps_div), fan)
    if ws.eps_divisor is not None:
        if len(ws.eps_divisor) != fan.n_rays:
            raise SchemaError("the workspace eps_divisor does not match the fan")
        return TDivisor(fan, tuple(ws.eps_divisor))
    return None


# ---------------------------------------------------------------------------
# reports


def _fmt(x) -> str:
    if isinstance(x, EpsPoly):
        return str(x)
    return rat_str(x)


def _candidate_json(c: stability.Candidate, gap) -> dict:
    return {"subspace": subspace_to_json(c.subspace) if c.subspace is not None else None,
            "dim": c.dim, "origin": c.origin, "gap": scalar_json(gap)}


def verdict_json(v: stability.Verdict) -> dict:
    out = {
        "kind": v.kind.value,
        "certainty": v.certainty.value,
        "slope": scalar_json(v.slope),
        "witnesses": [_candidate_json(c, g) for c, g in v.witnesses],
        "candidates": len(v.gaps),
        "closure": v.completeness,
    }
    if v.epsilon_bound is not None:
        out["epsilon_bound"] = rat_str(v.epsilon_bound)
        out["epsilon_unbounded"] = v.epsilon_unbounded
        out["gaps"] = [_candidate_json(c, g) for c, g in v.gaps]
    if v.audit is not None:
        out["audit"] = {"samples": v.audit.samples, "violations": v.audit.violations}
    return out


def verdict_text(v: stability.Verdict) -> list[str]:
    lines = [f"verdict: {v.kind.value} ({v.certainty.value}, {len(v.gaps)} candidates, closure {v.completeness})",
             f"mu(E) = {_fmt(v.slope)}"]
    if v.epsilon_bound is not None:
        note = " (no constraint found; any eps > 0)" if v.epsilon_unbounded else ""
        lines.append(f"eps0 = {rat_str(v.epsilon_bound)}{note}")
    for c, g in v.witnesses:
        lines.append(f"  witness {c.label()}: mu(E) - mu(E_F) = {_fmt(g)}")
    if v.audit is not None:
        lines.append(f"audit: {v.audit.samples} random subspaces, {v.audit.violations} violations")
    return lines


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args, ws: Workspace):
    problems = validate_fan(ws.fan)
    report = {"valid": not problems, "violations": problems,
              "complete": is_complete(ws.fan), "smooth": is_smooth(ws.fan)}
    if ws.sheaf is not None:
        report["sheaf_rank"] = ws.sheaf.rank
    text = [f"fan valid: {report['valid']}", f"complete: {report['complete']}", f"smooth: {report['smooth']}"]
    text += [f"  violation: {p}" for p in problems]
    return report, text, 0 if not problems else EXIT_PRECONDITION


def _divisor_list(args, ws: Workspace) -> list[TDivisor]:
    if not args.divisors:
        return []
    return [divisor_from_json(_read_json(p), ws.fan) for p in args.divisors.split(",")]


def cmd_intersect(args, ws: Workspace):
    fan = ws.fan
    divs = _divisor_list(args, ws)
    if divs:
        x = chow.intersection_number(divs)
        return {"intersection": scalar_json(x)}, [f"intersection number: {_fmt(x)}"], 0
    if fan.rank != 2:
        raise SchemaError("without --divisors the table of D_i . D_j is only printed for surfaces")
    table = [[chow.intersection_number([TDivisor.ray(fan, i), TDivisor.ray(fan, j)])
              for j in range(fan.n_rays)] for i in range(fan.n_rays)]
    text = [f"D{i + 1}.D{j + 1} = {_fmt(table[i][j])}" for i in range(fan.n_rays) for j in range(i, fan.n_rays)]
    return {"table": [[scalar_json(x) for x in row] for row in table]}, text, 0


def _div_arg(args, ws: Workspace) -> TDivisor:
    if args.div:
        return divisor_from_json(_read_json(args.div), ws.fan)
    return _need(ws.polarisation, "--div")


def cmd_degree(args, ws: Workspace):
    D = _div_arg(args, ws)
    L = _need(ws.polarisation, "--pol")
    Lp = _eps_divisor(args, ws, ws.fan)
    if Lp is not None:
        L = L + EpsPoly.eps() * Lp
    x = chow.degree(D, L)
    return {"degree": scalar_json(x)}, [f"degree: {_fmt(x)}"], 0


def cmd_ample(args, ws: Workspace):
    D = _div_arg(args, ws)
    Lp = _eps_divisor(args, ws, ws.fan)
    report = {"ample": chow.is_ample(D)}
    text = [f"ample: {report['ample']}"]
    if Lp is not None:
        r = chow.adiabatic_ample_threshold(D, Lp)
        report["threshold"] = None if r is None else rat_str(r)
        text.append(f"D + eps L' ample for 0 < eps < {'infinity' if r is None else rat_str(r)}")
    if D.is_integral():
        report["cartier"] = chow.is_cartier(D)
        text.append(f"Cartier: {report['cartier']}")
    return report, text, 0


def cmd_slope(args, ws: Workspace):
    E = _need(ws.sheaf, "a sheaf")
    L = _need(ws.polarisation, "--pol")
    Lp = _eps_divisor(args, ws, ws.fan)
    if Lp is not None:
        L = L + EpsPoly.eps() * Lp
    mu = klyachko.slope(E, L)
    report = {"slope": scalar_json(mu), "iota": [klyachko.iota(E, r) for r in range(ws.fan.n_rays)],
              "subsheaves": {}}
    text = [f"mu_L(E) = {_fmt(mu)}", "iota_rho = " + ", ".join(str(x) for x in report["iota"])]
    for name, F in _subspaces(args, ws).items():
        m = klyachko.slope(klyachko.subsheaf_from_subspace(E, F), L)
        report["subsheaves"][name] = scalar_json(m)
        text.append(f"mu_L(E_{name}) = {_fmt(m)}")
    return report, text, 0


def cmd_stability(args, ws: Workspace):
    E = _need(ws.sheaf, "a sheaf")
    L = _need(ws.polarisation, "--pol")
    cands = stability.candidate_subspaces(E, extra=ws.candidates)
    v = stability.stability_verdict(E, L, cands, threads=args.threads, audit_samples=args.audit_samples)
    return verdict_json(v), verdict_text(v), v.exit_code


def cmd_blowup(args, ws: Workspace):
    steps = _steps(ws)
    if not steps:
        raise SchemaError("give --blowup-tau")
    last = steps[-1]
    report = {"fan": fan_to_json(last.source), "new_rays": [s.new_ray for s in steps]}
    text = [f"blown-up fan: {len(last.source.rays)} rays, {len(last.source.max_cones)} maximal cones",
            "new rays: " + ", ".join(f"{s.new_ray} = {list(s.source.rays[s.new_ray])}" for s in steps)]
    return report, text, 0


def cmd_pullback(args, ws: Workspace):
    E = _need(ws.sheaf, "a sheaf")
    steps = _steps(ws)
    if not steps:
        raise SchemaError("give --blowup-tau")
    E1 = pullback.pullback_chain(steps, E)
    report = {"fan": fan_to_json(E1.fan), "sheaf": sheaf_to_json(E1), "subspaces": {}}
    text = [f"pulled-back sheaf on {len(E1.fan.rays)} rays"]
    for st in steps:
        flt = E1.filtrations[st.new_ray]
        text.append(f"exceptional ray {st.new_ray}: " +
                    ", ".join(f"{j}: dim {v.dim}" for j, v in flt.jumps))
    cur = E
    for k, st in enumerate(steps):
        for name, F in _subspaces(args, ws).items():
            d = pullback.pullback_defect(st, cur, F)
            report["subspaces"].setdefault(name, []).append(
                {"step": k, "saturated": d.total == 0, "defects": {str(j): x for j, x in d.levels},
                 "total": d.total})
            levels = ", ".join(f"d_{j} = {x}" for j, x in d.levels) or "all d_j = 0"
            sat = "saturated" if d.total == 0 else "NOT saturated"
            text.append(f"F = {name}, blow-up {k}: {levels}; total {d.total}; {sat}")
        cur = pullback.reflexive_pullback(st, cur)
    return report, text, 0


def cmd_adiabatic(args, ws: Workspace):
    E = _need(ws.sheaf, "a sheaf")
    L = _need(ws.polarisation, "--pol")
    steps = _steps(ws)
    if steps:
        source = steps[-1].source
    else:
        steps = [identity_morphism(ws.fan)]
        source = ws.fan
    Lp = _eps_divisor(args, ws, source)
    setup = stability.make_setup(steps, E, L, Lp)
    E1 = setup.pulled_back_sheaf()
    cands = stability.candidate_subspaces(E1, extra=ws.candidates)
    v = stability.adiabatic_verdict(setup, cands, threads=args.threads)
    report = verdict_json(v)
    report["slope_polynomial"] = scalar_json(EpsPoly.coerce(v.slope))
    text = verdict_text(v)
    for name, F in _subspaces(args, ws).items():
        g = stability.adiabatic_slope_gap(setup, F)
        report.setdefault("named_gaps", {})[name] = scalar_json(g)
        text.append(f"gap for {name}: {_fmt(g)}")
    return report, text, v.exit_code


def cmd_curve_criterion(args, ws: Workspace):
    E = _need(ws.sheaf, "a sheaf")
    tau = _parse_cone(args.tau) if args.tau else (ws.blowups[0] if ws.blowups else None)
    if tau is None:
        raise SchemaError("give --tau")
    b = pullback.blowup(ws.fan, tau)
    subs = _subspaces(args, ws)
    if not subs:
        raise SchemaError("give --subspace")
    report, text = {}, []
    for name, F in subs.items():
        x = stability.curve_blowup_criterion(b, E, F)
        report[name] = rat_str(x)
        sign = "stabilising" if x > 0 else ("destabilising" if x < 0 else "neutral")
        text.append(f"curve criterion for {name} at tau = {sorted(b.tau)}: {rat_str(x)} ({sign})")
    return {"criterion": report}, text, 0


COMMANDS = {
    "validate": (cmd_validate, "validate a fan and report completeness/smoothness"),
    "intersect": (cmd_intersect, "intersection numbers of divisors"),
    "degree": (cmd_degree, "degree D . L^(n-1), optionally with L + eps L'"),
    "ample": (cmd_ample, "ampleness (and Cartier) test"),
    "slope": (cmd_slope, "slopes of a sheaf and its induced subsheaves"),
    "stability": (cmd_stability, "stability verdict for a fixed polarisation"),
    "pullback": (cmd_pullback, "reflexive pullback along blow-ups, with saturation defects"),
    "blowup": (cmd_blowup, "star subdivision of a fan"),
    "adiabatic": (cmd_adiabatic, "stability of the pullback for L_eps = pi^* L + eps L'"),
    "curve-criterion": (cmd_curve_criterion, "sign criterion for blow-ups along invariant curves"),
}


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--audit-samples", type=int, default=0)
    src = common.add_argument_group("inputs")
    src.add_argument("--fixture", help="named fixture: " + ", ".join(sorted(FIXTURES)))
    src.add_argument("--workspace", help="workspace JSON file")
    src.add_argument("--fan", "--target-fan", dest="fan", help="fan JSON file")
    src.add_argument("--sheaf", help="sheaf JSON file")
    src.add_argument("--pol", help="polarisation divisor JSON file")
    src.add_argument("--div", help="divisor JSON file")
    src.add_argument("--divisors", help="comma separated divisor JSON files")
    src.add_argument("--eps-div", help="perturbation divisor L' JSON file")
    src.add_argument("--blowup-tau", action="append", help="blow-up centre as ray indices, e.g. 0,1 (repeatable)")
    src.add_argument("--tau", help="cone as ray indices")
    src.add_argument("--subspace", action="append", help="named subspace or rows like '1,1;0,1'")
    src.add_argument("--candidates", help="JSON list of extra candidate subspaces")
    src.add_argument("--a", help="coefficient of D3 in L' (example-3-6)")
    src.add_argument("--b", help="coefficient of D4 in L' (example-3-6)")
    src.add_argument("--nu", help="polarisation parameter (picard2 fixtures)")

    parser = _Parser(prog="toricstab", description="Slope stability on toric varieties, exactly.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, help=helptext, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    fn = COMMANDS[args.command][0]
    try:
        ws = build_workspace(args)
        report, text, code = fn(args, ws)
    except SchemaError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SCHEMA
    except UnsupportedError as e:
        print(f"unsupported: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (PreconditionError, FanError) as e:
        print(f"precondition failed: {e}", file=sys.stderr)
        return EXIT_PRECONDITION
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print("\n".join(text))
    return code


if __name__ == "__main__":
    sys.exit(main())
