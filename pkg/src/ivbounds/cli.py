"""Command-line front end: ``ivbounds {bounds,oracle,check,simulate}``.

Reports go to stdout as JSON, diagnostics to stderr. Exit codes: 0 success,
1 input or usage error, 2 domain verdict (incompatible law, infeasible oracle,
violated inequalities, unstable market).
"""

from __future__ import annotations

import argparse
import glob as globmod
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .bounds import natural_bounds, sharp_report
from .equilibrium import (
    MarketConfig,
    MarketError,
    equilibrium_point,
    panel_to_csv,
    run_panel,
    simulate_interval,
    stability,
    structural_residuals,
)
from .feasibility import FLOAT_TOL, check_joint, iv_compatible, variation_independence_probe
from .law import CounterfactualJoint, LawError, ObservedLaw, is_exact, read_law, validate_law
from .oracle import oracle_ace_bounds

OK, INPUT_ERROR, VERDICT = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    inputs: list
    flags: dict = field(default_factory=dict)
    seed: object = None
    mode: str = None
    version: str = __version__


def _dump(obj, pretty: bool) -> str:
    if pretty:
        return json.dumps(obj, indent=2)
    return json.dumps(obj, separators=(",", ":"))


def _load_law(path: str, args) -> ObservedLaw:
    law = read_law(path, args.format)
    if args.mode == "exact":
        law = law.to_exact()
    elif args.mode == "float":
        law = law.to_float()
    tol = args.tol if args.tol is not None else law.tol
    problems = validate_law(law, tol)
    if problems:
        raise LawError("; ".join(problems))
    if not law.exact and args.tol is not None:
        # renormalize arms that are within the user's tolerance
        cells = {}
        for z in law.arms:
            s = sum(law.arm(z).values())
            cells.update({(z, x, y): v / s for (x, y), v in law.arm(z).items()})
        law = ObservedLaw(law.K, cells, law.arm_labels)
    return law


def _manifest(args, command: str, path: str, mode: str, **flags) -> dict:
    base = {"format": args.format, "tol": args.tol}
    base.update(flags)
    return asdict(RunManifest(command, [path], base, getattr(args, "seed", None), mode))


def _float_block(interval):
    return None if interval is None else [float(v) for v in interval]


def run_bounds(path: str, args) -> tuple[int, dict]:
    law = _load_law(path, args)
    report = sharp_report(law)
    out = {"manifest": _manifest(args, "bounds", path, "rational" if law.exact else "float")}
    out.update(report.to_json())
    return (OK if report.compatible else VERDICT), out


def run_oracle(path: str, args) -> tuple[int, dict]:
    if args.no_defiers and not args.ordered:
        raise UsageError("--no-defiers requires --ordered z1,z2,...")
    law = _load_law(path, args)
    order = None
    if args.no_defiers:
        order = [s.strip() for s in args.ordered.split(",")]
        if sorted(order) != sorted(law.arm_labels):
            raise UsageError(f"--ordered must list every arm exactly once: {list(law.arm_labels)}")
    res = oracle_ace_bounds(law, monotone=args.no_defiers, order=order)
    if args.no_defiers:
        closed, kind = natural_bounds(law), "natural"
        compatible = True
    else:
        report = sharp_report(law)
        closed, kind, compatible = report.ace_sharp, "sharp", report.compatible
    if res.feasible:
        tol = 0 if law.exact else FLOAT_TOL
        matches = all(abs(a - b) <= tol for a, b in zip(res.ace, closed))
    else:
        matches = not compatible
    out = {"manifest": _manifest(args, "oracle", path, "rational" if law.exact else "float",
                                 no_defiers=args.no_defiers, ordered=order)}
    out.update(res.to_json())
    out["closed_form"] = closed.to_json()
    out["closed_form_kind"] = kind
    out["matches_closed_form"] = matches
    if law.exact:
        out["float"] = {"ace": _float_block(res.ace), "closed_form": _float_block(closed)}
    return (OK if res.feasible else VERDICT), out


def run_check(path: str, args) -> tuple[int, dict]:
    law = _load_law(path, args)
    mode = "rational" if law.exact else "float"
    out = {"manifest": _manifest(args, "check", path, mode, joint=args.joint, grid=args.grid)}
    if args.joint:
        try:
            joint = CounterfactualJoint.from_json(json.loads(Path(args.joint).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise LawError(f"cannot read joint {args.joint}: {exc}") from exc
        if law.exact and not is_exact(joint.pi.values()):
            law = law.to_float()
        records = check_joint(law, joint, args.tol)
        bad = [r.to_json() for r in records if not r.satisfied]
        out.update(records=[r.to_json() for r in records], violations=bad, all_satisfied=not bad)
        return (OK if not bad else VERDICT), out
    compatible = iv_compatible(law)
    out["compatible"] = compatible
    if args.grid is not None:
        if not compatible:
            out["variation_independent"] = None
            return VERDICT, out
        vi = variation_independence_probe(law, args.grid)
        out["variation_independent"] = vi
        return (OK if vi else VERDICT), out
    return (OK if compatible else VERDICT), out


COMMANDS = {"bounds": run_bounds, "oracle": run_oracle, "check": run_check}


def _run_one(command: str, path: str, args) -> tuple[int, str, str]:
    try:
        code, out = COMMANDS[command](path, args)
        return code, _dump(out, args.pretty), ""
    except UsageError as exc:
        return INPUT_ERROR, "", f"usage error: {exc}"
    except (LawError, OSError, UnicodeDecodeError) as exc:
        return INPUT_ERROR, "", f"{path}: {exc}"


def _law_command(args) -> int:
    if bool(args.input) == bool(args.glob):
        print("give exactly one of INPUT or --glob PATTERN", file=sys.stderr)
        return INPUT_ERROR
    if args.input:
        code, text, err = _run_one(args.command, args.input, args)
        if text:
            print(text)
        if err:
            print(err, file=sys.stderr)
        return code
    paths = sorted(globmod.glob(args.glob))
    if not paths:
        print(f"no files match {args.glob!r}", file=sys.stderr)
        return INPUT_ERROR
    if args.workers > 1:
        with ProcessPoolExecutor(args.workers) as pool:
            results = list(pool.map(_run_one, [args.command] * len(paths), paths, [args] * len(paths)))
    else:
        results = [_run_one(args.command, p, args) for p in paths]
    codes = []
    for code, text, err in results:
        if text:
            print(text if not args.pretty else json.dumps(json.loads(text), separators=(",", ":")))
        if err:
            print(err, file=sys.stderr)
        codes.append(code)
    if INPUT_ERROR in codes:
        return INPUT_ERROR
    return VERDICT if VERDICT in codes else OK


def cmd_simulate(args) -> int:
    try:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        if args.delta is not None:
            data["delta"] = args.delta
        cfg = MarketConfig.from_json(data)
    except (OSError, json.JSONDecodeError, MarketError, TypeError, ValueError) as exc:
        print(f"{args.config}: {exc}", file=sys.stderr)
        return INPUT_ERROR
    stab = stability(cfg)
    manifest = asdict(RunManifest(
        "simulate", [args.config],
        {"panel": args.panel, "delta": cfg.delta, "noise_sd_d": args.noise_sd_d, "noise_sd_s": args.noise_sd_s},
        args.seed, "float",
    ))
    stab_json = {"contraction": stab.contraction, "spectral_radius": stab.spectral_radius, "stable": stab.stable}
    if args.panel is not None:
        if not stab.stable:
            print("unstable market: will not equilibrate within the unit interval", file=sys.stderr)
            return VERDICT
        if args.panel < 1:
            print("--panel must be at least 1", file=sys.stderr)
            return INPUT_ERROR
        rows = run_panel(cfg, args.panel, args.noise_sd_d, args.noise_sd_s, args.seed)
        text = panel_to_csv(rows)
        res = [structural_residuals(cfg, r) for r in rows]
        summary = {
            "manifest": manifest,
            "stability": stab_json,
            "rows": len(rows),
            "max_demand_residual": max(abs(d) for d, _ in res),
            "max_supply_residual": max(abs(s) for _, s in res),
        }
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            print(_dump(summary, args.pretty))
        else:
            sys.stdout.write(text)
            print(_dump(summary, False), file=sys.stderr)
        return OK
    avg = simulate_interval(cfg)
    out = {"manifest": manifest, "config": cfg.to_json(), "stability": stab_json}
    try:
        p_star, q_star = equilibrium_point(cfg)
        out["equilibrium"] = {"p_star": p_star, "q_star": q_star}
    except MarketError:
        out["equilibrium"] = None
    out["averages"] = {
        "p_bar": avg.p_bar, "q_d_bar": avg.q_d_bar, "q_s_bar": avg.q_s_bar,
        "converged": avg.converged, "diverged": avg.diverged,
    }
    # NaN is not valid JSON
    text = _dump(out, args.pretty).replace("NaN", "null")
    print(text)
    return OK if stab.stable else VERDICT


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None,
                        help="input format (default: by file extension)")
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact")
    mode.add_argument("--float", dest="mode", action="store_const", const="float")
    common.add_argument("--tol", type=float, default=None, help="float-mode validation tolerance")
    common.add_argument("--pretty", action="store_true")
    common.add_argument("--glob", default=None, help="run over every file matching this pattern")
    common.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="ivbounds", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="closed-form sharp and natural ACE bounds")
    p.add_argument("input", nargs="?")

    p = sub.add_parser("oracle", parents=[common], help="response-type LP bounds")
    p.add_argument("input", nargs="?")
    p.add_argument("--no-defiers", action="store_true")
    p.add_argument("--ordered", default=None, help="arm labels from lowest to highest, comma separated")

    p = sub.add_parser("check", parents=[common], help="IV-model compatibility and variation independence")
    p.add_argument("input", nargs="?")
    p.add_argument("--joint", default=None, help="counterfactual joint JSON to test")
    p.add_argument("--grid", type=int, default=None, help="grid size for the variation-independence probe")

    p = sub.add_parser("simulate", help="market equilibration within unit intervals")
    p.add_argument("config")
    p.add_argument("--panel", type=int, default=None, help="number of intervals")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--noise-sd-d", type=float, default=1.0)
    p.add_argument("--noise-sd-s", type=float, default=1.0)
    p.add_argument("--out", default=None, help="write the panel CSV here and the summary to stdout")
    p.add_argument("--pretty", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "check" and args.grid is not None and args.grid < 2:
        print("--grid must be at least 2", file=sys.stderr)
        return INPUT_ERROR
    return _law_command(args)


if __name__ == "__main__":
    sys.exit(main())
