"""Command-line driver: ``daugavet-lab <subcommand> ...``.

Exit codes: 0 all PASS, 1 any FAIL, 2 any INCONCLUSIVE (no FAIL), 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

from ..errors import ConfigError, LabError
from .report import EXIT_CODES, EXIT_CONFIG, FAIL, INCONCLUSIVE, PASS, Scenario, emit_report, run_scenario
from .scenarios import get_scenario, list_scenarios, registry


def _load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc


def _overrides(args) -> dict:
    out = {}
    for key in ("seed", "budget", "tol"):
        v = getattr(args, key, None)
        if v is not None:
            out[key] = v
    return out


def _single_op_scenario(args, op: dict, name: str) -> Scenario:
    """Wrap one op over a config's named objects as an ad hoc scenario."""
    doc = _load_config(args.config)
    construction = doc.get("construction", doc)
    construction = {k: v for k, v in construction.items() if k != "ops"}
    construction["ops"] = [dict(op, id=name)]
    expected = {}
    if name in ("defect", "alt-defect"):
        path = "verdict" if name == "defect" else "report.verdict"
        expected[name] = [{"path": path, "equals": "DaugavetHolds"}]
    elif name == "slice-check":
        expected[name] = [{"path": "verdict", "equals": "HoldsOnGrid"}]
    elif name == "kyfan":
        expected[name] = [{"path": "sample.max_residual", "le": 1e-9},
                          {"path": "consequences_hold", "equals": True}]
    return Scenario(name, construction, expected, doc.get("anchor", "command line"))


def _run_one(item):
    scenario, overrides, timing = item
    return run_scenario(scenario, overrides, timing)


def _finish(reports, args) -> int:
    text = emit_report(reports if len(reports) > 1 else reports[0], args.report, args.format)
    if args.report is None or args.format == "table":
        sys.stdout.write(text if args.report is None else "")
    verdicts = [r.verdict for r in reports]
    if FAIL in verdicts:
        return EXIT_CODES[FAIL]
    if INCONCLUSIVE in verdicts:
        return EXIT_CODES[INCONCLUSIVE]
    return EXIT_CODES[PASS]


def cmd_scenario(args) -> int:
    if args.action == "list":
        for name, anchor in list_scenarios():
            print(f"{name:<28} {anchor}")
        return 0
    if args.config:
        scenarios = [Scenario.from_dict(_load_config(args.config))]
    elif not args.names or args.names == ["all"]:
        scenarios = list(registry().values())
    else:
        scenarios = [get_scenario(n) for n in args.names]
    items = [(s, _overrides(args), args.timing) for s in scenarios]
    if args.jobs > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            reports = list(pool.map(_run_one, items))
    else:
        reports = [_run_one(it) for it in items]
    return _finish(reports, args)


def cmd_dump(args) -> int:
    sys.stdout.write(get_scenario(args.name).to_json() + "\n")
    return 0


def cmd_op(args) -> int:
    name = args.command
    if name == "norm":
        op = {"op": "norm", "map": args.map, "restriction": args.restriction}
    elif name == "defect":
        op = {"op": "defect", "phi": args.phi, "psi": args.psi, "restriction": args.restriction}
    elif name == "alt-defect":
        op = {"op": "alt_defect", "phi": args.phi, "psi": args.psi, "restriction": args.restriction,
              "grid_resolution": args.grid}
    elif name == "slice-check":
        op = {"op": "continuity", "psi": args.psi, "phi": args.phi, "kind": args.kind,
              "functionals": json.loads(args.functionals), "epsilons": args.epsilons}
    else:
        op = {"op": "kyfan", "phi": args.phi, "psi": args.psi, "z": json.loads(args.z), "K": args.K,
              "B": {"sampler": "ball", "count": args.samples}, "combos": args.combos}
    op = {k: v for k, v in op.items() if v is not None}
    scenario = _single_op_scenario(args, op, name)
    return _finish([run_scenario(scenario, _overrides(args), args.timing)], args)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (overrides the scenario)")
    common.add_argument("--budget", type=int, default=None, help="evaluations per sup-norm call")
    common.add_argument("--tol", type=float, default=None, help="verdict tolerance")
    common.add_argument("--report", default=None, help="write the report to this path")
    common.add_argument("--format", choices=["json", "table"], default="json")
    common.add_argument("--jobs", type=int, default=1, help="run scenarios in parallel")
    common.add_argument("--timing", action="store_true", help="include wall times in reports")

    parser = argparse.ArgumentParser(prog="daugavet-lab",
                                     description="Numerical checks of the Daugavet equation for bounded maps.")
    sub = parser.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", parents=[common], help="list or run registered scenarios")
    sc.add_argument("action", choices=["list", "run"])
    sc.add_argument("names", nargs="*", help="scenario names, or 'all'")
    sc.add_argument("--config", default=None, help="run a scenario loaded from a JSON file")
    sc.set_defaults(func=cmd_scenario)

    dump = sub.add_parser("dump", help="print a registered scenario as JSON")
    dump.add_argument("name")
    dump.set_defaults(func=cmd_dump)

    def op_parser(name, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--config", required=True, help="JSON file with spaces/maps/scalars/regions")
        p.set_defaults(func=cmd_op)
        return p

    p = op_parser("norm", "estimate sup ||Phi(x)|| over the ball or a region")
    p.add_argument("--map", default="phi")
    p.add_argument("--restriction", default=None)
    for name, help_text in (("defect", "Daugavet defect of Phi and Psi"),
                            ("alt-defect", "alternative Daugavet defect over a rotation grid")):
        p = op_parser(name, help_text)
        p.add_argument("--phi", default="phi")
        p.add_argument("--psi", default="psi")
        p.add_argument("--restriction", default=None)
        if name == "alt-defect":
            p.add_argument("--grid", type=int, default=None, help="complex grid resolution")
    p = op_parser("slice-check", "slice continuity of Psi with respect to Phi")
    p.add_argument("--phi", default="phi")
    p.add_argument("--psi", default="psi")
    p.add_argument("--kind", choices=["strong", "weak"], default="strong")
    p.add_argument("--functionals", required=True, help="JSON list of codomain functionals")
    p.add_argument("--epsilons", type=float, nargs="+", default=[0.05, 0.1])
    p = op_parser("kyfan", "averaged inequality and certificate search")
    p.add_argument("--phi", default="phi")
    p.add_argument("--psi", default="psi")
    p.add_argument("--z", required=True, help="JSON vector")
    p.add_argument("--K", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--combos", type=int, default=1000)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, KeyError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except LabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CODES[FAIL]


if __name__ == "__main__":
    sys.exit(main())
