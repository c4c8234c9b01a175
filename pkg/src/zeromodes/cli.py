"""Command-line front end: ``zeromodes <command> ...``.

Exit codes: 0 success, 1 usage error, 2 numerical or consistency failure,
3 acceptance failure.
"""

import argparse
import json
import sys
from pathlib import Path

from . import acceptance, scanlab
from .errors import ZeromodesError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_ACCEPTANCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p):
    p.add_argument("--out", help="CSV output path (default: stdout)")
    p.add_argument("--json", action="store_true", default=None, help="also write a JSON mirror")
    p.add_argument("--workers", type=int, help="worker processes for scans")
    p.add_argument("--seed", type=int, help="reserved; all computations are deterministic")
    p.add_argument("--tol", type=float, help="zero-mode / saturation tolerance override")
    p.add_argument("--config", help="JSON file with defaults for any flag")


def build_parser():
    parser = _Parser(prog="zeromodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    bp = sub.add_parser("boson-pair", help="two coupled oscillators")
    bp_sub = bp.add_subparsers(dest="action", parser_class=_Parser)
    path = bp_sub.add_parser("path", help="entropy along a degeneracy path")
    path.add_argument("--kind", choices=["I", "II", "III", "custom"])
    path.add_argument("--base", help="j0,k0,l0,m0")
    path.add_argument("--tau-grid")
    path.add_argument("--p-j", type=float)
    path.add_argument("--p-l", type=float)
    _common(path)

    bc = sub.add_parser("boson-chain", help="harmonic chain")
    bc_sub = bc.add_subparsers(dest="action", parser_class=_Parser)
    scan = bc_sub.add_parser("scan", help="entropy against mass or subsystem size")
    scan.add_argument("--n", type=int)
    scan.add_argument("--mass-grid")
    scan.add_argument("--L-grid", dest="L_grid")
    scan.add_argument("--mass", type=float)
    scan.add_argument("--subsystem", type=int)
    scan.add_argument("--lattice-a", type=float)
    scan.add_argument("--boundary", choices=["periodic", "dirichlet"])
    _common(scan)

    fe = sub.add_parser("fermion", help="staggered fermion chain")
    fe_sub = fe.add_subparsers(dest="action", parser_class=_Parser)
    fscan = fe_sub.add_parser("scan", help="entropy against K or L")
    fscan.add_argument("--sweep", choices=["K", "L"])
    fscan.add_argument("--grid")
    fscan.add_argument("--K", dest="K", type=float)
    fscan.add_argument("--L", dest="L", type=int)
    fscan.add_argument("--n-cells", type=int)
    _common(fscan)
    fasy = fe_sub.add_parser("asymptotic", help="root-geometry entropy estimate")
    fasy.add_argument("--K-grid", dest="K_grid")
    _common(fasy)
    fsat = fe_sub.add_parser("saturation", help="plateau entropy against single-cell entropy")
    fsat.add_argument("--K-grid", dest="K_grid")
    fsat.add_argument("--L-max", type=int)
    _common(fsat)

    fit = sub.add_parser("fit", help="fit S = A ln(x) + B to a table")
    fit.add_argument("--input")
    fit.add_argument("--x-col")
    fit.add_argument("--y-col")
    fit.add_argument("--window", help="lo:hi row range (half-open)")
    fit.add_argument("--saturation", action="store_true", default=None, help="also run saturation detection")
    _common(fit)

    ver = sub.add_parser("verify", help="run the acceptance suite")
    ver.add_argument("--only", help="comma-separated criterion numbers")
    _common(ver)

    fig = sub.add_parser("figures", help="write the reference figure tables")
    fig.add_argument("--outdir")
    _common(fig)
    return parser


def _apply_config(args):
    if not args.config:
        return
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in cfg.items():
        dest = key.lstrip("-").replace("-", "_")
        if dest not in vars(args):
            raise UsageError(f"unknown config key {key!r}")
        if getattr(args, dest) is None:
            setattr(args, dest, value)


def _need(args, *names):
    for n in names:
        if getattr(args, n) is None:
            raise UsageError(f"missing required option --{n.replace('_', '-')}")


def _grid(text, what):
    try:
        return scanlab.parse_grid(text)
    except ValueError as exc:
        raise UsageError(f"bad {what}: {exc}") from exc


def _emit(table, args):
    if args.out:
        jpath = scanlab.write_table(table, args.out, json_mirror=bool(args.json))
        print(f"wrote {args.out}" + (f" and {jpath}" if jpath else ""), file=sys.stderr)
    elif args.json:
        sys.stdout.write(scanlab.table_to_json(table))
    else:
        sys.stdout.write(scanlab.table_to_csv(table))
    failed = [r for r in table.rows if r.get("status", "ok") != "ok"]
    for r in failed:
        print(f"row {r['param']}: {r['error']}", file=sys.stderr)


def _scan(cfg, args):
    try:
        cfg = scanlab.ScanConfig(**cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    _emit(scanlab.run_scan(cfg, args.workers or 1), args)
    return EXIT_OK


def _boson_pair(args):
    _need(args, "tau_grid")
    base = (2.0, 1.0, 2.0, 1.0)
    if args.base:
        try:
            base = tuple(float(v) for v in args.base.split(","))
        except ValueError as exc:
            raise UsageError(f"bad --base: {exc}") from exc
        if len(base) != 4:
            raise UsageError("--base needs four values j0,k0,l0,m0")
    fixed = {"base": list(base), "kind": args.kind or "II", "p_j": args.p_j or 1.0, "p_l": args.p_l or 1.0}
    if args.tol is not None:
        fixed["tol"] = args.tol
    grid = _grid(args.tau_grid, "--tau-grid")
    return _scan({"model": "BosonPair", "sweep": "Tau", "grid": grid, "fixed": fixed, "out": args.out or ""}, args)


def _boson_chain(args):
    n = args.n or 40
    if (args.mass_grid is None) == (args.L_grid is None):
        raise UsageError("give exactly one of --mass-grid and --L-grid")
    fixed = {"n": n, "lattice_a": args.lattice_a or 1.0, "boundary": args.boundary or "periodic"}
    if args.tol is not None:
        fixed["tol"] = args.tol
    if args.mass_grid is not None:
        sweep, grid = "Mass", _grid(args.mass_grid, "--mass-grid")
        fixed["subsystem"] = args.subsystem or n // 2
    else:
        _need(args, "mass")
        sweep, grid = "SubsystemL", _grid(args.L_grid, "--L-grid")
        fixed["mass"] = args.mass
    return _scan({"model": "BosonChain", "sweep": sweep, "grid": grid, "fixed": fixed, "out": args.out or ""}, args)


def _fermion(args):
    if args.action == "asymptotic":
        _need(args, "K_grid")
        _emit(scanlab.asymptotic_table(_grid(args.K_grid, "--K-grid")), args)
        return EXIT_OK
    if args.action == "saturation":
        _need(args, "K_grid")
        tab = scanlab.saturation_vs_L1(_grid(args.K_grid, "--K-grid"), args.L_max or 32, rel_tol=args.tol or 1e-2)
        _emit(tab, args)
        return EXIT_OK
    _need(args, "sweep", "grid")
    fixed = {}
    if args.sweep == "K":
        fixed["L"] = args.L or 1
        sweep = "K"
    else:
        fixed["K"] = args.K if args.K is not None else 0.0
        sweep = "SubsystemL"
    if args.n_cells is not None:
        fixed["n_cells"] = args.n_cells
    grid = _grid(args.grid, "--grid")
    return _scan({"model": "Fermion", "sweep": sweep, "grid": grid, "fixed": fixed, "out": args.out or ""}, args)


def _fit(args):
    _need(args, "input")
    try:
        table = scanlab.read_csv(args.input)
    except (OSError, StopIteration) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from exc
    x_col, y_col = args.x_col or "param", args.y_col or "S"
    for c in (x_col, y_col):
        if c not in table.columns:
            raise UsageError(f"column {c!r} not in {list(table.columns)}")
    window = None
    if args.window:
        try:
            lo, hi = (int(v) for v in args.window.split(":"))
        except ValueError as exc:
            raise UsageError(f"--window must be lo:hi, got {args.window!r}") from exc
        window = (lo, hi)
    fit = scanlab.fit_log(table, x_col, window, y_col)
    out = {"A": fit.A, "B": fit.B, "residual_rms": fit.residual_rms, "window": list(fit.window)}
    if args.saturation:
        sat = scanlab.detect_saturation(table, args.tol or 1e-2, y_col)
        out.update(saturated=sat.saturated, plateau_value=sat.plateau_value, onset_index=sat.onset_index)
    text = json.dumps(out, indent=1, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _verify(args):
    only = None
    if args.only:
        try:
            only = [int(v) for v in str(args.only).split(",")]
        except ValueError as exc:
            raise UsageError(f"bad --only: {exc}") from exc
        unknown = set(only) - set(acceptance.CRITERIA)
        if unknown:
            raise UsageError(f"unknown criteria {sorted(unknown)}")
    results = acceptance.run_all(only)
    lines = [acceptance.format_result(r) for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"{passed}/{len(results)} criteria passed")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return EXIT_OK if passed == len(results) else EXIT_ACCEPTANCE


def _figures(args):
    outdir = Path(args.outdir or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    for stem, table in scanlab.figure_tables().items():
        scanlab.write_table(table, outdir / f"{stem}.csv", json_mirror=bool(args.json))
        print(f"wrote {outdir / (stem + '.csv')}", file=sys.stderr)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing command")
        if args.command in ("boson-pair", "boson-chain", "fermion") and getattr(args, "action", None) is None:
            raise UsageError(f"{args.command}: missing subcommand")
        _apply_config(args)
        handler = {
            "boson-pair": _boson_pair,
            "boson-chain": _boson_chain,
            "fermion": _fermion,
            "fit": _fit,
            "verify": _verify,
            "figures": _figures,
        }[args.command]
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"zeromodes: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ZeromodesError, ValueError) as exc:
        print(f"zeromodes: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
