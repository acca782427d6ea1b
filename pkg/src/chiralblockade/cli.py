"""Command-line interface.

    chiralblockade g2 [--config F] [--set k=v ...]       single point, both methods
    chiralblockade sweep --config F [--out F] [--jobs N]  grid -> CSV
    chiralblockade optimal [--config F] [--set k=v ...]   E_opt and phi_opt
    chiralblockade amplitudes [--config F] [--set k=v ...]
    chiralblockade check                                   built-in invariant suite

Exit status: 0 on success, 1 on bad input, 2 on a numerical failure
(including a failed ``check``).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import __version__
from .errors import BlockadeError, SolverError, ValidationError
from .sweep import RunSpec, evaluate_point, format_value, parse_config, run_sweep, write_csv

EXIT_OK, EXIT_INVALID, EXIT_SOLVER = 0, 1, 2


def _add_common(p: argparse.ArgumentParser, *, run_flags: bool = True) -> None:
    p.add_argument("--config", type=Path, help="configuration file (key = value lines)")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="extra config line, applied after the file; may be repeated")
    if run_flags:
        p.add_argument("--truncation", type=int, choices=(2, 3), help="Fock cutoff per mode")
        p.add_argument("--method", choices=("analytic", "master", "both"))
        p.add_argument("--reverse-field", action="store_true", help="swap the roles of a and b")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralblockade",
        description="Directional photon blockade in a chiral cavity-magnon system.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("g2", help="g2(0) of both cavity modes at one parameter point")
    _add_common(p)
    p = sub.add_parser("sweep", help="run a 1D or 2D sweep and write a CSV table")
    _add_common(p)
    p.add_argument("--out", type=Path, help="CSV path (default: 'output' key, else stdout)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p = sub.add_parser("optimal", help="pair-drive amplitude and phase that null C_200")
    _add_common(p, run_flags=False)
    p = sub.add_parser("amplitudes", help="closed-form and linear-solve amplitudes side by side")
    _add_common(p, run_flags=False)
    sub.add_parser("check", help="run the built-in invariant suite")
    return parser


def _load_spec(args) -> RunSpec:
    lines = []
    if args.config is not None:
        lines.append(args.config.read_text(encoding="utf-8").rstrip("\n"))
    for item in args.overrides:
        if "=" not in item:
            raise ValidationError(f"--set expects KEY=VALUE, got {item!r}")
        lines.append(item)
    spec = parse_config("\n".join(lines))
    changes = {}
    if getattr(args, "truncation", None) is not None:
        changes["truncation"] = args.truncation
    if getattr(args, "method", None) is not None:
        changes["method"] = args.method
    if getattr(args, "reverse_field", False):
        changes["reverse_field"] = True
    return spec.replace(**changes) if changes else spec


def _fmt(value) -> str:
    if value is None:
        return "decoupled"
    if isinstance(value, str):
        return value
    return f"{value:.10g}"


def cmd_g2(args, out) -> int:
    spec = _load_spec(args).replace(axes=())
    row = evaluate_point(spec, ())
    for name, value in zip(spec.columns(), row):
        if name.startswith("log10_"):
            continue
        if name == "phi_opt" and value is not None:
            print(f"{name:>16} = {value:.10g}  ({value / math.pi:.6f} pi)", file=out)
        else:
            print(f"{name:>16} = {_fmt(value)}", file=out)
    return EXIT_SOLVER if _has_failure(row[-1]) else EXIT_OK


def _has_failure(status: str) -> bool:
    """True if a status cell records more than decoupled/empty modes."""
    if status == "ok":
        return False
    return any(not n.endswith((":decoupled", ":empty")) for n in status.split(";"))


def cmd_sweep(args, out) -> int:
    if args.config is None:
        raise ValidationError("sweep needs --config")
    spec = _load_spec(args)
    if not spec.axes:
        raise ValidationError("config defines no sweep axis (sweep.1 = name, start, stop, count)")
    if args.jobs < 1:
        raise ValidationError("--jobs must be at least 1")
    table = run_sweep(spec, jobs=args.jobs)
    target = args.out if args.out is not None else spec.output
    if target is None:
        for line in table.provenance:
            print(f"# {line}", file=out)
        print(",".join(table.columns), file=out)
        for row in table.rows:
            print(",".join(format_value(v) for v in row), file=out)
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        write_csv(table, target)
        bad = sum(1 for r in table.rows if _has_failure(r[-1]))
        print(f"wrote {len(table.rows)} rows to {target} ({bad} with solver errors)", file=sys.stderr)
    return EXIT_OK


def cmd_optimal(args, out) -> int:
    from .truncated import optimal_drive

    params = _load_spec(args).base.normalized()
    cond = optimal_drive(params)
    print(f"e_opt   = {cond.e_opt:.16g}", file=out)
    if cond.degenerate:
        print("phi_opt = undefined (degenerate: no probe path to cancel)", file=out)
    else:
        print(f"phi_opt = {cond.phi_opt:.16g}  ({cond.phi_opt / math.pi:.8f} pi)", file=out)
    return EXIT_OK


def cmd_amplitudes(args, out) -> int:
    from .truncated import Amplitudes, closed_form_amplitudes, truncated_solve

    params = _load_spec(args).base.normalized()
    oracle = truncated_solve(params)
    try:
        closed = closed_form_amplitudes(params)
    except BlockadeError as exc:
        closed = None
        print(f"closed forms unavailable: {exc}", file=out)
    print(f"{'':>5} {'closed form':>48} {'linear solve':>48} {'rel diff':>9}", file=out)
    for label in Amplitudes.labels():
        ref = oracle[label]
        if closed is None:
            print(f"{label:>5} {'-':>48} {ref:>48.16g}", file=out)
            continue
        got = closed[label]
        rel = abs(got - ref) / abs(ref) if ref != 0 else abs(got)
        print(f"{label:>5} {got:>48.16g} {ref:>48.16g} {rel:>9.1e}", file=out)
    return EXIT_OK


def cmd_check(args, out) -> int:
    from .checks import run_checks

    results = run_checks()
    for r in results:
        print(f"{'PASS' if r.ok else 'FAIL'}  {r.name:<40} {r.detail}  [{r.seconds:.2f} s]", file=out)
    failed = sum(not r.ok for r in results)
    print(f"{len(results) - failed}/{len(results)} checks passed", file=out)
    return EXIT_OK if failed == 0 else EXIT_SOLVER


COMMANDS = {
    "g2": cmd_g2,
    "sweep": cmd_sweep,
    "optimal": cmd_optimal,
    "amplitudes": cmd_amplitudes,
    "check": cmd_check,
}


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; those are bad input here
        return EXIT_INVALID if exc.code not in (0, None) else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SolverError as exc:
        print(f"solver error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
