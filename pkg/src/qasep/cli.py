"""Command-line front end.

Exit codes: 0 success or every check holds, 1 a check failed, 2 usage error.
Payloads go to stdout; stderr carries diagnostics only. If QASEP_OUTPUT_DIR is
set (or --out-dir given) payloads are also written there.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .config import Sector
from .generator import generator, perk_schultz
from .laurent import ONE, Q, evaluate
from .measure import tabulated_weights_check, kernel_check, partition_check, sector_measure, verify_detailed_balance, verify_measure_formulas, verify_stationarity
from .operators import SparseQMatrix
from .simulate import SimConfig, run, tv_distance
from .symmetry import RelationReport, build_R, lowering_construction_check, rep_global, transform_Y, verify_algebra, verify_similarity, verify_symmetry

OUTPUT_DIR_ENV = "QASEP_OUTPUT_DIR"
CAPS = {"algebra": 5, "symmetry": 6, "measure": 6, "dump": 6}


class UsageError(Exception):
    pass


# -- helpers -----------------------------------------------------------------------


def _emit(args, text: str, name: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")
    out_dir = args.out_dir or os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / name).write_text(text)


def _cap(kind: str, L: int, force: bool) -> None:
    if L < 1:
        raise UsageError(f"--sites must be at least 1, got {L}")
    if L > CAPS[kind] and not force:
        raise UsageError(f"--sites {L} exceeds the {kind} cap of {CAPS[kind]}; pass --force to override")


def _entry(text: str) -> tuple[int, int]:
    try:
        r, c = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected ROW,COL, got {text!r}") from exc
    return r, c


def _corrupt(M: SparseQMatrix, rc: tuple[int, int]) -> SparseQMatrix:
    """Perturb one entry: a zero becomes 1, anything else is multiplied by q."""
    r, c = rc
    if not (1 <= r <= M.dim and 1 <= c <= M.dim):
        raise UsageError(f"entry ({r},{c}) outside 1..{M.dim}")
    old = M[r, c]
    return M.with_entry(r, c, ONE if old.is_zero() else old * Q)


def _rep_name(text: str) -> tuple[str, int, str]:
    """'X1+' -> ('X', 1, '+')."""
    if len(text) != 3 or text[0] not in "XY" or text[1] not in "123" or text[2] not in "+-":
        raise UsageError(f"unknown representation matrix {text!r}; expected X1+, Y2-, ...")
    return text[0], int(text[1]), text[2]


def _report(args, report: RelationReport, name: str) -> int:
    _emit(args, report.to_json(), name)
    for r in report.failed():
        print(f"FAILED: {r.relation} (L={r.L})", file=sys.stderr)
    return 0 if report.holds else 1


def _gens(args, L):
    gens = rep_global(L)
    if getattr(args, "corrupt_rep", None):
        kind, i, s = _rep_name(args.corrupt_rep[0])
        if kind != "X" or i == 3:
            raise UsageError("--corrupt-rep applies to X1+, X1-, X2+ or X2-")
        gens = gens.replace(i, s, _corrupt(gens.X(i, s), _entry(args.corrupt_rep[1])))
    return gens


# -- commands ----------------------------------------------------------------------


def cmd_verify(args) -> int:
    L = args.sites
    if args.what == "algebra":
        _cap("algebra", L, args.force)
        return _report(args, verify_algebra(L, _gens(args, L)), f"verify_algebra_L{L}.json")
    _cap("symmetry", L, args.force)
    H = generator(L)
    if args.corrupt_rate:
        H = _corrupt(H, args.corrupt_rate)
    gens = _gens(args, L)
    R = build_R(L)
    report = verify_similarity(L, H, None, R)
    report.extend(verify_symmetry(L, H, None, gens, R))
    return _report(args, report, f"verify_symmetry_L{L}.json")


def cmd_stationary(args) -> int:
    if args.normalize and args.q is None:
        raise UsageError("--normalize requires --q")
    if args.q is not None and not args.q > 0:
        raise UsageError("--q must be positive")
    try:
        sector = Sector(args.n, args.m).validate(args.sites)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    meas = sector_measure(args.sites, sector, normalize_at=args.q if args.normalize else None, evaluate_at=None if args.normalize else args.q)
    ext = "csv" if args.format == "csv" else "json"
    text = meas.to_csv() if args.format == "csv" else meas.to_json()
    _emit(args, text, f"stationary_L{args.sites}_N{args.n}_M{args.m}.{ext}")
    return 0


def cmd_check(args) -> int:
    if args.what == "appendix":
        return _report(args, tabulated_weights_check(), "check_tables.json")
    if args.sites is None:
        raise UsageError(f"check {args.what} needs --sites")
    _cap("measure", args.sites, args.force)
    L = args.sites
    if args.what == "partition":
        return _report(args, partition_check(L), f"check_partition_L{L}.json")
    if args.what == "measure":
        H = generator(L)
        if args.corrupt_rate:
            H = _corrupt(H, args.corrupt_rate)
        report = verify_measure_formulas(L)
        report.extend(verify_detailed_balance(L, H=H))
        report.extend(verify_stationarity(L, H))
        return _report(args, report, f"check_measure_L{L}.json")
    if args.what == "kernel":
        if args.q is None or not args.q > 0:
            raise UsageError("check kernel needs a positive --q")
        report = RelationReport()
        for n in range(L + 1):
            for m in range(L - n + 1):
                report.extend(kernel_check(L, Sector(n, m), args.q))
        return _report(args, report, f"check_kernel_L{L}.json")
    # lowering
    gens, R = rep_global(L), build_R(L)
    report = RelationReport()
    for n in range(L + 1):
        for m in range(L - n + 1):
            report.extend(lowering_construction_check(L, n, m, gens, R))
    return _report(args, report, f"check_lowering_L{L}.json")


def cmd_simulate(args) -> int:
    if (args.t_max is None) == (args.events is None):
        raise UsageError("give exactly one of --t-max and --events")
    try:
        cfg = SimConfig(
            L=args.sites,
            sector=Sector(args.n, args.m),
            q0=args.q,
            w=args.w,
            seed=args.seed,
            t_max=args.t_max,
            n_events=args.events,
            burn_in=args.burn_in,
            replicas=args.replicas,
            initial=args.initial,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    emp = run(cfg)
    for w in emp.warnings:
        print(f"warning: {w}", file=sys.stderr)
    exact = sector_measure(cfg.L, cfg.sector, normalize_at=cfg.q0) if args.compare else None
    if exact is not None:
        print(f"tv_distance={tv_distance(emp, exact)!r}", file=sys.stderr)
    stem = f"simulate_L{cfg.L}_N{cfg.sector.N}_M{cfg.sector.M}_seed{cfg.seed}"
    if args.format == "csv":
        _emit(args, emp.to_csv(exact), stem + ".csv")
        out_dir = args.out_dir or os.environ.get(OUTPUT_DIR_ENV)
        if out_dir:
            (Path(out_dir) / (stem + "_summary.json")).write_text(emp.summary_json(exact))
    else:
        payload = {"summary": emp.summary(exact), "histogram": emp.histogram_rows(exact)}
        _emit(args, json.dumps(payload, indent=2), stem + ".json")
    return 0


def cmd_dump(args) -> int:
    L = args.sites
    _cap("dump", L, args.force)
    if args.target == "generator":
        M = generator(L)
    elif args.target == "perk-schultz":
        M = perk_schultz(L)
    elif args.target == "rmatrix":
        M = build_R(L)
    else:
        if not args.name:
            raise UsageError("dump rep needs a matrix name such as X1+ or Y2-")
        kind, i, s = _rep_name(args.name)
        gens = rep_global(L)
        M = gens.X(i, s) if kind == "X" else transform_Y(gens, build_R(L))[(i, s)]
    if args.q is None:
        text = M.dump()
    else:
        if not args.q > 0:
            raise UsageError("--q must be positive")
        text = "".join(f"{r} {c} {evaluate(v, args.q)!r}\n" for r, c, v in M.entries())
    label = args.target + (f"_{args.name}" if args.target == "rep" else "")
    _emit(args, text, f"dump_{label}_L{L}.txt")
    return 0


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qasep", description="Exact and Monte Carlo checks for the two-species exclusion process with reflecting ends.")
    p.add_argument("--out-dir", default=None, help=f"also write payloads here (default: ${OUTPUT_DIR_ENV})")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="exact algebra or symmetry relations")
    v.add_argument("what", choices=["algebra", "symmetry"])
    v.add_argument("--sites", type=int, required=True)
    v.add_argument("--force", action="store_true", help="lift the size cap")
    v.add_argument("--corrupt-rate", type=_entry, default=None, help=argparse.SUPPRESS)
    v.add_argument("--corrupt-rep", nargs=2, metavar=("NAME", "ROW,COL"), default=None, help=argparse.SUPPRESS)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stationary", help="reversible measure on one sector")
    s.add_argument("--sites", type=int, required=True)
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--q", type=float, default=None)
    s.add_argument("--normalize", action="store_true")
    s.add_argument("--format", choices=["json", "csv"], default="json")
    s.set_defaults(func=cmd_stationary)

    c = sub.add_parser("check", help="tabulated weights, partition sums and measure identities")
    c.add_argument("what", choices=["appendix", "partition", "measure", "kernel", "lowering"])
    c.add_argument("--sites", type=int, default=None)
    c.add_argument("--q", type=float, default=None)
    c.add_argument("--force", action="store_true")
    c.add_argument("--corrupt-rate", type=_entry, default=None, help=argparse.SUPPRESS)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("simulate", help="Gillespie simulation of one sector")
    m.add_argument("--sites", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--m", type=int, required=True)
    m.add_argument("--q", type=float, required=True)
    m.add_argument("--w", type=float, default=1.0)
    m.add_argument("--t-max", type=float, default=None)
    m.add_argument("--events", type=int, default=None)
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--replicas", type=int, default=1)
    m.add_argument("--burn-in", type=float, default=0.1)
    m.add_argument("--initial", default=None, help="starting configuration, e.g. A0B (default: uniform in the sector)")
    m.add_argument("--compare", action="store_true")
    m.add_argument("--format", choices=["csv", "json"], default="csv")
    m.set_defaults(func=cmd_simulate)

    d = sub.add_parser("dump", help="print a matrix as 'row col entry' lines")
    d.add_argument("target", choices=["generator", "perk-schultz", "rep", "rmatrix"])
    d.add_argument("name", nargs="?", default=None, help="for rep: X1+, X2-, X3+, Y1-, ...")
    d.add_argument("--sites", type=int, required=True)
    d.add_argument("--q", type=float, default=None, help="evaluate entries numerically at this q")
    d.add_argument("--force", action="store_true")
    d.set_defaults(func=cmd_dump)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
