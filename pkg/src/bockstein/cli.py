"""Command-line front end.

Exit codes: 0 success, 1 a verification check failed, 2 usage error,
3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import secrets
import sys
from pathlib import Path

from . import reports
from .core import NotInCoset, bockstein_of, gamma_context
from .distribution import (
    InfeasibleDimensions,
    count_report,
    exhaustive_census,
    joint_census,
    sample_conditional,
    sample_unconditional,
)
from .field_linalg import MatrixModP, Prime
from .module_linalg import BUDGET_ENV, BudgetExceeded, MatrixModP2, default_budget, reduce_mod_p
from .verify import run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("bockstein")


class UsageError(ValueError):
    pass


def parse_matrix(literal: str, p: int, m: int, n: int, modulus: str = "p", reduce: bool = False):
    """Parse ``"a,b;c,d"`` into a matrix over Z/p (``modulus="p"``) or Z/p^2 (``"p2"``).

    Out-of-range entries are errors unless ``reduce`` is set.
    """
    prime = Prime(p)
    cls = MatrixModP if modulus == "p" else MatrixModP2
    q = cls.modulus_for(prime)
    text = literal.strip()
    rows = [r for r in text.split(";")] if text else []
    if m == 0:
        if rows and any(r.strip() for r in rows):
            raise UsageError("expected an empty matrix for m = 0")
        return cls(prime, 0, n, ())
    if len(rows) != m:
        raise UsageError(f"expected {m} rows, got {len(rows)}")
    values = []
    for i, row in enumerate(rows):
        tokens = [t.strip() for t in row.split(",")] if row.strip() else []
        if len(tokens) != n:
            raise UsageError(f"row {i} has {len(tokens)} entries, expected {n}")
        for tok in tokens:
            try:
                x = int(tok)
            except ValueError:
                raise UsageError(f"not an integer: {tok!r}") from None
            if not 0 <= x < q:
                if not reduce:
                    raise UsageError(f"entry {x} outside [0, {q}); pass --reduce to reduce it")
                x %= q
            values.append(x)
    return cls(prime, m, n, tuple(values))


def _load_matrix(args, literal: str | None, path: str | None, modulus: str, what: str):
    if path:
        data = json.loads(Path(path).read_text())
        rows = data[what] if isinstance(data, dict) else data
        literal = ";".join(",".join(str(x) for x in r) for r in rows)
    if literal is None:
        raise UsageError(f"--{what} or --{what}-file is required")
    return parse_matrix(literal, args.p, args.m, args.n, modulus, args.reduce)


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.format == "json":
        out = reports.to_json(payload)
    elif args.format == "csv":
        out = reports.to_csv(payload)
    else:
        out = text if text is not None else reports.to_json(payload)
    if args.output and args.output != "-":
        Path(args.output).write_text(out)
    else:
        sys.stdout.write(out)


def _seed(args) -> int:
    # An unseeded run draws a seed; it is recorded in the report.
    return args.seed if args.seed is not None else secrets.randbits(64)


def cmd_compute(args) -> int:
    phi = _load_matrix(args, args.phi, args.phi_file, "p2", "phi")
    ctx = gamma_context(reduce_mod_p(phi))
    beta = bockstein_of(ctx, phi)
    payload = reports.compute_to_dict(ctx, phi, beta)
    text = (f"psi = {ctx.psi.to_rows()}\nk = {beta.k}, c = {beta.c}\n"
            f"kernel basis = {payload['kernel_basis']}\ncoker rows = {payload['coker_rows']}\n"
            f"beta = {beta.to_nested()}\n")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_census(args) -> int:
    psi = _load_matrix(args, args.psi, args.psi_file, "p", "psi")
    census = exhaustive_census(gamma_context(psi), args.budget, args.workers)
    payload = reports.census_to_dict(census)
    pred = payload["prediction"]
    text = "".join(f"{json.dumps(r['beta'])}: {r['count']}\n" for r in payload["counts"])
    text += (f"k={census.k} c={census.c} total={census.total} "
             f"predicted fiber={pred['fiber_size']} hom={pred['hom_size']} "
             f"{'PASS' if census.passed else 'FAIL'}\n")
    _emit(args, payload, text)
    return EXIT_OK if census.passed else EXIT_FAIL


def cmd_count(args) -> int:
    if args.k is None:
        psi = _load_matrix(args, args.psi, args.psi_file, "p", "psi")
        k = len(gamma_context(psi).frame.kernel_basis)
    else:
        k = args.k
    r = count_report(args.p, args.m, args.n, k)
    payload = reports.count_report_to_dict(r)
    text = "".join(f"{key}: {val}\n" for key, val in payload.items() if key != "kind")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_sample(args) -> int:
    if args.trials is None and not (args.unconditional and args.exhaustive):
        raise UsageError("--trials is required")
    seed = _seed(args)
    if args.unconditional:
        if args.exhaustive:
            table = joint_census(args.p, args.m, args.n, args.budget)
        else:
            table = sample_unconditional(args.p, args.m, args.n, args.trials, seed)
        payload = reports.joint_to_dict(table)
        text = "".join(
            f"psi={b['psi']} k={b['k']} total={b['total']} distinct={len(b['counts'])}/{b['hom_size']}\n"
            for b in payload["bins"]
        )
    else:
        psi = _load_matrix(args, args.psi, args.psi_file, "p", "psi")
        r = sample_conditional(gamma_context(psi), args.trials, seed, args.workers)
        payload = reports.sample_to_dict(r)
        text = (f"trials={r.trials} seed={r.seed} cells={r.hom_size} observed={len(r.counts)}\n"
                f"chi_square={r.chi_square} dof={r.degrees_of_freedom} p_value={r.p_value}\n")
    _emit(args, payload, text)
    return EXIT_OK


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 0
    primes = args.p_list or [2, 3]
    report = run_verify(primes, args.max_dim, args.trials or 10_000, seed, args.budget)
    _emit(args, report.to_dict(), report.summary())
    return EXIT_OK if report.passed else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=None, help="rows (rank of the target module)")
    common.add_argument("--n", type=int, default=None, help="columns (rank of the source module)")
    common.add_argument("--budget", type=int, default=None,
                        help=f"enumeration cap (default {BUDGET_ENV} or 2**24)")
    common.add_argument("--format", choices=["json", "csv", "text"], default="json")
    common.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    common.add_argument("--reduce", action="store_true", help="reduce out-of-range matrix entries")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--trials", type=int, default=None)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="bockstein", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", parents=[common], help="Bockstein matrix of a map over Z/p^2")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--phi", help='matrix literal over Z/p^2, e.g. "2,1;0,3"')
    p.add_argument("--phi-file", help="JSON file holding nested rows (or {\"phi\": rows})")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("census", parents=[common], help="exhaustive fiber census over L_psi")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--psi", help="matrix literal over Z/p")
    p.add_argument("--psi-file")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("count", parents=[common], help="closed-form counts")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--k", type=int, default=None, help="dimension of ker psi")
    p.add_argument("--psi", help="matrix literal over Z/p (alternative to --k)")
    p.add_argument("--psi-file")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", parents=[common], help="seeded sampling with a chi-square test")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--psi", help="matrix literal over Z/p (conditional sampling)")
    p.add_argument("--psi-file")
    p.add_argument("--unconditional", action="store_true",
                   help="draw phi uniformly from all of Mat(Z/p^2) and bin by psi")
    p.add_argument("--exhaustive", action="store_true",
                   help="with --unconditional: enumerate every phi instead of sampling")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("verify", parents=[common], help="acceptance sweep with a summary table")
    p.add_argument("--p", type=int, action="append", dest="p_list",
                   help="prime to sweep (repeatable; default 2 and 3)")
    p.add_argument("--max-dim", type=int, default=2)
    p.set_defaults(func=cmd_verify)
    return parser


def _check_dims(args) -> None:
    if args.command == "verify":
        if args.max_dim < 1:
            raise UsageError("--max-dim must be positive")
        return
    if args.m is None or args.n is None:
        raise UsageError("--m and --n are required")
    if args.m < 0 or args.n < 0:
        raise UsageError("dimensions must be non-negative")
    if args.trials is not None and args.trials < 1:
        raise UsageError("--trials must be positive")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.budget is None:
        args.budget = default_budget()
    try:
        _check_dims(args)
        return args.func(args)
    except BudgetExceeded as exc:
        print(f"bockstein: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, InfeasibleDimensions, NotInCoset, ValueError, OSError) as exc:
        print(f"bockstein: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
