"""Command-line front end: ``torsionkit <command> ...``.

Exit codes: 0 success, 2 usage error, 3 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bounds as bnd
from .complex_core import SPACES, boundary_matrix, generate, laplacian, parse_complex, serialize
from .detector import DEFAULT_PRIMES, REPORT_DELTA, detect_torsion
from .emulator import EmulatorConfig, emulate_detection
from .errors import TorsionKitError
from .ff_linalg import homology_over_Z, is_prime, mod_reduce, rank_exact_rational, rank_ff
from .rank_sketch import ChebParams, SketchParams, sketch_rank_ff, stochastic_rank_real
from .spectral import spectral_extent

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 2, 3


class UsageError(Exception):
    pass


def _primes(text: str) -> list[int]:
    try:
        ps = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")
    bad = [p for p in ps if not is_prime(p)]
    if not ps or bad:
        raise argparse.ArgumentTypeError(f"not prime: {bad}" if bad else "empty prime list")
    return sorted(set(ps))


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}")


def _add_input(sp: argparse.ArgumentParser) -> None:
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-i", "--input", help="facet file")
    g.add_argument("--space", choices=SPACES, help="built-in fixture")


def _add_sketch(sp: argparse.ArgumentParser, delta: float = 0.05) -> None:
    sp.add_argument("--s", type=int, default=None, help="sketch rows (default: adaptive)")
    sp.add_argument("--t", type=int, default=None, help="sketch columns (default: adaptive)")
    sp.add_argument("--delta", type=float, default=delta, help="failure probability target")
    sp.add_argument("--seed", type=int, default=0)


def _add_emulator(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--epsilon", type=float, default=None, help="additive overlap error (default: in-budget)")
    sp.add_argument("--noise", choices=("none", "uniform", "gaussian"), default="uniform")
    sp.add_argument("--normalization", choices=("non_oracle", "oracle"), default="non_oracle")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="torsionkit", description="Torsion detection by homology over several fields.")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="write a fixture facet file")
    sp.add_argument("--space", choices=SPACES, required=True)
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("homology", help="integral homology via Smith normal form")
    _add_input(sp)
    sp.add_argument("-r", "--order", type=int, default=None, help="default: every order")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("rank", help="rank of a boundary map or Laplacian")
    _add_input(sp)
    sp.add_argument("-r", "--order", type=int, required=True)
    sp.add_argument("--operator", choices=("boundary", "laplacian"), default="laplacian")
    sp.add_argument("--primes", type=_primes, default=None, help="omit for the reals")
    sp.add_argument("--method", choices=("exact", "sketch", "stochastic"), default="exact")
    _add_sketch(sp)
    sp.add_argument("--probes", type=int, default=400, help="stochastic: number of probe vectors")
    sp.add_argument("--degree", type=int, default=64, help="stochastic: Chebyshev degree")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("detect", help="torsion report")
    _add_input(sp)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("-r", "--order", type=int)
    g.add_argument("--scan", action="store_true", help="every order 0..dim K")
    sp.add_argument("--primes", type=_primes, default=list(DEFAULT_PRIMES))
    sp.add_argument("--method", choices=("exact", "sketch", "emulate"), default="exact")
    _add_sketch(sp, delta=REPORT_DELTA)
    _add_emulator(sp)
    sp.add_argument("--no-oracle", action="store_true", help="skip the integral homology comparison")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("emulate", help="emulated pipeline trace")
    _add_input(sp)
    sp.add_argument("-r", "--order", type=int, required=True)
    sp.add_argument("--primes", type=_primes, default=[2])
    _add_sketch(sp)
    _add_emulator(sp)
    sp.add_argument("--matrices", action="store_true", help="include overlap and recovered matrices")
    sp.add_argument("-o", "--output")

    sp = sub.add_parser("bounds", help="norm bound sweep as CSV")
    sp.add_argument("--N", type=_ints, default=[8, 32, 128])
    sp.add_argument("--primes", type=_primes, default=[3, 5, 7])
    sp.add_argument("--trials", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("-o", "--output")
    return ap


def _load(args):
    if getattr(args, "space", None) and not getattr(args, "input", None):
        return generate(args.space), {"space": args.space}
    try:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {args.input}: {exc.strerror}")
    return parse_complex(text), {"input": args.input}


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cmd_gen(args) -> str:
    return serialize(generate(args.space))


def _cmd_homology(args) -> str:
    K, src = _load(args)
    orders = range(K.dim + 1) if args.order is None else [args.order]
    rows = []
    for r in orders:
        betti, tors = homology_over_Z(K, r)
        rows.append({"order": r, "betti": betti, "torsion": tors})
    if args.json:
        return _dump({"command": "homology", "method": "smith_normal_form", "seed": None, **src, "results": rows})
    if args.order is not None:
        return f"betti={rows[0]['betti']} torsion={rows[0]['torsion']}\n"
    return "".join(f"r={x['order']} betti={x['betti']} torsion={x['torsion']}\n" for x in rows)


def _operator(K, r, kind):
    if kind == "laplacian":
        return laplacian(K, r)
    return boundary_matrix(K, r)


def _cmd_rank(args) -> str:
    K, src = _load(args)
    r = args.order
    A = _operator(K, r, args.operator)
    results = []
    if args.method == "stochastic":
        if args.primes:
            raise UsageError("the stochastic estimator works over the reals; drop --primes")
        # rank(B) = rank(B^T B); both operators are scaled into the unit ball
        S = A if args.operator == "laplacian" else A.T @ A
        ext = spectral_extent(S)
        scaled = S / ext.sigma_max if ext.sigma_max > 0 else S.astype(float)
        cp = ChebParams(s=args.probes, m=args.degree, seed=args.seed)
        est = stochastic_rank_real(scaled, cp)
        results.append({"field": "R", **est.to_dict()})
    elif args.primes is None:
        if args.method == "sketch":
            raise UsageError("the sketch estimator needs --primes")
        results.append({"field": "R", "value": rank_exact_rational(A), "method": "exact", "params": {}, "prime": None})
    else:
        for p in args.primes:
            M = mod_reduce(A, p)
            if args.method == "exact":
                results.append({"field": f"F_{p}", "value": rank_ff(M), "method": "exact", "params": {}, "prime": p})
            else:
                est = sketch_rank_ff(M, SketchParams(p, args.s, args.t, args.delta, args.seed))
                results.append({"field": f"F_{p}", **est.to_dict()})
    if args.json:
        return _dump({
            "command": "rank", "operator": args.operator, "order": r, "shape": list(A.shape),
            "seed": args.seed, **src, "results": results,
        })
    return "".join(f"{x['field']}: rank={x['value']} method={x['method']}\n" for x in results)


def _emulator_config(args) -> EmulatorConfig:
    return EmulatorConfig(
        noise_model=args.noise,
        normalization_mode=args.normalization,
        seed=args.seed,
        overlap_eps=args.epsilon,
    )


def _cmd_detect(args) -> str:
    K, src = _load(args)
    orders = range(K.dim + 1) if args.scan else [args.order]
    params = SketchParams(2, args.s, args.t, args.delta, args.seed)
    cfg = _emulator_config(args)
    reports = [
        detect_torsion(K, r, args.primes, args.method, params, cfg, with_oracle=not args.no_oracle)
        for r in orders
    ]
    if args.json:
        return _dump({
            "command": "detect", "method": args.method, "seed": args.seed, "primes": args.primes,
            **src, "reports": [rep.to_dict() for rep in reports],
        })
    return "\n\n".join(rep.to_table() for rep in reports) + "\n"


def _cmd_emulate(args) -> str:
    K, src = _load(args)
    cfg = _emulator_config(args)
    traces = []
    for p in args.primes:
        est, trace = emulate_detection(K, args.order, p, SketchParams(p, args.s, args.t, args.delta, args.seed), cfg)
        traces.append({
            "method": est.method, "rank": est.value, "nullity": K.count(args.order) - est.value,
            "trace": trace.to_dict(include_matrices=args.matrices),
        })
    return _dump({"command": "emulate", "order": args.order, "seed": args.seed, **src, "results": traces})


def _cmd_bounds(args) -> str:
    if args.trials < 1 or any(n < 1 for n in args.N):
        raise UsageError("--trials and every N must be positive")
    if 2 in args.primes:
        raise UsageError("the norm bounds need odd primes")
    rows = bnd.bound_sweep(args.N, args.primes, args.trials, args.seed)
    print(
        "note: cantelli uses 1 - var/(var + gap^2); berry_esseen uses the sigma_1^3 sqrt(N) normalization; "
        "an empty cantelli cell means S^2 is below the mean",
        file=sys.stderr,
    )
    return bnd.rows_to_csv(rows)


COMMANDS = {
    "gen": _cmd_gen,
    "homology": _cmd_homology,
    "rank": _cmd_rank,
    "detect": _cmd_detect,
    "emulate": _cmd_emulate,
    "bounds": _cmd_bounds,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        out = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"torsionkit {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TorsionKitError, ArithmeticError) as exc:
        print(f"torsionkit {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())
