"""Command-line entry point: ``cartan-hartogs <subcommand> [flags]``.

Every subcommand writes a deterministic JSON object (sorted keys, floats at
17 significant digits) or a CSV table. Exit codes:

    0  success
    1  usage error (bad flags, malformed JSON, wrong shapes)
    2  numerical red flag (methods disagree, ill-conditioning, tolerance missed)
    3  an input point lies outside the domain

The default RNG seed is ``DEFAULT_SEED``; set ``CARTAN_HARTOGS_SEED`` to
change it without touching the command line.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import domains, kernel, luqikeng, metrics, monge_ampere, representative
from .errors import (BranchError, DegenerateMetric, DomainError, IllConditionedError,
                     IntegrationError, KernelZeroError, MethodDisagreement)

DEFAULT_SEED = 20240607
SEED_ENV = "CARTAN_HARTOGS_SEED"

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    return text


def _encode(obj: Any) -> str:
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, Fraction):
        return str(obj.numerator) if obj.denominator == 1 else _fmt_float(float(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([obj.real, obj.imag])
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        items = sorted((str(k), v) for k, v in obj.items())
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in items) + "}"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv_cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return _fmt_float(float(v))
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (list, tuple, dict)):
        return _encode(v)
    return str(v)


def emit_report(result: Any, fmt: str = "json", header: Sequence[str] | None = None) -> bytes:
    """Serialize ``result`` deterministically.

    JSON takes any nesting of dicts, lists and scalars. CSV takes a list of
    rows and requires ``header``; an empty list gives a header-only table.
    """
    if fmt == "json":
        return (_encode(result) + "\n").encode()
    if fmt == "csv":
        if header is None:
            raise ValueError("CSV output needs a header")
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in result:
            writer.writerow([_csv_cell(v) for v in row])
        return buf.getvalue().encode()
    raise ValueError(f"unknown format {fmt!r}")


def _complex_json(z: complex):
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# argument parsing helpers


def parse_K(text: str):
    """Integers and ratios like ``5/3`` stay exact; anything else is a float."""
    text = text.strip()
    try:
        value = Fraction(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid K {text!r}")
    if value <= 0:
        raise argparse.ArgumentTypeError("K must be positive")
    if "." in text or "e" in text.lower():
        return float(text)
    return int(value) if value.denominator == 1 else value


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def parse_complex_list(text: str) -> np.ndarray:
    """Comma-separated complex numbers in Python syntax, e.g. ``0.1,0.2+0.3j``."""
    if not text.strip():
        return np.zeros(0, dtype=complex)
    try:
        return np.array([complex(s.strip().replace(" ", "")) for s in text.split(",")])
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid complex list {text!r}")


def _to_complex_tree(obj):
    if isinstance(obj, list):
        return [_to_complex_tree(v) for v in obj]
    if isinstance(obj, str):
        return complex(obj.replace(" ", ""))
    if isinstance(obj, (int, float)):
        return complex(obj)
    raise UsageError(f"cannot read {obj!r} as a complex number")


def default_seed() -> int:
    return int(os.environ.get(SEED_ENV, DEFAULT_SEED))


def _write(args, payload: bytes):
    if getattr(args, "output", None):
        with open(args.output, "wb") as fh:
            fh.write(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


# ---------------------------------------------------------------------------
# subcommands


def cmd_coeffs(args) -> int:
    fn = kernel.coeffs_recurrence if args.method == "recurrence" else kernel.coeffs_closed_form
    _write(args, emit_report(fn(args.n, args.K).to_dict()))
    return EXIT_OK


def cmd_kernel_eval(args) -> int:
    zeta = args.W if args.zeta is None else args.zeta
    xi = args.Z if args.xi is None else args.xi
    if args.W.size != 1 or zeta.size != 1:
        raise UsageError("W and zeta take exactly one complex number")
    value = kernel.eval_kernel(args.W[0], args.Z, zeta[0], xi, args.n, args.K)
    out = {
        "n": args.n,
        "K": args.K,
        "W": _complex_json(args.W[0]),
        "Z": [_complex_json(z) for z in args.Z],
        "zeta": _complex_json(zeta[0]),
        "xi": [_complex_json(z) for z in xi],
        "value": _complex_json(value),
    }
    _write(args, emit_report(out))
    return EXIT_OK


def cmd_luqikeng(args) -> int:
    _write(args, emit_report(luqikeng.is_lu_qikeng(args.n, args.K).to_dict()))
    return EXIT_OK


def _k_grid(args) -> list:
    if args.K_grid is not None:
        return [parse_K(s) for s in args.K_grid.split(",") if s.strip()]
    lo, hi, count = args.K_range
    return [float(v) for v in np.geomspace(float(lo), float(hi), int(count))]


def cmd_luqikeng_scan(args) -> int:
    rows = []
    failed = False
    for row in luqikeng.scan(args.n, _k_grid(args)):
        if row.report is None:
            failed = True
            rows.append([row.n, row.K, "error", "", _encode({"error": row.error})])
        else:
            r = row.report
            rows.append([r.n, r.K, r.verdict, len(r.roots_in_disk),
                         _encode([luqikeng._root_json(z) for z in r.all_roots])])
    header = ["n", "K", "verdict", "num_roots_in_disk", "roots_json"]
    _write(args, emit_report(rows, "csv", header))
    return EXIT_NUMERIC if failed else EXIT_OK


def _point_args(spec, point: dict):
    if isinstance(spec, domains.CartanSpec):
        return (_to_complex_tree(point["Z"]),)
    if isinstance(spec, domains.CHSpec):
        return (_to_complex_tree(point["W"]), _to_complex_tree(point["Z"]))
    if isinstance(spec, domains.HuaSpec):
        return ([_to_complex_tree(W) for W in point["Ws"]], _to_complex_tree(point["Z"]))
    return (_to_complex_tree(point["w"]), _to_complex_tree(point["z"]))


def cmd_membership(args) -> int:
    try:
        spec = domains.spec_from_json(args.spec)
        point = json.loads(args.point)
        pt = _point_args(spec, point)
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise UsageError(f"malformed spec or point: {exc}")
    member = domains.contains(spec, *pt)
    margin = domains.distance_to_boundary(spec, *pt)
    _write(args, emit_report({"spec": spec.to_dict(), "member": member, "margin": margin}))
    return EXIT_OK


def cmd_metric_sample(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    spec = metrics.ch_type_i_spec(args.n, args.K)
    lam = float(spec.fiber_dim if args.lam is None else args.lam)
    report = metrics.bergman_vs_y_lambda(args.n, args.K, lam, args.samples, seed)
    out = {
        "spec": {"family": "ch", **spec.to_dict()},
        "lambda": lam,
        "seed": seed,
        "min_ratio": report.min_ratio,
        "max_ratio": report.max_ratio,
        "samples": report.sample_count,
    }
    _write(args, emit_report(out))
    return EXIT_OK


def cmd_lu_constant(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    value = metrics.lu_constant_ball(args.M, args.samples, seed)
    out = {"M": args.M, "seed": seed, "samples": args.samples, "value": value,
           "expected": 1.0 / math.sqrt(args.M + 1)}
    _write(args, emit_report(out))
    return EXIT_OK


def _ma_params(args) -> monge_ampere.MAParams:
    K = args.K
    if K is None:
        return monge_ampere.MAParams.special(args.N, args.m, args.n)
    return monge_ampere.MAParams(args.N, args.m, args.n, float(K))


def cmd_ma_solve(args) -> int:
    params = _ma_params(args)
    trace = monge_ampere.solve_ivp(params, X_max=args.X_max, tol=args.tol, points=args.points)
    res = trace.pointwise_residuals()
    rows = [[X, G, r] for X, G, r in zip(trace.grid, trace.G, res)]
    _write(args, emit_report(rows, "csv", ["X", "G", "residual"]))
    return EXIT_OK


def cmd_ma_check_special(args) -> int:
    params = monge_ampere.MAParams.special(args.N, args.m, args.n)
    worst = monge_ampere.special_residual(params, np.linspace(0.0, args.X_max, args.points))
    ok = worst < args.tol
    out = {"N": args.N, "m": args.m, "n": args.n, "K": params.special_K,
           "max_residual": worst, "tol": args.tol, "ok": ok}
    _write(args, emit_report(out))
    return EXIT_OK if ok else EXIT_NUMERIC


def cmd_homogeneity(args) -> int:
    value = monge_ampere.homogeneity_residual(args.n, args.K, args.N)
    _write(args, emit_report({"n": args.n, "K": args.K, "N": args.N, "residual": value}))
    return EXIT_OK


def _oracle(args) -> representative.KernelOracle:
    if args.domain == "disk":
        return representative.disk_oracle()
    if args.domain == "ball":
        return representative.BallOracle(M=args.M)
    if args.domain == "half-plane":
        return representative.cayley_half_plane_oracle()
    return representative.CartanHartogsOracle(n=args.n, K=args.K)


def cmd_rep_coords(args) -> int:
    oracle = _oracle(args)
    if args.base.size != oracle.dim or args.point.size != oracle.dim:
        raise UsageError(f"base and point need {oracle.dim} complex entries")
    base = representative.make_base(oracle, args.base)
    image = representative.rep_coordinates(oracle, base, args.point)
    out = {"domain": args.domain, "base": [_complex_json(z) for z in args.base],
           "point": [_complex_json(z) for z in args.point],
           "image": [_complex_json(z) for z in image]}
    _write(args, emit_report(out))
    return EXIT_OK


def centre_grid(dim: int, radius: float, steps: int) -> list[np.ndarray]:
    """Square grid of first coordinates with |t_1| <= radius; other entries zero."""
    axis = np.linspace(-radius, radius, steps)
    out = []
    for y in axis[::-1]:
        for x in axis:
            if math.hypot(x, y) <= radius + 1e-12:
                t = np.zeros(dim, dtype=complex)
                t[0] = complex(x, y)
                out.append(t)
    return out


def cmd_rep_centre_scan(args) -> int:
    seed = default_seed() if args.seed is None else args.seed
    oracle = _oracle(args)
    samples = representative.default_samples(oracle, args.samples, seed)
    ts = centre_grid(oracle.dim, args.radius, args.steps)
    rows = [[_encode([_complex_json(z) for z in t]), ok, d]
            for t, ok, d in representative.centre_scan(oracle, ts, samples, args.tol)]
    _write(args, emit_report(rows, "csv", ["t", "is_centre", "defect"]))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_output(p):
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def _add_nK(p, n_default=None):
    p.add_argument("--n", type=_positive_int, required=n_default is None, default=n_default,
                   help="dimension of the base disk variable z")
    p.add_argument("--K", type=parse_K, required=True,
                   help="positive exponent K; integers and ratios like 5/3 are kept exact")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cartan-hartogs", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("coeffs", help="Bergman kernel coefficients b_0..b_{n+1}",
                       description="Kernel coefficients of Y_I(1,1,n;K) from the rational "
                                   "recurrence or the closed alternating sum. JSON {n, K, b}.")
    _add_nK(p)
    p.add_argument("--method", choices=("closed", "recurrence"), default="closed")
    _add_output(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("kernel-eval", help="evaluate the Bergman kernel",
                       description="Bergman kernel K((W,Z);(zeta,xi)) of Y_I(1,1,n;K). "
                                   "Complex numbers use Python syntax, e.g. 0.1+0.2j. "
                                   "Omitting zeta and xi evaluates on the diagonal.")
    _add_nK(p)
    p.add_argument("--W", type=parse_complex_list, required=True, help="fiber coordinate")
    p.add_argument("--Z", type=parse_complex_list, required=True, help="n comma-separated entries")
    p.add_argument("--zeta", type=parse_complex_list, default=None)
    p.add_argument("--xi", type=parse_complex_list, default=None)
    _add_output(p)
    p.set_defaults(func=cmd_kernel_eval)

    p = sub.add_parser("luqikeng", help="decide zero-freeness of the kernel",
                       description="Lu Qi-Keng problem for Y_I(1,1,n;K): roots of the disk "
                                   "polynomial from a companion matrix, cross-checked by an "
                                   "argument-principle count. Exit 2 if the two disagree.")
    _add_nK(p)
    _add_output(p)
    p.set_defaults(func=cmd_luqikeng)

    p = sub.add_parser("luqikeng-scan", help="zero-freeness over a grid of K",
                       description="One CSV row per K: n,K,verdict,num_roots_in_disk,roots_json. "
                                   "Rows that fail keep verdict 'error'; exit 2 if any did.")
    p.add_argument("--n", type=_positive_int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--K-grid", dest="K_grid", help="comma-separated K values (may be empty)")
    g.add_argument("--K-range", dest="K_range", nargs=3, metavar=("LO", "HI", "COUNT"),
                   help="COUNT geometrically spaced values from LO to HI")
    _add_output(p)
    p.set_defaults(func=cmd_luqikeng_scan)

    p = sub.add_parser("membership", help="domain membership predicate",
                       description="Membership in a Cartan, Cartan-Hartogs, Hua or generalized "
                                   "Cartan-Hartogs domain. --spec takes the domain JSON "
                                   "(family, kind, m, n, p, q, N, K, blocks, fiber); --point takes "
                                   "{\"Z\"}, {\"W\",\"Z\"}, {\"Ws\",\"Z\"} or {\"w\",\"z\"} with "
                                   "numbers or complex strings such as \"0.1+0.2j\".")
    p.add_argument("--spec", required=True)
    p.add_argument("--point", required=True)
    _add_output(p)
    p.set_defaults(func=cmd_membership)

    p = sub.add_parser("metric-sample", help="Bergman vs Y(I lambda) ratio bounds",
                       description="Sampled two-sided comparison of the Bergman metric of "
                                   "Y_I(1,1,n;K) with the metric of log G_lambda. JSON "
                                   "{spec, lambda, seed, min_ratio, max_ratio, samples}.")
    _add_nK(p)
    p.add_argument("--lambda", dest="lam", type=_positive_float, default=None,
                   help="defaults to the fiber dimension N = 1")
    p.add_argument("--samples", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=None,
                   help=f"default {DEFAULT_SEED}, or ${SEED_ENV}")
    _add_output(p)
    p.set_defaults(func=cmd_metric_sample)

    p = sub.add_parser("lu-constant", help="Lu constant of the unit ball",
                       description="Supremum of Caratheodory over Bergman length on the unit "
                                   "ball of C^M, by sampling. Expected value (M+1)^(-1/2).")
    p.add_argument("--M", type=_positive_int, required=True)
    p.add_argument("--samples", type=_positive_int, default=2000)
    p.add_argument("--seed", type=int, default=None,
                   help=f"default {DEFAULT_SEED}, or ${SEED_ENV}")
    _add_output(p)
    p.set_defaults(func=cmd_lu_constant)

    def add_NmnK(p, with_K=True):
        p.add_argument("--N", type=_positive_int, default=1)
        p.add_argument("--m", type=_positive_int, default=1)
        p.add_argument("--n", type=_positive_int, default=1)
        if with_K:
            p.add_argument("--K", type=parse_K, default=None,
                           help="defaults to the special value (mn+1)/(m+n)")

    p = sub.add_parser("ma-solve", help="integrate the Monge-Ampere ODE",
                       description="Integrates the radial Monge-Ampere ODE from the singular "
                                   "point X=0 with G(0)=K^(-mn). CSV X,G,residual; the residual "
                                   "is relative to G.")
    add_NmnK(p)
    p.add_argument("--X-max", dest="X_max", type=float, default=0.9)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    p.add_argument("--points", type=_positive_int, default=91)
    _add_output(p)
    p.set_defaults(func=cmd_ma_solve)

    p = sub.add_parser("ma-check-special", help="verify the closed-form solution",
                       description="Max |LHS - G| of the explicit solution for "
                                   "K=(mn+1)/(m+n) on [0, X_max], evaluated in 50-digit "
                                   "arithmetic. Exit 2 above --tol.")
    add_NmnK(p, with_K=False)
    p.add_argument("--X-max", dest="X_max", type=float, default=0.95)
    p.add_argument("--points", type=_positive_int, default=96)
    p.add_argument("--tol", type=_positive_float, default=1e-9)
    _add_output(p)
    p.set_defaults(func=cmd_ma_check_special)

    p = sub.add_parser("homogeneity", help="Bergman profile vs the Monge-Ampere ODE",
                       description="Max ODE residual of the normalized Bergman profile of "
                                   "Y_I(1,1,n;K) on X in [0, 0.9]. Near zero only for the ball "
                                   "(K=1).")
    _add_nK(p)
    p.add_argument("--N", type=_positive_int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_homogeneity)

    def add_domain(p):
        p.add_argument("--domain", choices=("disk", "ball", "half-plane", "yi"), default="disk",
                       help="yi is Y_I(1,1,n;K) in coordinates (W, z_1..z_n)")
        p.add_argument("--M", type=_positive_int, default=2, help="ball dimension")
        p.add_argument("--n", type=_positive_int, default=1, help="yi only")
        p.add_argument("--K", type=parse_K, default=1, help="yi only")

    p = sub.add_parser("rep-coords", help="Bergman representative coordinates",
                       description="Image of --point under the representative coordinates "
                                   "based at --base (sent to 0 with identity Jacobian).")
    add_domain(p)
    p.add_argument("--base", type=parse_complex_list, required=True)
    p.add_argument("--point", type=parse_complex_list, required=True)
    _add_output(p)
    p.set_defaults(func=cmd_rep_coords)

    p = sub.add_parser("rep-centre-scan", help="scan for representative centres",
                       description="Tests Lu's centre condition (T(z, t) independent of z) on a "
                                   "square grid of first coordinates |t_1| <= radius. "
                                   "CSV t,is_centre,defect.")
    add_domain(p)
    p.add_argument("--radius", type=float, default=0.8)
    p.add_argument("--steps", type=_positive_int, default=9)
    p.add_argument("--samples", type=_positive_int, default=32)
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--seed", type=int, default=None,
                   help=f"default {DEFAULT_SEED}, or ${SEED_ENV}")
    _add_output(p)
    p.set_defaults(func=cmd_rep_centre_scan)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DomainError, BranchError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (MethodDisagreement, IllConditionedError, IntegrationError, KernelZeroError,
            DegenerateMetric) as exc:
        print(f"numerical error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, TypeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
