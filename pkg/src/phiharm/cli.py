"""Command-line front end.

Subcommands: nf-check, norm, ball, laplacian, decompose, capacity,
experiment. Every JSON output embeds the fully resolved run configuration so
files are self-describing, and identical configurations with identical seeds
produce byte-identical outputs.

Exit codes: 0 success, 1 usage error, 2 numerical failure (non-convergence),
3 I/O error.
"""

import argparse
import json
import math
import sys

import numpy as np

from . import cohomology as coh
from . import nfunction as nfn
from .errors import PhiharmError, SolverError
from .groups import build_ball
from .phi_laplacian import DirichletForm, laplacian_interior
from .orlicz import FiniteFunction, luxemburg_norm, orlicz_norm, sandwich_check
from .solver import SolverConfig, decompose, kernel_backend

USAGE_ERROR = 1
NUMERICAL_ERROR = 2
IO_ERROR = 3


def _json_text(payload: dict) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _resolve_nf(args) -> nfn.NFunction:
    if args.nf and (args.phi_expr or args.dphi_expr):
        raise PhiharmError("give either --nf or --phi-expr/--dphi-expr, not both")
    if args.nf:
        return nfn.builtin(args.nf)
    if args.phi_expr and args.dphi_expr:
        params = {}
        for item in args.param or []:
            key, sep, value = item.partition("=")
            if not sep:
                raise PhiharmError(f"malformed --param {item!r}; expected name=value")
            params[key] = float(value)
        return nfn.parse_nfunction(args.phi_expr, args.dphi_expr, params)
    raise PhiharmError("an N-function is required: --nf or --phi-expr + --dphi-expr")


def _add_nf_args(parser) -> None:
    parser.add_argument("--nf", help="builtin spec, e.g. power:p=3, cosh, "
                                     "power_norm:p=2, plog:p=2")
    parser.add_argument("--phi-expr", help="DSL expression for Phi")
    parser.add_argument("--dphi-expr", help="DSL expression for Phi'")
    parser.add_argument("--param", action="append", metavar="NAME=VALUE",
                        help="expression parameter (repeatable)")


def _add_solver_args(parser) -> None:
    parser.add_argument("--scheme", default="gauss_seidel",
                        choices=["gauss_seidel", "gradient_descent"])
    parser.add_argument("--tol-residual", type=float, default=1e-10)
    parser.add_argument("--tol-energy", type=float, default=1e-14)
    parser.add_argument("--max-sweeps", type=int, default=100_000)
    parser.add_argument("--inner-tol", type=float, default=1e-13)
    parser.add_argument("--init", default="zero", choices=["zero", "copy_f"])


def _solver_config(args) -> SolverConfig:
    return SolverConfig(scheme=args.scheme, tol_residual=args.tol_residual,
                        tol_energy=args.tol_energy, max_sweeps=args.max_sweeps,
                        inner_tol=args.inner_tol, init=args.init)


def _load_function(path: str) -> FiniteFunction:
    with open(path, "r", encoding="utf-8") as fh:
        return FiniteFunction.from_json_dict(json.load(fh))


def _say(args, text: str) -> None:
    if not args.quiet:
        print(text)


def _cmd_nf_check(args) -> int:
    nf = _resolve_nf(args)
    c_grid = None
    if args.c_grid:
        c_grid = [float(x) for x in args.c_grid.split(",")]
    delta2 = nfn.certify_delta2(nf, args.x0, args.grid_points)
    nabla2 = nfn.certify_nabla2(nf, args.x0, c_grid, args.grid_points)
    growth_ok, growth_viol = nfn.check_derivative_growth(
        nf, args.x0, delta2.constant, args.grid_points)
    a_grid = np.linspace(0.0, 2.0, 21)[1:]
    gaps = [nfn.young_gap(nf, float(a), float(b))
            for a in a_grid for b in np.linspace(0.0, nfn.eval_dphi(nf, 2.0), 21)]
    eq_gaps = [abs(nfn.young_gap(nf, float(a), nfn.eval_dphi(nf, float(a))))
               for a in a_grid]
    payload = {
        "config": {"command": "nf-check", "nf": nf.spec_string, "x0": args.x0,
                   "grid_points": args.grid_points,
                   "c_grid": c_grid or list(nfn.DEFAULT_NABLA2_GRID)},
        "delta2": {"x0": delta2.x0, "K": delta2.constant,
                   "grid_points": delta2.grid_points, "passed": delta2.passed,
                   "skipped": delta2.skipped},
        "nabla2": {"x0": nabla2.x0,
                   "c": None if math.isnan(nabla2.constant) else nabla2.constant,
                   "grid_points": nabla2.grid_points, "passed": nabla2.passed},
        "derivative_growth": {"ok": growth_ok, "max_violation": growth_viol},
        "young": {"min_gap": min(gaps), "equality_max_abs_gap": max(eq_gaps)},
    }
    if args.out:
        _write(args.out, _json_text(payload))
    _say(args, f"{nf.spec_string}: delta2 K={delta2.constant:.6g} "
               f"(passed={delta2.passed}), nabla2 c="
               f"{payload['nabla2']['c']} (passed={nabla2.passed}), "
               f"derivative growth ok={growth_ok}, "
               f"young min gap={min(gaps):.3e}")
    return 0


def _cmd_norm(args) -> int:
    nf = _resolve_nf(args)
    f = _load_function(args.input)
    gauge, orl, ok = sandwich_check(nf, f)
    payload = {
        "config": {"command": "norm", "nf": nf.spec_string, "input": args.input},
        "gauge": gauge,
        "orlicz": orl,
        "sandwich_ok": ok,
    }
    if args.out:
        _write(args.out, _json_text(payload))
    _say(args, f"gauge={gauge!r} orlicz={orl!r} sandwich_ok={ok}")
    return 0


def _cmd_ball(args) -> int:
    ball = build_ball(args.group, args.radius)
    payload = ball.to_json_dict()
    _write(args.out, _json_text(payload))
    _say(args, f"{ball.id}: {ball.n_vertices} vertices, "
               f"{int(np.sum(ball.interior))} interior")
    return 0


def _cmd_laplacian(args) -> int:
    nf = _resolve_nf(args)
    ball = build_ball(args.group, args.radius)
    f = _load_function(args.input)
    form = DirichletForm(nf, ball)
    lap = laplacian_interior(form, f)
    payload = {
        "config": {"command": "laplacian", "group": ball.group.spec,
                   "radius": args.radius, "nf": nf.spec_string,
                   "input": args.input},
        "ball": ball.id,
        "laplacian": [None if math.isnan(v) else float(v) for v in lap],
    }
    if args.out:
        _write(args.out, _json_text(payload))
    finite = [v for v in lap if not math.isnan(v)]
    _say(args, f"interior laplacian: max |value| = "
               f"{max(abs(v) for v in finite) if finite else 0.0!r}")
    return 0


def _boundary_function(args, ball) -> FiniteFunction:
    if args.boundary == "random":
        return coh.random_boundary(ball, args.seed)
    if args.boundary == "zero":
        return ball.function(np.zeros(ball.n_vertices))
    if args.boundary.startswith("file:"):
        return _load_function(args.boundary[5:])
    raise PhiharmError(f"unknown boundary source {args.boundary!r}")


def _cmd_decompose(args) -> int:
    nf = _resolve_nf(args)
    ball = build_ball(args.group, args.radius)
    cfg = _solver_config(args)
    f = _boundary_function(args, ball)
    form = DirichletForm(nf, ball)
    dec = decompose(form, f, cfg)
    payload = {
        "config": {"command": "decompose", "group": ball.group.spec,
                   "radius": args.radius, "nf": nf.spec_string,
                   "boundary": args.boundary, "seed": args.seed,
                   "solver": cfg.to_json_dict()},
        "decomposition": dec.to_json_dict(),
    }
    if args.out:
        _write(args.out, _json_text(payload))
    _say(args, f"decomposed on {ball.id}: residual={dec.residual:.3e} "
               f"energy={dec.energy!r} sweeps={dec.sweeps} "
               f"backend={kernel_backend(nf)}")
    return 0


def _cmd_capacity(args) -> int:
    nf = _resolve_nf(args)
    cfg = _solver_config(args)
    res = coh.capacity(args.group, args.radius, nf, cfg)
    payload = {
        "config": {"command": "capacity", "group": res.group,
                   "radius": args.radius, "nf": nf.spec_string,
                   "solver": cfg.to_json_dict()},
        "capacity": res.value,
        "converged": res.converged,
        "sweeps": res.sweeps,
        "residual": res.residual,
        "minimizer": [float(v) for v in res.minimizer.values],
    }
    if args.out:
        _write(args.out, _json_text(payload))
    _say(args, f"capacity({res.group}, R={args.radius}, {nf.spec_string}) = "
               f"{res.value!r}")
    return 0


def _cmd_experiment(args) -> int:
    nf = _resolve_nf(args)
    cfg = _solver_config(args)
    groups = [g for g in args.groups.split(",") if g]
    radii = [int(r) for r in args.radii.split(",") if r]
    report = coh.run_experiment(args.kind, groups, radii, nf, cfg, args.seed)
    payload = {
        "config": {"command": "experiment", "kind": args.kind,
                   "groups": groups, "radii": radii, "nf": nf.spec_string,
                   "seed": args.seed, "solver": cfg.to_json_dict()},
    }
    payload.update(report.to_json_dict())
    if args.out_json:
        _write(args.out_json, _json_text(payload))
    if args.out_csv:
        _write(args.out_csv, report.to_csv_text())
    if not args.quiet:
        for row in report.rows:
            value = "failed" if row["value"] is None else repr(row["value"])
            print(f"{row['group']} R={row['radius']} {row['quantity']}={value}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phiharm",
        description="Orlicz-space calculus and nonlinear harmonic "
                    "decompositions on Cayley-graph balls")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("nf-check", help="regularity certificates and Young report")
    _add_nf_args(p)
    p.add_argument("--x0", type=float, default=1.0)
    p.add_argument("--grid-points", type=int, default=512)
    p.add_argument("--c-grid", help="comma-separated nabla2 candidates")
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_nf_check)

    p = sub.add_parser("norm", help="gauge and Orlicz norms of a vector file")
    _add_nf_args(p)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_norm)

    p = sub.add_parser("ball", help="build and serialize a Cayley ball")
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_ball)

    p = sub.add_parser("laplacian", help="apply the nonlinear Laplacian to a "
                                         "function file")
    _add_nf_args(p)
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_laplacian)

    p = sub.add_parser("decompose", help="harmonic-plus-interior decomposition")
    _add_nf_args(p)
    _add_solver_args(p)
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--boundary", default="random",
                   help="random | zero | file:PATH")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_decompose)

    p = sub.add_parser("capacity", help="minimal energy of the unit potential")
    _add_nf_args(p)
    _add_solver_args(p)
    p.add_argument("--group", required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_capacity)

    p = sub.add_parser("experiment", help="capacity trend / flattening tables")
    _add_nf_args(p)
    _add_solver_args(p)
    p.add_argument("--kind", required=True,
                   choices=["capacity_trend", "flatten_test"])
    p.add_argument("--groups", required=True, help="comma-separated specs")
    p.add_argument("--radii", required=True, help="comma-separated integers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-csv")
    p.add_argument("--out-json")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(run=_cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else USAGE_ERROR
    try:
        return args.run(args)
    except SolverError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return IO_ERROR
    except (PhiharmError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
