"""Command-line front end for the cylinder renormalization laboratory.

Each subcommand wires a pipeline (renormalization step, fixed-point
iteration, domain experiment, linearization, spectral bounds, solver
diagnostics) into a reproducible run: a JSON config optionally overridden
by flags, atomic output writes, and a machine-readable manifest holding the
config, versions, wall time and headline numbers.

Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import tempfile
import time

import numpy as np

from cylren.analytic_map import AnalyticMap, quadratic_siegel_map
from cylren.beltrami import hilbert_norm_bound
from cylren.crescent import build_crescent
from cylren.errors import CylrenError
from cylren.renorm import (
    RenormConfig,
    build_pipeline,
    check_domain,
    iterate_fixed_point,
    renormalize_once,
    renormalize_robust,
)
from cylren.spectrum import (
    BoundConstants,
    LinearizationMatrix,
    build_matrix,
    estimate_tail_constants,
    leading_eigenvalue,
    rsp_bound,
    spectral_radius,
)

ALGORITHM_REVISION = "cylren-1.0"

_CONFIG_FIELDS = [
    "contour_radius", "n_contour", "out_degree", "rho_in", "rho_out",
    "slope", "solver_R", "n_radii", "n_modes", "r_min_factor", "p",
    "solve_tol", "solver_max_iter", "max_return", "c0_tol",
]


class _Parser(argparse.ArgumentParser):
    """Argument parser whose usage failures exit with code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


# -- I/O helpers ------------------------------------------------------------


def _atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-cylren-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_json(obj):
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"


def _write_json(path, obj):
    _atomic_write_text(path, _dump_json(obj))


def _load_map(path):
    return AnalyticMap.load(path)


def _load_config(args):
    values = {}
    if getattr(args, "config", None):
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        values.update({k: v for k, v in file_cfg.items()
                       if k in _CONFIG_FIELDS})
    for key in _CONFIG_FIELDS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return RenormConfig(**values)


def _manifest(args, command, config, numbers, t0, outputs=()):
    data = {
        "command": command,
        "argv": sys.argv[1:],
        "algorithm_revision": ALGORITHM_REVISION,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "config": config.to_dict() if config is not None else None,
        "wall_seconds": round(time.time() - t0, 3),
        "numbers": numbers,
        "outputs": list(outputs),
    }
    path = getattr(args, "manifest", None)
    if path is None and getattr(args, "out", None):
        path = str(args.out) + ".manifest.json"
    if path:
        _write_json(path, data)
    print(_dump_json({"numbers": numbers}), end="")


def _add_config_flags(p):
    p.add_argument("--config", help="JSON config file; flags override it")
    p.add_argument("--manifest", help="manifest path (default <out>.manifest.json)")
    for key in _CONFIG_FIELDS:
        typ = int if key in ("n_contour", "out_degree", "n_radii", "n_modes",
                             "solver_max_iter", "max_return") else float
        p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ)


def _c(z):
    return [float(np.real(z)), float(np.imag(z))]


# -- subcommands ------------------------------------------------------------


def _cmd_renormalize(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    if args.representative:
        res = renormalize_robust(f, cfg)
        scale = complex(*res.diagnostics["representative_scale"])
        if args.self_distance:
            res.diagnostics["self_distance"] = (res.map_out - f).weighted_norm()
    else:
        scale = 1.0
        res = renormalize_once(f, cfg, self_distance=args.self_distance)
    res.map_out.save(args.out + ".tmp")
    os.replace(args.out + ".tmp", args.out)
    numbers = dict(res.diagnostics)
    numbers["representative_scale"] = _c(scale)
    numbers["c2"] = _c(res.map_out.c(2))
    _manifest(args, "renormalize", cfg, numbers, t0, [args.out])
    return 0


def _cmd_fixed_point(args):
    t0 = time.time()
    cfg = _load_config(args)
    if args.start == "quadratic":
        f0 = quadratic_siegel_map(cfg.rho_in)
    else:
        f0 = _load_map(args.start)
    results = iterate_fixed_point(f0, args.iters, cfg)
    final = results[-1].map_out
    final.save(args.out + ".tmp")
    os.replace(args.out + ".tmp", args.out)
    numbers = {
        "iters": args.iters,
        "step_norms": [r.diagnostics["step_norm"] for r in results],
        "c2": _c(final.c(2)),
        "c3": _c(final.c(3)),
        "c4": _c(final.c(4)),
    }
    _manifest(args, "fixed-point", cfg, numbers, t0, [args.out])
    return 0


def _cmd_check_domain(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    report = check_domain(f, cfg, loop_radius=args.loop_radius,
                          siegel_radius=args.siegel_radius)
    _manifest(args, "check-domain", cfg, report, t0)
    ok = report["encircles_out_disk"] and report["containment_in_disk"]
    return 0 if ok else 2


def _cmd_linearize(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    mat = build_matrix(f, args.N, args.eps, cfg, jobs=args.jobs)
    mat.save(args.out + ".tmp")
    os.replace(args.out + ".tmp", args.out)
    lam = leading_eigenvalue(mat.entries)
    numbers = {"N": args.N, "eps": args.eps,
               "leading_eigenvalue": _c(lam),
               "spectral_radius": abs(lam)}
    _manifest(args, "linearize", cfg, numbers, t0, [args.out])
    return 0


def _cmd_spectrum(args):
    t0 = time.time()
    mat = LinearizationMatrix.load(args.matrix)
    lam = leading_eigenvalue(mat.entries)
    numbers = {"N": mat.N, "leading_eigenvalue": _c(lam),
               "spectral_radius": abs(lam)}
    _manifest(args, "spectrum", None, numbers, t0)
    return 0


def _cmd_bound(args):
    t0 = time.time()
    bc = BoundConstants(args.gamma, args.delta, args.C, args.k)
    value = rsp_bound(bc)
    numbers = dict(bc.to_dict())
    numbers["bound"] = value
    _manifest(args, "bound", None, numbers, t0)
    return 0


def _cmd_tail(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    probes = tuple(int(s) for s in args.probes.split(","))
    matrix = LinearizationMatrix.load(args.matrix) if args.matrix else None
    bc = estimate_tail_constants(f, args.N, args.eps, cfg, k=args.k,
                                 probes=probes, matrix=matrix)
    numbers = dict(bc.to_dict())
    numbers["bound"] = rsp_bound(bc)
    if args.out:
        _write_json(args.out, numbers)
    _manifest(args, "tail", cfg, numbers, t0, [args.out] if args.out else ())
    return 0


def _cmd_solve_beltrami(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    crescent, solution = build_pipeline(f, cfg)
    report = solution.residual_report(n_probes=args.n_probes,
                                      rng_seed=args.seed)
    numbers = {
        "K": solution.problem.K,
        "hilbert_norm_bound": hilbert_norm_bound(cfg.p),
        "contraction_certified": solution.problem.contraction_certified,
        "iterations": len(solution.history),
        "converged": solution.converged,
        "residual": report,
        "conformality_off_support": solution.conformality_off_support(),
    }
    if args.out:
        _write_json(args.out, numbers)
    _manifest(args, "solve-beltrami", cfg, numbers, t0,
              [args.out] if args.out else ())
    return 0


def _cmd_dump_crescent(args):
    t0 = time.time()
    cfg = _load_config(args)
    f = _load_map(args.inp)
    cr = build_crescent(f, tangent_slope=cfg.slope)
    rs = np.geomspace(args.r_lo, args.r_hi, args.samples)
    lam = cr.boundary_point(rs)
    pre = cr.finv_boundary(rs)
    data = {
        "a": _c(cr.a),
        "f3": _c(cr.f3),
        "f4": _c(cr.f4),
        "alpha": float(cr.alpha),
        "beta": _c(cr.beta),
        "total_length": float(cr.total_length),
        "radii": [float(r) for r in rs],
        "boundary": [_c(z) for z in np.atleast_1d(lam)],
        "preimage_boundary": [_c(z) for z in np.atleast_1d(pre)],
    }
    if args.out:
        _write_json(args.out, data)
    numbers = {"a": data["a"], "alpha": data["alpha"],
               "total_length": data["total_length"]}
    _manifest(args, "dump-crescent", cfg, numbers, t0,
              [args.out] if args.out else ())
    return 0


# -- parser -----------------------------------------------------------------


def build_parser():
    p = _Parser(prog="cylren",
                description="cylinder renormalization laboratory")
    p.add_argument("--version", action="version", version=ALGORITHM_REVISION)
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("renormalize", help="one renormalization step")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--representative", action="store_true",
                   help="conjugate to a feasible representative first")
    q.add_argument("--self-distance", action="store_true")
    _add_config_flags(q)
    q.set_defaults(func=_cmd_renormalize)

    q = sub.add_parser("fixed-point", help="iterate toward the fixed point")
    q.add_argument("--start", default="quadratic",
                   help="'quadratic' or a map JSON path")
    q.add_argument("--iters", type=int, default=11)
    q.add_argument("--out", required=True)
    _add_config_flags(q)
    q.set_defaults(func=_cmd_fixed_point)

    q = sub.add_parser("check-domain", help="loop image and orbit containment")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--loop-radius", type=float, default=0.135)
    q.add_argument("--siegel-radius", type=float, default=0.045)
    _add_config_flags(q)
    q.set_defaults(func=_cmd_check_domain)

    q = sub.add_parser("linearize", help="finite-difference matrix A_N")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--N", type=int, default=14)
    q.add_argument("--eps", type=float, default=0.01)
    q.add_argument("--jobs", type=int, default=1)
    q.add_argument("--out", required=True)
    _add_config_flags(q)
    q.set_defaults(func=_cmd_linearize)

    q = sub.add_parser("spectrum", help="eigenvalues of a saved matrix")
    q.add_argument("--matrix", required=True)
    q.add_argument("--manifest")
    q.set_defaults(func=_cmd_spectrum)

    q = sub.add_parser("bound", help="spectral-radius bound from constants")
    q.add_argument("--gamma", type=float, required=True)
    q.add_argument("--delta", type=float, required=True)
    q.add_argument("--C", type=float, required=True)
    q.add_argument("--k", type=int, required=True)
    q.add_argument("--manifest")
    q.set_defaults(func=_cmd_bound)

    q = sub.add_parser("tail", help="tail constants and resulting bound")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--N", type=int, default=14)
    q.add_argument("--eps", type=float, default=0.01)
    q.add_argument("--k", type=int, default=80)
    q.add_argument("--probes", default="15,2")
    q.add_argument("--matrix", help="reuse a saved linearization matrix")
    q.add_argument("--out")
    _add_config_flags(q)
    q.set_defaults(func=_cmd_tail)

    q = sub.add_parser("solve-beltrami", help="gluing solver diagnostics")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--n-probes", type=int, default=400)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    _add_config_flags(q)
    q.set_defaults(func=_cmd_solve_beltrami)

    q = sub.add_parser("dump-crescent", help="sample the crescent geometry")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--r-lo", type=float, default=1e-4)
    q.add_argument("--r-hi", type=float, default=1e4)
    q.add_argument("--samples", type=int, default=400)
    q.add_argument("--out")
    _add_config_flags(q)
    q.set_defaults(func=_cmd_dump_crescent)

    return p


def parse_and_dispatch(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (CylrenError, ValueError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(_dump_json(diag))
        return 2
    except FileNotFoundError as exc:
        sys.stderr.write(f"cylren: {exc}\n")
        return 1


def main():
    raise SystemExit(parse_and_dispatch())


if __name__ == "__main__":
    main()
