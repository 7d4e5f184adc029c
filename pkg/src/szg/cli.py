"""Command line entry point ``szg``.

Exit codes: 0 success, 2 a declared tolerance was violated (or a numerical
failure), 3 IO error, 4 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

EXIT_OK, EXIT_NUMERICAL, EXIT_IO, EXIT_CONFIG = 0, 2, 3, 4

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")


def _fmt(x) -> str:
    if isinstance(x, int) and not isinstance(x, bool):
        return str(x)
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(path: str, header: list[str], rows) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def read_points(path: str) -> list[tuple]:
    """Rows of re_z,im_z[,re_w,im_w] from a CSV file with a header line."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    out = []
    for r in rows[1:]:
        if not r:
            continue
        vals = [float(v) for v in r]
        if len(vals) == 2:
            out.append((complex(vals[0], vals[1]),))
        elif len(vals) == 4:
            out.append((complex(vals[0], vals[1]), complex(vals[2], vals[3])))
        else:
            raise ValueError(f"{path}: expected 2 or 4 columns, got {len(vals)}")
    return out


def _c(z) -> list[float]:
    return [float(complex(z).real), float(complex(z).imag)]


# ------------------------------------------------------------ commands


class Context:
    """Resolved inputs shared by the command handlers."""

    def __init__(self, cfg, args):
        from .boundary import make_weight
        from .geometry import make_preset

        self.cfg = cfg
        self.args = args
        self.domain = make_preset(cfg.domain.preset, cfg.domain.params, cfg.domain.nodes)
        self.weight = make_weight(self.domain, cfg.weight.family, cfg.weight.params)
        self.tol = cfg.tolerances
        self.checks: dict[str, dict] = {}
        self.outputs: list[str] = []

    def pole(self):
        from .config import parse_complex
        from .geometry import default_pole

        if getattr(self.args, "pole", None):
            return parse_complex(self.args.pole, "--pole")
        if self.cfg.task.pole is not None:
            return self.cfg.task.pole
        return default_pole(self.domain)

    def check(self, name: str, value: float, tol_key: str | None = None, tol: float | None = None):
        limit = self.tol[tol_key] if tol_key else tol
        self.checks[name] = {"value": float(value), "tolerance": float(limit),
                             "pass": bool(value <= limit)}

    def out_path(self, default_name: str) -> str:
        path = getattr(self.args, "out", None) or self.cfg.output
        if not path:
            return default_name
        if path.endswith(os.sep) or os.path.isdir(path):
            return os.path.join(path, default_name)
        return path

    def emit(self, default_name: str, header, rows) -> str:
        path = self.out_path(default_name)
        write_csv(path, header, rows)
        self.outputs.append(path)
        return path


def cmd_domain(ctx: Context):
    d, w = ctx.domain, ctx.weight
    rows = []
    for ci, (c, s) in enumerate(zip(d.components, d.slices())):
        for k in range(c.n):
            rows.append((ci, k, float(c.t[k]), float(c.z[k].real), float(c.z[k].imag),
                         float(c.dz[k].real), float(c.dz[k].imag), float(c.speed[k]),
                         float(c.curvature[k]), float(w.phi[s][k]), float(w.dinv_ds[s][k])))
    ctx.emit("domain.csv", ["component", "node", "t", "re_z", "im_z", "re_dz", "im_dz", "speed",
                            "curvature", "phi", "dinv_ds"], rows)
    return {"connectivity": d.connectivity, "total_nodes": d.total_nodes}


def cmd_szego(ctx: Context):
    from .boundary import field_to_rows
    from .kerzman_stein import solver_for

    d, w = ctx.domain, ctx.weight
    a = ctx.pole()
    sol = solver_for(d, w).solve(a)
    ctx.check("linear_residual", sol.linear_residual, "linear_residual")
    ctx.check("reproducing_residual", sol.reproducing_residual, "reproducing")
    ctx.emit("szego.csv", ["component", "node", "t", "re_S", "im_S"], field_to_rows(sol.boundary, d))
    info = {"pole": _c(a)}
    if ctx.cfg.task.points:
        vals = solver_for(d, w).S(list(ctx.cfg.task.points), a)
        info["interior"] = [[*_c(z), *_c(v)] for z, v in zip(ctx.cfg.task.points, vals)]
    return info


def cmd_garabedian(ctx: Context):
    from .kernels import boundary_identity_residual, garabedian_from_szego
    from .kerzman_stein import solver_for

    d, w = ctx.domain, ctx.weight
    a = ctx.pole()
    sol = solver_for(d, w).solve(a)
    g = garabedian_from_szego(sol, d, w)
    ctx.check("boundary_identity", boundary_identity_residual(sol, g, d, w), "boundary_identity")
    rows = []
    for ci, s in enumerate(d.slices()):
        t = d.components[ci].t
        for k, (L, l) in enumerate(zip(g.boundary_L.values[s], g.boundary_l.values[s])):
            rows.append((ci, k, float(t[k]), float(L.real), float(L.imag), float(l.real), float(l.imag)))
    ctx.emit("garabedian.csv", ["component", "node", "t", "re_L", "im_L", "re_l", "im_l"], rows)
    return {"pole": _c(a)}


def cmd_zeros(ctx: Context):
    from .boundary import cauchy_apply
    from .kernels import zero_count, zero_locate
    from .kerzman_stein import solver_for

    d, w = ctx.domain, ctx.weight
    a = ctx.pole()
    sol = solver_for(d, w).solve(a)
    count = zero_count(sol, d)
    zs = zero_locate(sol, d, w, tol=ctx.tol["zero_abs"]) if count else []
    rows = [(z.real, z.imag, float(abs(cauchy_apply(sol.values, z, d, check=False)[0]))) for z in zs]
    worst = max((r[2] for r in rows), default=0.0)
    ctx.check("zero_abs", worst, "zero_abs")
    ctx.emit("zeros.csv", ["re", "im", "abs_S"], rows)
    return {"pole": _c(a), "count": count, "expected_for_weight_near_1": d.connectivity - 1}


def cmd_ahlfors(ctx: Context):
    import numpy as np

    from .kernels import ahlfors_eval, ahlfors_map

    d = ctx.domain
    a = ctx.pole()
    f = ahlfors_map(d, a)
    bv = f.boundary_values()
    ctx.check("boundary_modulus", float(np.max(np.abs(np.abs(bv) - 1.0))), "ahlfors_modulus")
    ctx.check("value_at_pole", float(abs(ahlfors_eval(f, a)[0])), "ahlfors_modulus")
    rows = []
    for ci, s in enumerate(d.slices()):
        t = d.components[ci].t
        for k, v in enumerate(bv[s]):
            rows.append((ci, k, float(t[k]), float(v.real), float(v.imag), float(abs(v))))
    ctx.emit("ahlfors.csv", ["component", "node", "t", "re_f", "im_f", "abs_f"], rows)
    info = {"pole": _c(a), "zeros": [_c(z) for z in f.zeros]}
    if ctx.cfg.task.points:
        vals = ahlfors_eval(f, list(ctx.cfg.task.points))
        info["interior"] = [[*_c(z), *_c(v)] for z, v in zip(ctx.cfg.task.points, vals)]
    return info


def cmd_interp(ctx: Context):
    from .kernels import ahlfors_map, interpolation_residual

    d, w = ctx.domain, ctx.weight
    f = ahlfors_map(d, ctx.pole())
    pairs = ctx.cfg.task.pairs or ((0.6j, -0.55),)
    rows, worst = [], 0.0
    for z, wq in pairs:
        r = interpolation_residual(d, w, f, z, wq)
        worst = max(worst, r)
        rows.append((*_c(z), *_c(wq), r))
    ctx.check("interpolation", worst, "interpolation")
    ctx.emit("interp.csv", ["re_z", "im_z", "re_w", "im_w", "residual"], rows)
    return {"pole": _c(f.a), "zeros": [_c(z) for z in f.zeros]}


def _bergman_obj(ctx: Context):
    from .bergman import make_bergman

    t = ctx.cfg.task
    return make_bergman(ctx.domain, t.basis, t.gram, weight=ctx.weight, pole=t.pole)


def _pair_list(ctx: Context, need_pairs: bool):
    if getattr(ctx.args, "points", None):
        pts = read_points(ctx.args.points)
        return pts
    from .experiments import default_pairs, default_points

    if need_pairs:
        return [tuple(p) for p in ctx.cfg.task.pairs] or default_pairs(ctx.domain)
    return [(z,) for z in ctx.cfg.task.points] or [(z,) for z in default_points(ctx.domain)]


def cmd_bergman(ctx: Context):
    bk = _bergman_obj(ctx)
    pairs = _pair_list(ctx, True)
    if not pairs or any(len(p) != 2 for p in pairs):
        raise ValueError("bergman needs point pairs (re_z,im_z,re_w,im_w)")
    rows = [(*_c(z), *_c(w), *_c(bk.K(z, w)[0])) for z, w in pairs]
    ctx.emit("bergman.csv", ["re_z", "im_z", "re_w", "im_w", "re_K", "im_K"], rows)
    return {"basis": bk.basis.basis_id, "gram_method": bk.gram.method, "gram_est_error": bk.gram.est_error}


def cmd_reduced(ctx: Context):
    from .bergman import higher_reduced_report
    from .config import parse_complex

    bk = _bergman_obj(ctx)
    order = ctx.args.order or ctx.cfg.task.order
    zeta = (parse_complex(ctx.args.zeta, "--zeta") if ctx.args.zeta
            else ctx.cfg.task.zeta)
    pts = _pair_list(ctx, zeta is None)
    rows, conds = [], []
    for p in pts:
        z, w = (p[0], zeta) if zeta is not None else p
        if order == 1:
            val = complex(bk.reduced(z, w)[0])
        else:
            rep = higher_reduced_report(order, z, w, ctx.domain, bk)
            val = rep.value
            conds.append(rep.cond)
        rows.append((*_c(z), *_c(w), *_c(val)))
    ctx.emit("reduced.csv", ["re_z", "im_z", "re_w", "im_w", "re_K", "im_K"], rows)
    return {"order": order, "basis": bk.basis.basis_id, "gram_method": bk.gram.method,
            "gram_est_error": bk.gram.est_error, "condition_numbers": conds}


def cmd_converge(ctx: Context):
    from . import experiments as X

    t = ctx.cfg.task
    kind = ctx.args.kind or t.kind
    fam = X.WeightFamily(t.family, t.family_scale, components=t.components)
    d = ctx.domain
    if kind == "zeros":
        zt = X.zero_tracking(fam, d, ctx.pole(), t.kmax)
        rows = [(r.k, r.count, r.distance, ";".join(f"{z.real:.17g}{z.imag:+.17g}j" for z in r.zeros))
                for r in zt.rows]
        ctx.emit("converge.csv", ["k", "count", "distance", "zeros"], rows)
        return {"kind": kind, "expected": zt.expected, "k0": zt.k0,
                "limit_zeros": [_c(z) for z in zt.limit_zeros]}
    grid = list(t.pairs) or None
    if kind == "interior":
        rep = X.ramadanov_interior(fam, d, t.kmax, grid)
    elif kind == "closure":
        rep = X.ramadanov_closure(fam, d, t.kmax)
    elif kind == "boundary-point":
        rep = X.boundary_point_convergence(fam, d, t.node, list(t.points) or None, t.kmax)
    else:
        rep = X.garabedian_convergence(fam, d, t.kmax, grid)
    ctx.emit("converge.csv", ["k", "sup_error", "grid_id"], rep.rows())
    if rep.predicted is not None:
        ctx.check("homogeneity_gap", rep.max_prediction_gap(), tol=1e-9)
    return {"kind": kind, "family": fam.family_id, "grid_id": rep.grid_id, "grid": [
        [_c(p) if isinstance(p, complex) else p for p in pair] for pair in rep.grid],
        "tail_monotone": rep.tail_monotone(), "ratio": rep.ratio, "slope": rep.slope}


def cmd_selftest(ctx: Context | None, args):
    from .selftest import run_battery

    results = run_battery()
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        extra = f"  ({r.detail})" if r.detail else ""
        print(f"{status}  {r.name:32s} {r.value:.3e} <= {r.tolerance:.1e}{extra}")
    path = args.out or "selftest.csv"
    write_csv(path, ["check", "value", "tolerance", "pass"],
              [(r.name, r.value, r.tolerance, int(r.passed)) for r in results])
    return results, path


HANDLERS = {
    "domain": cmd_domain,
    "szego": cmd_szego,
    "garabedian": cmd_garabedian,
    "zeros": cmd_zeros,
    "ahlfors": cmd_ahlfors,
    "interp-check": cmd_interp,
    "bergman": cmd_bergman,
    "reduced": cmd_reduced,
    "converge": cmd_converge,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="szg", description=__doc__.splitlines()[0])
    p.add_argument("--threads", type=int, default=None,
                   help="cap BLAS/OpenMP worker threads (also SZG_THREADS)")
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*HANDLERS, "selftest"):
        sp = sub.add_parser(name)
        sp.add_argument("--out", help="output CSV path (or directory)")
        if name == "selftest":
            continue
        sp.add_argument("--config", required=True, help="TOML run configuration")
        sp.add_argument("--pole", help="pole a, e.g. 0.3+0i")
        if name in ("bergman", "reduced"):
            sp.add_argument("--points", help="CSV of points: re_z,im_z[,re_w,im_w]")
        if name == "reduced":
            sp.add_argument("--order", type=int, default=None)
            sp.add_argument("--zeta", default=None)
        if name == "converge":
            sp.add_argument("--kind", choices=("interior", "closure", "boundary-point", "zeros", "garabedian"))
    return p


def _apply_threads(n) -> None:
    n = n or os.environ.get("SZG_THREADS")
    if n:
        for var in _THREAD_VARS:
            os.environ[var] = str(int(n))


def _manifest(path: str, payload: dict) -> str:
    root, _ = os.path.splitext(path)
    mpath = root + ".manifest.json"
    with open(mpath, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return mpath


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # BLAS reads these when numpy is first imported
    _apply_threads(args.threads)

    from . import __version__
    from .config import ConfigError, load_config

    if args.command == "selftest":
        try:
            results, path = cmd_selftest(None, args)
        except OSError as exc:
            print(f"szg: {exc}", file=sys.stderr)
            return EXIT_IO
        return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL

    try:
        cfg = load_config(args.config)
        ctx = Context(cfg, args)
    except OSError as exc:
        print(f"szg: cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ValueError) as exc:
        print(f"szg: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    import warnings

    import numpy as np
    import scipy

    caught = []
    try:
        with warnings.catch_warnings(record=True) as wlist:
            warnings.simplefilter("always")
            info = HANDLERS[args.command](ctx)
            caught = sorted({str(w.message) for w in wlist})
    except OSError as exc:
        print(f"szg: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, RuntimeError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"szg: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    failed = [k for k, v in ctx.checks.items() if not v["pass"]]
    payload = {
        "command": args.command,
        "szg_version": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "domain": {"id": ctx.domain.domain_id, "preset": cfg.domain.preset,
                   "params": list(cfg.domain.params), "nodes": cfg.domain.nodes},
        "weight": {"family": cfg.weight.family, "params": list(cfg.weight.params)},
        "tolerances": cfg.tolerances,
        "checks": ctx.checks,
        "warnings": caught,
        "outputs": ctx.outputs,
        "result": info,
        "status": "fail" if failed else "ok",
    }
    try:
        mpath = _manifest(ctx.outputs[0] if ctx.outputs else ctx.out_path(args.command + ".csv"), payload)
    except OSError as exc:
        print(f"szg: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in ctx.outputs:
        print(path)
    print(mpath)
    if failed:
        print(f"szg: tolerance violated: {', '.join(failed)}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
