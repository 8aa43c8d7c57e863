"""Command-line front end.

Subcommands: kernel eval, linear solve, semilinear run, odi check,
radon, iterate, lifespan scan, regime.  Exit codes: 0 success/pass,
1 verdict fail, 2 usage or config error, 3 numerical failure.  Every
run that writes files also writes a manifest.json beside them.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ResolvedConfig, parse_config, \
    require_above_double_critical
from .hypfun import HypergeometricError
from .kernels import ConeError, KernelPoint, kernel_E, kernel_K0, kernel_K1, \
    zeta_arg
from .linear1d import CauchyData1D, FdInstabilityError, evaluate_exact, \
    fd_reference_solve
from .odi import OdiProblem, verify_lemma
from .params import ParamError, derive
from .quadrature import QuadratureError
from .radon import RadialProfile, r1_offset, radon_grid
from .semilinear import NonlinearTerm, duhamel_solve_1d, fd_radial_solve
from .experiments import ScanConfig, lifespan_scan, regime_scan
from .iteration import IterationConfig, K_j_factor, L_and_T0, log_B, \
    onset_sigma, seq_ab


def fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_manifest(out: Path, subcommand: str, rc: ResolvedConfig | None,
                   outputs: list[str]) -> None:
    manifest = {
        "tool_version": __version__,
        "config_hash": rc.digest() if rc is not None else "",
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
        "subcommand": subcommand,
        "outputs": outputs,
    }
    with open(out / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2)


def _echo_config(rc: ResolvedConfig) -> None:
    sys.stdout.write(rc.serialize())
    sys.stdout.write(f"# config_hash: {rc.digest()}\n")
    sys.stdout.write("# mu and varsigma defaults are tool choices\n")


def _nl(rc: ResolvedConfig) -> NonlinearTerm:
    mp = rc.mp
    return NonlinearTerm(mp=mp, dp=derive(mp), mode=rc.gamma_mode)


def cmd_kernel_eval(args) -> int:
    rc = parse_config(args.params)
    mp = rc.mp
    dp = derive(mp)
    pt = KernelPoint(t=args.t, x=args.x, s=args.s, z=args.z, mp=mp, dp=dp)
    result = {"t": args.t, "x": args.x, "s": args.s, "z": args.z,
              "zeta": zeta_arg(pt), "E": kernel_E(pt), "nu": dp.nu,
              "R1_offset": r1_offset(mp, dp)}
    if args.s == 0.0:
        result["K1"] = kernel_K1(pt)
        result["K0"] = kernel_K0(args.t, args.x, args.z, mp, dp)
    print(json.dumps(result, indent=2))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "kernel.json", "w") as fh:
            json.dump(result, fh, indent=2)
        write_manifest(out, "kernel eval", rc, ["kernel.json"])
    return 0


def cmd_linear_solve(args) -> int:
    rc = parse_config(args.params)
    _echo_config(rc)
    mp = rc.mp
    dp = derive(mp)
    data = CauchyData1D.default_bumps(R=mp.R, dx=mp.R / 100.0)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    outputs = []
    summary = {"method": args.method, "t_end": args.t_end, "dx": args.dx}
    grid = None
    if args.method in ("fd", "both"):
        grid = fd_reference_solve(data, mp, args.t_end, args.dx)
        rows = [(t, x, v) for i, t in enumerate(grid.ts)
                for x, v in zip(grid.xs[::4], grid.values[i][::4])]
        write_csv(out / "solution.csv", ["t", "x", "v"], rows)
        outputs.append("solution.csv")
    if args.method in ("exact", "both"):
        t = args.t_end
        xs = np.linspace(-(mp.R + 0.98 * (mp.c / mp.H)
                           * math.expm1(mp.H * t)),
                         mp.R + 0.98 * (mp.c / mp.H) * math.expm1(mp.H * t), 41)
        vals, errs = [], []
        for x in xs:
            v, e = evaluate_exact(t, float(x), data, mp, dp)
            vals.append(v)
            errs.append(e)
        write_csv(out / "exact.csv", ["t", "x", "v", "err_estimate"],
                  [(t, x, v, e) for x, v, e in zip(xs, vals, errs)])
        outputs.append("exact.csv")
        summary["max_quadrature_error"] = max(errs)
        if grid is not None:
            fr = grid.frame_at(t)
            interp = np.interp(xs, grid.xs, fr)
            peak = float(np.max(np.abs(fr))) or 1.0
            summary["max_rel_deviation_vs_fd"] = float(
                np.max(np.abs(np.array(vals) - interp)) / peak)
    with open(out / "summary.json", "w") as fh:
        json.dump(summary, fh, indent=2)
    outputs.append("summary.json")
    write_manifest(out, "linear solve", rc, outputs)
    return 0


def cmd_semilinear_run(args) -> int:
    rc = parse_config(args.params)
    require_above_double_critical(rc)
    _echo_config(rc)
    mp = rc.mp
    nl = _nl(rc)
    horizon = args.t_horizon
    if horizon is None:
        from .semilinear import default_horizon
        horizon = default_horizon(mp, nl.dp, args.epsilon)
    cap = args.cap
    if args.solver == "duhamel":
        data = CauchyData1D.default_bumps(R=mp.R, dx=mp.R / 100.0)
        hist, rec = duhamel_solve_1d(data, nl, args.epsilon, horizon,
                                     slab=rc.solver["slab"],
                                     tol=rc.solver["tol"], cap=cap)
    else:
        from .linear1d import bump_c1, bump_c2
        v0 = RadialProfile.from_function(lambda r: bump_c2(r, mp.R), mp.n, mp.R)
        v1 = RadialProfile.from_function(lambda r: bump_c1(r, mp.R), mp.n, mp.R)
        hist, rec = fd_radial_solve(v0, v1, nl, args.epsilon, horizon,
                                    dx=rc.solver["dx"], cap=cap)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "timeseries.csv", ["t", "V", "Lp_p"],
              zip(hist.ts, hist.V, hist.lp_p))
    record = {"epsilon": rec.epsilon,
              "t_blowup": rec.t_blowup if math.isfinite(rec.t_blowup) else "inf",
              "detection": rec.detection, "cap_used": rec.cap_used,
              "solver": rec.solver, "diagnostics": _jsonable(rec.diagnostics)}
    with open(out / "lifespan_record.json", "w") as fh:
        json.dump(record, fh, indent=2)
    write_manifest(out, "semilinear run", rc,
                   ["timeseries.csv", "lifespan_record.json"])
    print(json.dumps(record, indent=2))
    return 0


def _jsonable(d: dict) -> dict:
    out = {}
    for k, v in d.items():
        if isinstance(v, float) and not math.isfinite(v):
            out[k] = "inf" if v > 0 else "-inf"
        elif isinstance(v, (np.floating, np.integer)):
            out[k] = float(v)
        elif isinstance(v, (bool, np.bool_)):
            out[k] = bool(v)
        else:
            out[k] = v
    return out


def cmd_odi_check(args) -> int:
    with open(args.problem) as fh:
        payload_in = json.load(fh)
    theta = payload_in.pop("theta", None)
    kappa = payload_in.pop("kappa", None)
    problem = OdiProblem(**payload_in)
    verdict = verify_lemma(problem, theta=theta, kappa=kappa)
    payload = {
        "T_tilde0": verdict.T_tilde0, "T1": verdict.T1,
        "K0_threshold": verdict.K0_threshold,
        "theta_used": verdict.theta_used, "kappa_used": verdict.kappa_used,
        "blowup_time": verdict.blowup_time
        if math.isfinite(verdict.blowup_time) else "inf",
        "bound_satisfied": verdict.bound_satisfied,
        "seed_path": verdict.seed_path, "B_used": verdict.B_used,
        "outside_normalized_regime": problem.outside_normalized_regime,
    }
    print(json.dumps(payload, indent=2))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "odi_verdict.json", "w") as fh:
            json.dump(payload, fh, indent=2)
        write_manifest(out, "odi check", None, ["odi_verdict.json"])
    return 0 if verdict.bound_satisfied or problem.K < verdict.K0_threshold else 1


def cmd_radon(args) -> int:
    rows = np.loadtxt(args.profile, delimiter=",", skiprows=1)
    rs, vals = rows[:, 0], rows[:, 1]
    support = float(rs[np.nonzero(vals)[0][-1]]) if np.any(vals) else float(rs[-1])
    profile = RadialProfile(rs=rs, values=vals, n=args.n, support_radius=support)
    lo, hi, num = (float(x) for x in args.rho_grid.split(":"))
    rhos = np.linspace(lo, hi, int(num))
    transformed = radon_grid(profile, rhos)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "radon.csv", ["rho", "R"], zip(rhos, transformed))
    write_manifest(out, "radon", None, ["radon.csv"])
    return 0


def cmd_iterate(args) -> int:
    rc = parse_config(args.params)
    require_above_double_critical(rc)
    mp = rc.mp
    dp = derive(mp)
    cfg = IterationConfig(mp=mp, dp=dp)
    eps = args.epsilon
    rows = []
    for j in range(args.jmax + 1):
        a_j, b_j = seq_ab(j, cfg)
        sigma = onset_sigma(j, cfg)
        _, t0 = L_and_T0(1.0, eps, cfg)
        t_eval = max(sigma, t0)
        rows.append((j, a_j, b_j, log_B(j, cfg), sigma,
                     K_j_factor(j, t_eval, eps, cfg)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "iteration.csv",
              ["j", "a_j", "b_j", "ln_B_j", "sigma_j", "log_K_j"], rows)
    write_manifest(out, "iterate", rc, ["iteration.csv"])
    return 0


def cmd_lifespan_scan(args) -> int:
    rc = parse_config(args.config)
    require_above_double_critical(rc)
    _echo_config(rc)
    mp = rc.mp
    horizon = rc.solver["t_horizon"]
    cap = rc.solver["cap"]
    cfg = ScanConfig(
        mp=mp, epsilons=rc.epsilons(), solver=rc.solver["solver"],
        t_horizon=None if horizon == "auto" else float(horizon),
        dx=rc.solver["dx"], slab=rc.solver["slab"], tol=rc.solver["tol"],
        cap=None if cap == "auto" else float(cap),
        margin=rc.scan["margin"])
    result = lifespan_scan(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for r in result.records:
        rows.append((r.epsilon,
                     r.t_blowup if math.isfinite(r.t_blowup) else "inf",
                     r.detection, r.solver,
                     r.diagnostics.get("hypothesis_n_half_minus_nu"),
                     r.diagnostics.get("critical_mode"),
                     r.diagnostics.get("varrho_used")))
    write_csv(out / "records.csv",
              ["epsilon", "t_blowup", "detection", "solver",
               "hypothesis_ok", "critical_mode", "varrho_used"], rows)
    fit = {"slope": result.slope, "intercept": result.intercept,
           "theoretical_exponent": result.theoretical_exponent,
           "envelope_C": result.envelope_C, "verdict": result.verdict,
           "n_excluded": result.n_excluded, "regime": _jsonable(result.regime),
           "margin": cfg.margin}
    with open(out / "fit.json", "w") as fh:
        json.dump(fit, fh, indent=2)
    outputs = ["records.csv", "fit.json"]
    if args.plot:
        outputs.append(_scan_plot(result, out))
    write_manifest(out, "lifespan scan", rc, outputs)
    print(json.dumps(fit, indent=2))
    return {"pass": 0, "inconclusive": 0, "fail": 1}[result.verdict]


def _scan_plot(result, out: Path) -> str:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    eps = np.array([r.epsilon for r in result.records
                    if math.isfinite(r.t_blowup)])
    ts = np.array([r.t_blowup for r in result.records
                   if math.isfinite(r.t_blowup)])
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(eps, ts, "o", label="observed")
    theo = result.theoretical_exponent
    ax.loglog(eps, result.envelope_C * eps ** theo, "--",
              label=f"envelope slope {theo:g}")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("blow-up time")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "plot.svg")
    plt.close(fig)
    return "plot.svg"


def cmd_regime(args) -> int:
    rc = parse_config(args.config)
    mp = rc.mp
    n_values = [int(x) for x in args.n_list.split(",")]
    p_values = [float(x) for x in args.p_list.split(",")] if args.p_list else None
    rows = regime_scan(mp, n_values, p_values)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    header = list(rows[0].keys())
    write_csv(out / "regime.csv", header,
              [[row[k] for k in header] for row in rows])
    write_manifest(out, "regime", rc, ["regime.csv"])
    for row in rows:
        print(row)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adswave")
    sub = ap.add_subparsers(dest="command", required=True)

    kernel = sub.add_parser("kernel").add_subparsers(dest="sub", required=True)
    ke = kernel.add_parser("eval")
    ke.add_argument("--params", required=True)
    ke.add_argument("--t", type=float, required=True)
    ke.add_argument("--x", type=float, required=True)
    ke.add_argument("--s", type=float, default=0.0)
    ke.add_argument("--z", type=float, required=True)
    ke.add_argument("--out", default="")
    ke.set_defaults(func=cmd_kernel_eval)

    linear = sub.add_parser("linear").add_subparsers(dest="sub", required=True)
    ls = linear.add_parser("solve")
    ls.add_argument("--params", required=True)
    ls.add_argument("--t-end", type=float, required=True)
    ls.add_argument("--dx", type=float, default=0.01)
    ls.add_argument("--method", choices=("exact", "fd", "both"), default="both")
    ls.add_argument("--out", default="adswave-linear")
    ls.set_defaults(func=cmd_linear_solve)

    semi = sub.add_parser("semilinear").add_subparsers(dest="sub", required=True)
    sr = semi.add_parser("run")
    sr.add_argument("--params", required=True)
    sr.add_argument("--epsilon", type=float, required=True)
    sr.add_argument("--solver", choices=("duhamel", "fd"), default="fd")
    sr.add_argument("--t-horizon", type=float, default=None)
    sr.add_argument("--cap", type=float, default=None)
    sr.add_argument("--out", default="adswave-semilinear")
    sr.set_defaults(func=cmd_semilinear_run)

    odi = sub.add_parser("odi").add_subparsers(dest="sub", required=True)
    oc = odi.add_parser("check")
    oc.add_argument("--problem", required=True)
    oc.add_argument("--out", default="")
    oc.set_defaults(func=cmd_odi_check)

    rad = sub.add_parser("radon")
    rad.add_argument("--profile", required=True)
    rad.add_argument("--n", type=int, required=True)
    rad.add_argument("--rho-grid", default="-2:2:101")
    rad.add_argument("--out", default="adswave-radon")
    rad.set_defaults(func=cmd_radon)

    it = sub.add_parser("iterate")
    it.add_argument("--params", required=True)
    it.add_argument("--jmax", type=int, default=30)
    it.add_argument("--epsilon", type=float, default=0.01)
    it.add_argument("--out", default="adswave-iterate")
    it.set_defaults(func=cmd_iterate)

    life = sub.add_parser("lifespan").add_subparsers(dest="sub", required=True)
    lsc = life.add_parser("scan")
    lsc.add_argument("--config", required=True)
    lsc.add_argument("--plot", action="store_true")
    lsc.add_argument("--out", default="adswave-lifespan")
    lsc.set_defaults(func=cmd_lifespan_scan)

    reg = sub.add_parser("regime")
    reg.add_argument("--config", required=True)
    reg.add_argument("--n-list", default="1,2,3,4")
    reg.add_argument("--p-list", default="")
    reg.add_argument("--out", default="adswave-regime")
    reg.set_defaults(func=cmd_regime)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (QuadratureError, HypergeometricError, FdInstabilityError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, ParamError, ConeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
