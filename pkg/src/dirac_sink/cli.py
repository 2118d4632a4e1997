"""Command-line front end.

Every subcommand is a thin adapter over the library: same inputs, same
numbers.  Exit codes: 0 success, 2 usage error (missing/conflicting
parameters), 1 numerical failure (the error class is named on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, csvio, dynamics, noise, spectral, sweep
from .config import load_config
from .errors import DiracSinkError
from .params import ModelParams, coupling_from_wavevector


class UsageError(Exception):
    pass


def _add_model_flags(sp):
    sp.add_argument("--config", help="flat key=value parameter file; flags override it")
    sp.add_argument("--eps", type=float, help="level splitting eps1-eps2 [ps^-1], split symmetrically")
    sp.add_argument("--eps1", type=float, help="site-A energy [ps^-1]")
    sp.add_argument("--eps2", type=float, help="site-B energy [ps^-1]")
    sp.add_argument("--gamma1", type=float, help="escape rate of site A [ps^-1]")
    sp.add_argument("--gamma2", type=float, help="escape rate of site B [ps^-1]")
    sp.add_argument("--v-re", type=float, help="Re V [ps^-1] (exclusive with --qx/--qy/--vf)")
    sp.add_argument("--v-im", type=float, help="Im V [ps^-1]")
    sp.add_argument("--qx", type=float, help="wave vector qx [cm^-1]")
    sp.add_argument("--qy", type=float, help="wave vector qy [cm^-1]")
    sp.add_argument("--vf", type=float, help="Fermi velocity [cm/s]")


def _add_output_flags(sp):
    sp.add_argument("--out", help="output file path")
    sp.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="output encoding (json wraps the same rows)")
    sp.add_argument("--seed", type=int, help="RNG seed (Monte-Carlo, manifests)")


def _add_integrator_flags(sp):
    sp.add_argument("--t-final", type=float, help="evolution window [ps] (default 10)")
    sp.add_argument("--dt", type=float, help="step / sampling quantum [ps] (default 1e-3)")
    sp.add_argument("--stride", type=int, help="record every stride-th step (default 50)")
    sp.add_argument("--method", choices=("rk45", "rk4"), help="integrator (default rk45)")
    sp.add_argument("--rtol", type=float, help="relative tolerance (default 1e-10)")
    sp.add_argument("--atol", type=float, help="absolute tolerance (default 1e-12)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="dirac-sink",
        description="Two-level non-Hermitian Dirac-point model: spectra, "
        "exceptional points, sink efficiencies, telegraph noise, sweeps. "
        "Rates and energies in ps^-1 (1 ps^-1 ~ 0.66 meV), time in ps.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="complex eigenvalues and EP flag at one point")
    _add_model_flags(sp); _add_output_flags(sp)

    sp = sub.add_parser("ep", help="distance to the exceptional-point locus")
    _add_model_flags(sp); _add_output_flags(sp)
    sp.add_argument("--tol", type=float, help="EP detection tolerance [ps^-2 units of |V|^2]")

    sp = sub.add_parser("criterion", help="resonance-overlap roots Gamma1* (Gamma0 = spacing)")
    _add_model_flags(sp); _add_output_flags(sp)
    sp.add_argument("--gamma1-max", type=float, help="search upper bound [ps^-1]")

    sp = sub.add_parser("st", help="superradiance transition: argmax of the subradiant width")
    _add_model_flags(sp); _add_output_flags(sp)
    sp.add_argument("--gamma1-max", type=float, help="grid upper bound [ps^-1]")
    sp.add_argument("--points", type=int, default=501, help="grid points (>= 100)")

    sp = sub.add_parser("propagate", help="time evolution of rho and the efficiencies")
    _add_model_flags(sp); _add_output_flags(sp); _add_integrator_flags(sp)
    sp.add_argument("--init", help="initial state: siteA, siteB, plus, minus")

    sp = sub.add_parser("efficiency", help="eta_n(tau) over a Gamma1 grid")
    _add_model_flags(sp); _add_output_flags(sp); _add_integrator_flags(sp)
    sp.add_argument("--init", help="initial state: siteA, siteB, plus, minus")
    sp.add_argument("--gamma1-min", type=float, default=0.1, help="grid start [ps^-1]")
    sp.add_argument("--gamma1-max", type=float, default=20.0, help="grid end [ps^-1]")
    sp.add_argument("--points", type=int, default=200, help="grid points")

    sp = sub.add_parser("eta0", help="closed-form efficiency coefficients / eta0 surface")
    _add_model_flags(sp); _add_output_flags(sp)
    sp.add_argument("--eps-values", help="comma list of eps rows [ps^-1] for a surface")
    sp.add_argument("--gamma1-min", type=float, default=0.05, help="surface grid start [ps^-1]")
    sp.add_argument("--gamma1-max", type=float, default=10.0, help="surface grid end [ps^-1]")
    sp.add_argument("--points", type=int, default=200, help="surface grid points")

    sp = sub.add_parser("noisy", help="noise-averaged evolution (exact RTP closure)")
    _add_model_flags(sp); _add_output_flags(sp); _add_integrator_flags(sp)
    sp.add_argument("--init", help="initial state: siteA, siteB, plus, minus")
    sp.add_argument("--d", type=float, help="noise amplitude asymmetry d1-d2 [ps^-1]")
    sp.add_argument("--gamma-noise", type=float, help="RTP rate gamma [ps^-1]")

    sp = sub.add_parser("mc", help="Monte-Carlo RTP oracle with standard errors")
    _add_model_flags(sp); _add_output_flags(sp); _add_integrator_flags(sp)
    sp.add_argument("--init", help="initial state: siteA, siteB, plus, minus")
    sp.add_argument("--d", type=float, help="noise amplitude asymmetry d1-d2 [ps^-1]")
    sp.add_argument("--gamma-noise", type=float, help="RTP rate gamma [ps^-1]")
    sp.add_argument("--n-traj", type=int, default=10_000, help="trajectories (>= 100)")

    sp = sub.add_parser("sweep", help="generic grid sweep with CSV + manifest")
    _add_model_flags(sp); _add_output_flags(sp)
    sp.add_argument("--task", required=True, choices=sweep.TASKS)
    sp.add_argument("--axis", action="append", default=[],
                    help="axis spec 'name:lo:hi:count[:log]' or 'name=v1,v2,...' (max 2)")
    sp.add_argument("--init", help="initial state for efficiency tasks")
    sp.add_argument("--d", type=float, help="noise amplitude asymmetry [ps^-1]")
    sp.add_argument("--gamma-noise", type=float, help="RTP rate gamma [ps^-1]")
    sp.add_argument("--t-final", type=float, help="evolution window [ps]")
    sp.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")

    sp = sub.add_parser("figure", help="regenerate the dataset behind one figure")
    sp.add_argument("figure_id", type=int, help="figure number: 3, 4, 5, 6, 7, 8, or 9")
    _add_output_flags(sp)
    sp.add_argument("--points", type=int, help="override per-axis resolution")
    sp.add_argument("--manifest", help="manifest path (default: <out>.manifest.json)")

    return ap


def _merged(args) -> dict:
    merged = dict(load_config(args.config)) if getattr(args, "config", None) else {}
    for key in ("eps1", "eps2", "gamma1", "gamma2", "v_re", "v_im", "qx", "qy",
                "vf", "init", "d", "gamma_noise", "t_final", "dt"):
        val = getattr(args, key, None)
        if val is not None:
            merged[key] = val
    if getattr(args, "eps", None) is not None:
        if getattr(args, "eps1", None) is not None or getattr(args, "eps2", None) is not None:
            raise UsageError("--eps conflicts with --eps1/--eps2")
        merged["eps1"], merged["eps2"] = 0.5 * args.eps, -0.5 * args.eps
    return merged


def _coupling(args, merged) -> complex:
    flag_v = args.v_re is not None or args.v_im is not None
    flag_q = any(getattr(args, k) is not None for k in ("qx", "qy", "vf"))
    if flag_v and flag_q:
        raise UsageError("--v-re/--v-im and --qx/--qy/--vf are mutually exclusive")
    use_q = flag_q or (not flag_v and "v_re" not in merged and "qx" in merged)
    if use_q:
        missing = [k for k in ("qx", "qy", "vf") if k not in merged]
        if missing:
            raise UsageError(f"wave-vector coupling needs {missing}")
        return coupling_from_wavevector(merged["qx"], merged["qy"], merged["vf"])
    if "v_re" not in merged and "v_im" not in merged:
        raise UsageError("coupling V is required: --v-re/--v-im or --qx/--qy/--vf")
    return complex(merged.get("v_re", 0.0), merged.get("v_im", 0.0))


def _model(args, merged, need_gamma1=True) -> ModelParams:
    if "eps1" not in merged or "eps2" not in merged:
        raise UsageError("site energies are required: --eps or --eps1/--eps2")
    if "gamma2" not in merged:
        raise UsageError("--gamma2 is required [ps^-1]")
    gamma1 = merged.get("gamma1")
    if need_gamma1 and gamma1 is None:
        raise UsageError("--gamma1 is required [ps^-1]")
    return ModelParams(
        merged["eps1"], merged["eps2"], gamma1 if gamma1 is not None else 0.0,
        merged["gamma2"], _coupling(args, merged),
    )


def _integrator(merged) -> dynamics.IntegratorConfig:
    kwargs = {}
    for key, field in (("t_final", "t_final"), ("dt", "dt"), ("stride", "stride"),
                       ("method", "method"), ("rtol", "rtol"), ("atol", "atol")):
        if merged.get(key) is not None:
            kwargs[field] = merged[key]
    return dynamics.IntegratorConfig(**kwargs)


def _require_init(merged) -> str:
    if "init" not in merged:
        raise UsageError("--init is required (siteA, siteB, plus, or minus)")
    return str(merged["init"])


def _emit_rows(args, header, rows) -> None:
    if not args.out:
        return
    if args.format == "json":
        payload = {"header": header, "rows": [list(r) for r in rows]}
        Path(args.out).write_text(json.dumps(payload) + "\n")
    else:
        csvio.write_csv(args.out, header, rows)


def _print_pairs(pairs) -> None:
    for key, val in pairs:
        print(f"{key} = {csvio.fmt(val)}")


def _cmd_spectrum(args) -> int:
    merged = _merged(args)
    p = _model(args, merged)
    cs = spectral.spectrum(p)
    ep = spectral.ep_locus_test(p)
    pairs = [
        ("E1", cs.e1), ("Y1", cs.y1), ("E2", cs.e2), ("Y2", cs.y2),
        ("omega_re", cs.omega.real), ("omega_im", cs.omega.imag),
        ("spacing", cs.spacing), ("ep_distance", ep.distance), ("is_ep", ep.is_ep),
    ]
    _print_pairs(pairs)
    _emit_rows(args, [k for k, _ in pairs], [[v for _, v in pairs]])
    return 0


def _cmd_ep(args) -> int:
    merged = _merged(args)
    p = _model(args, merged)
    ep = spectral.ep_locus_test(p, tol=args.tol)
    pairs = [("ep_distance", ep.distance), ("is_ep", ep.is_ep), ("tol", ep.tol)]
    _print_pairs(pairs)
    _emit_rows(args, [k for k, _ in pairs], [[v for _, v in pairs]])
    return 0


def _cmd_criterion(args) -> int:
    merged = _merged(args)
    p = _model(args, merged, need_gamma1=False)
    roots = spectral.overlap_criterion_solve(
        p.eps, p.v, p.gamma2, gamma1_max=args.gamma1_max
    )
    for r in roots:
        print(f"gamma1_star = {csvio.fmt(float(r))}")
    _emit_rows(args, ["gamma1_star"], [[float(r)] for r in roots])
    return 0


def _cmd_st(args) -> int:
    merged = _merged(args)
    p = _model(args, merged, need_gamma1=False)
    gmax = args.gamma1_max
    if gmax is None:
        gmax = 10.0 * float(np.hypot(p.omega0, p.eps))
    grid = np.linspace(0.0, gmax, max(args.points, 100))
    loc = spectral.st_locate(p.eps, p.v, p.gamma2, grid)
    _print_pairs([("gamma1_st", loc.gamma1), ("subradiant_width", loc.width)])
    _emit_rows(args, ["gamma1_st", "subradiant_width"], [[loc.gamma1, loc.width]])
    return 0


def _cmd_propagate(args) -> int:
    merged = _merged(args)
    p = _model(args, merged)
    rec = dynamics.propagate(p, _require_init(merged), _integrator(merged))
    if args.out:
        if args.format == "json":
            _emit_rows(args, rec.header(), rec.rows())
        else:
            rec.to_csv(args.out)
    _print_pairs([
        ("t_final", rec.times[-1]), ("trace", rec.trace[-1]),
        ("eta1", rec.eta1[-1]), ("eta2", rec.eta2[-1]),
        ("max_budget_err", rec.budget_error.max()),
    ])
    return 0


def _cmd_efficiency(args) -> int:
    merged = _merged(args)
    p = _model(args, merged, need_gamma1=False)
    grid = np.linspace(args.gamma1_min, args.gamma1_max, args.points)
    curve = dynamics.efficiency_curve(p, _require_init(merged), grid, _integrator(merged))
    if args.out:
        _emit_rows(args, curve.header(), curve.rows())
    _print_pairs([
        ("argmax_gamma1", curve.argmax_gamma1), ("eta1_max", curve.argmax_eta1),
        ("interior_maximum", curve.interior_maximum),
    ])
    return 0


def _cmd_eta0(args) -> int:
    merged = _merged(args)
    if args.eps_values:
        p = _model(args, merged, need_gamma1=False)
        eps_values = np.array([float(s) for s in args.eps_values.split(",")])
        grid = np.linspace(args.gamma1_min, args.gamma1_max, args.points)
        surf = analytic.eta0_surface(grid, eps_values, p.gamma2, p.v)
        if args.out:
            _emit_rows(args, surf.header(), surf.rows())
        for eps_row, gmax in zip(surf.eps, surf.row_argmax_gamma1):
            print(f"argmax_gamma1[eps={csvio.fmt(float(eps_row))}] = {csvio.fmt(float(gmax))}")
        return 0
    p = _model(args, merged)
    c = analytic.coefficients(p)
    pairs = [("eta0", c.eta0), ("B", c.b), ("C", c.c), ("D", c.d),
             ("omega1", c.omega1), ("omega2", c.omega2)]
    _print_pairs(pairs)
    _emit_rows(args, [k for k, _ in pairs], [[v for _, v in pairs]])
    return 0


def _noise_params(merged) -> noise.NoiseParams:
    if "d" not in merged or "gamma_noise" not in merged:
        raise UsageError("--d and --gamma-noise are required [ps^-1]")
    return noise.NoiseParams.symmetric(merged["d"], merged["gamma_noise"])


def _cmd_noisy(args) -> int:
    merged = _merged(args)
    p = _model(args, merged)
    rec = noise.propagate_noisy(p, _noise_params(merged), _require_init(merged),
                                _integrator(merged))
    if args.out:
        if args.format == "json":
            _emit_rows(args, rec.header(), rec.rows())
        else:
            rec.to_csv(args.out)
    _print_pairs([
        ("trace", rec.trace[-1]), ("eta1", rec.eta1[-1]), ("eta2", rec.eta2[-1]),
        ("max_budget_err", rec.budget_error.max()),
    ])
    return 0


def _cmd_mc(args) -> int:
    merged = _merged(args)
    p = _model(args, merged)
    if args.seed is None:
        raise UsageError("--seed is required for reproducible Monte-Carlo runs")
    rec = noise.mc_oracle(p, _noise_params(merged), _require_init(merged),
                          _integrator(merged), n_traj=args.n_traj, rng_seed=args.seed)
    if args.out:
        if args.format == "json":
            _emit_rows(args, rec.header(), rec.rows())
        else:
            rec.to_csv(args.out)
    _print_pairs([
        ("trace", rec.trace[-1]), ("eta1", rec.eta1[-1]), ("eta2", rec.eta2[-1]),
        ("stderr_eta1", rec.stderr["eta1"][-1]),
    ])
    return 0


def _parse_axis(spec: str) -> sweep.GridAxis:
    if "=" in spec:
        name, _, rest = spec.partition("=")
        return sweep.GridAxis.explicit(name.strip(), [float(s) for s in rest.split(",")])
    parts = spec.split(":")
    if len(parts) not in (4, 5):
        raise UsageError(f"axis spec must be 'name:lo:hi:count[:log]', got {spec!r}")
    name, lo, hi, count = parts[0], float(parts[1]), float(parts[2]), int(parts[3])
    if len(parts) == 5:
        if parts[4] != "log":
            raise UsageError(f"unknown axis spacing {parts[4]!r}")
        return sweep.GridAxis.log(name, lo, hi, count)
    return sweep.GridAxis.linear(name, lo, hi, count)


def _write_sweep(args, result: sweep.SweepResult) -> None:
    if args.out:
        if args.format == "json":
            _emit_rows(args, result.header, result.rows)
        else:
            result.to_csv(args.out)
        manifest = getattr(args, "manifest", None) or f"{args.out}.manifest.json"
        result.write_manifest(manifest)
    print(f"cells = {len(result.rows)}")
    flagged = sum(1 for r in result.rows if r[-1])
    print(f"flagged = {flagged}")


def _cmd_sweep(args) -> int:
    merged = _merged(args)
    axes = tuple(_parse_axis(s) for s in args.axis)
    if not axes:
        raise UsageError("at least one --axis is required")
    axis_names = {a.name for a in axes}
    fixed = {}
    if not ({"eps", "eps1", "eps2"} & axis_names):
        if "eps1" in merged and "eps2" in merged:
            fixed["eps1"], fixed["eps2"] = merged["eps1"], merged["eps2"]
        else:
            raise UsageError("site energies are required: --eps or --eps1/--eps2")
    for key in ("gamma1", "gamma2", "v_re", "v_im", "d", "gamma_noise"):
        if key in merged and key not in axis_names:
            fixed[key] = merged[key]
    if args.task in ("efficiency", "noisy-efficiency"):
        fixed["init"] = _require_init(merged)
        fixed["t_final"] = merged.get("t_final", 10.0)
    try:
        grid = sweep.SweepGrid(axes=axes, task=args.task, fixed=fixed)
    except sweep.InvalidGrid as exc:
        raise UsageError(str(exc)) from exc
    _write_sweep(args, sweep.run_sweep(grid, seed=args.seed))
    return 0


def _cmd_figure(args) -> int:
    try:
        ds = sweep.figure_dataset(args.figure_id, points=args.points)
    except sweep.UnknownFigure as exc:
        raise UsageError(str(exc)) from exc
    _write_sweep(args, ds.run(seed=args.seed))
    return 0


_HANDLERS = {
    "spectrum": _cmd_spectrum,
    "ep": _cmd_ep,
    "criterion": _cmd_criterion,
    "st": _cmd_st,
    "propagate": _cmd_propagate,
    "efficiency": _cmd_efficiency,
    "eta0": _cmd_eta0,
    "noisy": _cmd_noisy,
    "mc": _cmd_mc,
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
}


def dispatch(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DiracSinkError as exc:
        print(f"error[{type(exc).__name__}]: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(dispatch())
