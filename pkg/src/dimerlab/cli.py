"""Command-line front end.

One subcommand per question you would ask of the model:

    spectrum   exact and closed-form levels at one parameter point
    sweep      levels along a range of the interspecies coupling W
    collapse   fine sweep plus location of the minimum-gap point
    state      probability grids of selected exact and closed-form states
    dynamics   a semiclassical trajectory
    compare    deviation report, optionally with the multi-N scaling fit

Numbers are printed with 15 significant digits so runs can be diffed.
Flags override config-file values; --J/--U set both species at once
(use a JSON config for fully asymmetric parameters).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import cv, exact, fock, harness, semiclassical
from .model import ModelParams, classify_regime, effective_params

_MODEL_KEYS = ("J_a", "J_b", "U_a", "U_b", "W", "N_a", "N_b")
_HARNESS_KEYS = ("sweep", "levels", "n_max", "m_max", "solver", "out", "format")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, extras = resolve_config(args)
        handler = {
            "spectrum": cmd_spectrum,
            "sweep": cmd_sweep,
            "collapse": cmd_collapse,
            "state": cmd_state,
            "dynamics": cmd_dynamics,
            "compare": cmd_compare,
        }[args.command]
        return handler(cfg, extras)
    except (ValueError, exact.EigensolverError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--W", type=float, help="interspecies coupling W/J")
    common.add_argument("--U", type=float, help="intraspecies interaction U/J (both species)")
    common.add_argument("--J", type=float, help="hopping amplitude (both species, energy unit)")
    common.add_argument("--Na", type=int, help="bosons of species a")
    common.add_argument("--Nb", type=int, help="bosons of species b")
    common.add_argument("--levels", type=int, metavar="K", help="number of levels (default 7)")
    common.add_argument("--sweep", metavar="START:STOP:COUNT", help="W sweep range")
    common.add_argument("--out", metavar="DIR", help="output directory (default .)")
    common.add_argument("--format", choices=("csv", "json"), dest="fmt", help="output format")
    common.add_argument("--solver", choices=("dense", "lanczos", "auto"), help="eigensolver")

    parser = argparse.ArgumentParser(prog="dimerlab", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("spectrum", parents=[common], help="levels at one parameter point")
    sub.add_parser("sweep", parents=[common], help="levels along a W range")
    sub.add_parser("collapse", parents=[common], help="fine sweep + minimum-gap locator")

    state = sub.add_parser("state", parents=[common], help="probability grids")
    state.add_argument("--states", default="0", metavar="I,J,...",
                       help="exact level indices to export (default 0)")
    state.add_argument("--nm", action="append", default=None, metavar="N,M[,R]",
                       help="closed-form state to export (repeatable; R=+-1 parity)")

    dyn = sub.add_parser("dynamics", parents=[common], help="semiclassical trajectory")
    dyn.add_argument("--x0", type=float, default=0.1)
    dyn.add_argument("--y0", type=float, default=0.0)
    dyn.add_argument("--theta-x0", type=float, default=0.0)
    dyn.add_argument("--theta-y0", type=float, default=0.0)
    dyn.add_argument("--t-end", type=float, default=50.0)
    dyn.add_argument("--dt", type=float, default=1e-3)
    dyn.add_argument("--sample-every", type=int, default=10)

    comp = sub.add_parser("compare", parents=[common], help="exact-vs-analytic deviation report")
    comp.add_argument("--scaling", metavar="N1,N2,...",
                      help="total boson numbers for the deviation-scaling fit")
    return parser


def resolve_config(args) -> tuple[harness.RunConfig, argparse.Namespace]:
    """defaults < config file < flags."""
    file_cfg = {}
    if args.config:
        with open(args.config) as fh:
            file_cfg = json.load(fh)
        unknown = set(file_cfg) - set(_MODEL_KEYS) - set(_HARNESS_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")

    model_cfg = {k: v for k, v in file_cfg.items() if k in _MODEL_KEYS}
    if args.J is not None:
        model_cfg["J_a"] = args.J
        model_cfg["J_b"] = args.J
    if args.U is not None:
        model_cfg["U_a"] = args.U
        model_cfg["U_b"] = args.U
    if args.W is not None:
        model_cfg["W"] = args.W
    if args.Na is not None:
        model_cfg["N_a"] = args.Na
    if args.Nb is not None:
        model_cfg["N_b"] = args.Nb
    params = ModelParams.from_dict(model_cfg)

    sweep = None
    sweep_cfg = file_cfg.get("sweep")
    if args.sweep is not None:
        sweep = _parse_sweep(args.sweep)
    elif sweep_cfg is not None:
        sweep = harness.SweepSpec(
            param=sweep_cfg.get("param", "W"),
            start=float(sweep_cfg["start"]),
            stop=float(sweep_cfg["stop"]),
            count=int(sweep_cfg["count"]),
        )

    cfg = harness.RunConfig(
        params=params,
        sweep=sweep,
        levels=args.levels if args.levels is not None else int(file_cfg.get("levels", 7)),
        n_max=int(file_cfg.get("n_max", 24)),
        m_max=int(file_cfg.get("m_max", 24)),
        out=args.out if args.out is not None else file_cfg.get("out", "."),
        solver=args.solver if args.solver is not None else file_cfg.get("solver", "auto"),
        fmt=args.fmt if args.fmt is not None else file_cfg.get("format", "csv"),
    )
    return cfg, args


def _parse_sweep(text: str) -> harness.SweepSpec:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"bad sweep spec {text!r}, expected START:STOP:COUNT")
    return harness.SweepSpec(param="W", start=float(parts[0]), stop=float(parts[1]),
                             count=int(parts[2]))


def _outdir(cfg: harness.RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _write_records(records, cfg) -> str:
    out = _outdir(cfg)
    if cfg.fmt == "json":
        path = os.path.join(out, "levels.json")
        payload = []
        for r in records:
            payload.append({
                "W": r.W,
                "exact_rel": None if r.exact_rel is None else [float(v) for v in r.exact_rel],
                "cv_rel": None if r.cv_rel is None else [float(v) for v in r.cv_rel],
                "min_gap": r.min_gap,
                "regime": str(r.regime),
                "error": r.error,
            })
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    else:
        path = os.path.join(out, "levels.csv")
        with open(path, "w") as fh:
            harness.write_levels_csv(records, fh)
    return path


def cmd_spectrum(cfg: harness.RunConfig, args) -> int:
    rec = harness.run_point(cfg.params, cfg.levels, cfg.n_max, cfg.m_max, cfg.solver)
    print(f"# W = {cfg.params.W:.15g}  regime = {rec.regime}")
    print("index exact_rel cv_rel")
    for i, (ex, ap) in enumerate(zip(rec.exact_rel, rec.cv_rel)):
        print(f"{i} {ex:.15g} {ap:.15g}")
    path = _write_records([rec], cfg)
    print(f"# wrote {path}")
    return 0


def cmd_sweep(cfg: harness.RunConfig, args) -> int:
    records = harness.sweep_coupling(cfg)
    path = _write_records(records, cfg)
    failures = sum(1 for r in records if r.error is not None)
    print(f"# swept {len(records)} points ({failures} failed), wrote {path}")
    return 0


def cmd_collapse(cfg: harness.RunConfig, args) -> int:
    records = harness.sweep_coupling(cfg)
    estimate = harness.locate_collapse(records)
    out = _outdir(cfg)
    path = os.path.join(out, "collapse.json")
    with open(path, "w") as fh:
        harness.write_collapse_json(estimate, fh)
    _write_records(records, cfg)
    flag = " (at sweep boundary)" if estimate.at_boundary else ""
    print(f"W_estimate = {estimate.W:.15g}{flag}, min_gap = {estimate.gap:.15g}")
    print(f"# wrote {path}")
    return 0


def cmd_state(cfg: harness.RunConfig, args) -> int:
    params = cfg.params
    basis = fock.build_basis(params.N_a, params.N_b)
    H = fock.build_hamiltonian(params, basis)
    indices = [int(s) for s in args.states.split(",") if s]
    k = max(max(indices) + 1, cfg.levels)
    spectrum = exact.lowest_eigenpairs(H, k, method=cfg.solver)
    e = effective_params(params)
    regime = classify_regime(e)
    out = _outdir(cfg)
    sidecar = {
        "J_a": params.J_a, "J_b": params.J_b, "U_a": params.U_a, "U_b": params.U_b,
        "W": params.W, "N_a": params.N_a, "N_b": params.N_b, "regime": str(regime),
    }
    written = []
    for i in indices:
        grid = exact.amplitude_grid(spectrum, i, basis)
        path = os.path.join(out, f"grid_exact_{i}.csv")
        exact.grid_to_csv(grid, path, sidecar | {"state": f"exact level {i}"})
        written.append(path)
    for spec_text in args.nm or []:
        fields = [s.strip() for s in spec_text.split(",")]
        n, m = int(fields[0]), int(fields[1])
        parity = int(fields[2]) if len(fields) > 2 else (+1 if regime.is_strong else None)
        state = cv.cv_eigenstate(e, n, m, parity=parity)
        grid = cv.eigenfunction_density(e, state, basis)
        tag = f"cv_n{n}_m{m}" + (f"_r{'p' if parity == 1 else 'm'}" if parity else "")
        path = os.path.join(out, f"grid_{tag}.csv")
        exact.grid_to_csv(grid, path, sidecar | {"state": tag})
        written.append(path)
    for path in written:
        print(f"# wrote {path}")
    return 0


def cmd_dynamics(cfg: harness.RunConfig, args) -> int:
    e = effective_params(cfg.params)
    start = semiclassical.PhasePoint(x=args.x0, y=args.y0,
                                     theta_x=args.theta_x0, theta_y=args.theta_y0)
    traj = semiclassical.integrate(e, start, t_end=args.t_end, dt=args.dt,
                                   sample_every=args.sample_every)
    out = _outdir(cfg)
    path = os.path.join(out, "trajectory.csv")
    with open(path, "w") as fh:
        semiclassical.trajectory_to_csv(traj, fh)
    note = " (hit the |x|=1 boundary)" if traj.boundary_hit else ""
    print(f"# {len(traj)} samples, max relative energy drift {traj.max_rel_drift:.3e}{note}")
    print(f"# wrote {path}")
    return 0


def cmd_compare(cfg: harness.RunConfig, args) -> int:
    rec = harness.run_point(cfg.params, cfg.levels, cfg.n_max, cfg.m_max, cfg.solver)
    report = harness.compare_spectra(rec.exact_rel, rec.cv_rel, cfg.levels)

    # ground-state density overlap at this point
    params = cfg.params
    basis = fock.build_basis(params.N_a, params.N_b)
    H = fock.build_hamiltonian(params, basis)
    spectrum = exact.lowest_eigenpairs(H, max(2, cfg.levels), method=cfg.solver)
    e = effective_params(params)
    regime = classify_regime(e)
    if not regime.is_critical:
        parity = +1 if regime.is_strong else None
        state = cv.cv_eigenstate(e, 0, 0, parity=parity)
        cv_grid = cv.eigenfunction_density(e, state, basis)
        exact_grid = exact.amplitude_grid(spectrum, 0, basis)
        report.overlaps = [harness.density_overlap(exact_grid, cv_grid)]

    extra = {"W": params.W, "regime": str(regime)}
    if args.scaling:
        totals = [int(s) for s in args.scaling.split(",") if s]
        devs = []
        for n_total in totals:
            p_n = ModelParams.twin(n_total, J=params.J_a, U=params.U_a, W=params.W)
            rec_n = harness.run_point(p_n, cfg.levels, cfg.n_max, cfg.m_max, cfg.solver)
            devs.append(float(np.mean(np.abs(rec_n.cv_rel[1:] - rec_n.exact_rel[1:]))))
        report.fit_exponent = harness.fit_deviation_exponent(totals, devs)
        extra["scaling_N"] = totals
        extra["scaling_dev"] = devs

    out = _outdir(cfg)
    path = os.path.join(out, "report.json")
    with open(path, "w") as fh:
        harness.write_report_json(report, fh, extra=extra)
    print(f"max |dev| = {report.max_abs:.15g}, mean |dev| = {report.mean_abs:.15g}")
    if report.overlaps:
        print(f"ground-state overlap = {report.overlaps[0]:.15g}")
    if report.fit_exponent is not None:
        print(f"deviation scaling exponent = {report.fit_exponent:.15g}")
    print(f"# wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
