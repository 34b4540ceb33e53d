"""Command-line front end.

Subcommands: spectrum, stability, stability-map, dde, verify.  All
numeric output is deterministic CSV with the resolved run manifest
embedded in the header; --plot additionally renders matplotlib figures
next to each CSV.

Exit codes: 0 ok, 2 validation failure, 3 degenerate evaluation
(every grid point singular), 4 I/O failure.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import dde, output, spectrum, stability
from .model import GENERIC, ModelParams, ModelError, validate
from .scenario import (GridSpec, MapSpec, RunManifest, Scenario,
                       ScenarioError, load_preset, load_scenario)
from .spectrum import EmptyGrid, SpectrumTable

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DEGENERATE = 3
EXIT_IO = 4


def worker_count() -> int:
    """Parallelism cap from DPO_SIM_THREADS (results are deterministic
    regardless; grid assembly preserves order)."""
    raw = os.environ.get("DPO_SIM_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="FILE", help="scenario file to start from")
    p.add_argument("--preset", metavar="NAME",
                   help="named figure preset (fig3, fig4, fig5-g05, fig5-g3, "
                        "fig5-g9, fig2a-map, fig2b-map)")
    p.add_argument("--gamma1", type=float)
    p.add_argument("--gamma2", type=float)
    p.add_argument("--gamma3", type=float)
    p.add_argument("--gamma-f", dest="gamma_f", type=float)
    p.add_argument("--phi", type=float)
    p.add_argument("--epsilon-abs", dest="eps_abs", type=float)
    p.add_argument("--beta", dest="eps_phase", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--tau", type=float, help="raw delay, ns")
    p.add_argument("--scale-S", dest="scale_S", type=float,
                   help="delay scaling parameter (tau = (S + 1e-6*delta)*pi ns)")
    p.add_argument("--delta", type=int, choices=(0, 1))
    p.add_argument("--theta", type=float)
    p.add_argument("--theta-opt", action="store_true",
                   help="minimise P over theta per frequency")
    p.add_argument("--eta", type=float,
                   help="threshold proximity for pump-at-threshold scenarios")


_MODEL_FLAG_KEYS = ("gamma1", "gamma2", "gamma3", "gamma_f", "phi", "eps_abs",
                    "eps_phase", "omega0", "tau", "scale_S", "delta", "theta")


def _resolve_scenario(args) -> Scenario:
    """Preset or config file as the base, CLI flags override."""
    if args.preset and args.config:
        raise ScenarioError("--preset and --config are mutually exclusive")
    if args.preset:
        scn = load_preset(args.preset)
    elif args.config:
        scn = load_scenario(args.config)
    else:
        scn = Scenario(model={})
    model = dict(scn.model)
    for key in _MODEL_FLAG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            model[key] = val
            if key == "eps_abs":
                model.pop("eps_at_threshold", None)
                model.pop("eps_above_threshold", None)
            if key == "tau":
                model.pop("scale_S", None)
                model.pop("delta", None)
    if getattr(args, "theta_opt", False):
        model["theta_opt"] = True
    eta = args.eta if getattr(args, "eta", None) is not None else scn.eta
    grid = scn.grid or GridSpec()
    if getattr(args, "omega_min", None) is not None:
        grid = GridSpec(args.omega_min, grid.omega_max, grid.omega_points)
    if getattr(args, "omega_max", None) is not None:
        grid = GridSpec(grid.omega_min, args.omega_max, grid.omega_points)
    if getattr(args, "omega_points", None) is not None:
        grid = GridSpec(grid.omega_min, grid.omega_max, args.omega_points)
    return Scenario(model=model, grid=grid, map_grid=scn.map_grid, eta=eta,
                    compare_markovian=(scn.compare_markovian
                                       or getattr(args, "compare_markovian", False)),
                    both_delta=scn.both_delta)


def _grid_values(model, grid: GridSpec) -> list[float]:
    if grid.omega_min is None or grid.omega_max is None:
        return spectrum.default_grid(model, grid.omega_points)
    if grid.omega_points < 1 or grid.omega_max <= grid.omega_min:
        raise EmptyGrid("bad omega grid specification")
    return list(np.linspace(grid.omega_min, grid.omega_max, grid.omega_points))


def cmd_spectrum(args) -> int:
    scn = _resolve_scenario(args)
    base = Path(args.output or "spectrum.csv")
    variants: list[tuple[str, dict]] = []
    model_dict = scn.resolve_pump()
    if scn.both_delta and "delta" in model_dict:
        for d, tag in ((0, "destructive"), (1, "constructive")):
            variants.append((tag, {**model_dict, "delta": d}))
    else:
        variants.append(("", model_dict))

    theta_mode = "optimal" if model_dict.get("theta_opt") else "fixed"
    written = []
    all_singular = True
    for tag, mdict in variants:
        model = validate(ModelParams.from_dict(mdict))
        grid = _grid_values(model, scn.grid or GridSpec())
        table = spectrum.spectrum_table(model, grid, theta_mode)
        path = base if not tag else base.with_name(f"{base.stem}_{tag}{base.suffix}")
        manifest = RunManifest(subcommand="spectrum", model=mdict,
                               grid=(scn.grid or GridSpec()).to_dict(),
                               eta=scn.eta, theta_mode=theta_mode,
                               compare_markovian=scn.compare_markovian,
                               plot=args.plot, outputs=(str(path),))
        output.write_spectrum_csv(table, manifest, path)
        written.append((tag or "spectrum", path, table))
        if any(r.status == "ok" for r in table.rows):
            all_singular = False

    if scn.compare_markovian:
        ref_model = validate(ModelParams.from_dict({**model_dict, "gamma_f": 0.0}))
        grid = _grid_values(ref_model, scn.grid or GridSpec())
        table = spectrum.spectrum_table(ref_model, grid, theta_mode)
        path = base.with_name(f"{base.stem}_markovian{base.suffix}")
        manifest = RunManifest(subcommand="spectrum",
                               model={**model_dict, "gamma_f": 0.0},
                               grid=(scn.grid or GridSpec()).to_dict(),
                               eta=scn.eta, theta_mode=theta_mode,
                               plot=args.plot, outputs=(str(path),))
        output.write_spectrum_csv(table, manifest, path)
        written.append(("markovian", path, table))

    if all_singular:
        print("error: every grid point was singular (at/beyond threshold)",
              file=sys.stderr)
        return EXIT_DEGENERATE
    if args.plot:
        from . import plots
        tables = {tag: t for tag, _, t in written}
        plots.save_spectrum_plot(tables, base.with_suffix(".png"))
        print(f"wrote {base.with_suffix('.png')}")
    for _, path, _t in written:
        print(f"wrote {path}")
    return EXIT_OK


def cmd_stability(args) -> int:
    scn = _resolve_scenario(args)
    model = validate(scn.model_params())
    try:
        verdict = stability.classify_stability(model, with_oracle=args.with_oracle)
    except stability.GenericPhase as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    label = "marginal" if verdict.marginal else \
        ("stable" if verdict.stable else "unstable")
    print(f"interference class : {verdict.interference}")
    print(f"verdict            : {label} ({verdict.method})")
    print(f"S1W                : {verdict.s1w:.12g} ns^-1")
    print(f"S2W                : {verdict.s2w:.12g} ns^-1")
    if verdict.delay_independent is not None:
        print(f"delay-independent  : {verdict.delay_independent}")
    if verdict.dominant_root is not None:
        print(f"dominant root      : {verdict.dominant_root:.12g}")
    bits = [f"stable={int(verdict.stable)}", f"marginal={int(verdict.marginal)}",
            f"S1W={verdict.s1w:.12g}", f"S2W={verdict.s2w:.12g}",
            f"interference={verdict.interference}",
            f"delay_independent={verdict.delay_independent}",
            f"method={verdict.method}"]
    if verdict.dominant_root is not None:
        bits.append(f"dominant_root={verdict.dominant_root:.12g}")
    print("RESULT " + " ".join(bits))
    return EXIT_OK


def cmd_stability_map(args) -> int:
    scn = _resolve_scenario(args)
    ms = scn.map_grid or MapSpec()
    if args.interference:
        ms = MapSpec(**{**ms.to_dict(), "interference": args.interference})
    for key in ("g1tau_min", "g1tau_max", "g1tau_points",
                "alpha_min", "alpha_max", "alpha_points"):
        val = getattr(args, key, None)
        if val is not None:
            ms = MapSpec(**{**ms.to_dict(), key: val})
    xs = np.geomspace(ms.g1tau_min, ms.g1tau_max, ms.g1tau_points)
    als = np.linspace(ms.alpha_min, ms.alpha_max, ms.alpha_points)
    smap = stability.stability_map(xs, als, ms.interference)
    base = Path(args.output or "stability_map.csv")
    manifest = RunManifest(subcommand="stability-map", model={},
                           map_grid=ms.to_dict(), plot=args.plot,
                           outputs=(str(base),))
    output.write_map_csv(smap, manifest, base)
    bpath = base.with_name(f"{base.stem}_boundary{base.suffix}")
    output.write_boundary_csv(smap, manifest, bpath)
    if args.plot:
        from . import plots
        plots.save_map_plot(smap, base.with_suffix(".png"))
        print(f"wrote {base.with_suffix('.png')}")
    print(f"wrote {base}")
    print(f"wrote {bpath}")
    return EXIT_OK


def cmd_dde(args) -> int:
    scn = _resolve_scenario(args)
    model = validate(scn.model_params())
    v0 = complex(args.v0_re, args.v0_im)
    t_end = args.t_end
    if t_end is None:
        t_end = max(10.0 * model.tau, 10.0 / max(model.G, 1e-12))
    trace = dde.integrate(model, (v0, v0.conjugate()), t_end, args.dt)
    cls = dde.classify(trace)
    base = Path(args.output or "dde_trace.csv")
    manifest = RunManifest(subcommand="dde", model=scn.resolve_pump(),
                           plot=args.plot,
                           dde={"v0_re": args.v0_re, "v0_im": args.v0_im,
                                "t_end": t_end, "dt": trace.dt},
                           outputs=(str(base),))
    output.write_trace_csv(trace, manifest, base)
    if args.plot:
        from . import plots
        plots.save_trace_plot(trace, base.with_suffix(".png"))
        print(f"wrote {base.with_suffix('.png')}")
    print(f"wrote {base}")
    print(f"RESULT classification={cls.label} rate={cls.rate:.12g}")
    return EXIT_OK


def cmd_verify(_args) -> int:
    from . import verify
    results = verify.run_all()
    width = max(len(r.name) for r in results)
    failures = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {mark}  {r.detail}")
        failures += 0 if r.passed else 1
    print(f"{failures} failure(s) out of {len(results)} checks")
    return EXIT_OK if failures == 0 else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dpofb",
        description="Squeezing spectra and stability of a parametric "
                    "cavity under time-delayed coherent feedback.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="squeezing spectra over a detuning grid")
    _add_model_flags(p)
    p.add_argument("--omega-min", type=float)
    p.add_argument("--omega-max", type=float)
    p.add_argument("--omega-points", type=int)
    p.add_argument("--compare-markovian", action="store_true",
                   help="also emit the gamma_f = 0 no-feedback reference")
    p.add_argument("--output", metavar="FILE")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("stability", help="stability verdict for one scenario")
    _add_model_flags(p)
    p.add_argument("--with-oracle", action="store_true",
                   help="also run the numeric characteristic-root search "
                        "(works for any interference phase)")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("stability-map",
                       help="dimensionless stability chart and boundary")
    _add_model_flags(p)
    p.add_argument("--interference", choices=("constructive", "destructive"))
    p.add_argument("--g1tau-min", type=float)
    p.add_argument("--g1tau-max", type=float)
    p.add_argument("--g1tau-points", type=int)
    p.add_argument("--alpha-min", type=float)
    p.add_argument("--alpha-max", type=float)
    p.add_argument("--alpha-points", type=int)
    p.add_argument("--output", metavar="FILE")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_stability_map)

    p = sub.add_parser("dde", help="first-moment time-domain integration")
    _add_model_flags(p)
    p.add_argument("--v0-re", type=float, default=1.0)
    p.add_argument("--v0-im", type=float, default=0.0)
    p.add_argument("--t-end", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--output", metavar="FILE")
    p.add_argument("--plot", action="store_true")
    p.set_defaults(func=cmd_dde)

    p = sub.add_parser("verify", help="run the cross-oracle self checks")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ModelError, ScenarioError, EmptyGrid, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
