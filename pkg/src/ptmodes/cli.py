"""Command-line front end.

Subcommands:
  evolve  time series of coefficients and witnesses for one parameter point
  sweep   2-D (kappa/eps, gamma/eps) grid of one quantity -> CSV/JSON file
  sink    sink-reservoir diagnostics (nu_pm, Lambda) at one parameter point
  verify  run the oracle agreement suites

All inputs are dimensionless (kappa/eps, gamma/eps, eps*t); epsilon = 1
internally.  Exit codes: 0 success, 1 verification failure, 2 invalid input,
3 regime error (a model was requested outside its domain of validity).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import backend
from ._version import __version__
from .coeffs import CoefficientModel, closed_form_coefficient_arrays
from .core import EPDegenerateError, ModelParams, derive_scales
from .dynamics import sink_diagnostics
from .oracle import OracleConfig, run_verification
from .sweep import (
    GridSpec,
    SweepConfig,
    SweepQuantity,
    TimeSpec,
    TimeSpecKind,
    _flag_tokens,
    parse_config_file,
    render_csv,
    render_json,
    run_sweep,
    write_atomic,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_INVALID = 2
EXIT_REGIME = 3

EVOLVE_HEADER = "eps_t,B1,B2,ReC1,ImC1,ReD,ImD,ReDbar,ImDbar,tau,tau1,tau2,EN,flags"


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def _emit(text: str, out: str | None) -> None:
    if out:
        write_atomic(text, out)
    else:
        sys.stdout.write(text)


def _model(name: str) -> CoefficientModel:
    try:
        return CoefficientModel(name)
    except ValueError:
        raise ValueError(f"unknown model {name!r}; choose full|sink|semiclassical|asymptotic")


def cmd_evolve(args) -> int:
    if args.steps < 2:
        raise ValueError("--steps must be >= 2")
    if args.t_max < 0:
        raise ValueError("--t-max must be >= 0")
    model = _model(args.model)
    params = ModelParams(1.0, args.kappa, args.gamma)
    if model in (CoefficientModel.SINK_PERIODIC, CoefficientModel.ASYMPTOTIC):
        regime = derive_scales(params).regime.value
        if regime != "oscillatory":
            raise EPDegenerateError(f"model {model.value!r} requires the oscillatory regime, got {regime}")
    ts = np.linspace(0.0, args.t_max, args.steps)
    arrs = closed_form_coefficient_arrays(model, args.kappa, args.gamma, ts)
    tau, tau1, tau2, EN, _, fl = backend.witness_batch(
        arrs["B1"], arrs["B2"], arrs["C1"], arrs["C2"], arrs["D"], arrs["Dbar"]
    )
    meta = {
        "tool": "ptmodes",
        "version": __version__,
        "model": model.value,
        "kappa_over_eps": _fmt(args.kappa),
        "gamma_over_eps": _fmt(args.gamma),
    }
    if args.format == "csv":
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append(EVOLVE_HEADER)
        for i, t in enumerate(ts):
            row = [
                t,
                arrs["B1"][i],
                arrs["B2"][i],
                arrs["C1"][i].real,
                arrs["C1"][i].imag,
                arrs["D"][i].real,
                arrs["D"][i].imag,
                arrs["Dbar"][i].real,
                arrs["Dbar"][i].imag,
                tau[i],
                tau1[i],
                tau2[i],
                EN[i],
            ]
            lines.append(",".join(_fmt(float(v)) for v in row) + "," + "|".join(_flag_tokens(int(fl[i]))))
        _emit("\n".join(lines) + "\n", args.out)
    else:
        rows = []
        for i, t in enumerate(ts):
            rows.append(
                {
                    "eps_t": float(t),
                    "B1": float(arrs["B1"][i]),
                    "B2": float(arrs["B2"][i]),
                    "ReC1": float(arrs["C1"][i].real),
                    "ImC1": float(arrs["C1"][i].imag),
                    "ReD": float(arrs["D"][i].real),
                    "ImD": float(arrs["D"][i].imag),
                    "ReDbar": float(arrs["Dbar"][i].real),
                    "ImDbar": float(arrs["Dbar"][i].imag),
                    "tau": float(tau[i]),
                    "tau1": float(tau1[i]),
                    "tau2": float(tau2[i]),
                    "EN": None if math.isnan(EN[i]) else float(EN[i]),
                    "flags": _flag_tokens(int(fl[i])),
                }
            )
        _emit(json.dumps({"metadata": meta, "rows": rows}, indent=1) + "\n", args.out)
    return EXIT_OK


def _build_sweep_config(args) -> SweepConfig:
    cfg: dict = {}
    if args.config:
        cfg.update(parse_config_file(args.config))

    def pick(key, flag_value, default=None):
        if flag_value is not None:
            return flag_value
        return cfg.get(key, default)

    time_spec_name = pick("time_spec", None, "max_over_period")
    time_frac = pick("time_frac", args.time_frac)
    time_value = pick("time_value", args.time_fixed)
    if args.time_frac is not None:
        spec = TimeSpec(TimeSpecKind.FIXED_FRACTION, float(args.time_frac))
    elif args.time_fixed is not None:
        spec = TimeSpec(TimeSpecKind.FIXED_TIME, float(args.time_fixed))
    elif time_spec_name == "fixed_fraction":
        if time_frac is None:
            raise ValueError("time_spec=fixed_fraction requires time_frac")
        spec = TimeSpec(TimeSpecKind.FIXED_FRACTION, float(time_frac))
    elif time_spec_name == "fixed_time":
        if time_value is None:
            raise ValueError("time_spec=fixed_time requires time_value")
        spec = TimeSpec(TimeSpecKind.FIXED_TIME, float(time_value))
    elif time_spec_name == "max_over_period":
        spec = TimeSpec(TimeSpecKind.MAX_OVER_PERIOD)
    else:
        spec = TimeSpec.parse(time_spec_name)

    grid_n = pick("grid_n", args.grid_n)
    kappa_n = int(pick("kappa_n", None, grid_n if grid_n is not None else 101))
    gamma_n = int(pick("gamma_n", None, grid_n if grid_n is not None else 101))
    out = pick("out", args.out)
    if not out:
        raise ValueError("sweep requires an output path (--out or config key out=)")
    return SweepConfig(
        kappa_grid=GridSpec(
            float(pick("kappa_min", args.kappa_min, 0.0)),
            float(pick("kappa_max", args.kappa_max, 1.0)),
            kappa_n,
        ),
        gamma_grid=GridSpec(
            float(pick("gamma_min", args.gamma_min, 0.0)),
            float(pick("gamma_max", args.gamma_max, 1.0)),
            gamma_n,
        ),
        model=_model(pick("model", args.model, "full")),
        quantity=SweepQuantity(pick("quantity", args.quantity, "tau")),
        time_spec=spec,
        output_path=out,
        format=pick("format", args.format, "csv"),
        seed=int(pick("seed", args.seed, 0)),
        threads=int(pick("threads", args.threads, 1)),
    )


def cmd_sweep(args) -> int:
    config = _build_sweep_config(args)
    result = run_sweep(config)
    text = render_csv(result) if config.format == "csv" else render_json(result)
    write_atomic(text, config.output_path)
    return EXIT_OK


def cmd_sink(args) -> int:
    params = ModelParams(1.0, args.kappa, args.gamma)
    diag = sink_diagnostics(params)
    regime = derive_scales(params).regime.value
    flags = ["ep_divergent"] if diag.divergent else []
    meta = {"tool": "ptmodes", "version": __version__}
    if args.format == "csv":
        lines = [f"# {k}={v}" for k, v in meta.items()]
        lines.append("kappa_over_eps,gamma_over_eps,nu_plus,nu_minus,Lambda,flags,regime")
        lines.append(
            ",".join(
                [_fmt(args.kappa), _fmt(args.gamma), _fmt(diag.nu_plus), _fmt(diag.nu_minus), _fmt(diag.Lambda)]
            )
            + ","
            + "|".join(flags)
            + ","
            + regime
        )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        payload = {
            "metadata": meta,
            "kappa_over_eps": args.kappa,
            "gamma_over_eps": args.gamma,
            "nu_plus": diag.nu_plus,
            "nu_minus": None if math.isinf(diag.nu_minus) else diag.nu_minus,
            "Lambda": None if math.isinf(diag.Lambda) else diag.Lambda,
            "flags": flags,
            "regime": regime,
        }
        _emit(json.dumps(payload, indent=1) + "\n", args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = OracleConfig(
        n_samples=args.samples,
        seed=args.seed,
        tol_scale=args.tol_scale,
        ode_steps_per_period=args.ode_steps,
    )
    report = run_verification(config)
    out = report.format() + f"\nbackend: {backend.backend_name()}\n"
    _emit(out, args.out)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ptmodes", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"ptmodes {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("evolve", help="time series at one parameter point")
    pe.add_argument("--kappa", type=float, required=True, help="kappa/eps")
    pe.add_argument("--gamma", type=float, required=True, help="gamma/eps")
    pe.add_argument("--model", default="full", choices=["full", "sink", "semiclassical", "asymptotic"])
    pe.add_argument("--t-max", type=float, required=True, help="final eps*t")
    pe.add_argument("--steps", type=int, default=200, help="number of samples (>= 2)")
    pe.add_argument("--out", default=None)
    pe.add_argument("--format", default="csv", choices=["csv", "json"])
    pe.set_defaults(func=cmd_evolve)

    ps = sub.add_parser("sweep", help="2-D parameter grid of one quantity")
    ps.add_argument("--config", default=None, help="flat key=value config file")
    ps.add_argument("--kappa-min", type=float, default=None)
    ps.add_argument("--kappa-max", type=float, default=None)
    ps.add_argument("--gamma-min", type=float, default=None)
    ps.add_argument("--gamma-max", type=float, default=None)
    ps.add_argument("--grid-n", type=int, default=None, help="points per axis")
    ps.add_argument("--model", default=None, choices=["full", "sink", "semiclassical", "asymptotic"])
    ps.add_argument("--quantity", default=None,
                    choices=[q.value for q in SweepQuantity])
    ps.add_argument("--time-frac", type=float, default=None, help="evaluate at t = f*T per cell")
    ps.add_argument("--time-fixed", type=float, default=None, help="evaluate at fixed eps*t")
    ps.add_argument("--out", default=None)
    ps.add_argument("--format", default=None, choices=["csv", "json"])
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--threads", type=int, default=None)
    ps.set_defaults(func=cmd_sweep)

    pk = sub.add_parser("sink", help="sink-reservoir diagnostics at one point")
    pk.add_argument("--kappa", type=float, required=True)
    pk.add_argument("--gamma", type=float, required=True)
    pk.add_argument("--out", default=None)
    pk.add_argument("--format", default="csv", choices=["csv", "json"])
    pk.set_defaults(func=cmd_sink)

    pv = sub.add_parser("verify", help="run the oracle agreement suites")
    pv.add_argument("--seed", type=int, default=OracleConfig.seed)
    pv.add_argument("--samples", type=int, default=OracleConfig.n_samples)
    pv.add_argument("--tol-scale", type=float, default=1.0)
    pv.add_argument("--ode-steps", type=int, default=OracleConfig.ode_steps_per_period,
                    help="RK4 steps per period (>= 1000)")
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EPDegenerateError as exc:
        print(f"regime error: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
