"""Command line front end.

Subcommands
    analytic      tabulate the closed-form emission curves as CSV
    simulate      sample pair emissions, write records CSV + summary JSON
    fit           exponential MLE on a sample file, JSON result
    discriminate  entangled-vs-product likelihood comparison, JSON result
    kinetics      fixed-step integration of the rate equations, CSV
    wavefunction  exchange-symmetry checks on a two-particle amplitude

Every file-writing invocation also writes ``<out>.manifest.json``
recording the exact argv, parameters, and outputs; re-running the
stored argv reproduces every output byte for byte.

Exit codes: 0 success, 2 invalid parameters, 3 invalid data,
4 model inapplicable.

A ``--config`` file supplies defaults as ``key = value`` lines (long
flag names, ``-`` or ``_`` spelling); explicit flags win over the file.
"""
from __future__ import annotations

import argparse
import ast
import json
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__, analytic, estimation, kinetics, montecarlo, wavefunction
from .analytic import RatePair, WindowConfig
from .errors import FirstPhotonError, InvalidParameterError, exit_code_for
from .series import read_columns, write_table

WAVEFUNCTION_CHECKS = ("antisymmetry-preservation", "n0f-antisymmetric",
                       "n0f-symmetric-input")

CONFIG_KEYS = frozenset({
    "gamma_a", "gamma_b", "tau", "mode", "window_variant", "seed", "n_pairs",
    "workers", "kind", "out", "samples", "postselect", "t_max", "n_points",
    "step", "t_end", "n_0", "rate_scale", "check", "n", "x_max", "t",
})


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written next to every output file."""

    subcommand: str
    argv: list[str]
    parameters: dict
    outputs: list[str]
    version: str


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="firstphoton",
        description="Kinetics of first-photon emission from two-atom pairs")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="command")

    def common(p, *, window=True, seed=False):
        p.add_argument("--config", metavar="FILE",
                       help="read key = value defaults from FILE")
        p.add_argument("--gamma-a", type=float, default=1.0,
                       help="channel-A emission rate (default 1.0)")
        p.add_argument("--gamma-b", type=float, default=1.5,
                       help="channel-B emission rate (default 1.5)")
        if window:
            p.add_argument("--tau", type=float, default=5.0 / 6.0,
                           help="coincidence window width (default 5/6)")
            p.add_argument("--mode", choices=analytic.WINDOW_MODES,
                           default=analytic.MODE_GRID_BIN,
                           help="post-selection rule (default grid-bin)")
        if seed:
            p.add_argument("--seed", type=int, default=0,
                           help="base RNG seed (default 0)")
            p.add_argument("--n-pairs", type=int, default=100000,
                           help="number of pairs to sample (default 100000)")

    p = sub.add_parser("analytic", help="tabulate closed-form emission curves")
    common(p)
    p.add_argument("--window-variant", choices=analytic.WINDOW_VARIANTS,
                   default=analytic.VARIANT_TAYLOR,
                   help="window law used for the product curve")
    p.add_argument("--t-max", type=float, default=4.0)
    p.add_argument("--n-points", type=int, default=201)
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(handler=cmd_analytic)

    p = sub.add_parser("simulate", help="Monte Carlo emission records")
    common(p, seed=True)
    p.add_argument("--kind", choices=montecarlo.PAIR_KINDS,
                   default=montecarlo.KIND_ENTANGLED,
                   help="initial pair state (default entangled)")
    p.add_argument("--workers", type=int, default=1,
                   help="worker threads; output is identical for any count")
    p.add_argument("--out", required=True, help="records CSV path")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("fit", help="exponential MLE on first-photon times")
    common(p)
    p.add_argument("--samples", required=True, metavar="CSV",
                   help="file with a t_first column (t_second too if --postselect)")
    p.add_argument("--postselect", action="store_true",
                   help="apply window post-selection before fitting")
    p.add_argument("--out", help="write the JSON result here as well")
    p.set_defaults(handler=cmd_fit)

    p = sub.add_parser("discriminate",
                       help="entangled vs product likelihood comparison")
    common(p)
    p.add_argument("--samples", required=True, metavar="CSV")
    p.add_argument("--postselect", action="store_true",
                   help="post-select records and use the one-photon "
                        "window-time ensemble instead of raw t_first")
    p.add_argument("--out", help="write the JSON result here as well")
    p.set_defaults(handler=cmd_discriminate)

    p = sub.add_parser("kinetics", help="integrate the rate equations")
    common(p, window=False)
    p.add_argument("--step", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, default=4.0)
    p.add_argument("--n-0", type=float, default=1.0, dest="n_0")
    p.add_argument("--rate-scale", type=float, default=1.0,
                   help="scale factor on all first-emission rates")
    p.add_argument("--out", required=True, help="output CSV path")
    p.set_defaults(handler=cmd_kinetics)

    p = sub.add_parser("wavefunction", help="exchange-symmetry checks")
    p.add_argument("--config", metavar="FILE")
    p.add_argument("--check", choices=WAVEFUNCTION_CHECKS, required=True)
    p.add_argument("--n", type=int, default=256, help="grid points per axis")
    p.add_argument("--x-max", type=float, default=12.0,
                   help="half width of the box (default 12)")
    p.add_argument("--t", type=float, default=1.0,
                   help="free-propagation time (default 1.0)")
    p.add_argument("--out", help="write the JSON report here as well")
    p.set_defaults(handler=cmd_wavefunction)

    # subparsers resolve defaults in their own namespace, so config-file
    # defaults must be pushed into each of them, not just the top level
    parser.command_parsers = dict(sub.choices)
    return parser


def load_config(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InvalidParameterError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(
                f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in CONFIG_KEYS:
            raise InvalidParameterError(f"{path}:{lineno}: unknown config key {key!r}")
        value = value.strip()
        try:
            values[key] = ast.literal_eval(value)
        except (ValueError, SyntaxError):
            values[key] = value
    return values


def _rates(args) -> RatePair:
    return RatePair(gamma_a=args.gamma_a, gamma_b=args.gamma_b)


def _window(args) -> WindowConfig:
    return WindowConfig(tau=args.tau, mode=args.mode)


def _manifest_parameters(args) -> dict:
    params = {}
    for key, value in vars(args).items():
        if key in ("handler", "config"):
            continue
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        params[key] = value
    return params


def _write_manifest(args, argv, outputs: list[str]) -> None:
    manifest = RunManifest(subcommand=args.subcommand,
                           argv=list(argv),
                           parameters=_manifest_parameters(args),
                           outputs=[str(p) for p in outputs],
                           version=__version__)
    path = f"{outputs[0]}.manifest.json"
    with open(path, "w") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _emit_json(payload: dict, args, argv) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _write_manifest(args, argv, [args.out])


def cmd_analytic(args, argv) -> int:
    rates = _rates(args)
    window = _window(args)
    model = analytic.normalization_alpha(rates, window)
    if args.n_points < 2:
        raise InvalidParameterError("need at least 2 grid points")
    if args.t_max <= 0.0:
        raise InvalidParameterError("t-max must be positive")
    t = np.linspace(0.0, args.t_max, args.n_points)
    columns = [
        t,
        analytic.first_emission_cdf_entangled(t, rates),
        analytic.product_first_cdf(t, model, variant=args.window_variant),
        analytic.single_type_cdf(t, rates.gamma_a),
        analytic.single_type_cdf(t, rates.gamma_b),
    ]
    write_table(args.out, ["t", "nf_entangled", "nf_product", "n_a", "n_b"], columns)
    _write_manifest(args, argv, [args.out])
    return 0


def cmd_simulate(args, argv) -> int:
    rates = _rates(args)
    window = _window(args)
    config = montecarlo.SimConfig(n_pairs=args.n_pairs, rates=rates,
                                  kind=args.kind, window=window, seed=args.seed)
    records = montecarlo.simulate(config, n_workers=args.workers)
    write_table(args.out, list(montecarlo.RECORD_COLUMNS),
                [records[name] for name in montecarlo.RECORD_COLUMNS])

    kept, summary = montecarlo.postselect(records, window)
    fractions = montecarlo.channel_fractions(records)
    payload = {
        "kind": args.kind,
        "n_pairs": int(args.n_pairs),
        "seed": int(args.seed),
        "gamma_a": rates.gamma_a,
        "gamma_b": rates.gamma_b,
        "tau": window.tau,
        "mode": window.mode,
        "kept": summary.kept,
        "discarded": summary.discarded,
        "empirical_coincidence_rate": summary.empirical_coincidence_rate,
        "predicted_coincidence_rate": (
            analytic.coincidence_probability(rates, window)
            if args.kind == montecarlo.KIND_PRODUCT else None),
        "channel_fraction_first_a": fractions[analytic.CHANNEL_A],
        "channel_fraction_first_b": fractions[analytic.CHANNEL_B],
    }
    summary_path = f"{args.out}.summary.json"
    with open(summary_path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(args, argv, [args.out, summary_path])
    return 0


def _load_times(args) -> np.ndarray:
    if args.postselect:
        records = montecarlo.read_records_csv(args.samples)
        kept, _ = montecarlo.postselect(records, _window(args))
        return montecarlo.one_photon_window_times(kept)
    return read_columns(args.samples, ["t_first"])["t_first"]


def cmd_fit(args, argv) -> int:
    times = _load_times(args)
    result = estimation.mle_exponential(times)
    _emit_json(asdict(result), args, argv)
    return 0


def cmd_discriminate(args, argv) -> int:
    times = _load_times(args)
    comparison = estimation.discriminate(times, _rates(args), _window(args))
    _emit_json(asdict(comparison), args, argv)
    return 0


def cmd_kinetics(args, argv) -> int:
    rates = _rates(args)
    config = kinetics.IntegratorConfig(step=args.step, t_end=args.t_end, n_0=args.n_0)
    states = kinetics.integrate(kinetics.initial_state(args.n_0), rates, config,
                                first_emission_scale=args.rate_scale)
    header = ["t", *kinetics.STATE_FIELDS]
    columns = [np.array([s.t for s in states])]
    for name in kinetics.STATE_FIELDS:
        columns.append(np.array([getattr(s, name) for s in states]))
    write_table(args.out, header, columns)
    _write_manifest(args, argv, [args.out])
    return 0


def _wavefunction_report(args) -> dict:
    grid = wavefunction.Grid1D(x_min=-args.x_max, x_max=args.x_max, n=args.n)
    mode0 = wavefunction.oscillator_mode(grid, 0)
    mode1 = wavefunction.oscillator_mode(grid, 1)
    report = {"check": args.check, "n": int(args.n), "x_max": float(args.x_max),
              "t": float(args.t), "passed": False, "error": None, "metrics": {}}

    if args.check == "n0f-symmetric-input":
        sym = wavefunction.TwoParticleAmplitude.from_factors(grid, mode0, mode0)
        try:
            wavefunction.antisymmetrize(sym)
        except wavefunction.DegenerateSymmetryError as exc:
            report["error"] = str(exc)
            report["metrics"]["swap_overlap_real"] = float(
                wavefunction.swap_overlap(sym).real)
        else:
            report["error"] = ("antisymmetrization of an exchange-symmetric "
                               "state unexpectedly succeeded")
        return report

    product = wavefunction.TwoParticleAmplitude.from_factors(grid, mode0, mode1)
    fermionic = wavefunction.antisymmetrize(product)

    if args.check == "n0f-antisymmetric":
        coeff = wavefunction.antisymmetrization_coefficient(fermionic)
        report["metrics"]["n0f"] = coeff
        report["metrics"]["n0f_product"] = (
            wavefunction.antisymmetrization_coefficient(product))
        report["passed"] = abs(coeff - 0.5) < 1e-10
        return report

    # antisymmetry preservation under free propagation
    evolved = wavefunction.free_propagate(fermionic, args.t)
    defects = wavefunction.symmetry_defects(evolved)
    norm = wavefunction.quadrature_norm(evolved)
    report["metrics"]["antisymmetric_defect"] = defects.antisymmetric
    report["metrics"]["norm_drift"] = abs(norm - 1.0)
    report["passed"] = (defects.antisymmetric < 1e-10
                        and abs(norm - 1.0) < 1e-12)
    return report


def cmd_wavefunction(args, argv) -> int:
    report = _wavefunction_report(args)
    _emit_json(report, args, argv)
    return 0


def _extract_config_path(argv) -> str | None:
    mini = argparse.ArgumentParser(add_help=False)
    mini.add_argument("--config", default=None)
    known, _ = mini.parse_known_args(argv)
    return known.config


def main(argv=None) -> int:
    argv = list(sys.argv[1:]) if argv is None else [str(a) for a in argv]
    try:
        parser = build_parser()
        config_path = _extract_config_path(argv)
        if config_path:
            defaults = load_config(config_path)
            parser.set_defaults(**defaults)
            for command_parser in parser.command_parsers.values():
                command_parser.set_defaults(**defaults)
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        return args.handler(args, argv)
    except FirstPhotonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
