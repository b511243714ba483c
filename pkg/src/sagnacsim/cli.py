"""Command-line front end.

    sagnacsim <mode> --config <path> [--out <prefix>] [--no-svg]

Each run reads one JSON config, executes the workflow named by the mode,
and writes ``<prefix>.csv`` plus, unless suppressed, ``<prefix>.svg``.
Exit codes: 0 success, 1 usage or config error, 2 physics error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import MODES, RunConfig, load_config
from .errors import ConfigError, PhysicsError, SagnacsimError
from .ifo import angle_sweep, quantum_noise_spectrum
from .opo import fit_opo_params, opo_variances
from . import report


def run(config: RunConfig, out_prefix: str | None = None, write_svg: bool = True) -> list[Path]:
    """Execute a validated config and return the paths written."""
    prefix = out_prefix or config.output
    if not prefix:
        raise ConfigError("no output prefix: set 'output' in the config or pass --out")
    csv_path = Path(prefix + ".csv")
    svg_path = Path(prefix + ".svg")
    written = [csv_path]

    if config.mode == "opo-curve":
        f = config.grid.frequencies()
        v_s, v_as = opo_variances(f, config.opo)
        sq_db = -10.0 * np.log10(v_s)
        as_db = 10.0 * np.log10(v_as)
        report.write_opo_curve_csv(csv_path, f, sq_db, as_db)
        if write_svg:
            report.plot_opo_curve(svg_path, f, sq_db, as_db)

    elif config.mode == "opo-fit":
        result = fit_opo_params(config.observations, config.opo_fixed)
        report.write_fit_csv(csv_path, result)
        if write_svg:
            report.plot_fit(svg_path, result, config.opo_fixed, config.observations)

    elif config.mode == "ifo-spectrum":
        spectrum = quantum_noise_spectrum(config.ifo, config.injection, config.grid)
        report.write_spectrum_csv(csv_path, spectrum)
        if write_svg:
            report.plot_spectrum(svg_path, spectrum)

    elif config.mode == "angle-sweep":
        spectra = angle_sweep(config.ifo, config.injection, config.grid, config.angles)
        degrees = [math.degrees(a) for a in config.angles]
        report.write_angle_sweep_csv(csv_path, degrees, spectra)
        if write_svg:
            report.plot_angle_sweep(svg_path, degrees, spectra)

    elif config.mode == "loss-budget":
        report.write_loss_budget_csv(csv_path, config.losses)
        if write_svg:
            report.plot_loss_budget(svg_path, config.losses)

    else:  # pragma: no cover - parse_config rejects unknown modes
        raise ConfigError(f"unknown mode {config.mode!r}")

    if write_svg:
        written.append(svg_path)
    return written


_MODE_HELP = {
    "opo-curve": "squeezing/antisqueezing of the source versus sideband frequency",
    "opo-fit": "fit pump ratio, intracavity loss and efficiencies to measured levels",
    "ifo-spectrum": "interferometer quantum-noise spectrum with SQL reference",
    "angle-sweep": "spectra for a list of homodyne readout angles",
    "loss-budget": "compose a named optical loss chain",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sagnacsim",
        description="Quantum-noise budgets for squeezed-light interferometry.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="mode", metavar="mode")
    for mode in MODES:
        mode_parser = sub.add_parser(mode, help=_MODE_HELP[mode])
        mode_parser.add_argument("--config", required=True, help="path to the JSON config")
        mode_parser.add_argument("--out", help="output path prefix (overrides the config)")
        mode_parser.add_argument(
            "--no-svg", action="store_true", help="write only the CSV table"
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses status 2 for usage problems; that slot is reserved
        # for physics errors here.
        return 1 if exc.code else 0
    if args.mode is None:
        parser.print_usage(sys.stderr)
        return 1

    try:
        config = load_config(args.config)
        if config.mode != args.mode:
            raise ConfigError(
                f"config declares mode {config.mode!r} but {args.mode!r} was requested"
            )
        written = run(config, out_prefix=args.out, write_svg=not args.no_svg)
    except ConfigError as exc:
        print(f"sagnacsim: config error: {exc}", file=sys.stderr)
        return 1
    except PhysicsError as exc:
        print(f"sagnacsim: physics error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sagnacsim: cannot write output: {exc}", file=sys.stderr)
        return 1
    except SagnacsimError as exc:  # pragma: no cover - safety net
        print(f"sagnacsim: {exc}", file=sys.stderr)
        return 2

    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
