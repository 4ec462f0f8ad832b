"""``qtx`` command line: scenario sweeps written as CSV."""
from __future__ import annotations

import argparse
import logging
import sys

from . import sweeps
from .config import load_scenario
from .errors import ConfigError, DomainError, NumericalError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("transmission", "noise", "sensitivity", "bias-sweep", "resonances")


def _range(text: str):
    try:
        lo, hi = (float(x) for x in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected MIN:MAX, got {text!r}") from None
    return lo, hi


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtx", description="Tunnelling transducer noise and sensitivity sweeps.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True, metavar="FILE",
                   help="YAML scenario file, or one of the presets figure2, figure3, figure4")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", dest="overrides",
                   help="override a config entry, e.g. decoherence.gamma=0.9 (repeatable)")
    p.add_argument("--out", metavar="FILE", help="write CSV here instead of stdout")
    p.add_argument("--points", type=int, help="number of uniform sweep points")
    p.add_argument("--range", type=_range, metavar="MIN:MAX", dest="span",
                   help="sweep range in eV (energy sweeps) or V (bias sweep)")
    p.add_argument("--n-opt", action="store_true", help="sensitivity: add optimal electron-count columns")
    return p


def run(args) -> str:
    scenario = load_scenario(args.config, args.overrides)
    if args.command == "resonances":
        ds = sweeps.resonance_dataset(scenario)
        if not ds.rows:
            return "no resonances: configured device is not a double barrier or has no peak in the scan window\n"
        return ds.to_csv()
    if args.command == "bias-sweep":
        return sweeps.bias_dataset(scenario, sweeps.bias_spec(scenario, args.points, args.span)).to_csv()
    spec = sweeps.energy_spec(scenario, args.points, args.span)
    if args.command == "transmission":
        return sweeps.transmission_dataset(scenario, spec).to_csv()
    if args.command == "noise":
        return sweeps.noise_dataset(scenario, spec).to_csv()
    return sweeps.sensitivity_dataset(scenario, spec, n_opt=args.n_opt).to_csv()


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="qtx: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        text = run(args)
    except (ConfigError, DomainError) as exc:
        print(f"qtx: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"qtx: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
