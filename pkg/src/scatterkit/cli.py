"""Command line: ``scatterkit {synth,invert,sweep} --config c.json [overrides]``."""

import argparse
from dataclasses import fields
import json
import logging
import sys

from .config import ALGORITHMS, ExperimentConfig, config_from_dict
from .experiment import run_experiment, sweep, synthesize_data, write_synthesis
from .numeric import ConfigurationError

EXIT_USAGE = 2
EXIT_FAILED = 1


def _bool(s):
    if s.lower() in ("1", "true", "yes", "on"):
        return True
    if s.lower() in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {s}")


def _betas(s):
    try:
        return [float(b) for b in s.split(",") if b.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser():
    p = argparse.ArgumentParser(prog="scatterkit", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (fields of ExperimentConfig)")
    common.add_argument("--print-config", action="store_true", help="echo the effective config and exit")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--algorithm", choices=ALGORITHMS)
    common.add_argument("--beta", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--L", type=float)
    common.add_argument("--L-alpha", dest="L_alpha", type=int)
    common.add_argument("--kappa", type=float)
    common.add_argument("--J", type=int)
    common.add_argument("--Q", type=int)
    common.add_argument("--N-synth", dest="N_synth", type=int)
    common.add_argument("--N-inv", dest="N_inv", type=int)
    common.add_argument("--noise-rel", dest="noise_rel", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--max-iters", dest="max_iters", type=int)
    common.add_argument("--use-termination", dest="use_termination", type=_bool)
    common.add_argument("--phantom")
    sub.add_parser("synth", parents=[common], help="synthesize noisy far-field data")
    sub.add_parser("invert", parents=[common], help="synthesize and run one inversion")
    sw = sub.add_parser("sweep", parents=[common], help="one inversion per beta")
    sw.add_argument("--betas", type=_betas, required=True, help="comma-separated list")
    return p


def effective_config(args):
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    names = {f.name for f in fields(ExperimentConfig)}
    cfg = config_from_dict(base)
    over = {k: v for k, v in vars(args).items() if k in names and v is not None}
    return cfg.override(**over).validate()


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = effective_config(args)
    except (ConfigurationError, OSError, ValueError, TypeError) as exc:
        print(f"scatterkit: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.print_config:
        print(cfg.to_json())
        return 0
    if args.command == "synth":
        man = write_synthesis(cfg, synthesize_data(cfg))
        print(f"delta={man['delta']:.6e} -> {cfg.output_dir}")
        return 0
    if args.command == "invert":
        man = run_experiment(cfg)
        if man["status"] == "failed":
            print(f"scatterkit: solver failure: {man['error']}", file=sys.stderr)
            return EXIT_FAILED
        fin = man["final"]
        print(f"{man['status']} after {man['iterations']} iterations; "
              f"grad_inf={fin['grad_inf']:.3e} rel_error={fin['rel_error']}")
        return 0
    rows = sweep(cfg, args.betas)
    for row in rows:
        print(",".join(str(c) for c in row))
    return EXIT_FAILED if any(str(r[-1]).startswith("failed") for r in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
