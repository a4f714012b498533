"""Bump-phantom beta sweep for IRCSI and IRSOM at desk or paper scale.

    python scripts/example1_sweep.py --out runs/example1            # 128 / 32
    python scripts/example1_sweep.py --paper-scale --max-iters 30000  # 256 / 64
"""

import argparse

from scatterkit.config import ExperimentConfig
from scatterkit.experiment import sweep

BETAS = {"ircsi": [0, 1e-6, 1e-5, 1e-4, 1e-3], "irsom": [0, 1e-5, 1e-4, 1e-3, 1e-2]}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="runs/example1")
    ap.add_argument("--paper-scale", action="store_true")
    ap.add_argument("--max-iters", type=int, default=5000)
    ap.add_argument("--noise-rel", type=float, default=0.05)
    ap.add_argument("--algorithms", default="ircsi,irsom")
    args = ap.parse_args()
    grids = dict(N_synth=256, N_inv=64) if args.paper_scale else {}
    for alg in args.algorithms.split(","):
        cfg = ExperimentConfig(algorithm=alg, max_iters=args.max_iters, noise_rel=args.noise_rel,
                               use_termination=False, output_dir=f"{args.out}/{alg}", **grids)
        print(alg)
        for row in sweep(cfg, BETAS[alg]):
            print("  " + ",".join(str(c) for c in row))


if __name__ == "__main__":
    main()
