"""delta^csi, delta^som and eps_h for the bump phantom with 5% noise."""

import argparse

import numpy as np

from scatterkit.csi import CsiWeights, backprop_init
from scatterkit.diagnostics import discretization_residual, selection_quantities
from scatterkit.forward import Grid, add_noise, build_operators, synthesize, uniform_directions
from scatterkit.phantoms import bump_contrast


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-synth", type=int, default=256)
    ap.add_argument("--n-inv", type=int, default=64)
    ap.add_argument("--L-alpha", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    d = uniform_directions(16)
    fine = build_operators(Grid(args.n_synth), 6.0, d, d)
    data = add_noise(synthesize(fine, bump_contrast(fine.grid)), 0.05, args.seed)
    ops = build_operators(Grid(args.n_inv), 6.0, d, d)
    _, m0 = backprop_init(ops, data.uinf)
    w = CsiWeights.from_initial(ops.ui, m0, data.uinf)
    eps_h = discretization_residual(ops, bump_contrast(ops.grid), data.exact)
    rep = selection_quantities(ops, w, data, L_alpha=args.L_alpha, eps_h=eps_h)
    for k, v in vars(rep).items():
        print(f"{k:12s} {v:.6e}")
    print(f"{'eta_s':12s} {w.eta_s[0]:.6e}\n{'eta_d':12s} {w.eta_d[0]:.6e}")
    print("singular values:", np.array2string(ops.svd.lam, precision=4))


if __name__ == "__main__":
    main()
