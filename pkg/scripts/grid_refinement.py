"""Far-field change per grid doubling for the bump phantom (expected ratio near 4)."""

import numpy as np

from scatterkit.forward import Grid, build_operators, synthesize, uniform_directions
from scatterkit.phantoms import bump_contrast


def main(sizes=(16, 32, 64, 128, 256)):
    d = uniform_directions(16)
    ff = {}
    for N in sizes:
        ops = build_operators(Grid(N), 6.0, d, d)
        ff[N] = synthesize(ops, bump_contrast(ops.grid), rtol=1e-12).uinf
    diffs = {N: np.linalg.norm(ff[2 * N] - ff[N]) for N in sizes[:-1]}
    prev = None
    for N, v in diffs.items():
        ratio = "" if prev is None else f"  ratio {prev / v:.3f}"
        print(f"||F_{2 * N} - F_{N}|| = {v:.4e}{ratio}")
        prev = v


if __name__ == "__main__":
    main()
