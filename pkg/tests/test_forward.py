import mpmath
import numpy as np
import pytest

from scatterkit.forward import (
    FarFieldData, Grid, Kernel, SolverFailure, add_noise, apply_T, build_operators,
    compute_svd, far_field, solve_state, synthesize, uniform_directions,
)
from scatterkit.numeric import ConfigurationError, ContractError
from scatterkit.phantoms import bump_contrast

from conftest import crandn

D16 = uniform_directions(16)


@pytest.mark.parametrize("N", [1, 2, 8, 9, 32])
def test_grid_layout(N):
    g = Grid(N)
    assert g.M == N * N
    assert g.lattice.shape == (g.M, 2)
    assert len({tuple(p) for p in g.lattice}) == g.M
    assert np.all(np.abs(g.centers) <= 2.0 + 1e-15)
    assert np.all(g.p_range > -N / 2) and np.all(g.p_range <= N / 2)
    # lexicographic in (p1, p2)
    keys = [tuple(p) for p in g.lattice]
    assert keys == sorted(keys)


def test_hankel_against_mpmath():
    mpmath.mp.dps = 30
    k = Kernel(1.0)
    xs = np.geomspace(1e-3, 1e3, 60)
    ref = np.array([complex(0.25j * mpmath.hankel1(0, x)) for x in xs])
    np.testing.assert_allclose(k.phi(xs), ref, rtol=1e-12)


def test_hankel_published_values():
    # J0(1), Y0(1), J0(10), Y0(10) from standard tables
    k = Kernel(1.0)
    np.testing.assert_allclose(k.phi([1.0, 10.0]) / 0.25j,
                               [0.7651976865579666 + 0.08825696421567696j,
                                -0.2459357644513483 + 0.05567116728359939j], rtol=1e-12)


def test_kernel_origin_and_radial():
    k = Kernel(6.0)
    assert k.phi(0.0) == 0
    table = k.offset_table(Grid(8))
    np.testing.assert_array_equal(table, table.T)
    np.testing.assert_array_equal(table, table[::-1, :])
    assert table[7, 7] == 0


def test_theta():
    k = Kernel(6.0)
    assert k.theta == pytest.approx(36 * np.exp(0.25j * np.pi) / np.sqrt(48 * np.pi), rel=1e-15)


def test_apply_T_zero_and_single_pixel():
    g, k = Grid(8), Kernel(6.0)
    np.testing.assert_array_equal(apply_T(g, k, np.zeros(64)), 0)
    assert apply_T(Grid(1), k, np.array([1.0 + 2j]))[0] == 0


def test_apply_T_fft_matches_dense():
    rng = np.random.default_rng(0)
    g, k = Grid(8), Kernel(6.0)
    W = crandn(rng, 10, g.M)
    fft = apply_T(g, k, W)
    dense = apply_T(g, k, W, method="dense")
    assert np.linalg.norm(fft - dense) / np.linalg.norm(dense) < 1e-12


def test_apply_T_symmetric_and_linear():
    rng = np.random.default_rng(3)
    ops = build_operators(Grid(12), 5.0, D16[:2], D16[:2])
    x, y = crandn(rng, ops.grid.M), crandn(rng, ops.grid.M)
    Tx, Ty = ops.apply_T(x), ops.apply_T(y)
    assert abs(Tx @ y - x @ Ty) <= 1e-13 * np.linalg.norm(Tx) * np.linalg.norm(y)
    a, b = 0.7 - 1.1j, -2 + 0.3j
    lhs = ops.apply_T(a * x + b * y)
    assert np.linalg.norm(lhs - (a * Tx + b * Ty)) <= 1e-13 * np.linalg.norm(lhs)
    dense = ops.dense_T()
    np.testing.assert_array_equal(dense, dense.T)


def test_apply_T_length_check():
    with pytest.raises(ContractError):
        apply_T(Grid(4), Kernel(1.0), np.zeros(15))


def test_solve_state_zero_contrast_is_exact():
    ops = build_operators(Grid(16), 6.0, D16, D16)
    u = solve_state(ops, np.zeros(ops.grid.M), ops.ui)
    np.testing.assert_array_equal(u, ops.ui)


def test_solve_state_matches_dense_lu():
    rng = np.random.default_rng(4)
    ops = build_operators(Grid(8), 6.0, D16[:3], D16[:3])
    m = crandn(rng, ops.grid.M)
    m *= 0.1 / np.abs(m).max()
    u = solve_state(ops, m, ops.ui)
    A = np.eye(ops.grid.M) - ops.dense_T() * m[None, :]
    ref = np.linalg.solve(A, ops.ui.T).T
    assert np.abs(u - ref).max() <= 1e-9
    res = np.linalg.norm(u[0] - ops.ui[0] - ops.apply_T(m * u[0])) / np.linalg.norm(ops.ui[0])
    assert res <= 1e-10


def test_solve_state_born_consistency():
    ops = build_operators(Grid(16), 6.0, D16[:1], D16[:1])
    shape = bump_contrast(ops.grid)
    ui = ops.ui[0]
    errs = []
    for amp in (1e-4, 2e-4):
        m = amp * shape / np.abs(shape).max()
        u = solve_state(ops, m, ui, rtol=1e-14)
        born = ui + ops.apply_T(m * ui)
        errs.append(np.linalg.norm(u - born) / np.linalg.norm(ui))
    assert errs[0] < 10 * 1e-8
    # second order in the contrast amplitude
    assert errs[1] / errs[0] == pytest.approx(4.0, rel=1e-3)


def test_solve_state_failure_carries_residual():
    ops = build_operators(Grid(16), 6.0, D16[:1], D16[:1])
    m = 3.0 * bump_contrast(ops.grid)
    with pytest.raises(SolverFailure) as info:
        solve_state(ops, m, ops.ui[0], max_krylov_iters=2, restart=2)
    assert info.value.residual > 1e-10


def test_far_field_unit_pixel_and_zero():
    ops = build_operators(Grid(8), 6.0, D16, D16)
    np.testing.assert_array_equal(far_field(ops, np.zeros(64)), 0)
    e = np.zeros(64)
    e[13] = 1
    col = far_field(ops, e)
    np.testing.assert_array_equal(col, ops.Tinf[:, 13])
    np.testing.assert_allclose(np.abs(col), abs(ops.theta) * ops.grid.h**2, rtol=1e-14)


def _rotate90(grid, m):
    """Contrast rotated by +90 degrees: m'(p1, p2) = m(p2, -p1)."""
    index = {tuple(p): i for i, p in enumerate(grid.lattice)}
    out = np.zeros_like(m)
    for i, (p1, p2) in enumerate(grid.lattice):
        j = index.get((p2, -p1))
        if j is not None:
            out[i] = m[j]
    return out


def test_rotation_equivariance():
    g = Grid(16)
    rng = np.random.default_rng(5)
    m = bump_contrast(g) * (1 + 0.3 * rng.standard_normal(g.M))
    d = uniform_directions(8)
    rot = d @ np.array([[0, 1], [-1, 0]])  # rows rotated by +90 degrees
    ops = build_operators(g, 6.0, d, d)
    ops_rot = build_operators(g, 6.0, rot, rot)
    ff = synthesize(ops, m, rtol=1e-14).uinf
    ff_rot = synthesize(ops_rot, _rotate90(g, m), rtol=1e-14).uinf
    assert np.linalg.norm(ff - ff_rot) <= 1e-12 * np.linalg.norm(ff)


def test_reciprocity_small():
    g = Grid(16)
    d = np.array([[np.cos(0.3), np.sin(0.3)]])
    x = np.array([[np.cos(2.1), np.sin(2.1)]])
    m = bump_contrast(g)
    a = synthesize(build_operators(g, 6.0, d, x), m, rtol=1e-14).uinf[0, 0]
    b = synthesize(build_operators(g, 6.0, -x, -d), m, rtol=1e-14).uinf[0, 0]
    assert abs(a - b) <= 1e-12 * abs(a)


def test_add_noise_exact_level_and_determinism():
    rng = np.random.default_rng(6)
    exact = FarFieldData(uinf=crandn(rng, 4, 7))
    same = add_noise(exact, 0.0, seed=1)
    np.testing.assert_array_equal(same.uinf, exact.uinf)
    assert same.delta == 0.0
    noisy = add_noise(exact, 0.05, seed=1)
    rel = np.linalg.norm(noisy.uinf - exact.uinf, axis=1) / np.linalg.norm(exact.uinf, axis=1)
    np.testing.assert_allclose(rel, 0.05, atol=1e-14)
    assert noisy.delta == pytest.approx(0.05 * np.linalg.norm(exact.uinf, axis=1).max())
    again = add_noise(exact, 0.05, seed=1)
    assert again.uinf.tobytes() == noisy.uinf.tobytes()
    with pytest.raises(ContractError):
        add_noise(exact, -0.1, seed=1)


def test_svd_properties():
    ops = build_operators(Grid(32), 6.0, D16, D16)
    svd = compute_svd(ops)
    assert svd.rank == 16
    assert np.all(np.diff(svd.lam) <= 0)
    recon = (svd.U * svd.lam) @ svd.V[:, :16].conj().T
    assert np.linalg.norm(recon - ops.Tinf) <= 1e-11 * np.linalg.norm(ops.Tinf)
    Vn = svd.complement(10)
    assert Vn.shape == (1024, 1014)
    assert np.abs(Vn.conj().T @ Vn - np.eye(1014)).max() <= 1e-12
    assert np.abs(Vn.conj().T @ svd.V[:, :10]).max() <= 1e-12
    assert np.abs(svd.U.conj().T @ svd.U - np.eye(16)).max() <= 1e-12
    with pytest.raises(ConfigurationError):
        svd.complement(17)
