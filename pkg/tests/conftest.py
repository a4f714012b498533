import numpy as np
import pytest

from scatterkit.csi import ContrastProblem, CsiWeights
from scatterkit.forward import Grid, build_operators, uniform_directions


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def random_instance(seed, N=2, J=1, Q=3, kappa=None, m_scale=0.5):
    """Tiny random CSI instance on a real grid (M = N*N)."""
    rng = np.random.default_rng(seed)
    kappa = rng.uniform(2.0, 8.0) if kappa is None else kappa
    inc = rng.uniform(0, 2 * np.pi, J)
    obs = rng.uniform(0, 2 * np.pi, Q)
    d = np.column_stack([np.cos(inc), np.sin(inc)])
    x = np.column_stack([np.cos(obs), np.sin(obs)])
    ops = build_operators(Grid(N), kappa, d, x)
    M = ops.grid.M
    weights = CsiWeights(rng.uniform(0.5, 2.0, J), rng.uniform(0.5, 2.0, J))
    problem = ContrastProblem(ops, crandn(rng, J, Q), weights)
    omega = crandn(rng, J, M)
    m = m_scale * crandn(rng, M)
    return problem, omega, m, rng


@pytest.fixture(scope="session")
def bump16():
    """Bump phantom with data synthesised on N=32 for an N=16 inversion grid."""
    from scatterkit.forward import far_field, solve_state
    from scatterkit.phantoms import bump_contrast

    d = uniform_directions(8)
    fine = build_operators(Grid(32), 6.0, d, d)
    mf = bump_contrast(fine.grid)
    uinf = far_field(fine, mf * solve_state(fine, mf, fine.ui))
    ops = build_operators(Grid(16), 6.0, d, d)
    return ops, uinf, bump_contrast(ops.grid)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
