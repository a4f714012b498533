import math

import numpy as np
import pytest

from scatterkit.csi import CsiWeights
from scatterkit.diagnostics import (
    IterationRecord, check_records, discretization_residual, read_csv, relative_error,
    selection_quantities, stationarity, write_csv,
)
from scatterkit.forward import FarFieldData, Grid, build_operators, far_field, solve_state, uniform_directions
from scatterkit.numeric import ContractError
from scatterkit.phantoms import bump_contrast

D8 = uniform_directions(8)


def test_relative_error_examples():
    rng = np.random.default_rng(0)
    mt = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    assert relative_error(mt, mt) == 0
    assert relative_error(0 * mt, mt) == pytest.approx(1, rel=1e-15)
    assert relative_error(2 * mt, mt) == pytest.approx(1, rel=1e-15)
    with pytest.raises(ContractError):
        relative_error(mt, 0 * mt)


def test_stationarity_examples():
    assert stationarity([np.zeros(3), np.zeros((2, 2))]) == 0
    assert stationarity([np.array([3 + 4j])]) == 5
    rng = np.random.default_rng(1)
    blocks = [rng.standard_normal(4) + 1j * rng.standard_normal(4) for _ in range(3)]
    assert stationarity(blocks) == np.abs(np.concatenate(blocks)).max()


def _recs(objs, sx=0.0, sy=0.0, steps=0.0):
    return [IterationRecord(iter=i, objective=f, grad_inf=1.0, step_l1_x=steps if i else 0.0,
                            descent_slack_x=sx, descent_slack_y=sy) for i, f in enumerate(objs)]


def test_check_records_detects_each_violation():
    assert check_records(_recs([3, 2, 1])) == []
    assert any("objective rose" in v for v in check_records(_recs([3, 2, 2.5])))
    assert any("x-descent" in v for v in check_records(_recs([3, 2], sx=-1e-6)))
    assert any("y-descent" in v for v in check_records(_recs([3, 2], sy=-1e-6)))
    assert any("step sum" in v for v in check_records(_recs([3, 2.9, 2.8], steps=0.2)))
    assert check_records(_recs([3, 2], sx=-1e-10)) == []
    recs = _recs([3, 2])
    recs[1].descent_slack_x_sum = -1e-6
    assert any("summed x-descent" in v for v in check_records(recs))


def test_csv_round_trip(tmp_path):
    recs = [IterationRecord(0, 2.0, 0.5), IterationRecord(1, 1.5, 0.25, 1e-3, 2e-3, 0.1, 0.2, 0.7)]
    path = tmp_path / "log.csv"
    write_csv(path, recs)
    header = path.read_text().splitlines()[0]
    assert header == "iter,objective,grad_inf,step_l1_x,step_l1_y,descent_slack_x,descent_slack_y,rel_error"
    back = read_csv(path)
    assert back[1] == recs[1]
    assert back[0].iter == 0 and math.isnan(back[0].rel_error)


def _data(N, noise=0.05):
    ops = build_operators(Grid(N), 6.0, D8, D8)
    return ops, FarFieldData(np.ones((8, 8), complex), noise_level=noise)


def test_selection_zero_delta():
    ops, data = _data(8)
    rep = selection_quantities(ops, CsiWeights.uniform(8), data, L_alpha=4, delta=0.0)
    assert rep.delta_csi == 0 and rep.delta_som == 0


def test_selection_formula_by_hand():
    ops, data = _data(8)
    w = CsiWeights(np.full(8, 0.5), np.linspace(0.1, 0.8, 8))
    rep = selection_quantities(ops, w, data, L_alpha=3)
    delta = 0.05 * np.sqrt(8)
    assert rep.delta == pytest.approx(delta, rel=1e-14)
    row = np.sqrt((np.abs(ops.Tinf.conj().T) ** 2).sum(axis=1)).max()
    assert rep.delta_csi == pytest.approx(row * 1.6 * delta, rel=1e-13)
    svd = ops.svd
    vs = np.sqrt((np.abs(svd.V[:, :3] / svd.lam[:3]) ** 2).sum(axis=1)).max()
    assert rep.lambda_next == svd.lam[3]
    assert rep.delta_som == pytest.approx(max(vs * 1.0, svd.lam[3] * 1.6) * delta, rel=1e-13)


def test_discretization_residual_same_grid_and_zero():
    ops = build_operators(Grid(16), 6.0, D8, D8)
    m = bump_contrast(ops.grid)
    exact = far_field(ops, m * solve_state(ops, m, ops.ui))
    assert discretization_residual(ops, m, exact) <= 1e-9
    assert discretization_residual(ops, 0 * m, np.zeros_like(exact)) == 0


def test_discretization_residual_decreases_with_refinement():
    fine = build_operators(Grid(64), 6.0, D8, D8)
    mf = bump_contrast(fine.grid)
    exact = far_field(fine, mf * solve_state(fine, mf, fine.ui))
    res = []
    for N in (8, 16):
        ops = build_operators(Grid(N), 6.0, D8, D8)
        res.append(discretization_residual(ops, bump_contrast(ops.grid), exact))
    assert res[1] < res[0]
