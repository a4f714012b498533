"""Per-iteration records and the convergence/selection quantities.

A run produces one :class:`IterationRecord` per iterate ``z^r``.  Row ``r``
holds the objective and stationarity at ``z^r`` together with the step
``z^{r-1} -> z^r`` that produced it (zeros for ``r = 0``), so the descent
inequalities

    gamma ||x_j^r - x_j^{r-1}||_1 <= Psi_j(x^{r-1}, y^{r-1}) - Psi_j(x^r, y^{r-1})
    gamma ||x^r - x^{r-1}||_1     <= Psi(x^{r-1}, y^{r-1})   - Psi(x^r, y^{r-1})
    beta  ||y^r - y^{r-1}||_1     <= Psi(x^r, y^{r-1})       - Psi(x^r, y^r)

can be checked row by row through the slack fields (the worst ``j`` and the
sum over ``j`` for ``x``).
"""

import csv
from dataclasses import asdict, dataclass, fields
import math

import numpy as np

from .forward import contrast_sources, far_field
from .numeric import ContractError, mixed_norm_inf2

CSV_COLUMNS = ("iter", "objective", "grad_inf", "step_l1_x", "step_l1_y",
               "descent_slack_x", "descent_slack_y", "rel_error")

SLACK_TOL = 1e-9
MONOTONE_TOL = 1e-12


@dataclass
class IterationRecord:
    iter: int
    objective: float
    grad_inf: float
    step_l1_x: float = 0.0
    step_l1_y: float = 0.0
    descent_slack_x: float = 0.0
    descent_slack_y: float = 0.0
    rel_error: float = math.nan
    # not in the CSV: the x-slack summed over j, and the unweighted increments
    # ||x^r - x^{r-1}||_1, ||y^r - y^{r-1}||_1
    descent_slack_x_sum: float = 0.0
    dx_l1: float = 0.0
    dy_l1: float = 0.0

    def csv_row(self):
        d = asdict(self)
        return [repr(d[c]) if isinstance(d[c], float) else d[c] for c in CSV_COLUMNS]


def write_csv(path, records):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for rec in records:
            w.writerow(rec.csv_row())


def read_csv(path):
    names = {f.name for f in fields(IterationRecord)}
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            kw = {k: (int(v) if k == "iter" else float(v)) for k, v in row.items() if k in names}
            out.append(IterationRecord(**kw))
    return out


def check_records(records, slack_tol=SLACK_TOL, monotone_tol=MONOTONE_TOL, cauchy_tol=1e-9):
    """Return a list of human-readable invariant violations (empty if none)."""
    bad = []
    partial = 0.0
    f0 = records[0].objective if records else 0.0
    for prev, rec in zip(records, records[1:]):
        if rec.descent_slack_x < -slack_tol:
            bad.append(f"iter {rec.iter}: x-descent slack {rec.descent_slack_x:.3e}")
        if rec.descent_slack_x_sum < -slack_tol:
            bad.append(f"iter {rec.iter}: summed x-descent slack {rec.descent_slack_x_sum:.3e}")
        if rec.descent_slack_y < -slack_tol:
            bad.append(f"iter {rec.iter}: y-descent slack {rec.descent_slack_y:.3e}")
        if rec.objective > prev.objective + monotone_tol:
            bad.append(f"iter {rec.iter}: objective rose by {rec.objective - prev.objective:.3e}")
        partial += rec.step_l1_x + rec.step_l1_y
        if partial > f0 - rec.objective + cauchy_tol:
            bad.append(f"iter {rec.iter}: step sum {partial:.6e} exceeds decrease {f0 - rec.objective:.6e}")
    return bad


def relative_error(m_k, m_truth):
    m_truth = np.asarray(m_truth)
    den = np.linalg.norm(m_truth)
    if den == 0:
        raise ContractError("relative_error: ground truth is identically zero")
    return float(np.linalg.norm(np.asarray(m_k) - m_truth) / den)


def stationarity(gradients):
    """Largest entry modulus over all gradient blocks."""
    best = 0.0
    for g in gradients:
        g = np.asarray(g)
        if g.size:
            best = max(best, float(np.abs(g).max()))
    return best


@dataclass
class SelectionReport:
    delta: float
    delta_csi: float
    delta_som: float
    eps_h: float = math.nan
    lambda_next: float = math.nan


def estimate_delta(data, noise_rel=None):
    """Absolute noise bound ``rel * max_j ||u_j||`` from the noisy rows."""
    rel = data.noise_level if noise_rel is None else noise_rel
    return float(rel * np.linalg.norm(data.uinf, axis=1).max())


def selection_quantities(ops, weights, data, L_alpha=None, delta=None, eps_h=math.nan):
    """Computable factors of the CSI/SOM stationarity bounds at the ground truth.

    ``delta_csi = ||Tinf^H||_{inf,2} * max_j 2 eta_d * delta`` and
    ``delta_som = max(||Vs_hat||_{inf,2} * max_j 2 eta_s,
    lambda_{La+1} * max_j 2 eta_d) * delta``.
    """
    if delta is None:
        delta = estimate_delta(data)
    two_ed = 2.0 * float(np.max(weights.eta_d))
    two_es = 2.0 * float(np.max(weights.eta_s))
    d_csi = mixed_norm_inf2(ops.Tinf.conj().T) * two_ed * delta
    d_som = math.nan
    lam_next = math.nan
    if L_alpha is not None:
        svd = ops.svd
        Vs_hat = svd.signal_basis(L_alpha)
        lam_next = float(svd.lam[L_alpha]) if L_alpha < svd.lam.size else 0.0
        d_som = max(mixed_norm_inf2(Vs_hat) * two_es, lam_next * two_ed) * delta
    return SelectionReport(delta=float(delta), delta_csi=float(d_csi), delta_som=float(d_som),
                           eps_h=float(eps_h), lambda_next=lam_next)


def discretization_residual(ops, m_truth, exact_uinf, **solve_kw):
    """``max_j ||u_j^inf - Tinf omega_j^dagger||`` for the model on ``ops``.

    ``exact_uinf`` is noiseless data from an independent (usually finer)
    synthesis grid; ``omega^dagger`` solves the state equation on ``ops.grid``.
    """
    m_truth = np.asarray(m_truth, dtype=complex)
    if not m_truth.any():
        return float(np.linalg.norm(exact_uinf, axis=1).max())
    omega = contrast_sources(ops, m_truth, **solve_kw)
    return float(np.linalg.norm(exact_uinf - far_field(ops, omega), axis=1).max())
