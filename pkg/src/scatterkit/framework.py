"""The alternating l1-proximal iteration shared by IRCSI and IRSOM.

Both methods update per-incidence unknowns ``x_j`` by one Polak-Ribiere
step with a soft-thresholded exact line search, then the contrast ``y = m``
by an exact per-pixel LASSO.  They differ only in how ``x_j`` maps to the
contrast source: CSI uses ``omega_j = x_j`` and SOM uses
``omega_j = omega_s_j + Vn @ x_j``.
"""

from dataclasses import dataclass, field
import logging

import numpy as np

from .csi import csi_update_m, line_step, prcg_directions
from .diagnostics import IterationRecord, relative_error, stationarity

log = logging.getLogger(__name__)


class IdentityCoords:
    """``omega = x``."""

    identity = True

    def lin(self, v):
        return v

    def adj(self, g):
        return g

    def omega(self, x):
        return x


@dataclass
class SubspaceCoords:
    """``omega_j = omega_s_j + Vn @ x_j`` with orthonormal columns in Vn."""

    omega_s: np.ndarray
    Vn: np.ndarray
    identity = False

    def __post_init__(self):
        self._VnT = np.ascontiguousarray(self.Vn.T)
        self._Vn_conj = np.ascontiguousarray(np.conj(self.Vn))

    def lin(self, v):
        return v @ self._VnT

    def adj(self, g):
        return g @ self._Vn_conj

    def omega(self, x):
        return self.omega_s + self.lin(x)


@dataclass
class RunResult:
    records: list
    m: np.ndarray
    omega: np.ndarray
    x: np.ndarray
    status: str
    iterations: int
    eps: float
    weights: object = None
    extra: dict = field(default_factory=dict)

    @property
    def final(self):
        return self.records[-1]


def run_alternating(problem, coords, x0, m0, gamma, beta, L, max_iters,
                    m_truth=None, use_termination=True, callback=None,
                    stagnation_window=100, stagnation_tol=1e-15):
    """Run the regularised alternating scheme from ``(x0, m0)``.

    Stops when ``max(|grad|) <= 2*eps`` with ``eps = max(gamma*L, beta)``
    (if ``use_termination``), after ``max_iters`` updates, or when the
    objective has moved by less than ``stagnation_tol`` for
    ``stagnation_window`` consecutive iterations (``None`` disables this).
    """
    if gamma < 0 or beta < 0:
        raise ValueError("gamma and beta must be nonnegative")
    ops = problem.ops
    weights = problem.weights
    Tinf_T = ops.Tinf.T
    eps = max(gamma * L, beta)

    x = np.array(x0, dtype=complex)
    omega = x if coords.identity else coords.omega(x)
    m = np.array(m0, dtype=complex)
    T_omega = ops.apply_T(omega)

    records = []
    g_prev = v_prev = None
    pending = None
    F_prev = None
    flat = 0
    status = "max_iters"
    r = 0
    while True:
        u = ops.ui + T_omega
        Es = m * u - omega
        Ed = problem.uinf - omega @ Tinf_T
        Fj = problem.objective_terms(Es, Ed)
        F = float(Fj.sum())
        gx = coords.adj(problem.grad_omega(m, Es, Ed))
        gm = problem.grad_m(u, Es)

        rec = IterationRecord(iter=r, objective=F, grad_inf=stationarity([gx, gm]))
        if m_truth is not None:
            rec.rel_error = relative_error(m, m_truth)
        if pending is not None:
            F_mid, step_x, step_y, slack_x, slack_sum, dx, dy = pending
            rec.step_l1_x, rec.step_l1_y = step_x, step_y
            rec.descent_slack_x = slack_x
            rec.descent_slack_x_sum = slack_sum
            rec.descent_slack_y = F_mid - F - step_y
            rec.dx_l1, rec.dy_l1 = dx, dy
        records.append(rec)
        if callback is not None:
            callback(rec)

        if use_termination and rec.grad_inf <= 2.0 * eps:
            status = "converged"
            break
        if stagnation_window and F_prev is not None:
            flat = flat + 1 if abs(F - F_prev) < stagnation_tol else 0
            if flat >= stagnation_window:
                status = "stagnated"
                break
        if r >= max_iters:
            break

        v = prcg_directions(gx, g_prev, v_prev)
        w = coords.lin(v)
        Tw = ops.apply_T(w)
        s = line_step(Es, Ed, m * Tw - w, w @ Tinf_T, np.abs(v).sum(axis=1), weights, gamma)
        dx = s[:, None] * v
        x = x + dx
        omega = x if coords.identity else omega + s[:, None] * w
        T_omega = ops.apply_T(omega)

        u = ops.ui + T_omega
        Es_mid = m * u - omega
        Ed_mid = problem.uinf - omega @ Tinf_T
        Fj_mid = problem.objective_terms(Es_mid, Ed_mid)
        dx_l1 = np.abs(dx).sum(axis=1)
        slack_j = Fj - Fj_mid - gamma * dx_l1

        m_new = csi_update_m(m, omega, u, weights.eta_s, beta)
        dy_l1 = float(np.abs(m_new - m).sum())
        m = m_new

        pending = (float(Fj_mid.sum()), gamma * float(dx_l1.sum()), beta * dy_l1,
                   float(slack_j.min()), float(slack_j.sum()), float(dx_l1.sum()), dy_l1)
        g_prev, v_prev = gx, v
        F_prev = F
        r += 1

    log.debug("alternating run stopped after %d iterations (%s)", r, status)
    return RunResult(records=records, m=m, omega=omega, x=x, status=status,
                     iterations=r, eps=eps, weights=weights)
