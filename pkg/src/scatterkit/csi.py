"""CSI objective, its complex gradients and the closed-form subproblem solutions.

Contrast sources are stored as a (J, M) array, one row per incidence; the
far-field data as (J, Q).  Gradients follow the convention
``grad f = df/d(Re z) + i df/d(Im z)``, under which

    grad_omega_j F = 2 eta_s (D(m)T - I)^H E_s - 2 eta_d Tinf^H E_d,
    grad_m F      = 2 sum_j eta_s conj(u_j) * E_s,  u_j = ui_j + T omega_j,

with state residual ``E_s = m*ui + m*T omega - omega`` and data residual
``E_d = u^inf - Tinf omega``.
"""

from dataclasses import dataclass

import numpy as np

from .numeric import soft_threshold


@dataclass
class CsiWeights:
    """Constant positive weights of the state and data terms."""

    eta_s: np.ndarray
    eta_d: np.ndarray

    def __post_init__(self):
        self.eta_s = np.asarray(self.eta_s, dtype=float)
        self.eta_d = np.asarray(self.eta_d, dtype=float)
        if np.any(self.eta_s <= 0) or np.any(self.eta_d <= 0):
            raise ValueError("weights must be strictly positive")

    @classmethod
    def uniform(cls, J, eta_s=1.0, eta_d=1.0):
        return cls(np.full(J, float(eta_s)), np.full(J, float(eta_d)))

    @classmethod
    def from_initial(cls, ui, m0, uinf):
        """``eta_s = 1/sum_j ||m0*ui_j||^2`` and ``eta_d = 1/sum_j ||uinf_j||^2``.

        A vanishing denominator (zero data or zero initial contrast) falls
        back to a weight of 1.
        """
        J = uinf.shape[0]
        s = float(np.sum(np.abs(m0 * ui) ** 2))
        d = float(np.sum(np.abs(uinf) ** 2))
        return cls.uniform(J, 1.0 / s if s > 0 else 1.0, 1.0 / d if d > 0 else 1.0)


def rows_inner(a, b):
    """Row-wise ``sum(a * conj(b))``."""
    return np.einsum("jm,jm->j", a, np.conj(b))


def rows_sq(a):
    return np.einsum("jm,jm->j", a.real, a.real) + np.einsum("jm,jm->j", a.imag, a.imag)


@dataclass
class ContrastProblem:
    """Everything that is fixed during a CSI/SOM run."""

    ops: object
    uinf: np.ndarray
    weights: CsiWeights

    @property
    def ui(self):
        return self.ops.ui

    def residuals(self, omega, m, T_omega=None):
        if T_omega is None:
            T_omega = self.ops.apply_T(omega)
        Es = m * (self.ui + T_omega) - omega
        Ed = self.uinf - omega @ self.ops.Tinf.T
        return Es, Ed

    def objective_terms(self, Es, Ed):
        w = self.weights
        return w.eta_s * rows_sq(Es) + w.eta_d * rows_sq(Ed)

    def grad_omega(self, m, Es, Ed):
        w = self.weights
        state = self.ops.apply_T_adj(np.conj(m) * Es) - Es
        data = Ed @ np.conj(self.ops.Tinf)
        return 2.0 * w.eta_s[:, None] * state - 2.0 * w.eta_d[:, None] * data

    def grad_m(self, u, Es):
        return 2.0 * np.einsum("j,jm->m", self.weights.eta_s, np.conj(u) * Es)


def csi_objective(omega, m, problem):
    Es, Ed = problem.residuals(omega, m)
    return float(problem.objective_terms(Es, Ed).sum())


def csi_gradient_omega(omega, m, problem, j=None):
    Es, Ed = problem.residuals(omega, m)
    g = problem.grad_omega(m, Es, Ed)
    return g if j is None else g[j]


def csi_gradient_m(omega, m, problem):
    T_omega = problem.ops.apply_T(omega)
    Es, _ = problem.residuals(omega, m, T_omega)
    return problem.grad_m(problem.ui + T_omega, Es)


def prcg_direction(g_now, g_prev=None, v_prev=None):
    """Polak-Ribiere direction, restarting on r=0 or an exactly zero g_prev."""
    if g_prev is None or v_prev is None:
        return g_now.copy()
    den = float(np.vdot(g_prev, g_prev).real)
    if den == 0.0:
        return g_now.copy()
    coef = np.vdot(g_now - g_prev, g_now).real / den
    return g_now + coef * v_prev


def prcg_directions(g_now, g_prev=None, v_prev=None):
    """Row-wise :func:`prcg_direction` for (J, n) stacks."""
    if g_prev is None or v_prev is None:
        return g_now.copy()
    den = rows_sq(g_prev)
    num = rows_inner(g_now, g_now - g_prev).real
    coef = np.divide(num, den, out=np.zeros_like(den), where=den != 0)
    return g_now + coef[:, None] * v_prev


def line_step(Es, Ed, A, B, v_l1, weights, gamma):
    """Minimiser over complex s of the regularised line function

        eta_s ||Es + s A||^2 + eta_d ||Ed - s B||^2 + gamma * v_l1 * |s|

    row by row; ``A = m*T w - w`` and ``B = Tinf w`` for the search vector w.
    """
    es, ed = weights.eta_s, weights.eta_d
    den = es * rows_sq(A) + ed * rows_sq(B)
    num = es * rows_inner(Es, -A) + ed * rows_inner(Ed, B)
    live = den > 0
    safe = np.where(live, den, 1.0)
    z = num / safe
    tau = gamma * np.asarray(v_l1, dtype=float) / (2.0 * safe)
    return np.where(live, soft_threshold(z, tau), 0.0)


def csi_step_size(omega, m, v, problem, gamma):
    """Closed-form step for each incidence along the directions ``v``."""
    ops = problem.ops
    Es, Ed = problem.residuals(omega, m)
    Tv = ops.apply_T(v)
    A = m * Tv - v
    B = v @ ops.Tinf.T
    return line_step(Es, Ed, A, B, np.abs(v).sum(axis=1), problem.weights, gamma)


def csi_update_m(m_prev, omega, u, eta_s, beta):
    """Exact per-pixel solution of the l1-proximal contrast subproblem.

    Minimises ``sum_j eta_s_j |m u_j - omega_j|^2 + beta |m - m_prev|`` at
    every pixel; pixels where all ``u_j`` vanish keep ``m_prev``.
    """
    eta_s = np.asarray(eta_s, dtype=float)
    den = np.einsum("j,jm->m", eta_s, np.abs(u) ** 2)
    num = np.einsum("j,jm->m", eta_s, np.conj(u) * omega)
    live = den > 0
    safe = np.where(live, den, 1.0)
    z = num / safe
    if beta == 0:
        return np.where(live, z, m_prev)
    step = soft_threshold(z - m_prev, beta / (2.0 * safe))
    return np.where(live, m_prev + step, m_prev)


def backprop_init(ops, uinf):
    """Back-propagated contrast sources and the matching contrast.

    ``omega_j = c_j Tinf^H uinf_j`` with the real scale
    ``c_j = ||Tinf^H uinf_j||^2 / ||Tinf Tinf^H uinf_j||^2`` (0 for zero data),
    then ``m`` from the unregularised contrast update.
    """
    bp = uinf @ np.conj(ops.Tinf)
    fwd = bp @ ops.Tinf.T
    num = rows_sq(bp)
    den = rows_sq(fwd)
    scale = np.divide(num, den, out=np.zeros_like(num), where=den > 0)
    omega0 = scale[:, None] * bp
    u0 = ops.ui + ops.apply_T(omega0)
    m0 = csi_update_m(np.zeros(ops.grid.M, dtype=complex), omega0, u0,
                      np.ones(uinf.shape[0]), 0.0)
    return omega0, m0


def ircsi_run(ops, uinf, gamma, beta, L, max_iters, weights=None, m_truth=None,
              use_termination=True, init=None, callback=None, **run_kw):
    """Iteratively regularised CSI; ``gamma = beta = 0`` is the original CSI.

    Returns a :class:`~scatterkit.framework.RunResult` whose ``x`` is the
    final contrast-source stack.  Extra keywords (``stagnation_window``,
    ``stagnation_tol``) go to :func:`~scatterkit.framework.run_alternating`.
    """
    from .framework import IdentityCoords, run_alternating

    omega0, m0 = backprop_init(ops, uinf) if init is None else init
    if weights is None:
        weights = CsiWeights.from_initial(ops.ui, m0, uinf)
    problem = ContrastProblem(ops, uinf, weights)
    return run_alternating(problem, IdentityCoords(), omega0.copy(), m0.copy(),
                           gamma=gamma, beta=beta, L=L, max_iters=max_iters,
                           m_truth=m_truth, use_termination=use_termination,
                           callback=callback, **run_kw)
