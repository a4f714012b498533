"""Subspace-based optimisation: split of the contrast source by the SVD of Tinf.

With ``Tinf = sum_k u_k lam_k v_k^H`` the first ``L_alpha`` right singular
vectors carry a data-determined part

    omega_s_j = sum_{k <= L_alpha} <uinf_j, u_k> / lam_k * v_k

and the remainder ``Vn @ alpha_j`` lives in the orthogonal complement, so
only the coefficients ``alpha_j`` are iterated.
"""

from dataclasses import dataclass

import numpy as np

from .csi import ContrastProblem, CsiWeights, backprop_init, csi_objective, line_step
from .framework import SubspaceCoords, run_alternating
from .numeric import ConfigurationError

MAX_EXPLICIT_M = 4096


@dataclass
class SubspaceSplit:
    L_alpha: int
    omega_s: np.ndarray  # (J, M)
    Vn: np.ndarray  # (M, M - L_alpha)
    Vs_hat: np.ndarray  # (M, L_alpha)

    def omega(self, alpha):
        return self.omega_s + alpha @ self.Vn.T

    def coords(self):
        return SubspaceCoords(self.omega_s, self.Vn)


def build_split(ops, uinf, L_alpha):
    if ops.grid.M > MAX_EXPLICIT_M:
        raise ConfigurationError(
            f"SOM needs an explicit complement basis; grids above M={MAX_EXPLICIT_M} are not supported")
    svd = ops.svd
    if not 1 <= L_alpha <= svd.rank:
        raise ConfigurationError(f"L_alpha={L_alpha} outside [1, {svd.rank}]")
    Vs_hat = svd.signal_basis(L_alpha)
    # <uinf_j, u_k> = u_k^H uinf_j
    coef = uinf @ np.conj(svd.U[:, :L_alpha])
    omega_s = coef @ Vs_hat.T
    return SubspaceSplit(L_alpha=L_alpha, omega_s=omega_s, Vn=svd.complement(L_alpha), Vs_hat=Vs_hat)


def som_objective(alpha, m, split, problem):
    return csi_objective(split.omega(alpha), m, problem)


def som_gradient_alpha(alpha, m, split, problem, j=None):
    omega = split.omega(alpha)
    Es, Ed = problem.residuals(omega, m)
    g = problem.grad_omega(m, Es, Ed) @ np.conj(split.Vn)
    return g if j is None else g[j]


def som_step_size(alpha, m, rho, split, problem, gamma):
    """Closed-form step along ``rho``; the l1 weight is ``||rho_j||_1`` in alpha-coordinates."""
    ops = problem.ops
    Es, Ed = problem.residuals(split.omega(alpha), m)
    w = rho @ split.Vn.T
    Tw = ops.apply_T(w)
    return line_step(Es, Ed, m * Tw - w, w @ ops.Tinf.T, np.abs(rho).sum(axis=1),
                     problem.weights, gamma)


def irsom_run(ops, uinf, gamma, beta, L, max_iters, L_alpha=10, weights=None,
              m_truth=None, use_termination=True, m0=None, split=None, callback=None, **run_kw):
    """Iteratively regularised SOM; ``gamma = beta = 0`` is the original SOM.

    Starts from ``alpha = 0`` and the back-propagated contrast.  Weights
    default to the same constant formulas as CSI.
    """
    if m0 is None or weights is None:
        _, m_bp = backprop_init(ops, uinf)
        m0 = m_bp if m0 is None else m0
    if weights is None:
        weights = CsiWeights.from_initial(ops.ui, m0, uinf)
    if split is None:
        split = build_split(ops, uinf, L_alpha)
    problem = ContrastProblem(ops, uinf, weights)
    alpha0 = np.zeros((uinf.shape[0], split.Vn.shape[1]), dtype=complex)
    result = run_alternating(problem, split.coords(), alpha0, np.array(m0, dtype=complex),
                             gamma=gamma, beta=beta, L=L, max_iters=max_iters,
                             m_truth=m_truth, use_termination=use_termination,
                             callback=callback, **run_kw)
    result.extra["split"] = split
    return result
