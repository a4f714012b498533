"""Discrete Lippmann-Schwinger model on a square pixel grid.

The region [-2, 2]^2 is split into N x N boxes of width h = 4/N centred at
``p*h`` with ``-N/2 < p_k <= N/2``.  Points are ordered lexicographically in
``(p_1, p_2)``, so a length-M vector reshapes to an (N, N) array whose first
axis runs over ``p_1``.

Two linear maps are built from this grid:

* ``T``: the volume-potential matrix ``kappa^2 h^2 Phi(kappa |p - k| h)`` with
  ``Phi = (i/4) H_0^(1)`` and a zero self-term.  It is block-Toeplitz, so it is
  applied through a zero-padded circulant embedding and the FFT.
* ``Tinf``: the Q x M far-field matrix ``theta h^2 exp(-i kappa xhat . p h)``.
"""

from dataclasses import dataclass, field
from functools import cached_property
import logging
import math

import numpy as np
import scipy.fft
import scipy.special
from scipy.sparse.linalg import LinearOperator, gmres

from .numeric import ConfigurationError, ContractError

log = logging.getLogger(__name__)

REGION_HALF_WIDTH = 2.0


class SolverFailure(RuntimeError):
    """Krylov solve did not reach the requested residual."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class Grid:
    """Square pixel lattice covering [-2, 2]^2."""

    N: int
    half_width: float = REGION_HALF_WIDTH

    def __post_init__(self):
        if self.N < 1:
            raise ConfigurationError(f"grid size must be positive, got {self.N}")

    @property
    def h(self):
        return 2.0 * self.half_width / self.N

    @property
    def M(self):
        return self.N * self.N

    @property
    def p_range(self):
        """Integer lattice coordinates along one axis, ascending."""
        lo = math.floor(-self.N / 2) + 1
        return np.arange(lo, lo + self.N)

    @cached_property
    def lattice(self):
        p = self.p_range
        P1, P2 = np.meshgrid(p, p, indexing="ij")
        return np.column_stack([P1.ravel(), P2.ravel()])

    @cached_property
    def centers(self):
        return self.lattice * self.h

    def to_image(self, v):
        return np.asarray(v).reshape(self.N, self.N)


def uniform_directions(n):
    """``n`` unit vectors at angles ``2*pi*(j-1)/n``."""
    t = 2.0 * np.pi * np.arange(n) / n
    return np.column_stack([np.cos(t), np.sin(t)])


@dataclass(frozen=True)
class Kernel:
    """Free-space kernel for the 2-D Helmholtz operator."""

    kappa: float

    def phi(self, dist):
        """``(i/4) H_0^(1)(kappa*dist)``, and exactly 0 where dist == 0."""
        dist = np.asarray(dist, dtype=float)
        out = np.zeros(dist.shape, dtype=complex)
        nz = dist > 0
        out[nz] = 0.25j * scipy.special.hankel1(0, self.kappa * dist[nz])
        return out

    @property
    def theta(self):
        k = self.kappa
        return k * k * np.exp(0.25j * np.pi) / np.sqrt(8.0 * k * np.pi)

    def offset_table(self, grid):
        """``kappa^2 h^2 Phi`` on offsets ``-(N-1)..(N-1)`` in each axis."""
        N, h = grid.N, grid.h
        a = np.arange(-(N - 1), N)
        A, B = np.meshgrid(a, a, indexing="ij")
        dist = h * np.sqrt(A * A + B * B)
        return self.kappa**2 * h * h * self.phi(dist)


@dataclass
class IncidentData:
    """Incident plane waves sampled on a grid, plus observation directions."""

    directions: np.ndarray
    observations: np.ndarray
    ui: np.ndarray  # (J, M)

    @property
    def J(self):
        return self.directions.shape[0]

    @property
    def Q(self):
        return self.observations.shape[0]


def incident_data(grid, kappa, directions, observations):
    d = np.atleast_2d(np.asarray(directions, dtype=float))
    x = np.atleast_2d(np.asarray(observations, dtype=float))
    ui = np.exp(1j * kappa * (d @ grid.centers.T))
    return IncidentData(directions=d, observations=x, ui=ui)


@dataclass
class FarFieldData:
    """Far-field measurements, one row per incidence."""

    uinf: np.ndarray  # (J, Q)
    noise_level: float = 0.0
    delta: float = 0.0
    exact: np.ndarray | None = None

    @property
    def J(self):
        return self.uinf.shape[0]


@dataclass
class SvdData:
    """Full SVD of Tinf: ``Tinf = U @ diag(lam) @ V[:, :len(lam)]^H``."""

    lam: np.ndarray
    U: np.ndarray
    V: np.ndarray  # M x M unitary, columns are right singular vectors
    rank: int

    def signal_basis(self, L_alpha):
        """The matrix ``(v_1/lam_1, ..., v_La/lam_La)``."""
        self._check(L_alpha)
        return self.V[:, :L_alpha] / self.lam[:L_alpha]

    def complement(self, L_alpha):
        """Orthonormal basis of span(v_1..v_La)^perp, shape M x (M - La)."""
        self._check(L_alpha)
        return self.V[:, L_alpha:]

    def _check(self, L_alpha):
        if not 1 <= L_alpha <= self.rank:
            raise ConfigurationError(
                f"L_alpha={L_alpha} outside [1, {self.rank}] (numerical rank of Tinf)")


@dataclass
class ScatteringOperators:
    """The pair (T, Tinf) for one grid, wave number and incidence set."""

    grid: Grid
    kernel: Kernel
    incident: IncidentData
    Tinf: np.ndarray
    _table: np.ndarray = field(repr=False)
    _kernel_hat: np.ndarray = field(repr=False)
    _pad: int = field(repr=False)
    _svd: SvdData | None = field(default=None, repr=False)

    @property
    def kappa(self):
        return self.kernel.kappa

    @property
    def theta(self):
        return self.kernel.theta

    @property
    def ui(self):
        return self.incident.ui

    def apply_T(self, w):
        """Apply T along the last axis of ``w`` (shape (..., M))."""
        w = np.asarray(w, dtype=complex)
        N, P = self.grid.N, self._pad
        lead = w.shape[:-1]
        img = w.reshape(lead + (N, N))
        wh = scipy.fft.fft2(img, s=(P, P), axes=(-2, -1))
        out = scipy.fft.ifft2(wh * self._kernel_hat, axes=(-2, -1))[..., :N, :N]
        return np.ascontiguousarray(out).reshape(lead + (N * N,))

    def apply_T_adj(self, w):
        # T is complex symmetric, so T^H x = conj(T conj(x))
        return np.conj(self.apply_T(np.conj(w)))

    def dense_T(self):
        L = self.grid.lattice
        n = self.grid.N
        diff = L[:, None, :] - L[None, :, :] + (n - 1)
        return self._table[diff[..., 0], diff[..., 1]]

    @property
    def svd(self):
        if self._svd is None:
            self._svd = compute_svd(self)
        return self._svd


def build_operators(grid, kappa, directions, observations):
    kernel = Kernel(float(kappa))
    inc = incident_data(grid, kernel.kappa, directions, observations)
    table = kernel.offset_table(grid)
    N = grid.N
    P = scipy.fft.next_fast_len(2 * N - 1)
    circ = np.zeros((P, P), dtype=complex)
    idx = np.arange(-(N - 1), N) % P
    circ[np.ix_(idx, idx)] = table
    kernel_hat = scipy.fft.fft2(circ)
    h2 = grid.h**2
    Tinf = kernel.theta * h2 * np.exp(-1j * kernel.kappa * (inc.observations @ grid.centers.T))
    return ScatteringOperators(grid=grid, kernel=kernel, incident=inc, Tinf=Tinf,
                               _table=table, _kernel_hat=kernel_hat, _pad=P)


def apply_T(grid, kernel, w, method="fft"):
    """Volume potential ``kappa^2 h^2 sum_k Phi_{p-k} w_k`` on ``grid``.

    ``method="dense"`` multiplies by the materialised M x M matrix; it is the
    reference for the FFT path and is only allowed for N <= 64.
    """
    w = np.asarray(w, dtype=complex)
    if w.shape[-1] != grid.M:
        raise ContractError(f"apply_T: expected length {grid.M}, got {w.shape[-1]}")
    ops = _kernel_only_ops(grid, kernel)
    if method == "fft":
        return ops.apply_T(w)
    if method == "dense":
        if grid.N > 64:
            raise ConfigurationError("dense T is limited to N <= 64")
        return w @ ops.dense_T().T
    raise ValueError(f"unknown method {method!r}")


def _kernel_only_ops(grid, kernel):
    no_dirs = np.zeros((0, 2))
    return build_operators(grid, kernel.kappa, no_dirs, no_dirs)


def solve_state(ops, m, ui, rtol=1e-10, max_krylov_iters=2000, restart=200):
    """Total field ``u`` from ``[I - T D(m)] u = ui`` by restarted GMRES.

    ``ui`` may be a single incidence (M,) or a stack (J, M).  Raises
    ``SolverFailure`` when the true residual exceeds ``rtol * ||ui||``.
    """
    m = np.asarray(m, dtype=complex)
    ui = np.asarray(ui, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ContractError("solve_state: contrast has non-finite entries")
    if not m.any():
        return ui.copy()
    if ui.ndim == 2:
        return np.stack([solve_state(ops, m, row, rtol, max_krylov_iters, restart) for row in ui])

    M = ops.grid.M
    A = LinearOperator((M, M), matvec=lambda x: x - ops.apply_T(m * x), dtype=complex)
    restart = min(restart, M)
    outer = max(1, math.ceil(max_krylov_iters / restart))
    bnorm = np.linalg.norm(ui)
    # gmres tests its recurrence residual; ask for a margin and verify below
    u, _ = gmres(A, ui, rtol=0.1 * rtol, atol=0.0, restart=restart, maxiter=outer)
    res = np.linalg.norm(ui - A.matvec(u)) / bnorm
    if res > rtol:
        raise SolverFailure("state equation did not converge", res)
    return u


def contrast_sources(ops, m, ui=None, **kw):
    """``omega_j = m * u_j`` for every incidence."""
    ui = ops.ui if ui is None else ui
    return m * solve_state(ops, m, ui, **kw)


def far_field(ops, omega):
    """``Tinf @ omega`` along the last axis."""
    omega = np.asarray(omega, dtype=complex)
    if omega.shape[-1] != ops.grid.M:
        raise ContractError(f"far_field: expected length {ops.grid.M}")
    return omega @ ops.Tinf.T


def synthesize(ops, m, **kw):
    """Exact far-field data for contrast ``m`` at every incidence."""
    return FarFieldData(uinf=far_field(ops, contrast_sources(ops, m, **kw)))


def add_noise(ff, rel, seed):
    """Complex Gaussian noise scaled to relative size exactly ``rel`` per row."""
    if rel < 0:
        raise ContractError("noise level must be nonnegative")
    exact = ff.uinf if ff.exact is None else ff.exact
    rows = np.linalg.norm(exact, axis=1)
    if rel == 0:
        return FarFieldData(uinf=exact.copy(), noise_level=0.0, delta=0.0, exact=exact)
    rng = np.random.default_rng(seed)
    g = rng.standard_normal(exact.shape) + 1j * rng.standard_normal(exact.shape)
    g *= (rel * rows / np.linalg.norm(g, axis=1))[:, None]
    return FarFieldData(uinf=exact + g, noise_level=float(rel),
                        delta=float(rel * rows.max()), exact=exact)


def compute_svd(ops, rank_tol=1e-12):
    U, lam, Vh = np.linalg.svd(ops.Tinf, full_matrices=True)
    rank = int(np.count_nonzero(lam > lam[0] * rank_tol)) if lam.size else 0
    return SvdData(lam=lam, U=U, V=Vh.conj().T, rank=rank)
