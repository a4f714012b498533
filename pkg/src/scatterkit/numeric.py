"""Primitive operations on complex vectors.

Inner product convention: ``inner(x, y) = sum(x * conj(y))``, linear in the
first argument and conjugate-linear in the second.  With this convention the
unconstrained minimiser of ``||E + s*A||**2`` over complex ``s`` is

    s = inner(E, -A) / ||A||**2,

since ``||E + s*A||**2 = ||E||**2 + 2*Re(conj(s) * inner(E, A)) + |s|**2 ||A||**2``
and completing the square in ``s`` gives ``|s + inner(E, A)/||A||**2|**2``.
The CSI/SOM step sizes are written in exactly this form, so every solver
module relies on this one definition.
"""

import numpy as np


class ContractError(ValueError):
    """An argument violated an operation's precondition."""


class ConfigurationError(ValueError):
    """A configuration value is out of its admissible range."""


def inner(x, y):
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ContractError(f"inner: shape mismatch {x.shape} vs {y.shape}")
    # np.vdot conjugates its *first* argument
    return complex(np.vdot(y, x))


def soft_threshold(a, tau):
    """Complex soft-threshold ``(|a| - tau)_+ * a / |a|``.

    Works elementwise on arrays; ``tau`` may broadcast against ``a``.
    Returns exactly 0 where ``|a| <= tau`` (including ``a == 0``).
    """
    a = np.asarray(a, dtype=complex)
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ContractError("soft_threshold: tau must be nonnegative")
    mag = np.abs(a)
    keep = mag > tau
    safe = np.where(keep, mag, 1.0)
    out = np.where(keep, (mag - tau) / safe * a, 0.0 + 0.0j)
    if out.ndim == 0:
        return complex(out)
    return out


def norms(x):
    """Return ``(l1, l2, linf)`` of a complex vector."""
    x = np.asarray(x)
    if x.size == 0:
        return 0.0, 0.0, 0.0
    mag = np.abs(x).ravel()
    linf = float(mag.max())
    # scale before squaring so tiny/huge entries neither underflow nor overflow
    l2 = linf * float(np.linalg.norm(mag / linf)) if linf > 0 else 0.0
    return float(mag.sum()), l2, linf


def l1(x):
    return float(np.abs(x).sum())


def mixed_norm_inf2(A):
    """Largest Euclidean row norm, ``max_i (sum_j |a_ij|^2)^(1/2)``."""
    A = np.atleast_2d(np.asarray(A))
    if A.size == 0:
        return 0.0
    return float(np.sqrt((np.abs(A) ** 2).sum(axis=1)).max())
