"""Dense complex linear algebra and Gaussian CDF primitives.

Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``; use
:func:`as_cmat` at API boundaries to validate shape and finiteness.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

__all__ = [
    "NumericsError",
    "SvdFactors",
    "as_cmat",
    "std_normal_cdf",
    "log_std_normal_cdf",
    "std_normal_logpdf",
    "inverse_mills",
    "svd",
    "top_singular_pair",
    "project_simplex",
    "project_nuclear_ball",
    "nuclear_norm",
]

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_MILLS_SWITCH = -10.0


class NumericsError(RuntimeError):
    """Raised when a decomposition fails or an input is degenerate."""


def as_cmat(A, name="matrix"):
    """Return ``A`` as a finite 2-D complex128 array, or raise ValueError."""
    M = np.asarray(A, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] < 1 or M.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD ``A = left @ diag(singular_values) @ right.conj().T``."""

    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray

    def reconstruct(self):
        return (self.left * self.singular_values) @ self.right.conj().T


def std_normal_cdf(x):
    """Standard normal CDF, elementwise."""
    return special.ndtr(x)


def log_std_normal_cdf(x):
    """Logarithm of the standard normal CDF, accurate far into the left tail.

    Backed by ``scipy.special.log_ndtr``, which evaluates through ``erfc`` and
    switches to an asymptotic series in the far left tail where ``Phi``
    underflows. Finite down to x = -1e150 or so.
    """
    return special.log_ndtr(x)


def std_normal_logpdf(x):
    x = np.asarray(x, dtype=float)
    return -0.5 * x * x - _LOG_SQRT_2PI


def _mills_ratio_cf(x, terms=60):
    """``(1 - Phi(x)) / phi(x)`` for large positive ``x`` by Laplace's
    continued fraction, evaluated bottom-up."""
    acc = np.zeros_like(x)
    for k in range(terms, 0, -1):
        acc = k / (x + acc)
    return 1.0 / (x + acc)


def inverse_mills(t):
    """Inverse Mills ratio ``phi(t) / Phi(t)``.

    Evaluated in log space for ``t >= -10``; below that a continued fraction
    avoids the cancellation between two huge logs. Approaches
    ``|t| + 1/|t|`` as ``t -> -inf``.
    """
    t = np.asarray(t, dtype=float)
    out = np.empty_like(t)
    tail = t < _MILLS_SWITCH
    head = ~tail
    out[head] = np.exp(std_normal_logpdf(t[head]) - special.log_ndtr(t[head]))
    out[tail] = 1.0 / _mills_ratio_cf(-t[tail])
    return out if out.ndim else float(out)


def svd(A):
    """Thin SVD of a complex matrix with singular values sorted descending.

    Raises
    ------
    NumericsError
        If LAPACK fails to converge.
    """
    A = as_cmat(A)
    try:
        U, d, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericsError(f"SVD did not converge: {exc}") from exc
    return SvdFactors(U, d, Vh.conj().T)


def nuclear_norm(A):
    """Sum of singular values."""
    return float(np.sum(np.linalg.svd(as_cmat(A), compute_uv=False)))


def _random_unit(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def top_singular_pair(A, tol=1e-10, max_iter=1000, rng=None, return_info=False):
    """Leading singular triplet of ``A`` by alternating power iteration.

    Each sweep costs two matrix-vector products. The start vector is drawn
    from ``rng`` (seed 0 when omitted) and redrawn once if the first attempt
    stalls without meeting ``tol``.

    Parameters
    ----------
    A : array_like
        Complex matrix, not identically zero.
    tol : float
        Relative change of the singular value estimate between sweeps at
        which the iteration stops.
    max_iter : int
        Cap on power sweeps per attempt.
    rng : numpy.random.Generator, optional
    return_info : bool
        Also return ``(achieved_rel_change, converged)``.

    Returns
    -------
    u, s, v
        Unit vectors and singular value with ``A @ v ~= s * u``.
    """
    A = as_cmat(A)
    if not np.any(A):
        raise NumericsError("power iteration on a zero matrix")
    if rng is None:
        rng = np.random.default_rng(0)
    AH = A.conj().T
    best = None
    for _attempt in range(2):
        v = _random_unit(rng, A.shape[1])
        s, change, converged = 0.0, np.inf, False
        for _ in range(max_iter):
            u = A @ v
            nu = np.linalg.norm(u)
            if nu == 0.0:
                break
            w = AH @ (u / nu)
            s_new = float(np.linalg.norm(w))
            v = w / s_new
            change = abs(s_new - s) / s_new
            s = s_new
            if change <= tol:
                converged = True
                break
        if s > 0.0 and (best is None or s > best[1]):
            u = A @ v
            best = (u / np.linalg.norm(u), s, v, change, converged)
        if converged:
            break
    if best is None:
        raise NumericsError("power iteration failed to find a nonzero direction")
    u, s, v, change, converged = best
    if return_info:
        return u, s, v, (change, converged)
    return u, s, v


def project_simplex(d, beta):
    """Euclidean projection of ``d`` onto ``{p : sum(p) = beta, p >= 0}``.

    Sort-based exact threshold search.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    d = np.asarray(d, dtype=float)
    mu = np.sort(d)[::-1]
    cssv = np.cumsum(mu) - beta
    ind = np.arange(1, d.size + 1)
    rho = np.nonzero(mu - cssv / ind > 0)[0][-1]
    tau = cssv[rho] / (rho + 1.0)
    return np.maximum(d - tau, 0.0)


def project_nuclear_ball(Z, beta, mode="ball"):
    """Project ``Z`` onto the nuclear-norm ball of radius ``beta``.

    With ``mode="sphere"`` the singular values are always projected onto the
    equality simplex ``sum(d) = beta``, so interior points are pushed out to
    the boundary.
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if mode not in ("ball", "sphere"):
        raise ValueError(f"unknown projection mode {mode!r}")
    Z = as_cmat(Z)
    f = svd(Z)
    if mode == "ball" and np.sum(f.singular_values) <= beta:
        return Z.copy()
    p = project_simplex(f.singular_values, beta)
    return (f.left * p) @ f.right.conj().T
