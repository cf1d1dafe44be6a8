"""Probit log-likelihood of the pseudo-channel and its gradient.

For a schedule entry with column ``k`` and phase offset ``theta`` the
receiver sees ``Q1(x e^{j theta} + v)`` for every row entry ``x = X[l, k]``.
Writing ``u + j w = x e^{j theta}``, the log-likelihood contribution is

    log Phi(y_R u / sigma) + log Phi(y_I w / sigma),

which at ``theta = 0`` is the familiar per-component probit likelihood.
The gradient is taken with respect to the real and imaginary parts of each
entry and packed as ``dL/dRe + j dL/dIm``.
"""

from dataclasses import dataclass

import numpy as np

from .measurement import MeasurementSet
from .numerics import inverse_mills, log_std_normal_cdf

__all__ = [
    "DEFAULT_SIGMA_CLIP",
    "LikelihoodContext",
    "log_likelihood",
    "gradient",
    "log_likelihood_and_gradient",
    "baseline_gradient_in_H",
]

DEFAULT_SIGMA_CLIP = 0.5


@dataclass(frozen=True)
class LikelihoodContext:
    measurements: MeasurementSet
    sigma_likel: float

    def __post_init__(self):
        if not self.sigma_likel > 0:
            raise ValueError("sigma_likel must be positive")

    @classmethod
    def from_measurements(cls, measurements, sigma_clip=DEFAULT_SIGMA_CLIP):
        """Standard constructor: ``sigma_likel = max(sigma_clip, sigma)``.

        The clip only affects the likelihood; the data were generated with
        the true ``sigma``.
        """
        return cls(measurements, max(sigma_clip, measurements.sigma))

    @property
    def N(self):
        return self.measurements.schedule.N

    @property
    def schedule(self):
        return self.measurements.schedule


def _check(X, ctx):
    X = np.asarray(X, dtype=complex)
    N = ctx.N
    if X.shape != (N, N):
        raise ValueError(f"X has shape {X.shape}, expected {(N, N)}")
    return X


def _scaled_margins(X, ctx):
    sched = ctx.schedule
    rot = np.exp(1j * sched.thetas)
    Z = X[:, sched.columns] * rot
    m = ctx.measurements
    s = ctx.sigma_likel
    return m.bits_real * Z.real / s, m.bits_imag * Z.imag / s, rot


def log_likelihood(X, ctx):
    """Total log-likelihood of candidate pseudo-channel ``X``."""
    X = _check(X, ctx)
    a, b, _ = _scaled_margins(X, ctx)
    return float(np.sum(log_std_normal_cdf(a)) + np.sum(log_std_normal_cdf(b)))


def _gradient_from_margins(a, b, rot, ctx):
    m = ctx.measurements
    s = ctx.sigma_likel
    P = (m.bits_real * inverse_mills(a) + 1j * m.bits_imag * inverse_mills(b)) / s
    P *= rot.conj()
    # scatter-add each entry's contribution into its column of X
    N = ctx.N
    cols = ctx.schedule.columns
    flat = (np.arange(N)[:, None] * N + cols[None, :]).ravel()
    gr = np.bincount(flat, weights=P.real.ravel(), minlength=N * N)
    gi = np.bincount(flat, weights=P.imag.ravel(), minlength=N * N)
    return (gr + 1j * gi).reshape(N, N)


def gradient(X, ctx):
    """Gradient of :func:`log_likelihood`; unobserved columns are zero."""
    X = _check(X, ctx)
    a, b, rot = _scaled_margins(X, ctx)
    return _gradient_from_margins(a, b, rot, ctx)


def log_likelihood_and_gradient(X, ctx):
    X = _check(X, ctx)
    a, b, rot = _scaled_margins(X, ctx)
    L = float(np.sum(log_std_normal_cdf(a)) + np.sum(log_std_normal_cdf(b)))
    return L, _gradient_from_margins(a, b, rot, ctx)


def baseline_gradient_in_H(W, S, ctx):
    """Gradient of ``W -> log_likelihood(W S)``, i.e. ``grad(W S) S^*``."""
    W = np.asarray(W, dtype=complex)
    S = np.asarray(S, dtype=complex)
    if W.shape != S.shape or W.shape[0] != W.shape[1]:
        raise ValueError(f"W {W.shape} and S {S.shape} must be equal square shapes")
    return gradient(W @ S, ctx) @ S.conj().T
