"""Evaluation metrics."""

import warnings

import numpy as np

__all__ = ["NMSE_FLOOR_DB", "nmse", "nmse_details", "peak_to_average_ratio"]

NMSE_FLOOR_DB = -300.0


def nmse_details(H, H_hat, complex_scale=True):
    """Scale-compensated NMSE.

    Returns ``(nmse_db, kappa, degenerate)`` where ``kappa`` minimizes
    ``||H - kappa H_hat||_F`` over complex (or, with ``complex_scale=False``,
    real) scalars and ``degenerate`` is set when ``H_hat`` is zero.
    """
    H = np.asarray(H, dtype=complex)
    H_hat = np.asarray(H_hat, dtype=complex)
    if H.shape != H_hat.shape:
        raise ValueError(f"shape mismatch {H.shape} vs {H_hat.shape}")
    energy = np.vdot(H_hat, H_hat).real
    if energy == 0.0:
        return 0.0, 0.0, True
    kappa = np.vdot(H_hat, H) / energy
    if not complex_scale:
        kappa = kappa.real
    err = np.linalg.norm(H - kappa * H_hat) ** 2 / np.linalg.norm(H) ** 2
    if err <= 10.0 ** (NMSE_FLOOR_DB / 10.0):
        return NMSE_FLOOR_DB, kappa, False
    return float(10.0 * np.log10(err)), kappa, False


def nmse(H, H_hat, complex_scale=True):
    """NMSE in dB, floored at ``NMSE_FLOOR_DB``; 0 dB for a zero estimate."""
    db, _, degenerate = nmse_details(H, H_hat, complex_scale)
    if degenerate:
        warnings.warn("zero channel estimate; NMSE reported as 0 dB", RuntimeWarning)
    return db


def peak_to_average_ratio(G):
    """``20 log10(max|G| / mean|G|)`` over all entries."""
    mag = np.abs(np.asarray(G))
    mean = mag.mean()
    if mean == 0.0:
        raise ValueError("peak-to-average ratio of a zero matrix")
    return float(20.0 * np.log10(mag.max() / mean))
