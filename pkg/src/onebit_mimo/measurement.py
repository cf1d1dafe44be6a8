"""One-bit receiver simulation."""

import base64
import json
from dataclasses import dataclass

import numpy as np

from .numerics import as_cmat
from .training import PilotSchedule

__all__ = [
    "MeasurementSet",
    "quantize_one_bit",
    "simulate",
    "snr_to_sigma",
]


def _sign(a):
    # sign(0) = +1
    return np.where(a >= 0, 1, -1).astype(np.int8)


def quantize_one_bit(A):
    """Elementwise ``sign(Re A) + j sign(Im A)`` with ``sign(0) = +1``."""
    A = np.asarray(A, dtype=complex)
    return _sign(A.real) + 1j * _sign(A.imag)


def snr_to_sigma(snr_db):
    """Per-component noise std for ``SNR = 10 log10(1 / sigma^2)``."""
    return 10.0 ** (-snr_db / 20.0)


@dataclass(frozen=True)
class MeasurementSet:
    """One-bit observations; column ``j`` belongs to schedule entry ``j``.

    ``sigma`` is the per-component noise std used to generate the data, so
    the complex noise variance is ``2 sigma^2``.
    """

    bits_real: np.ndarray
    bits_imag: np.ndarray
    schedule: PilotSchedule
    sigma: float
    seed: int | None = None

    def __post_init__(self):
        shape = (self.schedule.N, self.schedule.Np)
        for name in ("bits_real", "bits_imag"):
            b = getattr(self, name)
            if b.shape != shape:
                raise ValueError(f"{name} has shape {b.shape}, expected {shape}")
            if not np.all(np.abs(b) == 1):
                raise ValueError(f"{name} must contain only +1/-1")

    @property
    def Y(self):
        return self.bits_real + 1j * self.bits_imag

    def to_dict(self):
        """JSON-ready form; bits packed two per complex entry."""
        inter = np.stack([self.bits_real > 0, self.bits_imag > 0], axis=-1)
        packed = np.packbits(inter.ravel())
        return {
            "schedule": self.schedule.to_dict(),
            "sigma": self.sigma,
            "seed": self.seed,
            "shape": list(self.bits_real.shape),
            "bits": base64.b64encode(packed.tobytes()).decode("ascii"),
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc):
        rows, cols = doc["shape"]
        packed = np.frombuffer(base64.b64decode(doc["bits"]), dtype=np.uint8)
        flat = np.unpackbits(packed, count=2 * rows * cols).reshape(rows, cols, 2)
        bits = np.where(flat == 1, 1, -1).astype(np.int8)
        return cls(
            bits_real=bits[..., 0],
            bits_imag=bits[..., 1],
            schedule=PilotSchedule.from_dict(doc["schedule"]),
            sigma=doc["sigma"],
            seed=doc["seed"],
        )

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def simulate(H, schedule, sigma, rng=None):
    """Quantized observations of ``H s_k e^{j theta_b} + v`` per schedule entry.

    Parameters
    ----------
    H : array_like, N x N
    schedule : PilotSchedule
    sigma : float
        Per-component noise std.
    rng : int, numpy.random.Generator or None
        An integer is used as the seed and recorded on the result.

    Noise for all entries comes from a single stream, drawn in schedule order.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    H = as_cmat(H, "H")
    N = schedule.N
    if H.shape != (N, N):
        raise ValueError(f"H has shape {H.shape}, schedule expects {(N, N)}")
    seed = None
    if rng is None or isinstance(rng, (int, np.integer)):
        seed = None if rng is None else int(rng)
        rng = np.random.default_rng(rng)

    G = H @ schedule.block.S
    clean = G[:, schedule.columns] * np.exp(1j * schedule.thetas)
    noise = rng.standard_normal((schedule.Np, 2, N))
    V = (noise[:, 0, :] + 1j * noise[:, 1, :]).T * sigma
    R = clean + V
    return MeasurementSet(_sign(R.real), _sign(R.imag), schedule, float(sigma), seed)
