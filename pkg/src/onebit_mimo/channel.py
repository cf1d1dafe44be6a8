"""Synthetic low-rank narrowband MIMO channels on half-wavelength ULAs.

A channel is a sum of ``L`` plane-wave paths,

    H = c * sum_l g_l a_rx(theta_l) a_tx(phi_l)^*,

scaled so that ``||H||_F = N``.
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .numerics import nuclear_norm

__all__ = [
    "ChannelRealization",
    "array_response",
    "generate_channel",
    "generate_channels",
    "channel_from_paths",
    "nuclear_norm",
    "beta_percentile",
    "save_channel_set",
    "load_channel_set",
]


@dataclass(frozen=True)
class ChannelRealization:
    H: np.ndarray
    aod: tuple
    aoa: tuple
    gains: tuple
    num_paths: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "num_paths", len(self.gains))

    @property
    def N(self):
        return self.H.shape[0]


def array_response(N, angle):
    """Unit-norm ULA steering vector, ``exp(j*pi*n*sin(angle)) / sqrt(N)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(N)
    return np.exp(1j * np.pi * n * np.sin(angle)) / np.sqrt(N)


def channel_from_paths(N, gains, aoa, aod):
    """Rebuild a normalized channel from its path metadata."""
    gains = np.asarray(gains, dtype=complex)
    H = np.zeros((N, N), dtype=complex)
    for g, th, ph in zip(gains, aoa, aod):
        H += g * np.outer(array_response(N, th), array_response(N, ph).conj())
    H *= N / np.linalg.norm(H)
    return ChannelRealization(
        H=H,
        aod=tuple(float(a) for a in aod),
        aoa=tuple(float(a) for a in aoa),
        gains=tuple(complex(g) for g in gains),
    )


def generate_channel(N, L, rng):
    """Draw one ``L``-path channel.

    Gains are circular complex normal with unit variance; angles of arrival
    and departure are independent and uniform on (-pi/2, pi/2).
    """
    if not 1 <= L <= N:
        raise ValueError(f"need 1 <= L <= N, got L={L}, N={N}")
    gains = (rng.standard_normal(L) + 1j * rng.standard_normal(L)) / np.sqrt(2.0)
    aoa = rng.uniform(-np.pi / 2, np.pi / 2, size=L)
    aod = rng.uniform(-np.pi / 2, np.pi / 2, size=L)
    return channel_from_paths(N, gains, aoa, aod)


def generate_channels(N, L, count, seed):
    """``count`` channels, each from its own stream spawned off ``seed``."""
    streams = np.random.SeedSequence(seed).spawn(count)
    return [generate_channel(N, L, np.random.default_rng(s)) for s in streams]


def beta_percentile(channels, q=90.0):
    """``q``-th percentile of the channels' nuclear norms."""
    return float(np.percentile([nuclear_norm(c.H) for c in channels], q))


def save_channel_set(path, channels, N, L, seed):
    doc = {
        "N": int(N),
        "L": int(L),
        "seed": seed,
        "channels": [
            {
                "gains": [[g.real, g.imag] for g in c.gains],
                "aoa": list(c.aoa),
                "aod": list(c.aod),
            }
            for c in channels
        ],
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(doc, f, indent=1)


def load_channel_set(path):
    """Returns ``(channels, meta)`` where meta holds N, L and seed."""
    with open(path, encoding="utf-8") as f:
        doc = json.load(f)
    N = doc["N"]
    channels = [
        channel_from_paths(
            N, [complex(re, im) for re, im in c["gains"]], c["aoa"], c["aod"]
        )
        for c in doc["channels"]
    ]
    return channels, {"N": N, "L": doc["L"], "seed": doc.get("seed")}
