"""Unitary training blocks and pilot schedules.

A schedule lists which columns of the training block are transmitted and
with which phase offset. Three regimes are covered:

* ``Np < N``: a random subset of columns, no offset;
* ``Np = N``: every column once;
* ``Np = B*N``: every column at each of ``B`` offsets ``pi*b/(2B)``.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DFT",
    "ZC",
    "TrainingBlock",
    "PilotSchedule",
    "dft_training",
    "zc_training",
    "make_training",
    "offset_angles",
    "schedule_full",
    "schedule_subsample",
    "schedule_offsets",
    "schedule_for_pilots",
]

DFT = "dft"
ZC = "zc"


@dataclass(frozen=True)
class TrainingBlock:
    S: np.ndarray
    kind: str
    zc_root: int | None = None

    @property
    def N(self):
        return self.S.shape[0]


@dataclass(frozen=True)
class PilotSchedule:
    """Ordered ``(column, offset_index)`` pairs plus the offset angles."""

    block: TrainingBlock
    columns: np.ndarray
    offset_index: np.ndarray
    offsets: np.ndarray

    @property
    def B(self):
        return len(self.offsets)

    @property
    def Np(self):
        return len(self.columns)

    @property
    def N(self):
        return self.block.N

    @property
    def entries(self):
        return list(zip(self.columns.tolist(), self.offset_index.tolist()))

    @property
    def thetas(self):
        """Phase offset of every entry, in schedule order."""
        return self.offsets[self.offset_index]

    def pilots(self):
        """The transmitted ``N x Np`` pilot block."""
        return self.block.S[:, self.columns] * np.exp(1j * self.thetas)

    def to_dict(self):
        return {
            "kind": self.block.kind,
            "zc_root": self.block.zc_root,
            "N": self.N,
            "B": self.B,
            "entries": [list(e) for e in self.entries],
        }

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc):
        block = make_training(doc["kind"], doc["N"], doc.get("zc_root") or 1)
        entries = np.asarray(doc["entries"], dtype=int).reshape(-1, 2)
        return cls(block, entries[:, 0], entries[:, 1], offset_angles(doc["B"]))


def dft_training(N):
    """Unitary DFT matrix ``exp(-2j*pi*k*l/N) / sqrt(N)``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    k = np.arange(N)
    S = np.exp(-2j * np.pi * np.outer(k, k) / N) / np.sqrt(N)
    return TrainingBlock(S, DFT)


def zc_sequence(N, root=1):
    n = np.arange(N)
    if N % 2 == 0:
        phase = root * n * n
    else:
        phase = root * n * (n + 1)
    # reduce mod 2N before scaling to keep the phase argument small
    return np.exp(-1j * np.pi * (phase % (2 * N)) / N) / np.sqrt(N)


def zc_training(N, root=1):
    """Circulant block whose column ``k`` is the unit-norm Zadoff-Chu
    sequence rotated down by ``k`` positions."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if math.gcd(root, N) != 1:
        raise ValueError(f"ZC root {root} is not coprime to N={N}")
    z = zc_sequence(N, root)
    S = np.stack([np.roll(z, k) for k in range(N)], axis=1)
    return TrainingBlock(S, ZC, zc_root=root)


def make_training(kind, N, zc_root=1):
    if kind == DFT:
        return dft_training(N)
    if kind == ZC:
        return zc_training(N, zc_root)
    raise ValueError(f"unknown training kind {kind!r}")


def offset_angles(B):
    if B < 1:
        raise ValueError("B must be >= 1")
    return np.pi * np.arange(B) / (2 * B)


def schedule_full(block):
    N = block.N
    return PilotSchedule(block, np.arange(N), np.zeros(N, dtype=int), offset_angles(1))


def schedule_subsample(block, Np, rng):
    """``Np`` distinct columns drawn uniformly without replacement.

    Columns keep the order in which they were drawn.
    """
    if not 1 <= Np < block.N:
        raise ValueError(f"need 1 <= Np < N, got Np={Np}, N={block.N}")
    cols = rng.choice(block.N, size=Np, replace=False)
    return PilotSchedule(block, cols, np.zeros(Np, dtype=int), offset_angles(1))


def schedule_offsets(block, B):
    """All columns at offset 0, then all columns at offset 1, and so on."""
    N = block.N
    offsets = offset_angles(B)
    cols = np.tile(np.arange(N), B)
    idx = np.repeat(np.arange(B), N)
    return PilotSchedule(block, cols, idx, offsets)


def schedule_for_pilots(block, Np, rng=None):
    """Pick the regime from the pilot count."""
    N = block.N
    if Np < N:
        if rng is None:
            raise ValueError("a generator is required when Np < N")
        return schedule_subsample(block, Np, rng)
    if Np % N:
        raise ValueError(f"Np={Np} > N={N} must be a multiple of N")
    return schedule_offsets(block, Np // N)
