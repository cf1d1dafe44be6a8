"""Seeded Monte-Carlo experiment runner.

Every cell ``(channel, snr, pilots, training, algorithm)`` gets its own seed
derived from the master seed, so the record set is a pure function of the
:class:`ExperimentSpec` and any cell can be reproduced in isolation.
"""

import csv
import hashlib
import io
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .channel import beta_percentile, generate_channels
from .estimators import ESTIMATORS, EstimatorConfig
from .likelihood import DEFAULT_SIGMA_CLIP, LikelihoodContext
from .measurement import simulate, snr_to_sigma
from .metrics import nmse, peak_to_average_ratio
from .training import make_training, schedule_for_pilots

log = logging.getLogger(__name__)

__all__ = [
    "CSV_COLUMNS",
    "ExperimentSpec",
    "ResultRecord",
    "cell_seed",
    "run_experiment",
    "records_to_csv",
    "records_to_json",
    "par_report",
    "median_by",
]

CSV_COLUMNS = [
    "channel_id",
    "algorithm",
    "training",
    "snr_db",
    "np",
    "nmse_db",
    "iterations",
    "wall_time_ms",
    "seed",
]

PERCENTILE_90 = "percentile90"
FIXED = "fixed"


@dataclass
class ExperimentSpec:
    N: int = 16
    L: int = 3
    num_channels: int = 100
    snr_db_grid: list = field(default_factory=lambda: [0.0])
    pilot_grid: list = field(default_factory=lambda: [64])
    training_kinds: list = field(default_factory=lambda: ["zc"])
    algorithms: list = field(default_factory=lambda: ["pga", "fw"])
    beta_mode: str = PERCENTILE_90
    beta_value: float = 20.1
    master_seed: int = 0
    config: EstimatorConfig = field(default_factory=EstimatorConfig)
    sigma_clip: float = DEFAULT_SIGMA_CLIP
    complex_kappa: bool = True
    record_timing: bool = False
    zc_root: int = 1
    channels: list | None = None

    def __post_init__(self):
        for name in ("snr_db_grid", "pilot_grid", "training_kinds", "algorithms"):
            if not getattr(self, name):
                raise ValueError(f"{name} must be non-empty")
        for Np in self.pilot_grid:
            if Np < 1 or (Np > self.N and Np % self.N):
                raise ValueError(f"pilot count {Np} invalid for N={self.N}")
        for a in self.algorithms:
            if a not in ESTIMATORS:
                raise ValueError(f"unknown algorithm {a!r}")
        if self.beta_mode not in (PERCENTILE_90, FIXED):
            raise ValueError(f"unknown beta_mode {self.beta_mode!r}")
        if self.channels is not None:
            self.num_channels = len(self.channels)


@dataclass
class ResultRecord:
    channel_id: int
    algorithm: str
    training: str
    snr_db: float
    np: int
    nmse_db: float
    iterations: int
    wall_time_ms: float
    seed: int
    error: str | None = None

    def sort_key(self):
        return (self.channel_id, self.training, self.snr_db, self.np, self.algorithm)


def cell_seed(master_seed, channel_id, snr_index, np_index, training, algorithm):
    """Stable 63-bit seed for one experiment cell."""
    key = f"{master_seed}|{channel_id}|{snr_index}|{np_index}|{training}|{algorithm}"
    digest = hashlib.blake2b(key.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") >> 1


def _channels(spec):
    if spec.channels is not None:
        return spec.channels
    return generate_channels(spec.N, spec.L, spec.num_channels, spec.master_seed)


def _run_cell(task):
    cid, H, snr_db, Np, kind, algo, seed, cfg, spec_bits = task
    sigma_clip, complex_kappa, zc_root, record_timing = spec_bits
    rec = ResultRecord(cid, algo, kind, float(snr_db), int(Np), float("nan"), 0, 0.0, seed)
    try:
        rng = np.random.default_rng(seed)
        block = make_training(kind, H.shape[0], zc_root)
        schedule = schedule_for_pilots(block, Np, rng)
        ms = simulate(H, schedule, snr_to_sigma(snr_db), rng)
        ctx = LikelihoodContext.from_measurements(ms, sigma_clip)
        t0 = time.perf_counter()
        result = ESTIMATORS[algo](ctx, block, cfg)
        elapsed = time.perf_counter() - t0
        rec.nmse_db = nmse(H, result.H_hat, complex_kappa)
        rec.iterations = result.iterations
        if record_timing:
            rec.wall_time_ms = 1e3 * elapsed
        if not np.isfinite(rec.nmse_db):
            raise FloatingPointError("non-finite NMSE")
    except Exception as exc:  # recorded per cell; the sweep keeps going
        log.warning("cell %s failed: %r", (cid, algo, kind, snr_db, Np), exc)
        rec.error = f"{type(exc).__name__}: {exc}"
    return rec


def run_experiment(spec, jobs=1):
    """Run every cell of ``spec``; returns records in canonical order."""
    channels = _channels(spec)
    if spec.beta_mode == PERCENTILE_90:
        beta = beta_percentile(channels, 90.0)
    else:
        beta = spec.beta_value
    cfg = spec.config.with_overrides(beta=beta)
    log.info("beta = %.4f over %d channels", beta, len(channels))
    spec_bits = (spec.sigma_clip, spec.complex_kappa, spec.zc_root, spec.record_timing)
    tasks = []
    for cid, ch in enumerate(channels):
        for si, snr in enumerate(spec.snr_db_grid):
            for pi, Np in enumerate(spec.pilot_grid):
                for kind in spec.training_kinds:
                    for algo in spec.algorithms:
                        seed = cell_seed(spec.master_seed, cid, si, pi, kind, algo)
                        tasks.append((cid, ch.H, snr, Np, kind, algo, seed, cfg, spec_bits))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_cell, tasks, chunksize=8))
    else:
        records = [_run_cell(t) for t in tasks]
    records.sort(key=ResultRecord.sort_key)
    return records


def _fmt(x):
    return repr(float(x))


def records_to_csv(records):
    """CSV text with a header row and LF line endings.

    Failed cells carry ``error:<ExceptionType>`` in the ``nmse_db`` column.
    """
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        nmse_field = f"error:{r.error.split(':')[0]}" if r.error else _fmt(r.nmse_db)
        w.writerow([
            r.channel_id, r.algorithm, r.training, _fmt(r.snr_db), r.np,
            nmse_field, r.iterations, f"{r.wall_time_ms:.3f}", r.seed,
        ])
    return buf.getvalue()


def records_to_json(records):
    rows = []
    for r in records:
        d = asdict(r)
        if r.error:
            d["nmse_db"] = None
        rows.append(d)
    return json.dumps(rows, indent=1) + "\n"


def par_report(channels, N, zc_root=1, kinds=("zc", "dft")):
    """Per-channel peak-to-average ratio of ``G = H S`` for each training."""
    blocks = {k: make_training(k, N, zc_root) for k in kinds}
    rows = []
    for cid, ch in enumerate(channels):
        for k, blk in blocks.items():
            rows.append((cid, k, peak_to_average_ratio(ch.H @ blk.S)))
    return rows


def median_by(records, *keys):
    """Median NMSE grouped by record attributes, skipping failed cells."""
    groups = {}
    for r in records:
        if r.error is None:
            groups.setdefault(tuple(getattr(r, k) for k in keys), []).append(r.nmse_db)
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}
