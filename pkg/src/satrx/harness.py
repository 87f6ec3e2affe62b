"""Monte-Carlo BER engine: SNR sweeps over matched detector experiments.

Every detector at a given (SNR, trial) sees the same transmitted symbols and
the same noise vector (common random numbers), so BER differences between
detectors are paired comparisons rather than independent estimates.

Determinism contract: symbol and noise draws depend only on
``(master_seed, snr, chunk index)`` and the per-trial search generators only
on ``(master_seed, snr, trial index)`` — never on the detector list, the
worker count, or wall-clock state.  Trials are processed in fixed chunks of
2048, merged in rounds of eight chunks; the early-stop rule is evaluated
only at round boundaries.  Two runs of the same plan therefore produce
byte-identical CSV output for any worker count.
"""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .constellation import make_constellation
from .detection import LgsdConfig, OpCounter, jml_batch, lgsd_batch
from .preprocessing import build_mrc, build_wiener_hopf
from .scenario import (NoiseModel, Scenario, build_channel, draw_noise,
                       sigma2_for_snr)

__all__ = [
    "DetectorSpec",
    "ExperimentPlan",
    "BerRecord",
    "default_label",
    "wilson_interval",
    "run_point",
    "run_sweep",
    "records_to_csv",
    "write_csv",
]

CHUNK_TRIALS = 2048
CHUNKS_PER_ROUND = 8

_ALGORITHMS = ("jml", "lgsd")
_PREPROCESSORS = ("mrc", "wiener-hopf")


@dataclass(frozen=True)
class DetectorSpec:
    """One detector: an algorithm plus the linear preprocessor feeding it."""

    algorithm: str
    preprocessor: str = "wiener-hopf"
    config: LgsdConfig | None = None
    label: str | None = None

    def __post_init__(self):
        if self.algorithm not in _ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.preprocessor not in _PREPROCESSORS:
            raise ValueError(f"unknown preprocessor {self.preprocessor!r}")
        if self.algorithm == "lgsd" and self.config is None:
            raise ValueError("lgsd detectors need an LgsdConfig")
        if self.label is None:
            object.__setattr__(self, "label", default_label(self))


def default_label(spec: DetectorSpec) -> str:
    """Canonical curve label, e.g. JML, Enhanced-LGSD(2/3/2), LGSD(2/3/2)/MRC."""
    if spec.algorithm == "jml":
        return "JML" if spec.preprocessor == "wiener-hopf" else "JML/MRC"
    c = spec.config
    iters = f"({c.overall_iters}/{c.ble_iters}/{c.glo_iters})"
    if spec.preprocessor == "wiener-hopf":
        return f"Enhanced-LGSD{iters}"
    return f"LGSD{iters}/MRC"


@dataclass(frozen=True)
class ExperimentPlan:
    """A full sweep: scenario, alphabet, detectors, SNR grid, stop targets.

    ``min_symbols`` is a floor (in transmitted satellite symbols, N per
    trial) under which no point may stop; beyond it a point ends once every
    detector has at least ``max_bit_errors`` central-satellite bit errors or
    ``max_symbols`` is reached, whichever comes first.
    """

    scenario: Scenario
    constellation: str
    detectors: tuple
    snr_points: tuple
    min_symbols: int = 10_000
    max_bit_errors: int = 100
    max_symbols: int = 10_000_000
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "detectors", tuple(self.detectors))
        object.__setattr__(
            self, "snr_points", tuple(float(s) for s in self.snr_points))
        if not self.snr_points:
            raise ValueError("snr_points must be nonempty")
        if not self.detectors:
            raise ValueError("detector list must be nonempty")
        for d in self.detectors:
            if not isinstance(d, DetectorSpec):
                raise TypeError("detectors must be DetectorSpec instances")
        if self.min_symbols < 1_000:
            raise ValueError("min_symbols must be at least 1000")
        if self.max_symbols < self.min_symbols:
            raise ValueError("max_symbols must be >= min_symbols")
        if self.max_bit_errors < 1:
            raise ValueError("max_bit_errors must be positive")
        if not (0 <= int(self.master_seed) < 2 ** 63):
            raise ValueError("master_seed must be a non-negative integer")
        labels = [d.label for d in self.detectors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate detector labels: {labels}")


@dataclass(frozen=True)
class BerRecord:
    """Per-(detector, SNR, satellite) error statistics."""

    detector: str
    snr_db: float
    satellite: int
    bits_sent: int
    bit_errors: int
    ber: float
    ci95: tuple
    mean_squarings: float

    def __post_init__(self):
        if not (0 <= self.bit_errors <= self.bits_sent):
            raise ValueError("bit_errors must lie in [0, bits_sent]")
        if not (self.ci95[0] <= self.ber <= self.ci95[1]):
            raise ValueError("ci95 must contain the point estimate")


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion (95% by default)."""
    if trials < 1:
        raise ValueError("trials must be positive")
    if not 0 <= successes <= trials:
        raise ValueError("successes must lie in [0, trials]")
    k, n = float(successes), float(trials)
    center = (k + z * z / 2.0) / (n + z * z)
    half = z * math.sqrt(k * (n - k) / n + z * z / 4.0) / (n + z * z)
    return (center - half, center + half)


def _snr_key(snr_db: float) -> int:
    return int(round(snr_db * 1000.0)) % (2 ** 32)


def _chunk_counts(plan: ExperimentPlan, snr_db: float, chunk_idx: int,
                  chunk_trials: int):
    """Detect one chunk of trials for every detector.

    Returns (trials, errors[D, N], squarings[D]).  Pure function of its
    arguments — the worker-pool unit of work.
    """
    const = make_constellation(plan.constellation)
    ham = const.hamming_table()
    a = build_channel(plan.scenario)
    n_sats = a.shape[1]
    sigma2 = sigma2_for_snr(a, snr_db)
    powers = (np.abs(a) ** 2).sum(axis=0)
    key = _snr_key(snr_db)
    seed = int(plan.master_seed)

    rng = np.random.default_rng(np.random.SeedSequence([seed, key, 0, chunk_idx]))
    s = rng.integers(0, const.size, size=(chunk_trials, n_sats))
    noise = draw_noise(NoiseModel(sigma2, plan.scenario.noise_correlation),
                       rng, chunk_trials)
    r = const.points[s] @ a.T + noise

    first_trial = chunk_idx * chunk_trials
    # one seed sequence per trial, shared by all detectors so each sees the
    # same randomized group allocations (part of the pairing)
    trial_seqs = [np.random.SeedSequence([seed, key, 1, first_trial + t])
                  for t in range(chunk_trials)]
    errors = np.zeros((len(plan.detectors), n_sats), dtype=np.int64)
    squarings = np.zeros(len(plan.detectors), dtype=np.int64)
    for d_idx, spec in enumerate(plan.detectors):
        if spec.preprocessor == "mrc":
            pre = build_mrc(a)
        else:
            pre = build_wiener_hopf(a, sigma2, plan.scenario.noise_correlation)
        y = pre.transform(r)
        cnt = OpCounter()
        if spec.algorithm == "jml":
            digits, _ = jml_batch(y, pre.h_, const, counter=cnt)
        else:
            rngs = [np.random.default_rng(sq) for sq in trial_seqs]
            digits, _ = lgsd_batch(y, pre.h_, const, spec.config,
                                   satellite_powers=powers, rngs=rngs,
                                   counter=cnt)
        errors[d_idx] += ham[digits, s].sum(axis=0)
        squarings[d_idx] = cnt.squarings
    return chunk_trials, errors, squarings


def run_point(plan: ExperimentPlan, snr_db: float, workers: int = 1, *,
              chunk_trials: int = CHUNK_TRIALS,
              chunks_per_round: int = CHUNKS_PER_ROUND):
    """Simulate one SNR point; returns BerRecord per (detector, satellite).

    All detectors see identical symbol/noise streams; the point stops at a
    round boundary once ``min_symbols`` is reached and either every detector
    holds ``max_bit_errors`` central-satellite errors or ``max_symbols`` is
    hit.  The chunk geometry is part of the determinism contract: two runs
    produce identical records whenever plan, chunk sizes and seed agree,
    regardless of ``workers``.
    """
    if chunk_trials < 1 or chunks_per_round < 1:
        raise ValueError("chunk geometry must be positive")
    const = make_constellation(plan.constellation)
    n_sats = plan.scenario.num_satellites
    n_det = len(plan.detectors)
    for spec in plan.detectors:
        if spec.algorithm == "lgsd" and sum(spec.config.group_sizes) != n_sats:
            raise ValueError(
                f"detector {spec.label!r}: group sizes {spec.config.group_sizes} "
                f"do not sum to {n_sats} satellites")

    errors = np.zeros((n_det, n_sats), dtype=np.int64)
    squarings = np.zeros(n_det, dtype=np.int64)
    trials_done = 0
    next_chunk = 0

    def _stopped() -> bool:
        symbols = trials_done * n_sats
        if symbols < plan.min_symbols:
            return False
        if symbols >= plan.max_symbols:
            return True
        return bool(errors[:, 0].min() >= plan.max_bit_errors)

    def _consume(results) -> None:
        nonlocal trials_done
        for t_done, err, sqr in results:
            trials_done += t_done
            np.add(errors, err, out=errors)
            np.add(squarings, sqr, out=squarings)

    if workers <= 1:
        while not _stopped():
            batch = [(plan, snr_db, next_chunk + i, chunk_trials)
                     for i in range(chunks_per_round)]
            next_chunk += chunks_per_round
            _consume(_chunk_counts(*args) for args in batch)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            while not _stopped():
                futures = [
                    pool.submit(_chunk_counts, plan, snr_db, next_chunk + i,
                                chunk_trials)
                    for i in range(chunks_per_round)
                ]
                next_chunk += chunks_per_round
                _consume(f.result() for f in futures)

    bits = trials_done * const.bits_per_symbol
    records = []
    for d_idx, spec in enumerate(plan.detectors):
        for sat in range(n_sats):
            k = int(errors[d_idx, sat])
            records.append(BerRecord(
                detector=spec.label, snr_db=float(snr_db), satellite=sat,
                bits_sent=bits, bit_errors=k, ber=k / bits,
                ci95=wilson_interval(k, bits),
                mean_squarings=float(squarings[d_idx]) / trials_done))
    return records


def run_sweep(plan: ExperimentPlan, workers: int = 1, *,
              chunk_trials: int = CHUNK_TRIALS,
              chunks_per_round: int = CHUNKS_PER_ROUND):
    """Run every SNR point; rows ordered by (detector, snr_db, satellite)."""
    records = []
    for snr_db in plan.snr_points:
        records.extend(run_point(plan, snr_db, workers=workers,
                                 chunk_trials=chunk_trials,
                                 chunks_per_round=chunks_per_round))
    records.sort(key=lambda rec: (rec.detector, rec.snr_db, rec.satellite))
    return records


def records_to_csv(records) -> str:
    """Render records as CSV text (stable float formatting via repr)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["detector", "snr_db", "satellite", "bits", "errors",
                     "ber", "ci_lo", "ci_hi", "mean_squarings"])
    for rec in records:
        writer.writerow([
            rec.detector, repr(rec.snr_db), rec.satellite, rec.bits_sent,
            rec.bit_errors, repr(rec.ber), repr(rec.ci95[0]),
            repr(rec.ci95[1]), repr(rec.mean_squarings),
        ])
    return buf.getvalue()


def write_csv(records, path) -> None:
    """Write the records CSV atomically (temp file + rename)."""
    text = records_to_csv(records)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
