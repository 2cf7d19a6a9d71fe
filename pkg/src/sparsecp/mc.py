"""Direct determinant Monte Carlo over the sparse matrix ensemble.

A sample is an n x n matrix whose entries are independently w/sqrt(p)
with probability p/n and 0 otherwise, w a standard complex Gaussian.
For spectral arguments z_j = z0 + zeta_j/sqrt(n) the estimator of the
normalized two-point ratio is

    mean(D(z1) D(z2)) / sqrt(mean(D(z1)^2) mean(D(z2)^2)),
    D(z) = |det(X - z)|^2,

with the same matrix samples feeding numerator and denominators (the
common randomness cancels most of the variance).  All determinant work
happens in the log domain; D spans hundreds of orders of magnitude
already at n around 100, so the moments are reduced with running
log-sum-exp accumulators and only exponentiated at the end.

Confidence intervals come from a nonparametric bootstrap over the
per-sample log values; a delete-one-batch jackknife estimate serves as a
heavy-tail cross-check (a bootstrap interval that misses it flags the
run as unreliable).  Sampling is chunked, each chunk owning a generator
seeded by (seed, chunk index), and chunks are reduced in index order, so
results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "SparseMatrixSample",
    "MCEstimate",
    "RatioEstimate",
    "LogMoments",
    "sample_matrix",
    "log_absdet_sq",
    "estimate_f2",
    "estimate_ratio",
    "resolve_chunk_size",
]

BOOT_TAG = 0xB0075


@dataclass(frozen=True)
class SparseMatrixSample:
    n: int
    p: float
    entries: np.ndarray


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n_samples: int
    seed: int

    def __post_init__(self):
        if self.stderr < 0 or self.n_samples < 1:
            raise DomainError("MCEstimate needs stderr >= 0 and n_samples >= 1")


@dataclass(frozen=True)
class RatioEstimate:
    ratio: float
    stderr: float
    ci_low: float
    ci_high: float
    n_samples: int
    discarded: int
    seed: int
    jackknife: float
    reliable: bool


class LogMoments:
    """Running log-sum-exp accumulators for the three log moments."""

    KEYS = ("num", "d1", "d2")  # log D1 + log D2, 2 log D1, 2 log D2

    def __init__(self):
        self.count = 0
        self._max = {k: -math.inf for k in self.KEYS}
        self._sum = {k: 0.0 for k in self.KEYS}

    def update(self, log_d1: np.ndarray, log_d2: np.ndarray) -> None:
        streams = {"num": log_d1 + log_d2, "d1": 2 * log_d1, "d2": 2 * log_d2}
        for key, vals in streams.items():
            m = float(vals.max())
            if m > self._max[key]:
                if math.isfinite(self._max[key]):
                    self._sum[key] *= math.exp(self._max[key] - m)
                self._max[key] = m
            self._sum[key] += float(np.exp(vals - self._max[key]).sum())
            if not math.isfinite(self._sum[key]):
                raise NumericalError("log-moment accumulator overflowed")
        self.count += len(log_d1)

    def log_mean(self, key: str) -> float:
        if self.count == 0:
            raise NumericalError("no samples accumulated")
        return self._max[key] + math.log(self._sum[key] / self.count)

    def log_ratio(self) -> float:
        return self.log_mean("num") - 0.5 * (self.log_mean("d1")
                                             + self.log_mean("d2"))


def sample_matrix(n: int, p: float, rng: np.random.Generator) -> SparseMatrixSample:
    """One ensemble draw (dense storage; the sparse mask is applied)."""
    if not (0 < p <= n):
        raise DomainError(f"need 0 < p <= n, got p={p}, n={n}")
    w = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) \
        * math.sqrt(0.5)
    mask = rng.random((n, n)) < p / n
    return SparseMatrixSample(n=n, p=p, entries=np.where(mask, w / math.sqrt(p), 0))


def _sample_batch(count: int, n: int, p: float, rng: np.random.Generator) -> np.ndarray:
    w = (rng.standard_normal((count, n, n))
         + 1j * rng.standard_normal((count, n, n))) * math.sqrt(0.5)
    mask = rng.random((count, n, n)) < p / n
    return np.where(mask, w / math.sqrt(p), 0)


def log_absdet_sq(X: np.ndarray, z: complex) -> float:
    """log |det(X - z)|^2 via pivoted triangular factorization.

    Returns -inf when a pivot is exactly zero; callers discard and count
    such samples.
    """
    X = np.asarray(X, dtype=complex)
    n = X.shape[-1]
    _, logabs = np.linalg.slogdet(X - z * np.eye(n))
    return 2.0 * float(logabs)


def _log_d_batch(X: np.ndarray, z: complex) -> np.ndarray:
    n = X.shape[-1]
    shifted = X - z * np.eye(n)
    _, logabs = np.linalg.slogdet(shifted)
    return 2.0 * logabs


def resolve_chunk_size(n: int, chunk_size: Optional[int]) -> int:
    """Explicit size, or one keeping a chunk near 2e6 matrix entries."""
    if chunk_size is not None and chunk_size >= 1:
        return chunk_size
    return max(16, 2_000_000 // (n * n))


def _collect_logs(n: int, p: float, z1: complex, z2: complex, samples: int,
                  seed: int, workers: int, chunk_size: Optional[int]):
    chunk_size = resolve_chunk_size(n, chunk_size)
    n_chunks = -(-samples // chunk_size)

    def run_chunk(index: int):
        count = min(chunk_size, samples - index * chunk_size)
        rng = np.random.default_rng([seed, index])
        X = _sample_batch(count, n, p, rng)
        eye = np.eye(n)
        X -= z1 * eye
        _, l1 = np.linalg.slogdet(X)
        X += (z1 - z2) * eye
        _, l2 = np.linalg.slogdet(X)
        return 2.0 * l1, 2.0 * l2

    if workers <= 1:
        parts = [run_chunk(i) for i in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run_chunk, range(n_chunks)))
    l1 = np.concatenate([a for a, _ in parts])
    l2 = np.concatenate([b for _, b in parts])
    finite = np.isfinite(l1) & np.isfinite(l2)
    discarded = int(len(l1) - finite.sum())
    if discarded == len(l1):
        raise NumericalError("all samples were singular")
    return l1[finite], l2[finite], discarded


def estimate_f2(n: int, p: float, z1: complex, z2: complex, samples: int,
                seed: int, workers: int = 1,
                chunk_size: Optional[int] = None) -> MCEstimate:
    """Linear-moment estimate of E[D(z1) D(z2)] with batch-means stderr."""
    if not (0 < p <= n):
        raise DomainError(f"need 0 < p <= n, got p={p}, n={n}")
    if samples < 100:
        raise DomainError("need at least 100 samples")
    l1, l2, _ = _collect_logs(n, p, z1, z2, samples, seed, workers, chunk_size)
    logs = l1 + l2
    shift = float(logs.max())
    w = np.exp(logs - shift)
    mean = math.exp(shift) * float(w.mean())
    k = max(30, min(200, len(w) // 50))
    size = len(w) // k
    if size < 1:
        raise NumericalError("too few usable samples for batch means")
    batch = w[:k * size].reshape(k, size).mean(axis=1)
    stderr = math.exp(shift) * float(batch.std(ddof=1)) / math.sqrt(k)
    return MCEstimate(mean=mean, stderr=stderr, n_samples=len(w), seed=seed)


def _ratio_from_logs(l1: np.ndarray, l2: np.ndarray) -> float:
    acc = LogMoments()
    acc.update(l1, l2)
    return math.exp(acc.log_ratio())


def estimate_ratio(n: int, p: float, z0: complex, zeta1: complex,
                   zeta2: complex, samples: int, seed: int,
                   workers: int = 1, chunk_size: Optional[int] = None,
                   bootstrap: int = 200) -> RatioEstimate:
    """Normalized two-point ratio with bootstrap CI and jackknife guard."""
    if samples < 1000:
        raise DomainError("need at least 1000 samples for the ratio estimator")
    if bootstrap < 200:
        raise DomainError("need at least 200 bootstrap resamples")
    root_n = math.sqrt(n)
    z1 = z0 + zeta1 / root_n
    z2 = z0 + zeta2 / root_n
    l1, l2, discarded = _collect_logs(n, p, z1, z2, samples, seed,
                                      workers, chunk_size)
    m = len(l1)
    point = _ratio_from_logs(l1, l2)

    # bootstrap over per-sample log quantities
    rng = np.random.default_rng([seed, BOOT_TAG])
    # work with shifted exponentials so resampled means stay finite
    s_num, s_d1, s_d2 = l1 + l2, 2 * l1, 2 * l2
    shifts = (s_num.max(), s_d1.max(), s_d2.max())
    w_num = np.exp(s_num - shifts[0])
    w_d1 = np.exp(s_d1 - shifts[1])
    w_d2 = np.exp(s_d2 - shifts[2])

    def ratio_of_sums(num, d1, d2, count):
        # a resample can underflow a whole stream to exact zero
        if num <= 0.0 or d1 <= 0.0 or d2 <= 0.0:
            return 0.0
        log_num = shifts[0] + math.log(num / count)
        log_d1 = shifts[1] + math.log(d1 / count)
        log_d2 = shifts[2] + math.log(d2 / count)
        return math.exp(log_num - 0.5 * (log_d1 + log_d2))

    boot = np.empty(bootstrap)
    for r in range(bootstrap):
        idx = rng.integers(0, m, m)
        boot[r] = ratio_of_sums(w_num[idx].sum(), w_d1[idx].sum(),
                                w_d2[idx].sum(), m)
    ci_low, ci_high = np.percentile(boot, [2.5, 97.5])
    stderr = float(boot.std(ddof=1))

    # delete-one-batch jackknife, bias corrected
    k = max(30, min(100, m // 20))
    size = m // k
    tot = np.array([w_num[:k * size].sum(), w_d1[:k * size].sum(),
                    w_d2[:k * size].sum()])
    jack_thetas = np.empty(k)
    for i in range(k):
        sl = slice(i * size, (i + 1) * size)
        rem = tot - np.array([w_num[sl].sum(), w_d1[sl].sum(), w_d2[sl].sum()])
        jack_thetas[i] = ratio_of_sums(rem[0], rem[1], rem[2],
                                       (k - 1) * size)
    theta_all = _ratio_from_logs(l1[:k * size], l2[:k * size])
    jackknife = k * theta_all - (k - 1) * float(jack_thetas.mean())
    reliable = bool(ci_low <= jackknife <= ci_high)

    return RatioEstimate(ratio=point, stderr=stderr, ci_low=float(ci_low),
                         ci_high=float(ci_high), n_samples=m,
                         discarded=discarded, seed=seed,
                         jackknife=jackknife, reliable=reliable)
