"""Exact finite-size moments via a five-variable Gaussian expectation.

The two-point correlation of characteristic polynomials at size n admits
the representation

    f2(z1, z2) = E[ h(Q, v)^n ],
    h(Q, v) = det A + b v det Q* + b conj(v) det Q + b^2 |v|^2,
    A = [[-Z, Q], [-Q*, -Z*]],  Z = diag(z1, z2),

where the four entries of Q and the scalar v are independent centered
complex Gaussians with E|.|^2 = 1/n and b = sqrt(2(n-p)/(np)).  The
normalizing prefactor of the underlying integral is exactly the Gaussian
density, which is what makes the plain expectation form valid; the n = 1
closed form pins this down in the tests.

h^n is evaluated by repeated squaring of the complex value itself, never
through exp(n log h), because h wanders across the negative real axis.
Standard errors come from batch means (the integrand is heavy tailed, so
a naive variance would be optimistic).

Also provided: a Haar Monte Carlo check of the rank-one unitary group
integral against its determinant closed form.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError

__all__ = [
    "OracleConfig",
    "OracleEstimate",
    "h_function",
    "f2_oracle",
    "haar_unitary",
    "hciz_check",
]

MIN_SAMPLES = 100
MIN_BATCHES = 30


@dataclass(frozen=True)
class OracleConfig:
    n: int
    p: float
    z1: complex
    z2: complex
    samples: int
    seed: int
    chunk_size: int = 65536
    workers: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("n must be a positive integer")
        if not (0 < self.p <= self.n):
            raise DomainError(f"need 0 < p <= n, got p={self.p}, n={self.n}")
        if self.samples < MIN_SAMPLES:
            raise DomainError(f"need at least {MIN_SAMPLES} samples")
        if self.chunk_size < 1:
            raise DomainError("chunk_size must be positive")

    @property
    def b(self) -> float:
        return math.sqrt(2.0 * (self.n - self.p) / (self.n * self.p))


@dataclass(frozen=True)
class OracleEstimate:
    mean: complex
    stderr: float
    stderr_imag: float
    n_samples: int
    seed: int


def _det4_block(Q: np.ndarray, z1: complex, z2: complex) -> np.ndarray:
    """det A for a stack of Q matrices, A the 4x4 two-block structure."""
    m = Q.shape[0]
    A = np.zeros((m, 4, 4), dtype=complex)
    A[:, 0, 0] = -z1
    A[:, 1, 1] = -z2
    A[:, 2, 2] = -np.conj(z1)
    A[:, 3, 3] = -np.conj(z2)
    A[:, :2, 2:] = Q
    A[:, 2:, :2] = -np.conj(np.swapaxes(Q, 1, 2))
    return np.linalg.det(A)


def h_batch(Q: np.ndarray, v: np.ndarray, z1: complex, z2: complex,
            b: float) -> np.ndarray:
    det_a = _det4_block(Q, z1, z2)
    det_q = Q[:, 0, 0] * Q[:, 1, 1] - Q[:, 0, 1] * Q[:, 1, 0]
    return det_a + 2.0 * b * np.real(v * np.conj(det_q)) + b * b * np.abs(v) ** 2


def h_function(Q, v: complex, z1: complex, z2: complex, b: float) -> complex:
    """Single evaluation of h(Q, v)."""
    Q = np.asarray(Q, dtype=complex)
    if Q.shape != (2, 2):
        raise DomainError("Q must be 2 x 2")
    return complex(h_batch(Q[None, :, :], np.array([v], dtype=complex),
                           z1, z2, b)[0])


def _int_power(values: np.ndarray, n: int) -> np.ndarray:
    out = np.ones_like(values)
    base = values.copy()
    e = n
    while e:
        if e & 1:
            out = out * base
        base = base * base
        e >>= 1
    return out


def _batch_stderr(values: np.ndarray) -> float:
    m = len(values)
    k = max(MIN_BATCHES, min(200, m // 50))
    k = min(k, m)
    size = m // k
    means = values[:k * size].reshape(k, size).mean(axis=1)
    if k < 2:
        return float("inf")
    return float(means.std(ddof=1) / math.sqrt(k))


def _map_chunks(worker, n_chunks: int, workers: int):
    if workers <= 1:
        return [worker(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, range(n_chunks)))


def f2_oracle(cfg: OracleConfig) -> OracleEstimate:
    """Monte Carlo estimate of E[h^n]; deterministic in (seed, chunk_size)."""
    sigma = math.sqrt(1.0 / (2.0 * cfg.n))
    n_chunks = -(-cfg.samples // cfg.chunk_size)

    def run_chunk(index: int) -> np.ndarray:
        count = min(cfg.chunk_size, cfg.samples - index * cfg.chunk_size)
        rng = np.random.default_rng([cfg.seed, index])
        Q = (rng.standard_normal((count, 2, 2))
             + 1j * rng.standard_normal((count, 2, 2))) * sigma
        v = (rng.standard_normal(count)
             + 1j * rng.standard_normal(count)) * sigma
        h = h_batch(Q, v, cfg.z1, cfg.z2, cfg.b)
        return _int_power(h, cfg.n)

    chunks = _map_chunks(run_chunk, n_chunks, cfg.workers)
    hn = np.concatenate(chunks)
    if not np.all(np.isfinite(hn)):
        raise NumericalError(
            "non-finite values in the h^n accumulation; reduce n")
    mean = complex(hn.mean())
    return OracleEstimate(mean=mean,
                          stderr=_batch_stderr(hn.real),
                          stderr_imag=_batch_stderr(hn.imag),
                          n_samples=cfg.samples, seed=cfg.seed)


def haar_unitary(rng: np.random.Generator, count: int, dim: int = 2) -> np.ndarray:
    """Stack of Haar-distributed U(dim) matrices (QR with phase fix)."""
    z = (rng.standard_normal((count, dim, dim))
         + 1j * rng.standard_normal((count, dim, dim))) * math.sqrt(0.5)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r, axis1=1, axis2=2)
    return q * (d / np.abs(d))[:, None, :]


def hciz_rhs(a_evals, b_evals, t: float) -> float:
    """Determinant closed form of the U(2) exponential trace integral."""
    a1, a2 = a_evals
    b1, b2 = b_evals
    if a1 == a2 or b1 == b2:
        raise DomainError("eigenvalues within each matrix must be distinct")
    if t == 0:
        raise DomainError("t must be nonzero")
    m = np.exp(t * np.array([[a1 * b1, a1 * b2], [a2 * b1, a2 * b2]]))
    return float((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
                 / (t * (a2 - a1) * (b2 - b1)))


def hciz_check(a_evals, b_evals, t: float, samples: int, seed: int,
               chunk_size: int = 65536, workers: int = 1):
    """(Haar MC estimate, closed form) for the U(2) integral.

    The integrand exp(t tr(A U* B U)) uses diagonal A, B with the given
    spectra; tr(A U* B U) = sum_jk a_j b_k |U_kj|^2.
    """
    rhs = hciz_rhs(a_evals, b_evals, t)  # validates the spectra
    if samples < MIN_SAMPLES:
        raise DomainError(f"need at least {MIN_SAMPLES} samples")
    a = np.asarray(a_evals, dtype=float)
    bv = np.asarray(b_evals, dtype=float)
    n_chunks = -(-samples // chunk_size)

    def run_chunk(index: int) -> np.ndarray:
        count = min(chunk_size, samples - index * chunk_size)
        rng = np.random.default_rng([seed, index])
        u = haar_unitary(rng, count)
        absu2 = np.abs(u) ** 2
        tr = (absu2 * bv[None, :, None]).sum(axis=1) @ a
        return np.exp(t * tr)

    vals = np.concatenate(_map_chunks(run_chunk, n_chunks, workers))
    if not np.all(np.isfinite(vals)):
        raise NumericalError("overflow in the Haar Monte Carlo integrand")
    lhs = OracleEstimate(mean=complex(vals.mean()),
                         stderr=_batch_stderr(vals),
                         stderr_imag=0.0,
                         n_samples=samples, seed=seed)
    return lhs, rhs
