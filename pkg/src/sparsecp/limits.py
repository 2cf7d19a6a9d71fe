"""Limiting normalized correlation ratios in the three regions.

In the star region the normalized two-point ratio converges to a Gaussian
prefactor times a scaled Ginibre 2x2 determinant,

    exp(-gamma * (Re(conj(z0) (zeta1 - zeta2)))^2)
        * (1 - exp(-beta |zeta1 - zeta2|^2)) / (beta |zeta1 - zeta2|^2),

with beta in [0, 1] solving

    p*beta - p + 2 = p*|z0|^2*(1 - beta)^2 * (2 - p*|z0|^2*(1 - beta))

and gamma a rational function of (alpha, b) evaluated at the star saddle.
In the v region the ratio is exp(-p (Re(conj(z0) dz))^2); in the zero
region it is 1.  The scale parameter beta is tied to the star saddle by
beta = 1 - b^2 (1 - alpha)/|z0|^2 with b^2 = 2/p exactly, which is how it
is computed here; the quartic above then serves as the residual check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import DomainError
from .phase import Region
from .saddle import PhasePoint, star_saddle

__all__ = [
    "LimitParams",
    "Displacement",
    "ginibre_kernel",
    "beta_solve",
    "beta_residual",
    "gamma_coeff",
    "limit_params",
    "limit_ratio",
    "ginibre_limit_ratio",
]


@dataclass(frozen=True)
class Displacement:
    """Local coordinates around z0, in units of n^(-1/2)."""

    zeta1: complex
    zeta2: complex

    @property
    def delta(self) -> complex:
        return self.zeta1 - self.zeta2


@dataclass(frozen=True)
class LimitParams:
    """Scale and prefactor parameters of the star-region limit law."""

    p: float
    z0: complex
    beta: float
    gamma_coeff: float


def ginibre_kernel(w1: complex, w2: complex) -> complex:
    """Bulk reference kernel exp(-|w1|^2/2 - |w2|^2/2 + w1 conj(w2))."""
    return cmath.exp(-abs(w1) ** 2 / 2 - abs(w2) ** 2 / 2 + w1 * w2.conjugate())


def beta_residual(beta: float, p: float, z0sq: float) -> float:
    m = p * z0sq
    return p * beta - p + 2 - m * (1 - beta) ** 2 * (2 - m * (1 - beta))


def _star_or_raise(p: float, z0sq: float):
    if p <= 0:
        raise DomainError("p must be positive")
    pt = PhasePoint.from_p(p, z0sq)
    star = star_saddle(pt)
    if star is None:
        raise DomainError(
            f"no star saddle at (b={pt.b:.6g}, z0sq={z0sq:.6g}); "
            "the star-region limit law does not apply here")
    return pt, star


def beta_solve(p: float, z0sq: float) -> float:
    """Scale parameter beta in [0, 1], residual <= 1e-10 on the quartic."""
    pt, star = _star_or_raise(p, z0sq)
    if z0sq > 0:
        beta = 1 - pt.b ** 2 * (1 - star.alpha) / z0sq
    else:
        beta = 1 - pt.b ** 2  # h_* = 1 at the zero-modulus star point
    # Newton polish on the quartic itself
    for _ in range(50):
        r = beta_residual(beta, p, z0sq)
        if abs(r) <= 1e-12:
            break
        eps = 1e-7
        d = (beta_residual(beta + eps, p, z0sq)
             - beta_residual(beta - eps, p, z0sq)) / (2 * eps)
        if d == 0:
            break
        beta -= r / d
    if abs(beta_residual(beta, p, z0sq)) > 1e-10:
        raise DomainError(f"no quartic root near the saddle value at (p={p}, z0sq={z0sq})")
    if not (-1e-9 <= beta <= 1 + 1e-9):
        raise DomainError(f"beta={beta} outside [0, 1]; point is not in the star region")
    return min(max(beta, 0.0), 1.0)


def gamma_coeff(p: float, z0sq: float) -> float:
    """Gaussian prefactor coefficient of the star-region limit law."""
    pt, star = _star_or_raise(p, z0sq)
    a, b2 = star.alpha, pt.b ** 2
    num = 2 * b2 * (1 - (1 - 4 * a + 2 * a * a) * b2)
    d1 = 1 - (1 - 4 * a + 3 * a * a) * b2
    d2 = 1 + (2 * a - 2 * a * a) * b2
    if d1 <= 0:
        raise DomainError(f"gamma denominator factor 1-(1-4a+3a^2)b^2 = {d1} <= 0")
    if d2 <= 0:
        raise DomainError(f"gamma denominator factor 1+(2a-2a^2)b^2 = {d2} <= 0")
    return num / (d1 * d2)


def limit_params(p: float, z0: complex) -> LimitParams:
    z0sq = abs(z0) ** 2
    return LimitParams(p=float(p), z0=complex(z0),
                       beta=beta_solve(p, z0sq),
                       gamma_coeff=gamma_coeff(p, z0sq))


def _expm1_ratio(x: float) -> float:
    """(1 - exp(-x))/x, series branch near 0 to avoid cancellation."""
    if x < 1e-6:
        return 1.0 - x / 2 + x * x / 6
    return -math.expm1(-x) / x


def limit_ratio(region: Region, params: LimitParams, d: Displacement) -> float:
    """Limiting normalized ratio in the given region; 1 at zeta1 = zeta2."""
    delta = d.delta
    if delta == 0:
        return 1.0
    if region is Region.OMEGA1:
        re = (params.z0.conjugate() * delta).real
        x = params.beta * abs(delta) ** 2
        return math.exp(-params.gamma_coeff * re * re) * _expm1_ratio(x)
    if region is Region.OMEGA2:
        re = (params.z0.conjugate() * delta).real
        return math.exp(-params.p * re * re)
    if region is Region.OMEGA3:
        return 1.0
    raise DomainError("no limit law applies on a phase boundary")


def ginibre_limit_ratio(d: Displacement) -> float:
    """Dense-limit specialization: beta = 1, no Gaussian prefactor."""
    delta = d.delta
    if delta == 0:
        return 1.0
    return _expm1_ratio(abs(delta) ** 2)
