"""Rate function and its maximizing stationary points.

The large-size behavior of the two-point correlation of characteristic
polynomials is governed by the global maximum of

    f0(t1, t2, x, y) = -t1^2 - t2^2 - x^2 - y^2 + log h0,
    h0 = (z0sq + t1^2)(z0sq + t2^2) + 2*b*t1*t2*x + b^2*(x^2 + y^2),

over t1, t2 >= 0 and (x, y) in the plane.  The maximum can sit only on one
of three stationary families:

  * the "star" point  t1 = t2 = t_*, x = alpha*b, y = 0, with alpha a root
    of the cubic  2*alpha*(1-alpha)^2*b^2 + 1 - alpha = z0sq  selected by a
    derivative sign condition and t_*^2 >= 0;
  * the "v" circle    t1 = t2 = 0, x^2 + y^2 = 1 - z0sq^2/b^2  (needs
    z0sq <= b);
  * the origin.

This module evaluates f0, solves the cubic robustly (tangencies included),
constructs the three candidates with their f0 values, and provides a
brute-force grid maximizer used as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, NumericalError

__all__ = [
    "PhasePoint",
    "StarSaddle",
    "VSaddle",
    "ZeroSaddle",
    "SaddleSet",
    "GridSpec",
    "f0",
    "solve_alpha_roots",
    "star_saddle",
    "saddle_values",
    "brute_force_max_f0",
]

# Tolerances fixed by the module contract.
DER1_TOL = 1e-9        # tangency grace on the derivative condition
TSQ_CLAMP = 1e-12      # t_*^2 in [-TSQ_CLAMP, 0) snaps to 0
ROOT_RESIDUAL = 1e-12  # cubic residual required of every returned root
ALPHA_GRACE = 1e-12    # roots may poke out of [0, 1] by this much


@dataclass(frozen=True)
class PhasePoint:
    """A point (b, z0sq) of the sparsity/location parameter plane.

    b is the sparsity scale, z0sq the squared modulus of the spectral
    reference point.  Both are non-negative.
    """

    b: float
    z0sq: float

    def __post_init__(self):
        if not (self.b >= 0.0 and math.isfinite(self.b)):
            raise DomainError(f"b must be finite and >= 0, got {self.b}")
        if not (self.z0sq >= 0.0 and math.isfinite(self.z0sq)):
            raise DomainError(f"z0sq must be finite and >= 0, got {self.z0sq}")

    @classmethod
    def from_matrix_size(cls, n: int, p: float, z0sq: float) -> "PhasePoint":
        """Exact finite-size scale b = sqrt(2(n-p)/(n p))."""
        if not (0 < p <= n):
            raise DomainError(f"need 0 < p <= n, got p={p}, n={n}")
        return cls(b=math.sqrt(2.0 * (n - p) / (n * p)), z0sq=z0sq)

    @classmethod
    def from_p(cls, p: float, z0sq: float) -> "PhasePoint":
        """Large-size limit scale b = sqrt(2/p) at fixed p."""
        if p <= 0:
            raise DomainError(f"need p > 0, got p={p}")
        return cls(b=math.sqrt(2.0 / p), z0sq=z0sq)


@dataclass(frozen=True)
class StarSaddle:
    """The t1 = t2 = t_* stationary point and its f0 value."""

    alpha: float
    t_star_sq: float
    x_star: float
    h_star: float
    value: float


@dataclass(frozen=True)
class VSaddle:
    """The t = 0 circle |v|^2 = 1 - z0sq^2/b^2 and its f0 value."""

    r0_sq: float
    value: float


@dataclass(frozen=True)
class ZeroSaddle:
    """The origin; value is log(z0sq^2), -inf when z0sq = 0."""

    value: float


@dataclass(frozen=True)
class SaddleSet:
    star: Optional[StarSaddle]
    vsaddle: Optional[VSaddle]
    zero: ZeroSaddle


def _h0(t1, t2, x, y, b, z0sq):
    # (t1*t2) grouped so the t1 <-> t2 swap is exact in floating point
    return (z0sq + t1 * t1) * (z0sq + t2 * t2) + 2.0 * b * (t1 * t2) * x \
        + b * b * (x * x + y * y)


def f0(t1: float, t2: float, x: float, y: float, pt: PhasePoint) -> float:
    """Evaluate the rate function at (t1, t2, x, y)."""
    if t1 < 0 or t2 < 0:
        raise DomainError("t1 and t2 must be >= 0")
    h = _h0(t1, t2, x, y, pt.b, pt.z0sq)
    if h <= 0.0:
        raise DomainError(f"h0 = {h} is not positive; f0 undefined here")
    return -t1 * t1 - t2 * t2 - x * x - y * y + math.log(h)


def _cubic_coeffs(b: float, z0sq: float):
    # 2 b^2 a^3 - 4 b^2 a^2 + (2 b^2 - 1) a + (1 - z0sq) = 0
    b2 = b * b
    return 2.0 * b2, -4.0 * b2, 2.0 * b2 - 1.0, 1.0 - z0sq


def _cubic_residual(alpha: float, b: float, z0sq: float) -> float:
    return 2.0 * alpha * (1.0 - alpha) ** 2 * b * b + 1.0 - alpha - z0sq


def _polish_root(alpha: float, b: float, z0sq: float) -> float:
    """A few plain Newton steps; keeps the iterate with smallest residual."""
    c3, c2, c1, c0 = _cubic_coeffs(b, z0sq)

    def p(a):
        return ((c3 * a + c2) * a + c1) * a + c0

    best, best_res = alpha, abs(p(alpha))
    for _ in range(4):
        dp = (3.0 * c3 * alpha + 2.0 * c2) * alpha + c1
        if dp == 0.0:
            break
        alpha = alpha - p(alpha) / dp
        res = abs(p(alpha))
        if res < best_res:
            best, best_res = alpha, res
    return best


def solve_alpha_roots(pt: PhasePoint) -> list:
    """All real roots of 2 a (1-a)^2 b^2 + 1 - a = z0sq, ascending.

    A tangency (double root) is reported twice so that Vieta identities
    hold for the returned multiset.  Requires b > 0; the b = 0 case has a
    closed form handled by the caller.
    """
    b, z0sq = pt.b, pt.z0sq
    if b <= 0.0:
        raise DomainError("solve_alpha_roots needs b > 0")
    c3, c2, c1, c0 = _cubic_coeffs(b, z0sq)

    def p(a):
        return ((c3 * a + c2) * a + c1) * a + c0

    # Critical points of the cubic: local max at a_minus, local min at a_plus.
    s = math.sqrt(1.0 + 3.0 / (2.0 * b * b))
    a_minus = (2.0 - s) / 3.0
    a_plus = (2.0 + s) / 3.0
    p_max = p(a_minus)
    p_min = p(a_plus)

    scale = max(1.0, abs(z0sq))
    tan_tol = 1e-13 * scale

    def bracket_root(lo, hi):
        # expand hi/lo outward until the sign changes, then brentq + polish
        flo, fhi = p(lo), p(hi)
        k = 0
        while flo * fhi > 0.0:
            k += 1
            if k > 80:
                raise NumericalError("cubic bracketing failed")
            width = hi - lo
            if abs(flo) < abs(fhi):
                lo -= width
                flo = p(lo)
            else:
                hi += width
                fhi = p(hi)
        r = brentq(p, lo, hi, xtol=1e-15, rtol=8.9e-16)
        return _polish_root(r, b, z0sq)

    roots: list = []
    if p_max > tan_tol and p_min < -tan_tol:
        # three distinct real roots, one per monotone branch
        roots.append(bracket_root(a_minus - 1.0, a_minus))
        mid = brentq(p, a_minus, a_plus, xtol=1e-15, rtol=8.9e-16)
        roots.append(_polish_root(mid, b, z0sq))
        roots.append(bracket_root(a_plus, a_plus + 1.0))
    elif abs(p_max) <= tan_tol:
        # tangency at the local maximum: double root there
        roots.extend([a_minus, a_minus])
        roots.append(bracket_root(a_plus, a_plus + 1.0))
    elif abs(p_min) <= tan_tol:
        roots.append(bracket_root(a_minus - 1.0, a_minus))
        roots.extend([a_plus, a_plus])
    elif p_max < 0.0:
        # single real root beyond the local minimum
        roots.append(bracket_root(a_plus, a_plus + 1.0))
    else:
        # p_min > 0: single real root before the local maximum
        roots.append(bracket_root(a_minus - 1.0, a_minus))

    roots.sort()
    for r in roots:
        if abs(_cubic_residual(r, b, z0sq)) > ROOT_RESIDUAL * scale:
            raise NumericalError(
                f"cubic root residual {abs(_cubic_residual(r, b, z0sq)):.3e} "
                f"exceeds tolerance at (b={b}, z0sq={z0sq})")
    return roots


def _der1(alpha: float, b: float) -> float:
    return (6.0 * alpha * alpha - 8.0 * alpha + 2.0) * b * b - 1.0


def _star_from_alpha(alpha: float, b: float, z0sq: float) -> StarSaddle:
    t_sq = alpha * z0sq / (1.0 - alpha) - alpha * b * b
    if -TSQ_CLAMP <= t_sq < 0.0:
        t_sq = 0.0
    h_star = z0sq / (1.0 - alpha)
    value = (-alpha * alpha * b * b - 2.0 * alpha * z0sq / (1.0 - alpha)
             + 2.0 * alpha * b * b + math.log(z0sq / (1.0 - alpha)))
    return StarSaddle(alpha=alpha, t_star_sq=t_sq, x_star=alpha * b,
                      h_star=h_star, value=value)


def star_saddle(pt: PhasePoint) -> Optional[StarSaddle]:
    """Locate the star saddle, or None when it does not exist.

    Boundary conventions: b = 0 uses the closed form alpha = 1 - z0sq
    (needs z0sq <= 1); z0sq = 0 uses alpha = 1, t_*^2 = 1 - b^2 (needs
    b <= 1).  Otherwise the qualifying cubic root is selected by the
    derivative condition and t_*^2 >= 0, with the tangency double root
    accepted inside the DER1_TOL grace band.
    """
    b, z0sq = pt.b, pt.z0sq
    if b == 0.0:
        if z0sq > 1.0:
            return None
        alpha = 1.0 - z0sq
        t_sq = 1.0 - z0sq
        # value computed directly: h0 = (z0sq + t^2)^2 = 1
        return StarSaddle(alpha=alpha, t_star_sq=t_sq, x_star=0.0,
                          h_star=1.0, value=-2.0 * t_sq)
    if z0sq == 0.0:
        if b > 1.0:
            return None
        # h0 = (t^2 + b x)^2 = 1 at the stationary point
        return StarSaddle(alpha=1.0, t_star_sq=1.0 - b * b, x_star=b,
                          h_star=1.0, value=b * b - 2.0)

    best = None
    for alpha in solve_alpha_roots(pt):
        if alpha < -ALPHA_GRACE or alpha > 1.0 + ALPHA_GRACE:
            continue
        alpha = min(max(alpha, 0.0), 1.0)
        if alpha == 1.0:
            continue  # cubic cannot vanish at 1 for z0sq > 0
        if _der1(alpha, b) > DER1_TOL:
            continue
        t_sq = alpha * z0sq / (1.0 - alpha) - alpha * b * b
        if t_sq < -TSQ_CLAMP:
            continue
        cand = _star_from_alpha(alpha, b, z0sq)
        if best is None or cand.alpha > best.alpha:
            best = cand
    return best


def saddle_values(pt: PhasePoint) -> SaddleSet:
    """All available saddle candidates with their f0 values."""
    b, z0sq = pt.b, pt.z0sq
    star = star_saddle(pt)
    vsad = None
    if b > 0.0 and z0sq <= b:
        r0_sq = 1.0 - z0sq * z0sq / (b * b)
        vsad = VSaddle(r0_sq=r0_sq, value=-r0_sq + math.log(b * b))
    zero_value = math.log(z0sq * z0sq) if z0sq > 0.0 else -math.inf
    return SaddleSet(star=star, vsaddle=vsad, zero=ZeroSaddle(value=zero_value))


@dataclass(frozen=True)
class GridSpec:
    """Search grid for the brute-force maximizer.

    The reduced pass scans t1 = t2 = t in [0, r], x in [0, r], y = 0 (the
    symmetry reductions are confirmed by a coarse full 4-d pass).
    """

    r: float = 3.0
    steps: int = 241
    coarse_steps: int = 13

    def __post_init__(self):
        if self.r < 3.0:
            raise DomainError("grid radius must be >= 3")
        if self.steps < 2 or self.coarse_steps < 2:
            raise DomainError("grid needs at least 2 steps per axis")


def _f0_array(t1, t2, x, y, b, z0sq):
    h = _h0(t1, t2, x, y, b, z0sq)
    out = np.full(np.broadcast(t1, t2, x, y).shape, -np.inf)
    ok = h > 0.0
    out[ok] = (-t1 * t1 - t2 * t2 - x * x - y * y)[ok] + np.log(h[ok])
    return out


def _coordinate_descent(point, pt: PhasePoint, step: float, tol: float = 1e-8):
    """Axis-aligned descent with step halving; t coordinates stay >= 0."""
    b, z0sq = pt.b, pt.z0sq

    def val(q):
        if q[0] < 0 or q[1] < 0:
            return -math.inf
        h = _h0(q[0], q[1], q[2], q[3], b, z0sq)
        if h <= 0:
            return -math.inf
        return -q[0] ** 2 - q[1] ** 2 - q[2] ** 2 - q[3] ** 2 + math.log(h)

    q = list(point)
    best = val(q)
    while step > tol:
        improved = False
        for i in range(4):
            for sgn in (1.0, -1.0):
                cand = list(q)
                cand[i] += sgn * step
                v = val(cand)
                if v > best:
                    q, best = cand, v
                    improved = True
        if not improved:
            step *= 0.5
    return tuple(q), best


def brute_force_max_f0(pt: PhasePoint, grid: GridSpec = GridSpec()):
    """Grid argmax of f0 refined by coordinate descent.

    Returns ((t1, t2, x, y), value).  Independent of the saddle-point
    formulas; used to cross-validate them.
    """
    b, z0sq = pt.b, pt.z0sq
    t = np.linspace(0.0, grid.r, grid.steps)
    x = np.linspace(0.0, grid.r, grid.steps)
    T, X = np.meshgrid(t, x, indexing="ij")
    vals = _f0_array(T, T, X, np.zeros_like(T), b, z0sq)
    i, j = np.unravel_index(np.argmax(vals), vals.shape)
    cand = (t[i], t[i], x[j], 0.0)
    best = vals[i, j]

    # coarse full 4-d confirmation pass
    tc = np.linspace(0.0, grid.r, grid.coarse_steps)
    xc = np.linspace(-grid.r, grid.r, 2 * grid.coarse_steps - 1)
    T1, T2, Xc, Yc = np.meshgrid(tc, tc, xc, xc, indexing="ij")
    vals4 = _f0_array(T1, T2, Xc, Yc, b, z0sq)
    k = np.unravel_index(np.argmax(vals4), vals4.shape)
    if vals4[k] > best:
        cand = (T1[k], T2[k], Xc[k], Yc[k])
        best = vals4[k]

    step = t[1] - t[0]
    point, value = _coordinate_descent(cand, pt, step)
    return point, value
