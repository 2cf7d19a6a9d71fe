"""Phase boundaries and region classification in the (b, z0sq) plane.

Three regions partition the quarter-plane according to which stationary
family of the rate function carries the global maximum: the star point
(Omega1), the v circle (Omega2) or the origin (Omega3).  The boundaries
are built twice, independently:

  * classify_by_argmax compares the f0 values of the available saddle
    candidates directly;
  * classify_by_curves uses closed-form boundary curves: the star
    existence limits (gamma1 and z_minus), the star/v dominance crossover
    (gamma2, through the auxiliary function H of s = 1/b^2) and the
    star/origin crossover (gamma3, through the gap function W).

Curve construction follows a single recipe: every root is isolated by an
analytic bracket, solved by bisection (brentq) and polished by Newton.
The three numerical constants of the diagram (alpha0 and the diagonal
crossings b0, b1) are computed on first use and cached, never hardcoded.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import List, Tuple

from scipy.optimize import brentq

from .errors import DomainError, NumericalError
from .saddle import PhasePoint, saddle_values

__all__ = [
    "Region",
    "CurveTable",
    "z_minus",
    "alpha_pm",
    "b_pm",
    "H",
    "g",
    "s1",
    "s0",
    "alpha0",
    "b0",
    "b1",
    "curve_gamma1",
    "curve_gamma2",
    "curve_gamma3",
    "W",
    "star_exists",
    "phase_boundary_distance",
    "classify_by_argmax",
    "classify_by_curves",
    "export_grid",
]

SQRT2 = math.sqrt(2.0)
ALPHA_G = (3.0 - math.sqrt(5.0)) / 4.0        # where g changes sign on the locus s = 1 - 2a(1-a)
B_LENS = math.sqrt((5.0 + math.sqrt(5.0)) / 5.0)  # star window detaches from its local max here
BOUNDARY_TOL = 1e-9

_BRENTQ_KW = dict(xtol=1e-14, rtol=8.9e-16, maxiter=200)


class Region(Enum):
    OMEGA1 = 1
    OMEGA2 = 2
    OMEGA3 = 3
    BOUNDARY = 0

    @property
    def code(self) -> int:
        return self.value


@dataclass(frozen=True)
class CurveTable:
    """Sampled boundary curve with per-sample defining residuals."""

    curve_id: str
    samples: Tuple[Tuple[float, float], ...]
    residuals: Tuple[float, ...]
    tolerance: float

    def __post_init__(self):
        bs = [b for b, _ in self.samples]
        if any(b2 <= b1 for b1, b2 in zip(bs, bs[1:])):
            raise DomainError("curve samples must be strictly increasing in b")


def z_minus(b: float) -> float:
    """Largest z0sq at which the cubic keeps three real roots (tangency)."""
    if b <= 0:
        raise DomainError("z_minus needs b > 0")
    b2 = b * b
    return (4 * b2 + 9) / 27 + (4 * b2 + 6) / 27 * math.sqrt(1 + 3 / (2 * b2))


def alpha_pm(b: float) -> Tuple[float, float]:
    """Critical points of the cubic; the + one always exceeds 1."""
    if b <= 0:
        raise DomainError("alpha_pm needs b > 0")
    s = math.sqrt(1 + 3 / (2 * b * b))
    return (2 - s) / 3, (2 + s) / 3


def b_pm(alpha: float) -> Tuple[float, float]:
    """Scale window (b_minus, b_plus) where the v constraint z0sq <= b can bind."""
    if not (0 < alpha < 1):
        raise DomainError("b_pm needs alpha in (0, 1)")
    disc = 1 - 8 * alpha * (1 - alpha) ** 3
    if disc < 0:
        raise DomainError("negative discriminant in b_pm")
    den = 4 * alpha * (1 - alpha) ** 2
    return (1 - math.sqrt(disc)) / den, (1 + math.sqrt(disc)) / den


def H(s: float, alpha: float) -> float:
    """Star-minus-v value gap at fixed alpha, as a function of s = 1/b^2."""
    if s <= 0:
        raise DomainError("H needs s > 0")
    arg = 2 * alpha * (1 - alpha) + s
    if arg <= 0:
        raise DomainError("non-positive log argument in H")
    a = alpha
    return (2 * a - 5 * a * a + 4 * a ** 3 - 4 * a * a * (1 - a) ** 4) / s \
        - (1 - a) ** 2 * s + (1 - 2 * a - 4 * a * (1 - a) ** 3) + math.log(arg)


def g(s: float, alpha: float) -> float:
    """Quadratic whose sign is the sign of H'(s) beyond s = 1 - 2a(1-a)."""
    a = alpha
    return -(1 - a) ** 2 * s * s + (2 * a - a * a) * s \
        + 4 * a * a * (1 - a) ** 4 + 2 * a ** 3 * (1 - a)


def _g_positive_root(alpha: float) -> float:
    # larger root of g; g has negative leading coefficient and g(0) >= 0
    a2 = -(1 - alpha) ** 2
    a1 = 2 * alpha - alpha * alpha
    a0 = 4 * alpha ** 2 * (1 - alpha) ** 4 + 2 * alpha ** 3 * (1 - alpha)
    disc = a1 * a1 - 4 * a2 * a0
    return (-a1 - math.sqrt(disc)) / (2 * a2)


def s1(alpha: float) -> float:
    """Root of H(., alpha) = 0 beyond s = 1 - 2a(1-a).

    H vanishes with zero slope at s = 1 - 2a(1-a), rises to a single
    maximum (at the positive root of g) and then decreases to -infinity;
    s1 is the zero on the decreasing branch.  Defined for
    alpha in [(3 - sqrt 5)/4, 1).
    """
    if not (ALPHA_G - 1e-12 <= alpha < 1.0):
        raise DomainError(f"s1 defined on [{ALPHA_G}, 1), got {alpha}")
    alpha = max(alpha, ALPHA_G)
    s_peak = _g_positive_root(alpha)
    h_peak = H(s_peak, alpha)
    if h_peak <= 0.0:
        if h_peak < -1e-10:
            raise NumericalError(f"H peak unexpectedly negative at alpha={alpha}")
        return s_peak  # degenerate case: the zero sits at the peak
    hi = s_peak + 0.5
    for _ in range(100):
        if H(hi, alpha) < 0:
            break
        hi *= 2.0
    else:
        raise NumericalError("no sign change found for s1")
    root = brentq(H, s_peak, hi, args=(alpha,), **_BRENTQ_KW)
    # Newton polish on H
    for _ in range(3):
        eps = 1e-7 * max(1.0, abs(root))
        d = (H(root + eps, alpha) - H(root - eps, alpha)) / (2 * eps)
        if d == 0:
            break
        root -= H(root, alpha) / d
    if abs(H(root, alpha)) > 1e-10:
        raise NumericalError(f"s1 residual too large at alpha={alpha}")
    return root


def s0(alpha: float) -> float:
    """s value of the v-existence edge, s0 = b_minus(alpha)^(-2)."""
    bm, _ = b_pm(alpha)
    return 1.0 / (bm * bm)


@lru_cache(maxsize=1)
def alpha0() -> float:
    """Unique crossing of s1 and s0 in ((3 - sqrt 5)/4, 1 - 1/sqrt 2)."""
    lo = ALPHA_G + 1e-12
    hi = 1 - 1 / SQRT2

    def diff(a):
        return s1(a) - s0(a)

    flo, fhi = diff(lo), diff(hi)
    if not (flo < 0 < fhi):
        raise NumericalError("alpha0 bracket lost its sign change")
    root = brentq(diff, lo, hi, **_BRENTQ_KW)
    if abs(diff(root)) > 1e-8:
        raise NumericalError("alpha0 residual too large")
    return root


def curve_gamma1(b: float) -> float:
    """Lower star-existence edge for b in [1, sqrt 2]."""
    if not (1.0 - 1e-12 <= b <= SQRT2 + 1e-12):
        raise DomainError(f"gamma1 is defined on [1, sqrt 2], got b={b}")
    b = min(max(b, 1.0), SQRT2)
    return (b * b - b * math.sqrt(max(0.0, 2 - b * b))) / 2


def _gamma1_upper(b: float) -> float:
    b = min(max(b, 1.0), SQRT2)
    return (b * b + b * math.sqrt(max(0.0, 2 - b * b))) / 2


def _cubic_z(alpha: float, b: float) -> float:
    return 2 * alpha * (1 - alpha) ** 2 * b * b + 1 - alpha


def curve_gamma2(b: float) -> float:
    """z0sq level below which the star beats the v circle, b in [1, sqrt 2].

    Piecewise: equals b up to the diagonal crossing (inverting s0), then
    follows the inversion of s1, and coincides with the upper
    star-existence edge from B_LENS on.
    """
    if not (1.0 - 1e-12 <= b <= SQRT2 + 1e-12):
        raise DomainError(f"gamma2 is defined on [1, sqrt 2], got b={b}")
    b = min(max(b, 1.0), SQRT2)
    if b >= B_LENS:
        return _gamma1_upper(b)
    s = 1.0 / (b * b)
    a0 = alpha0()
    s_split = s1(a0)
    if s >= s_split:
        # invert s0 on [alpha0, 1 - 1/sqrt2]; the result satisfies z = b
        lo, hi = a0, 1 - 1 / SQRT2
        if s0(lo) >= s:
            alpha = lo
        elif s0(hi) <= s:
            alpha = hi
        else:
            alpha = brentq(lambda a: s0(a) - s, lo, hi, **_BRENTQ_KW)
    else:
        # invert s1 on [(3 - sqrt5)/4, alpha0]
        if s1(ALPHA_G) >= s:
            alpha = ALPHA_G
        else:
            alpha = brentq(lambda a: s1(a) - s, ALPHA_G, a0, **_BRENTQ_KW)
    return _cubic_z(alpha, b)


def W(alpha: float, b: float) -> float:
    """Star-minus-origin value gap along the cubic constraint."""
    if not (0 <= alpha < 1):
        raise DomainError("W needs alpha in [0, 1)")
    a = alpha
    arg = 1 + 2 * a * (1 - a) * b * b
    return b * b * (2 * a - 5 * a * a + 4 * a ** 3) - 2 * a \
        - 2 * math.log(1 - a) - math.log(arg)


def curve_gamma3(b: float) -> float:
    """z0sq level below which the star beats the origin, b in [1/sqrt2, sqrt2].

    The boundary alpha is alpha_minus(b) when W is already non-negative
    there, otherwise the unique zero of W on
    [alpha_minus(b), 1 - 1/(b sqrt 2)] (W increases on that interval).
    """
    if not (1 / SQRT2 - 1e-12 <= b <= SQRT2 + 1e-12):
        raise DomainError(f"gamma3 is defined on [1/sqrt2, sqrt2], got b={b}")
    b = min(max(b, 1 / SQRT2), SQRT2)
    a_minus, _ = alpha_pm(b)
    a_minus = max(a_minus, 0.0)
    cap = 1 - 1 / (b * SQRT2)
    if W(a_minus, b) >= 0:
        alpha1 = a_minus
    else:
        if W(cap, b) < 0:
            raise NumericalError(f"W bracket failed at b={b}")
        alpha1 = brentq(W, a_minus, cap, args=(b,), **_BRENTQ_KW)
    return _cubic_z(alpha1, b)


@lru_cache(maxsize=1)
def b0() -> float:
    """Diagonal crossing of z_minus: z_minus(b0) = b0."""
    root = brentq(lambda b: z_minus(b) - b, 1.0, 1.3, **_BRENTQ_KW)
    return root


@lru_cache(maxsize=1)
def b1() -> float:
    """Diagonal crossing of gamma3: the three regions meet at (b1, b1)."""
    root = brentq(lambda b: curve_gamma3(b) - b, 1.0, 1.3, **_BRENTQ_KW)
    return root


def star_exists(b: float, z0sq: float) -> bool:
    """Closed-form star existence test (no root selection involved)."""
    if b > SQRT2:
        return False
    if b <= 1 / SQRT2:
        return z0sq <= 1.0
    if b <= 1.0:
        return z0sq <= z_minus(b)
    lo = curve_gamma1(b)
    hi = z_minus(b) if b < B_LENS else _gamma1_upper(b)
    return lo <= z0sq <= hi


def classify_by_argmax(pt: PhasePoint, tol: float = BOUNDARY_TOL) -> Region:
    """Region of the largest available saddle value; BOUNDARY on near-ties."""
    s = saddle_values(pt)
    candidates = [(s.zero.value, Region.OMEGA3)]
    if s.vsaddle is not None:
        candidates.append((s.vsaddle.value, Region.OMEGA2))
    if s.star is not None:
        candidates.append((s.star.value, Region.OMEGA1))
    candidates.sort(key=lambda c: c[0], reverse=True)
    if len(candidates) > 1 and candidates[0][0] - candidates[1][0] < tol:
        return Region.BOUNDARY
    return candidates[0][1]


def phase_boundary_distance(b: float, z0sq: float) -> float:
    """Vertical distance from (b, z0sq) to the nearest phase boundary.

    Boundaries: z0sq = 1 (small b), gamma3, gamma1, gamma2 and the v/zero
    diagonal beyond the triple point.  Used to excuse classifier
    disagreements inside finite-resolution tubes.
    """
    dists = []
    bb1 = b1()
    if b <= 1 / SQRT2:
        dists.append(abs(z0sq - 1.0))
    if 1 / SQRT2 <= b <= bb1:
        dists.append(abs(z0sq - curve_gamma3(b)))
    if 1.0 <= b <= SQRT2:
        dists.append(abs(z0sq - curve_gamma1(b)))
    if bb1 <= b <= SQRT2:
        dists.append(abs(z0sq - curve_gamma2(b)))
    if b >= bb1:
        dists.append(abs(z0sq - b))
    return min(dists) if dists else math.inf


def classify_by_curves(pt: PhasePoint) -> Region:
    """Region decided purely from the boundary curves."""
    b, z = pt.b, pt.z0sq
    if z <= 0:
        raise DomainError("curve classification needs z0sq > 0")
    if not star_exists(b, z):
        return Region.OMEGA2 if z <= b else Region.OMEGA3
    if z <= 1.0:
        return Region.OMEGA1
    if z <= b:
        return Region.OMEGA1 if z <= curve_gamma2(b) else Region.OMEGA2
    return Region.OMEGA1 if z <= curve_gamma3(b) else Region.OMEGA3


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _curve_tables(n_samples: int) -> List[CurveTable]:
    """Sample the four curves with their defining residuals."""
    from .saddle import star_saddle  # local import to keep module load light

    tables = []
    bb1 = b1()

    def residual_gamma1(b, z):
        star = star_saddle(PhasePoint(b, z))
        if star is None:
            return math.inf
        a = star.alpha
        if a >= 1.0:  # closed-form z0sq = 0 branch
            return abs(star.t_star_sq)
        return abs(a * z / (1 - a) - a * b * b)

    def residual_f_gap(other):
        def res(b, z):
            s = saddle_values(PhasePoint(b, z))
            if s.star is None:
                return math.inf
            ref = s.vsaddle.value if other == "v" else s.zero.value
            return abs(s.star.value - ref)
        return res

    def residual_zminus(b, z):
        a_minus, _ = alpha_pm(b)
        return abs(_cubic_z(a_minus, b) - z)

    specs = [
        ("gamma1", 1.0, SQRT2, curve_gamma1, residual_gamma1),
        ("gamma2", bb1, SQRT2, curve_gamma2, residual_f_gap("v")),
        ("gamma3", 1 / SQRT2, bb1, curve_gamma3, residual_f_gap("zero")),
        ("z_minus", 1 / SQRT2, B_LENS, z_minus, residual_zminus),
    ]
    for name, lo, hi, fn, res in specs:
        samples, residuals = [], []
        for i in range(n_samples):
            b = lo + (hi - lo) * i / (n_samples - 1)
            z = fn(b)
            samples.append((b, z))
            residuals.append(res(b, z))
        tables.append(CurveTable(curve_id=name, samples=tuple(samples),
                                 residuals=tuple(residuals), tolerance=1e-8))
    return tables


def export_grid(b_range: Tuple[float, float, int],
                z_range: Tuple[float, float, int],
                out_grid: str, out_curves: str,
                boundary_tol: float = BOUNDARY_TOL,
                curve_samples: int = 200) -> List[CurveTable]:
    """Write the region grid and curve tables as CSV files.

    Grid header: b,z0sq,region,F_I,F_II,F_III with region in {1,2,3,0};
    absent saddle values are left empty.  Curves header:
    curve,b,z0sq,residual.  Full double precision, LF line endings.
    """
    b_lo, b_hi, nb = b_range
    z_lo, z_hi, nz = z_range
    if nb < 2 or nz < 2:
        raise DomainError("grid resolution must be at least 2 per axis")
    try:
        fgrid = open(out_grid, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise NumericalError(f"cannot write grid file {out_grid}: {exc}") from exc
    with fgrid:
        w = csv.writer(fgrid, lineterminator="\n")
        w.writerow(["b", "z0sq", "region", "F_I", "F_II", "F_III"])
        for i in range(nb):
            b = b_lo + (b_hi - b_lo) * i / (nb - 1)
            for j in range(nz):
                z = z_lo + (z_hi - z_lo) * j / (nz - 1)
                pt = PhasePoint(b, z)
                s = saddle_values(pt)
                region = classify_by_argmax(pt, tol=boundary_tol)
                w.writerow([
                    _fmt(b), _fmt(z), region.code,
                    _fmt(s.star.value) if s.star is not None else "",
                    _fmt(s.vsaddle.value) if s.vsaddle is not None else "",
                    _fmt(s.zero.value) if math.isfinite(s.zero.value) else "",
                ])
    tables = _curve_tables(curve_samples)
    try:
        fcur = open(out_curves, "w", newline="\n", encoding="utf-8")
    except OSError as exc:
        raise NumericalError(f"cannot write curves file {out_curves}: {exc}") from exc
    with fcur:
        w = csv.writer(fcur, lineterminator="\n")
        w.writerow(["curve", "b", "z0sq", "residual"])
        for table in tables:
            for (b, z), r in zip(table.samples, table.residuals):
                w.writerow([table.curve_id, _fmt(b), _fmt(z), _fmt(r)])
    return tables
