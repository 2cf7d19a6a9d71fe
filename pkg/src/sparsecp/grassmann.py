"""Finite Grassmann algebra with Berezin integration.

Elements live in the algebra generated by up to 16 anticommuting
generators g_0 < g_1 < ... (a fixed global order).  A monomial is stored
as the bitmask of its generator subset with its coefficient; products
carry the sign of the merge permutation, so the algebra laws hold exactly
in integer arithmetic.

Integration follows the conventions: int g dg = 1, int 1 dg = 0,
differentials anticommute with each other and with the generators, and a
repeated integral applies the leftmost differential first.  Concretely,
integrating a canonically ordered monomial over g flips sign once for
every generator above g in the monomial.

The module also packages the two identities used as mechanical checks:
the Grassmann Gaussian integral (equal to det B) and the quartic-source
integral whose closed form is det A + b v det Q* + b conj(v) det Q
+ b^2 |v|^2.
"""

from __future__ import annotations

from typing import Dict, List, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "GrassmannElement",
    "scalar",
    "generator",
    "multiply",
    "exp_series",
    "berezin_integrate",
    "verify_gaussian_grassmann",
    "verify_jk",
    "jk_closed_form",
]

MAX_GENERATORS = 16
PRUNE = 1e-15


class GrassmannElement:
    """Immutable element of a finite Grassmann algebra.

    coeffs maps a generator-subset bitmask to its complex coefficient;
    magnitudes below PRUNE are dropped.
    """

    __slots__ = ("num_generators", "coeffs")

    def __init__(self, num_generators: int, coeffs: Dict[int, complex]):
        if not (0 < num_generators <= MAX_GENERATORS):
            raise DomainError(f"need 1..{MAX_GENERATORS} generators")
        self.num_generators = num_generators
        self.coeffs = {k: complex(v) for k, v in coeffs.items()
                       if abs(v) > PRUNE}

    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        return (self.num_generators == other.num_generators
                and self.coeffs == other.coeffs)

    def __repr__(self):
        return f"GrassmannElement(n={self.num_generators}, terms={len(self.coeffs)})"

    @property
    def scalar_part(self) -> complex:
        return self.coeffs.get(0, 0j)

    def __add__(self, other: "GrassmannElement") -> "GrassmannElement":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0j) + v
        return GrassmannElement(self.num_generators, out)

    def __sub__(self, other: "GrassmannElement") -> "GrassmannElement":
        return self + other * (-1)

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            return GrassmannElement(
                self.num_generators,
                {k: v * other for k, v in self.coeffs.items()})
        self._check(other)
        return multiply(self, other)

    __rmul__ = __mul__

    def _check(self, other: "GrassmannElement"):
        if self.num_generators != other.num_generators:
            raise DomainError("generator count mismatch")


def scalar(num_generators: int, value: complex) -> GrassmannElement:
    return GrassmannElement(num_generators, {0: complex(value)})


def generator(num_generators: int, index: int) -> GrassmannElement:
    if not (0 <= index < num_generators):
        raise DomainError(f"generator index {index} out of range")
    return GrassmannElement(num_generators, {1 << index: 1.0 + 0j})


def _merge_sign(a: int, b: int) -> int:
    """Sign of sorting the concatenation of two ordered disjoint subsets."""
    sign = 1
    while b:
        low = b & -b
        # generators of a strictly above this bit each contribute one swap
        if bin(a >> low.bit_length()).count("1") & 1:
            sign = -sign
        b ^= low
    return sign


def multiply(a: GrassmannElement, b: GrassmannElement) -> GrassmannElement:
    """Bilinear anticommutative product; overlapping monomials vanish."""
    if a.num_generators != b.num_generators:
        raise DomainError("generator count mismatch")
    out: Dict[int, complex] = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            if ka & kb:
                continue
            k = ka | kb
            out[k] = out.get(k, 0j) + _merge_sign(ka, kb) * va * vb
    return GrassmannElement(a.num_generators, out)


def exp_series(a: GrassmannElement) -> GrassmannElement:
    """exp of an element with vanishing scalar part; the series is finite."""
    if abs(a.scalar_part) > PRUNE:
        raise DomainError("exp_series needs zero scalar part; split it off first")
    out = scalar(a.num_generators, 1.0)
    term = scalar(a.num_generators, 1.0)
    for k in range(1, a.num_generators + 2):
        term = term * a * (1.0 / k)
        if not term.coeffs:
            break
        out = out + term
    return out


def berezin_integrate(a: GrassmannElement, order: Sequence[int]):
    """Iterated Berezin integral over the listed generators.

    order[0] is applied first.  Returns a complex number when all
    generators are integrated out, otherwise the remaining element.
    """
    seen = set()
    for idx in order:
        if idx in seen:
            raise DomainError(f"generator {idx} listed twice")
        if not (0 <= idx < a.num_generators):
            raise DomainError(f"generator index {idx} out of range")
        seen.add(idx)
    coeffs = a.coeffs
    for idx in order:
        bit = 1 << idx
        nxt: Dict[int, complex] = {}
        for k, v in coeffs.items():
            if not (k & bit):
                continue
            sign = -1 if bin(k >> (idx + 1)).count("1") & 1 else 1
            k2 = k & ~bit
            nxt[k2] = nxt.get(k2, 0j) + sign * v
        coeffs = nxt
    result = GrassmannElement(a.num_generators, coeffs)
    if len(seen) == a.num_generators or all(k == 0 for k in coeffs):
        return result.scalar_part
    return result


def _pairwise_order(d: int) -> List[int]:
    # conjugate generator first in each pair: d gbar_1 d g_1 d gbar_2 d g_2 ...
    order: List[int] = []
    for j in range(d):
        order += [2 * j + 1, 2 * j]
    return order


def verify_gaussian_grassmann(B: np.ndarray) -> float:
    """|engine integral of exp(-gbar B g) - det B| for a d x d matrix, d <= 4."""
    B = np.asarray(B, dtype=complex)
    d = B.shape[0]
    if B.shape != (d, d) or d > 4:
        raise DomainError("verify_gaussian_grassmann needs a square matrix, d <= 4")
    n = 2 * d
    expo = scalar(n, 0.0)
    for i in range(d):
        for j in range(d):
            expo = expo + generator(n, 2 * i + 1) * generator(n, 2 * j) * (-B[i, j])
    value = berezin_integrate(exp_series(expo), _pairwise_order(d))
    return abs(value - np.linalg.det(B))


def jk_closed_form(Q: np.ndarray, v: complex, z1: complex, z2: complex,
                   b: float) -> complex:
    Q = np.asarray(Q, dtype=complex)
    Z = np.array([[z1, 0], [0, z2]], dtype=complex)
    A = np.block([[-Z, Q], [-Q.conj().T, -Z.conj()]])
    det_q = Q[0, 0] * Q[1, 1] - Q[0, 1] * Q[1, 0]
    return (np.linalg.det(A) + b * v * np.conj(det_q)
            + b * np.conj(v) * det_q + b * b * abs(v) ** 2)


def verify_jk(Q: np.ndarray, v: complex, z1: complex, z2: complex,
              b: float) -> float:
    """Residual of the single-site integral against its closed form.

    Builds the quadratic form -Psibar A Psi on the ordered generators
    (phi_1, phi_2, theta_1, theta_2) and the quartic source
    -b (theta_2 theta_1 phibar_2 phibar_1 v
        + conj(v) phi_1 phi_2 thetabar_1 thetabar_2),
    integrates (1 + a4 + a4^2/2) exp(a2) over all eight generators and
    compares with det A + b v det Q* + b conj(v) det Q + b^2 |v|^2.
    """
    Q = np.asarray(Q, dtype=complex)
    if Q.shape != (2, 2):
        raise DomainError("Q must be 2 x 2")
    Z = np.array([[z1, 0], [0, z2]], dtype=complex)
    A = np.block([[-Z, Q], [-Q.conj().T, -Z.conj()]])
    n = 8
    psi = [generator(n, 2 * j) for j in range(4)]       # phi1 phi2 th1 th2
    psb = [generator(n, 2 * j + 1) for j in range(4)]   # their conjugates
    a2 = scalar(n, 0.0)
    for i in range(4):
        for j in range(4):
            a2 = a2 + psb[i] * psi[j] * (-A[i, j])
    phi1, phi2, th1, th2 = psi
    phb1, phb2, thb1, thb2 = psb
    a4 = (th2 * th1 * phb2 * phb1) * (-b * v) \
        + (phi1 * phi2 * thb1 * thb2) * (-b * np.conj(v))
    integrand = (scalar(n, 1.0) + a4 + a4 * a4 * 0.5) * exp_series(a2)
    value = berezin_integrate(integrand, _pairwise_order(4))
    return abs(value - jk_closed_form(Q, v, z1, z2, b))
