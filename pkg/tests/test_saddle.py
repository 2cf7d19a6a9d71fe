import math

import mpmath
import numpy as np
import pytest

from sparsecp.errors import DomainError
from sparsecp.saddle import (
    GridSpec,
    PhasePoint,
    brute_force_max_f0,
    f0,
    saddle_values,
    solve_alpha_roots,
    star_saddle,
)


def f0_mp(t1, t2, x, y, b, z0sq):
    """Independent high-precision second path for f0."""
    with mpmath.workdps(50):
        t1, t2, x, y, b, z0sq = map(mpmath.mpf, (t1, t2, x, y, b, z0sq))
        h = (z0sq + t1 ** 2) * (z0sq + t2 ** 2) + 2 * b * t1 * t2 * x \
            + b ** 2 * (x ** 2 + y ** 2)
        return float(-t1 ** 2 - t2 ** 2 - x ** 2 - y ** 2 + mpmath.log(h))


def z_minus_ref(b):
    return (4 * b * b + 9) / 27 + (4 * b * b + 6) / 27 * math.sqrt(1 + 3 / (2 * b * b))


class TestF0:
    def test_origin_unit_modulus(self):
        for b in (0.0, 0.5, 1.3):
            assert f0(0, 0, 0, 0, PhasePoint(b, 1.0)) == 0.0

    def test_dense_limit_star_value(self):
        z0sq = 0.5
        t = math.sqrt(1 - z0sq)
        got = f0(t, t, 0, 0, PhasePoint(0.0, z0sq))
        star = star_saddle(PhasePoint(0.0, z0sq))
        assert star is not None and star.alpha == pytest.approx(1 - z0sq)
        assert got == pytest.approx(star.value, abs=1e-14)

    def test_second_arithmetic_path(self):
        args = (0.3, 0.7, 0.1, -0.2)
        pt = PhasePoint(0.9, 0.6)
        assert f0(*args, pt) == pytest.approx(f0_mp(*args, 0.9, 0.6), abs=1e-14)

    def test_nonpositive_h0_rejected(self):
        with pytest.raises(DomainError):
            f0(0, 0, 0, 0, PhasePoint(0.0, 0.0))

    def test_symmetries_exact(self):
        rng = np.random.default_rng(7)
        pt = PhasePoint(0.8, 0.7)
        for _ in range(200):
            t1, t2 = rng.uniform(0, 2, 2)
            x, y = rng.uniform(-2, 2, 2)
            assert f0(t1, t2, x, y, pt) == f0(t2, t1, x, y, pt)
            assert f0(t1, t2, x, y, pt) == f0(t1, t2, x, -y, pt)

    def test_equal_t_dominates(self):
        # strict improvement when t1 != t2 and x is replaced by |x|
        rng = np.random.default_rng(11)
        n = 0
        while n < 1000:
            b = rng.uniform(0, 1.4)
            z0sq = rng.uniform(0.05, 2.0)
            t1, t2 = rng.uniform(0, 2.5, 2)
            if abs(t1 - t2) < 1e-3:
                continue
            x, y = rng.uniform(-2, 2, 2)
            pt = PhasePoint(b, z0sq)
            t = math.sqrt((t1 * t1 + t2 * t2) / 2)
            assert f0(t1, t2, x, y, pt) < f0(t, t, abs(x), y, pt)
            n += 1


class TestAlphaRoots:
    def test_root_at_zero_for_unit_modulus(self):
        roots = solve_alpha_roots(PhasePoint(0.5, 1.0))
        assert min(abs(r) for r in roots) <= 1e-13

    def test_factored_case(self):
        roots = solve_alpha_roots(PhasePoint(1.0, 1.0))
        expected = sorted([0.0, 1 - 1 / math.sqrt(2), 1 + 1 / math.sqrt(2)])
        assert roots == pytest.approx(expected, abs=1e-12)

    def test_tangency_double_root(self):
        b = 1.0
        roots = solve_alpha_roots(PhasePoint(b, z_minus_ref(b)))
        a_minus = (2 - math.sqrt(2.5)) / 3
        assert len(roots) == 3
        assert roots[0] == pytest.approx(a_minus, abs=1e-9)
        assert roots[1] == pytest.approx(a_minus, abs=1e-9)

    def test_residuals_and_vieta(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            b = rng.uniform(0.05, 1.6)
            z0sq = rng.uniform(0.01, 2.5)
            pt = PhasePoint(b, z0sq)
            roots = solve_alpha_roots(pt)
            for a in roots:
                res = 2 * a * (1 - a) ** 2 * b * b + 1 - a - z0sq
                assert abs(res) <= 1e-12 * max(1.0, z0sq)
            if len(roots) == 3:
                assert sum(roots) == pytest.approx(2.0, abs=1e-10)
                assert np.prod(roots) == pytest.approx(
                    (z0sq - 1) / (2 * b * b), abs=1e-10)

    def test_needs_positive_b(self):
        with pytest.raises(DomainError):
            solve_alpha_roots(PhasePoint(0.0, 0.5))


class TestStarSaddle:
    def test_dense_limit(self):
        star = star_saddle(PhasePoint(0.0, 0.36))
        assert star is not None
        assert math.sqrt(star.t_star_sq) == pytest.approx(0.8, abs=1e-12)
        assert star.x_star == 0.0
        assert star.alpha == pytest.approx(0.64, abs=1e-12)

    def test_zero_modulus(self):
        star = star_saddle(PhasePoint(0.6, 0.0))
        assert star is not None
        assert math.sqrt(star.t_star_sq) == pytest.approx(0.8, abs=1e-12)
        assert star.x_star == pytest.approx(0.6)
        assert star.alpha == 1.0

    def test_against_grid_oracle(self):
        pt = PhasePoint(1.0, 0.8)
        star = star_saddle(pt)
        assert star is not None
        res = 2 * star.alpha * (1 - star.alpha) ** 2 + 1 - star.alpha - 0.8
        assert abs(res) <= 1e-12
        (t1, t2, x, y), val = brute_force_max_f0(pt)
        t_star = math.sqrt(star.t_star_sq)
        assert t1 == pytest.approx(t_star, abs=1e-6)
        assert t2 == pytest.approx(t_star, abs=1e-6)
        assert x == pytest.approx(star.x_star, abs=1e-6)
        assert abs(y) <= 1e-6
        assert val == pytest.approx(star.value, abs=1e-9)

    def test_absent_above_unit_for_small_b(self):
        assert star_saddle(PhasePoint(0.4, 1.5)) is None

    def test_selected_root_consistency(self):
        # derivative condition, t_*^2 >= 0, h_* identity, scale bound
        rng = np.random.default_rng(5)
        seen = 0
        while seen < 200:
            b = rng.uniform(0.05, 1.45)
            z0sq = rng.uniform(0.05, 2.0)
            star = star_saddle(PhasePoint(b, z0sq))
            if star is None:
                continue
            seen += 1
            a = star.alpha
            assert 0.0 <= a <= 1.0
            assert (6 * a * a - 8 * a + 2) * b * b - 1 <= 1e-9
            assert star.t_star_sq >= 0.0
            assert star.x_star == pytest.approx(a * b)
            assert star.h_star == pytest.approx(
                b * star.x_star + star.t_star_sq + z0sq, abs=1e-10)
            assert b * b <= 1 / (1 - 2 * a * (1 - a)) + 1e-12

    def test_selection_stable_under_perturbation(self):
        for b, z0sq in [(0.7, 0.6), (1.05, 1.02), (1.2, 0.9), (0.9, 1.02)]:
            base = star_saddle(PhasePoint(b, z0sq))
            assert base is not None
            for db in (-1e-9, 1e-9):
                for dz in (-1e-9, 1e-9):
                    pert = star_saddle(PhasePoint(b + db, z0sq + dz))
                    assert pert is not None
                    assert abs(pert.alpha - base.alpha) < 1e-6

    def test_middle_root_selected_above_unit_modulus(self):
        pt = PhasePoint(1.05, 1.02)
        roots = [r for r in solve_alpha_roots(pt) if 0 <= r <= 1]
        assert len(roots) == 2
        star = star_saddle(pt)
        assert star is not None
        assert star.alpha == pytest.approx(max(roots))


class TestSaddleValues:
    def test_zero_value_at_unit_modulus(self):
        assert saddle_values(PhasePoint(0.9, 1.0)).zero.value == 0.0

    def test_v_equals_zero_on_diagonal(self):
        s = saddle_values(PhasePoint(0.81, 0.81))
        assert s.vsaddle is not None
        assert s.vsaddle.value == pytest.approx(s.zero.value, abs=1e-12)

    def test_star_dominates_inside_bulk(self):
        s = saddle_values(PhasePoint(0.5, 0.5))
        assert s.star is not None and s.vsaddle is not None
        assert s.star.value >= s.vsaddle.value
        assert s.star.value >= s.zero.value

    def test_v_present_iff_z0sq_below_b(self):
        assert saddle_values(PhasePoint(0.8, 0.9)).vsaddle is None
        assert saddle_values(PhasePoint(0.8, 0.7)).vsaddle is not None

    def test_zero_modulus_sentinel(self):
        assert saddle_values(PhasePoint(0.5, 0.0)).zero.value == -math.inf


class TestBruteForce:
    def test_star_region(self):
        pt = PhasePoint(0.3, 0.5)
        star = star_saddle(pt)
        (t1, t2, x, y), _ = brute_force_max_f0(pt)
        assert t1 == pytest.approx(math.sqrt(star.t_star_sq), abs=1e-5)
        assert x == pytest.approx(star.x_star, abs=1e-5)

    def test_zero_region(self):
        (t1, t2, x, y), val = brute_force_max_f0(PhasePoint(0.4, 1.5))
        assert max(t1, t2, abs(x), abs(y)) <= 1e-6
        assert val == pytest.approx(math.log(1.5 ** 2), abs=1e-10)

    def test_v_region_circle(self):
        pt = PhasePoint(1.4, 0.2)
        (t1, t2, x, y), val = brute_force_max_f0(pt)
        r0_sq = 1 - 0.2 ** 2 / 1.4 ** 2
        assert max(t1, t2) <= 1e-6
        assert x * x + y * y == pytest.approx(r0_sq, abs=1e-6)
        assert val == pytest.approx(-r0_sq + math.log(1.4 ** 2), abs=1e-9)

    def test_small_grid_rejected(self):
        with pytest.raises(DomainError):
            GridSpec(r=2.0)


class TestPhasePoint:
    def test_finite_size_scale(self):
        pt = PhasePoint.from_matrix_size(8, 4, 0.5)
        assert pt.b == pytest.approx(math.sqrt(2 * 4 / 32))

    def test_fixed_p_scale(self):
        assert PhasePoint.from_p(2.0, 0.1).b == pytest.approx(1.0)

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            PhasePoint(-0.1, 0.5)
        with pytest.raises(DomainError):
            PhasePoint(0.5, -0.1)
