import csv
import math

import numpy as np
import pytest

from sparsecp.errors import DomainError
from sparsecp.phase import (
    ALPHA_G,
    B_LENS,
    H,
    CurveTable,
    Region,
    W,
    alpha0,
    alpha_pm,
    b0,
    b1,
    b_pm,
    classify_by_argmax,
    classify_by_curves,
    curve_gamma1,
    curve_gamma2,
    curve_gamma3,
    export_grid,
    g,
    phase_boundary_distance,
    s0,
    s1,
    star_exists,
    z_minus,
)
from sparsecp.saddle import PhasePoint, saddle_values, star_saddle

SQRT2 = math.sqrt(2)


class TestZMinus:
    def test_value_at_inv_sqrt2(self):
        assert z_minus(1 / SQRT2) == pytest.approx(1.0, abs=1e-14)

    def test_large_b_asymptotics(self):
        b = 1e3
        assert z_minus(b) / (8 * b * b / 27) == pytest.approx(1.0, abs=1e-3)

    def test_diagonal_crossing(self):
        assert 1.123 <= b0() <= 1.133
        assert z_minus(b0()) == pytest.approx(b0(), abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            z_minus(0.0)


class TestAlphaPM:
    def test_at_inv_sqrt2(self):
        am, ap = alpha_pm(1 / SQRT2)
        assert am == pytest.approx(0.0, abs=1e-14)
        assert ap == pytest.approx(4 / 3, abs=1e-14)

    def test_at_sqrt2(self):
        am, _ = alpha_pm(SQRT2)
        assert am == pytest.approx((2 - math.sqrt(7 / 4)) / 3, abs=1e-14)

    def test_plus_always_above_one(self):
        rng = np.random.default_rng(0)
        for b in rng.uniform(0.01, 5.0, 200):
            assert alpha_pm(b)[1] > 1.0


class TestBPM:
    def test_half(self):
        bm, bp = b_pm(0.5)
        assert bm == pytest.approx(2 - SQRT2, abs=1e-14)
        assert bp == pytest.approx(2 + SQRT2, abs=1e-14)

    def test_bounds(self):
        rng = np.random.default_rng(1)
        for a in rng.uniform(0.01, 0.99, 200):
            bm, bp = b_pm(a)
            assert bp > SQRT2
            assert bm * bm <= 1 / (1 - 2 * a * (1 - a)) + 1e-12


class TestHg:
    def test_h_zero_on_locus(self):
        rng = np.random.default_rng(2)
        for a in rng.uniform(0.02, 0.98, 20):
            assert abs(H(1 - 2 * a * (1 - a), a)) <= 1e-10

    def test_h_prime_zero_on_locus(self):
        a = 0.3
        s = 1 - 2 * a * (1 - a)
        eps = 1e-6
        deriv = (H(s + eps, a) - H(s - eps, a)) / (2 * eps)
        assert abs(deriv) <= 1e-8

    def test_g_sign_flip(self):
        for a in (0.05, 0.12, ALPHA_G - 1e-3):
            assert g(1 - 2 * a * (1 - a), a) < 0
        for a in (ALPHA_G + 1e-3, 0.3, 0.6):
            assert g(1 - 2 * a * (1 - a), a) >= 0


class TestS1:
    def test_left_endpoint(self):
        assert s1(ALPHA_G) == pytest.approx((5 - math.sqrt(5)) / 4, abs=1e-10)

    def test_scale_at_alpha0(self):
        assert 1.10 <= 1 / math.sqrt(s1(alpha0())) <= 1.12

    def test_increasing_near_left_endpoint(self):
        a = ALPHA_G + 1e-4
        assert (s1(a + 1e-5) - s1(a)) > 0

    def test_strictly_increasing_to_alpha0(self):
        grid = np.linspace(ALPHA_G + 1e-9, alpha0(), 100)
        vals = [s1(a) for a in grid]
        assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))

    def test_residual(self):
        rng = np.random.default_rng(3)
        for a in rng.uniform(ALPHA_G, 0.5, 25):
            assert abs(H(s1(a), a)) <= 1e-10


class TestAlpha0:
    def test_value(self):
        # frozen from a 50-digit evaluation of the defining equation,
        # cross-checked against the direct saddle-value gap
        assert alpha0() == pytest.approx(0.205365546621029, abs=1e-9)

    def test_defining_equation(self):
        a0 = alpha0()
        assert abs(s1(a0) - s0(a0)) <= 1e-8

    def test_bracket(self):
        assert ALPHA_G < alpha0() < 1 - 1 / SQRT2


class TestGamma1:
    def test_endpoints(self):
        assert curve_gamma1(1.0) == pytest.approx(0.0, abs=1e-14)
        assert curve_gamma1(SQRT2) == pytest.approx(1.0, abs=1e-14)

    def test_value_and_tsq_locus(self):
        z = curve_gamma1(1.2)
        assert z == pytest.approx((1.44 - 1.2 * math.sqrt(0.56)) / 2, abs=1e-14)
        star = star_saddle(PhasePoint(1.2, z))
        assert star is not None
        assert star.t_star_sq == pytest.approx(0.0, abs=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            curve_gamma1(0.9)


class TestGamma2:
    def test_diagonal_stretch(self):
        split = 1 / math.sqrt(s1(alpha0()))
        for b in np.linspace(1.0, split - 1e-6, 7):
            assert curve_gamma2(b) == pytest.approx(b, abs=1e-8)

    def test_branch_continuity(self):
        b = B_LENS
        left = curve_gamma2(b - 1e-12)
        right = (b * b + b * math.sqrt(2 - b * b)) / 2
        assert left == pytest.approx(right, abs=1e-8)

    def test_upper_branch_closed_form(self):
        for b in np.linspace(B_LENS, SQRT2, 9):
            expected = (b * b + b * math.sqrt(max(0.0, 2 - b * b))) / 2
            assert curve_gamma2(b) == expected

    def test_right_endpoint(self):
        assert curve_gamma2(SQRT2) == pytest.approx(1.0, abs=1e-14)

    def test_dominance_crossover(self):
        # on the true boundary stretch the star and v values coincide
        for b in np.linspace(b1() + 1e-3, SQRT2 - 1e-9, 8):
            z = curve_gamma2(b)
            s = saddle_values(PhasePoint(b, z))
            assert s.star is not None and s.vsaddle is not None
            assert s.star.value == pytest.approx(s.vsaddle.value, abs=1e-8)


class TestGamma3:
    def test_w_nonnegative_at_cap(self):
        for b in (0.8, 1.0, 1.1):
            assert W(1 - 1 / (b * SQRT2), b) >= 0

    def test_w_increasing(self):
        b = 1.0
        am, _ = alpha_pm(b)
        cap = 1 - 1 / (b * SQRT2)
        eps = 1e-7
        for a in np.linspace(am + 10 * eps, cap - 10 * eps, 50):
            assert (W(a + eps, b) - W(a - eps, b)) / (2 * eps) >= -1e-9

    def test_diagonal_crossing(self):
        assert 1.10 <= b1() <= 1.12
        assert curve_gamma3(b1()) == pytest.approx(b1(), abs=1e-10)

    def test_meets_unit_line_at_inv_sqrt2(self):
        assert curve_gamma3(1 / SQRT2) == pytest.approx(1.0, abs=1e-10)

    def test_dominance_crossover(self):
        for b in np.linspace(1 / SQRT2 + 1e-3, b1() - 1e-3, 8):
            z = curve_gamma3(b)
            s = saddle_values(PhasePoint(b, z))
            assert s.star is not None
            assert s.star.value == pytest.approx(s.zero.value, abs=1e-8)


class TestClassifiers:
    def test_argmax_examples(self):
        assert classify_by_argmax(PhasePoint(0.3, 0.5)) is Region.OMEGA1
        assert classify_by_argmax(PhasePoint(0.3, 1.5)) is Region.OMEGA3
        assert classify_by_argmax(PhasePoint(1.4, 0.2)) is Region.OMEGA2

    def test_curve_examples(self):
        assert classify_by_curves(PhasePoint(0.5, 0.9)) is Region.OMEGA1
        assert classify_by_curves(PhasePoint(1.3, 0.3)) is Region.OMEGA2
        assert classify_by_curves(PhasePoint(0.8, 1.6)) is Region.OMEGA3

    def test_boundary_flag(self):
        # points on the v/zero diagonal tie exactly
        assert classify_by_argmax(PhasePoint(1.3, 1.3)) is Region.BOUNDARY

    def test_region_respects_existence(self):
        rng = np.random.default_rng(4)
        for _ in range(400):
            b = rng.uniform(0.01, 1.45)
            z = rng.uniform(0.01, 2.0)
            r = classify_by_curves(PhasePoint(b, z))
            if r is Region.OMEGA1:
                assert star_exists(b, z)
                assert star_saddle(PhasePoint(b, z)) is not None
            if r is Region.OMEGA2:
                assert z <= b

    def test_agreement_on_grid(self):
        match, checked = _classifier_agreement(nb=60, nz=60)
        assert match / checked >= 0.995

    def test_v_zero_ordering(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            b = rng.uniform(0.05, 1.6)
            z = rng.uniform(0.0, 1.0) * b
            s = saddle_values(PhasePoint(b, z))
            if z > 0:
                assert s.vsaddle.value >= s.zero.value
        s = saddle_values(PhasePoint(0.77, 0.77))
        assert s.vsaddle.value == pytest.approx(s.zero.value, abs=1e-13)


def _classifier_agreement(nb, nz, b_hi=1.45, z_hi=2.0):
    db, dz = b_hi / nb, z_hi / nz
    tube = 2 * (dz + db)
    match = checked = 0
    for i in range(1, nb + 1):
        for j in range(1, nz + 1):
            b, z = i * db, j * dz
            pt = PhasePoint(b, z)
            ra = classify_by_argmax(pt)
            rc = classify_by_curves(pt)
            checked += 1
            if ra is rc or ra is Region.BOUNDARY:
                match += 1
            else:
                assert phase_boundary_distance(b, z) <= tube, \
                    f"disagreement far from boundary at ({b}, {z}): {ra} vs {rc}"
    return match, checked


class TestExportGrid:
    def test_export(self, tmp_path):
        grid = tmp_path / "grid.csv"
        curves = tmp_path / "curves.csv"
        tables = export_grid((0.0, 1.5, 40), (0.0, 2.0, 40),
                             str(grid), str(curves), curve_samples=60)
        rows = list(csv.DictReader(grid.open()))
        assert len(rows) == 1600
        by_pt = {(round(float(r["b"]), 6), round(float(r["z0sq"]), 6)): r
                 for r in rows}

        def region_at(b, z):
            key = min(by_pt, key=lambda k: (k[0] - b) ** 2 + (k[1] - z) ** 2)
            return int(by_pt[key]["region"])

        assert region_at(0.2, 0.5) == 1
        assert region_at(1.4, 0.1) == 2
        assert region_at(0.2, 1.5) == 3

        crows = list(csv.DictReader(curves.open()))
        names = {r["curve"] for r in crows}
        assert names == {"gamma1", "gamma2", "gamma3", "z_minus"}
        for r in crows:
            assert float(r["residual"]) <= 1e-8
        for t in tables:
            assert isinstance(t, CurveTable)
            assert max(t.residuals) <= t.tolerance

    def test_deterministic(self, tmp_path):
        a1, a2 = tmp_path / "g1.csv", tmp_path / "g2.csv"
        c1, c2 = tmp_path / "c1.csv", tmp_path / "c2.csv"
        export_grid((0.0, 1.5, 10), (0.0, 2.0, 10), str(a1), str(c1), curve_samples=20)
        export_grid((0.0, 1.5, 10), (0.0, 2.0, 10), str(a2), str(c2), curve_samples=20)
        assert a1.read_bytes() == a2.read_bytes()
        assert c1.read_bytes() == c2.read_bytes()

    def test_resolution_validated(self, tmp_path):
        with pytest.raises(DomainError):
            export_grid((0.0, 1.5, 1), (0.0, 2.0, 10),
                        str(tmp_path / "g.csv"), str(tmp_path / "c.csv"))
