import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from gpbacklund.calculus import SmoothMap, derivative, schwarzian
from gpbacklund.errors import DomainError, NoRealRoot, Pole, RangeError
from gpbacklund.functional import (Mobius, PolyG, ShiftMap, apply_mobius,
                                   conjugate_f, solve_f)


class TestPolyG:
    @pytest.mark.parametrize("n,eta,x,expected", [
        (1, 0.0, 2.0, 2.0),
        (1, 1.0, 1.0, 2.0),
        (2, 1.0, 1.0, 2.0),
    ])
    def test_value(self, n, eta, x, expected):
        assert PolyG(n, eta).value(x) == pytest.approx(expected)

    @pytest.mark.parametrize("n,eta,x,expected", [
        (1, 0.0, 5.0, 1.0),
        (1, 1.0, 1.0, 3.0),
        (2, 1.0, math.sqrt(2.0), 10.0 * math.sqrt(2.0)),
    ])
    def test_prime(self, n, eta, x, expected):
        assert PolyG(n, eta).prime(x) == pytest.approx(expected)

    def test_rejects_nonpositive_argument(self):
        g = PolyG(2, 0.5)
        with pytest.raises(DomainError):
            g.value(0.0)
        with pytest.raises(DomainError):
            g.prime(-1.0)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            PolyG(0, 1.0)
        with pytest.raises(ValueError):
            PolyG(1, -0.5)

    def test_inverse_round_trip(self):
        g = PolyG(3, 0.7)
        for x in (0.2, 1.0, 2.5, 7.0):
            assert g.inverse(g.value(x)) == pytest.approx(x, rel=1e-13)

    def test_higher_derivatives_match_fd(self):
        g = PolyG(3, 0.4)
        m = g.as_smooth_map(with_derivatives=False)
        for x in (0.7, 1.3, 2.1):
            assert derivative(m, 2, x) == pytest.approx(g.second(x), rel=1e-7)
            assert derivative(m, 3, x) == pytest.approx(g.third(x), rel=1e-6)

    @given(n=st.sampled_from([1, 2, 3]), eta=st.floats(0.0, 2.0),
           x=st.floats(0.05, 8.0), y=st.floats(0.05, 8.0))
    @settings(max_examples=80, deadline=None)
    def test_strictly_increasing(self, n, eta, x, y):
        assume(abs(x - y) > 1e-9)
        g = PolyG(n, eta)
        lo, hi = sorted((x, y))
        assert g.value(hi) > g.value(lo) > 0.0


class TestMobius:
    def test_identity(self):
        assert apply_mobius(Mobius(1, 0, 0, 1), 7.0) == 7.0

    def test_translation(self):
        assert apply_mobius(Mobius(1, 3, 0, 1), 2.0) == 5.0

    def test_generic(self):
        assert apply_mobius(Mobius(2, 1, 1, 1), 1.0) == pytest.approx(1.5)

    def test_pole_raises(self):
        m = Mobius(1, 0, 1, -2)
        with pytest.raises(Pole):
            m(2.0)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            Mobius(2, 4, 1, 2)

    def test_inverse_round_trip(self):
        m = Mobius(2, 1, 1, 1)
        w = 0.37
        assert m.inverse()(m(w)) == pytest.approx(w, rel=1e-14)

    def test_derivative(self):
        m = Mobius(2, 1, 1, 1)
        w = 0.5
        fd = (m(w + 1e-6) - m(w - 1e-6)) / 2e-6
        assert m.derivative(w) == pytest.approx(fd, rel=1e-8)

    @given(st.tuples(*[st.floats(-3, 3) for _ in range(8)]))
    @settings(max_examples=100, deadline=None)
    def test_composition_determinant_product(self, coeffs):
        a1, b1, c1, d1, a2, b2, c2, d2 = coeffs
        assume(abs(a1 * d1 - b1 * c1) > 1e-3)
        assume(abs(a2 * d2 - b2 * c2) > 1e-3)
        m1 = Mobius(a1, b1, c1, d1)
        m2 = Mobius(a2, b2, c2, d2)
        comp = m1.compose(m2)
        assert comp.det == pytest.approx(m1.det * m2.det, rel=1e-12)

    def test_compose_acts_like_composition(self):
        m1 = Mobius(2, 1, 1, 1)
        m2 = Mobius(1, -0.5, 0.3, 1)
        w = 0.8
        assert m1.compose(m2)(w) == pytest.approx(m1(m2(w)), rel=1e-13)


class TestSolveF:
    def test_pure_translation(self):
        shift = ShiftMap(PolyG(1, 0.0), 3.0)
        f, fp = solve_f(shift, 2.0)
        assert f == pytest.approx(5.0)
        assert fp == pytest.approx(1.0)

    def test_quadratic_case(self):
        # oracle: f^2 + f - 4 = 0 => f = (-1 + sqrt(17)) / 2
        shift = ShiftMap(PolyG(1, 1.0), 2.0)
        f, fp = solve_f(shift, 1.0)
        assert f == pytest.approx((-1 + math.sqrt(17)) / 2, rel=1e-14)
        assert fp == pytest.approx(3 / math.sqrt(17), rel=1e-14)

    def test_quartic_case(self):
        # oracle: f^4 + f^2 - 6 = 0 => f^2 = 2
        shift = ShiftMap(PolyG(2, 1.0), 4.0)
        f, fp = solve_f(shift, 1.0)
        assert f == pytest.approx(math.sqrt(2.0), rel=1e-14)
        assert fp == pytest.approx(6 / (10 * math.sqrt(2.0)), rel=1e-14)

    def test_no_real_root(self):
        shift = ShiftMap(PolyG(1, 2.0), -5.0)
        with pytest.raises(NoRealRoot):
            shift.f(0.1)

    def test_negative_target_domain_error(self):
        # eta = 0 keeps the discriminant trivially valid, G(x) + K < 0
        shift = ShiftMap(PolyG(1, 0.0), -5.0)
        with pytest.raises(DomainError):
            shift.f(1.0)

    def test_valid_domain_left_endpoint(self):
        shift = ShiftMap(PolyG(2, 0.5), -3.0)
        x_min = shift.x_min
        assert shift.g.value(x_min) == pytest.approx(3.0, rel=1e-12)
        assert shift.f(x_min * 1.01) > 0.0
        with pytest.raises(DomainError):
            shift.f(x_min * 0.99)

    def test_vectorized(self):
        shift = ShiftMap(PolyG(2, 1.0), 1.5)
        xs = np.linspace(0.5, 4.0, 11)
        fs = shift.f(xs)
        assert fs.shape == xs.shape
        assert np.allclose(shift.g.value(fs), shift.g.value(xs) + 1.5,
                           rtol=1e-13, atol=1e-13)

    @given(n=st.sampled_from([1, 2, 3]), eta=st.floats(0.0, 2.0),
           K=st.floats(-2.0, 3.0), x=st.floats(0.1, 10.0))
    @settings(max_examples=150, deadline=None)
    def test_translation_property(self, n, eta, K, x):
        g = PolyG(n, eta)
        t = g.value(x) + K
        assume(t > 1e-6)
        assume(t < 5e4)  # double-precision floor of the absolute criterion
        shift = ShiftMap(g, K)
        f = shift.f(x)
        assert abs(g.value(f) - g.value(x) - K) < 1e-10

    @given(n=st.sampled_from([1, 2, 3]), eta=st.floats(0.0, 2.0),
           K=st.floats(-1.0, 3.0), x=st.floats(0.1, 10.0))
    @settings(max_examples=150, deadline=None)
    def test_root_postcondition_relative(self, n, eta, K, x):
        """Relative form of the root residual bound, valid at any magnitude."""
        g = PolyG(n, eta)
        t = g.value(x) + K
        assume(t > 1e-6)
        f = ShiftMap(g, K).f(x)
        assert abs(g.value(f) - t) < 1e-12 * max(1.0, abs(t))

    def test_semigroup(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            n = int(rng.integers(1, 4))
            eta = rng.uniform(0.0, 2.0)
            x = rng.uniform(0.2, 5.0)
            k1 = rng.uniform(0.0, 2.0)
            k2 = rng.uniform(0.0, 2.0)
            g = PolyG(n, eta)
            f21 = ShiftMap(g, k1).f(ShiftMap(g, k2).f(x))
            f_sum = ShiftMap(g, k1 + k2).f(x)
            assert abs(f21 - f_sum) < 1e-9

    def test_fprime_matches_finite_difference(self):
        shift = ShiftMap(PolyG(2, 0.8), 1.2)
        m = shift.as_smooth_map()
        for x in (0.5, 1.0, 2.0, 4.0):
            assert shift.f_prime(x) == pytest.approx(derivative(m, 1, x),
                                                     abs=1e-6)

    def test_second_and_third_match_finite_difference(self):
        shift = ShiftMap(PolyG(2, 0.8), 1.2)
        m = shift.as_smooth_map()
        for x in (0.8, 1.5, 3.0):
            assert shift.f_second(x) == pytest.approx(derivative(m, 2, x),
                                                      abs=1e-6)
            assert shift.f_third(x) == pytest.approx(derivative(m, 3, x),
                                                     abs=1e-5)

    def test_q_identity(self):
        """Q(x) = f'(x)^2 Q(f(x)) + {f, x} with Q the Schwarzian of G."""
        worst = 0.0
        for n, eta, K in [(1, 0.5, 0.5), (1, 1.0, 1.0), (2, 0.5, 1.0),
                          (2, 1.0, 0.5), (3, 0.5, 0.5)]:
            g = PolyG(n, eta)
            shift = ShiftMap(g, K)
            g_map = g.as_smooth_map()
            f_map = shift.as_smooth_map()  # finite differences of solve_f
            for x in np.linspace(0.8, 3.0, 12):
                f, fp = solve_f(shift, float(x))
                q_here = schwarzian(g_map, float(x))
                q_there = schwarzian(g_map, float(f))
                dev = abs(q_here - fp * fp * q_there - schwarzian(f_map, float(x)))
                worst = max(worst, dev)
        assert worst < 1e-5


class TestConjugateF:
    def test_translation_through_identity(self):
        w = SmoothMap(eval=lambda x: x, d1=lambda x: 1.0)
        f = conjugate_f(w, lambda y: y, Mobius(1, 3.0, 0, 1))
        assert f.eval(2.0) == pytest.approx(5.0, rel=1e-14)
        assert f.d1(2.0) == pytest.approx(1.0, rel=1e-12)

    def test_matches_solve_f_for_poly_g(self):
        g = PolyG(2, 1.0)
        K = 1.5
        w = g.as_smooth_map(domain=(0.0, math.inf))
        f = conjugate_f(w, g.inverse, Mobius(1, K, 0, 1))
        shift = ShiftMap(g, K)
        for x in np.linspace(0.3, 4.0, 15):
            assert abs(f.eval(float(x)) - shift.f(float(x))) < 1e-10

    def test_identity_mobius_fixed_point(self):
        w = SmoothMap(eval=lambda x: x * x, d1=lambda x: 2 * x,
                      domain=(0.0, 10.0))
        f = conjugate_f(w, math.sqrt, Mobius(1, 0, 0, 1))
        assert f.eval(3.0) == pytest.approx(3.0, rel=1e-14)

    def test_conjugation_identity_holds(self):
        g = PolyG(1, 0.5)
        w = g.as_smooth_map(domain=(0.0, math.inf))
        m = Mobius(1, 0.7, 0, 1)
        f = conjugate_f(w, g.inverse, m)
        for x in (0.5, 1.0, 2.0):
            assert abs(w.eval(f.eval(x)) - m(w.eval(x))) < 1e-10

    def test_range_escape(self):
        w = SmoothMap(eval=lambda x: x * x, d1=lambda x: 2 * x,
                      domain=(0.0, 2.0))
        f = conjugate_f(w, math.sqrt, Mobius(1, 10.0, 0, 1))
        with pytest.raises(RangeError):
            f.eval(1.0)
