import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.special import eval_genlaguerre, roots_genlaguerre

from cogenlab.errors import InputError
from cogenlab.gridfunc import GridFunction
from cogenlab.laguerre import (
    asymptotic_exponent,
    carlson_ratio,
    laguerre_eval,
    laguerre_explicit,
    laguerre_function,
    laguerre_roots,
    laguerre_sign,
    laguerre_test_function,
    laplace_closed_form,
    laplace_transform,
    segment_rule,
    weighted_abs_integral,
)


class TestEvaluation:
    def test_degree_one(self):
        t = np.linspace(0, 5, 11)
        assert np.allclose(laguerre_eval(1, t), 2 - t, atol=0, rtol=1e-15)

    def test_degree_two(self):
        t = np.linspace(0, 9, 19)
        assert np.allclose(laguerre_eval(2, t), 3 - 3 * t + t**2 / 2, rtol=1e-14, atol=1e-14)

    def test_value_at_zero(self):
        assert laguerre_eval(7, 0.0) == 8.0

    def test_explicit_sum_agrees(self):
        t = np.linspace(0, 50, 201)
        for n in range(21):
            rec = laguerre_eval(n, t)
            ref = laguerre_explicit(n, t)
            scale = np.maximum(np.abs(ref), np.max(np.abs(ref)) * 1e-12)
            assert np.max(np.abs(rec - ref) / scale) < 1e-10

    @pytest.mark.parametrize("n", [5, 40, 150])
    def test_against_scipy(self, n):
        t = np.linspace(0, 4 * n, 97)
        ref = eval_genlaguerre(n, 1, t)
        assert np.allclose(laguerre_eval(n, t), ref, rtol=1e-9, atol=1e-9 * np.abs(ref).max())

    def test_scaled_function_does_not_underflow(self):
        # e^{-t} alone underflows at t = 800, the product does not
        v = laguerre_function(300, np.array([400.0]))
        assert np.isfinite(v).all() and v[0] != 0

    def test_negative_degree(self):
        with pytest.raises(InputError):
            laguerre_eval(-1, 0.0)


class TestRoots:
    def test_degree_one(self):
        assert laguerre_roots(1) == pytest.approx([2.0], rel=1e-15)

    def test_degree_two(self):
        r3 = math.sqrt(3)
        assert laguerre_roots(2) == pytest.approx([3 - r3, 3 + r3], rel=1e-14)

    @pytest.mark.parametrize("n", [10, 60, 199])
    def test_against_scipy(self, n):
        ref, _ = roots_genlaguerre(n, 1)
        assert laguerre_roots(n) == pytest.approx(np.sort(ref), rel=1e-10)

    @given(st.integers(1, 120))
    def test_interlacing(self, n):
        a, b = laguerre_roots(n), laguerre_roots(n + 1)
        assert np.all(b[:-1] < a) and np.all(a < b[1:])

    @given(st.integers(1, 120))
    def test_sign_changes(self, n):
        t = np.linspace(0, laguerre_roots(n)[-1], 20001) / 2
        s = laguerre_sign(n, np.append(t, t[-1] + 1))
        s = s[s != 0]
        assert np.count_nonzero(np.diff(s)) == n

    def test_cached_copy(self):
        r = laguerre_roots(5)
        r[0] = -1
        assert laguerre_roots(5)[0] > 0

    def test_degree_zero(self):
        with pytest.raises(InputError):
            laguerre_roots(0)


class TestIntegrals:
    def test_orthogonality(self):
        # Gauss rule for the weight t e^{-t}; exact for polynomials of degree < 80
        x, w = roots_genlaguerre(40, 1)
        for n in range(11):
            for m in range(11):
                val = np.sum(w * laguerre_eval(n, x) * laguerre_eval(m, x))
                assert val == pytest.approx(n + 1 if n == m else 0.0, abs=1e-8)

    @pytest.mark.parametrize("n", range(1, 12))
    def test_signed_integral(self, n):
        roots = laguerre_roots(n - 1) / 2 if n > 1 else []
        pts, wts = segment_rule(np.concatenate([[0.0], roots, [200.0]]))
        val = wts @ laguerre_function(n - 1, pts)
        assert val == pytest.approx((1 - (-1) ** n) / 2, abs=1e-12)

    def test_zero_degree(self):
        assert weighted_abs_integral(0, 0).value == pytest.approx(1.0, rel=1e-12)

    def test_degree_one(self):
        assert weighted_abs_integral(1, 0).value == pytest.approx(4 / math.e, rel=1e-12)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_zero_degree_moments(self, k):
        assert weighted_abs_integral(0, k).value == pytest.approx(math.factorial(k), rel=1e-12)

    def test_error_estimate_reported(self):
        res = weighted_abs_integral(50, 1)
        assert 0 <= res.abs_error_estimate < 1e-8 * res.value
        assert res.t_cut > laguerre_roots(50)[-1] / 2

    def test_laplace_examples(self):
        assert laplace_transform(1, 2).value == pytest.approx(-2 / 3, abs=1e-12)
        for n in (1, 5, 17):
            assert laplace_transform(n, 1).value == pytest.approx(-1, abs=1e-10)
        for n in (2, 8):
            assert abs(laplace_transform(n, 0).value) < 1e-10

    @given(st.integers(1, 25), st.floats(-0.5, 4), st.floats(-3, 3))
    def test_laplace_identity(self, n, re, im):
        s = complex(re, im)
        assert abs(laplace_transform(n, s).value - laplace_closed_form(n, s)) < 1e-6

    def test_laplace_domain(self):
        with pytest.raises(InputError):
            laplace_transform(3, -1.5)

    def test_short_sweep_rejected(self):
        with pytest.raises(InputError):
            asymptotic_exponent(0, range(20, 30))


class TestCarlson:
    def test_exponential(self):
        f = GridFunction.sample(lambda t: np.exp(-t), 1 / 512, 60.0)
        assert carlson_ratio(f) == pytest.approx(2 ** -0.25, rel=1e-5)

    @given(st.floats(0.01, 100))
    def test_scale_invariance(self, c):
        f = GridFunction.sample(lambda t: np.exp(-t), 1 / 64, 60.0)
        g = GridFunction(f.step, c * f.values)
        assert carlson_ratio(g) == pytest.approx(carlson_ratio(f), rel=1e-12)

    @pytest.mark.parametrize("n", [1, 10, 50])
    @pytest.mark.parametrize("k", [0, 2])
    def test_laguerre_functions(self, n, k):
        f = laguerre_test_function(n, k)
        assert f.tail_max() < 1e-10
        assert carlson_ratio(f) <= 1.0

    def test_zero_function(self):
        with pytest.raises(InputError):
            carlson_ratio(GridFunction(0.1, np.zeros(10)))
