import io
import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from cogenlab.errors import DimensionError, InputError, ParseError, RangeError, SingularityError
from cogenlab.families import shear
from cogenlab.matrix_core import (
    INF,
    dumps_matrix,
    eigenvalues,
    format_complex,
    loads_matrix,
    mat_exp,
    op_p_norm,
    op_p_norm_estimate,
    parse_complex,
    read_matrix,
    resolvent,
    spectrum,
    vec_p_norm,
    write_matrix,
)

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def small_matrices(max_dim=5):
    return st.integers(1, max_dim).flatmap(
        lambda d: st.tuples(arrays(float, (d, d), elements=finite), arrays(float, (d, d), elements=finite))
    ).map(lambda ab: ab[0] + 1j * ab[1])


class TestVectorNorms:
    def test_pythagorean(self):
        assert vec_p_norm([3, 4], 2) == 5.0

    @pytest.mark.parametrize("p", [1, 1.5, 3, INF])
    def test_unit_coordinate(self, p):
        assert vec_p_norm([0, 1, 0, 0], p) == 1.0

    @pytest.mark.parametrize("p", [2.5, 3.0, 7.0])
    def test_shear_column(self, p):
        beta = 2.2
        assert vec_p_norm([-beta / 3, 1 / 3], p) == pytest.approx(((beta**p + 1) / 3**p) ** (1 / p), rel=1e-14)

    def test_large_p_does_not_overflow(self):
        assert vec_p_norm([1e200, 1e200], 50) == pytest.approx(1e200 * 2 ** (1 / 50))

    def test_empty_vector(self):
        with pytest.raises(DimensionError):
            vec_p_norm([], 2)

    @pytest.mark.parametrize("p", [0.5, -1, float("nan")])
    def test_invalid_p(self, p):
        with pytest.raises(InputError):
            vec_p_norm([1.0], p)


class TestOperatorNorms:
    def test_shear_cogenerator_inf(self):
        V = np.array([[0, -3 / 3], [0, 1 / 3]])
        assert op_p_norm(V, INF) == pytest.approx(1.0)

    @pytest.mark.parametrize("p", [2.5, 3.0, 4.0, 10.0])
    def test_shear_cogenerator_generic(self, p):
        beta = 1.7
        V = np.array([[0, -beta / 3], [0, 1 / 3]])
        assert op_p_norm(V, p) == pytest.approx(((beta**p + 1) / 3**p) ** (1 / p), rel=1e-9)

    @pytest.mark.parametrize("p", [1, 1.3, 2, 3, INF])
    def test_identity(self, p):
        assert op_p_norm(np.eye(4), p) == pytest.approx(1.0, rel=1e-12)

    def test_exact_flags(self):
        M = np.array([[1, 2], [3, 4]])
        assert op_p_norm_estimate(M, 1).exact
        assert op_p_norm_estimate(M, 1).value == 6
        assert op_p_norm_estimate(M, INF).value == 7
        est = op_p_norm_estimate(M, 3)
        assert not est.exact and est.agreed >= 2

    def test_witness_attains_value(self):
        rng = np.random.default_rng(1)
        M = rng.standard_normal((4, 4))
        est = op_p_norm_estimate(M, 3)
        x = est.witness
        assert vec_p_norm(M @ x, 3) / vec_p_norm(x, 3) == pytest.approx(est.value, rel=1e-12)

    @given(small_matrices(), st.sampled_from([1.0, 2.0, INF]))
    def test_generic_path_matches_closed_form(self, M, p):
        exact = op_p_norm(M, p)
        generic = op_p_norm_estimate(M, p, force_generic=True).value
        assert generic == pytest.approx(exact, rel=1e-6, abs=1e-12)

    @given(small_matrices(4), st.floats(1.1, 6))
    def test_estimate_is_a_lower_bound_of_riesz_thorin(self, M, p):
        # log-convexity in 1/p gives an upper bound from the exact endpoint norms
        est = op_p_norm_estimate(M, p, restarts=8).value
        theta = 1 / p
        bound = op_p_norm(M, 1) ** theta * op_p_norm(M, INF) ** (1 - theta)
        assert est <= bound * (1 + 1e-9) + 1e-12

    def test_nonfinite_rejected(self):
        with pytest.raises(InputError):
            op_p_norm(np.array([[np.nan]]), 2)


class TestMatrixExponential:
    def test_shear_closed_form(self):
        beta, t = 2.0, 0.7
        want = np.array([[math.exp(-t), beta * (math.exp(-t) - math.exp(-2 * t))], [0, math.exp(-2 * t)]])
        assert np.abs(mat_exp(shear(beta), t) - want).max() < 1e-14

    def test_inverse_shear_closed_form(self):
        beta, t = 3.0, 1.3
        A = np.array([[-1, -beta / 2], [0, -0.5]])
        want = np.array([[math.exp(-t), beta * (math.exp(-t) - math.exp(-t / 2))], [0, math.exp(-t / 2)]])
        assert np.abs(mat_exp(A, t) - want).max() < 1e-14

    def test_zero_generator(self):
        assert np.abs(mat_exp(np.zeros((3, 3)), 5.0) - np.eye(3)).max() <= 2e-16

    def test_batched_matches_scalar(self):
        A = np.array([[0.3, 2.0], [-1.0, -0.4]])
        ts = np.linspace(0, 4, 9)
        stack = mat_exp(A, ts)
        for t, E in zip(ts, stack):
            assert np.abs(E - mat_exp(A, t)).max() < 1e-15

    def test_range_error(self):
        with pytest.raises(RangeError):
            mat_exp(np.eye(2) * 10, 6.0)

    def test_negative_time(self):
        with pytest.raises(InputError):
            mat_exp(np.eye(2), -1.0)

    @given(small_matrices(4), st.floats(0, 4), st.floats(0, 4))
    def test_semigroup_law(self, M, s, t):
        A = M * min(1.0, 5.0 / max(np.abs(M).sum(axis=0).max(), 1e-300))
        lhs = mat_exp(A, s + t)
        rhs = mat_exp(A, s) @ mat_exp(A, t)
        assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())

    @given(small_matrices(4), st.floats(0, 2))
    def test_agrees_with_scipy(self, M, t):
        A = M * min(1.0, 5.0 / max(np.abs(M).sum(axis=0).max(), 1e-300))
        ref = scipy.linalg.expm(t * A)
        assert np.abs(mat_exp(A, t) - ref).max() <= 1e-11 * max(1.0, np.abs(ref).max())


class TestResolventAndSpectrum:
    def test_scalar_zero(self):
        assert np.allclose(resolvent(np.zeros((3, 3)), 2.0), np.eye(3) / 2, atol=0)

    def test_shear_at_one(self):
        beta = 1.25
        want = np.array([[0.5, beta / 6], [0, 1 / 3]])
        assert np.abs(resolvent(shear(beta), 1.0) - want).max() < 1e-15

    def test_in_spectrum(self):
        with pytest.raises(SingularityError) as info:
            resolvent(shear(1.0), -2.0)
        assert info.value.point == -2.0

    @given(small_matrices(4), st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False))
    def test_inverse_identity(self, M, lam):
        ev = np.linalg.eigvals(M)
        if np.min(np.abs(ev - lam)) < 0.1 or np.linalg.cond(lam * np.eye(len(M)) - M) > 1e6:
            return
        R = resolvent(M, lam)
        assert np.abs((lam * np.eye(len(M)) - M) @ R - np.eye(len(M))).max() < 1e-10

    def test_triangular_spectrum(self):
        rep = spectrum(np.array([[0, -1], [0, 1 / 3]]))
        assert sorted(rep.eigenvalues.real) == pytest.approx([0, 1 / 3])
        assert not rep.unit_eigenvalue_flag

    def test_identity_flag(self):
        rep = spectrum(np.eye(3))
        assert rep.unit_eigenvalue_flag and rep.spectral_radius == pytest.approx(1.0)

    def test_repeated_eigenvalue(self):
        rep = spectrum(np.array([[-1, -2], [0, -1]]))
        assert np.allclose(rep.eigenvalues, [-1, -1]) and rep.spectral_radius == 1.0

    @given(st.integers(1, 6).flatmap(lambda d: arrays(float, (d, d), elements=finite)))
    def test_triangular_property(self, M):
        T = np.triu(M)
        ev = np.sort_complex(eigenvalues(T))
        assert np.allclose(ev, np.sort_complex(np.diag(T).astype(complex)), atol=1e-9)


class TestMatrixFiles:
    @pytest.mark.parametrize(
        "token,value",
        [("1+2i", 1 + 2j), ("-0.5-3i", -0.5 - 3j), ("2+i", 2 + 1j), ("-i", -1j), ("4", 4), ("1e-3-2.5e+4i", 1e-3 - 2.5e4j)],
    )
    def test_parse(self, token, value):
        assert parse_complex(token) == value

    @pytest.mark.parametrize("token", ["abc", "nan", "1+infi", ""])
    def test_parse_rejects(self, token):
        with pytest.raises(ParseError):
            parse_complex(token)

    def test_format_digits(self):
        assert format_complex(1 / 3 + 2j) == "0.33333333333333331+2i"

    @given(small_matrices(5))
    def test_round_trip_bit_exact(self, M):
        back = loads_matrix(dumps_matrix(M))
        assert back.tobytes() == M.astype(complex).tobytes()

    def test_file_round_trip(self, tmp_path):
        M = np.array([[1 / 7, -2e-300j], [np.pi, 1e300]])
        path = tmp_path / "m.txt"
        write_matrix(path, M)
        assert path.read_text().splitlines()[0] == "dim 2"
        assert np.array_equal(read_matrix(path), M)

    def test_stream_writer(self):
        buf = io.StringIO()
        write_matrix(buf, np.eye(1))
        assert buf.getvalue() == "dim 1\n1+0i\n"

    @pytest.mark.parametrize(
        "text", ["", "dim x\n", "dim 2\n1 2\n", "dim 2\n1 2 3\n4 5\n", "dim 1\n1 2\n", "1 2\n3 4\n"]
    )
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            loads_matrix(text)
