import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cogenlab.errors import ConfigError, InputError
from cogenlab.families import (
    consistency_fixtures,
    critical_beta,
    jordan_generator,
    random_dissipative,
    random_inf_contractive,
    random_invertible,
    random_stable,
    shear,
    shear_cayley_norm,
    shear_inverse,
    shear_inverse_semigroup,
    shear_semigroup,
)
from cogenlab.gridfunc import GridFunction, grid_points
from cogenlab.matrix_core import INF, eigenvalues, mat_exp
from cogenlab.suite import matrix_from_entry, parse_p, run_criterion, run_suite, tolerances_from

seeds = st.integers(0, 2**32 - 1)


class TestFamilies:
    @pytest.mark.parametrize("p", [2.5, 3.0, 4.0, INF])
    def test_critical_beta_is_unit_norm(self, p):
        assert shear_cayley_norm(critical_beta(p), p) == pytest.approx(1.0, rel=1e-14)

    def test_semigroups_match_exponential(self):
        for t in (0.0, 0.4, 3.0):
            assert np.abs(shear_semigroup(1.3, t) - mat_exp(shear(1.3), t)).max() < 1e-14
            assert np.abs(shear_inverse_semigroup(1.3, t) - mat_exp(shear_inverse(1.3), t)).max() < 1e-14

    def test_inverse_family(self):
        assert np.abs(shear_inverse(2.0) @ shear(2.0) - np.eye(2)).max() < 1e-15

    def test_jordan(self):
        J = jordan_generator(2, diagonal=-1.0)
        assert np.array_equal(J, [[-1, 1, 0], [0, -1, 1], [0, 0, -1]])
        with pytest.raises(InputError):
            jordan_generator(-1)

    @given(seeds)
    def test_random_stable(self, seed):
        A = random_stable(4, np.random.default_rng(seed))
        assert np.max(eigenvalues(A).real) < 0

    @given(seeds)
    def test_random_dissipative(self, seed):
        A = random_dissipative(4, np.random.default_rng(seed))
        assert np.max(np.linalg.eigvalsh((A + A.conj().T) / 2)) < 0

    @given(seeds)
    def test_random_inf_contractive(self, seed):
        A = random_inf_contractive(4, np.random.default_rng(seed))
        off = np.abs(A).sum(axis=1) - np.abs(np.diag(A))
        assert np.all(np.diag(A).real + off <= 0)

    @given(seeds)
    def test_random_invertible_avoids_points(self, seed):
        A = random_invertible(4, np.random.default_rng(seed))
        ev = eigenvalues(A)
        for z in (0.0, 0.1, 1.0, 10.0):
            assert np.min(np.abs(ev - z)) > 1e-3

    def test_fixture_composition(self):
        fx = consistency_fixtures(0)
        assert len(fx) == 20
        assert sum(1 for _, _, p, _ in fx if p == 2) >= 10
        assert sum(1 for *_, ok in fx if not ok) == 5


class TestGrid:
    def test_points(self):
        assert grid_points(0.25, 1.0).tolist() == [0, 0.25, 0.5, 0.75, 1.0]

    def test_misaligned_end(self):
        with pytest.raises(InputError):
            grid_points(0.3, 1.0)

    def test_nonfinite(self):
        with pytest.raises(InputError):
            GridFunction(0.1, np.array([0.0, math.inf]))


class TestSuite:
    def test_parse_p(self):
        assert parse_p("inf") == math.inf and parse_p("3") == 3.0
        with pytest.raises(ConfigError):
            parse_p("abc")

    def test_tolerance_override(self):
        assert tolerances_from({"rel_tol": 1e-6}).rel_tol == 1e-6
        with pytest.raises(ConfigError):
            tolerances_from({"bogus": 1})

    def test_inline_matrix(self):
        A = matrix_from_entry({"matrix": [["-1+2i", 0], [0, -1]]}, base_dir=None)
        assert A[0, 0] == -1 + 2j

    def test_run_criterion_needs_params(self):
        with pytest.raises(ConfigError):
            run_criterion("poly_resolvent", -np.eye(1), 2.0, {"k": 0})

    def test_default_expectation_is_pass(self):
        cfg = {"p": "inf", "generators": [{"family": "shear", "beta": 0.5, "criteria": ["contractivity"]}]}
        res = run_suite(cfg)
        assert res.ok and res.rows[0]["grid"]["kind"] == "t"

    def test_per_generator_overrides(self):
        cfg = {
            "p": 2,
            "params": {"M": 1.0},
            "generators": [
                {"family": "shear", "beta": 3, "p": "inf", "params": {"n_max": 5}, "expect": {"vtau_bounded": "fail"}}
            ],
        }
        res = run_suite(cfg)
        assert res.ok and res.rows[0]["p"] == "inf"
