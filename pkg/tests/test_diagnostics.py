import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from calibmix import (DataError, McConfig, MixtureParams, ParamError,
                      blindness_suite, blom_weights, diagnostic_report,
                      moment_ratios, residual_diagnostics, shapiro_type_w,
                      von_neumann_ratio)
from calibmix.diagnostics import sample_from_csv

finite_samples = st.lists(
    st.floats(-50.0, 50.0), min_size=4, max_size=24).filter(
    lambda xs: max(xs) - min(xs) > 1e-4)


class TestResidualDiagnostics:
    def test_hand_example(self):
        res = residual_diagnostics([1.0, 3.0, 5.0])
        assert np.allclose(res.residuals, [-2.0, 0.0, 2.0])
        assert res.sample_sd == pytest.approx(2.0)
        assert np.allclose(res.studentized, [-1.2247, 0.0, 1.2247], atol=1e-4)

    def test_loo_downdate_matches_refits(self):
        rng = np.random.default_rng(3)
        y = rng.normal(size=9)
        res = residual_diagnostics(y)
        n = y.size
        for i in range(n):
            rest = np.delete(y, i)
            loo_sd = rest.std(ddof=1)
            expect = res.residuals[i] / (loo_sd * np.sqrt(1 - 1 / n))
            assert res.r_student[i] == pytest.approx(expect, rel=1e-10)

    def test_constant_sample_rejected(self):
        with pytest.raises(ParamError):
            residual_diagnostics([2.0, 2.0, 2.0, 2.0])

    @settings(max_examples=30, deadline=None)
    @given(finite_samples, st.floats(-5.0, 5.0), st.floats(0.1, 4.0))
    def test_affine_invariance(self, y, a, b):
        y = np.asarray(y)
        r1 = residual_diagnostics(y)
        r2 = residual_diagnostics(a + b * y)
        assert np.allclose(r1.studentized, r2.studentized, atol=1e-8)


class TestVonNeumannRatio:
    def test_hand_examples(self):
        assert von_neumann_ratio(np.array([-2.0, 0.0, 2.0])) == pytest.approx(1.0)
        assert von_neumann_ratio(np.array([1.0, -1.0, 1.0, -1.0])) == pytest.approx(3.0)

    def test_scale_invariance(self):
        r = np.array([0.3, -1.2, 0.9, 0.0])
        assert von_neumann_ratio(r) == pytest.approx(von_neumann_ratio(10.0 * r))

    def test_custom_matrix(self):
        r = np.array([-2.0, 0.0, 2.0])
        # explicit first-difference Gram matrix reproduces the default
        b = np.array([[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
        assert von_neumann_ratio(r, b) == pytest.approx(von_neumann_ratio(r))

    def test_zero_vector_rejected(self):
        with pytest.raises(ParamError):
            von_neumann_ratio(np.zeros(4))


class TestShapiroTypeW:
    def test_hand_example(self):
        assert shapiro_type_w([1.0, 2.0, 3.0], [-1.0, 0.0, 1.0]) == pytest.approx(2.0)

    def test_zero_weights_rejected(self):
        with pytest.raises(ParamError):
            shapiro_type_w([1.0, 2.0, 3.0], [0.0, 0.0, 0.0])

    def test_nonzero_sum_weights_rejected(self):
        with pytest.raises(ParamError):
            shapiro_type_w([1.0, 2.0, 3.0], [0.5, 0.2, 0.4])

    def test_default_weights_properties(self):
        w = blom_weights(12)
        assert abs(w.sum()) < 1e-12
        assert np.allclose(w, -w[::-1])   # antisymmetric
        assert np.dot(w, w) == pytest.approx(1.0)

    def test_w_in_unit_interval_with_default_weights(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            y = rng.normal(size=10)
            assert 0.0 <= shapiro_type_w(y) <= 1.0

    @settings(max_examples=30, deadline=None)
    @given(finite_samples, st.floats(-5.0, 5.0), st.floats(0.05, 4.0))
    def test_affine_invariance(self, y, a, b):
        got1 = shapiro_type_w(y)
        got2 = shapiro_type_w(a + b * np.asarray(y))
        assert got1 == pytest.approx(got2, rel=1e-9, abs=1e-12)


class TestMomentRatios:
    def test_symmetric_sample(self):
        b1, _ = moment_ratios([-1.0, 0.0, 1.0, 0.0])
        assert b1 == pytest.approx(0.0, abs=1e-15)

    def test_hand_example(self):
        b1, b2 = moment_ratios([0.0, 0.0, 1.0, 1.0])
        assert b1 == pytest.approx(0.0)
        assert b2 == pytest.approx(1.0)

    def test_invariance_with_sign_flip(self):
        y = np.array([0.2, 1.5, -0.7, 2.2, 0.0])
        assert moment_ratios(y) == pytest.approx(moment_ratios(3.0 - 2.0 * y))

    def test_kurtosis_floor(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            b1, b2 = moment_ratios(rng.normal(size=8))
            assert b2 >= 1.0 + b1 - 1e-9  # b1 = skewness^2, so b2 >= 1 + b1


class TestBlindnessSuite:
    def test_identities_and_ks(self):
        p = MixtureParams(n=10, beta0=1.0, sigma0=1.0, mu_z=1.0, sigma_z=1.0,
                          beta1=1.0, sigma1=1.0)
        report = blindness_suite(p, McConfig(replications=10_000, seed=3))
        assert report.identities_hold
        assert max(report.max_rel_dev.values()) < 1e-10
        # beta1_hat ~ N(1,1): negative draws occur and are exercised
        assert report.negative_slope_count > 100
        assert report.indistinguishable
        assert max(report.ks.values()) < report.ks_band

    def test_sign_flip_identity(self):
        # a replication with beta1_hat < 0 still satisfies t(Y) = sign * t(Z)
        from calibmix.diagnostics import studentized_batch
        rng = np.random.default_rng(9)
        z = rng.normal(size=(1, 8))
        y = 2.0 - 1.7 * z
        t_y = studentized_batch(y)
        t_z = studentized_batch(z)
        assert np.allclose(t_y, -t_z, atol=1e-12)

    def test_report_serializes(self):
        p = MixtureParams(n=8, beta0=0.0, sigma0=0.5, mu_z=0.0, sigma_z=1.0,
                          beta1=1.0, sigma1=0.5)
        report = blindness_suite(p, McConfig(replications=500, seed=1))
        d = report.to_dict()
        assert set(d) >= {"replications", "max_rel_dev", "ks", "ks_band"}


class TestDiagnosticReport:
    def test_full_battery(self):
        y = np.array([1.0, 2.0, 2.5, 4.0, 3.0, 0.5])
        rep = diagnostic_report(y)
        assert rep.n == 6
        assert np.isfinite(rep.von_neumann_ratio)
        assert 0.0 <= rep.shapiro_type_w <= 1.0
        assert rep.b2 >= 1.0
        assert len(rep.studentized) == 6
        payload = rep.to_dict()
        assert payload["n"] == 6

    def test_csv_reader(self, tmp_path):
        path = tmp_path / "y.csv"
        path.write_text("y\n1.0\n2.0\n3.5\n")
        y = sample_from_csv(path)
        assert np.allclose(y, [1.0, 2.0, 3.5])

    def test_csv_reader_errors(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z\n1.0\n")
        with pytest.raises(DataError, match="row 1"):
            sample_from_csv(path)
        path.write_text("y\n1.0\nbogus\n")
        with pytest.raises(DataError, match="row 3"):
            sample_from_csv(path)
