import math

import numpy as np
import pytest

from fixdelay import (
    CoefficientOverflow,
    SeedConstraints,
    SeedParameter,
    phi_prime_as_poly,
    sampled_min,
    sturm_positive_on_interval,
)
from fixdelay.positivity import UnivariatePoly, certify_increasing, deflate_root
from fixdelay.seeds import apply_T, apply_T_prime, quadratic_seed


C_MILD = SeedConstraints(tau0=1.0, tau0p=0.3, tau_star=1.0)


def sampling_oracle(p, a, b, n=100_000):
    xs = np.linspace(a, b, n)
    return float(np.min(p(xs)))


class TestPhiPrimeAsPoly:
    def test_zero_parameter_is_beta_prime_scaled(self):
        p = phi_prime_as_poly(SeedParameter.zero(1.0), C_MILD)
        # tau0 * beta'(lam) = 2/1.7 + (0.6/1.7) lam
        assert p.degree == 1
        assert p.coeffs[0] == pytest.approx(2 / 1.7, abs=1e-15)
        assert p.coeffs[1] == pytest.approx(0.6 / 1.7, abs=1e-15)
        assert p(0.0) == pytest.approx(2 / 1.7, abs=1e-15)

    def test_matches_apply_T_prime(self, rng):
        for _ in range(5):
            nu = SeedParameter.poly(rng.uniform(-1, 1, size=6).tolist(), 1.0)
            p = phi_prime_as_poly(nu, C_MILD)
            lams = rng.uniform(-1.0, 0.0, size=50)
            direct = apply_T_prime(nu, C_MILD, lams)
            assert np.max(np.abs(p(lams) - direct)) <= 1e-10

    def test_rejects_transcendental_parameter(self):
        nu = SeedParameter.exponential(1.0, 2.0, 1.0)
        with pytest.raises(ValueError):
            phi_prime_as_poly(nu, C_MILD)


class TestSturm:
    def test_always_positive(self):
        p = UnivariatePoly((1.0, 0.0, 1.0), (-1.0, 0.0))  # 1 + x^2
        assert sturm_positive_on_interval(p, -1.0, 0.0).verdict == "positive"

    def test_sign_change_gives_witness(self):
        p = UnivariatePoly((0.5, 1.0), (-1.0, 0.0))  # x + 0.5
        res = sturm_positive_on_interval(p, -1.0, 0.0)
        assert res.verdict == "not_positive"
        assert -1.0 <= res.witness <= -0.5
        assert p(res.witness) <= 1e-9

    def test_quadratic_seed_derivative_positive(self):
        p = phi_prime_as_poly(SeedParameter.zero(1.0), C_MILD)
        res = sturm_positive_on_interval(p, -1.0, 0.0)
        assert res.verdict == "positive"
        assert sampling_oracle(p, -1.0, 0.0) > 0

    def test_degenerate_zero(self):
        p = UnivariatePoly((), (-1.0, 0.0))
        assert sturm_positive_on_interval(p, -1.0, 0.0).verdict == "degenerate"

    def test_endpoint_zero_reported(self):
        # root exactly at the right endpoint: strictness fails there
        p = UnivariatePoly((0.0, -1.0), (-1.0, 0.0))  # -x, zero at 0
        res = sturm_positive_on_interval(p, -1.0, 0.0)
        assert res.verdict == "not_positive"
        assert res.witness == 0.0

    def test_interior_double_root(self):
        # (x + 1/2)^2: touches zero at -0.5, not strictly positive
        p = UnivariatePoly((0.25, 1.0, 1.0), (-1.0, 0.0))
        res = sturm_positive_on_interval(p, -1.0, 0.0)
        assert res.verdict == "not_positive"
        assert res.witness == pytest.approx(-0.5, abs=1e-9)

    def test_matches_sampling_oracle_on_random_polys(self, rng):
        # 100 random degree <= 6 polynomials, skipping oracle-resolution ties
        checked = 0
        while checked < 100:
            deg = int(rng.integers(0, 7))
            coeffs = rng.uniform(-1, 1, size=deg + 1)
            p = UnivariatePoly(tuple(coeffs), (-1.0, 0.0))
            if p.degree < 0:
                continue
            mn = sampling_oracle(p, -1.0, 0.0)
            if abs(mn) <= 1e-6:
                continue
            res = sturm_positive_on_interval(p, -1.0, 0.0)
            assert res.is_positive == (mn > 0), (coeffs, mn, res)
            checked += 1

    def test_overflow_budget(self):
        p = UnivariatePoly((1.0, 5e-324), (-1.0, 0.0))  # subnormal spread
        with pytest.raises(CoefficientOverflow):
            sturm_positive_on_interval(p, -1.0, 0.0)


class TestDeflation:
    def test_deflating_endpoint_root_keeps_verdict(self, rng):
        # r strictly positive inside; p = r * (x + 1) has a root at the left
        # endpoint (integer coefficients keep the root float-exact).  After
        # deflation the verdict matches r's.
        for _ in range(10):
            a, b = rng.integers(1, 6, size=2)
            r = np.polynomial.polynomial.polyfromroots([a, b])  # positive on [-1,0]
            r = tuple(float(v) for v in r)
            p_coeffs = np.polynomial.polynomial.polymul(r, [1.0, 1.0])
            p = UnivariatePoly(tuple(p_coeffs.tolist()), (-1.0, 0.0))
            res_p = sturm_positive_on_interval(p, -1.0, 0.0)
            assert res_p.verdict == "not_positive" and res_p.witness == -1.0
            q = deflate_root(p, -1.0)
            res_q = sturm_positive_on_interval(q, -1.0, 0.0)
            ref = sturm_positive_on_interval(UnivariatePoly(r, (-1.0, 0.0)), -1.0, 0.0)
            assert res_q.verdict == ref.verdict == "positive"

    def test_deflate_requires_exact_root(self):
        p = UnivariatePoly((1.0, 1.0), (-1.0, 0.0))
        with pytest.raises(ValueError):
            deflate_root(p, 0.25)


class TestSampledMin:
    def test_cosine(self):
        mn, arg = sampled_min(np.cos, 0.0, math.pi, n=10_000)
        assert mn == pytest.approx(-1.0, abs=1e-9)
        assert arg == pytest.approx(math.pi, abs=1e-4)

    def test_pure_exponential_template_derivative(self):
        # phi'(lam) = 2 tau0 e^{2 lam} / (1 - e^{-2}) is increasing, so the
        # minimum sits at the left endpoint with value 2 tau0 e^{-2}/(1-e^{-2})
        tau0 = 1.0 / (2 * math.pi) + 0.001
        f = lambda lam: 2 * tau0 * np.exp(2 * lam) / (1 - math.exp(-2))
        mn, arg = sampled_min(f, -1.0, 0.0, n=10_000)
        assert mn == pytest.approx(0.050134148334900624, abs=1e-12)
        assert arg == pytest.approx(-1.0, abs=1e-6)

    def test_agrees_with_sturm_on_random_polys(self, rng):
        checked = 0
        while checked < 100:
            deg = int(rng.integers(0, 7))
            p = UnivariatePoly(tuple(rng.uniform(-1, 1, size=deg + 1)), (-1.0, 0.0))
            if p.degree < 0:
                continue
            mn, _ = sampled_min(p, -1.0, 0.0, n=100_000)
            if abs(mn) <= 1e-6:
                continue
            res = sturm_positive_on_interval(p, -1.0, 0.0)
            assert res.is_positive == (mn > 0)
            checked += 1


class TestCertifyIncreasing:
    def test_polynomial_route(self):
        cert = certify_increasing(quadratic_seed(C_MILD), C_MILD)
        assert cert.method == "sturm"
        assert cert.is_positive

    def test_sampled_route(self, mild_constraints):
        from fixdelay import catalog
        nu = catalog.seed_family("exponential", mild_constraints)
        cert = certify_increasing(apply_T(nu, mild_constraints), mild_constraints)
        assert cert.method == "sampled"
        assert cert.is_positive
        assert cert.min_value > 0

    def test_detects_decreasing_seed(self):
        # a large constant parameter drives the derivative negative inside
        nu = SeedParameter.poly([40.0], 1.0)
        cert = certify_increasing(apply_T(nu, C_MILD), C_MILD)
        assert not cert.is_positive
        assert cert.witness is not None
