import numpy as np
import pytest

from fixdelay import (
    SeedConstraints,
    SeedParameter,
    Unsupported,
    apply_T,
    apply_T_prime,
    beta,
    beta_prime,
    check_admissible,
    identity_seed,
    kernel_K,
    kernel_K_dlambda,
    quadratic_seed,
    recover_parameter,
)
from fixdelay import catalog
from fixdelay.quadrature import integrate

C_MILD = SeedConstraints(tau0=1.0, tau0p=0.3, tau_star=1.0)


def random_constraints(rng):
    return SeedConstraints(tau0=float(rng.uniform(0.2, 2.0)),
                           tau0p=float(rng.uniform(-0.5, 0.9)),
                           tau_star=float(rng.uniform(0.5, 2.0)))


class TestKernels:
    def test_beta_boundary_values(self, rng):
        for _ in range(10):
            c = random_constraints(rng)
            assert beta(-c.tau_star, c) == pytest.approx(0.0, abs=1e-15)
            assert beta(0.0, c) == pytest.approx(1.0, abs=1e-14)

    def test_beta_midpoint_frozen(self):
        # direct arithmetic: (1.4/1.7)*0.5 + (0.3/1.7)*0.25
        assert beta(-0.5, C_MILD) == pytest.approx(0.4558823529411765, abs=1e-15)

    def test_kernel_boundary_identities(self, rng):
        etas = np.linspace(-1.0, 0.0, 41)
        for _ in range(5):
            c = random_constraints(rng)
            eta = etas * c.tau_star
            assert np.max(np.abs(kernel_K(-c.tau_star, eta, c))) < 1e-15
            assert np.max(np.abs(kernel_K(0.0, eta, c) + eta**2 / 2)) < 1e-14

    def test_kernel_dlambda_at_left_edge(self, rng):
        for _ in range(5):
            c = random_constraints(rng)
            eta = np.linspace(-c.tau_star, 0.0, 17)
            expected = (1 - c.tau0p) / (2 - c.tau0p) * (-eta - eta**2 / c.tau_star)
            assert np.allclose(kernel_K_dlambda(-c.tau_star, eta, c), expected, atol=1e-14)

    def test_beta_prime_edges(self):
        c = C_MILD
        assert beta_prime(-1.0, c) == pytest.approx(2 * 0.7 / 1.7, abs=1e-15)
        assert beta_prime(0.0, c) == pytest.approx(2 / 1.7, abs=1e-15)


class TestQuadraticSeed:
    def test_matches_zero_parameter_image(self):
        lam = np.linspace(-1.0, 0.0, 101)
        qs = quadratic_seed(C_MILD)
        tz = apply_T(SeedParameter.zero(1.0), C_MILD)
        assert np.max(np.abs(qs.phi(lam) - tz.phi(lam))) < 1e-14

    def test_boundary_values(self):
        qs = quadratic_seed(C_MILD)
        assert qs.phi(0.0) == pytest.approx(0.0, abs=1e-15)
        assert qs.phi(-1.0) == pytest.approx(-1.0, abs=1e-15)
        assert qs.phi_prime(-1.0) / qs.phi_prime(0.0) == pytest.approx(0.7, abs=1e-14)

    def test_identity_special_case(self):
        # tau0 = tau*, tau0' = 0 reduces the quadratic seed to phi(lam) = lam
        c = SeedConstraints(tau0=1.5, tau0p=0.0, tau_star=1.5)
        qs = quadratic_seed(c)
        lam = np.linspace(-1.5, 0.0, 31)
        assert np.max(np.abs(qs.phi(lam) - lam)) < 1e-15
        assert np.max(np.abs(qs.phi_prime(lam) - 1.0)) < 1e-15


class TestImageBoundaryConditions:
    """Images of the affine map land in the admissible boundary set."""

    def test_random_polynomial_parameters(self, rng):
        # 50 random nu (degree <= 8) across 5 random constraint triples
        constraint_pool = [random_constraints(rng) for _ in range(5)]
        for i in range(50):
            c = constraint_pool[i % 5]
            deg = int(rng.integers(0, 9))
            nu = SeedParameter.poly(rng.uniform(-1, 1, size=deg + 1).tolist(), c.tau_star)
            phi = apply_T(nu, c)
            assert abs(phi.phi(0.0)) <= 1e-10
            assert abs(phi.phi(-c.tau_star) + c.tau0) <= 1e-10
            ratio = phi.phi_prime(-c.tau_star) / phi.phi_prime(0.0)
            assert abs(ratio - (1 - c.tau0p)) <= 1e-10

    def test_derivative_ratio_for_random_parameters(self, rng):
        for _ in range(20):
            c = random_constraints(rng)
            nu = SeedParameter.poly(rng.uniform(-1, 1, size=5).tolist(), c.tau_star)
            left = apply_T_prime(nu, c, -c.tau_star)
            right = apply_T_prime(nu, c, 0.0)
            assert abs(left / right - (1 - c.tau0p)) <= 1e-10

    def test_transcendental_parameters(self, mild_constraints, near_critical_constraints):
        for c in (mild_constraints, near_critical_constraints):
            for fam in ("exponential", "affine_sinusoidal"):
                phi = apply_T(catalog.seed_family(fam, c), c)
                assert abs(phi.phi(0.0)) <= 1e-12
                assert abs(phi.phi(-c.tau_star) + c.tau0) <= 1e-12


class TestThirdDerivativeRecovery:
    def test_polynomial_exact(self, rng):
        # differentiating the exact image three times returns nu
        for _ in range(50):
            c = random_constraints(rng)
            deg = int(rng.integers(0, 9))
            coeffs = rng.uniform(-1, 1, size=deg + 1).tolist()
            nu = SeedParameter.poly(coeffs, c.tau_star)
            recovered = recover_parameter(apply_T(nu, c))
            assert recovered.kind in ("poly", "zero")
            got = list(recovered.params) if recovered.kind == "poly" else []
            want = list(coeffs)
            n = max(len(got), len(want))
            got += [0.0] * (n - len(got))
            want += [0.0] * (n - len(want))
            assert np.max(np.abs(np.array(got) - np.array(want))) <= 1e-10

    def test_quadratic_recovers_zero(self):
        assert recover_parameter(quadratic_seed(C_MILD)).kind == "zero"

    def test_exponential_image_recovers_parameter(self, mild_constraints):
        nu = catalog.seed_family("exponential", mild_constraints)
        rec = recover_parameter(apply_T(nu, mild_constraints))
        assert rec.kind == "exponential"
        assert rec.params == pytest.approx(nu.params, rel=1e-13)

    def test_sinusoidal_image_recovers_parameter(self, mild_constraints):
        nu = catalog.seed_family("affine_sinusoidal", mild_constraints)
        rec = recover_parameter(apply_T(nu, mild_constraints))
        assert rec.kind == "sinusoidal"
        assert rec.params == pytest.approx(nu.params, rel=1e-12)

    def test_t_image_returns_own_parameter(self, mild_constraints):
        nu = catalog.seed_family("exponential", mild_constraints)
        quad_backed = apply_T(nu, mild_constraints, method="quadrature")
        assert recover_parameter(quad_backed) is nu

    def test_mixed_form_unsupported(self):
        from fixdelay.seeds import ClosedFormSeed, SeedFunction
        form = ClosedFormSeed(poly=(0.0, 1.0, 0.0, 0.5), exp_term=(1.0, 2.0))
        with pytest.raises(Unsupported):
            recover_parameter(SeedFunction(form, 1.0))


class TestRoundTrips:
    """apply_T(recover_parameter(phi)) reproduces phi."""

    @pytest.mark.parametrize("family", catalog.SEED_FAMILIES)
    @pytest.mark.parametrize("which", ["mild", "near_critical"])
    def test_catalog_seed_round_trip(self, family, which, mild_constraints,
                                     near_critical_constraints):
        c = mild_constraints if which == "mild" else near_critical_constraints
        phi = apply_T(catalog.seed_family(family, c), c)
        back = apply_T(recover_parameter(phi), c)
        lam = np.linspace(-c.tau_star, 0.0, 201)
        assert np.max(np.abs(back.phi(lam) - phi.phi(lam))) <= 1e-8

    @pytest.mark.parametrize("family", ["exponential", "affine_sinusoidal"])
    def test_round_trip_through_quadrature(self, family, mild_constraints):
        c = mild_constraints
        phi = apply_T(catalog.seed_family(family, c), c)
        back = apply_T(recover_parameter(phi), c, method="quadrature")
        lam = np.linspace(-c.tau_star, 0.0, 201)
        assert np.max(np.abs(back.phi(lam) - phi.phi(lam))) <= 1e-8


class TestDerivativeConsistency:
    def test_prime_matches_exact_polynomial_derivative(self, rng):
        for _ in range(10):
            c = random_constraints(rng)
            nu = SeedParameter.poly(rng.uniform(-1, 1, size=6).tolist(), c.tau_star)
            phi = apply_T(nu, c)
            lam = rng.uniform(-c.tau_star, 0.0, size=50)
            direct = apply_T_prime(nu, c, lam)
            assert np.max(np.abs(direct - phi.phi_prime(lam))) <= 1e-10

    @pytest.mark.parametrize("family", ["exponential", "affine_sinusoidal"])
    def test_prime_matches_finite_differences(self, family, mild_constraints, rng):
        c = mild_constraints
        nu = catalog.seed_family(family, c)
        phi = apply_T(nu, c)
        step = 1e-5
        for lam in rng.uniform(-c.tau_star + 2 * step, -2 * step, size=25):
            fd = (phi.phi(lam + step) - phi.phi(lam - step)) / (2 * step)
            assert phi.phi_prime(lam) == pytest.approx(fd, abs=1e-6)

    @pytest.mark.parametrize("family", ["exponential", "affine_sinusoidal"])
    def test_quadrature_route_agrees(self, family, mild_constraints):
        c = mild_constraints
        nu = catalog.seed_family(family, c)
        exact = apply_T(nu, c)
        quad = apply_T(nu, c, method="quadrature")
        lam = np.linspace(-c.tau_star, 0.0, 41)
        assert np.max(np.abs(exact.phi(lam) - quad.phi(lam))) <= 1e-9
        assert np.max(np.abs(exact.phi_prime(lam) - quad.phi_prime(lam))) <= 1e-9


class TestMoments:
    @pytest.mark.parametrize("family", ["exponential", "affine_sinusoidal"])
    def test_closed_form_moments_vs_quadrature(self, family, mild_constraints):
        nu = catalog.seed_family(family, mild_constraints)
        m1, m2 = nu.moments()
        ref1 = integrate(lambda e: e * nu.value(e), -1.0, 0.0)
        ref2 = integrate(lambda e: e**2 * nu.value(e), -1.0, 0.0)
        assert m1 == pytest.approx(ref1, abs=1e-12)
        assert m2 == pytest.approx(ref2, abs=1e-12)

    def test_poly_moments_vs_quadrature(self, rng):
        nu = SeedParameter.poly(rng.uniform(-1, 1, size=4).tolist(), 1.0)
        m1, m2 = nu.moments()
        assert m1 == pytest.approx(integrate(lambda e: e * nu.value(e), -1.0, 0.0), abs=1e-12)
        assert m2 == pytest.approx(integrate(lambda e: e**2 * nu.value(e), -1.0, 0.0), abs=1e-12)


class TestAdmissibility:
    def test_quadratic_always_passes(self, rng):
        for _ in range(10):
            c = random_constraints(rng)
            report = check_admissible(quadratic_seed(c), c, tol=1e-10)
            assert report.passed

    def test_identity_for_constant_delay(self):
        c = SeedConstraints(tau0=1.0, tau0p=0.0, tau_star=1.0)
        report = check_admissible(identity_seed(1.0, c), c, tol=1e-12)
        assert report.passed

    def test_identity_fails_ratio_for_varying_delay(self):
        report = check_admissible(identity_seed(1.0), C_MILD, tol=1e-8)
        assert not report.passed
        assert report.residual_ratio == pytest.approx(0.3, abs=1e-14)

    def test_report_serializes(self):
        report = check_admissible(quadratic_seed(C_MILD), C_MILD)
        d = report.to_dict()
        assert d["passed"] is True
        assert d["monotone"]["verdict"] == "positive"


class TestSeedParameterBasics:
    def test_serialization_round_trip(self):
        for nu in (SeedParameter.zero(1.0),
                   SeedParameter.poly([0.1, -0.2], 1.0),
                   SeedParameter.exponential(2.0, 1.5, 1.0),
                   SeedParameter.sinusoidal(1.0, 2.0, 0.5, 1.0)):
            assert SeedParameter.from_dict(nu.to_dict(), 1.0) == nu

    def test_tau_star_mismatch_rejected(self):
        nu = SeedParameter.zero(2.0)
        with pytest.raises(ValueError):
            apply_T(nu, C_MILD)

    def test_legendre_value_is_polynomial(self):
        # single Legendre mode: P_2 mapped to [-1, 0]
        nu = SeedParameter.poly([0.0, 0.0, 1.0], 1.0)
        lam = np.linspace(-1, 0, 9)
        x = 2 * lam + 1
        assert np.allclose(nu.value(lam), 0.5 * (3 * x**2 - 1), atol=1e-14)
