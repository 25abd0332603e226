import numpy as np
import pytest

from fixdelay import (
    DelaySpec,
    OutOfDomain,
    SeedConstraints,
    TimeTransform,
    identity_seed,
    interval_index,
    quadratic_seed,
)
from fixdelay import catalog
from fixdelay.seeds import ClosedFormSeed, SeedFunction, apply_T

# root of t - 1 - 0.3 sin(t) = 0, frozen from a 200-step bisection oracle
MILD_THETA_INV_AT_ZERO = 1.2880913132118375

@pytest.fixture
def identity_tt():
    delay = DelaySpec.constant(1.0)
    c = SeedConstraints.from_delay(delay, 1.0)
    return TimeTransform(delay, quadratic_seed(c), 1.0)

@pytest.fixture
def mild_tt(mild_delay, mild_constraints):
    return TimeTransform(mild_delay, quadratic_seed(mild_constraints), 1.0)


class TestIntervalIndex:
    def test_inside_seed_interval(self):
        assert interval_index(-0.5, 1.0) == 0
        assert interval_index(-1.0, 1.0) == 0

    def test_first_forward_interval(self):
        assert interval_index(0.5, 1.0) == 1

    def test_grid_points_open_on_right(self):
        # lambda = k tau* starts interval k+1
        assert interval_index(0.0, 1.0) == 1
        assert interval_index(1.0, 1.0) == 2
        assert interval_index(3.0, 1.5) == 3

    def test_below_domain(self):
        with pytest.raises(OutOfDomain):
            interval_index(-1.0000001, 1.0)

    def test_boundary_continuity(self, mild_tt):
        # both index branches agree at grid points to Newton tolerance
        for k in range(1, 6):
            left = mild_tt.eval_h(k * 1.0 - 1e-12)
            right = mild_tt.eval_h(k * 1.0)
            assert abs(left - right) <= 1e-10


class TestEvalH:
    def test_identity_transform(self, identity_tt):
        lams = np.linspace(0.0, 100.0, 501)
        h, hp = identity_tt.eval_h_many(lams)
        assert np.max(np.abs(h - lams)) <= 1e-12
        assert np.max(np.abs(hp - 1.0)) <= 1e-12

    def test_h_at_zero(self, mild_tt, near_critical_delay, near_critical_constraints):
        assert abs(mild_tt.eval_h(0.0)) <= 1e-12
        tt2 = TimeTransform(near_critical_delay,
                            quadratic_seed(near_critical_constraints), 1.0)
        assert abs(tt2.eval_h(0.0)) <= 1e-12

    def test_known_value_at_one(self, mild_tt):
        # h(1) = theta^-1(phi(0)) = theta^-1(0)
        assert mild_tt.eval_h(1.0) == pytest.approx(MILD_THETA_INV_AT_ZERO, abs=1e-10)

    def test_monotone(self, mild_tt, rng):
        lams = np.sort(rng.uniform(-1.0, 60.0, size=300))
        h, hp = mild_tt.eval_h_many(lams)
        assert np.all(np.diff(h) > 0)
        assert np.all(hp > 0)

    def test_seed_interval_is_phi(self, mild_tt, mild_constraints):
        lam = np.linspace(-1.0, -1e-9, 50)
        h, hp = mild_tt.eval_h_many(lam)
        seed = quadratic_seed(mild_constraints)
        assert np.max(np.abs(h - seed.phi(lam))) <= 1e-14
        assert np.max(np.abs(hp - seed.phi_prime(lam))) <= 1e-14

    def test_smooth_across_zero(self, mild_tt):
        # the derivative-ratio condition makes h' continuous at lambda = 0
        left = mild_tt.eval_h_prime(-1e-9)
        right = mild_tt.eval_h_prime(1e-9)
        assert abs(left - right) <= 1e-6


class TestEvalHPrime:
    @pytest.mark.parametrize("which", ["mild", "near_critical"])
    def test_finite_difference_oracle(self, which, mild_delay, near_critical_delay, rng):
        delay = mild_delay if which == "mild" else near_critical_delay
        c = SeedConstraints.from_delay(delay, 1.0)
        tt = TimeTransform(delay, quadratic_seed(c), 1.0)
        delta = 1e-6
        lams = rng.uniform(0.0, 20.0, size=100)
        h_plus, _ = tt.eval_h_many(lams + delta)
        h_minus, _ = tt.eval_h_many(lams - delta)
        _, hp = tt.eval_h_many(lams)
        fd = (h_plus - h_minus) / (2 * delta)
        rel = np.abs(hp - fd) / np.abs(fd)
        assert np.max(rel) <= 1e-4

    def test_identity_prime(self, identity_tt):
        assert identity_tt.eval_h_prime(37.25) == pytest.approx(1.0, abs=1e-13)


class TestAbelResidual:
    def test_identity_exact(self, identity_tt):
        lams = np.linspace(0.0, 100.0, 101)
        res = identity_tt.abel_residual(lams)
        assert np.max(np.abs(res)) == 0.0

    def test_mild_random(self, mild_tt, rng):
        lams = rng.uniform(0.0, 100.0, size=1000)
        res = mild_tt.abel_residual(lams)
        assert np.max(np.abs(res)) <= 1e-8

    def test_direct_definition(self, mild_tt, mild_delay, rng):
        for lam in rng.uniform(0.0, 30.0, size=10):
            h_lam = mild_tt.eval_h(float(lam))
            h_prev = mild_tt.eval_h(float(lam) - 1.0)
            direct = h_lam - float(mild_delay.tau(h_lam)) - h_prev
            assert mild_tt.abel_residual(float(lam)) == pytest.approx(direct, abs=1e-12)

    def test_negative_lambda_rejected(self, mild_tt):
        with pytest.raises(OutOfDomain):
            mild_tt.abel_residual(-0.5)

    def test_corrupted_seed_breaks_alignment(self, mild_delay, mild_constraints):
        # tilt the quadratic seed by 0.1*(lam + 1): phi(-tau*) stays -tau0 but
        # phi(0) = 0.1.  The forward recursion still satisfies the alignment
        # identity pointwise (it is enforced by construction), so the defect
        # surfaces as a 0.1-scale jump of h at the lambda = 0 boundary.
        good = quadratic_seed(mild_constraints).rep
        bad_poly = (good.poly[0] + 0.1, good.poly[1] + 0.1) + good.poly[2:]
        tt = TimeTransform(mild_delay, SeedFunction(ClosedFormSeed(poly=bad_poly), 1.0),
                           1.0, validate=False)
        res = tt.abel_residual(np.linspace(0.0, 1.0, 21))
        assert np.max(np.abs(res)) <= 1e-10  # identity holds by construction
        jump = abs(tt.eval_h(-1e-12) - tt.eval_h(0.0))
        assert jump == pytest.approx(0.1, abs=1e-3)


class TestMaxHPrime:
    def test_identity(self, identity_tt):
        max_hp, argmax, trace = identity_tt.max_h_prime(100.0, 1001)
        assert max_hp == pytest.approx(1.0, abs=1e-12)
        assert argmax == 0.0  # ties resolve to the smallest lambda
        assert len(trace.lambdas) == 1001

    def test_trace_csv_format(self, identity_tt, tmp_path):
        _, _, trace = identity_tt.max_h_prime(10.0, 11)
        path = tmp_path / "trace.csv"
        trace.write_csv(path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "lambda,h,h_prime,abel_residual"
        assert len(lines) == 12
        row = lines[1].split(",")
        assert len(row) == 4
        assert float(row[1]) == 0.0

    def test_grid_eval_matches_scalar(self, mild_tt):
        lams = np.linspace(0.0, 5.0, 7)
        trace = mild_tt.grid_eval(lams)
        for lam, h in zip(lams, trace.h):
            assert mild_tt.eval_h(float(lam)) == pytest.approx(h, abs=1e-12)


class TestLevels:
    def test_levels_end_at_h(self, mild_tt):
        lam = 4.3
        levels = mild_tt.eval_h_levels(lam)
        assert len(levels) == interval_index(lam, 1.0) + 1
        assert levels[-1] == pytest.approx(mild_tt.eval_h(lam), abs=1e-9)

    def test_levels_are_intermediate_transforms(self, mild_tt):
        # h_j at base lambda - (k - j) tau* equals h(lambda - (k-j) tau*)
        lam = 3.7
        levels = mild_tt.eval_h_levels(lam)
        for j in range(1, len(levels)):
            back = lam - (len(levels) - 1 - j)
            assert levels[j] == pytest.approx(mild_tt.eval_h(back), abs=1e-9)


class TestHInverse:
    def test_zero_maps_to_zero(self, mild_tt):
        assert mild_tt.eval_h_inverse(0.0) == pytest.approx(0.0, abs=1e-9)

    def test_identity(self, identity_tt):
        for t in (0.0, 3.7, 55.0):
            assert identity_tt.eval_h_inverse(t) == pytest.approx(t, abs=1e-9)

    def test_round_trip(self, mild_tt, rng):
        t_max = mild_tt.eval_h(50.0)
        for t in rng.uniform(0.0, t_max, size=100):
            lam = mild_tt.eval_h_inverse(float(t), tol=1e-10)
            assert abs(mild_tt.eval_h(lam) - t) <= 1e-10

    def test_below_domain(self, mild_tt):
        with pytest.raises(OutOfDomain):
            mild_tt.eval_h_inverse(-5.0)


class TestValidation:
    def test_rejects_inadmissible_seed(self, mild_delay):
        with pytest.raises(ValueError, match="boundary"):
            TimeTransform(mild_delay, identity_seed(1.0), 1.0)

    def test_rejects_non_monotone_seed(self, mild_delay, mild_constraints):
        from fixdelay import SeedParameter
        nu = SeedParameter.poly([40.0], 1.0)
        seed = apply_T(nu, mild_constraints)
        with pytest.raises(ValueError, match="increasing"):
            TimeTransform(mild_delay, seed, 1.0)

    def test_escape_hatch(self, mild_delay):
        tt = TimeTransform(mild_delay, identity_seed(1.0), 1.0, validate=False)
        assert np.isfinite(tt.eval_h(2.0))


class TestNearCritical:
    def test_abel_residual_under_slow_lag(self, near_critical_delay,
                                          near_critical_constraints, rng):
        tt = TimeTransform(near_critical_delay,
                           quadratic_seed(near_critical_constraints), 1.0)
        lams = rng.uniform(0.0, 100.0, size=300)
        res = tt.abel_residual(lams)
        assert np.max(np.abs(res)) <= 1e-8

    def test_all_three_families_transform(self, near_critical_delay,
                                          near_critical_constraints):
        for fam in catalog.SEED_FAMILIES:
            seed = apply_T(catalog.seed_family(fam, near_critical_constraints),
                           near_critical_constraints)
            tt = TimeTransform(near_critical_delay, seed, 1.0)
            h, hp = tt.eval_h_many(np.linspace(0.0, 50.0, 101))
            assert np.all(np.diff(h) > 0)
            assert np.all(hp > 0)
