"""Derivative-free search over seed-parameter coefficients.

Coordinates are shifted-Legendre coefficients of the parameter nu; the
objective is the grid maximum of h' over the horizon, with a penalty for
candidates whose seed is not strictly increasing.  Nelder-Mead with
budgeted restarts; the whole run is deterministic for a fixed seed_rng.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from . import positivity
from .delays import DelaySpec
from .errors import FixdelayError, NoAdmissiblePoint
from .seeds import SeedConstraints, SeedParameter, apply_T, check_admissible
from .transform import NewtonSettings, TimeTransform


@dataclass(frozen=True)
class SearchProblem:
    delay: DelaySpec
    constraints: SeedConstraints
    basis_dim: int
    horizon: float = 100.0
    grid_n: int = 2000
    budget: int = 500
    penalty_weight: float = 1000.0
    coarse_factor: int = 10
    newton: NewtonSettings = field(default_factory=NewtonSettings)

    def __post_init__(self):
        if self.basis_dim < 0:
            raise ValueError("basis_dim must be >= 0")
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")


@dataclass(frozen=True)
class EvalRecord:
    index: int
    coeffs: tuple
    value: float
    best_value: float
    admissible: bool


@dataclass(frozen=True)
class SearchResult:
    best_coeffs: tuple
    best_value: float          # full-grid value of the returned seed
    baseline_value: float      # full-grid value of the zero-coefficient seed
    n_evaluations: int
    history: tuple             # EvalRecord per objective call, in order

    def to_dict(self) -> dict:
        return {
            "best_coeffs": list(self.best_coeffs),
            "best_value": self.best_value,
            "baseline_value": self.baseline_value,
            "n_evaluations": self.n_evaluations,
            "history": [
                {"index": r.index, "value": r.value, "best_value": r.best_value,
                 "admissible": r.admissible}
                for r in self.history
            ],
        }


def _certify(coeffs, p: SearchProblem):
    nu = SeedParameter.poly(list(coeffs), p.constraints.tau_star) if len(coeffs) \
        else SeedParameter.zero(p.constraints.tau_star)
    dpoly = positivity.phi_prime_as_poly(nu, p.constraints)
    cert = positivity.sturm_positive_on_interval(dpoly, -p.constraints.tau_star, 0.0)
    return nu, dpoly, cert


def objective(coeffs, p: SearchProblem, coarse: bool = False) -> float:
    """max h' over the horizon, or a monotonicity penalty.

    Inadmissible candidates score penalty_weight * (1 + |min phi'|) without
    building a transform; transform failures score a large finite penalty so
    the optimizer can keep moving.
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (p.basis_dim,):
        raise ValueError(f"expected {p.basis_dim} coefficients, got {coeffs.shape}")
    nu, dpoly, cert = _certify(coeffs, p)
    if not cert.is_positive:
        mn, _ = positivity.sampled_min(dpoly, -p.constraints.tau_star, 0.0, n=2001)
        return p.penalty_weight * (1.0 + abs(min(mn, 0.0)))
    seed = apply_T(nu, p.constraints)
    n = max(p.grid_n // p.coarse_factor, 2) if coarse else p.grid_n
    try:
        tt = TimeTransform(p.delay, seed, p.constraints.tau_star,
                           newton=p.newton, validate=False)
        value, _, _ = tt.max_h_prime(p.horizon, n)
    except FixdelayError:
        return p.penalty_weight * 10.0
    return float(value)


def optimize_seed(p: SearchProblem, seed_rng: int = 0) -> SearchResult:
    """Budgeted Nelder-Mead from the zero seed with up to 3 restarts.

    The search scores on a coarse grid (grid_n / coarse_factor points); the
    reported baseline and best values are re-scored on the full grid, and the
    zero seed is always kept as a candidate so the result never regresses
    below the baseline.
    """
    if p.budget < p.basis_dim + 1:
        raise ValueError("budget must be at least basis_dim + 1")
    rng = np.random.default_rng(seed_rng)
    history: list[EvalRecord] = []
    best = {"value": np.inf, "coeffs": np.zeros(p.basis_dim)}

    def scored(x):
        value = objective(x, p, coarse=True)
        admissible = value < p.penalty_weight
        if value < best["value"]:
            best["value"] = value
            best["coeffs"] = np.asarray(x, dtype=float).copy()
        history.append(EvalRecord(len(history), tuple(float(v) for v in x),
                                  float(value), float(best["value"]), admissible))
        return value

    if p.basis_dim == 0:
        scored(np.zeros(0))
    else:
        radius = 0.1 * p.constraints.tau0
        x0 = np.zeros(p.basis_dim)
        for restart in range(4):
            remaining = p.budget - len(history)
            if remaining <= p.basis_dim + 1:
                break
            signs = rng.choice((-1.0, 1.0), size=p.basis_dim) if restart else np.ones(p.basis_dim)
            simplex = np.vstack([x0] + [x0 + radius * s * e
                                        for s, e in zip(signs, np.eye(p.basis_dim))])
            minimize(scored, x0, method="Nelder-Mead",
                     options={"initial_simplex": simplex, "maxfev": remaining,
                              "xatol": 1e-8, "fatol": 1e-10, "disp": False})
            x0 = best["coeffs"].copy()
            radius *= 0.5

    if not any(r.admissible for r in history):
        least = min(history, key=lambda r: r.value)
        raise NoAdmissiblePoint(
            f"no admissible candidate in {len(history)} evaluations; "
            f"least-violating coefficients: {list(least.coeffs)}")

    # final full-grid scoring; keep the baseline as a candidate
    baseline_value = objective(np.zeros(p.basis_dim), p, coarse=False)
    best_full = objective(best["coeffs"], p, coarse=False)
    if baseline_value <= best_full:
        best_coeffs, best_value = np.zeros(p.basis_dim), baseline_value
    else:
        best_coeffs, best_value = best["coeffs"], best_full

    # the returned seed must be fully admissible at reporting tolerance
    nu = SeedParameter.poly(list(best_coeffs), p.constraints.tau_star) if p.basis_dim \
        else SeedParameter.zero(p.constraints.tau_star)
    report = check_admissible(apply_T(nu, p.constraints), p.constraints, tol=1e-8)
    if not report.passed:
        raise NoAdmissiblePoint("search result failed final admissibility check")

    return SearchResult(tuple(float(v) for v in best_coeffs), float(best_value),
                        float(baseline_value), len(history), tuple(history))
