"""Construction and evaluation of the time transformation h.

For lambda in [(k-1)*tau*, k*tau*) the transform is the k-fold composition
of the lag inverse applied to the seed,

    h(lambda) = (theta^-1)^k ( phi(lambda - k*tau*) ),

evaluated pointwise: each grid point runs its own Newton chain, so points
are independent and the evaluation parallelises trivially.  The derivative
uses the chain rule,

    h'(lambda) = phi'(lambda - k*tau*) / prod_j theta'(h_j),

with h_j the intermediate compositions.  The pointwise alignment residual
h(lambda) - tau(h(lambda)) - h(lambda - tau*) certifies the construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import encode_delay, encode_seed, get_backend
from .delays import DelaySpec, theta_inverse
from .errors import DerivativeVanished, NoConvergence, OutOfDomain
from .seeds import SeedConstraints, SeedFunction, check_admissible

_STATUS_ERRORS = {
    1: NoConvergence,
    2: DerivativeVanished,
    3: OutOfDomain,
}

@dataclass(frozen=True)
class NewtonSettings:
    tol: float = 1e-12
    max_iter: int = 50

@dataclass(frozen=True)
class TransformTrace:
    """Grid evaluation of the transform, one row per lambda."""

    lambdas: np.ndarray
    h: np.ndarray
    h_prime: np.ndarray
    abel_residual: np.ndarray

    @property
    def max_h_prime(self) -> float:
        return float(np.max(self.h_prime))

    @property
    def argmax_h_prime(self) -> float:
        # first occurrence wins, so ties resolve to the smallest lambda
        return float(self.lambdas[int(np.argmax(self.h_prime))])

    @property
    def max_abel_residual(self) -> float:
        finite = self.abel_residual[np.isfinite(self.abel_residual)]
        return float(np.max(np.abs(finite))) if finite.size else math.nan

    def write_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("lambda,h,h_prime,abel_residual\n")
            for row in zip(self.lambdas, self.h, self.h_prime, self.abel_residual):
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def interval_index(lam: float, tau_star: float) -> int:
    """The k >= 0 with lam in [(k-1)*tau*, k*tau*), half-open on the right.

    Grid points k*tau* start interval k+1; lam = -tau* belongs to k = 0.
    """
    if lam < -tau_star:
        raise OutOfDomain(f"lambda = {lam} below -tau* = {-tau_star}")
    return max(int(math.floor(lam / tau_star)) + 1, 0)


class TimeTransform:
    """Bundles delay, seed and Newton settings; evaluates h and h' pointwise.

    Construction validates the seed (boundary residuals at 1e-8 and a strict
    monotonicity certificate) unless validate=False; the escape hatch exists
    for tests that need a deliberately broken seed.
    """

    def __init__(self, delay: DelaySpec, seed: SeedFunction, tau_star: float,
                 newton: NewtonSettings = NewtonSettings(),
                 backend: str = "auto", validate: bool = True):
        self.delay = delay
        self.seed = seed
        self.tau_star = float(tau_star)
        self.newton = newton
        self._kernel = get_backend(backend)
        self._delay_enc = encode_delay(delay)
        form = seed.closed_form()
        self._form = form
        self._seed_enc = encode_seed(form)
        if validate:
            constraints = seed.constraints or SeedConstraints.from_delay(delay, tau_star)
            report = check_admissible(seed, constraints, tol=1e-8)
            if not report.boundary_ok:
                raise ValueError(
                    "seed fails boundary conditions: residuals "
                    f"{report.residual_value0:.3g}, {report.residual_value_left:.3g}, "
                    f"{report.residual_ratio:.3g} exceed 1e-8")
            if not report.monotone.is_positive:
                raise ValueError(
                    f"seed is not strictly increasing (witness near "
                    f"{report.monotone.witness})")

    @property
    def backend_name(self) -> str:
        return self._kernel.backend_name()

    # -- raw kernel access ---------------------------------------------
    def _grid(self, lams, want_abel: bool):
        dk, do, dp = self._delay_enc
        sp, se, sc = self._seed_enc
        h, hp, abel, status, level = self._kernel.chain_grid(
            dk, do, dp, sp, se, sc, self.tau_star, np.asarray(lams, dtype=float),
            self.newton.tol, self.newton.max_iter, want_abel)
        if np.any(status != 0):
            i = int(np.argmax(status != 0))
            err = _STATUS_ERRORS[int(status[i])]
            raise err(f"chain evaluation failed at lambda = {float(np.asarray(lams).ravel()[i]):.9g}"
                      f" (composition level {int(level[i])})")
        return h, hp, abel

    # -- public evaluation ----------------------------------------------
    def eval_h(self, lam: float) -> float:
        h, _, _ = self._grid(np.atleast_1d(np.asarray(lam, dtype=float)), False)
        return float(h[0]) if np.ndim(lam) == 0 else h

    def eval_h_prime(self, lam: float) -> float:
        _, hp, _ = self._grid(np.atleast_1d(np.asarray(lam, dtype=float)), False)
        return float(hp[0]) if np.ndim(lam) == 0 else hp

    def eval_h_many(self, lams) -> tuple:
        h, hp, _ = self._grid(lams, False)
        return h, hp

    def abel_residual(self, lam: float) -> float:
        if np.ndim(lam) == 0 and lam < 0:
            raise OutOfDomain("abel residual is defined for lambda >= 0")
        _, _, abel = self._grid(np.atleast_1d(np.asarray(lam, dtype=float)), True)
        return float(abel[0]) if np.ndim(lam) == 0 else abel

    def eval_h_levels(self, lam: float) -> list:
        """Composition levels [h_0 ... h_k] via the scalar reference path."""
        k = interval_index(float(lam), self.tau_star)
        base = min(max(lam - k * self.tau_star, -self.tau_star), 0.0)
        levels = [float(self._form.phi(base))]
        for _ in range(k):
            prev = levels[-1]
            levels.append(theta_inverse(self.delay, prev, guess=prev + float(self.delay.tau(prev)),
                                        tol=self.newton.tol, max_iter=self.newton.max_iter))
        return levels

    def grid_eval(self, lams) -> TransformTrace:
        lams = np.asarray(lams, dtype=float)
        h, hp, abel = self._grid(lams, True)
        return TransformTrace(lams, h, hp, abel)

    def max_h_prime(self, horizon: float, n_grid: int) -> tuple:
        """(max h', argmax, trace) over a uniform n_grid grid on [0, horizon]."""
        if horizon <= 0:
            raise ValueError("horizon must be positive")
        if n_grid < 2:
            raise ValueError("n_grid must be >= 2")
        trace = self.grid_eval(np.linspace(0.0, horizon, n_grid))
        return trace.max_h_prime, trace.argmax_h_prime, trace

    def eval_h_inverse(self, t: float, tol: float = 1e-10, max_iter: int = 100) -> float:
        """Solve h(lambda) = t by interval bracketing plus safeguarded Newton."""
        t = float(t)
        h_left = float(self._form.phi(-self.tau_star))  # = -tau(0) for admissible seeds
        if t < h_left - tol:
            raise OutOfDomain(f"t = {t} below h(-tau*) = {h_left}")
        # bracket over interval indices: h(k*tau*) grows without bound
        lo_lam, lo_h = -self.tau_star, h_left
        hi_lam = 0.0
        hi_h = 0.0  # h(0) = 0
        for _ in range(100_000):
            if hi_h >= t:
                break
            lo_lam, lo_h = hi_lam, hi_h
            hi_lam += self.tau_star
            hi_h = float(self.eval_h(hi_lam))
        else:
            raise NoConvergence("h inverse: bracket expansion exhausted")
        lam = lo_lam + (hi_lam - lo_lam) * 0.5
        lo, hi = lo_lam, hi_lam
        for _ in range(max_iter):
            h, hp, _ = self._grid(np.array([lam]), False)
            r = float(h[0]) - t
            if abs(r) <= tol:
                return lam
            if r < 0:
                lo = lam
            else:
                hi = lam
            step_ok = hp[0] > 0 and np.isfinite(hp[0])
            cand = lam - r / float(hp[0]) if step_ok else None
            lam = cand if cand is not None and lo < cand < hi else 0.5 * (lo + hi)
        raise NoConvergence(f"h inverse: no convergence for t = {t}")
