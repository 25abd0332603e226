"""Time-varying delay catalog, the lag function theta(t) = t - tau(t), and
its numerical inverse.

The catalog is closed-form on purpose: every entry carries its exact analytic
derivative, which the Newton inversion and the transform chain both rely on.
Arbitrary callables are rejected so that specs serialize and derivatives are
never approximated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConfigError, DerivativeVanished, NoConvergence
from . import polyops

_KINDS = ("constant", "sinusoidal", "polynomial", "sum")

@dataclass(frozen=True)
class DelaySpec:
    """Closed-form description of tau(t).

    kind "constant":    tau(t) = c                      params (c,)
    kind "sinusoidal":  tau(t) = a*sin(omega*t + phase) + b   params (a, omega, phase, b)
    kind "polynomial":  tau(t) = sum c_i t^i            params = coeffs ascending
    kind "sum":         sum of member specs
    """

    kind: str
    params: tuple = ()
    members: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown delay kind {self.kind!r}")

    # -- constructors -------------------------------------------------
    @staticmethod
    def constant(c: float) -> "DelaySpec":
        return DelaySpec("constant", (float(c),))

    @staticmethod
    def sinusoidal(a: float, omega: float, phase: float, b: float) -> "DelaySpec":
        return DelaySpec("sinusoidal", (float(a), float(omega), float(phase), float(b)))

    @staticmethod
    def polynomial(coeffs: Sequence[float]) -> "DelaySpec":
        return DelaySpec("polynomial", tuple(float(c) for c in coeffs))

    @staticmethod
    def sum_of(specs: Sequence["DelaySpec"]) -> "DelaySpec":
        return DelaySpec("sum", (), tuple(specs))

    # -- evaluation ----------------------------------------------------
    def tau(self, t):
        if self.kind == "constant":
            return self.params[0] + 0.0 * np.asarray(t) if np.ndim(t) else self.params[0]
        if self.kind == "sinusoidal":
            a, om, ph, b = self.params
            return a * np.sin(om * np.asarray(t) + ph) + b
        if self.kind == "polynomial":
            return polyops.evaluate(list(self.params), np.asarray(t))
        return sum(m.tau(t) for m in self.members)

    def tau_dot(self, t):
        if self.kind == "constant":
            return 0.0 * np.asarray(t) if np.ndim(t) else 0.0
        if self.kind == "sinusoidal":
            a, om, ph, _ = self.params
            return a * om * np.cos(om * np.asarray(t) + ph)
        if self.kind == "polynomial":
            return polyops.evaluate(polyops.deriv(list(self.params)), np.asarray(t))
        return sum(m.tau_dot(t) for m in self.members)

    def theta(self, t):
        return np.asarray(t) - self.tau(t) if np.ndim(t) else t - self.tau(t)

    def theta_dot(self, t):
        return 1.0 - self.tau_dot(t)

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant", "c": self.params[0]}
        if self.kind == "sinusoidal":
            a, om, ph, b = self.params
            return {"kind": "sinusoidal", "a": a, "omega": om, "phase": ph, "b": b}
        if self.kind == "polynomial":
            return {"kind": "polynomial", "coeffs": list(self.params)}
        return {"kind": "sum", "members": [m.to_dict() for m in self.members]}

    @staticmethod
    def from_dict(d: dict) -> "DelaySpec":
        kind = d.get("kind")
        keys = set(d) - {"kind"}
        if kind == "constant":
            if keys != {"c"}:
                raise ConfigError(f"delay kind 'constant' takes key 'c', got {sorted(keys)}")
            return DelaySpec.constant(d["c"])
        if kind == "sinusoidal":
            if keys != {"a", "omega", "phase", "b"}:
                raise ConfigError(f"delay kind 'sinusoidal' takes keys a/omega/phase/b, got {sorted(keys)}")
            return DelaySpec.sinusoidal(d["a"], d["omega"], d["phase"], d["b"])
        if kind == "polynomial":
            if keys != {"coeffs"}:
                raise ConfigError(f"delay kind 'polynomial' takes key 'coeffs', got {sorted(keys)}")
            return DelaySpec.polynomial(d["coeffs"])
        if kind == "sum":
            if keys != {"members"}:
                raise ConfigError(f"delay kind 'sum' takes key 'members', got {sorted(keys)}")
            return DelaySpec.sum_of([DelaySpec.from_dict(m) for m in d["members"]])
        raise ConfigError(f"unknown delay kind {kind!r}")


def eval_tau(spec: DelaySpec, t):
    return spec.tau(t)


def eval_tau_dot(spec: DelaySpec, t):
    return spec.tau_dot(t)


def eval_theta(spec: DelaySpec, t):
    return spec.theta(t)


def eval_theta_dot(spec: DelaySpec, t):
    return spec.theta_dot(t)


def theta_inverse(spec: DelaySpec, s: float, guess: float | None = None,
                  tol: float = 1e-12, max_iter: int = 50) -> float:
    """Solve theta(t) = s for t by safeguarded Newton iteration.

    A bracket is established first (theta(s) < s always, since tau > 0; the
    upper end is found by geometric expansion) and every Newton step that
    leaves the bracket is replaced by bisection.  Convergence is declared on
    the residual: |theta(t) - s| <= tol.

    Raises NoConvergence when max_iter is exhausted and DerivativeVanished
    when theta'(t) <= 0 at an iterate (a tau' < 1 violation).
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if guess is None:
        guess = s + float(spec.tau(s))
    g = float(guess)

    # bracket [lo, hi] with theta(lo) <= s <= theta(hi)
    lo = s  # theta(s) - s = -tau(s) < 0
    r_g = float(spec.theta(g)) - s
    if r_g >= 0.0:
        hi = g
    else:
        lo = g
        step = max(float(spec.tau(g)), 0.1)
        hi = g + step
        for _ in range(200):
            if float(spec.theta(hi)) - s >= 0.0:
                break
            lo = hi
            step *= 2.0
            hi += step
        else:
            raise NoConvergence("bracket expansion failed; is tau bounded?")

    t = min(max(g, lo), hi)
    for _ in range(max_iter):
        r = float(spec.theta(t)) - s
        if abs(r) <= tol:
            return t
        if r < 0.0:
            lo = t
        else:
            hi = t
        td = float(spec.theta_dot(t))
        if td <= 0.0:
            raise DerivativeVanished(
                f"theta'({t:.6g}) = {td:.3g} <= 0; delay violates tau' < 1")
        t_newton = t - r / td
        t = t_newton if lo < t_newton < hi else 0.5 * (lo + hi)
    raise NoConvergence(f"theta inverse: no convergence after {max_iter} iterations "
                        f"(s={s:.6g}, last residual {r:.3g})")

@dataclass(frozen=True)
class ValidationReport:
    """Sampled check of the delay assumptions tau > 0 and tau' < 1."""

    interval: tuple
    n_samples: int
    min_tau: float
    argmin_tau: float
    max_tau: float
    max_tau_dot: float
    argmax_tau_dot: float
    tau_positive: bool
    slope_bounded: bool

    @property
    def passed(self) -> bool:
        return self.tau_positive and self.slope_bounded

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "n_samples": self.n_samples,
            "min_tau": self.min_tau,
            "argmin_tau": self.argmin_tau,
            "max_tau": self.max_tau,
            "max_tau_dot": self.max_tau_dot,
            "argmax_tau_dot": self.argmax_tau_dot,
            "tau_positive": self.tau_positive,
            "slope_bounded": self.slope_bounded,
            "passed": self.passed,
        }


def validate_delay(spec: DelaySpec, interval: tuple, n_samples: int = 10_000) -> ValidationReport:
    """Check tau > 0 and tau' < 1 on a uniform grid plus local refinement.

    This is a sampled check, not a certificate: each candidate extremum from
    the coarse grid is refined twice on shrinking sub-grids.  Failures are
    reported, never raised.
    """
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    a, b = float(interval[0]), float(interval[1])
    ts = np.linspace(a, b, n_samples)
    tau = np.asarray(spec.tau(ts), dtype=float)
    tdot = np.asarray(spec.tau_dot(ts), dtype=float)

    def refine(objective, t0):
        # two rounds of local refinement around a coarse candidate
        width = (b - a) / (n_samples - 1)
        best_t = t0
        for _ in range(2):
            lo = max(a, best_t - width)
            hi = min(b, best_t + width)
            tt = np.linspace(lo, hi, 201)
            vv = np.asarray(objective(tt), dtype=float)
            best_t = float(tt[np.argmax(vv)])
            width /= 100.0
        return best_t, float(objective(best_t))

    i_min = int(np.argmin(tau))
    argmin_tau, neg_min = refine(lambda t: -np.asarray(spec.tau(t)), float(ts[i_min]))
    min_tau = -neg_min
    i_max = int(np.argmax(tdot))
    argmax_td, max_td = refine(spec.tau_dot, float(ts[i_max]))

    return ValidationReport(
        interval=(a, b),
        n_samples=n_samples,
        min_tau=min_tau,
        argmin_tau=argmin_tau,
        max_tau=float(np.max(tau)),
        max_tau_dot=max_td,
        argmax_tau_dot=argmax_td,
        tau_positive=min_tau > 0.0,
        slope_bounded=max_td < 1.0,
    )
