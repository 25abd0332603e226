"""Reference delays and seed-parameter families used by the comparison study.

Two periodic delays are exercised end to end:

* near_critical_sinusoid: tau(t) = g0*sin(2*pi*t) + g1 with
  g0 = 1/(2*pi) - 0.001 and g1 = 1/(2*pi) + 0.001.  The slope peaks at
  2*pi*g0 = 1 - 0.002*pi, a hair under the invertibility bound, and the
  period equals the fixed delay tau* = 1.
* mild_sinusoid: tau(t) = 1 + 0.3*sin(t); tau* = 1 is 1/(2*pi) of the period.

Three parameter families generate the compared seeds (tau* = 1 throughout):

* quadratic: nu = 0, giving the classical quadratic seed.
* exponential: nu(lam) = tau0 * a^3 / (1 - e^(-a*tau*)) * e^(a*lam) with
  a = 2; its image adds the quadratic correction that enforces the boundary
  conditions on top of the exponential shape.
* affine_sinusoidal: nu(lam) = -L1 * (pi/2)^3 * sin(pi/2 * (lam + 1)), whose
  image is exactly affine plus a quarter-cosine,
      L2 - tau0 + L2*lam + L1*(1 - cos(pi/2 * (lam + 1))).
  Matching the three boundary conditions forces
      L1 = 2*tau0*tau0' / (pi*(1 - tau0') + 2*tau0'),   L2 = tau0 - L1,
  the unique member of that shape in the admissible set.
"""

from __future__ import annotations

import math

from .delays import DelaySpec
from .seeds import SeedConstraints, SeedParameter

SEED_FAMILIES = ("quadratic", "exponential", "affine_sinusoidal")


def near_critical_sinusoid() -> DelaySpec:
    g0 = 1.0 / (2.0 * math.pi) - 0.001
    g1 = 1.0 / (2.0 * math.pi) + 0.001
    return DelaySpec.sinusoidal(g0, 2.0 * math.pi, 0.0, g1)


def mild_sinusoid() -> DelaySpec:
    return DelaySpec.sinusoidal(0.3, 1.0, 0.0, 1.0)


def affine_sinusoidal_gains(c: SeedConstraints) -> tuple:
    """(L1, L2): cosine amplitude and affine slope of the quarter-cosine seed."""
    l1 = 2.0 * c.tau0 * c.tau0p / (math.pi * (1.0 - c.tau0p) + 2.0 * c.tau0p)
    return l1, (c.tau0 - l1) / c.tau_star


def seed_family(name: str, c: SeedConstraints) -> SeedParameter:
    """A catalog seed parameter adapted to the given constraints."""
    ts = c.tau_star
    if name == "quadratic":
        return SeedParameter.zero(ts)
    if name == "exponential":
        a = 2.0
        amplitude = c.tau0 * a**3 / (1.0 - math.exp(-a * ts))
        return SeedParameter.exponential(amplitude, a, ts)
    if name == "affine_sinusoidal":
        l1, _ = affine_sinusoidal_gains(c)
        omega = math.pi / (2.0 * ts)  # quarter period spans [-tau*, 0]
        return SeedParameter.sinusoidal(-l1 * omega**3, omega, 0.5 * math.pi, ts)
    raise ValueError(f"unknown seed family {name!r}; choose from {SEED_FAMILIES}")
