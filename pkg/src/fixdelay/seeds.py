"""Seed functions, the admissible set, and the affine parameterisation.

A seed phi lives on [-tau*, 0] and must satisfy the three boundary conditions

    phi(0) = 0,   phi(-tau*) = -tau0,   phi'(0) * (1 - tau0') = phi'(-tau*),

plus strict monotonicity (certified separately; see the positivity module).
The affine map T sends any square-integrable parameter nu to a seed with
those boundary conditions, and T(phi''') = phi recovers the parameter.

Two evaluation routes coexist:

* an exact route: for polynomial nu the image T(nu) is integrated
  symbolically over rationals; for exponential / sinusoidal nu the integrals
  have closed-form antiderivatives.  Both produce a ClosedFormSeed
  (polynomial + optional exponential + optional cosine part) with analytic
  derivatives through third order.
* a quadrature route (apply_T(..., method="quadrature")): the defining
  integrals are evaluated by adaptive Gauss-Legendre panels.  It is the
  independent cross-check for the exact algebra and the fallback for
  parameters outside the closed-form catalog.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import polyops, quadrature
from .delays import DelaySpec
from .errors import ConfigError, Unsupported

_F = Fraction


@dataclass(frozen=True)
class SeedConstraints:
    """Boundary data (tau0, tau0', tau*) that pins down the admissible set."""

    tau0: float
    tau0p: float
    tau_star: float

    def __post_init__(self):
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")
        if not self.tau_star > 0:
            raise ValueError("tau_star must be positive")
        if not self.tau0p < 1:
            raise ValueError("tau0' must be below 1")

    @staticmethod
    def from_delay(delay: DelaySpec, tau_star: float) -> "SeedConstraints":
        return SeedConstraints(float(delay.tau(0.0)), float(delay.tau_dot(0.0)), float(tau_star))

    def to_dict(self) -> dict:
        return {"tau0": self.tau0, "tau0p": self.tau0p, "tau_star": self.tau_star}


@dataclass(frozen=True)
class SeedParameter:
    """The free L2 parameter nu on [-tau*, 0].

    kind "zero":        nu = 0
    kind "poly":        coefficients in the shifted Legendre basis on [-tau*, 0]
    kind "exponential": nu(lam) = c * exp(a*lam)          params (c, a)
    kind "sinusoidal":  nu(lam) = c * sin(omega*lam + phase)   params (c, omega, phase)
    """

    kind: str
    tau_star: float
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in ("zero", "poly", "exponential", "sinusoidal"):
            raise ValueError(f"unknown seed parameter kind {self.kind!r}")

    @staticmethod
    def zero(tau_star: float) -> "SeedParameter":
        return SeedParameter("zero", float(tau_star))

    @staticmethod
    def poly(coeffs: Sequence[float], tau_star: float) -> "SeedParameter":
        return SeedParameter("poly", float(tau_star), tuple(float(c) for c in coeffs))

    @staticmethod
    def exponential(c: float, a: float, tau_star: float) -> "SeedParameter":
        return SeedParameter("exponential", float(tau_star), (float(c), float(a)))

    @staticmethod
    def sinusoidal(c: float, omega: float, phase: float, tau_star: float) -> "SeedParameter":
        return SeedParameter("sinusoidal", float(tau_star), (float(c), float(omega), float(phase)))

    def value(self, lam):
        lam = np.asarray(lam, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(lam) if lam.ndim else 0.0
        if self.kind == "poly":
            mono = [float(c) for c in polyops.legendre_to_monomial(self.params, self.tau_star)]
            return polyops.evaluate(mono, lam)
        if self.kind == "exponential":
            c, a = self.params
            return c * np.exp(a * lam)
        c, om, ph = self.params
        return c * np.sin(om * lam + ph)

    def monomial(self) -> list:
        """Exact monomial coefficients (Fraction) for polynomial parameters."""
        if self.kind == "zero":
            return []
        if self.kind != "poly":
            raise Unsupported(f"monomial form needs a polynomial parameter, not {self.kind}")
        return polyops.legendre_to_monomial(self.params, self.tau_star)

    def moments(self) -> tuple:
        """Closed-form (M1, M2) with Mk = integral of eta^k * nu(eta) over [-tau*, 0]."""
        ts = self.tau_star
        if self.kind == "zero":
            return 0.0, 0.0
        if self.kind == "poly":
            mono = self.monomial()
            m1 = polyops.definite_integral(polyops.mul([_F(0), _F(1)], mono), -_F(ts), _F(0))
            m2 = polyops.definite_integral(polyops.mul([_F(0), _F(0), _F(1)], mono), -_F(ts), _F(0))
            return float(m1), float(m2)
        if self.kind == "exponential":
            c, a = self.params
            e = math.exp(-a * ts)
            m1 = c * (-1.0 / a**2 + e * (ts / a + 1.0 / a**2))
            m2 = c * (2.0 / a**3 - e * (ts**2 / a + 2.0 * ts / a**2 + 2.0 / a**3))
            return m1, m2
        c, om, ph = self.params
        phb = ph - om * ts  # phase at eta = -tau*
        m1 = c * (math.sin(ph) / om**2 - ts * math.cos(phb) / om - math.sin(phb) / om**2)
        m2 = c * (2.0 * math.cos(ph) / om**3 + ts**2 * math.cos(phb) / om
                  + 2.0 * ts * math.sin(phb) / om**2 - 2.0 * math.cos(phb) / om**3)
        return m1, m2

    def to_dict(self) -> dict:
        if self.kind == "zero":
            return {"kind": "zero"}
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.params)}
        if self.kind == "exponential":
            return {"kind": "exponential", "c": self.params[0], "a": self.params[1]}
        return {"kind": "sinusoidal", "c": self.params[0],
                "omega": self.params[1], "phase": self.params[2]}

    @staticmethod
    def from_dict(d: dict, tau_star: float) -> "SeedParameter":
        kind = d.get("kind")
        keys = set(d) - {"kind", "name"}
        if kind == "zero":
            if keys:
                raise ConfigError(f"seed kind 'zero' takes no extra keys, got {sorted(keys)}")
            return SeedParameter.zero(tau_star)
        if kind == "poly":
            if keys != {"coeffs"}:
                raise ConfigError(f"seed kind 'poly' takes key 'coeffs', got {sorted(keys)}")
            return SeedParameter.poly(d["coeffs"], tau_star)
        if kind == "exponential":
            if keys != {"c", "a"}:
                raise ConfigError(f"seed kind 'exponential' takes keys c/a, got {sorted(keys)}")
            return SeedParameter.exponential(d["c"], d["a"], tau_star)
        if kind == "sinusoidal":
            if keys != {"c", "omega", "phase"}:
                raise ConfigError(f"seed kind 'sinusoidal' takes keys c/omega/phase, got {sorted(keys)}")
            return SeedParameter.sinusoidal(d["c"], d["omega"], d["phase"], tau_star)
        raise ConfigError(f"unknown seed parameter kind {kind!r}")


# ---------------------------------------------------------------------------
# kernels of the affine map
# ---------------------------------------------------------------------------

def beta(lam, c: SeedConstraints):
    """Boundary interpolation kernel: beta(-tau*) = 0, beta(0) = 1."""
    d = 2.0 - c.tau0p
    u = np.asarray(lam, dtype=float) + c.tau_star
    return (2.0 * (1.0 - c.tau0p) / (d * c.tau_star)) * u \
        + (c.tau0p / (d * c.tau_star**2)) * u**2


def beta_prime(lam, c: SeedConstraints):
    d = 2.0 - c.tau0p
    u = np.asarray(lam, dtype=float) + c.tau_star
    return 2.0 * (1.0 - c.tau0p) / (d * c.tau_star) + 2.0 * c.tau0p / (d * c.tau_star**2) * u


def kernel_K(lam, eta, c: SeedConstraints):
    """Integral kernel: K(-tau*, eta) = 0 and K(0, eta) = -eta^2 / 2."""
    d = 2.0 - c.tau0p
    u = np.asarray(lam, dtype=float) + c.tau_star
    eta = np.asarray(eta, dtype=float)
    lin = (1.0 - c.tau0p) / d * (-eta - eta**2 / c.tau_star)
    quad = -(1.0 / d) * (c.tau0p * eta**2 / (2.0 * c.tau_star**2)
                         - (1.0 - c.tau0p) * eta / c.tau_star)
    return lin * u + quad * u**2


def kernel_K_dlambda(lam, eta, c: SeedConstraints):
    d = 2.0 - c.tau0p
    u = np.asarray(lam, dtype=float) + c.tau_star
    eta = np.asarray(eta, dtype=float)
    lin = (1.0 - c.tau0p) / d * (-eta - eta**2 / c.tau_star)
    quad = -(1.0 / d) * (c.tau0p * eta**2 / (2.0 * c.tau_star**2)
                         - (1.0 - c.tau0p) * eta / c.tau_star)
    return lin + 2.0 * quad * u


# ---------------------------------------------------------------------------
# seed function representations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClosedFormSeed:
    """phi(lam) = poly(lam) + ce*exp(ae*lam) + cc*cos(oc*lam + pc).

    Analytic through third order; this is also the encoding the transform
    kernels evaluate in their inner loop.
    """

    poly: tuple
    exp_term: tuple | None = None   # (ce, ae)
    cos_term: tuple | None = None   # (cc, oc, pc)
    poly_exact: tuple | None = None  # Fractions, kept when built exactly

    def _parts(self, lam, order):
        lam = np.asarray(lam, dtype=float)
        coeffs = list(self.poly)
        for _ in range(order):
            coeffs = polyops.deriv(coeffs)
        out = polyops.evaluate(coeffs, lam) + (0.0 * lam)
        if self.exp_term is not None:
            ce, ae = self.exp_term
            out = out + ce * ae**order * np.exp(ae * lam)
        if self.cos_term is not None:
            cc, oc, pc = self.cos_term
            # successive derivatives of cos: cos, -sin, -cos, sin
            trig = (np.cos, lambda x: -np.sin(x), lambda x: -np.cos(x), np.sin)[order % 4]
            out = out + cc * oc**order * trig(oc * lam + pc)
        return out if out.ndim else float(out)

    def phi(self, lam):
        return self._parts(lam, 0)

    def phi_prime(self, lam):
        return self._parts(lam, 1)

    def phi_second(self, lam):
        return self._parts(lam, 2)

    def phi_third(self, lam):
        return self._parts(lam, 3)


class TImageSeed:
    """Quadrature-backed image T(nu); evaluation integrates the definition.

    Immutable after construction.  The lambda-independent kernel moments are
    memoised; memoisation does not change any result.
    """

    def __init__(self, nu: SeedParameter, constraints: SeedConstraints, quad_tol: float = 1e-12):
        self.nu = nu
        self.constraints = constraints
        self.quad_tol = quad_tol
        self._ia_ib = None

    def _moment_integrals(self):
        if self._ia_ib is None:
            c = self.constraints
            d = 2.0 - c.tau0p
            ts = c.tau_star
            nu = self.nu.value
            m1 = quadrature.integrate(lambda e: e * nu(e), -ts, 0.0, self.quad_tol)
            m2 = quadrature.integrate(lambda e: e**2 * nu(e), -ts, 0.0, self.quad_tol)
            ia = (1.0 - c.tau0p) / d * (-m1 - m2 / ts)
            ib = -(1.0 / d) * (c.tau0p * m2 / (2.0 * ts**2) - (1.0 - c.tau0p) * m1 / ts)
            self._ia_ib = (ia, ib)
        return self._ia_ib

    def phi(self, lam):
        lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
        c = self.constraints
        ia, ib = self._moment_integrals()
        out = np.empty(lam_arr.shape)
        for i, x in enumerate(lam_arr):
            u = x + c.tau_star
            tail = quadrature.integrate(
                lambda e: 0.5 * (x - e)**2 * self.nu.value(e), -c.tau_star, x, self.quad_tol)
            out[i] = (-c.tau0 + c.tau0 * float(beta(x, c)) + ia * u + ib * u**2 + tail)
        return out if np.ndim(lam) else float(out[0])

    def phi_prime(self, lam):
        lam_arr = np.atleast_1d(np.asarray(lam, dtype=float))
        c = self.constraints
        ia, ib = self._moment_integrals()
        out = np.empty(lam_arr.shape)
        for i, x in enumerate(lam_arr):
            u = x + c.tau_star
            tail = quadrature.integrate(
                lambda e: (x - e) * self.nu.value(e), -c.tau_star, x, self.quad_tol)
            out[i] = c.tau0 * float(beta_prime(x, c)) + ia + 2.0 * ib * u + tail
        return out if np.ndim(lam) else float(out[0])

    def phi_third(self, lam):
        # third derivative of the image is the parameter itself
        return self.nu.value(lam)


@dataclass(frozen=True)
class SeedFunction:
    """A seed on [-tau*, 0] with values and derivatives."""

    rep: object  # ClosedFormSeed | TImageSeed
    tau_star: float
    constraints: SeedConstraints | None = None

    def phi(self, lam):
        return self.rep.phi(lam)

    def phi_prime(self, lam):
        return self.rep.phi_prime(lam)

    def phi_third(self, lam):
        return self.rep.phi_third(lam)

    def closed_form(self) -> ClosedFormSeed:
        """The analytic representation (derived exactly for T-images)."""
        if isinstance(self.rep, ClosedFormSeed):
            return self.rep
        assert isinstance(self.rep, TImageSeed)
        exact = apply_T(self.rep.nu, self.rep.constraints)
        return exact.rep


# ---------------------------------------------------------------------------
# the affine map, exact routes
# ---------------------------------------------------------------------------

def _exact_quadratic_core(c: SeedConstraints):
    """Fraction coefficients of -tau0 + tau0*beta(lam) in the monomial basis."""
    tau0, tau0p, ts = _F(c.tau0), _F(c.tau0p), _F(c.tau_star)
    d = 2 - tau0p
    u = [ts, _F(1)]  # lam + tau*
    quad = polyops.add(
        polyops.scale(u, 2 * (1 - tau0p) / (d * ts)),
        polyops.scale(polyops.mul(u, u), tau0p / (d * ts**2)),
    )
    return polyops.add([-tau0], polyops.scale(quad, tau0))


def _exact_T_poly(nu_mono, c: SeedConstraints):
    """Exact monomial coefficients of T(nu) for polynomial nu (Fractions)."""
    tau0p, ts = _F(c.tau0p), _F(c.tau_star)
    d = 2 - tau0p
    nu_mono = [v if isinstance(v, Fraction) else _F(v) for v in nu_mono]
    u = [ts, _F(1)]

    m1 = polyops.definite_integral(polyops.mul([_F(0), _F(1)], nu_mono), -ts, _F(0))
    m2 = polyops.definite_integral(polyops.mul([_F(0), _F(0), _F(1)], nu_mono), -ts, _F(0))
    ia = (1 - tau0p) / d * (-m1 - m2 / ts)
    ib = -(tau0p * m2 / (2 * ts**2) - (1 - tau0p) * m1 / ts) / d

    out = _exact_quadratic_core(c)
    out = polyops.add(out, polyops.scale(u, ia))
    out = polyops.add(out, polyops.scale(polyops.mul(u, u), ib))

    # tail integral of (lam - eta)^2 / 2 * nu(eta) from -tau* to lam:
    # expand the square and integrate each eta-power of nu exactly
    for k, weight in ((0, [_F(0), _F(0), _F(1, 2)]), (1, [_F(0), _F(-1)]), (2, [_F(1, 2)])):
        pk = polyops.antideriv(polyops.mul([_F(0)] * k + [_F(1)], nu_mono))
        nk = polyops.add(pk, [-polyops.evaluate(pk, -ts)])
        out = polyops.add(out, polyops.mul(weight, nk))
    return out


def apply_T(nu: SeedParameter, c: SeedConstraints, method: str = "exact",
            quad_tol: float = 1e-12) -> SeedFunction:
    """Build the seed T(nu) for the given boundary constraints.

    method "exact" uses symbolic integration (polynomial nu) or closed-form
    antiderivatives (exponential / sinusoidal nu).  method "quadrature"
    evaluates the defining integrals adaptively and is kept as an
    independent route; it raises QuadratureFailure if tolerance is missed.
    """
    if nu.tau_star != c.tau_star:
        raise ValueError("nu.tau_star must match constraints.tau_star")
    if method == "quadrature":
        return SeedFunction(TImageSeed(nu, c, quad_tol), c.tau_star, c)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")

    ts = c.tau_star
    if nu.kind in ("zero", "poly"):
        exact = _exact_T_poly([] if nu.kind == "zero" else nu.monomial(), c)
        form = ClosedFormSeed(poly=tuple(float(v) for v in exact),
                              poly_exact=tuple(exact))
        return SeedFunction(form, ts, c)

    m1, m2 = nu.moments()
    d = 2.0 - c.tau0p
    ia = (1.0 - c.tau0p) / d * (-m1 - m2 / ts)
    ib = -(1.0 / d) * (c.tau0p * m2 / (2.0 * ts**2) - (1.0 - c.tau0p) * m1 / ts)
    base = [float(v) for v in _exact_quadratic_core(c)]
    u = [ts, 1.0]
    poly = polyops.add(base, polyops.scale(u, ia))
    poly = polyops.add(poly, polyops.scale(polyops.mul(u, u), ib))

    if nu.kind == "exponential":
        cc, a = nu.params
        e = math.exp(-a * ts)
        # tail = (cc/a^3) e^{a lam} - cc e^{-a tau*} (1/a^3 + u/a^2 + u^2/(2a))
        tail_quad = polyops.scale(
            polyops.add(polyops.add([1.0 / a**3], polyops.scale(u, 1.0 / a**2)),
                        polyops.scale(polyops.mul(u, u), 1.0 / (2.0 * a))),
            -cc * e)
        poly = polyops.add(poly, tail_quad)
        form = ClosedFormSeed(poly=tuple(poly), exp_term=(cc / a**3, a))
        return SeedFunction(form, ts, c)

    cc, om, ph = nu.params
    phb = ph - om * ts
    # tail = (cc/om^3) cos(om lam + ph) - (cc/om^3) cos(phb)
    #        + (cc/om^2) sin(phb) u + (cc/(2 om)) cos(phb) u^2
    tail_quad = polyops.add(
        polyops.add([-cc / om**3 * math.cos(phb)],
                    polyops.scale(u, cc / om**2 * math.sin(phb))),
        polyops.scale(polyops.mul(u, u), cc / (2.0 * om) * math.cos(phb)))
    poly = polyops.add(poly, tail_quad)
    form = ClosedFormSeed(poly=tuple(poly), cos_term=(cc / om**3, om, ph))
    return SeedFunction(form, ts, c)


def apply_T_prime(nu: SeedParameter, c: SeedConstraints, lam, method: str = "exact"):
    """Derivative of the image, (T nu)'(lam)."""
    if method == "quadrature":
        return TImageSeed(nu, c).phi_prime(lam)
    return apply_T(nu, c).phi_prime(lam)


def quadratic_seed(c: SeedConstraints) -> SeedFunction:
    """The zero-parameter seed -tau0 + tau0*beta(lam): always admissible."""
    return apply_T(SeedParameter.zero(c.tau_star), c)


def identity_seed(tau_star: float, constraints: SeedConstraints | None = None) -> SeedFunction:
    """phi(lam) = lam; admissible exactly when tau0 = tau* and tau0' = 0."""
    form = ClosedFormSeed(poly=(0.0, 1.0), poly_exact=(_F(0), _F(1)))
    return SeedFunction(form, float(tau_star), constraints)


def recover_parameter(phi: SeedFunction) -> SeedParameter:
    """Invert the parameterisation: return nu = phi''' for known forms."""
    ts = phi.tau_star
    if isinstance(phi.rep, TImageSeed):
        return phi.rep.nu
    form = phi.rep
    poly_deg = len(polyops.trim(list(form.poly))) - 1
    has_exp = form.exp_term is not None and form.exp_term[0] != 0.0
    has_cos = form.cos_term is not None and form.cos_term[0] != 0.0
    if has_exp and has_cos:
        raise Unsupported("mixed exponential and sinusoidal parts have no catalog parameter")
    if (has_exp or has_cos) and poly_deg > 2:
        raise Unsupported("polynomial part of degree > 2 mixed with a transcendental part")
    if has_exp:
        ce, ae = form.exp_term
        return SeedParameter.exponential(ce * ae**3, ae, ts)
    if has_cos:
        cc, oc, pc = form.cos_term
        # third derivative of cc*cos is cc*oc^3*sin
        return SeedParameter.sinusoidal(cc * oc**3, oc, pc, ts)
    if poly_deg < 3:
        return SeedParameter.zero(ts)
    source = form.poly_exact if form.poly_exact is not None else form.poly
    third = list(source)
    for _ in range(3):
        third = polyops.deriv(third)
    legendre = polyops.monomial_to_legendre(third, ts)
    return SeedParameter.poly([float(v) for v in legendre], ts)


# ---------------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibilityReport:
    residual_value0: float       # |phi(0)|
    residual_value_left: float   # |phi(-tau*) + tau0|
    residual_ratio: float        # |phi'(0)(1 - tau0') - phi'(-tau*)|
    monotone: object             # positivity.CertificateResult
    tol: float

    @property
    def boundary_ok(self) -> bool:
        return max(self.residual_value0, self.residual_value_left,
                   self.residual_ratio) <= self.tol

    @property
    def passed(self) -> bool:
        return self.boundary_ok and self.monotone.is_positive

    def to_dict(self) -> dict:
        return {
            "residual_value0": self.residual_value0,
            "residual_value_left": self.residual_value_left,
            "residual_ratio": self.residual_ratio,
            "monotone": self.monotone.to_dict(),
            "tol": self.tol,
            "passed": self.passed,
        }


def check_admissible(phi: SeedFunction, c: SeedConstraints, tol: float = 1e-8) -> AdmissibilityReport:
    """Measure the three boundary residuals and certify strict monotonicity."""
    from . import positivity  # local import; positivity builds on this module

    if tol <= 0:
        raise ValueError("tol must be positive")
    ts = c.tau_star
    r0 = abs(float(phi.phi(0.0)))
    rl = abs(float(phi.phi(-ts)) + c.tau0)
    rr = abs(float(phi.phi_prime(0.0)) * (1.0 - c.tau0p) - float(phi.phi_prime(-ts)))
    cert = positivity.certify_increasing(phi, c)
    return AdmissibilityReport(r0, rl, rr, cert, tol)
