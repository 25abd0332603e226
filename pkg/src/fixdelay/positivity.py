"""Strict-positivity certificates for seed derivatives.

For polynomial parameters the derivative of the seed is itself a polynomial,
and positivity on [-tau*, 0] is decided exactly: coefficients are
rationalised (floats convert to rationals with no error), a Sturm sequence
counts real roots in the interval, and a positive value at the left endpoint
plus a zero root count certifies strict positivity.  The univariate test is
necessary and sufficient, so no semidefinite machinery is involved.

Non-polynomial seeds fall back to a dense sampling oracle with golden-section
refinement around the sampled minimiser.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import polyops, seeds
from .errors import CoefficientOverflow

# Certificates work over exact rationals: a float coefficient c = m * 2^e
# converts to a Fraction with no error.  The budget below bounds the bit
# length of the coefficients after clearing denominators (a positive common
# scaling, which cannot change the verdict); only adversarial magnitude
# spreads (subnormals mixed with huge values) exceed it, and those trigger
# the documented switch to the sampling fallback.
_SCALED_INT_BIT_BUDGET = 1024


@dataclass(frozen=True)
class UnivariatePoly:
    """Monomial-basis polynomial tagged with the interval it certifies on."""

    coeffs: tuple
    domain: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(polyops.trim(list(self.coeffs))))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    def __call__(self, x):
        return polyops.evaluate(list(self.coeffs), np.asarray(x, dtype=float)) \
            if np.ndim(x) else polyops.evaluate(list(self.coeffs), float(x))

    def derivative(self) -> "UnivariatePoly":
        return UnivariatePoly(tuple(polyops.deriv(list(self.coeffs))), self.domain)


@dataclass(frozen=True)
class CertificateResult:
    verdict: str              # "positive" | "not_positive" | "degenerate"
    witness: float | None     # a point with p(witness) <= 0, when not positive
    method: str               # "sturm" | "sampled"
    min_value: float | None = None  # sampled route only

    @property
    def is_positive(self) -> bool:
        return self.verdict == "positive"

    def to_dict(self) -> dict:
        return {"verdict": self.verdict, "witness": self.witness,
                "method": self.method, "min_value": self.min_value}


def phi_prime_as_poly(nu: seeds.SeedParameter, c: seeds.SeedConstraints) -> UnivariatePoly:
    """Exact monomial polynomial equal to (T nu)' for polynomial nu."""
    if nu.kind not in ("zero", "poly"):
        raise ValueError("phi_prime_as_poly needs a polynomial (or zero) parameter")
    image = seeds.apply_T(nu, c)
    exact = list(image.rep.poly_exact)
    d = polyops.deriv(exact)
    return UnivariatePoly(tuple(float(v) for v in d), (-c.tau_star, 0.0))


# ---------------------------------------------------------------------------
# exact Sturm machinery over rationals
# ---------------------------------------------------------------------------

def _rationalize(coeffs):
    out = [v if isinstance(v, Fraction) else Fraction(float(v)) for v in coeffs]
    out = polyops.trim(out)
    nonzero = [f for f in out if f]
    if nonzero:
        common = 1
        for f in nonzero:
            common = common * f.denominator // math.gcd(common, f.denominator)
        worst = max(abs(f.numerator) * (common // f.denominator) for f in nonzero)
        if worst.bit_length() > _SCALED_INT_BIT_BUDGET:
            raise CoefficientOverflow(
                f"scaled integer coefficients need {worst.bit_length()} bits "
                f"(> {_SCALED_INT_BIT_BUDGET}); use the sampling fallback")
    return out


def _normalize(p):
    """Divide by the positive content to keep Sturm coefficients small."""
    if not p:
        return p
    num_gcd = math.gcd(*(abs(v.numerator) for v in p)) or 1
    den_lcm = 1
    for v in p:
        den_lcm = den_lcm * v.denominator // math.gcd(den_lcm, v.denominator)
    s = Fraction(den_lcm, num_gcd)
    return [v * s for v in p]


def _poly_rem(a, b):
    """Remainder of a / b over Fractions."""
    a = list(a)
    while len(a) >= len(b):
        if not a:
            break
        q = a[-1] / b[-1]
        shift = len(a) - len(b)
        for i, v in enumerate(b):
            a[shift + i] -= q * v
        a = a[:-1]
        a = polyops.trim(a)
    return a


def _poly_gcd(a, b):
    a, b = polyops.trim(list(a)), polyops.trim(list(b))
    while b:
        a, b = b, _normalize(_poly_rem(a, b))
    return a


def _sturm_chain(p):
    chain = [p, polyops.trim(polyops.deriv(p))]
    while chain[-1]:
        r = _poly_rem(chain[-2], chain[-1])
        if not r:
            break
        chain.append(_normalize([-v for v in r]))
    return [q for q in chain if q]


def _sign_variations(chain, x):
    signs = []
    for q in chain:
        v = polyops.evaluate(q, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for s1, s2 in zip(signs, signs[1:]) if s1 != s2)


def _count_roots(p, a, b):
    """Distinct real roots of p in (a, b], exact; p(a) != 0 required."""
    sqfree = p
    g = _poly_gcd(p, polyops.deriv(p))
    if len(g) > 1:
        # divide out repeated factors
        q, r = _poly_divmod(p, g)
        assert not r
        sqfree = q
    chain = _sturm_chain(_normalize(sqfree))
    return _sign_variations(chain, a) - _sign_variations(chain, b)


def _poly_divmod(a, b):
    a = list(a)
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        coef = a[-1] / b[-1]
        shift = len(a) - len(b)
        q[shift] = coef
        for i, v in enumerate(b):
            a[shift + i] -= coef * v
        a = polyops.trim(a[:-1])
    return polyops.trim(q), a


def deflate_root(p: UnivariatePoly, root: float) -> UnivariatePoly:
    """Divide out an exact root (used for endpoint zeros)."""
    coeffs = _rationalize(p.coeffs)
    q, r = _poly_divmod(coeffs, [-Fraction(float(root)), Fraction(1)])
    if r and r[0] != 0:
        raise ValueError(f"{root} is not an exact root (remainder {float(r[0]):.3g})")
    return UnivariatePoly(tuple(float(v) for v in q), p.domain)


def _isolate_witness(p_frac, a, b, width=Fraction(1, 10**13)):
    """Bisect on the Sturm count until the leftmost root is pinned down."""
    chain = _sturm_chain(_normalize(p_frac))
    lo, hi = a, b
    while hi - lo > width:
        mid = (lo + hi) / 2
        left_count = _sign_variations(chain, lo) - _sign_variations(chain, mid)
        if left_count > 0:
            hi = mid
        else:
            lo = mid
    return float((lo + hi) / 2)


def sturm_positive_on_interval(p: UnivariatePoly, a: float, b: float) -> CertificateResult:
    """Exact verdict on p > 0 over [a, b].

    Strictness includes the endpoints: an endpoint zero is reported as
    not_positive with that endpoint as witness, since the admissibility
    condition requires a strictly increasing seed on the closed interval.
    """
    if not a < b:
        raise ValueError("need a < b")
    coeffs = _rationalize(p.coeffs)
    if not coeffs:
        return CertificateResult("degenerate", None, "sturm")
    fa, fb = Fraction(float(a)), Fraction(float(b))
    pa = polyops.evaluate(coeffs, fa)
    if pa <= 0:
        return CertificateResult("not_positive", float(a), "sturm")
    pb = polyops.evaluate(coeffs, fb)
    if pb <= 0:
        return CertificateResult("not_positive", float(b), "sturm")
    if _count_roots(coeffs, fa, fb) == 0:
        return CertificateResult("positive", None, "sturm")
    witness = _isolate_witness(coeffs, fa, fb)
    return CertificateResult("not_positive", witness, "sturm")


# ---------------------------------------------------------------------------
# sampling fallback
# ---------------------------------------------------------------------------

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def sampled_min(f, a: float, b: float, n: int = 100_000) -> tuple:
    """(min value, argmin) over a uniform grid plus golden-section refinement."""
    if n < 2:
        raise ValueError("n must be >= 2")
    xs = np.linspace(a, b, n)
    vals = np.asarray(f(xs), dtype=float)
    i = int(np.argmin(vals))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, n - 1)]
    # golden-section shrink around the grid argmin
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = float(f(x1)), float(f(x2))
    for _ in range(80):
        if hi - lo <= 1e-14 * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = float(f(x1))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = float(f(x2))
    xm = 0.5 * (lo + hi)
    fm = float(f(xm))
    if fm < vals[i]:
        return fm, float(xm)
    return float(vals[i]), float(xs[i])


def certify_increasing(phi: seeds.SeedFunction, c: seeds.SeedConstraints) -> CertificateResult:
    """Verdict on phi' > 0 over [-tau*, 0]: Sturm when exact, sampling otherwise."""
    form = phi.closed_form()
    ts = c.tau_star
    if form.exp_term is None and form.cos_term is None:
        source = form.poly_exact if form.poly_exact is not None else form.poly
        dcoeffs = polyops.deriv(list(source))
        p = UnivariatePoly(tuple(float(v) for v in dcoeffs), (-ts, 0.0))
        return sturm_positive_on_interval(p, -ts, 0.0)
    mn, arg = sampled_min(form.phi_prime, -ts, 0.0)
    if mn > 0.0:
        return CertificateResult("positive", None, "sampled", min_value=mn)
    return CertificateResult("not_positive", arg, "sampled", min_value=mn)
