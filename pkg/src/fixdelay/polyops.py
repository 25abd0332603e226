"""Small polynomial helpers on ascending coefficient lists.

Everything here is generic over the coefficient ring: the same functions run
on floats and on fractions.Fraction, which is how the exact integration and
Sturm paths stay rational end to end.
"""

from fractions import Fraction


def trim(c):
    """Drop trailing zeros; the zero polynomial becomes []."""
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def add(a, b):
    n = max(len(a), len(b))
    out = [0] * n
    for i, v in enumerate(a):
        out[i] = out[i] + v
    for i, v in enumerate(b):
        out[i] = out[i] + v
    return trim(out)


def scale(a, s):
    return trim([s * v for v in a])


def mul(a, b):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, u in enumerate(a):
        for j, v in enumerate(b):
            out[i + j] = out[i + j] + u * v
    return trim(out)


def deriv(a):
    return [i * v for i, v in enumerate(a)][1:]


def antideriv(a):
    """Antiderivative with zero constant term. Divides exactly over Fraction."""
    out = [0 * v for v in a[:1]] or [0]
    for i, v in enumerate(a):
        if isinstance(v, Fraction):
            out.append(v / (i + 1))
        else:
            out.append(v / (i + 1))
    return trim(out)


def evaluate(a, x):
    acc = 0 * x if a else 0
    for v in reversed(a):
        acc = acc * x + v
    return acc


def definite_integral(a, lo, hi):
    f = antideriv(a)
    return evaluate(f, hi) - evaluate(f, lo)


def compose_affine(a, alpha, beta):
    """Coefficients of p(alpha*x + beta) given those of p(x)."""
    out = []
    lin = [beta, alpha]
    for v in reversed(a):
        out = add(mul(out, lin), [v])
    return trim(out)


def shifted_legendre(n, tau_star):
    """Monomial coefficients of the first n shifted Legendre polynomials.

    The polynomials are the classical P_k mapped onto [-tau_star, 0] (so
    P_k(2*lam/tau_star + 1)); normalisation is P_k(1) = 1 at lam = 0.
    Computed over Fraction so the basis matrix is exact.
    """
    ts = Fraction(tau_star) if not isinstance(tau_star, Fraction) else tau_star
    x = [Fraction(1), Fraction(2) / ts]  # mapped variable
    basis = []
    for k in range(n):
        if k == 0:
            basis.append([Fraction(1)])
        elif k == 1:
            basis.append(list(x))
        else:
            a = scale(mul(x, basis[k - 1]), Fraction(2 * k - 1, k))
            b = scale(basis[k - 2], Fraction(k - 1, k))
            basis.append(add(a, scale(b, -1)))
    return basis


def legendre_to_monomial(coeffs, tau_star):
    """Expand shifted-Legendre coordinates into monomial coefficients."""
    coeffs = list(coeffs)
    basis = shifted_legendre(len(coeffs), tau_star)
    out = []
    for c, b in zip(coeffs, basis):
        out = add(out, scale(b, c if isinstance(c, Fraction) else Fraction(c)))
    return out


def monomial_to_legendre(coeffs, tau_star):
    """Exact inverse of legendre_to_monomial (solves the triangular system)."""
    mono = [Fraction(v) for v in coeffs]
    n = len(mono)
    basis = shifted_legendre(n, tau_star)
    out = [Fraction(0)] * n
    # each basis[k] has exact degree k, so peel from the top
    for k in range(n - 1, -1, -1):
        if len(mono) <= k or mono[k] == 0:
            continue
        ck = mono[k] / basis[k][k]
        out[k] = ck
        mono = add(mono, scale(basis[k], -ck))
    return out
