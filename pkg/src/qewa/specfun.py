"""Special functions backing the analytic quantile oracles.

Self-contained implementations (no scipy): the test suite checks them
against independent high-precision references, so they must not share code
with those references.
"""

import math

from .errors import NumericError

_MAX_ITER = 200
_REL_EPS = 1e-14

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _lower_gamma_series(s, x):
    # power series for the regularized lower incomplete gamma, good for x < s+1
    term = 1.0 / s
    total = term
    a = s
    for _ in range(_MAX_ITER):
        a += 1.0
        term *= x / a
        total += term
        if abs(term) < abs(total) * _REL_EPS:
            return total * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise NumericError(f"incomplete gamma series failed to converge (s={s}, x={x})")


def _upper_gamma_cf(s, x):
    # Lentz continued fraction for the regularized upper incomplete gamma,
    # good for x >= s+1
    tiny = 1e-300
    b = x + 1.0 - s
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _REL_EPS:
            return h * math.exp(-x + s * math.log(x) - math.lgamma(s))
    raise NumericError(
        f"incomplete gamma continued fraction failed to converge (s={s}, x={x})"
    )


def gammainc_lower(s, x):
    """Regularized lower incomplete gamma P(s, x) for s > 0, x >= 0."""
    if s <= 0.0:
        raise ValueError(f"shape must be > 0, got {s!r}")
    if x < 0.0:
        raise ValueError(f"argument must be >= 0, got {x!r}")
    if x == 0.0:
        return 0.0
    if x < s + 1.0:
        return _lower_gamma_series(s, x)
    return 1.0 - _upper_gamma_cf(s, x)


def chi2_cdf(x, nu):
    """CDF of the chi-squared distribution with nu > 0 degrees of freedom."""
    if nu <= 0.0:
        raise ValueError(f"degrees of freedom must be > 0, got {nu!r}")
    if x < 0.0:
        raise ValueError(f"chi-squared support is x >= 0, got {x!r}")
    return gammainc_lower(nu / 2.0, x / 2.0)


def chi2_quantile(q, nu):
    """Inverse chi-squared CDF by bracketed bisection; |CDF(result)-q| < 1e-10."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must be in (0, 1), got {q!r}")
    if nu <= 0.0:
        raise ValueError(f"degrees of freedom must be > 0, got {nu!r}")

    lo = 0.0
    hi = nu + 10.0 * math.sqrt(2.0 * nu) + 10.0
    for _ in range(_MAX_ITER):
        if chi2_cdf(hi, nu) >= q:
            break
        hi *= 2.0
    else:
        raise NumericError(f"failed to bracket chi-squared quantile (q={q}, nu={nu})")

    mid = 0.5 * (lo + hi)
    for _ in range(_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if chi2_cdf(mid, nu) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    return mid


def normal_cdf(x):
    """Standard normal CDF via erfc (accurate in both tails)."""
    return 0.5 * math.erfc(-x / _SQRT2)


# Rational approximation coefficients for the inverse normal CDF
# (Acklam's method), refined below to near machine precision.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)


def _normal_quantile_approx(q):
    p_low = 0.02425
    if q < p_low:
        u = math.sqrt(-2.0 * math.log(q))
        return (((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
               ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    if q > 1.0 - p_low:
        u = math.sqrt(-2.0 * math.log(1.0 - q))
        return -(((((_C[0] * u + _C[1]) * u + _C[2]) * u + _C[3]) * u + _C[4]) * u + _C[5]) / \
                ((((_D[0] * u + _D[1]) * u + _D[2]) * u + _D[3]) * u + 1.0)
    u = q - 0.5
    r = u * u
    return (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * u / \
           (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0)


def normal_quantile(q):
    """Inverse standard normal CDF, refined with one Halley step (~1e-15)."""
    if not (0.0 < q < 1.0):
        raise ValueError(f"q must be in (0, 1), got {q!r}")
    z = _normal_quantile_approx(q)
    e = normal_cdf(z) - q
    if e != 0.0:
        u = e * _SQRT_2PI * math.exp(0.5 * z * z)
        z = z - u / (1.0 + 0.5 * z * u)
    return z
