"""Standard normal primitives: pdf, cdf, inverse cdf, and the cdf antiderivative.

Everything downstream (optimality conditions, profit formulas, limits) is built
from these four scalar functions, so they are kept dependency-free and accurate
to full double precision in the body of the distribution.
"""

from __future__ import annotations

import math

__all__ = ["std_pdf", "std_cdf", "std_inv_cdf", "cdf_antiderivative"]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_SQRT_2 = math.sqrt(2.0)

# Rational approximation for the inverse normal cdf (P. Acklam, 2003),
# |relative error| < 1.15e-9 before refinement.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _require_finite(y: float, name: str = "y") -> float:
    y = float(y)
    if not math.isfinite(y):
        raise ValueError(f"{name} must be finite, got {y!r}")
    return y


def std_pdf(y: float) -> float:
    """Density of the standard normal at y: exp(-y^2/2)/sqrt(2*pi)."""
    y = _require_finite(y)
    return _INV_SQRT_2PI * math.exp(-0.5 * y * y)


def std_cdf(y: float) -> float:
    """P(Z <= y) for standard normal Z, via the complementary error function.

    erfc keeps full relative accuracy in the lower tail, so probabilities
    remain meaningful down to the underflow threshold.
    """
    y = _require_finite(y)
    return 0.5 * math.erfc(-y / _SQRT_2)


def _inv_cdf_estimate(p: float) -> float:
    # Acklam's piecewise rational approximation, lower half only (p <= 0.5).
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def std_inv_cdf(p: float) -> float:
    """Quantile of the standard normal: the y with std_cdf(y) = p, 0 < p < 1.

    Rational initial estimate refined by two Newton steps; round-trips through
    std_cdf to well below 1e-12 across (1e-10, 1 - 1e-10).
    """
    p = float(p)
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p!r}")
    # Work on the lower half where the cdf has full relative accuracy;
    # 1 - p is exact for p >= 0.5 (Sterbenz).
    if p > 0.5:
        return -std_inv_cdf(1.0 - p)
    y = _inv_cdf_estimate(p)
    for _ in range(2):
        step = (std_cdf(y) - p) / std_pdf(y)
        if not math.isfinite(step):
            break
        y -= step
    return y


def cdf_antiderivative(y: float) -> float:
    """Integral of std_cdf from -infinity up to y, in closed form.

    Equals y*Phi(y) + phi(y); non-negative, tends to 0 as y -> -inf and to y
    as y -> +inf.
    """
    y = _require_finite(y)
    value = y * std_cdf(y) + std_pdf(y)
    # Cancellation of two subnormals in the far lower tail can round to a
    # tiny negative; the true value is positive.
    return value if value > 0.0 else 0.0
