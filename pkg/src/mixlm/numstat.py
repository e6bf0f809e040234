"""Distribution tail probabilities, the normal quantile, and a seeded RNG.

Only the standard library is used here: the incomplete beta and gamma
functions are evaluated by continued fractions (modified Lentz) and series,
and the log-gamma comes from :mod:`math`.
"""
from __future__ import annotations

import copy
import math

import numpy as np

from .errors import DomainError

_EPS = 1e-16
_TINY = 1e-300
_MAX_ITER = 10_000


def _beta_cf(a: float, b: float, x: float) -> float:
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = _TINY if abs(d) < _TINY else d
        c = 1.0 + aa / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def regularized_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b), the regularized incomplete beta function."""
    if a <= 0 or b <= 0:
        raise DomainError("incomplete beta needs a > 0 and b > 0")
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"incomplete beta argument {x} outside [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    return _beta_split(a, b, x, 1.0 - x)


def _beta_split(a: float, b: float, x: float, y: float) -> float:
    # y = 1 - x supplied by the caller, exact even when x rounds to 1
    if y == 0.0:
        return 1.0
    if x == 0.0:
        return 0.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log(y))
    front = math.exp(log_front)
    # the continued fraction converges fast only below the mean
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, y) / b


def _gamma_series(a: float, x: float) -> float:
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return total * math.exp(-x + a * math.log(x) - math.lgamma(a))
    raise ArithmeticError("incomplete gamma series did not converge")


def _gamma_cf(a: float, x: float) -> float:
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        d = _TINY if abs(d) < _TINY else d
        c = b + an / c
        c = _TINY if abs(c) < _TINY else c
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def regularized_gamma_q(a: float, x: float) -> float:
    """Q(a, x) = Gamma(a, x) / Gamma(a), the upper regularized gamma."""
    if a <= 0:
        raise DomainError("incomplete gamma needs a > 0")
    if x < 0:
        raise DomainError("incomplete gamma needs x >= 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series(a, x)
    return _gamma_cf(a, x)


def regularized_gamma_p(a: float, x: float) -> float:
    if x < a + 1.0:
        if a <= 0:
            raise DomainError("incomplete gamma needs a > 0")
        if x < 0:
            raise DomainError("incomplete gamma needs x >= 0")
        return 0.0 if x == 0 else _gamma_series(a, x)
    return 1.0 - _gamma_cf(a, x)


def t_two_sided_p(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if not df > 0:
        raise DomainError(f"t distribution needs df > 0, got {df}")
    if math.isnan(t):
        raise DomainError("t statistic is NaN")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return _beta_split(df / 2.0, 0.5, df / (df + t2), t2 / (df + t2))


def f_upper_p(f: float, df1: float, df2: float) -> float:
    """P(F >= f) for the F distribution with (df1, df2) degrees of freedom."""
    if not (df1 > 0 and df2 > 0):
        raise DomainError(f"F distribution needs positive df, got ({df1}, {df2})")
    if f < 0 or math.isnan(f):
        raise DomainError(f"F statistic must be >= 0, got {f}")
    if f == 0:
        return 1.0
    if math.isinf(f):
        return 0.0
    num = df1 * f
    return _beta_split(df2 / 2.0, df1 / 2.0, df2 / (df2 + num), num / (df2 + num))


def chisq_upper_p(x: float, df: float) -> float:
    """P(X >= x) for a chi-square variable with ``df`` degrees of freedom."""
    if not df > 0:
        raise DomainError(f"chi-square needs df > 0, got {df}")
    if x < 0 or math.isnan(x):
        raise DomainError(f"chi-square statistic must be >= 0, got {x}")
    if math.isinf(x):
        return 0.0
    return regularized_gamma_q(df / 2.0, x / 2.0)


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


# Acklam's rational approximation, refined below by Halley steps
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal quantile needs 0 < p < 1, got {p}")
    if p > 0.5:
        return -normal_quantile(1.0 - p)
    x = _acklam(p)
    for _ in range(2):
        # lower tail only, where erfc keeps full relative precision
        e = 0.5 * math.erfc(-x / math.sqrt(2.0)) - p
        u = e * math.sqrt(2.0 * math.pi) * math.exp(x * x / 2.0)
        x = x - u / (1.0 + x * u / 2.0)
    return x


_MASK64 = (1 << 64) - 1


class Rng:
    """xorshift64* generator seeded through splitmix64.

    Identical seeds give identical streams on every platform. Use
    :meth:`clone` to fork a stream.
    """

    def __init__(self, seed: int):
        z = (int(seed) + 0x9E3779B97F4A7C15) & _MASK64
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        z ^= z >> 31
        self.state = z or 0x2545F4914F6CDD1D

    def clone(self) -> "Rng":
        return copy.copy(self)

    def next_u64(self) -> int:
        x = self.state
        x ^= x >> 12
        x ^= (x << 25) & _MASK64
        x ^= x >> 27
        self.state = x
        return (x * 0x2545F4914F6CDD1D) & _MASK64

    def uniform(self) -> float:
        """Uniform deviate strictly inside (0, 1)."""
        return ((self.next_u64() >> 11) + 0.5) * (1.0 / 9007199254740992.0)

    def normal(self, n: int) -> np.ndarray:
        """``n`` standard normal deviates by the Box-Muller transform."""
        if n < 0:
            raise ValueError("n must be >= 0")
        out = np.empty(n)
        two_pi = 2.0 * math.pi
        for i in range(0, n, 2):
            r = math.sqrt(-2.0 * math.log(self.uniform()))
            angle = two_pi * self.uniform()
            out[i] = r * math.cos(angle)
            if i + 1 < n:
                out[i + 1] = r * math.sin(angle)
        return out


def rng_normal(rng: Rng, n: int) -> np.ndarray:
    return rng.normal(n)
